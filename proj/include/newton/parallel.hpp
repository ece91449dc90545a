#pragma once

#include <cstddef>
#include <exception>

namespace newton {

/// Runs body(i) for i in [0, count) on the OpenMP team. The first exception
/// thrown by any iteration is rethrown on the calling thread once the loop
/// has finished.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(newton_parallel_for)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace newton
