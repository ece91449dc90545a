#pragma once

// Inner loops of the estimator over the Theta support. Each kernel exists in
// two flavours: a plain serial reference (newton::serial) and an OpenMP
// version (newton::omp). The OpenMP reductions sum fixed-size blocks and then
// add the block partials in order, so their result does not depend on the
// thread count. The serial and OpenMP results agree to rounding, not bitwise.

#include <cstddef>
#include <span>

#include "newton/kernel.hpp"

namespace newton {

enum class Backend { serial, openmp };

/// Outcome of one Bayes step over the support.
struct Evidence {
    /// log of sum_j w_j v_j f(x | theta_j); -inf when the evidence vanished.
    double log_evidence;
    bool degenerate;
};

/// Joint input of the support-side kernels: support points, quadrature
/// weights and current values (density or atom weights).
struct SupportView {
    std::span<const double> theta;
    std::span<const double> weight;
    std::span<const double> value;
};

namespace serial {

/// posterior[j] = v_j f(x|theta_j) / sum_l w_l v_l f(x|theta_l), in log space.
Evidence bayes_posterior(const Kernel& kernel, double x, SupportView support, std::span<double> posterior);

/// For every x-node i: log f_G(x_i) and, for every set a (row a of the
/// row-major k x m `coefficients`), P_G(A_a | x_i). `probs` is nx x k row-major.
void set_probabilities(const Kernel& kernel, std::span<const double> xs, SupportView support,
                       std::span<const double> coefficients, std::size_t k, std::span<double> log_density,
                       std::span<double> probs);

double sum(std::span<const double> v);

}  // namespace serial

namespace omp {

Evidence bayes_posterior(const Kernel& kernel, double x, SupportView support, std::span<double> posterior);

void set_probabilities(const Kernel& kernel, std::span<const double> xs, SupportView support,
                       std::span<const double> coefficients, std::size_t k, std::span<double> log_density,
                       std::span<double> probs);

/// Blocked, thread-count independent sum.
double sum(std::span<const double> v);

int max_threads() noexcept;
void set_threads(int n) noexcept;

}  // namespace omp

Evidence bayes_posterior(Backend backend, const Kernel& kernel, double x, SupportView support,
                         std::span<double> posterior);

void set_probabilities(Backend backend, const Kernel& kernel, std::span<const double> xs, SupportView support,
                       std::span<const double> coefficients, std::size_t k, std::span<double> log_density,
                       std::span<double> probs);

}  // namespace newton
