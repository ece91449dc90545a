#include "newton/grid_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace newton {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kBlock = 512;

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

// Fills e_j = v_j f(x|theta_j) / exp(M) and returns (M, Z = sum w_j e_j).
struct Shifted {
    double shift;
    double total;
};

Shifted shifted_likelihood(const Kernel& kernel, double x, SupportView s, std::span<double> e) {
    kernel.log_density(x, s.theta, e);
    double shift = kNegInf;
    const std::size_t m = e.size();
    for (std::size_t j = 0; j < m; ++j) {
        if (s.value[j] > 0.0 && e[j] > shift) shift = e[j];
    }
    if (shift == kNegInf) {
        std::fill(e.begin(), e.end(), 0.0);
        return {kNegInf, 0.0};
    }
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        e[j] = s.value[j] > 0.0 ? s.value[j] * std::exp(e[j] - shift) : 0.0;
        total += s.weight[j] * e[j];
    }
    return {shift, total};
}

}  // namespace

// ------------------------------------------------------------------ serial

namespace serial {

double sum(std::span<const double> v) {
    double total = 0.0;
    for (double x : v) total += x;
    return total;
}

Evidence bayes_posterior(const Kernel& kernel, double x, SupportView support, std::span<double> posterior) {
    const auto [shift, total] = shifted_likelihood(kernel, x, support, posterior);
    if (shift == kNegInf || !(total > 0.0) || !std::isfinite(total)) return {kNegInf, true};
    const double inv = 1.0 / total;
    for (double& p : posterior) p *= inv;
    return {shift + std::log(total), false};
}

void set_probabilities(const Kernel& kernel, std::span<const double> xs, SupportView support,
                       std::span<const double> coefficients, std::size_t k, std::span<double> log_density,
                       std::span<double> probs) {
    const std::size_t m = support.theta.size();
    std::vector<double> e(m);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto [shift, total] = shifted_likelihood(kernel, xs[i], support, e);
        const bool ok = shift != kNegInf && total > 0.0;
        log_density[i] = ok ? shift + std::log(total) : kNegInf;
        for (std::size_t a = 0; a < k; ++a) {
            double num = 0.0;
            const double* c = coefficients.data() + a * m;
            for (std::size_t j = 0; j < m; ++j) num += c[j] * e[j];
            probs[i * k + a] = ok ? std::clamp(num / total, 0.0, 1.0) : 0.0;
        }
    }
}

}  // namespace serial

// ------------------------------------------------------------------ openmp

namespace omp {

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) noexcept {
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, n));
#else
    (void)n;
#endif
}

double sum(std::span<const double> v) {
    const std::size_t nb = block_count(v.size());
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t end = std::min(v.size(), (b + 1) * kBlock);
        double acc = 0.0;
        for (std::size_t i = b * kBlock; i < end; ++i) acc += v[i];
        partial[b] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

Evidence bayes_posterior(const Kernel& kernel, double x, SupportView s, std::span<double> posterior) {
    const std::size_t m = s.theta.size();
    const std::size_t nb = block_count(m);
    std::vector<double> block_max(nb, kNegInf);
    std::vector<double> partial(nb, 0.0);

    kernel.validate_observation(x);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t begin = b * kBlock;
        const std::size_t len = std::min(m, begin + kBlock) - begin;
        kernel.log_density(x, s.theta.subspan(begin, len), posterior.subspan(begin, len));
        double mx = kNegInf;
        for (std::size_t j = begin; j < begin + len; ++j) {
            if (s.value[j] > 0.0 && posterior[j] > mx) mx = posterior[j];
        }
        block_max[b] = mx;
    }
    const double shift = *std::max_element(block_max.begin(), block_max.end());
    if (shift == kNegInf) {
        std::fill(posterior.begin(), posterior.end(), 0.0);
        return {kNegInf, true};
    }

#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t end = std::min(m, (b + 1) * kBlock);
        double acc = 0.0;
        for (std::size_t j = b * kBlock; j < end; ++j) {
            const double e = s.value[j] > 0.0 ? s.value[j] * std::exp(posterior[j] - shift) : 0.0;
            posterior[j] = e;
            acc += s.weight[j] * e;
        }
        partial[b] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    if (!(total > 0.0) || !std::isfinite(total)) return {kNegInf, true};

    const double inv = 1.0 / total;
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < m; ++j) posterior[j] *= inv;
    return {shift + std::log(total), false};
}

void set_probabilities(const Kernel& kernel, std::span<const double> xs, SupportView support,
                       std::span<const double> coefficients, std::size_t k, std::span<double> log_density,
                       std::span<double> probs) {
    const std::size_t m = support.theta.size();
    const std::size_t nx = xs.size();
    // observations are validated up front so no exception escapes the region
    for (double x : xs) kernel.validate_observation(x);
#pragma omp parallel
    {
        std::vector<double> e(m);
#pragma omp for schedule(static)
        for (std::size_t i = 0; i < nx; ++i) {
            const auto [shift, total] = shifted_likelihood(kernel, xs[i], support, e);
            const bool ok = shift != kNegInf && total > 0.0;
            log_density[i] = ok ? shift + std::log(total) : kNegInf;
            for (std::size_t a = 0; a < k; ++a) {
                double num = 0.0;
                const double* c = coefficients.data() + a * m;
                for (std::size_t j = 0; j < m; ++j) num += c[j] * e[j];
                probs[i * k + a] = ok ? std::clamp(num / total, 0.0, 1.0) : 0.0;
            }
        }
    }
}

}  // namespace omp

Evidence bayes_posterior(Backend backend, const Kernel& kernel, double x, SupportView support,
                         std::span<double> posterior) {
    return backend == Backend::openmp ? omp::bayes_posterior(kernel, x, support, posterior)
                                      : serial::bayes_posterior(kernel, x, support, posterior);
}

void set_probabilities(Backend backend, const Kernel& kernel, std::span<const double> xs, SupportView support,
                       std::span<const double> coefficients, std::size_t k, std::span<double> log_density,
                       std::span<double> probs) {
    if (backend == Backend::openmp) {
        omp::set_probabilities(kernel, xs, support, coefficients, k, log_density, probs);
    } else {
        serial::set_probabilities(kernel, xs, support, coefficients, k, log_density, probs);
    }
}

}  // namespace newton
