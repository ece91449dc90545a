#include "newton/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "newton/error.hpp"

namespace newton::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal_quantile needs p in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

double chi_squared_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("chi_squared_quantile needs p in (0,1)");
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

double beta_cdf(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::cdf(boost::math::beta_distribution<double>(a, b), x);
}

double beta_quantile(double p, double a, double b) {
    return boost::math::quantile(boost::math::beta_distribution<double>(a, b), p);
}

double compensated_sum(std::span<const double> v) {
    double sum = 0.0;
    double c = 0.0;
    for (double x : v) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    return sum + c;
}

double compensated_mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return compensated_sum(v) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double mu = compensated_mean(v);
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mu) * (v[i] - mu);
    return compensated_sum(sq) / static_cast<double>(v.size() - 1);
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw ValidationError("ks_statistic needs a nonempty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_pvalue(double statistic, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double anderson_darling_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw ValidationError("anderson_darling_statistic needs a nonempty sample");
    std::sort(sample.begin(), sample.end());
    const std::size_t n = sample.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::clamp(cdf(sample[i]), 1e-300, 1.0 - 1e-16);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += (2.0 * static_cast<double>(i) + 1.0) * (std::log(f[i]) + std::log1p(-f[n - 1 - i]));
    }
    return -static_cast<double>(n) - s / static_cast<double>(n);
}

double anderson_darling_pvalue(double z) {
    if (z <= 0.0) return 1.0;
    double cdf = 0.0;
    if (z < 2.0) {
        cdf = std::exp(-1.2337141 / z) / std::sqrt(z) *
              (2.00012 + (.247105 - (.0649821 - (.0347962 - (.011672 - .00168691 * z) * z) * z) * z) * z);
    } else {
        cdf = std::exp(-std::exp(1.0776 - (2.30695 - (.43424 - (.082433 - (.008056 - .0003146 * z) * z) * z) * z) * z));
    }
    return std::clamp(1.0 - cdf, 0.0, 1.0);
}

std::size_t count_local_maxima(std::span<const double> values, double relative_floor) {
    if (values.size() < 3) return 0;
    const double floor = relative_floor * *std::max_element(values.begin(), values.end());
    std::size_t count = 0;
    std::size_t i = 1;
    while (i + 1 < values.size()) {
        if (values[i] > values[i - 1]) {
            std::size_t j = i;
            while (j + 1 < values.size() && values[j + 1] == values[i]) ++j;
            if (j + 1 < values.size() && values[j + 1] < values[i] && values[i] > floor) ++count;
            i = j + 1;
        } else {
            ++i;
        }
    }
    return count;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t replica) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace newton::stats
