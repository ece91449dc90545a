#pragma once

// Helpers shared by the unit and acceptance suites: seeded generators of
// random test inputs and independent numerical oracles. Nothing here calls
// into the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "newton/mixing_measure.hpp"

namespace newton::testing {

inline double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normal_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var);
}

/// Draws reproducible random test inputs.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(rng_); }

    /// A normal prior on a grid, with random location and spread.
    GridDensity normal_prior(std::size_t m) {
        const double mu = uniform(-2.0, 2.0);
        const double var = uniform(0.5, 4.0);
        return normal_grid(mu, var, m);
    }

    /// A lumpy grid density: random positive mixture of bumps.
    GridDensity lumpy(double lo, double hi, std::size_t m) {
        const std::size_t k = 1 + index(4);
        std::vector<double> mu(k), sd(k), w(k);
        for (std::size_t i = 0; i < k; ++i) {
            mu[i] = uniform(lo + 0.2 * (hi - lo), hi - 0.2 * (hi - lo));
            sd[i] = uniform(0.3, 1.5);
            w[i] = uniform(0.2, 1.0);
        }
        return GridDensity::from_function(lo, hi, m, [&](double t) {
            double v = 0.0;
            for (std::size_t i = 0; i < k; ++i) v += w[i] * normal_pdf(t, mu[i], sd[i] * sd[i]);
            return v;
        });
    }

    /// A discrete measure with k distinct atoms in [lo, hi].
    DiscreteMixing discrete(std::size_t k, double lo, double hi) {
        std::vector<double> atoms(k), w(k);
        for (std::size_t i = 0; i < k; ++i) {
            atoms[i] = lo + (hi - lo) * (static_cast<double>(i) + uniform(0.1, 0.9)) / static_cast<double>(k);
            w[i] = uniform(0.1, 1.0);
        }
        return DiscreteMixing(std::move(atoms), std::move(w));
    }

    /// Interval (a, b] with endpoints in [lo, hi]; b may be +inf or a -inf.
    ThetaSet interval(double lo, double hi) {
        double a = uniform(lo, hi);
        double b = uniform(lo, hi);
        if (a > b) std::swap(a, b);
        const double roll = uniform(0.0, 1.0);
        if (roll < 0.2) return ThetaSet::at_most(b);
        if (roll < 0.3) return ThetaSet::above(a);
        return ThetaSet::interval(a, b);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Sample mean and its Monte Carlo standard error.
struct McEstimate {
    double mean;
    double se;
};

inline McEstimate mc_estimate(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// Monte Carlo estimate of a variance and its standard error (delta method on
/// the fourth central moment).
inline McEstimate mc_variance(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : v) {
        const double d = (x - mean) * (x - mean);
        m2 += d;
        m4 += d * d;
    }
    m2 /= n;
    m4 /= n;
    return {m2 * n / (n - 1.0), std::sqrt(std::max(m4 - m2 * m2, 0.0) / n)};
}

/// Mass of the interval A under node values v on the uniform grid `nodes`,
/// by the trapezoid rule with the cumulative linearly interpolated inside a
/// cell. Values need not be normalized; the result is divided by the total.
inline double trapezoid_mass(const std::vector<double>& nodes, const std::vector<double>& v, const ThetaSet& a) {
    const std::size_t m = nodes.size();
    const double h = nodes[1] - nodes[0];
    std::vector<double> cum(m, 0.0);
    for (std::size_t i = 1; i < m; ++i) cum[i] = cum[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
    auto at = [&](double t) {
        if (t <= nodes.front()) return 0.0;
        if (t >= nodes.back()) return cum.back();
        std::size_t i = static_cast<std::size_t>((t - nodes.front()) / h);
        if (i >= m - 1) i = m - 2;
        return cum[i] + (t - nodes[i]) / h * (cum[i + 1] - cum[i]);
    };
    return (at(a.hi()) - at(a.lo())) / cum.back();
}

/// Grid Bayes posterior of an interval computed from scratch: node values
/// prior * likelihood, then trapezoid_mass.
template <class Like>
double grid_posterior_mass(const GridDensity& g, const ThetaSet& a, Like&& likelihood) {
    std::vector<double> nodes(g.nodes().begin(), g.nodes().end());
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) v[j] = g.values()[j] * likelihood(nodes[j]);
    return trapezoid_mass(nodes, v, a);
}

}  // namespace newton::testing
