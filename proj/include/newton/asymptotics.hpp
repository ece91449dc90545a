#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "newton/recursion.hpp"

namespace newton {

inline constexpr double kDefaultEpsilon = 1e-6;

/// Nodes and weights of a quadrature over the observation space that covers
/// all but `tail` of the predictive mass of the state.
struct ObservationQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

ObservationQuadrature observation_quadrature(const EstimatorState& state);

/// Joint law of P_{G_n}(A_a | X) for X ~ f_{G_n}, summarized by its mean and
/// covariance.
struct SetMoments {
    std::vector<double> mean;
    Eigen::MatrixXd covariance;
    /// Predictive mass captured by the quadrature (1 minus the truncated tail).
    double captured_mass;
};

SetMoments set_moments(const EstimatorState& state, std::span<const ThetaSet> sets);

/// V_{A,n} = int P_{G_n}(A|x)^2 dF_{G_n}(x) - G_n(A)^2, i.e. the variance of
/// P_{G_n}(A | X) under X ~ f_{G_n}. Clamped at 0.
double v_hat(const EstimatorState& state, const ThetaSet& a);

/// C_n(A_1..A_k): covariances of P_{G_n}(A_i | X); diagonal equals v_hat.
Eigen::MatrixXd cov_hat(const EstimatorState& state, std::span<const ThetaSet> sets);

/// r_n = (2 beta - 1) n^(2 beta - 1), beta the tail exponent of the schedule.
/// Throws UnsupportedScheduleError for explicit schedules or beta <= 1/2.
double rate(const WeightSchedule& schedule, std::size_t n);

struct CredibleInterval {
    double center;
    double lo;
    double hi;
    /// max(V_{A,n}, eps) / r_n
    double variance;
    double v_hat;
};

/// G_n(A) +- z_{1-gamma/2} sqrt(max(V_{A,n}, eps) / r_n), clipped to [0,1].
CredibleInterval credible_interval(const EstimatorState& state, const ThetaSet& a, double level = 0.95,
                                   double epsilon = kDefaultEpsilon);
std::vector<CredibleInterval> credible_intervals(const EstimatorState& state, std::span<const ThetaSet> sets,
                                                 double level = 0.95, double epsilon = kDefaultEpsilon);

/// { s : (s - c)^T S (s - c) <= radius2 } with S = (C_n + eps I)^-1 and
/// radius2 = chi2_{1-gamma, k} / r_n.
struct CredibleRegion {
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;
    double radius2;

    double mahalanobis2(const Eigen::VectorXd& s) const;
    bool contains(const Eigen::VectorXd& s) const { return mahalanobis2(s) <= radius2; }
};

CredibleRegion credible_region(const EstimatorState& state, std::span<const ThetaSet> sets, double level = 0.95,
                               double epsilon = kDefaultEpsilon);

struct GaussianApprox {
    double mean;
    double variance;
};

/// Asymptotic normal approximation of G(A) | x_{1:n}.
GaussianApprox marginal_posterior_approx(const EstimatorState& state, const ThetaSet& a,
                                         double epsilon = kDefaultEpsilon);

struct PosteriorSummary {
    std::size_t n;
    std::vector<ThetaSet> sets;
    std::vector<double> point;
    Eigen::MatrixXd vhat;
    double rate;
    double level;
    double epsilon;
    std::vector<CredibleInterval> intervals;
    CredibleRegion region;
};

PosteriorSummary summarize(const EstimatorState& state, std::span<const ThetaSet> sets, double level = 0.95,
                           double epsilon = kDefaultEpsilon);

}  // namespace newton
