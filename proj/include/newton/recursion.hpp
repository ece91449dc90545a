#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "newton/grid_kernels.hpp"
#include "newton/kernel.hpp"
#include "newton/mixing_measure.hpp"
#include "newton/schedule.hpp"

namespace newton {

/// Everything the recursion carries between observations. `n` counts the
/// observations consumed so far; the next update uses weight(n + 1).
struct EstimatorState {
    Kernel kernel;
    WeightSchedule schedule;
    std::size_t n = 0;
    MixingMeasure current;
    Backend backend = Backend::serial;

    /// Validates that every support point of g0 lies in the kernel's
    /// parameter domain.
    static EstimatorState initial(Kernel kernel, WeightSchedule schedule, MixingMeasure g0,
                                  Backend backend = Backend::serial);
};

/// One-observation Bayes update of the current mixing measure:
/// P(A | x) = int_A f(x|t) dG(t) / int f(x|t) dG(t).
/// Throws DegenerateEvidenceError when the evidence underflows to zero.
MixingMeasure posterior_given_x(const EstimatorState& state, double x);
MixingMeasure posterior_given_x(const Kernel& kernel, const MixingMeasure& prior, double x,
                                Backend backend = Backend::serial);

/// G_{n+1} = (1 - a) G_n + a P_{G_n}(. | x), a = weight(n + 1).
EstimatorState update(const EstimatorState& state, double x);

/// Left fold of update over xs. A degenerate observation aborts the fold and
/// the error reports its index in xs.
EstimatorState fit(EstimatorState state, std::span<const double> xs);

struct FitOptions {
    /// Drop observations with vanishing evidence instead of failing; they are
    /// listed in FitResult::skipped and do not advance n.
    bool skip_degenerate = false;
};

struct FitResult {
    EstimatorState state;
    std::vector<std::size_t> skipped;
};

FitResult fit(EstimatorState state, std::span<const double> xs, const FitOptions& options);

/// gamma_1..gamma_n with gamma_1 = a_1 alpha / (1 - a_1) and
/// gamma_k = a_k (alpha + sum_{l<k} gamma_l) / (1 - a_k).
std::vector<double> gamma_weights(const WeightSchedule& schedule, double alpha, std::size_t n);

/// G_n rebuilt as (alpha G_0 + sum gamma_k P_k) / (alpha + sum gamma_k),
/// accumulating the posteriors instead of mixing step by step.
MixingMeasure fit_closed_form(const EstimatorState& initial, std::span<const double> xs, double alpha);

/// f_{G_n}(x) = int f(x|t) dG_n(t).
double predictive_density(const EstimatorState& state, double x);
double log_predictive_density(const EstimatorState& state, double x);
/// F_{G_n}(x) = int F(x|t) dG_n(t).
double predictive_cdf(const EstimatorState& state, double x);

/// Component responsibilities pi_j f(x|t_j) / sum_l pi_l f(x|t_l) for a
/// discrete mixing measure.
std::vector<double> classify(const EstimatorState& state, double x);
std::size_t classify_label(const EstimatorState& state, double x);

/// True when the schedule has square-summable weights, the kernel meets the
/// square-ratio condition and the estimate has a density, in which case the
/// limit of G_n is a.s. absolutely continuous.
bool limit_absolutely_continuous(const EstimatorState& state);

}  // namespace newton
