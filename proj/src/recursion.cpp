#include "newton/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "newton/error.hpp"

namespace newton {
namespace {

SupportView view_of(const MixingMeasure& mix, const std::vector<double>& weights) {
    return {support(mix), weights, values(mix)};
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Posterior values on the layout of `prior`; throws on vanishing evidence.
std::vector<double> posterior_values(const Kernel& kernel, const MixingMeasure& prior, double x, Backend backend,
                                     double* log_evidence = nullptr) {
    const auto w = quadrature_weights(prior);
    std::vector<double> post(w.size());
    const auto ev = bayes_posterior(backend, kernel, x, view_of(prior, w), post);
    if (ev.degenerate) {
        throw DegenerateEvidenceError(x, 0, "degenerate evidence: predictive density of x = " + fmt(x) +
                                                " underflows to zero");
    }
    if (log_evidence) *log_evidence = ev.log_evidence;
    return post;
}

}  // namespace

EstimatorState EstimatorState::initial(Kernel kernel, WeightSchedule schedule, MixingMeasure g0, Backend backend) {
    for (double t : support(g0)) kernel.validate_parameter(t);
    return EstimatorState{std::move(kernel), std::move(schedule), 0, std::move(g0), backend};
}

MixingMeasure posterior_given_x(const Kernel& kernel, const MixingMeasure& prior, double x, Backend backend) {
    return with_values(prior, posterior_values(kernel, prior, x, backend));
}

MixingMeasure posterior_given_x(const EstimatorState& state, double x) {
    return posterior_given_x(state.kernel, state.current, x, state.backend);
}

EstimatorState update(const EstimatorState& state, double x) {
    auto post = posterior_values(state.kernel, state.current, x, state.backend);
    const double a = state.schedule.weight(state.n + 1);
    const auto prior = values(state.current);
    for (std::size_t j = 0; j < post.size(); ++j) post[j] = (1.0 - a) * prior[j] + a * post[j];
    return EstimatorState{state.kernel, state.schedule, state.n + 1, with_values(state.current, std::move(post)),
                          state.backend};
}

EstimatorState fit(EstimatorState state, std::span<const double> xs) {
    return fit(std::move(state), xs, FitOptions{}).state;
}

FitResult fit(EstimatorState state, std::span<const double> xs, const FitOptions& options) {
    FitResult result{std::move(state), {}};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        try {
            result.state = update(result.state, xs[i]);
        } catch (const DegenerateEvidenceError& e) {
            if (options.skip_degenerate) {
                result.skipped.push_back(i);
                continue;
            }
            throw DegenerateEvidenceError(e.observation(), i,
                                          std::string(e.what()) + " (observation index " + std::to_string(i) + ")");
        }
    }
    return result;
}

std::vector<double> gamma_weights(const WeightSchedule& schedule, double alpha, std::size_t n) {
    if (n == 0) throw ValidationError("gamma_weights needs n >= 1");
    if (!(alpha > 0.0)) throw ValidationError("gamma_weights needs alpha > 0");
    std::vector<double> gamma(n);
    double acc = alpha;
    for (std::size_t k = 1; k <= n; ++k) {
        const double a = schedule.weight(k);
        if (a >= 1.0) throw NumericalError("gamma_weights: weight " + std::to_string(k) + " equals 1");
        gamma[k - 1] = a * acc / (1.0 - a);
        acc += gamma[k - 1];
    }
    return gamma;
}

MixingMeasure fit_closed_form(const EstimatorState& initial, std::span<const double> xs, double alpha) {
    if (xs.empty()) return initial.current;
    const auto gamma = gamma_weights(initial.schedule, alpha, xs.size());
    const auto g0 = values(initial.current);
    std::vector<double> numerator(g0.begin(), g0.end());
    for (double& v : numerator) v *= alpha;
    double denominator = alpha;

    MixingMeasure current = initial.current;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const auto post = posterior_values(initial.kernel, current, xs[k], initial.backend);
        for (std::size_t j = 0; j < post.size(); ++j) numerator[j] += gamma[k] * post[j];
        denominator += gamma[k];
        std::vector<double> next(numerator.size());
        for (std::size_t j = 0; j < next.size(); ++j) next[j] = numerator[j] / denominator;
        current = with_values(current, std::move(next));
    }
    return current;
}

double log_predictive_density(const EstimatorState& state, double x) {
    const auto w = quadrature_weights(state.current);
    std::vector<double> scratch(w.size());
    const auto ev = bayes_posterior(state.backend, state.kernel, x, view_of(state.current, w), scratch);
    return ev.log_evidence;
}

double predictive_density(const EstimatorState& state, double x) {
    return std::exp(log_predictive_density(state, x));
}

double predictive_cdf(const EstimatorState& state, double x) {
    const auto w = quadrature_weights(state.current);
    const auto t = support(state.current);
    const auto v = values(state.current);
    double total = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (v[j] > 0.0) total += w[j] * v[j] * state.kernel.cdf(x, t[j]);
    }
    return std::clamp(total, 0.0, 1.0);
}

std::vector<double> classify(const EstimatorState& state, double x) {
    if (!std::holds_alternative<DiscreteMixing>(state.current)) {
        throw ValidationError("classify needs a discrete mixing measure");
    }
    return posterior_values(state.kernel, state.current, x, state.backend);
}

std::size_t classify_label(const EstimatorState& state, double x) {
    const auto p = classify(state, x);
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

bool limit_absolutely_continuous(const EstimatorState& state) {
    return state.schedule.summable_squares() && state.kernel.eligibility().square_ratio_condition &&
           std::holds_alternative<GridDensity>(state.current);
}

}  // namespace newton
