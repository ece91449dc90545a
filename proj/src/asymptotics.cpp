#include "newton/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "newton/error.hpp"
#include "newton/stats.hpp"

namespace newton {
namespace {

constexpr std::size_t kMaxNodes = 20000;
constexpr double kThetaTail = 1e-12;

struct ThetaRange {
    double lo;
    double hi;
};

// Range of theta carrying all but a negligible part of the mass.
ThetaRange effective_range(const MixingMeasure& mix) {
    if (const auto* g = std::get_if<GridDensity>(&mix)) {
        return {g->quantile(kThetaTail), g->quantile(1.0 - kThetaTail)};
    }
    const auto& d = std::get<DiscreteMixing>(mix);
    double lo = HUGE_VAL;
    double hi = -HUGE_VAL;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (d.weights()[j] > 0.0) {
            lo = std::min(lo, d.atoms()[j]);
            hi = std::max(hi, d.atoms()[j]);
        }
    }
    return {lo, hi};
}

// Trapezoid rule on [lo, hi] with spacing close to `step`.
ObservationQuadrature trapezoid(double lo, double hi, double step) {
    std::size_t cells = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    cells = std::clamp<std::size_t>(cells, 64, kMaxNodes);
    const double h = (hi - lo) / static_cast<double>(cells);
    ObservationQuadrature q;
    q.nodes.resize(cells + 1);
    q.weights.assign(cells + 1, h);
    for (std::size_t i = 0; i <= cells; ++i) q.nodes[i] = lo + h * static_cast<double>(i);
    q.weights.front() = q.weights.back() = 0.5 * h;
    return q;
}

ObservationQuadrature gamma_quadrature(double shape, ThetaRange r) {
    // integrate over s = log x; dx = x ds
    const double s_lo = std::log(boost::math::gamma_p_inv(shape, kThetaTail)) - std::log(r.hi);
    const double s_hi = std::log(boost::math::gamma_q_inv(shape, kThetaTail)) - std::log(r.lo);
    const double spread = std::sqrt(boost::math::trigamma(shape));
    auto q = trapezoid(s_lo, s_hi, spread / 16.0);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        q.nodes[i] = std::exp(q.nodes[i]);
        q.weights[i] *= q.nodes[i];
    }
    return q;
}

ObservationQuadrature poisson_quadrature(ThetaRange r) {
    const double top = std::ceil(r.hi + 12.0 * std::sqrt(std::max(r.hi, 1.0)) + 30.0);
    ObservationQuadrature q;
    for (double x = 0.0; x <= top; x += 1.0) {
        q.nodes.push_back(x);
        q.weights.push_back(1.0);
    }
    return q;
}

std::vector<double> flat_coefficients(const MixingMeasure& mix, std::span<const ThetaSet> sets) {
    const std::size_t m = support(mix).size();
    std::vector<double> c(sets.size() * m);
    for (std::size_t a = 0; a < sets.size(); ++a) {
        const auto row = set_coefficients(mix, sets[a]);
        std::copy(row.begin(), row.end(), c.begin() + static_cast<std::ptrdiff_t>(a * m));
    }
    return c;
}

// x = theta exactly: the posterior of A given x = theta_j is the share of the
// cell around theta_j that lies in A.
// G_n(A) in {0, 1} makes P(A|x) constant, so its row vanishes exactly.
void zero_certain_sets(SetMoments& out, const MixingMeasure& mix, std::span<const ThetaSet> sets) {
    for (std::size_t a = 0; a < sets.size(); ++a) {
        const double g = measure_of(mix, sets[a]).value;
        if (g <= 0.0 || g >= 1.0) {
            out.covariance.row(static_cast<Eigen::Index>(a)).setZero();
            out.covariance.col(static_cast<Eigen::Index>(a)).setZero();
        }
    }
}

SetMoments point_mass_moments(const MixingMeasure& mix, std::span<const ThetaSet> sets) {
    const auto w = quadrature_weights(mix);
    const auto v = values(mix);
    const std::size_t m = w.size();
    const std::size_t k = sets.size();
    const auto c = flat_coefficients(mix, sets);
    std::vector<double> q(m);
    for (std::size_t j = 0; j < m; ++j) q[j] = w[j] * v[j];
    const double total = stats::compensated_sum(q);
    for (double& x : q) x /= total;

    SetMoments out{std::vector<double>(k, 0.0), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                                      static_cast<Eigen::Index>(k)),
                   1.0};
    auto prob = [&](std::size_t a, std::size_t j) { return w[j] > 0.0 ? c[a * m + j] / w[j] : 0.0; };
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t j = 0; j < m; ++j) out.mean[a] += q[j] * prob(a, j);
    }
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t a = 0; a < k; ++a) {
            const double da = prob(a, j) - out.mean[a];
            for (std::size_t b = 0; b <= a; ++b) {
                out.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                    q[j] * da * (prob(b, j) - out.mean[b]);
            }
        }
    }
    out.covariance = out.covariance.selfadjointView<Eigen::Lower>();
    zero_certain_sets(out, mix, sets);
    return out;
}

}  // namespace

ObservationQuadrature observation_quadrature(const EstimatorState& state) {
    const auto r = effective_range(state.current);
    const Kernel& k = state.kernel;
    switch (k.family()) {
        case KernelFamily::gaussian_location: {
            const double sd = std::sqrt(k.parameter());
            return trapezoid(r.lo - 9.0 * sd, r.hi + 9.0 * sd, sd / 16.0);
        }
        case KernelFamily::flat:
            return trapezoid(-9.0, 9.0, 1.0 / 16.0);
        case KernelFamily::poisson:
            return poisson_quadrature(r);
        case KernelFamily::gamma_fixed_shape:
            return gamma_quadrature(k.parameter(), r);
        case KernelFamily::point_mass: {
            const auto t = support(state.current);
            return {std::vector<double>(t.begin(), t.end()), quadrature_weights(state.current)};
        }
    }
    throw ValidationError("observation_quadrature: unknown kernel family");
}

SetMoments set_moments(const EstimatorState& state, std::span<const ThetaSet> sets) {
    if (sets.empty()) throw ValidationError("at least one query set is required");
    if (state.kernel.family() == KernelFamily::point_mass) return point_mass_moments(state.current, sets);

    const std::size_t k = sets.size();
    const auto quad = observation_quadrature(state);
    const std::size_t nx = quad.nodes.size();
    const auto w = quadrature_weights(state.current);
    const SupportView view{support(state.current), w, values(state.current)};
    const auto coeffs = flat_coefficients(state.current, sets);

    std::vector<double> logf(nx);
    std::vector<double> probs(nx * k);
    set_probabilities(state.backend, state.kernel, quad.nodes, view, coeffs, k, logf, probs);

    const double top = *std::max_element(logf.begin(), logf.end());
    if (!std::isfinite(top)) throw NumericalError("predictive density vanishes on the observation quadrature");
    std::vector<double> q(nx);
    for (std::size_t i = 0; i < nx; ++i) q[i] = quad.weights[i] * std::exp(logf[i] - top);
    const double total = stats::compensated_sum(q);
    for (double& x : q) x /= total;

    SetMoments out{std::vector<double>(k, 0.0),
                   Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)),
                   total * std::exp(top)};
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t a = 0; a < k; ++a) out.mean[a] += q[i] * probs[i * k + a];
    }
    // centered about the quadrature mean, so the matrix is PSD by construction
    for (std::size_t i = 0; i < nx; ++i) {
        if (q[i] == 0.0) continue;
        const double* p = probs.data() + i * k;
        for (std::size_t a = 0; a < k; ++a) {
            const double da = p[a] - out.mean[a];
            for (std::size_t b = 0; b <= a; ++b) {
                out.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                    q[i] * da * (p[b] - out.mean[b]);
            }
        }
    }
    out.covariance = out.covariance.selfadjointView<Eigen::Lower>();
    zero_certain_sets(out, state.current, sets);
    return out;
}

double v_hat(const EstimatorState& state, const ThetaSet& a) {
    const auto m = set_moments(state, std::span<const ThetaSet>(&a, 1));
    return std::max(0.0, m.covariance(0, 0));
}

Eigen::MatrixXd cov_hat(const EstimatorState& state, std::span<const ThetaSet> sets) {
    return set_moments(state, sets).covariance;
}

double rate(const WeightSchedule& schedule, std::size_t n) {
    if (schedule.kind() == WeightSchedule::Kind::explicit_list) {
        throw UnsupportedScheduleError("asymptotic rate is undefined for explicit weight schedules");
    }
    const double beta = schedule.tail_exponent();
    if (!(beta > 0.5)) {
        throw UnsupportedScheduleError("asymptotic rate needs a tail exponent in (1/2, 1]");
    }
    if (n == 0) throw UnsupportedScheduleError("asymptotic rate needs n >= 1");
    const double e = 2.0 * beta - 1.0;
    return e * std::pow(static_cast<double>(n), e);
}

namespace {

double check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("credible level must lie in (0, 1)");
    return level;
}

double check_epsilon(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("epsilon must be positive");
    return eps;
}

CredibleInterval interval_from(double center, double v, double r, double z, double eps) {
    const double variance = std::max(v, eps) / r;
    const double half = z * std::sqrt(variance);
    return {center, std::clamp(center - half, 0.0, 1.0), std::clamp(center + half, 0.0, 1.0), variance, v};
}

}  // namespace

std::vector<CredibleInterval> credible_intervals(const EstimatorState& state, std::span<const ThetaSet> sets,
                                                 double level, double epsilon) {
    check_level(level);
    check_epsilon(epsilon);
    const double r = rate(state.schedule, state.n);
    const double z = stats::normal_quantile(0.5 + 0.5 * level);
    const auto m = set_moments(state, sets);
    std::vector<CredibleInterval> out;
    out.reserve(sets.size());
    for (std::size_t a = 0; a < sets.size(); ++a) {
        const double center = measure_of(state.current, sets[a]).value;
        const double v = std::max(0.0, m.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)));
        out.push_back(interval_from(center, v, r, z, epsilon));
    }
    return out;
}

CredibleInterval credible_interval(const EstimatorState& state, const ThetaSet& a, double level, double epsilon) {
    return credible_intervals(state, std::span<const ThetaSet>(&a, 1), level, epsilon).front();
}

double CredibleRegion::mahalanobis2(const Eigen::VectorXd& s) const {
    if (s.size() != center.size()) throw ValidationError("credible region: dimension mismatch");
    const Eigen::VectorXd d = s - center;
    return d.dot(shape * d);
}

namespace {

CredibleRegion region_from(const EstimatorState& state, std::span<const ThetaSet> sets, const Eigen::MatrixXd& cov,
                           double level, double epsilon) {
    const double r = rate(state.schedule, state.n);
    const auto k = static_cast<Eigen::Index>(sets.size());
    Eigen::VectorXd center(k);
    for (Eigen::Index a = 0; a < k; ++a) center(a) = measure_of(state.current, sets[static_cast<std::size_t>(a)]).value;
    const Eigen::MatrixXd reg = cov + epsilon * Eigen::MatrixXd::Identity(k, k);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
    if (ldlt.info() != Eigen::Success) throw NumericalError("credible region: covariance factorization failed");
    const Eigen::MatrixXd shape = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    const double radius2 = stats::chi_squared_quantile(level, static_cast<double>(k)) / r;
    return {center, shape, radius2};
}

}  // namespace

CredibleRegion credible_region(const EstimatorState& state, std::span<const ThetaSet> sets, double level,
                               double epsilon) {
    check_level(level);
    check_epsilon(epsilon);
    rate(state.schedule, state.n);
    return region_from(state, sets, cov_hat(state, sets), level, epsilon);
}

GaussianApprox marginal_posterior_approx(const EstimatorState& state, const ThetaSet& a, double epsilon) {
    check_epsilon(epsilon);
    const double r = rate(state.schedule, state.n);
    const double v = v_hat(state, a);
    return {measure_of(state.current, a).value, std::max(v, epsilon) / r};
}

PosteriorSummary summarize(const EstimatorState& state, std::span<const ThetaSet> sets, double level,
                           double epsilon) {
    check_level(level);
    check_epsilon(epsilon);
    const double r = rate(state.schedule, state.n);
    const double z = stats::normal_quantile(0.5 + 0.5 * level);
    const auto m = set_moments(state, sets);

    PosteriorSummary s{state.n, {sets.begin(), sets.end()}, {}, m.covariance, r, level, epsilon, {}, {}};
    for (std::size_t a = 0; a < sets.size(); ++a) {
        const double center = measure_of(state.current, sets[a]).value;
        const double v = std::max(0.0, m.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)));
        s.point.push_back(center);
        s.intervals.push_back(interval_from(center, v, r, z, epsilon));
    }
    s.region = region_from(state, sets, m.covariance, level, epsilon);
    return s;
}

}  // namespace newton
