#pragma once

#include <random>
#include <span>
#include <string>
#include <string_view>

namespace newton {

using Rng = std::mt19937_64;

enum class KernelFamily {
    gaussian_location,  ///< N(theta, sigma2), sigma2 fixed
    poisson,            ///< Poisson(theta), theta > 0
    gamma_fixed_shape,  ///< Gamma(shape k fixed, rate theta), theta > 0
    flat,               ///< test-only: N(0,1) regardless of theta
    point_mass,         ///< test-only: x = theta exactly (Gaussian with sigma2 = 0)
};

/// Observation space and its reference measure.
enum class ObservationSpace {
    real_line,          ///< Lebesgue on R
    positive_real,      ///< Lebesgue on (0, inf)
    nonnegative_integer ///< counting measure on N
};

struct Eligibility {
    /// sup over compact K of  int f(x|t1)^2 / f(x|t2) dmu(x) < inf.
    bool square_ratio_condition = false;
};

/// Mixture component density f(x | theta). Immutable; safe to share across
/// threads. Sampling needs a generator owned by the caller.
class Kernel {
public:
    static Kernel gaussian(double sigma2);
    static Kernel poisson();
    static Kernel gamma(double shape);

    // Diagnostic kernels for tests and demos. `flat` carries no information
    // about theta; `point_mass` is the sigma2 -> 0 limit of the Gaussian.
    static Kernel testing_flat();
    static Kernel testing_point_mass();

    /// Parses `gaussian:sigma2=1.0`, `poisson` or `gamma:shape=2.0`.
    static Kernel parse(std::string_view spec);
    std::string to_spec() const;

    KernelFamily family() const noexcept { return family_; }
    ObservationSpace space() const noexcept;
    /// sigma2 for Gaussian, shape for Gamma, 0 otherwise.
    double parameter() const noexcept { return param_; }

    double density(double x, double theta) const;
    double log_density(double x, double theta) const;

    /// out[i] = log f(x | thetas[i]). Validates x; thetas are assumed to have
    /// passed validate_parameter.
    void log_density(double x, std::span<const double> thetas, std::span<double> out) const;

    /// P(X <= x | theta).
    double cdf(double x, double theta) const;

    double sample(double theta, Rng& rng) const;

    Eligibility eligibility() const noexcept;

    void validate_observation(double x) const;
    void validate_parameter(double theta) const;
    bool parameter_in_domain(double theta) const noexcept;

    /// Characteristic spread of f(.|theta) in x, used to size x-quadratures.
    double scale(double theta) const noexcept;

    friend bool operator==(const Kernel&, const Kernel&) = default;

private:
    Kernel(KernelFamily family, double param);

    KernelFamily family_;
    double param_;
    double log_norm_;  // family-dependent constant term of log f
};

}  // namespace newton
