#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace newton {

/// The gain sequence alpha_n (n >= 1) of the recursion.
///
///   polynomial   alpha_n = (alpha + n)^-beta
///   piecewise    alpha_n = (alpha + n)^-beta1 for n <= n0, (alpha + n)^-beta2 after
///   explicit     user-supplied alpha_1, alpha_2, ... in (0,1)
///
/// Polynomial and piecewise schedules with tail exponent in (1/2, 1] satisfy
/// sum alpha_n = inf and sum alpha_n^2 < inf; explicit lists carry no such
/// guarantee.
class WeightSchedule {
public:
    enum class Kind { polynomial, piecewise, explicit_list };

    static WeightSchedule polynomial(double alpha, double beta);
    static WeightSchedule piecewise(double alpha, std::size_t switch_step, double beta1, double beta2);
    static WeightSchedule explicit_weights(std::vector<double> weights);

    /// `poly:alpha=1,beta=1`, `piecewise:alpha=100,n0=500,beta1=1,beta2=0.75`,
    /// `explicit:w=0.5|0.25|0.1`.
    static WeightSchedule parse(std::string_view spec);
    std::string to_spec() const;

    Kind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    /// Exponent governing the tail (beta, or beta2 for piecewise).
    double tail_exponent() const noexcept { return kind_ == Kind::piecewise ? beta2_ : beta1_; }
    double head_exponent() const noexcept { return beta1_; }
    std::size_t switch_step() const noexcept { return switch_step_; }

    /// alpha_n for n >= 1 (1-indexed: the n-th observation uses weight(n)).
    double weight(std::size_t n) const;
    /// Number of weights available; SIZE_MAX for closed-form schedules.
    std::size_t length() const noexcept;

    bool summable_squares() const noexcept;

    friend bool operator==(const WeightSchedule&, const WeightSchedule&) = default;

private:
    WeightSchedule() = default;

    Kind kind_ = Kind::polynomial;
    double alpha_ = 1.0;
    double beta1_ = 1.0;
    double beta2_ = 1.0;
    std::size_t switch_step_ = 0;
    std::vector<double> explicit_;
};

}  // namespace newton
