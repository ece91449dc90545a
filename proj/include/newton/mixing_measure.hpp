#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "newton/error.hpp"
#include "newton/kernel.hpp"

namespace newton {

/// A Borel set on Theta: an interval with open/closed ends, or a finite list
/// of points. Intervals may be unbounded.
class ThetaSet {
public:
    /// (lo, hi]
    static ThetaSet interval(double lo, double hi) { return ThetaSet(lo, hi, false, true); }
    static ThetaSet interval(double lo, double hi, bool lo_closed, bool hi_closed) {
        return ThetaSet(lo, hi, lo_closed, hi_closed);
    }
    /// (-inf, t]
    static ThetaSet at_most(double t) { return ThetaSet(-HUGE_VAL, t, false, true); }
    /// (t, inf)
    static ThetaSet above(double t) { return ThetaSet(t, HUGE_VAL, false, false); }
    static ThetaSet points(std::vector<double> pts);
    static ThetaSet point(double p) { return points({p}); }

    /// Parses "(-inf,0]", "[a,b)", "{0,1}".
    static ThetaSet parse(std::string_view text);
    std::string to_string() const;

    bool is_interval() const noexcept { return points_.empty(); }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    bool lo_closed() const noexcept { return lo_closed_; }
    bool hi_closed() const noexcept { return hi_closed_; }
    const std::vector<double>& point_list() const noexcept { return points_; }

    bool contains(double theta) const noexcept;

private:
    ThetaSet(double lo, double hi, bool lo_closed, bool hi_closed);
    ThetaSet() = default;

    double lo_ = 0.0;
    double hi_ = 0.0;
    bool lo_closed_ = false;
    bool hi_closed_ = false;
    std::vector<double> points_;
};

/// Uniform grid on [lower, upper] with trapezoid quadrature weights. Shared
/// between every density defined on it.
struct GridLayout {
    double lower;
    double upper;
    double step;
    std::vector<double> nodes;
    std::vector<double> weights;

    GridLayout(double lower, double upper, std::size_t m);
    std::size_t size() const noexcept { return nodes.size(); }
    bool same_as(const GridLayout& other) const noexcept;
};

/// Density on a uniform Theta-grid. The trapezoid integral is 1 (renormalized
/// on construction). Between nodes the distribution function is the linear
/// interpolation of the trapezoid cumulative sum.
class GridDensity {
public:
    GridDensity(std::shared_ptr<const GridLayout> layout, std::vector<double> values);
    GridDensity(double lower, double upper, std::vector<double> values);

    template <class F>
    static GridDensity from_function(double lower, double upper, std::size_t m, F&& density) {
        auto layout = std::make_shared<const GridLayout>(lower, upper, m);
        std::vector<double> values(m);
        for (std::size_t i = 0; i < m; ++i) values[i] = density(layout->nodes[i]);
        return GridDensity(std::move(layout), std::move(values));
    }

    const std::shared_ptr<const GridLayout>& layout() const noexcept { return layout_; }
    std::size_t size() const noexcept { return values_.size(); }
    double lower() const noexcept { return layout_->lower; }
    double upper() const noexcept { return layout_->upper; }
    double step() const noexcept { return layout_->step; }
    std::span<const double> nodes() const noexcept { return layout_->nodes; }
    std::span<const double> weights() const noexcept { return layout_->weights; }
    std::span<const double> values() const noexcept { return values_; }
    /// cumulative()[i] = trapezoid mass of [lower, node i]
    std::span<const double> cumulative() const noexcept { return cumulative_; }

    double cdf(double t) const noexcept;
    /// Inverse of cdf on (0,1); linear within a cell.
    double quantile(double u) const noexcept;
    /// Density at t by linear interpolation (0 outside the window).
    double density_at(double t) const noexcept;

    /// Fraction-of-cell coverage coefficients c with sum_j c_j g_j = mass(A).
    std::vector<double> set_coefficients(const ThetaSet& a) const;

    static std::vector<double> normalized(std::span<const double> weights, std::vector<double> values);

private:
    void assign(std::vector<double> values);

    std::shared_ptr<const GridLayout> layout_;
    std::vector<double> values_;
    std::vector<double> cumulative_;
};

/// Finite list of distinct atoms with probability weights.
class DiscreteMixing {
public:
    DiscreteMixing(std::vector<double> atoms, std::vector<double> weights);
    static DiscreteMixing point_mass(double at) { return DiscreteMixing({at}, {1.0}); }

    std::size_t size() const noexcept { return atoms_.size(); }
    std::span<const double> atoms() const noexcept { return atoms_; }
    std::span<const double> weights() const noexcept { return weights_; }
    bool same_layout(const DiscreteMixing& other) const noexcept { return atoms_ == other.atoms_; }

private:
    std::vector<double> atoms_;
    std::vector<double> weights_;
};

using MixingMeasure = std::variant<GridDensity, DiscreteMixing>;

struct SetMass {
    double value;
    /// The query reached outside the grid window and was clipped to it.
    bool clipped;
};

SetMass measure_of(const MixingMeasure& mix, const ThetaSet& a);
double cdf(const MixingMeasure& mix, double t);
double mean(const MixingMeasure& mix);
double l1_distance(const MixingMeasure& a, const MixingMeasure& b);
/// Draws theta by inverse-CDF (grid) or categorical draw (atoms).
double sample(const MixingMeasure& mix, Rng& rng);

/// Support points (grid nodes or atoms) with their quadrature weights and the
/// corresponding values (density or atom weight): integral = sum w_j v_j h_j.
std::span<const double> support(const MixingMeasure& mix) noexcept;
std::span<const double> values(const MixingMeasure& mix) noexcept;
std::vector<double> quadrature_weights(const MixingMeasure& mix);
/// Per-support-point coefficients c with sum_j c_j v_j = measure_of(A).
std::vector<double> set_coefficients(const MixingMeasure& mix, const ThetaSet& a);
/// A measure on the same layout with replaced values (renormalized).
MixingMeasure with_values(const MixingMeasure& like, std::vector<double> values);

void check_same_layout(const MixingMeasure& a, const MixingMeasure& b);

/// Indicator of a set, for use with integrate().
struct SetIndicator {
    ThetaSet set;
    double operator()(double theta) const noexcept { return set.contains(theta) ? 1.0 : 0.0; }
};
inline SetIndicator indicator(ThetaSet a) { return SetIndicator{std::move(a)}; }

/// Trapezoid quadrature (grid) or weighted sum (atoms) of h.
double integrate(const MixingMeasure& mix, const std::function<double(double)>& h);
/// Integrating an indicator is the measure of its set.
inline double integrate(const MixingMeasure& mix, const SetIndicator& h) { return measure_of(mix, h.set).value; }

// Factories used by the CLI and the experiments.
GridDensity normal_grid(double mean, double variance, std::size_t m = 1001, double half_width_sd = 6.0);
GridDensity normal_grid_on(double mean, double variance, double lower, double upper, std::size_t m);
struct NormalComponent {
    double weight;
    double mean;
    double variance;
};
GridDensity normal_mixture_grid(std::span<const NormalComponent> components, double lower, double upper,
                                std::size_t m);

/// Parses `normal:mean=1,var=3[,m=1001][,lo=..,hi=..]`, `uniform:lo=0,hi=1[,m=..]`,
/// `normalmix:w=0.3|0.7,mean=-1|3,var=2|1.5[,lo,hi,m]`,
/// `atoms:at=0|1[,w=0.5|0.5]`, `point:at=c`, or a CSV path.
MixingMeasure parse_measure(std::string_view spec, std::size_t default_m = 1001);

}  // namespace newton
