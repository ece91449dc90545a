#include "newton/schedule.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "newton/error.hpp"
#include "newton/spec_string.hpp"

namespace newton {
namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double power_weight(double alpha, std::size_t n, double beta) {
    const double base = alpha + static_cast<double>(n);
    return beta == 1.0 ? 1.0 / base : std::pow(base, -beta);
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("schedule needs alpha > 0, got " + fmt(alpha));
}

void check_exponent(double beta, const char* name) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw ValidationError(std::string("schedule exponent ") + name + " must lie in (0, 1], got " + fmt(beta));
    }
}

}  // namespace

WeightSchedule WeightSchedule::polynomial(double alpha, double beta) {
    check_alpha(alpha);
    check_exponent(beta, "beta");
    WeightSchedule s;
    s.kind_ = Kind::polynomial;
    s.alpha_ = alpha;
    s.beta1_ = s.beta2_ = beta;
    return s;
}

WeightSchedule WeightSchedule::piecewise(double alpha, std::size_t switch_step, double beta1, double beta2) {
    check_alpha(alpha);
    check_exponent(beta1, "beta1");
    check_exponent(beta2, "beta2");
    WeightSchedule s;
    s.kind_ = Kind::piecewise;
    s.alpha_ = alpha;
    s.beta1_ = beta1;
    s.beta2_ = beta2;
    s.switch_step_ = switch_step;
    return s;
}

WeightSchedule WeightSchedule::explicit_weights(std::vector<double> weights) {
    if (weights.empty()) throw ValidationError("explicit schedule needs at least one weight");
    for (double w : weights) {
        if (!(w > 0.0 && w < 1.0)) throw ValidationError("explicit weights must lie in (0,1), got " + fmt(w));
    }
    WeightSchedule s;
    s.kind_ = Kind::explicit_list;
    s.explicit_ = std::move(weights);
    return s;
}

WeightSchedule WeightSchedule::parse(std::string_view spec) {
    const auto s = SpecString::parse(spec);
    if (s.family == "poly" || s.family == "polynomial") {
        s.expect_only({"alpha", "beta"});
        return polynomial(s.number("alpha"), s.number_or("beta", 1.0));
    }
    if (s.family == "piecewise") {
        s.expect_only({"alpha", "n0", "beta1", "beta2"});
        const auto n0 = parse_integer(s.text("n0"), "piecewise.n0");
        if (n0 < 0) throw ValidationError("piecewise: n0 must be >= 0");
        return piecewise(s.number("alpha"), static_cast<std::size_t>(n0), s.number("beta1"), s.number("beta2"));
    }
    if (s.family == "explicit") {
        s.expect_only({"w"});
        std::vector<double> w;
        std::string_view rest = s.text("w");
        while (!rest.empty()) {
            const auto bar = rest.find('|');
            w.push_back(parse_double(rest.substr(0, bar), "explicit.w"));
            if (bar == std::string_view::npos) break;
            rest = rest.substr(bar + 1);
        }
        return explicit_weights(std::move(w));
    }
    throw ValidationError("unknown schedule '" + s.family + "' (expected poly, piecewise or explicit)");
}

std::string WeightSchedule::to_spec() const {
    switch (kind_) {
        case Kind::polynomial:
            return "poly:alpha=" + fmt(alpha_) + ",beta=" + fmt(beta1_);
        case Kind::piecewise:
            return "piecewise:alpha=" + fmt(alpha_) + ",n0=" + std::to_string(switch_step_) + ",beta1=" + fmt(beta1_) +
                   ",beta2=" + fmt(beta2_);
        case Kind::explicit_list: {
            std::string out = "explicit:w=";
            for (std::size_t i = 0; i < explicit_.size(); ++i) out += (i ? "|" : "") + fmt(explicit_[i]);
            return out;
        }
    }
    return {};
}

double WeightSchedule::weight(std::size_t n) const {
    if (n == 0) throw ValidationError("schedule weights are indexed from 1");
    switch (kind_) {
        case Kind::polynomial:
            return power_weight(alpha_, n, beta1_);
        case Kind::piecewise:
            return power_weight(alpha_, n, n <= switch_step_ ? beta1_ : beta2_);
        case Kind::explicit_list:
            if (n > explicit_.size()) {
                throw ValidationError("explicit schedule has only " + std::to_string(explicit_.size()) +
                                      " weights; step " + std::to_string(n) + " requested");
            }
            return explicit_[n - 1];
    }
    return 0.0;
}

std::size_t WeightSchedule::length() const noexcept {
    return kind_ == Kind::explicit_list ? explicit_.size() : std::numeric_limits<std::size_t>::max();
}

bool WeightSchedule::summable_squares() const noexcept {
    return kind_ != Kind::explicit_list && tail_exponent() > 0.5;
}

}  // namespace newton
