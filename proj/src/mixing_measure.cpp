#include "newton/mixing_measure.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "newton/io.hpp"
#include "newton/spec_string.hpp"

namespace newton {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double renorm_tolerance(std::size_t m) {
    return std::max(1e-12, 8.0 * static_cast<double>(m) * std::numeric_limits<double>::epsilon());
}

std::vector<double> split_numbers(const std::string& text, std::string_view what) {
    std::vector<double> out;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto bar = rest.find('|');
        out.push_back(parse_double(rest.substr(0, bar), what));
        if (bar == std::string_view::npos) break;
        rest = rest.substr(bar + 1);
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------- ThetaSet

ThetaSet::ThetaSet(double lo, double hi, bool lo_closed, bool hi_closed)
    : lo_(lo), hi_(hi), lo_closed_(lo_closed && std::isfinite(lo)), hi_closed_(hi_closed && std::isfinite(hi)) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
        throw ValidationError("invalid interval: lower bound exceeds upper bound");
    }
}

ThetaSet ThetaSet::points(std::vector<double> pts) {
    if (pts.empty()) throw ValidationError("point set must not be empty");
    for (double p : pts) {
        if (!std::isfinite(p)) throw ValidationError("point set entries must be finite");
    }
    ThetaSet s;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    s.points_ = std::move(pts);
    return s;
}

bool ThetaSet::contains(double theta) const noexcept {
    if (!points_.empty()) return std::binary_search(points_.begin(), points_.end(), theta);
    const bool above_lo = lo_closed_ ? theta >= lo_ : theta > lo_;
    const bool below_hi = hi_closed_ ? theta <= hi_ : theta < hi_;
    return above_lo && below_hi;
}

ThetaSet ThetaSet::parse(std::string_view text) {
    auto s = text;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.size() < 2) throw ValidationError("cannot parse set '" + std::string(text) + "'");
    const char open = s.front();
    const char close = s.back();
    const auto body = s.substr(1, s.size() - 2);
    if (open == '{' && close == '}') {
        std::vector<double> pts;
        std::string_view rest = body;
        while (true) {
            const auto comma = rest.find(',');
            pts.push_back(parse_double(rest.substr(0, comma), "set point"));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return points(std::move(pts));
    }
    if ((open != '(' && open != '[') || (close != ')' && close != ']')) {
        throw ValidationError("cannot parse set '" + std::string(text) + "'");
    }
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw ValidationError("interval needs two endpoints: '" + std::string(text) + "'");
    const double lo = parse_double(body.substr(0, comma), "interval lower bound");
    const double hi = parse_double(body.substr(comma + 1), "interval upper bound");
    return interval(lo, hi, open == '[', close == ']');
}

std::string ThetaSet::to_string() const {
    if (!points_.empty()) {
        std::string out = "{";
        for (std::size_t i = 0; i < points_.size(); ++i) out += (i ? "," : "") + fmt(points_[i]);
        return out + "}";
    }
    auto bound = [](double v) {
        if (std::isinf(v)) return std::string(v < 0 ? "-inf" : "inf");
        return fmt(v);
    };
    return std::string(lo_closed_ ? "[" : "(") + bound(lo_) + "," + bound(hi_) + (hi_closed_ ? "]" : ")");
}

// -------------------------------------------------------------- GridLayout

GridLayout::GridLayout(double lower_, double upper_, std::size_t m) : lower(lower_), upper(upper_), step(0.0) {
    if (m < 2) throw ValidationError("grid needs at least 2 points");
    if (!std::isfinite(lower) || !std::isfinite(upper) || !(upper > lower)) {
        throw ValidationError("grid window must be finite with lower < upper");
    }
    step = (upper - lower) / static_cast<double>(m - 1);
    nodes.resize(m);
    weights.assign(m, step);
    for (std::size_t i = 0; i < m; ++i) nodes[i] = lower + static_cast<double>(i) * step;
    nodes.back() = upper;
    weights.front() = weights.back() = 0.5 * step;
}

bool GridLayout::same_as(const GridLayout& other) const noexcept {
    return this == &other || (lower == other.lower && upper == other.upper && size() == other.size());
}

// ------------------------------------------------------------- GridDensity

std::vector<double> GridDensity::normalized(std::span<const double> weights, std::vector<double> values) {
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
            throw NumericalError("grid density values must be finite and nonnegative");
        }
        total += weights[i] * values[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("grid density has zero or infinite mass");
    if (std::abs(total - 1.0) > renorm_tolerance(values.size())) {
        for (double& v : values) v /= total;
    }
    return values;
}

GridDensity::GridDensity(std::shared_ptr<const GridLayout> layout, std::vector<double> values)
    : layout_(std::move(layout)) {
    if (!layout_) throw StructuralError("grid density needs a layout");
    if (values.size() != layout_->size()) throw StructuralError("grid density size does not match its layout");
    assign(std::move(values));
}

GridDensity::GridDensity(double lower, double upper, std::vector<double> values)
    : layout_(std::make_shared<const GridLayout>(lower, upper, values.size())) {
    assign(std::move(values));
}

void GridDensity::assign(std::vector<double> values) {
    values_ = normalized(layout_->weights, std::move(values));
    const std::size_t m = values_.size();
    cumulative_.resize(m);
    cumulative_[0] = 0.0;
    const double half = 0.5 * layout_->step;
    for (std::size_t i = 1; i < m; ++i) cumulative_[i] = cumulative_[i - 1] + half * (values_[i - 1] + values_[i]);
}

double GridDensity::cdf(double t) const noexcept {
    const auto& L = *layout_;
    if (!(t > L.lower)) return 0.0;
    if (t >= L.upper) return cumulative_.back();
    const double pos = (t - L.lower) / L.step;
    auto i = static_cast<std::size_t>(pos);
    if (i >= size() - 1) i = size() - 2;
    const double frac = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
    return cumulative_[i] + frac * (cumulative_[i + 1] - cumulative_[i]);
}

double GridDensity::quantile(double u) const noexcept {
    const double target = std::clamp(u, 0.0, 1.0) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.begin()) return layout_->lower;
    if (it == cumulative_.end()) return layout_->upper;
    const auto i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    const double cell = cumulative_[i + 1] - cumulative_[i];
    const double frac = cell > 0.0 ? (target - cumulative_[i]) / cell : 0.0;
    return layout_->nodes[i] + frac * layout_->step;
}

double GridDensity::density_at(double t) const noexcept {
    const auto& L = *layout_;
    if (t < L.lower || t > L.upper) return 0.0;
    const double pos = (t - L.lower) / L.step;
    auto i = static_cast<std::size_t>(pos);
    if (i >= size() - 1) i = size() - 2;
    const double frac = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
    return values_[i] + frac * (values_[i + 1] - values_[i]);
}

std::vector<double> GridDensity::set_coefficients(const ThetaSet& a) const {
    const auto& L = *layout_;
    const std::size_t m = size();
    std::vector<double> c(m, 0.0);
    if (!a.is_interval()) return c;  // finite sets are Lebesgue-null
    const double lo = std::max(a.lo(), L.lower);
    const double hi = std::min(a.hi(), L.upper);
    if (!(hi > lo)) return c;
    const double half = 0.5 * L.step;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double left = L.nodes[i];
        const double right = L.nodes[i + 1];
        const double covered = std::min(hi, right) - std::max(lo, left);
        if (covered <= 0.0) continue;
        const double frac = std::min(1.0, covered / (right - left));
        c[i] += half * frac;
        c[i + 1] += half * frac;
    }
    return c;
}

// ---------------------------------------------------------- DiscreteMixing

DiscreteMixing::DiscreteMixing(std::vector<double> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty()) throw ValidationError("discrete mixing needs at least one atom");
    if (atoms_.size() != weights_.size()) throw StructuralError("atoms and weights differ in length");
    auto sorted = atoms_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError("discrete mixing atoms must be distinct");
    }
    for (double a : atoms_) {
        if (!std::isfinite(a)) throw ValidationError("discrete mixing atoms must be finite");
    }
    std::vector<double> ones(weights_.size(), 1.0);
    weights_ = GridDensity::normalized(ones, std::move(weights_));
}

// ------------------------------------------------------------ free functions

SetMass measure_of(const MixingMeasure& mix, const ThetaSet& a) {
    return std::visit(overloaded{
                          [&](const GridDensity& g) -> SetMass {
                              if (!a.is_interval()) return {0.0, false};
                              const bool clipped = a.lo() < g.lower() || a.hi() > g.upper();
                              const double v = g.cdf(a.hi()) - g.cdf(a.lo());
                              return {std::clamp(v, 0.0, 1.0), clipped};
                          },
                          [&](const DiscreteMixing& d) -> SetMass {
                              double v = 0.0;
                              for (std::size_t j = 0; j < d.size(); ++j) {
                                  if (a.contains(d.atoms()[j])) v += d.weights()[j];
                              }
                              return {std::min(v, 1.0), false};
                          }},
                      mix);
}

double cdf(const MixingMeasure& mix, double t) { return measure_of(mix, ThetaSet::at_most(t)).value; }

double integrate(const MixingMeasure& mix, const std::function<double(double)>& h) {
    const auto pts = support(mix);
    const auto vals = values(mix);
    const auto w = quadrature_weights(mix);
    double total = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const double hv = h(pts[j]);
        if (!std::isfinite(hv)) {
            throw NumericalError("integrand is not finite at theta = " + fmt(pts[j]));
        }
        total += w[j] * vals[j] * hv;
    }
    return total;
}

double mean(const MixingMeasure& mix) {
    return integrate(mix, [](double t) { return t; });
}

void check_same_layout(const MixingMeasure& a, const MixingMeasure& b) {
    if (a.index() != b.index()) throw StructuralError("measures have different representations");
    if (const auto* ga = std::get_if<GridDensity>(&a)) {
        if (!ga->layout()->same_as(*std::get<GridDensity>(b).layout())) {
            throw StructuralError("grid densities live on different grids");
        }
    } else if (!std::get<DiscreteMixing>(a).same_layout(std::get<DiscreteMixing>(b))) {
        throw StructuralError("discrete measures have different atoms");
    }
}

double l1_distance(const MixingMeasure& a, const MixingMeasure& b) {
    check_same_layout(a, b);
    const auto va = values(a);
    const auto vb = values(b);
    const auto w = quadrature_weights(a);
    double total = 0.0;
    for (std::size_t j = 0; j < va.size(); ++j) total += w[j] * std::abs(va[j] - vb[j]);
    return std::min(total, 2.0);
}

double sample(const MixingMeasure& mix, Rng& rng) {
    return std::visit(overloaded{[&](const GridDensity& g) {
                                     return g.quantile(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
                                 },
                                 [&](const DiscreteMixing& d) {
                                     const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                                     double acc = 0.0;
                                     for (std::size_t j = 0; j < d.size(); ++j) {
                                         acc += d.weights()[j];
                                         if (u < acc) return d.atoms()[j];
                                     }
                                     // u landed in the rounding gap at the top
                                     for (std::size_t j = d.size(); j-- > 0;) {
                                         if (d.weights()[j] > 0.0) return d.atoms()[j];
                                     }
                                     return d.atoms().back();
                                 }},
                      mix);
}

std::span<const double> support(const MixingMeasure& mix) noexcept {
    if (const auto* g = std::get_if<GridDensity>(&mix)) return g->nodes();
    return std::get<DiscreteMixing>(mix).atoms();
}

std::span<const double> values(const MixingMeasure& mix) noexcept {
    if (const auto* g = std::get_if<GridDensity>(&mix)) return g->values();
    return std::get<DiscreteMixing>(mix).weights();
}

std::vector<double> quadrature_weights(const MixingMeasure& mix) {
    if (const auto* g = std::get_if<GridDensity>(&mix)) return {g->weights().begin(), g->weights().end()};
    return std::vector<double>(std::get<DiscreteMixing>(mix).size(), 1.0);
}

std::vector<double> set_coefficients(const MixingMeasure& mix, const ThetaSet& a) {
    if (const auto* g = std::get_if<GridDensity>(&mix)) return g->set_coefficients(a);
    const auto& d = std::get<DiscreteMixing>(mix);
    std::vector<double> c(d.size(), 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) c[j] = a.contains(d.atoms()[j]) ? 1.0 : 0.0;
    return c;
}

MixingMeasure with_values(const MixingMeasure& like, std::vector<double> vals) {
    if (const auto* g = std::get_if<GridDensity>(&like)) return GridDensity(g->layout(), std::move(vals));
    const auto& d = std::get<DiscreteMixing>(like);
    return DiscreteMixing(std::vector<double>(d.atoms().begin(), d.atoms().end()), std::move(vals));
}

// ---------------------------------------------------------------- factories

GridDensity normal_grid_on(double mean, double variance, double lower, double upper, std::size_t m) {
    if (!(variance > 0.0)) throw ValidationError("normal prior needs var > 0");
    const double inv = 0.5 / variance;
    return GridDensity::from_function(lower, upper, m, [&](double t) {
        const double d = t - mean;
        return std::exp(-d * d * inv);
    });
}

GridDensity normal_grid(double mean, double variance, std::size_t m, double half_width_sd) {
    if (!(variance > 0.0)) throw ValidationError("normal prior needs var > 0");
    const double sd = std::sqrt(variance);
    return normal_grid_on(mean, variance, mean - half_width_sd * sd, mean + half_width_sd * sd, m);
}

GridDensity normal_mixture_grid(std::span<const NormalComponent> components, double lower, double upper,
                                std::size_t m) {
    if (components.empty()) throw ValidationError("normal mixture needs at least one component");
    for (const auto& c : components) {
        if (!(c.variance > 0.0) || !(c.weight >= 0.0)) throw ValidationError("normal mixture: bad component");
    }
    return GridDensity::from_function(lower, upper, m, [&](double t) {
        double v = 0.0;
        for (const auto& c : components) {
            const double d = t - c.mean;
            v += c.weight * std::exp(-0.5 * d * d / c.variance) / std::sqrt(2.0 * std::numbers::pi * c.variance);
        }
        return v;
    });
}

MixingMeasure parse_measure(std::string_view spec, std::size_t default_m) {
    const bool looks_like_path = spec.size() > 4 && spec.substr(spec.size() - 4) == ".csv";
    if (looks_like_path || (spec.find(':') == std::string_view::npos &&
                            std::filesystem::exists(std::filesystem::path(std::string(spec))))) {
        return read_measure_csv(std::string(spec));
    }
    const auto s = SpecString::parse(spec);
    auto grid_m = [&] {
        const double m = s.number_or("m", static_cast<double>(default_m));
        if (m < 2 || m != std::floor(m)) throw ValidationError(s.family + ": m must be an integer >= 2");
        return static_cast<std::size_t>(m);
    };
    if (s.family == "normal") {
        s.expect_only({"mean", "var", "m", "lo", "hi"});
        const double mu = s.number("mean");
        const double var = s.number("var");
        if (!(var > 0.0)) throw ValidationError("normal: var must be > 0");
        const double sd = std::sqrt(var);
        return normal_grid_on(mu, var, s.number_or("lo", mu - 6.0 * sd), s.number_or("hi", mu + 6.0 * sd), grid_m());
    }
    if (s.family == "uniform") {
        s.expect_only({"lo", "hi", "m"});
        return GridDensity::from_function(s.number("lo"), s.number("hi"), grid_m(), [](double) { return 1.0; });
    }
    if (s.family == "normalmix") {
        s.expect_only({"w", "mean", "var", "m", "lo", "hi"});
        const auto w = split_numbers(s.text("w"), "normalmix.w");
        const auto mu = split_numbers(s.text("mean"), "normalmix.mean");
        const auto var = split_numbers(s.text("var"), "normalmix.var");
        if (w.size() != mu.size() || w.size() != var.size()) {
            throw ValidationError("normalmix: w, mean and var need the same number of entries");
        }
        std::vector<NormalComponent> comps;
        double lo = HUGE_VAL;
        double hi = -HUGE_VAL;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!(var[i] > 0.0)) throw ValidationError("normalmix: var must be > 0");
            comps.push_back({w[i], mu[i], var[i]});
            lo = std::min(lo, mu[i] - 6.0 * std::sqrt(var[i]));
            hi = std::max(hi, mu[i] + 6.0 * std::sqrt(var[i]));
        }
        return normal_mixture_grid(comps, s.number_or("lo", lo), s.number_or("hi", hi), grid_m());
    }
    if (s.family == "atoms") {
        s.expect_only({"at", "w"});
        auto at = split_numbers(s.text("at"), "atoms.at");
        auto w = s.has("w") ? split_numbers(s.text("w"), "atoms.w") : std::vector<double>(at.size(), 1.0);
        return DiscreteMixing(std::move(at), std::move(w));
    }
    if (s.family == "point") {
        s.expect_only({"at"});
        return DiscreteMixing::point_mass(s.number("at"));
    }
    throw ValidationError("unknown measure family '" + s.family + "'");
}

}  // namespace newton
