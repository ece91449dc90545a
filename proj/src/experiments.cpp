#include "newton/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "newton/asymptotics.hpp"
#include "newton/error.hpp"
#include "newton/io.hpp"
#include "newton/parallel.hpp"
#include "newton/stats.hpp"

#ifndef NEWTON_GIT_DESCRIBE
#define NEWTON_GIT_DESCRIBE "unknown"
#endif

namespace newton {
namespace {

// Seed streams; each stream feeds derive_seed(master, stream, index).
constexpr std::uint64_t kFig1Stream = 100;
constexpr std::uint64_t kDataStream = 200;
constexpr std::uint64_t kOrderingStream = 300;
constexpr std::uint64_t kClassifierStream = 400;
constexpr std::uint64_t kCustomStream = 500;

const std::vector<NormalComponent>& fig2_components() {
    static const std::vector<NormalComponent> c{{0.3, -1.0, 2.0}, {0.7, 3.0, 1.5}};
    return c;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string num(double v) { return format_double(v); }

std::vector<WeightSchedule> parse_schedules(const std::vector<std::string>& specs) {
    std::vector<WeightSchedule> out;
    for (const auto& s : specs) out.push_back(WeightSchedule::parse(s));
    return out;
}

GridDensity grid_g0(const ExperimentConfig& c) {
    auto g0 = parse_measure(c.g0, c.grid_m);
    if (!std::holds_alternative<GridDensity>(g0)) throw ValidationError(c.id + ": g0 must be a grid density");
    return std::get<GridDensity>(std::move(g0));
}

// Fits xs in order, keeping copies of the estimate at the requested steps.
std::vector<Snapshot> fit_with_snapshots(EstimatorState state, std::span<const double> xs,
                                         std::span<const std::size_t> steps, EstimatorState* final_state) {
    std::vector<Snapshot> out;
    auto wanted = [&](std::size_t k) { return std::find(steps.begin(), steps.end(), k) != steps.end(); };
    for (double x : xs) {
        state = update(state, x);
        if (wanted(state.n)) out.push_back({state.n, state.current});
    }
    if (final_state) *final_state = std::move(state);
    return out;
}

void require(bool ok, const std::string& id, const std::string& what) {
    if (!ok) throw ValidationError(id + ": " + what);
}

}  // namespace

// ---------------------------------------------------------------- config

ExperimentConfig defaults_for(std::string_view id) {
    ExperimentConfig c;
    c.id = std::string(id);
    if (id == "fig1") {
        c.g0 = "normal:mean=1,var=3";
        c.schedules = {"poly:alpha=5,beta=1"};
        c.replicas = 200;
        c.sigma2 = {0.01, 1.0};
        c.proxy_n = 1000;
        c.sets = {"(-inf,0]"};
    } else if (id == "fig2" || id == "fig3") {
        c.kernel = "gaussian:sigma2=1";
        c.g0 = "normal:mean=1,var=9";
        c.n = 1000;
        if (id == "fig2") {
            c.schedules = {"poly:alpha=1,beta=1", "poly:alpha=100,beta=1",
                           "piecewise:alpha=100,n0=500,beta1=1,beta2=0.75"};
            c.snapshots = {1, 300, 500, 1000};
            c.orderings = 3;
        } else {
            c.schedules = {"poly:alpha=100,beta=1", "piecewise:alpha=100,n0=500,beta1=1,beta2=0.75"};
            for (int i = 0; i <= 20; ++i) c.t_grid.push_back(-4.0 + 0.5 * i);
        }
    } else if (id == "classifier") {
        c.kernel = "gaussian:sigma2=1";
        c.schedules = {"poly:alpha=1,beta=1"};
        c.n = 500;
        c.atoms = {-5.0, 5.0};
        c.true_weights = {0.5, 0.5};
    } else if (id == "custom") {
        c.kernel = "gaussian:sigma2=1";
        c.g0 = "normal:mean=0,var=1";
        c.schedules = {"poly:alpha=1,beta=1"};
        c.n = 100;
        c.replicas = 10;
        c.sets = {"(-inf,0]"};
    } else {
        throw ValidationError("unknown experiment '" + std::string(id) + "' (fig1|fig2|fig3|classifier|custom)");
    }
    return c;
}

void validate(const ExperimentConfig& c) {
    const std::string& id = c.id;
    defaults_for(id);  // rejects unknown ids
    require(!c.schedules.empty(), id, "at least one schedule is required");
    const auto schedules = parse_schedules(c.schedules);
    require(c.grid_m >= 3, id, "grid size must be at least 3");
    require(!c.out_dir.empty(), id, "output directory must not be empty");

    if (id == "fig1") {
        require(c.kernel.empty(), id, "the kernel is set through sigma2, not kernel");
        require(!c.sigma2.empty(), id, "at least one sigma2 is required");
        for (double s : c.sigma2) require(s > 0.0 && std::isfinite(s), id, "sigma2 values must be positive");
        require(c.n == 0 || c.n == c.proxy_n, id, "n and proxy-n disagree");
        require(c.proxy_n >= 1, id, "proxy-n must be at least 1");
        require(c.replicas >= 2, id, "at least two replicas are required");
        require(schedules.size() == 1 && schedules[0].kind() == WeightSchedule::Kind::polynomial, id,
                "needs exactly one polynomial schedule (its alpha sets the Beta reference)");
        require(c.sets.size() <= 1, id, "takes at most one query set");
        grid_g0(c);
    } else if (id == "fig2" || id == "fig3") {
        Kernel::parse(c.kernel);
        grid_g0(c);
        require(c.n >= 1, id, "n must be at least 1");
        for (const auto& s : schedules) require(s.length() >= c.n, id, "schedule shorter than n");
        if (id == "fig2") {
            require(c.orderings >= 2, id, "at least two orderings are required");
            for (auto s : c.snapshots) require(s >= 1 && s <= c.n, id, "snapshot steps must lie in [1, n]");
        } else {
            require(c.level > 0.0 && c.level < 1.0, id, "level must lie in (0, 1)");
            require(c.epsilon > 0.0, id, "epsilon must be positive");
            require(!c.t_grid.empty(), id, "t grid must not be empty");
            for (const auto& s : schedules) {
                require(s.kind() != WeightSchedule::Kind::explicit_list && s.tail_exponent() > 0.5, id,
                        "credible bands need a schedule with tail exponent in (1/2, 1]");
            }
        }
    } else if (id == "classifier") {
        const auto kernel = Kernel::parse(c.kernel);
        require(c.n >= 1, id, "n must be at least 1");
        require(!c.atoms.empty(), id, "atoms are required");
        require(c.true_weights.size() == c.atoms.size(), id, "true weights must match the atoms");
        for (double w : c.true_weights) require(w >= 0.0 && std::isfinite(w), id, "true weights must be >= 0");
        require(schedules.size() == 1, id, "needs exactly one schedule");
        require(schedules[0].length() >= c.n, id, "schedule shorter than n");
        for (double a : c.atoms) kernel.validate_parameter(a);
        DiscreteMixing(c.atoms, c.true_weights);
        if (!c.g0.empty()) {
            const auto g0 = parse_measure(c.g0, c.grid_m);
            require(std::holds_alternative<DiscreteMixing>(g0), id, "g0 must be discrete");
            const auto atoms = std::get<DiscreteMixing>(g0).atoms();
            require(std::equal(atoms.begin(), atoms.end(), c.atoms.begin(), c.atoms.end()), id,
                    "g0 atoms differ from the configured atoms");
        }
    } else {
        const auto kernel = Kernel::parse(c.kernel);
        const auto g0 = parse_measure(c.g0, c.grid_m);
        for (double t : support(g0)) kernel.validate_parameter(t);
        require(c.n >= 1, id, "n must be at least 1");
        require(c.replicas >= 1, id, "at least one replica is required");
        require(schedules.size() == 1, id, "needs exactly one schedule");
        require(!c.sets.empty(), id, "at least one query set is required");
    }
    for (const auto& s : c.sets) ThetaSet::parse(s);
}

// ---------------------------------------------------------------- fig1

Fig1Result run_fig1(const ExperimentConfig& c) {
    validate(c);
    const GridDensity g0 = grid_g0(c);
    const auto schedule = WeightSchedule::parse(c.schedules.front());
    const ThetaSet query = c.sets.empty() ? ThetaSet::at_most(0.0) : ThetaSet::parse(c.sets.front());
    const std::size_t m_rep = c.replicas;

    Fig1Result result;
    result.g0_at_zero = measure_of(g0, query).value;
    result.beta_a = schedule.alpha() * result.g0_at_zero;
    result.beta_b = schedule.alpha() * (1.0 - result.g0_at_zero);

    for (std::size_t s = 0; s < c.sigma2.size(); ++s) {
        const Kernel kernel = Kernel::gaussian(c.sigma2[s]);
        const auto initial = EstimatorState::initial(kernel, schedule, g0);
        Fig1Arm arm{c.sigma2[s], std::vector<std::uint64_t>(m_rep), std::vector<double>(m_rep),
                    std::vector<std::size_t>(m_rep), {}, 0.0, 0.0};
        for (std::size_t r = 0; r < m_rep; ++r) arm.seeds[r] = stats::derive_seed(c.seed, kFig1Stream + s, r);

        std::vector<std::vector<double>> finals(m_rep);
        parallel_for(m_rep, [&](std::size_t r) {
            const auto traj = simulate_cid(initial, c.proxy_n, arm.seeds[r]);
            arm.g_at_zero[r] = measure_of(traj.final_state.current, query).value;
            const auto v = values(traj.final_state.current);
            arm.modes[r] = stats::count_local_maxima(v);
            if (r < c.density_replicas) finals[r].assign(v.begin(), v.end());
        });
        for (std::size_t r = 0; r < std::min(m_rep, c.density_replicas); ++r) {
            arm.densities.emplace_back(g0.layout(), std::move(finals[r]));
        }
        const double a = result.beta_a;
        const double b = result.beta_b;
        arm.ks_distance = stats::ks_statistic(arm.g_at_zero, [a, b](double u) { return stats::beta_cdf(u, a, b); });
        arm.ks_pvalue = stats::ks_pvalue(arm.ks_distance, m_rep);
        result.arms.push_back(std::move(arm));
    }
    return result;
}

std::vector<Table> fig1_tables(const Fig1Result& r) {
    std::string samples = "sigma2,replica,seed,G_N\n";
    std::string dens = "sigma2,replica,theta,density\n";
    std::string summary = "sigma2,ks_distance,ks_pvalue,beta_a,beta_b,median_modes,share_modes_ge3,share_modes_le2\n";
    for (const auto& arm : r.arms) {
        for (std::size_t i = 0; i < arm.g_at_zero.size(); ++i) {
            samples += num(arm.sigma2) + ',' + std::to_string(i) + ',' + std::to_string(arm.seeds[i]) + ',' +
                       num(arm.g_at_zero[i]) + '\n';
        }
        for (std::size_t i = 0; i < arm.densities.size(); ++i) {
            const auto& g = arm.densities[i];
            for (std::size_t j = 0; j < g.size(); ++j) {
                dens += num(arm.sigma2) + ',' + std::to_string(i) + ',' + num(g.nodes()[j]) + ',' +
                        num(g.values()[j]) + '\n';
            }
        }
        auto modes = arm.modes;
        std::sort(modes.begin(), modes.end());
        const double share_ge3 =
            static_cast<double>(std::count_if(modes.begin(), modes.end(), [](std::size_t k) { return k >= 3; })) /
            static_cast<double>(modes.size());
        const double share_le2 =
            static_cast<double>(std::count_if(modes.begin(), modes.end(), [](std::size_t k) { return k <= 2; })) /
            static_cast<double>(modes.size());
        summary += num(arm.sigma2) + ',' + num(arm.ks_distance) + ',' + num(arm.ks_pvalue) + ',' + num(r.beta_a) +
                   ',' + num(r.beta_b) + ',' + std::to_string(modes[modes.size() / 2]) + ',' + num(share_ge3) + ',' +
                   num(share_le2) + '\n';
    }
    std::string beta = "p,quantile\n";
    for (int i = 1; i < 200; ++i) {
        const double p = 0.005 * i;
        beta += num(p) + ',' + num(stats::beta_quantile(p, r.beta_a, r.beta_b)) + '\n';
    }
    return {{"gN0_samples.csv", samples},
            {"beta_reference.csv", beta},
            {"gn_density.csv", dens},
            {"fig1_summary.csv", summary}};
}

// ---------------------------------------------------------------- fig2

std::vector<double> fig2_data(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    const auto& comp = fig2_components();
    std::bernoulli_distribution second(comp[1].weight);
    std::vector<double> xs(n);
    for (auto& x : xs) {
        const auto& k = comp[second(rng) ? 1 : 0];
        const double theta = std::normal_distribution<double>(k.mean, std::sqrt(k.variance))(rng);
        x = std::normal_distribution<double>(theta, 1.0)(rng);
    }
    return xs;
}

GridDensity fig2_truth(const GridDensity& like) {
    const auto& comp = fig2_components();
    std::vector<double> v(like.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double t = like.nodes()[j];
        double acc = 0.0;
        for (const auto& k : comp) {
            const double z = (t - k.mean) / std::sqrt(k.variance);
            acc += k.weight * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI * k.variance);
        }
        v[j] = acc;
    }
    return GridDensity(like.layout(), std::move(v));
}

double fig2_true_cdf(double t) {
    double acc = 0.0;
    for (const auto& k : fig2_components()) acc += k.weight * stats::normal_cdf((t - k.mean) / std::sqrt(k.variance));
    return acc;
}

Fig2Result run_fig2(const ExperimentConfig& c) {
    validate(c);
    const Kernel kernel = Kernel::parse(c.kernel);
    const GridDensity g0 = grid_g0(c);
    const auto schedules = parse_schedules(c.schedules);

    Fig2Result result{{}, fig2_truth(g0), {}, c.schedules, {}, {}, {}};
    result.seeds.push_back(stats::derive_seed(c.seed, kDataStream, 0));
    result.data = fig2_data(c.n, result.seeds.front());

    std::vector<std::vector<double>> orders{result.data};
    for (std::size_t o = 1; o < c.orderings; ++o) {
        result.seeds.push_back(stats::derive_seed(c.seed, kOrderingStream, o));
        Rng rng(result.seeds.back());
        orders.push_back(permute(result.data, rng));
    }

    std::vector<std::size_t> steps = c.snapshots;
    if (std::find(steps.begin(), steps.end(), c.n) == steps.end()) steps.push_back(c.n);

    const std::size_t n_cells = schedules.size() * c.orderings;
    std::vector<std::vector<Snapshot>> snaps(n_cells);
    std::vector<std::vector<double>> finals(n_cells);
    parallel_for(n_cells, [&](std::size_t cell) {
        const std::size_t s = cell / c.orderings;
        const std::size_t o = cell % c.orderings;
        EstimatorState last = EstimatorState::initial(kernel, schedules[s], g0);
        snaps[cell] = fit_with_snapshots(last, orders[o], steps, &last);
        const auto v = values(last.current);
        finals[cell].assign(v.begin(), v.end());
    });

    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        const std::size_t s = cell / c.orderings;
        GridDensity fin(g0.layout(), std::move(finals[cell]));
        const double l1 = l1_distance(fin, result.truth);
        result.cells.push_back({c.schedules[s], cell % c.orderings, std::move(snaps[cell]), std::move(fin), l1});
    }
    for (std::size_t s = 0; s < schedules.size(); ++s) {
        double worst = 0.0;
        std::vector<double> l1;
        for (std::size_t a = 0; a < c.orderings; ++a) {
            const auto& ca = result.cells[s * c.orderings + a];
            l1.push_back(ca.l1_to_truth);
            for (std::size_t b = a + 1; b < c.orderings; ++b) {
                worst = std::max(worst, l1_distance(ca.final_density, result.cells[s * c.orderings + b].final_density));
            }
        }
        result.sensitivity.push_back(worst);
        result.mean_l1_to_truth.push_back(stats::compensated_mean(l1));
    }
    return result;
}

std::vector<Table> fig2_tables(const Fig2Result& r) {
    std::string data = "index,x\n";
    for (std::size_t i = 0; i < r.data.size(); ++i) data += std::to_string(i) + ',' + num(r.data[i]) + '\n';

    std::string dens = "schedule,ordering,step,theta,density\n";
    std::string cells = "schedule,ordering,l1_to_truth\n";
    for (const auto& cell : r.cells) {
        const std::string prefix = csv_field(cell.schedule) + ',' + std::to_string(cell.ordering) + ',';
        for (const auto& snap : cell.snapshots) {
            const auto t = support(snap.measure);
            const auto v = values(snap.measure);
            for (std::size_t j = 0; j < t.size(); ++j) {
                dens += prefix + std::to_string(snap.step) + ',' + num(t[j]) + ',' + num(v[j]) + '\n';
            }
        }
        cells += prefix + num(cell.l1_to_truth) + '\n';
    }
    std::string truth = "theta,density\n";
    for (std::size_t j = 0; j < r.truth.size(); ++j) {
        truth += num(r.truth.nodes()[j]) + ',' + num(r.truth.values()[j]) + '\n';
    }
    std::string summary = "schedule,sensitivity,mean_l1_to_truth\n";
    for (std::size_t s = 0; s < r.schedules.size(); ++s) {
        summary += csv_field(r.schedules[s]) + ',' + num(r.sensitivity[s]) + ',' + num(r.mean_l1_to_truth[s]) + '\n';
    }
    return {{"fig2_data.csv", data},
            {"fig2_densities.csv", dens},
            {"fig2_truth.csv", truth},
            {"fig2_cells.csv", cells},
            {"fig2_summary.csv", summary}};
}

// ---------------------------------------------------------------- fig3

Fig3Result run_fig3(const ExperimentConfig& c) {
    validate(c);
    const Kernel kernel = Kernel::parse(c.kernel);
    const GridDensity g0 = grid_g0(c);
    const auto schedules = parse_schedules(c.schedules);

    Fig3Result result{c.schedules, {}, stats::derive_seed(c.seed, kDataStream, 0)};
    const auto data = fig2_data(c.n, result.data_seed);
    std::vector<ThetaSet> sets;
    for (double t : c.t_grid) sets.push_back(ThetaSet::at_most(t));

    std::vector<std::vector<CredibleInterval>> per_schedule(schedules.size());
    parallel_for(schedules.size(), [&](std::size_t s) {
        const auto state = fit(EstimatorState::initial(kernel, schedules[s], g0), data);
        per_schedule[s] = credible_intervals(state, sets, c.level, c.epsilon);
    });
    for (std::size_t s = 0; s < schedules.size(); ++s) {
        for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
            const auto& ci = per_schedule[s][i];
            result.rows.push_back({c.schedules[s], c.t_grid[i], ci.center, ci.lo, ci.hi, fig2_true_cdf(c.t_grid[i])});
        }
    }
    return result;
}

std::vector<Table> fig3_tables(const Fig3Result& r) {
    std::string out = "schedule,t,G_n,lo,hi,true_G\n";
    for (const auto& row : r.rows) {
        out += csv_field(row.schedule) + ',' + num(row.t) + ',' + num(row.g_n) + ',' + num(row.lo) + ',' +
               num(row.hi) + ',' + num(row.true_g) + '\n';
    }
    return {{"fig3_intervals.csv", out}};
}

// ---------------------------------------------------------------- classifier

ClassifierResult run_classifier(const ExperimentConfig& c) {
    validate(c);
    const Kernel kernel = Kernel::parse(c.kernel);
    const auto schedule = WeightSchedule::parse(c.schedules.front());
    const std::size_t k = c.atoms.size();
    MixingMeasure g0 = c.g0.empty() ? MixingMeasure(DiscreteMixing(c.atoms, std::vector<double>(k, 1.0)))
                                    : parse_measure(c.g0, c.grid_m);
    auto state = EstimatorState::initial(kernel, schedule, std::move(g0));

    ClassifierResult result{{}, {}, 0.0, stats::derive_seed(c.seed, kClassifierStream, 0)};
    Rng rng(result.seed);
    std::discrete_distribution<std::size_t> label(c.true_weights.begin(), c.true_weights.end());
    std::size_t correct = 0;
    for (std::size_t step = 1; step <= c.n; ++step) {
        const std::size_t truth = label(rng);
        const double x = kernel.sample(c.atoms[truth], rng);
        auto probs = classify(state, x);
        const auto predicted = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
        if (predicted == truth) ++correct;
        result.steps.push_back({step, x, truth, std::move(probs), predicted,
                                static_cast<double>(correct) / static_cast<double>(step)});
        state = update(state, x);
    }
    const auto w = values(state.current);
    result.final_weights.assign(w.begin(), w.end());
    result.accuracy = result.steps.back().running_accuracy;
    return result;
}

std::vector<Table> classifier_tables(const ClassifierResult& r) {
    const std::size_t k = r.final_weights.size();
    std::string trace = "step,x,truth";
    for (std::size_t a = 0; a < k; ++a) trace += ",p_" + std::to_string(a);
    trace += ",predicted,running_accuracy\n";
    for (const auto& s : r.steps) {
        trace += std::to_string(s.step) + ',' + num(s.x) + ',' + std::to_string(s.truth);
        for (double p : s.probabilities) trace += ',' + num(p);
        trace += ',' + std::to_string(s.predicted) + ',' + num(s.running_accuracy) + '\n';
    }
    std::string summary = "component,final_weight\n";
    for (std::size_t a = 0; a < k; ++a) summary += std::to_string(a) + ',' + num(r.final_weights[a]) + '\n';
    summary += "accuracy," + num(r.accuracy) + '\n';
    return {{"classifier_trace.csv", trace}, {"classifier_summary.csv", summary}};
}

// ---------------------------------------------------------------- custom

CustomResult run_custom(const ExperimentConfig& c) {
    validate(c);
    const auto initial = EstimatorState::initial(Kernel::parse(c.kernel), WeightSchedule::parse(c.schedules.front()),
                                                 parse_measure(c.g0, c.grid_m));
    std::vector<ThetaSet> sets;
    for (const auto& s : c.sets) sets.push_back(ThetaSet::parse(s));

    CustomResult result{std::vector<std::uint64_t>(c.replicas), std::vector<std::vector<double>>(c.replicas)};
    for (std::size_t r = 0; r < c.replicas; ++r) result.seeds[r] = stats::derive_seed(c.seed, kCustomStream, r);
    parallel_for(c.replicas, [&](std::size_t r) {
        const auto traj = simulate_cid(initial, c.n, result.seeds[r]);
        for (const auto& a : sets) result.set_mass[r].push_back(measure_of(traj.final_state.current, a).value);
    });
    return result;
}

std::vector<Table> custom_tables(const ExperimentConfig& c, const CustomResult& r) {
    std::string out = "replica,seed,set,mass\n";
    for (std::size_t i = 0; i < r.set_mass.size(); ++i) {
        for (std::size_t a = 0; a < c.sets.size(); ++a) {
            out += std::to_string(i) + ',' + std::to_string(r.seeds[i]) + ',' + csv_field(c.sets[a]) + ',' +
                   num(r.set_mass[i][a]) + '\n';
        }
    }
    return {{"custom_set_mass.csv", out}};
}

// ---------------------------------------------------------------- driver

std::string_view build_version() noexcept { return NEWTON_GIT_DESCRIBE; }

std::string manifest_json(const ExperimentConfig& c, double wall_clock_ms, const std::vector<std::uint64_t>& seeds) {
    nlohmann::ordered_json cfg;
    cfg["id"] = c.id;
    cfg["kernel"] = c.kernel;
    cfg["g0"] = c.g0;
    cfg["schedules"] = c.schedules;
    cfg["n"] = c.n;
    cfg["replicas"] = c.replicas;
    cfg["seed"] = c.seed;
    cfg["out_dir"] = c.out_dir;
    cfg["sets"] = c.sets;
    cfg["grid_m"] = c.grid_m;
    cfg["level"] = c.level;
    cfg["epsilon"] = c.epsilon;
    cfg["sigma2"] = c.sigma2;
    cfg["proxy_n"] = c.proxy_n;
    cfg["density_replicas"] = c.density_replicas;
    cfg["snapshots"] = c.snapshots;
    cfg["orderings"] = c.orderings;
    cfg["t_grid"] = c.t_grid;
    cfg["atoms"] = c.atoms;
    cfg["true_weights"] = c.true_weights;

    nlohmann::ordered_json j;
    j["experiment"] = c.id;
    j["config"] = cfg;
    j["git_describe"] = std::string(build_version());
    j["wall_clock_ms"] = wall_clock_ms;
    j["master_seed"] = c.seed;
    j["seeds"] = seeds;
    return j.dump(2) + "\n";
}

std::vector<std::string> run_experiment(const ExperimentConfig& c) {
    validate(c);
    const auto start = std::chrono::steady_clock::now();
    std::vector<Table> tables;
    std::vector<std::uint64_t> seeds;
    if (c.id == "fig1") {
        const auto r = run_fig1(c);
        for (const auto& arm : r.arms) seeds.insert(seeds.end(), arm.seeds.begin(), arm.seeds.end());
        tables = fig1_tables(r);
    } else if (c.id == "fig2") {
        const auto r = run_fig2(c);
        seeds = r.seeds;
        tables = fig2_tables(r);
    } else if (c.id == "fig3") {
        const auto r = run_fig3(c);
        seeds = {r.data_seed};
        tables = fig3_tables(r);
    } else if (c.id == "classifier") {
        const auto r = run_classifier(c);
        seeds = {r.seed};
        tables = classifier_tables(r);
    } else {
        const auto r = run_custom(c);
        seeds = r.seeds;
        tables = custom_tables(c, r);
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    std::error_code ec;
    std::filesystem::create_directories(c.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + c.out_dir + "': " + ec.message());
    const std::filesystem::path dir(c.out_dir);
    std::vector<std::string> names;
    for (const auto& t : tables) {
        write_text_file((dir / t.name).string(), t.csv);
        names.push_back(t.name);
    }
    write_text_file((dir / "manifest.json").string(), manifest_json(c, ms, seeds));
    names.emplace_back("manifest.json");
    return names;
}

}  // namespace newton
