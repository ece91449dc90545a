// Command-line front end: fit, simulate, posterior and experiment verbs.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "newton/asymptotics.hpp"
#include "newton/error.hpp"
#include "newton/experiments.hpp"
#include "newton/io.hpp"
#include "newton/parallel.hpp"
#include "newton/simulator.hpp"
#include "newton/stats.hpp"

namespace {

using namespace newton;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

// Reads a flat key=value file. Blank lines and lines starting with '#' are
// ignored; keys may use '_' or '-'.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::istringstream is(read_text_file(path));
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t row = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        ++row;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(path + ": line " + std::to_string(row) + " is not key=value");
        }
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Splices config entries into the argument list right after the verb, so
// that options given explicitly on the command line take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (!path || args.size() < 2) return args;
    std::vector<std::string> injected;
    for (const auto& [key, value] : read_config(*path)) {
        if (given_on_command_line(args, key)) continue;
        if (value == "true" || value == "false") {
            if (value == "true") injected.push_back("--" + key);
            continue;
        }
        injected.push_back("--" + key);
        injected.push_back(value);
    }
    args.insert(args.begin() + 2, injected.begin(), injected.end());
    return args;
}

Backend parse_backend(const std::string& s) {
    if (s == "serial") return Backend::serial;
    if (s == "openmp") return Backend::openmp;
    throw ValidationError("unknown backend '" + s + "' (serial|openmp)");
}

std::vector<ThetaSet> parse_sets(const std::vector<std::string>& specs) {
    std::vector<ThetaSet> out;
    for (const auto& s : specs) out.push_back(ThetaSet::parse(s));
    return out;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        write_text_file(path, content);
    }
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string data;
    std::string kernel = "gaussian:sigma2=1";
    std::string g0 = "normal:mean=0,var=1";
    std::string schedule = "poly:alpha=1,beta=1";
    std::string out;
    std::size_t grid_m = 1001;
    bool skip_degenerate = false;
    std::string backend = "serial";
};

void run_fit(const FitArgs& a) {
    const auto initial = EstimatorState::initial(Kernel::parse(a.kernel), WeightSchedule::parse(a.schedule),
                                                 parse_measure(a.g0, a.grid_m), parse_backend(a.backend));
    const auto xs = read_observations(a.data);
    if (initial.schedule.length() < xs.size()) {
        throw ValidationError("schedule has fewer weights than observations");
    }
    for (double x : xs) initial.kernel.validate_observation(x);

    const auto start = std::chrono::steady_clock::now();
    const auto result = fit(initial, xs, FitOptions{a.skip_degenerate});
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    write_measure_csv(a.out, result.state.current);
    write_text_file(sidecar_path(a.out),
                    fit_sidecar_json({result.state.n, initial.schedule.to_spec(), initial.kernel.to_spec(), ms}));
    if (!result.skipped.empty()) {
        std::cerr << "skipped " << result.skipped.size() << " observation(s) with degenerate evidence\n";
    }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string mode;
    std::string kernel = "gaussian:sigma2=1";
    std::string g0 = "normal:mean=0,var=1";
    std::string schedule = "poly:alpha=1,beta=1";
    std::size_t n = 100;
    std::size_t replicas = 1;
    std::uint64_t seed = 42;
    std::size_t grid_m = 1001;
    std::string out;
};

void run_simulate(const SimulateArgs& a) {
    const Kernel kernel = Kernel::parse(a.kernel);
    const MixingMeasure g0 = parse_measure(a.g0, a.grid_m);
    const auto schedule = WeightSchedule::parse(a.schedule);
    if (a.n == 0) throw ValidationError("--n must be at least 1");
    if (a.replicas == 0) throw ValidationError("--replicas must be at least 1");
    const auto initial = EstimatorState::initial(kernel, schedule, g0);

    std::vector<std::uint64_t> seeds(a.replicas);
    for (std::size_t r = 0; r < a.replicas; ++r) seeds[r] = stats::derive_seed(a.seed, 0, r);
    std::vector<std::vector<double>> xs(a.replicas);
    std::vector<std::vector<double>> thetas(a.replicas);
    parallel_for(a.replicas, [&](std::size_t r) {
        if (a.mode == "cid") {
            auto traj = simulate_cid(initial, a.n, seeds[r]);
            xs[r] = std::move(traj.xs);
            thetas[r] = std::move(traj.thetas);
        } else {
            Rng rng(seeds[r]);
            for (std::size_t i = 0; i < a.n; ++i) {
                thetas[r].push_back(sample(g0, rng));
                xs[r].push_back(kernel.sample(thetas[r].back(), rng));
            }
        }
    });

    std::string csv = "replica,seed,step,theta,x\n";
    for (std::size_t r = 0; r < a.replicas; ++r) {
        const std::string prefix = std::to_string(r) + ',' + std::to_string(seeds[r]) + ',';
        for (std::size_t i = 0; i < a.n; ++i) {
            csv += prefix + std::to_string(i + 1) + ',' + format_double(thetas[r][i]) + ',' + format_double(xs[r][i]) +
                   '\n';
        }
    }
    emit(a.out, csv);
}

// ---------------------------------------------------------------- posterior

struct PosteriorArgs {
    std::string state;
    std::vector<std::string> sets;
    double level = 0.95;
    double epsilon = kDefaultEpsilon;
    std::string out;
    std::string kernel;
    std::string schedule;
    std::optional<std::size_t> n;
};

void run_posterior(const PosteriorArgs& a) {
    const MixingMeasure current = read_measure_csv(a.state);
    FitSidecar meta{};
    if (a.kernel.empty() || a.schedule.empty() || !a.n) {
        const auto path = sidecar_path(a.state);
        meta = fit_sidecar_from_json(read_text_file(path), path);
    }
    const Kernel kernel = Kernel::parse(a.kernel.empty() ? meta.kernel : a.kernel);
    const auto schedule = WeightSchedule::parse(a.schedule.empty() ? meta.schedule : a.schedule);
    auto state = EstimatorState::initial(kernel, schedule, current);
    state.n = a.n.value_or(meta.n);
    const auto sets = parse_sets(a.sets);
    emit(a.out, posterior_summary_json(summarize(state, sets, a.level, a.epsilon)));
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
    std::string id;
    std::string out_dir = ".";
    std::optional<std::string> kernel, g0;
    std::vector<std::string> schedules, sets;
    std::optional<std::size_t> n, replicas, proxy_n, grid_m, orderings, density_replicas;
    std::optional<std::uint64_t> seed;
    std::optional<double> level, epsilon;
    std::vector<double> sigma2, t_grid, atoms, true_weights;
    std::vector<std::size_t> snapshots;
};

ExperimentConfig resolve(const ExperimentArgs& a) {
    auto c = defaults_for(a.id);
    c.out_dir = a.out_dir;
    if (a.kernel) c.kernel = *a.kernel;
    if (a.g0) c.g0 = *a.g0;
    if (!a.schedules.empty()) c.schedules = a.schedules;
    if (!a.sets.empty()) c.sets = a.sets;
    if (a.n) c.n = *a.n;
    if (a.replicas) c.replicas = *a.replicas;
    if (a.proxy_n) c.proxy_n = *a.proxy_n;
    if (a.grid_m) c.grid_m = *a.grid_m;
    if (a.orderings) c.orderings = *a.orderings;
    if (a.density_replicas) c.density_replicas = *a.density_replicas;
    if (a.seed) c.seed = *a.seed;
    if (a.level) c.level = *a.level;
    if (a.epsilon) c.epsilon = *a.epsilon;
    if (!a.sigma2.empty()) c.sigma2 = a.sigma2;
    if (!a.t_grid.empty()) c.t_grid = a.t_grid;
    if (!a.atoms.empty()) c.atoms = a.atoms;
    if (!a.true_weights.empty()) c.true_weights = a.true_weights;
    if (!a.snapshots.empty()) c.snapshots = a.snapshots;
    return c;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Newton's recursive estimator of a mixing distribution", "newton"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit G_n to a data file");
    fit_cmd->add_option("--data", fit_args.data, "One observation per line, header optional")->required();
    fit_cmd->add_option("--kernel", fit_args.kernel, "gaussian:sigma2=1 | poisson | gamma:shape=2")
        ->capture_default_str();
    fit_cmd->add_option("--g0", fit_args.g0, "Prior guess spec or CSV path")->capture_default_str();
    fit_cmd->add_option("--schedule", fit_args.schedule, "poly:alpha=..,beta=.. | piecewise:... | explicit:w=..")
        ->capture_default_str();
    fit_cmd->add_option("--out", fit_args.out, "Output CSV; a JSON sidecar is written next to it")->required();
    fit_cmd->add_option("--grid-m", fit_args.grid_m, "Grid size for parametric g0 specs")->capture_default_str();
    fit_cmd->add_flag("--skip-degenerate", fit_args.skip_degenerate, "Drop observations with vanishing evidence");
    fit_cmd->add_option("--backend", fit_args.backend, "serial | openmp")->capture_default_str();

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate c.i.d. or i.i.d. mixture data");
    sim_cmd->add_option("mode", sim.mode, "cid | iid")->required()->check(CLI::IsMember({"cid", "iid"}));
    sim_cmd->add_option("--kernel", sim.kernel)->capture_default_str();
    sim_cmd->add_option("--g0", sim.g0, "Starting measure (cid) or true mixing measure (iid)")->capture_default_str();
    sim_cmd->add_option("--schedule", sim.schedule)->capture_default_str();
    sim_cmd->add_option("--n", sim.n)->capture_default_str();
    sim_cmd->add_option("--replicas", sim.replicas)->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
    sim_cmd->add_option("--grid-m", sim.grid_m)->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "Long-format CSV (default stdout)");

    PosteriorArgs post;
    std::size_t post_n = 0;
    auto* post_cmd = app.add_subcommand("posterior", "Asymptotic credible intervals and region from a fitted G_n");
    post_cmd->add_option("--state", post.state, "CSV written by fit")->required();
    post_cmd->add_option("--sets", post.sets, "Query sets separated by ';', e.g. \"(-inf,0];(-inf,1]\"")
        ->required()
        ->delimiter(';')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    post_cmd->add_option("--level", post.level)->capture_default_str();
    post_cmd->add_option("--epsilon", post.epsilon)->capture_default_str();
    post_cmd->add_option("--out", post.out, "JSON output (default stdout)");
    post_cmd->add_option("--kernel", post.kernel, "Overrides the sidecar");
    post_cmd->add_option("--schedule", post.schedule, "Overrides the sidecar");
    auto* post_n_opt = post_cmd->add_option("--n", post_n, "Overrides the sidecar");

    ExperimentArgs ex;
    auto* ex_cmd = app.add_subcommand("experiment", "Run a reproduction study and write its tables");
    ex_cmd->add_option("id", ex.id, "fig1 | fig2 | fig3 | classifier | custom")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "classifier", "custom"}));
    ex_cmd->add_option("--out-dir", ex.out_dir)->capture_default_str();
    ex_cmd->add_option("--kernel", ex.kernel);
    ex_cmd->add_option("--g0", ex.g0);
    ex_cmd->add_option("--schedule", ex.schedules, "One or more schedules separated by ';'")
        ->delimiter(';')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    ex_cmd->add_option("--sets", ex.sets, "Query sets separated by ';'")
        ->delimiter(';')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    ex_cmd->add_option("--n", ex.n);
    ex_cmd->add_option("--replicas", ex.replicas);
    ex_cmd->add_option("--proxy-n", ex.proxy_n, "fig1: number of steps standing in for the limit");
    ex_cmd->add_option("--grid-m", ex.grid_m);
    ex_cmd->add_option("--orderings", ex.orderings);
    ex_cmd->add_option("--density-replicas", ex.density_replicas);
    ex_cmd->add_option("--seed", ex.seed);
    ex_cmd->add_option("--level", ex.level);
    ex_cmd->add_option("--epsilon", ex.epsilon);
    ex_cmd->add_option("--sigma2", ex.sigma2)->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    ex_cmd->add_option("--t-grid", ex.t_grid)->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    ex_cmd->add_option("--atoms", ex.atoms)->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    ex_cmd->add_option("--true-weights", ex.true_weights)
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    ex_cmd->add_option("--snapshots", ex.snapshots)
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    if (threads > 0) omp::set_threads(threads);
    if (*fit_cmd) run_fit(fit_args);
    if (*sim_cmd) run_simulate(sim);
    if (*post_cmd) {
        if (*post_n_opt) post.n = post_n;
        run_posterior(post);
    }
    if (*ex_cmd) {
        const auto names = run_experiment(resolve(ex));
        for (const auto& name : names) std::cout << name << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const DegenerateEvidenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
