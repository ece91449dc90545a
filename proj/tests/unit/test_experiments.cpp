#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "newton/error.hpp"
#include "newton/experiments.hpp"
#include "newton/io.hpp"
#include "test_support.hpp"

using namespace newton;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("newton_exp_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig small_fig1() {
    auto c = defaults_for("fig1");
    c.replicas = 12;
    c.proxy_n = 60;
    c.grid_m = 201;
    c.density_replicas = 2;
    return c;
}

ExperimentConfig small_fig2(const std::string& id) {
    auto c = defaults_for(id);
    c.n = 200;
    c.grid_m = 301;
    if (id == "fig2") c.snapshots = {1, 100, 200};
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NEWTON_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(defaults_for("fig9"), ValidationError);

    auto c = defaults_for("fig1");
    c.kernel = "gaussian:sigma2=1";
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = defaults_for("fig1");
    c.n = 500;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c.n = c.proxy_n;
    CHECK_NOTHROW(validate(c));
    c.schedules = {"piecewise:alpha=100,n0=500,beta1=1,beta2=0.75"};
    CHECK_THROWS_AS(validate(c), ValidationError);

    c = defaults_for("fig2");
    c.snapshots = {0, 10};
    CHECK_THROWS_AS(validate(c), ValidationError);
    c.snapshots = {1, 1001};
    CHECK_THROWS_AS(validate(c), ValidationError);

    c = defaults_for("fig3");
    c.schedules = {"poly:alpha=1,beta=0.5"};
    CHECK_THROWS_AS(validate(c), ValidationError);
    c.schedules = {"explicit:w=0.5|0.5"};
    CHECK_THROWS_AS(validate(c), ValidationError);

    c = defaults_for("classifier");
    c.g0 = "atoms:at=-4|5,w=1|1";
    CHECK_THROWS_AS(validate(c), ValidationError);
    c.g0 = "normal:mean=0,var=1";
    CHECK_THROWS_AS(validate(c), ValidationError);

    c = defaults_for("custom");
    c.sets = {"(1,0]"};
    CHECK_THROWS_AS(validate(c), ValidationError);
    for (const char* id : {"fig1", "fig2", "fig3", "classifier", "custom"}) CHECK_NOTHROW(validate(defaults_for(id)));
}

TEST_CASE("fig1 Beta reference and outputs") {
    auto c = small_fig1();
    c.grid_m = 1001;
    const auto r = run_fig1(c);
    // G_0(0) = Phi(-1/sqrt(3)) under N(1,3), times alpha = 5
    const double g00 = testing::phi(-1.0 / std::sqrt(3.0));
    CHECK(std::abs(r.g0_at_zero - g00) < 1e-4);
    CHECK(std::abs(r.beta_a - 1.4096) < 1e-3);
    CHECK(std::abs(r.beta_b - 3.5904) < 1e-3);
    CHECK(r.beta_a + r.beta_b == doctest::Approx(5.0));
    REQUIRE(r.arms.size() == 2);
    for (const auto& arm : r.arms) {
        CHECK(arm.g_at_zero.size() == 12);
        CHECK(arm.modes.size() == 12);
        CHECK(arm.densities.size() == 2);
        for (double g : arm.g_at_zero) CHECK((g >= 0.0 && g <= 1.0));
        CHECK(arm.ks_distance > 0.0);
    }
    std::vector<std::string> names;
    for (const auto& t : fig1_tables(r)) names.push_back(t.name);
    for (const char* want : {"gN0_samples.csv", "beta_reference.csv", "gn_density.csv"}) {
        CHECK(std::find(names.begin(), names.end(), want) != names.end());
    }
}

TEST_CASE("fig2 structure") {
    const auto r = run_fig2(small_fig2("fig2"));
    CHECK(r.data.size() == 200);
    CHECK(r.cells.size() == 9);
    CHECK(r.sensitivity.size() == 3);
    CHECK(r.mean_l1_to_truth.size() == 3);
    for (const auto& cell : r.cells) CHECK(cell.snapshots.size() == 3);
    // ordering 0 is the sample as drawn
    CHECK(r.data == fig2_data(200, r.seeds.front()));
}

TEST_CASE("fig3 interval contracts") {
    const auto c = small_fig2("fig3");
    const auto r = run_fig3(c);
    CHECK(r.rows.size() == 2 * c.t_grid.size());
    const auto data = fig2_data(c.n, r.data_seed);
    for (std::size_t si = 0; si < 2; ++si) {
        const auto s0 = EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::parse(c.schedules[si]),
                                                parse_measure(c.g0, c.grid_m));
        const auto gn = fit(s0, data).current;
        for (std::size_t j = 0; j < c.t_grid.size(); ++j) {
            const auto& row = r.rows[si * c.t_grid.size() + j];
            CHECK(row.t == c.t_grid[j]);
            CHECK(row.g_n == measure_of(gn, ThetaSet::at_most(row.t)).value);
            CHECK(row.true_g == doctest::Approx(fig2_true_cdf(row.t)).epsilon(1e-12));
            CHECK((0.0 <= row.lo && row.lo <= row.g_n && row.g_n <= row.hi && row.hi <= 1.0));
        }
    }
}

TEST_CASE("classifier") {
    const auto r = run_classifier(defaults_for("classifier"));
    CHECK(r.accuracy > 0.99);
    CHECK(r.steps.size() == 500);

    auto single = defaults_for("classifier");
    single.atoms = {2.0};
    single.true_weights = {1.0};
    single.n = 50;
    const auto one = run_classifier(single);
    CHECK(one.accuracy == 1.0);
    CHECK(one.final_weights == std::vector<double>{1.0});

    auto flat = defaults_for("classifier");
    flat.kernel = "flat";
    flat.g0 = "atoms:at=-5|5,w=0.3|0.7";
    flat.true_weights = {0.3, 0.7};
    const auto f = run_classifier(flat);
    const auto majority = std::count_if(f.steps.begin(), f.steps.end(), [](const auto& s) { return s.truth == 1; });
    CHECK(f.accuracy == doctest::Approx(static_cast<double>(majority) / 500.0).epsilon(1e-15));
}

TEST_CASE("custom runs report set masses") {
    auto c = defaults_for("custom");
    c.sets = {"(-inf,0]", "(1,inf)"};
    c.grid_m = 201;
    const auto r = run_custom(c);
    CHECK(r.seeds.size() == 10);
    REQUIRE(r.set_mass.size() == 10);
    for (const auto& row : r.set_mass) CHECK(row.size() == 2);
}

TEST_CASE("reruns reproduce every table byte for byte") {
    for (const char* id : {"fig1", "fig2", "fig3", "classifier", "custom"}) {
        auto c = std::string(id) == "fig1" ? small_fig1() : small_fig2(id);
        if (std::string(id) == "classifier") c = defaults_for(id);
        if (std::string(id) == "custom") c = defaults_for(id);
        const auto a = scratch(std::string(id) + "_a");
        const auto b = scratch(std::string(id) + "_b");
        c.out_dir = a.string();
        const auto names = run_experiment(c);
        c.out_dir = b.string();
        CHECK(run_experiment(c) == names);
        for (const auto& name : names) {
            CAPTURE(name);
            if (name == "manifest.json") continue;  // carries out_dir and wall clock
            CHECK(read_text_file((a / name).string()) == read_text_file((b / name).string()));
        }
        const auto manifest = nlohmann::json::parse(read_text_file((a / "manifest.json").string()));
        CHECK(manifest["experiment"] == id);
        CHECK(manifest["config"]["seed"] == c.seed);
        CHECK(manifest["config"]["grid_m"] == c.grid_m);
        CHECK(manifest.contains("git_describe"));
        CHECK(manifest["wall_clock_ms"].get<double>() >= 0.0);
        CHECK(!manifest["seeds"].empty());
        fs::remove_all(a);
        fs::remove_all(b);
    }
}

TEST_CASE("a different master seed changes the output") {
    auto c = defaults_for("custom");
    const auto a = run_custom(c);
    c.seed = 43;
    CHECK(run_custom(c).set_mass != a.set_mass);
}

TEST_CASE("command line") {
    const auto dir = scratch("cli");
    const auto data = (dir / "points.csv").string();
    write_text_file(data, "x\n0.2\n-1.1\n2.5\n0.7\n");
    const auto gn = (dir / "gn.csv").string();

    CHECK(run_cli("fit --data " + data + " --kernel gaussian:sigma2=1 --g0 normal:mean=0,var=4 --out " + gn) == 0);
    CHECK(fs::exists(gn));
    const auto side = fit_sidecar_from_json(read_text_file(sidecar_path(gn)));
    CHECK(side.n == 4);

    const auto summary = (dir / "summary.json").string();
    CHECK(run_cli("posterior --state " + gn + " --sets \"(-inf,0];(-inf,1]\" --out " + summary) == 0);
    const auto j = nlohmann::json::parse(read_text_file(summary));
    CHECK(j["point"].size() == 2);
    CHECK(j["rate"] == 4.0);

    // explicit schedules have no rate
    CHECK(run_cli("posterior --state " + gn + " --sets \"(-inf,0]\" --schedule explicit:w=0.5") == 2);
    CHECK(run_cli("fit --data " + (dir / "missing.csv").string() + " --out " + gn) == 4);
    CHECK(run_cli("fit --data " + data + " --kernel point_mass --g0 point:at=0 --out " + gn) == 3);
    CHECK(run_cli("fit --data " + data + " --kernel point_mass --g0 point:at=0 --skip-degenerate --out " + gn) == 0);
    CHECK(run_cli("fit --bogus") == 2);
    CHECK(run_cli("experiment fig1 --kernel gaussian:sigma2=1 --out-dir " + dir.string()) == 2);

    // a flag on the command line beats the same key in the config file
    const auto cfg = (dir / "run.cfg").string();
    write_text_file(cfg, "# custom run\nseed = 7\nreplicas=2\nn = 5\ngrid_m = 101\n");
    const auto out = dir / "custom";
    CHECK(run_cli("experiment custom --config " + cfg + " --seed 9 --out-dir " + out.string()) == 0);
    const auto manifest = nlohmann::json::parse(read_text_file((out / "manifest.json").string()));
    CHECK(manifest["config"]["seed"] == 9);
    CHECK(manifest["config"]["replicas"] == 2);
    CHECK(manifest["config"]["grid_m"] == 101);

    const auto sim = (dir / "sim.csv").string();
    CHECK(run_cli("simulate cid --n 5 --replicas 2 --grid-m 101 --out " + sim) == 0);
    CHECK(read_text_file(sim).rfind("replica,seed,step,theta,x\n", 0) == 0);
    fs::remove_all(dir);
}
