#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "newton/asymptotics.hpp"
#include "newton/experiments.hpp"
#include "newton/simulator.hpp"
#include "newton/stats.hpp"
#include "test_support.hpp"

using namespace newton;

namespace {

EstimatorState at_step(EstimatorState s, std::size_t n) {
    s.n = n;
    return s;
}

const double kZ975 = 1.959963984540054;

}  // namespace

TEST_CASE("degenerate predictive laws have zero variance") {
    const auto point = EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::polynomial(1.0, 1.0),
                                               DiscreteMixing::point_mass(0.3));
    CHECK(v_hat(point, ThetaSet::at_most(0.0)) == 0.0);
    CHECK(v_hat(point, ThetaSet::at_most(1.0)) == 0.0);

    const auto flat = EstimatorState::initial(Kernel::testing_flat(), WeightSchedule::polynomial(1.0, 1.0),
                                              normal_grid(0.0, 1.0, 401));
    CHECK(v_hat(flat, ThetaSet::at_most(0.0)) < 1e-14);
}

TEST_CASE("two atom variance matches Monte Carlo") {
    const auto s = EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::polynomial(1.0, 1.0),
                                           DiscreteMixing({0.0, 1.0}, {0.5, 0.5}));
    Rng rng(2024);
    std::normal_distribution<double> noise;
    std::bernoulli_distribution coin(0.5);
    std::vector<double> p(100000);
    for (auto& v : p) {
        const double x = (coin(rng) ? 1.0 : 0.0) + noise(rng);
        // P(theta = 1 | x) for equal weights and unit variance
        v = 1.0 / (1.0 + std::exp(-(x - 0.5)));
    }
    const auto oracle = testing::mc_variance(p);
    CHECK(std::abs(v_hat(s, ThetaSet::point(1.0)) - oracle.mean) < 3.0 * oracle.se);
}

TEST_CASE("covariance structure") {
    const auto xs = fig2_data(300, 11);
    const auto s = fit(EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::polynomial(1.0, 1.0),
                                               normal_grid(1.0, 9.0, 601)),
                       xs);
    const ThetaSet a = ThetaSet::at_most(0.5);
    const std::vector<ThetaSet> one{a};
    CHECK(cov_hat(s, one)(0, 0) == v_hat(s, a));

    const std::vector<ThetaSet> pair{a, ThetaSet::above(0.5)};
    const auto c = cov_hat(s, pair);
    CHECK(std::abs(c(0, 1) + v_hat(s, a)) < 1e-8);
    CHECK(c(0, 1) == c(1, 0));
}

TEST_CASE("half-line covariance is positive semidefinite on the interval-study setup") {
    const auto xs = fig2_data(1000, 201);
    const auto s = fit(EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::piecewise(100.0, 500, 1.0, 0.75),
                                               normal_grid(1.0, 9.0)),
                       xs);
    std::vector<ThetaSet> sets;
    for (double t = -4.0; t <= 6.0; t += 0.5) sets.push_back(ThetaSet::at_most(t));
    const auto c = cov_hat(s, sets);
    CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("covariance invariants on random states") {
    testing::Gen gen(31);
    for (int rep = 0; rep < 25; ++rep) {
        const double sigma2 = gen.uniform(0.05, 3.0);
        const MixingMeasure g = rep % 3 == 0 ? MixingMeasure(gen.discrete(1 + gen.index(5), -3.0, 3.0))
                                             : MixingMeasure(gen.lumpy(-4.0, 4.0, 201 + gen.index(300)));
        const auto s = EstimatorState::initial(Kernel::gaussian(sigma2), WeightSchedule::polynomial(1.0, 1.0), g);
        std::vector<ThetaSet> sets;
        const std::size_t k = 1 + gen.index(5);
        for (std::size_t i = 0; i < k; ++i) sets.push_back(gen.interval(-5.0, 5.0));
        const auto c = cov_hat(s, sets);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
        for (std::size_t i = 0; i < k; ++i) {
            const double gi = measure_of(g, sets[i]).value;
            CHECK(c(i, i) >= 0.0);
            CHECK(c(i, i) <= gi * (1.0 - gi) + 1e-10);
            CHECK(std::abs(c(i, i) - v_hat(s, sets[i])) <= 1e-12);
            for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(c(i, j)) <= std::sqrt(c(i, i) * c(j, j)) + 1e-10);
        }
    }
}

TEST_CASE("sets of measure zero or one") {
    const auto d = EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::polynomial(1.0, 1.0),
                                           DiscreteMixing({0.0, 1.0}, {0.4, 0.6}));
    CHECK(v_hat(d, ThetaSet::point(2.0)) < 1e-12);
    CHECK(v_hat(d, ThetaSet::interval(-1.0, 2.0)) < 1e-12);

    const auto g = EstimatorState::initial(Kernel::gaussian(0.5), WeightSchedule::polynomial(1.0, 1.0),
                                           normal_grid_on(0.0, 1.0, -5.0, 5.0, 501));
    CHECK(v_hat(g, ThetaSet::interval(-6.0, 6.0)) < 1e-12);
    CHECK(v_hat(g, ThetaSet::above(5.0)) < 1e-12);
}

TEST_CASE("rate") {
    CHECK(rate(WeightSchedule::polynomial(1.0, 1.0), 100) == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(rate(WeightSchedule::polynomial(1.0, 0.75), 400) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(rate(WeightSchedule::piecewise(100.0, 500, 1.0, 0.75), 1000) ==
          doctest::Approx(0.5 * std::sqrt(1000.0)).epsilon(1e-15));

    // 1 / sum_{k>n} alpha_k^2, truncated at 1e7 with an integral bound for the rest
    const auto s = WeightSchedule::polynomial(1.0, 0.75);
    const std::size_t n = 1000;
    const std::size_t last = 10000000;
    double tail = 0.0;
    for (std::size_t k = last; k > n; --k) tail += std::pow(s.weight(k), 2.0);
    tail += 2.0 / std::sqrt(1.0 + last + 0.5);
    CHECK(std::abs(1.0 / tail / rate(s, n) - 1.0) < 0.02);

    CHECK_THROWS_AS(rate(WeightSchedule::explicit_weights({0.5, 0.25}), 1), UnsupportedScheduleError);
    CHECK_THROWS_AS(rate(WeightSchedule::polynomial(1.0, 0.5), 10), UnsupportedScheduleError);
    CHECK_THROWS_AS(rate(WeightSchedule::polynomial(1.0, 1.0), 0), UnsupportedScheduleError);
}

TEST_CASE("credible interval at the variance floor") {
    const auto flat = at_step(EstimatorState::initial(Kernel::testing_flat(), WeightSchedule::polynomial(1.0, 1.0),
                                                      normal_grid_on(0.0, 1.0, -8.0, 8.0, 1601)),
                              100);
    const auto ci = credible_interval(flat, ThetaSet::at_most(0.0));
    CHECK(ci.center == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(ci.hi - ci.center == doctest::Approx(kZ975 * 1e-4).epsilon(1e-9));
    CHECK(ci.center - ci.lo == doctest::Approx(kZ975 * 1e-4).epsilon(1e-9));
    CHECK(ci.variance == doctest::Approx(1e-8).epsilon(1e-12));

    const auto wide = credible_interval(at_step(flat, 400), ThetaSet::at_most(0.0));
    CHECK((wide.hi - wide.lo) / (ci.hi - ci.lo) == doctest::Approx(0.5).epsilon(1e-9));

    CHECK_THROWS_AS(credible_interval(flat, ThetaSet::at_most(0.0), 1.0), ValidationError);
    CHECK_THROWS_AS(credible_interval(flat, ThetaSet::at_most(0.0), 0.95, 0.0), ValidationError);
    auto ex = flat;
    ex.schedule = WeightSchedule::explicit_weights({0.5});
    CHECK_THROWS_AS(credible_interval(ex, ThetaSet::at_most(0.0)), UnsupportedScheduleError);
}

TEST_CASE("intervals are clipped and centered") {
    const auto xs = fig2_data(1000, 77);
    const auto s = fit(EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::piecewise(100.0, 500, 1.0, 0.75),
                                               normal_grid(1.0, 9.0)),
                       xs);
    for (double t : {-4.0, -1.0, 0.0, 2.0, 6.0}) {
        const ThetaSet a = ThetaSet::at_most(t);
        const auto ci = credible_interval(s, a);
        CHECK(ci.center == measure_of(s.current, a).value);
        CHECK(0.0 <= ci.lo);
        CHECK(ci.lo <= ci.center);
        CHECK(ci.center <= ci.hi);
        CHECK(ci.hi <= 1.0);
        // r_n = 0.5 sqrt(n) for the piecewise tail
        CHECK(ci.variance == doctest::Approx(std::max(v_hat(s, a), 1e-6) / (0.5 * std::sqrt(1000.0))).epsilon(1e-12));
    }
}

TEST_CASE("credible region") {
    const auto s = at_step(EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::polynomial(1.0, 1.0),
                                                   DiscreteMixing({-1.0, 0.5, 2.0}, {0.2, 0.5, 0.3})),
                           50);
    const ThetaSet a = ThetaSet::at_most(0.0);

    SUBCASE("one set reduces to an interval with variance V + eps") {
        const std::vector<ThetaSet> sets{a};
        const auto region = credible_region(s, sets);
        const double half = kZ975 * std::sqrt((v_hat(s, a) + 1e-6) / 50.0);
        const double c = region.center(0);
        CHECK(c == measure_of(s.current, a).value);
        CHECK(region.contains(Eigen::VectorXd::Constant(1, c + half * (1.0 - 1e-9))));
        CHECK_FALSE(region.contains(Eigen::VectorXd::Constant(1, c + half * (1.0 + 1e-9))));
        CHECK(region.contains(Eigen::VectorXd::Constant(1, c - half * (1.0 - 1e-9))));
    }

    SUBCASE("center is a member") {
        const std::vector<ThetaSet> sets{a, ThetaSet::at_most(1.0), ThetaSet::above(-0.5)};
        const auto region = credible_region(s, sets, 0.9);
        CHECK(region.mahalanobis2(region.center) == 0.0);
        CHECK(region.contains(region.center));
        CHECK(region.radius2 == doctest::Approx(stats::chi_squared_quantile(0.9, 3.0) / 50.0).epsilon(1e-14));
    }

    SUBCASE("shape matrix scales like 1/eps") {
        const std::vector<ThetaSet> sets{a, ThetaSet::at_most(1.0)};
        const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov_hat(s, sets)).eigenvalues().maxCoeff();
        for (double eps : {1.0, 10.0, 100.0}) {
            const auto region = credible_region(s, sets, 0.95, eps);
            const auto ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(region.shape).eigenvalues();
            CHECK(eps * ev.maxCoeff() <= 1.0 + 1e-12);
            CHECK(eps * ev.minCoeff() >= 1.0 / (1.0 + top / eps) - 1e-12);
        }
    }
}

TEST_CASE("marginal approximation") {
    const auto base = EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::polynomial(1.0, 1.0),
                                              DiscreteMixing({0.0, 1.0}, {0.5, 0.5}));
    const ThetaSet a = ThetaSet::point(1.0);
    const auto approx = marginal_posterior_approx(at_step(base, 10), a);
    CHECK(approx.mean == measure_of(base.current, a).value);
    double last = approx.variance;
    for (std::size_t n : {100u, 1000u, 100000u}) {
        const double v = marginal_posterior_approx(at_step(base, n), a).variance;
        CHECK(v < last);
        last = v;
    }
    CHECK(last < 1e-5);
}

TEST_CASE("replica spread of G_N(0) has the order of the approximation") {
    const auto s0 = EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::polynomial(5.0, 1.0),
                                            normal_grid(1.0, 3.0, 401));
    const auto prefix = simulate_cid(s0, 1000, 12).final_state;
    const ThetaSet a = ThetaSet::at_most(0.0);
    const double predicted = std::sqrt(marginal_posterior_approx(prefix, a).variance);
    std::vector<double> finals(200);
    for (std::size_t r = 0; r < finals.size(); ++r) {
        finals[r] = measure_of(simulate_cid(prefix, 3000, 900 + r).final_state.current, a).value;
    }
    const double spread = std::sqrt(stats::sample_variance(finals));
    CHECK(spread < 5.0 * predicted);
    CHECK(predicted < 5.0 * spread);
}

TEST_CASE("v_hat settles along long trajectories") {
    // the gaps shrink like n^(-1/2) in expectation; single paths are noisy,
    // so the ordering is checked on the average over independent paths
    const auto s0 = EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::polynomial(1.0, 1.0),
                                            normal_grid(1.0, 3.0, 401));
    const std::vector<std::size_t> steps{200, 400, 800, 1600};
    const ThetaSet a = ThetaSet::at_most(1.0);
    std::vector<double> gaps(3, 0.0);
    const int paths = 16;
    for (int p = 0; p < paths; ++p) {
        const auto t = simulate_cid(s0, 1600, 300 + p, steps);
        std::vector<double> v;
        for (const auto& snap : t.snapshots) {
            v.push_back(v_hat(EstimatorState{s0.kernel, s0.schedule, snap.step, snap.measure}, a));
        }
        REQUIRE(v.size() == 4);
        for (std::size_t i = 0; i < 3; ++i) {
            const double gap = std::abs(v[i + 1] - v[i]);
            gaps[i] += gap / paths;
            if (i == 2) CHECK(gap < 0.02);
        }
    }
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[2] < gaps[1]);
}
