#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "newton/error.hpp"
#include "newton/stats.hpp"
#include "test_support.hpp"

using namespace newton;

TEST_CASE("quantiles") {
    CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(stats::normal_cdf(stats::normal_quantile(0.3)) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(stats::chi_squared_quantile(0.95, 1.0) == doctest::Approx(1.959963984540054 * 1.959963984540054));
    CHECK(stats::chi_squared_quantile(0.95, 2.0) == doctest::Approx(-2.0 * std::log(0.05)).epsilon(1e-13));
    CHECK(stats::beta_cdf(0.3, 1.0, 1.0) == doctest::Approx(0.3));
    CHECK(stats::beta_cdf(stats::beta_quantile(0.8, 1.4, 3.6), 1.4, 3.6) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(stats::beta_cdf(-1.0, 2.0, 2.0) == 0.0);
    CHECK_THROWS_AS(stats::normal_quantile(1.0), ValidationError);
}

TEST_CASE("Kolmogorov-Smirnov") {
    // asymptotic 5% point of the Kolmogorov distribution is 1.3581
    const double n = 1e6;
    const double d = 1.3581 / (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
    CHECK(stats::ks_pvalue(d, 1000000) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(stats::ks_pvalue(0.0, 10) == 1.0);

    CHECK(stats::ks_statistic({0.5}, [](double x) { return x; }) == 0.5);
    CHECK(stats::ks_statistic({0.25, 0.75}, [](double x) { return x; }) == 0.25);

    testing::Gen gen(1);
    std::vector<double> xs(2000);
    for (auto& x : xs) x = gen.normal();
    const auto cdf = [](double x) { return testing::phi(x); };
    CHECK(stats::ks_pvalue(stats::ks_statistic(xs, cdf), xs.size()) > 0.001);
    for (auto& x : xs) x += 0.3;
    CHECK(stats::ks_pvalue(stats::ks_statistic(xs, cdf), xs.size()) < 1e-6);
}

TEST_CASE("Anderson-Darling") {
    CHECK(stats::anderson_darling_pvalue(2.492) == doctest::Approx(0.05).epsilon(0.02));
    CHECK(stats::anderson_darling_pvalue(3.857) == doctest::Approx(0.01).epsilon(0.03));
    CHECK(stats::anderson_darling_pvalue(0.0) == 1.0);

    testing::Gen gen(2);
    std::vector<double> xs(500);
    for (auto& x : xs) x = gen.normal();
    const auto cdf = [](double x) { return testing::phi(x); };
    CHECK(stats::anderson_darling_pvalue(stats::anderson_darling_statistic(xs, cdf)) > 0.001);
    for (auto& x : xs) x *= 1.5;
    CHECK(stats::anderson_darling_pvalue(stats::anderson_darling_statistic(xs, cdf)) < 0.001);
}

TEST_CASE("local maxima") {
    const std::vector<double> two{0, 1, 0.5, 2, 0};
    CHECK(stats::count_local_maxima(two) == 2);
    const std::vector<double> plateau{0, 1, 1, 1, 0};
    CHECK(stats::count_local_maxima(plateau) == 1);
    const std::vector<double> ramp{0, 1, 2, 3};
    CHECK(stats::count_local_maxima(ramp) == 0);
    // a bump below 1% of the peak is noise
    const std::vector<double> tiny{0, 0.005, 0, 1, 0};
    CHECK(stats::count_local_maxima(tiny) == 1);
    CHECK(stats::count_local_maxima(tiny, 0.0) == 2);
}

TEST_CASE("compensated sums") {
    std::vector<double> v{1e16, 1.0, -1e16};
    CHECK(stats::compensated_sum(v) == 1.0);
    const std::vector<double> many(1000000, 0.1);
    CHECK(stats::compensated_sum(many) == doctest::Approx(100000.0).epsilon(1e-15));
    CHECK(stats::compensated_mean({}) == 0.0);
    const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
    CHECK(stats::sample_variance(s) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("derived seeds") {
    CHECK(stats::derive_seed(42, 1, 0) == stats::derive_seed(42, 1, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t stream = 0; stream < 10; ++stream) {
        for (std::uint64_t r = 0; r < 100; ++r) seen.insert(stats::derive_seed(42, stream, r));
    }
    seen.insert(stats::derive_seed(43, 0, 0));
    CHECK(seen.size() == 1001);
}
