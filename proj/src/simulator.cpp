#include "newton/simulator.hpp"

#include <algorithm>

#include "newton/error.hpp"
#include "newton/parallel.hpp"
#include "newton/stats.hpp"

namespace newton {

CidTrajectory simulate_cid(const EstimatorState& start, std::size_t n, std::uint64_t seed,
                           std::span<const std::size_t> snapshot_steps) {
    if (n == 0) throw ValidationError("simulate_cid needs n >= 1");
    Rng rng(seed);
    CidTrajectory traj{{}, {}, seed, {}, start};
    traj.xs.reserve(n);
    traj.thetas.reserve(n);
    auto& state = traj.final_state;
    auto wants_snapshot = [&](std::size_t step) {
        return std::find(snapshot_steps.begin(), snapshot_steps.end(), step) != snapshot_steps.end();
    };
    if (wants_snapshot(state.n)) traj.snapshots.push_back({state.n, state.current});
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = sample(state.current, rng);
        const double x = state.kernel.sample(theta, rng);
        traj.thetas.push_back(theta);
        traj.xs.push_back(x);
        state = update(state, x);
        if (wants_snapshot(state.n)) traj.snapshots.push_back({state.n, state.current});
    }
    return traj;
}

CidTrajectory simulate_cid(const MixingMeasure& g0, const Kernel& kernel, const WeightSchedule& schedule,
                           std::size_t n, std::uint64_t seed, std::span<const std::size_t> snapshot_steps) {
    return simulate_cid(EstimatorState::initial(kernel, schedule, g0), n, seed, snapshot_steps);
}

std::vector<double> simulate_iid_mixture(const MixingMeasure& truth, const Kernel& kernel, std::size_t n, Rng& rng) {
    std::vector<double> xs;
    xs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) xs.push_back(kernel.sample(sample(truth, rng), rng));
    return xs;
}

std::vector<double> permute(std::span<const double> xs, Rng& rng) {
    std::vector<double> out(xs.begin(), xs.end());
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

std::uint64_t permutation_seed(std::uint64_t seed, std::size_t r) { return stats::derive_seed(seed, 0x9e37, r); }

MixingMeasure permutation_averaged_fit(std::span<const double> xs, const EstimatorState& initial,
                                       std::size_t replicates, std::uint64_t seed) {
    if (replicates == 0) throw ValidationError("permutation_averaged_fit needs at least one replicate");
    const std::size_t m = values(initial.current).size();
    std::vector<std::vector<double>> finals(replicates);
    parallel_for(replicates, [&](std::size_t r) {
        Rng rng(permutation_seed(seed, r));
        const auto order = permute(xs, rng);
        const auto state = fit(initial, order);
        const auto v = values(state.current);
        finals[r].assign(v.begin(), v.end());
    });

    // fixed replicate order keeps the average independent of scheduling
    std::vector<double> avg(m, 0.0);
    std::vector<double> column(replicates);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t r = 0; r < replicates; ++r) column[r] = finals[r][j];
        avg[j] = stats::compensated_mean(column);
    }
    return with_values(initial.current, std::move(avg));
}

}  // namespace newton
