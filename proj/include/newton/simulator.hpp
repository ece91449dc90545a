#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "newton/recursion.hpp"

namespace newton {

struct Snapshot {
    std::size_t step;
    MixingMeasure measure;
};

/// A draw from the conditionally identically distributed model driven by
/// the recursion: theta_{k+1} | x_{1:k} ~ G_k, x_{k+1} | theta_{k+1} ~ f.
struct CidTrajectory {
    std::vector<double> xs;
    std::vector<double> thetas;
    std::uint64_t seed = 0;
    std::vector<Snapshot> snapshots;
    EstimatorState final_state;
};

/// Simulates `n` further steps from `start` (usually an initial state at
/// n = 0). theta_{k+1} is drawn from the current estimate independently of
/// the earlier thetas given the data. Snapshots are kept at the requested
/// absolute step counts.
CidTrajectory simulate_cid(const EstimatorState& start, std::size_t n, std::uint64_t seed,
                           std::span<const std::size_t> snapshot_steps = {});
CidTrajectory simulate_cid(const MixingMeasure& g0, const Kernel& kernel, const WeightSchedule& schedule,
                           std::size_t n, std::uint64_t seed, std::span<const std::size_t> snapshot_steps = {});

/// i.i.d. draws x ~ int f(.|t) dG(t) from a fixed mixing measure.
std::vector<double> simulate_iid_mixture(const MixingMeasure& truth, const Kernel& kernel, std::size_t n, Rng& rng);

/// Uniform random permutation.
std::vector<double> permute(std::span<const double> xs, Rng& rng);

/// Average of the final estimates over `replicates` random orderings of xs,
/// renormalized. Orderings are seeded from `seed`.
MixingMeasure permutation_averaged_fit(std::span<const double> xs, const EstimatorState& initial,
                                       std::size_t replicates, std::uint64_t seed);

/// Seed of the r-th ordering used by permutation_averaged_fit.
std::uint64_t permutation_seed(std::uint64_t seed, std::size_t r);

}  // namespace newton
