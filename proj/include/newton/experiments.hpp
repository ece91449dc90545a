#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "newton/recursion.hpp"
#include "newton/simulator.hpp"

namespace newton {

/// Resolved settings of one experiment run. `defaults_for` fills in the
/// study's reference values; callers override individual fields.
struct ExperimentConfig {
    std::string id;  ///< fig1 | fig2 | fig3 | classifier | custom
    std::string kernel;
    std::string g0;
    std::vector<std::string> schedules;
    std::size_t n = 0;
    std::size_t replicas = 0;
    std::uint64_t seed = 42;
    std::string out_dir = ".";
    std::vector<std::string> sets;
    std::size_t grid_m = 1001;
    double level = 0.95;
    double epsilon = 1e-6;

    // fig1
    std::vector<double> sigma2;
    std::size_t proxy_n = 1000;
    std::size_t density_replicas = 5;

    // fig2 / fig3
    std::vector<std::size_t> snapshots;
    std::size_t orderings = 3;
    std::vector<double> t_grid;

    // classifier
    std::vector<double> atoms;
    std::vector<double> true_weights;
};

ExperimentConfig defaults_for(std::string_view id);

/// Throws ValidationError on inconsistent settings. Called by every runner
/// before any computation.
void validate(const ExperimentConfig& config);

struct Table {
    std::string name;  ///< file name inside the output directory
    std::string csv;
};

// ---------------------------------------------------------------- fig1

struct Fig1Arm {
    double sigma2;
    std::vector<std::uint64_t> seeds;
    std::vector<double> g_at_zero;  ///< G_N(0) per replica
    std::vector<std::size_t> modes;  ///< local maxima of g_N per replica
    std::vector<GridDensity> densities;  ///< first density_replicas finals
    double ks_distance;
    double ks_pvalue;
};

struct Fig1Result {
    double g0_at_zero;
    double beta_a;
    double beta_b;
    std::vector<Fig1Arm> arms;
};

Fig1Result run_fig1(const ExperimentConfig& config);
std::vector<Table> fig1_tables(const Fig1Result& result);

// ---------------------------------------------------------------- fig2

struct Fig2Cell {
    std::string schedule;
    std::size_t ordering;  ///< 0 = original sample
    std::vector<Snapshot> snapshots;
    GridDensity final_density;
    double l1_to_truth;
};

struct Fig2Result {
    std::vector<double> data;
    GridDensity truth;
    std::vector<Fig2Cell> cells;  ///< schedule-major
    std::vector<std::string> schedules;
    std::vector<double> sensitivity;  ///< max pairwise L1 across orderings, per schedule
    std::vector<double> mean_l1_to_truth;  ///< per schedule
    std::vector<std::uint64_t> seeds;  ///< data seed, then one per permutation
};

/// n draws from 0.3 N(-1, 2) + 0.7 N(3, 1.5) under the given seed.
std::vector<double> fig2_data(std::size_t n, std::uint64_t seed);
/// Mixing density 0.3 N(-1, 2) + 0.7 N(3, 1.5) on the layout of `like`.
GridDensity fig2_truth(const GridDensity& like);
double fig2_true_cdf(double t);

Fig2Result run_fig2(const ExperimentConfig& config);
std::vector<Table> fig2_tables(const Fig2Result& result);

// ---------------------------------------------------------------- fig3

struct Fig3Row {
    std::string schedule;
    double t;
    double g_n;
    double lo;
    double hi;
    double true_g;
};

struct Fig3Result {
    std::vector<std::string> schedules;
    std::vector<Fig3Row> rows;  ///< schedule-major, t ascending
    std::uint64_t data_seed;
};

Fig3Result run_fig3(const ExperimentConfig& config);
std::vector<Table> fig3_tables(const Fig3Result& result);

// ---------------------------------------------------------------- classifier

struct ClassifierStep {
    std::size_t step;
    double x;
    std::size_t truth;
    std::vector<double> probabilities;
    std::size_t predicted;
    double running_accuracy;
};

struct ClassifierResult {
    std::vector<ClassifierStep> steps;
    std::vector<double> final_weights;
    double accuracy;
    std::uint64_t seed;
};

/// Streams n labelled draws from the atoms with the true weights, predicts
/// each label from the current weights before updating on the point.
ClassifierResult run_classifier(const ExperimentConfig& config);
std::vector<Table> classifier_tables(const ClassifierResult& result);

// ---------------------------------------------------------------- custom

struct CustomResult {
    std::vector<std::uint64_t> seeds;
    std::vector<std::vector<double>> set_mass;  ///< per replica, per set: G_n(A)
};

/// c.i.d. replicas of length n from the configured kernel, g0 and schedule;
/// reports G_n(A) of every query set.
CustomResult run_custom(const ExperimentConfig& config);
std::vector<Table> custom_tables(const ExperimentConfig& config, const CustomResult& result);

// ---------------------------------------------------------------- driver

/// Version string baked in at build time (git describe).
std::string_view build_version() noexcept;

/// JSON manifest: the full config, build version, wall clock and seeds.
std::string manifest_json(const ExperimentConfig& config, double wall_clock_ms,
                          const std::vector<std::uint64_t>& seeds);

/// Validates, runs the configured experiment, writes its tables and
/// manifest.json into out_dir (created if needed). Returns the table names.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

}  // namespace newton
