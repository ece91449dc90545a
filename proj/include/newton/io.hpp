#pragma once

#include <string>
#include <vector>

#include "newton/asymptotics.hpp"
#include "newton/mixing_measure.hpp"

namespace newton {

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// `theta,density` (grid) or `atom,weight` (discrete), one row per support
/// point, written with round-trip precision.
std::string measure_to_csv(const MixingMeasure& mix);
void write_measure_csv(const std::string& path, const MixingMeasure& mix);
MixingMeasure read_measure_csv(const std::string& path);
MixingMeasure measure_from_csv(const std::string& text, const std::string& source = "<string>");

/// One observation per line (first field of each line); an optional
/// non-numeric header line is skipped.
std::vector<double> read_observations(const std::string& path);
std::vector<double> observations_from_text(const std::string& text, const std::string& source = "<string>");

/// Metadata written next to a fitted measure.
struct FitSidecar {
    std::size_t n = 0;
    std::string schedule;
    std::string kernel;
    double elapsed_ms = 0.0;
};

std::string fit_sidecar_json(const FitSidecar& sidecar);
FitSidecar fit_sidecar_from_json(const std::string& text, const std::string& source = "<string>");
/// `dir/stem.csv` -> `dir/stem.json`
std::string sidecar_path(const std::string& measure_path);

/// {n, sets, point, vhat (row-major), rate, level, epsilon, intervals,
///  region {center, shape (row-major), radius2}}
std::string posterior_summary_json(const PosteriorSummary& summary);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace newton
