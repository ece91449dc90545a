#include "newton/io.hpp"

#include <charconv>
#include <filesystem>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "newton/error.hpp"
#include "newton/spec_string.hpp"

namespace newton {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    return out;
}

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw Error("format_double: conversion failed");
    return std::string(buf, ptr);
}

std::string measure_to_csv(const MixingMeasure& mix) {
    std::string out = std::holds_alternative<GridDensity>(mix) ? "theta,density\n" : "atom,weight\n";
    const auto pts = support(mix);
    const auto vals = values(mix);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        out += format_double(pts[j]);
        out += ',';
        out += format_double(vals[j]);
        out += '\n';
    }
    return out;
}

void write_measure_csv(const std::string& path, const MixingMeasure& mix) { write_text_file(path, measure_to_csv(mix)); }

MixingMeasure measure_from_csv(const std::string& text, const std::string& source) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw IoError(source + ": empty measure file");
    line = strip_cr(line);
    bool grid;
    if (line == "theta,density") {
        grid = true;
    } else if (line == "atom,weight") {
        grid = false;
    } else {
        throw IoError(source + ": expected header 'theta,density' or 'atom,weight', got '" + line + "'");
    }
    std::vector<double> pts;
    std::vector<double> vals;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        line = strip_cr(line);
        if (is_blank(line)) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 2) throw IoError(source + ": row " + std::to_string(row) + " needs two columns");
        try {
            pts.push_back(parse_double(fields[0], "support point"));
            vals.push_back(parse_double(fields[1], "value"));
        } catch (const ValidationError& e) {
            throw IoError(source + ": row " + std::to_string(row) + ": " + e.what());
        }
    }
    if (!grid) return DiscreteMixing(std::move(pts), std::move(vals));

    if (pts.size() < 2) throw IoError(source + ": a grid needs at least two rows");
    auto layout = std::make_shared<const GridLayout>(pts.front(), pts.back(), pts.size());
    const double tol = 1e-9 * (pts.back() - pts.front());
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (std::abs(pts[j] - layout->nodes[j]) > tol) {
            throw IoError(source + ": grid nodes are not equally spaced (row " + std::to_string(j + 2) + ")");
        }
    }
    return GridDensity(std::move(layout), std::move(vals));
}

MixingMeasure read_measure_csv(const std::string& path) { return measure_from_csv(read_text_file(path), path); }

std::vector<double> observations_from_text(const std::string& text, const std::string& source) {
    std::istringstream is(text);
    std::string line;
    std::vector<double> xs;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        line = strip_cr(line);
        if (is_blank(line)) continue;
        const auto fields = split_fields(line);
        try {
            xs.push_back(parse_double(fields.front(), "observation"));
        } catch (const ValidationError& e) {
            if (row == 1) continue;  // header
            throw IoError(source + ": line " + std::to_string(row) + ": " + e.what());
        }
    }
    return xs;
}

std::vector<double> read_observations(const std::string& path) {
    return observations_from_text(read_text_file(path), path);
}

std::string fit_sidecar_json(const FitSidecar& sidecar) {
    nlohmann::ordered_json j;
    j["n"] = sidecar.n;
    j["schedule"] = sidecar.schedule;
    j["kernel"] = sidecar.kernel;
    j["elapsed_ms"] = sidecar.elapsed_ms;
    return j.dump(2) + "\n";
}

FitSidecar fit_sidecar_from_json(const std::string& text, const std::string& source) {
    try {
        const auto j = nlohmann::json::parse(text);
        return {j.at("n").get<std::size_t>(), j.at("schedule").get<std::string>(), j.at("kernel").get<std::string>(),
                j.value("elapsed_ms", 0.0)};
    } catch (const nlohmann::json::exception& e) {
        throw IoError(source + ": malformed sidecar: " + e.what());
    }
}

std::string sidecar_path(const std::string& measure_path) {
    return std::filesystem::path(measure_path).replace_extension(".json").string();
}

std::string posterior_summary_json(const PosteriorSummary& s) {
    nlohmann::ordered_json j;
    j["n"] = s.n;
    auto& sets = j["sets"] = nlohmann::ordered_json::array();
    for (const auto& a : s.sets) sets.push_back(a.to_string());
    j["point"] = s.point;
    std::vector<double> vhat;
    for (Eigen::Index r = 0; r < s.vhat.rows(); ++r) {
        for (Eigen::Index c = 0; c < s.vhat.cols(); ++c) vhat.push_back(s.vhat(r, c));
    }
    j["vhat"] = vhat;
    j["rate"] = s.rate;
    j["level"] = s.level;
    j["epsilon"] = s.epsilon;
    auto& intervals = j["intervals"] = nlohmann::ordered_json::array();
    for (const auto& ci : s.intervals) {
        intervals.push_back({{"center", ci.center}, {"lo", ci.lo}, {"hi", ci.hi}, {"variance", ci.variance}});
    }
    std::vector<double> center(s.region.center.data(), s.region.center.data() + s.region.center.size());
    std::vector<double> shape;
    for (Eigen::Index r = 0; r < s.region.shape.rows(); ++r) {
        for (Eigen::Index c = 0; c < s.region.shape.cols(); ++c) shape.push_back(s.region.shape(r, c));
    }
    j["region"] = {{"center", center}, {"shape", shape}, {"radius2", s.region.radius2}};
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace newton
