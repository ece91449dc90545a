#include "newton/spec_string.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "newton/error.hpp"

namespace newton {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

double parse_double(std::string_view text, std::string_view what) {
    const auto s = trim(text);
    if (s == "inf" || s == "+inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    double value = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (s.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw ValidationError("invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
    const auto s = trim(text);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ValidationError("invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

SpecString SpecString::parse(std::string_view text) {
    SpecString out;
    const auto colon = text.find(':');
    out.family = std::string(trim(text.substr(0, colon)));
    std::transform(out.family.begin(), out.family.end(), out.family.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (out.family.empty()) throw ValidationError("empty spec string");
    if (colon == std::string_view::npos) return out;

    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("expected key=value in spec '" + std::string(text) + "', got '" +
                                  std::string(item) + "'");
        }
        auto key = std::string(trim(item.substr(0, eq)));
        if (!out.params.emplace(key, std::string(trim(item.substr(eq + 1)))).second) {
            throw ValidationError("duplicate key '" + key + "' in spec '" + std::string(text) + "'");
        }
    }
    return out;
}

double SpecString::number(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw ValidationError(family + ": missing parameter '" + key + "'");
    return parse_double(it->second, family + "." + key);
}

double SpecString::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

const std::string& SpecString::text(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw ValidationError(family + ": missing parameter '" + key + "'");
    return it->second;
}

void SpecString::expect_only(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, value] : params) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ValidationError(family + ": unknown parameter '" + key + "'");
        }
    }
}

}  // namespace newton
