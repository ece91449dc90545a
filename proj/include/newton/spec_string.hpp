#pragma once

#include <map>
#include <string>
#include <string_view>

namespace newton {

/// A parsed `family:key=value,key=value` string as used by the CLI for
/// kernels, prior guesses and weight schedules.
struct SpecString {
    std::string family;
    std::map<std::string, std::string> params;

    static SpecString parse(std::string_view text);

    bool has(const std::string& key) const { return params.count(key) != 0; }
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    const std::string& text(const std::string& key) const;

    /// Throws ValidationError naming the first key not in `allowed`.
    void expect_only(std::initializer_list<std::string_view> allowed) const;
};

double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

}  // namespace newton
