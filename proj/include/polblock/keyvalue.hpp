#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Flat "key = value" text with optional [section] headers. '#' and ';'
// start comments.
namespace polblock::keyvalue {

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line{0};
};

std::vector<Entry> parse(std::istream& in, const std::string& source, bool allow_sections);

// Strict numeric conversion; the whole value must be consumed.
double to_double(const Entry& entry, const std::string& module);
int to_int(const Entry& entry, const std::string& module);
std::vector<double> to_double_list(const Entry& entry, const std::string& module);

std::size_t edit_distance(std::string_view a, std::string_view b);

// Closest candidate by edit distance, or empty when nothing is close.
std::string suggest(std::string_view key, std::span<const std::string_view> candidates);

} // namespace polblock::keyvalue
