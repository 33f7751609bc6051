#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace wrangle {

std::string to_lower(std::string_view s);

std::string trim(std::string_view s);

// Collapses every internal run of whitespace to a single space.
std::string collapse_whitespace(std::string_view s);

// lowercase + trim + collapse; the comparison rule for value answers.
std::string normalize_value(std::string_view s);

// Maximal alphanumeric runs, lowercased. "11.0" splits into {"11", "0"}.
std::vector<std::string> tokenize(std::string_view s);

std::set<std::string> token_set(std::string_view s);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Case-insensitive Levenshtein distance; used for "did you mean" hints.
std::size_t edit_distance(std::string_view a, std::string_view b);

} // namespace wrangle
