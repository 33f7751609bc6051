#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wrangle/errors.hpp"
#include "wrangle/rng.hpp"

namespace wrangle {

// One row: ordered attribute/value pairs. An empty CSV cell loads as an
// empty optional (NULL), never as the empty string.
struct Entry {
    std::string id;
    std::vector<std::pair<std::string, std::optional<std::string>>> values;

    const std::optional<std::string>* find(std::string_view attribute) const;
    bool has(std::string_view attribute) const { return find(attribute) != nullptr; }
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<Entry> rows;

    const Entry* find_row(std::string_view id) const;
    const Entry& row_or_throw(std::string_view id) const;
};

enum class MatchLabel : bool { non_match = false, match = true };

struct LabeledPair {
    std::string left_id;
    std::string right_id;
    MatchLabel label;
};

struct CellLabel {
    std::string entry_id;
    std::string attribute;
    bool is_error;
};

struct ImputationExample {
    std::string entry_id;
    std::string target_attribute;
    std::string gold_value;
};

struct SplitSpec {
    double train_frac = 0.8;
    double valid_frac = 0.1;
    double test_frac = 0.1;
    std::uint64_t seed = 0;

    // Fractions must be nonnegative and sum to 1 within 1e-9.
    void validate() const;
};

template <typename T>
struct Splits {
    std::vector<T> train;
    std::vector<T> valid;
    std::vector<T> test;
};

// Header row required. Row id comes from an `id` column when present,
// otherwise the 0-based row index rendered in decimal.
Table load_table(const std::filesystem::path& path, const std::string& name);

// NULL values round-trip to empty cells.
void write_table(const std::filesystem::path& path, const Table& table);

// Magellan pair-file convention: columns ltable_id, rtable_id, label with
// label in {0,1}; 1 means match. File order preserved.
std::vector<LabeledPair> load_pairs(const std::filesystem::path& path);

// Columns entry_id, attribute, label with label in {0,1}; 1 means error.
std::vector<CellLabel> load_cell_labels(const std::filesystem::path& path);

// One example per row whose target value is present; the stored value is
// the gold and is masked at prompt time.
std::vector<ImputationExample> make_imputation_examples(const Table& table,
                                                        const std::string& target_attribute);

// Seeded shuffle, then contiguous slices sized floor(frac * n) with the
// remainder assigned to train.
template <typename T>
Splits<T> make_splits(const std::vector<T>& items, const SplitSpec& spec) {
    spec.validate();
    const auto shuffled_items = shuffled(items, spec.seed);
    const std::size_t n = shuffled_items.size();
    const auto n_valid = static_cast<std::size_t>(std::floor(spec.valid_frac * static_cast<double>(n)));
    const auto n_test = static_cast<std::size_t>(std::floor(spec.test_frac * static_cast<double>(n)));
    const std::size_t n_train = n - n_valid - n_test;

    Splits<T> splits;
    splits.train.assign(shuffled_items.begin(), shuffled_items.begin() + n_train);
    splits.valid.assign(shuffled_items.begin() + n_train, shuffled_items.begin() + n_train + n_valid);
    splits.test.assign(shuffled_items.begin() + n_train + n_valid, shuffled_items.end());
    return splits;
}

// Uniform seeded sample without replacement once |items| exceeds the cap;
// the original relative order is preserved either way.
template <typename T>
std::vector<T> sample_cap(const std::vector<T>& items, std::size_t cap, std::uint64_t seed) {
    if (items.size() <= cap) return items;
    auto picked = sample_indices(items.size(), cap, seed);
    std::sort(picked.begin(), picked.end());
    std::vector<T> out;
    out.reserve(cap);
    for (std::size_t index : picked) out.push_back(items[index]);
    return out;
}

} // namespace wrangle
