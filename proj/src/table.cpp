#include "wrangle/table.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "wrangle/csv.hpp"

namespace wrangle {

const std::optional<std::string>* Entry::find(std::string_view attribute) const {
    for (const auto& [attr, value] : values) {
        if (attr == attribute) return &value;
    }
    return nullptr;
}

const Entry* Table::find_row(std::string_view id) const {
    for (const auto& row : rows) {
        if (row.id == id) return &row;
    }
    return nullptr;
}

const Entry& Table::row_or_throw(std::string_view id) const {
    const Entry* row = find_row(id);
    if (row == nullptr) {
        throw DataError("table " + name + ": no row with id '" + std::string(id) + "'");
    }
    return *row;
}

void SplitSpec::validate() const {
    if (train_frac < 0.0 || valid_frac < 0.0 || test_frac < 0.0) {
        throw ConfigError("split: fractions must be nonnegative");
    }
    const double sum = train_frac + valid_frac + test_frac;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("split: fractions must sum to 1, got " + std::to_string(sum));
    }
}

Table load_table(const std::filesystem::path& path, const std::string& name) {
    const auto records = load_csv(path);
    if (records.empty()) {
        throw DataError(path.string() + ": missing header row");
    }

    Table table;
    table.name = name;
    table.columns = records[0];

    std::unordered_set<std::string> seen;
    for (const auto& column : table.columns) {
        if (!seen.insert(column).second) {
            throw DataError(path.string() + ": duplicate column '" + column + "' in header");
        }
    }

    std::ptrdiff_t id_column = -1;
    const auto id_it = std::find(table.columns.begin(), table.columns.end(), "id");
    if (id_it != table.columns.end()) {
        id_column = id_it - table.columns.begin();
    }

    std::unordered_set<std::string> row_ids;
    table.rows.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& record = records[r];
        if (record.size() != table.columns.size()) {
            throw DataError(path.string() + ": row " + std::to_string(r + 1) + " has " +
                            std::to_string(record.size()) + " fields, expected " +
                            std::to_string(table.columns.size()));
        }
        Entry entry;
        entry.values.reserve(table.columns.size());
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            std::optional<std::string> value;
            if (!record[c].empty()) value = record[c];
            entry.values.emplace_back(table.columns[c], std::move(value));
        }
        if (id_column >= 0) {
            const auto& cell = record[static_cast<std::size_t>(id_column)];
            if (cell.empty()) {
                throw DataError(path.string() + ": row " + std::to_string(r + 1) + " has empty id");
            }
            entry.id = cell;
        } else {
            entry.id = std::to_string(r - 1);
        }
        if (!row_ids.insert(entry.id).second) {
            throw DataError(path.string() + ": duplicate row id '" + entry.id + "'");
        }
        table.rows.push_back(std::move(entry));
    }
    return table;
}

void write_table(const std::filesystem::path& path, const Table& table) {
    std::vector<CsvRecord> records;
    records.reserve(table.rows.size() + 1);
    records.push_back(table.columns);
    for (const auto& row : table.rows) {
        CsvRecord record;
        record.reserve(row.values.size());
        for (const auto& [attr, value] : row.values) {
            record.push_back(value.value_or(""));
        }
        records.push_back(std::move(record));
    }
    write_csv(path, records);
}

namespace {

std::unordered_map<std::string, std::size_t> column_index(const CsvRecord& header,
                                                          const std::filesystem::path& path,
                                                          const std::vector<std::string>& required) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
    for (const auto& column : required) {
        if (index.find(column) == index.end()) {
            throw DataError(path.string() + ": missing required column '" + column + "'");
        }
    }
    return index;
}

bool parse_binary_label(const std::string& cell, const std::filesystem::path& path, std::size_t row) {
    if (cell == "1") return true;
    if (cell == "0") return false;
    throw DataError(path.string() + ": row " + std::to_string(row) + " has label '" + cell +
                    "', expected 0 or 1");
}

} // namespace

std::vector<LabeledPair> load_pairs(const std::filesystem::path& path) {
    const auto records = load_csv(path);
    if (records.empty()) {
        throw DataError(path.string() + ": missing header row");
    }
    const auto index = column_index(records[0], path, {"ltable_id", "rtable_id", "label"});
    const std::size_t width = records[0].size();

    std::vector<LabeledPair> pairs;
    pairs.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& record = records[r];
        if (record.size() != width) {
            throw DataError(path.string() + ": row " + std::to_string(r + 1) + " has " +
                            std::to_string(record.size()) + " fields, expected " + std::to_string(width));
        }
        LabeledPair pair;
        pair.left_id = record[index.at("ltable_id")];
        pair.right_id = record[index.at("rtable_id")];
        pair.label = parse_binary_label(record[index.at("label")], path, r + 1)
                         ? MatchLabel::match
                         : MatchLabel::non_match;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::vector<CellLabel> load_cell_labels(const std::filesystem::path& path) {
    const auto records = load_csv(path);
    if (records.empty()) {
        throw DataError(path.string() + ": missing header row");
    }
    const auto index = column_index(records[0], path, {"entry_id", "attribute", "label"});
    const std::size_t width = records[0].size();

    std::vector<CellLabel> labels;
    labels.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& record = records[r];
        if (record.size() != width) {
            throw DataError(path.string() + ": row " + std::to_string(r + 1) + " has " +
                            std::to_string(record.size()) + " fields, expected " + std::to_string(width));
        }
        CellLabel label;
        label.entry_id = record[index.at("entry_id")];
        label.attribute = record[index.at("attribute")];
        label.is_error = parse_binary_label(record[index.at("label")], path, r + 1);
        labels.push_back(std::move(label));
    }
    return labels;
}

std::vector<ImputationExample> make_imputation_examples(const Table& table,
                                                        const std::string& target_attribute) {
    if (std::find(table.columns.begin(), table.columns.end(), target_attribute) == table.columns.end()) {
        throw ConfigError("table " + table.name + ": no attribute '" + target_attribute + "'");
    }
    std::vector<ImputationExample> examples;
    for (const auto& row : table.rows) {
        const auto* value = row.find(target_attribute);
        if (value != nullptr && value->has_value()) {
            examples.push_back({row.id, target_attribute, **value});
        }
    }
    return examples;
}

} // namespace wrangle
