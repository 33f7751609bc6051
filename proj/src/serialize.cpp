#include "wrangle/serialize.hpp"

namespace wrangle {

namespace {

const std::optional<std::string>& value_or_throw(const Entry& entry, const std::string& attribute) {
    const auto* value = entry.find(attribute);
    if (value == nullptr) {
        throw ConfigError("serialize: entry has no attribute '" + attribute + "'");
    }
    return *value;
}

} // namespace

std::string serialize_entry(const Entry& entry, const SerializationOptions& opts) {
    std::string out;
    bool first = true;
    auto append = [&](const std::string& attr, const std::optional<std::string>& value) {
        if (!first) out += opts.pair_separator;
        first = false;
        if (opts.include_attribute_names) {
            out += attr;
            out += opts.kv_separator;
        }
        out += value ? *value : opts.null_token;
    };

    if (opts.attribute_subset) {
        for (const auto& attr : *opts.attribute_subset) {
            append(attr, value_or_throw(entry, attr));
        }
    } else {
        for (const auto& [attr, value] : entry.values) {
            append(attr, value);
        }
    }
    return out;
}

Entry select_attributes(const Entry& entry, const std::vector<std::string>& subset) {
    Entry out;
    out.id = entry.id;
    out.values.reserve(subset.size());
    for (const auto& attr : subset) {
        out.values.emplace_back(attr, value_or_throw(entry, attr));
    }
    return out;
}

} // namespace wrangle
