#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wrangle/table.hpp"

namespace wrangle {

struct SerializationOptions {
    // When set, restricts and reorders the serialized attributes.
    std::optional<std::vector<std::string>> attribute_subset;
    std::string pair_separator = ". ";
    std::string kv_separator = ": ";
    // What a NULL value renders as. Empty by default; "NULL" reproduces
    // the literal-token style seen in some published prompts.
    std::string null_token;
    // When false, values are emitted bare with no attribute names.
    bool include_attribute_names = true;
};

// attr<kv>val pairs joined by the pair separator, no trailing separator.
// NULL values render as the null token after the kv separator.
std::string serialize_entry(const Entry& entry, const SerializationOptions& opts);

// Projection onto `subset`, reordered to subset order. The input entry is
// untouched; unknown names raise a configuration error.
Entry select_attributes(const Entry& entry, const std::vector<std::string>& subset);

} // namespace wrangle
