#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wrangle/tasks.hpp"

namespace wrangle {

// A solved task example shown to the model. Binary kinds answer exactly
// "Yes" or "No"; value kinds answer the value text.
struct Demonstration {
    TaskInstance instance;
    std::string answer_text;
};

struct RandomSelection {
    std::uint64_t seed = 0;
};

struct ManualSelection {
    std::filesystem::path path;
};

using SelectionStrategy = std::variant<RandomSelection, ManualSelection>;

struct PromptSpec {
    TaskKind kind = TaskKind::entity_matching;
    TemplateSet template_set;
    std::size_t k = 0;
    SelectionStrategy selection = RandomSelection{};
    std::optional<std::string> preamble;
    SerializationOptions serialization;
    std::string fingerprint; // provenance carried into Prompt meta
};

struct Prompt {
    std::string text;
    struct Meta {
        std::string spec_fingerprint;
        std::vector<std::string> demonstration_ids;
        std::string target_id;
    } meta;
};

// Seeded sample without replacement; the returned order is the sampled
// order and is fixed by the seed.
std::vector<Demonstration> select_random(const std::vector<Demonstration>& pool, std::size_t k,
                                         std::uint64_t seed);

// JSON array of demonstration records, file order preserved (ordering is
// significant). See the manual-demonstration schema in the README.
std::vector<Demonstration> load_manual(const std::filesystem::path& path, TaskKind kind);

// Layout: optional preamble + blank line, each demonstration as question,
// newline, answer, blank line, then the target question. Transformation
// demos put the answer on the Output: line itself.
Prompt assemble(const PromptSpec& spec, const std::vector<Demonstration>& demos,
                const TaskInstance& target);

// The spec's k demonstrations: the first k records of the manual file, or
// a seeded draw from the pool.
std::vector<Demonstration> resolve_demonstrations(const PromptSpec& spec,
                                                  const std::vector<Demonstration>& pool);

} // namespace wrangle
