#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wrangle/backend.hpp"
#include "wrangle/prompts.hpp"
#include "wrangle/serialize.hpp"
#include "wrangle/table.hpp"
#include "wrangle/tasks.hpp"

namespace wrangle {

struct DatasetConfig {
    std::string name;
    // entity/schema matching
    std::filesystem::path left_table;
    std::filesystem::path right_table;
    std::filesystem::path pairs;
    // error detection / imputation
    std::filesystem::path table;
    std::filesystem::path labels;
    std::string target_attribute;
    // transformation
    std::filesystem::path examples;
};

// One experiment: dataset, serialization, template, prompt spec, backend
// and decoding knobs, sampling, splits, outputs. Input paths resolve
// relative to the config file; output paths relative to the working
// directory. Unknown keys are rejected.
struct ExperimentConfig {
    TaskKind task = TaskKind::entity_matching;
    DatasetConfig dataset;
    SerializationOptions serialization;

    std::string template_variant = "default";
    std::string entity_noun = "Product";
    std::vector<TemplateSet> custom_templates;

    std::size_t k = 0;
    SelectionStrategy selection = RandomSelection{0};
    std::optional<std::string> preamble;

    BackendConfig backend;
    CompletionRequest request_template; // model + decoding params, prompt empty

    std::optional<std::size_t> sample_cap;
    std::uint64_t sample_seed = 0;

    SplitSpec split;
    std::string eval_split = "test"; // train | valid | test | all
    bool normalize_values = true;

    std::filesystem::path report_path = "out/report.json";
    std::filesystem::path cache_dir = "out/cache";

    // Resolves the configured variant against custom templates first,
    // then the built-ins.
    TemplateSet resolve_template() const;

    PromptSpec prompt_spec() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

// Stable digest over the canonical serialization, excluding output paths.
std::string fingerprint(const ExperimentConfig& config);

// Canonical JSON for the validated field set; load_config(write) round-trips.
std::string write_config(const ExperimentConfig& config);

} // namespace wrangle
