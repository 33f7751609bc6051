#include "wrangle/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "wrangle/hash.hpp"
#include "wrangle/textutil.hpp"

namespace wrangle {

namespace {

using json = nlohmann::json; // sorted keys: canonical for fingerprints
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void unknown_key(const std::string& key, const std::string& section,
                              const std::set<std::string>& allowed) {
    std::string message = "config: unknown key '" + key + "'";
    if (!section.empty()) message += " in " + section;
    std::string best;
    std::size_t best_distance = 3;
    for (const auto& candidate : allowed) {
        const std::size_t distance = edit_distance(key, candidate);
        if (distance <= best_distance) {
            best_distance = distance;
            best = candidate;
        }
    }
    if (!best.empty()) message += " (did you mean '" + best + "'?)";
    throw ConfigError(message);
}

void check_keys(const ordered_json& object, const std::string& section,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : object.items()) {
        if (allowed.find(key) == allowed.end()) unknown_key(key, section, allowed);
    }
}

std::filesystem::path resolve_input(const std::filesystem::path& base,
                                    const std::string& value) {
    std::filesystem::path path(value);
    return path.is_absolute() ? path : base / path;
}

void require_file(const std::filesystem::path& path, const std::string& key) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("config: " + key + " does not exist: " + path.string());
    }
}

DatasetConfig parse_dataset(const ordered_json& section, TaskKind task,
                            const std::filesystem::path& base) {
    std::set<std::string> allowed{"name"};
    switch (task) {
        case TaskKind::entity_matching:
        case TaskKind::schema_matching:
            allowed.insert({"left_table", "right_table", "pairs"});
            break;
        case TaskKind::error_detection:
            allowed.insert({"table", "labels"});
            break;
        case TaskKind::data_imputation:
            allowed.insert({"table", "target_attribute"});
            break;
        case TaskKind::data_transformation:
            allowed.insert({"examples"});
            break;
    }
    check_keys(section, "dataset", allowed);

    DatasetConfig dataset;
    dataset.name = section.value("name", std::string("dataset"));
    auto path_field = [&](const char* key) {
        if (!section.contains(key)) {
            throw ConfigError(std::string("config: dataset is missing required key '") + key + "'");
        }
        auto path = resolve_input(base, section[key].get<std::string>());
        require_file(path, std::string("dataset.") + key);
        return path;
    };
    switch (task) {
        case TaskKind::entity_matching:
        case TaskKind::schema_matching:
            dataset.left_table = path_field("left_table");
            dataset.right_table = path_field("right_table");
            dataset.pairs = path_field("pairs");
            break;
        case TaskKind::error_detection:
            dataset.table = path_field("table");
            dataset.labels = path_field("labels");
            break;
        case TaskKind::data_imputation:
            dataset.table = path_field("table");
            if (!section.contains("target_attribute")) {
                throw ConfigError("config: dataset is missing required key 'target_attribute'");
            }
            dataset.target_attribute = section["target_attribute"].get<std::string>();
            break;
        case TaskKind::data_transformation:
            dataset.examples = path_field("examples");
            break;
    }
    return dataset;
}

SerializationOptions parse_serialization(const ordered_json& section) {
    check_keys(section, "serialization",
               {"attribute_subset", "pair_separator", "kv_separator", "null_token",
                "include_attribute_names"});
    SerializationOptions opts;
    if (section.contains("attribute_subset") && !section["attribute_subset"].is_null()) {
        opts.attribute_subset = section["attribute_subset"].get<std::vector<std::string>>();
    }
    opts.pair_separator = section.value("pair_separator", opts.pair_separator);
    opts.kv_separator = section.value("kv_separator", opts.kv_separator);
    opts.null_token = section.value("null_token", opts.null_token);
    opts.include_attribute_names =
        section.value("include_attribute_names", opts.include_attribute_names);
    return opts;
}

SelectionStrategy parse_selection(const ordered_json& section,
                                  const std::filesystem::path& base) {
    check_keys(section, "prompt.selection", {"type", "seed", "path"});
    const std::string type = section.value("type", std::string("random"));
    if (type == "random") {
        return RandomSelection{section.value("seed", std::uint64_t{0})};
    }
    if (type == "manual") {
        if (!section.contains("path")) {
            throw ConfigError("config: manual selection requires a 'path'");
        }
        auto path = resolve_input(base, section["path"].get<std::string>());
        require_file(path, "prompt.selection.path");
        return ManualSelection{path};
    }
    throw ConfigError("config: selection type must be 'random' or 'manual', got '" + type + "'");
}

} // namespace

TemplateSet ExperimentConfig::resolve_template() const {
    for (const auto& custom : custom_templates) {
        if (custom.kind == task && custom.variant_id == template_variant) return custom;
    }
    return builtin_template(task, template_variant, entity_noun);
}

PromptSpec ExperimentConfig::prompt_spec() const {
    PromptSpec spec;
    spec.kind = task;
    spec.template_set = resolve_template();
    spec.k = k;
    spec.selection = selection;
    spec.preamble = preamble;
    spec.serialization = serialization;
    spec.fingerprint = fingerprint(*this);
    return spec;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: " + path.string() + ": expected an object");

    check_keys(doc, "",
               {"task", "dataset", "serialization", "template", "templates", "prompt", "backend",
                "sample", "split", "eval", "output"});

    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    ExperimentConfig config;
    if (!doc.contains("task")) throw ConfigError("config: missing required key 'task'");
    config.task = task_kind_from_name(doc["task"].get<std::string>());
    if (!doc.contains("dataset")) throw ConfigError("config: missing required key 'dataset'");
    config.dataset = parse_dataset(doc["dataset"], config.task, base);

    if (doc.contains("serialization")) {
        config.serialization = parse_serialization(doc["serialization"]);
    }

    if (doc.contains("template")) {
        const auto& section = doc["template"];
        check_keys(section, "template", {"variant_id", "question_text", "entity_noun"});
        config.template_variant = section.value("variant_id", config.template_variant);
        config.entity_noun = section.value("entity_noun", config.entity_noun);
        if (section.contains("question_text") && !section["question_text"].get<std::string>().empty()) {
            // A verbatim question override registers as a custom variant.
            TemplateSet custom;
            custom.kind = config.task;
            custom.variant_id = config.template_variant;
            custom.question_text = section["question_text"].get<std::string>();
            custom.entity_noun = config.entity_noun;
            config.custom_templates.push_back(std::move(custom));
        }
    }
    if (doc.contains("templates")) {
        for (const auto& item : doc["templates"]) {
            check_keys(item, "templates[]", {"kind", "variant_id", "question_text", "entity_noun"});
            TemplateSet custom;
            custom.kind = task_kind_from_name(item.at("kind").get<std::string>());
            custom.variant_id = item.at("variant_id").get<std::string>();
            custom.question_text = item.value("question_text", std::string());
            custom.entity_noun = item.value("entity_noun", std::string("Product"));
            if (is_binary_task(custom.kind) && custom.question_text.empty()) {
                throw ConfigError("config: templates[] entry '" + custom.variant_id +
                                  "' needs nonempty question_text for a binary task");
            }
            config.custom_templates.push_back(std::move(custom));
        }
    }

    if (doc.contains("prompt")) {
        const auto& section = doc["prompt"];
        check_keys(section, "prompt", {"k", "selection", "preamble"});
        if (section.contains("k")) {
            const auto k = section["k"].get<std::int64_t>();
            if (k < 0) throw ConfigError("config: prompt.k must be nonnegative");
            config.k = static_cast<std::size_t>(k);
        }
        if (section.contains("selection")) {
            config.selection = parse_selection(section["selection"], base);
        }
        if (section.contains("preamble") && !section["preamble"].is_null()) {
            config.preamble = section["preamble"].get<std::string>();
        }
    }

    if (doc.contains("backend")) {
        const auto& section = doc["backend"];
        check_keys(section, "backend",
                   {"endpoint_url", "model", "auth_token_env", "max_retries", "base_backoff_ms",
                    "max_concurrency", "requests_per_minute", "temperature", "max_tokens", "stop"});
        config.backend.endpoint_url = section.value("endpoint_url", config.backend.endpoint_url);
        config.backend.auth_token_env =
            section.value("auth_token_env", config.backend.auth_token_env);
        config.backend.max_retries = section.value("max_retries", config.backend.max_retries);
        config.backend.base_backoff_ms =
            section.value("base_backoff_ms", config.backend.base_backoff_ms);
        config.backend.max_concurrency =
            section.value("max_concurrency", config.backend.max_concurrency);
        if (section.contains("requests_per_minute") && !section["requests_per_minute"].is_null()) {
            config.backend.requests_per_minute = section["requests_per_minute"].get<double>();
        }
        config.request_template.model = section.value("model", std::string("text-davinci-002"));
        config.request_template.temperature =
            section.value("temperature", config.request_template.temperature);
        config.request_template.max_tokens =
            section.value("max_tokens", config.request_template.max_tokens);
        if (section.contains("stop")) {
            config.request_template.stop = section["stop"].get<std::vector<std::string>>();
        }
        config.backend.validate();
    } else {
        config.request_template.model = "text-davinci-002";
    }

    if (doc.contains("sample")) {
        const auto& section = doc["sample"];
        check_keys(section, "sample", {"cap", "seed"});
        if (section.contains("cap") && !section["cap"].is_null()) {
            const auto cap = section["cap"].get<std::int64_t>();
            if (cap < 0) throw ConfigError("config: sample.cap must be nonnegative");
            config.sample_cap = static_cast<std::size_t>(cap);
        }
        config.sample_seed = section.value("seed", config.sample_seed);
    }

    if (doc.contains("split")) {
        const auto& section = doc["split"];
        check_keys(section, "split", {"train", "valid", "test", "seed"});
        config.split.train_frac = section.value("train", config.split.train_frac);
        config.split.valid_frac = section.value("valid", config.split.valid_frac);
        config.split.test_frac = section.value("test", config.split.test_frac);
        config.split.seed = section.value("seed", config.split.seed);
        config.split.validate();
    }

    if (doc.contains("eval")) {
        const auto& section = doc["eval"];
        check_keys(section, "eval", {"split", "normalize_values"});
        config.eval_split = section.value("split", config.eval_split);
        config.normalize_values = section.value("normalize_values", config.normalize_values);
        static const std::set<std::string> splits{"train", "valid", "test", "all"};
        if (splits.find(config.eval_split) == splits.end()) {
            throw ConfigError("config: eval.split must be one of train/valid/test/all, got '" +
                              config.eval_split + "'");
        }
    }

    if (doc.contains("output")) {
        const auto& section = doc["output"];
        check_keys(section, "output", {"report", "cache_dir"});
        config.report_path = section.value("report", config.report_path.string());
        config.cache_dir = section.value("cache_dir", config.cache_dir.string());
    }

    // The template variant must resolve; surfaces typos before a run.
    config.resolve_template();

    // Manual selection must be able to supply k demonstrations.
    if (config.k > 0) {
        if (const auto* manual = std::get_if<ManualSelection>(&config.selection)) {
            const auto demos = load_manual(manual->path, config.task);
            if (demos.size() < config.k) {
                throw ConfigError("config: manual demonstrations file " + manual->path.string() +
                                  " supplies " + std::to_string(demos.size()) + " records, need k=" +
                                  std::to_string(config.k));
            }
        }
    }

    return config;
}

namespace {

json canonical_json(const ExperimentConfig& config, bool include_output) {
    json doc;
    doc["task"] = task_kind_name(config.task);
    json dataset;
    dataset["name"] = config.dataset.name;
    auto set_path = [&dataset](const char* key, const std::filesystem::path& path) {
        if (!path.empty()) dataset[key] = path.string();
    };
    set_path("left_table", config.dataset.left_table);
    set_path("right_table", config.dataset.right_table);
    set_path("pairs", config.dataset.pairs);
    set_path("table", config.dataset.table);
    set_path("labels", config.dataset.labels);
    set_path("examples", config.dataset.examples);
    if (!config.dataset.target_attribute.empty()) {
        dataset["target_attribute"] = config.dataset.target_attribute;
    }
    doc["dataset"] = std::move(dataset);

    json serialization;
    if (config.serialization.attribute_subset) {
        serialization["attribute_subset"] = *config.serialization.attribute_subset;
    } else {
        serialization["attribute_subset"] = nullptr;
    }
    serialization["pair_separator"] = config.serialization.pair_separator;
    serialization["kv_separator"] = config.serialization.kv_separator;
    serialization["null_token"] = config.serialization.null_token;
    serialization["include_attribute_names"] = config.serialization.include_attribute_names;
    doc["serialization"] = std::move(serialization);

    doc["template"] = {{"variant_id", config.template_variant},
                       {"entity_noun", config.entity_noun}};
    if (!config.custom_templates.empty()) {
        json templates = json::array();
        for (const auto& custom : config.custom_templates) {
            templates.push_back({{"kind", task_kind_name(custom.kind)},
                                 {"variant_id", custom.variant_id},
                                 {"question_text", custom.question_text},
                                 {"entity_noun", custom.entity_noun}});
        }
        doc["templates"] = std::move(templates);
    }

    json prompt;
    prompt["k"] = config.k;
    if (const auto* random = std::get_if<RandomSelection>(&config.selection)) {
        prompt["selection"] = {{"type", "random"}, {"seed", random->seed}};
    } else {
        prompt["selection"] = {{"type", "manual"},
                               {"path", std::get<ManualSelection>(config.selection).path.string()}};
    }
    if (config.preamble) prompt["preamble"] = *config.preamble;
    doc["prompt"] = std::move(prompt);

    json backend;
    backend["endpoint_url"] = config.backend.endpoint_url;
    backend["auth_token_env"] = config.backend.auth_token_env;
    backend["max_retries"] = config.backend.max_retries;
    backend["base_backoff_ms"] = config.backend.base_backoff_ms;
    backend["max_concurrency"] = config.backend.max_concurrency;
    if (config.backend.requests_per_minute) {
        backend["requests_per_minute"] = *config.backend.requests_per_minute;
    }
    backend["model"] = config.request_template.model;
    backend["temperature"] = config.request_template.temperature;
    backend["max_tokens"] = config.request_template.max_tokens;
    backend["stop"] = config.request_template.stop;
    doc["backend"] = std::move(backend);

    json sample;
    if (config.sample_cap) sample["cap"] = *config.sample_cap;
    sample["seed"] = config.sample_seed;
    doc["sample"] = std::move(sample);

    doc["split"] = {{"train", config.split.train_frac},
                    {"valid", config.split.valid_frac},
                    {"test", config.split.test_frac},
                    {"seed", config.split.seed}};
    doc["eval"] = {{"split", config.eval_split}, {"normalize_values", config.normalize_values}};

    if (include_output) {
        doc["output"] = {{"report", config.report_path.string()},
                         {"cache_dir", config.cache_dir.string()}};
    }
    return doc;
}

} // namespace

std::string fingerprint(const ExperimentConfig& config) {
    return sha256_hex(canonical_json(config, /*include_output=*/false).dump());
}

std::string write_config(const ExperimentConfig& config) {
    return canonical_json(config, /*include_output=*/true).dump(2) + "\n";
}

} // namespace wrangle
