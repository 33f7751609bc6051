#include "wrangle/prompts.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "wrangle/rng.hpp"

namespace wrangle {

namespace {

using ordered_json = nlohmann::ordered_json;

Entry entry_from_json(const ordered_json& object, const std::string& context) {
    if (!object.is_object()) {
        throw DataError(context + ": expected an object of attribute/value pairs");
    }
    Entry entry;
    for (const auto& [attr, value] : object.items()) {
        if (value.is_null()) {
            entry.values.emplace_back(attr, std::nullopt);
        } else if (value.is_string()) {
            entry.values.emplace_back(attr, value.get<std::string>());
        } else {
            throw DataError(context + ": attribute '" + attr + "' must be a string or null");
        }
    }
    return entry;
}

std::string string_field(const ordered_json& record, const char* key, const std::string& context) {
    if (!record.contains(key) || !record[key].is_string()) {
        throw DataError(context + ": missing string field '" + key + "'");
    }
    return record[key].get<std::string>();
}

Demonstration demo_from_json(const ordered_json& record, TaskKind expected_kind,
                             std::size_t index) {
    const std::string context = "demonstration " + std::to_string(index);
    if (!record.is_object()) {
        throw DataError(context + ": expected an object");
    }
    const TaskKind kind = task_kind_from_name(string_field(record, "kind", context));
    if (kind != expected_kind) {
        throw DataError(context + ": kind " + task_kind_name(kind) + " does not match expected " +
                        task_kind_name(expected_kind));
    }
    std::string id = record.contains("id") && record["id"].is_string()
                         ? record["id"].get<std::string>()
                         : "demo-" + std::to_string(index);
    const std::string answer = string_field(record, "answer", context);
    if (answer.empty()) {
        throw DataError(context + ": answer must be nonempty");
    }
    if (is_binary_task(kind) && answer != "Yes" && answer != "No") {
        throw DataError(context + ": binary answer must be 'Yes' or 'No', got '" + answer + "'");
    }

    TaskInstance instance = [&] {
        switch (kind) {
            case TaskKind::entity_matching:
                return make_em_instance(std::move(id), entry_from_json(record.at("left"), context),
                                        entry_from_json(record.at("right"), context));
            case TaskKind::error_detection:
                return make_ed_instance(std::move(id), entry_from_json(record.at("entry"), context),
                                        string_field(record, "attribute", context));
            case TaskKind::data_imputation:
                return make_di_instance(std::move(id), entry_from_json(record.at("entry"), context),
                                        string_field(record, "target_attribute", context));
            case TaskKind::schema_matching:
                return make_sm_instance(std::move(id), entry_from_json(record.at("left"), context),
                                        entry_from_json(record.at("right"), context));
            case TaskKind::data_transformation:
                return make_dt_instance(std::move(id), string_field(record, "input", context));
        }
        throw DataError(context + ": unknown kind");
    }();
    return Demonstration{std::move(instance), answer};
}

} // namespace

std::vector<Demonstration> select_random(const std::vector<Demonstration>& pool, std::size_t k,
                                         std::uint64_t seed) {
    if (pool.size() < k) {
        throw ConfigError("demonstration pool has " + std::to_string(pool.size()) +
                          " entries, need k=" + std::to_string(k));
    }
    std::vector<Demonstration> out;
    out.reserve(k);
    for (std::size_t index : sample_indices(pool.size(), k, seed)) {
        out.push_back(pool[index]);
    }
    return out;
}

std::vector<Demonstration> load_manual(const std::filesystem::path& path, TaskKind kind) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("manual demonstrations: cannot open " + path.string());
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manual demonstrations: " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw DataError("manual demonstrations: " + path.string() + ": expected a JSON array");
    }
    std::vector<Demonstration> demos;
    demos.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        try {
            demos.push_back(demo_from_json(doc[i], kind, i));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("demonstration " + std::to_string(i) + ": " + e.what());
        }
    }
    return demos;
}

std::vector<Demonstration> resolve_demonstrations(const PromptSpec& spec,
                                                  const std::vector<Demonstration>& pool) {
    if (spec.k == 0) return {};
    if (const auto* manual = std::get_if<ManualSelection>(&spec.selection)) {
        auto demos = load_manual(manual->path, spec.kind);
        if (demos.size() < spec.k) {
            throw ConfigError("manual demonstrations: " + manual->path.string() + " supplies " +
                              std::to_string(demos.size()) + " records, need k=" +
                              std::to_string(spec.k));
        }
        demos.resize(spec.k);
        return demos;
    }
    const auto seed = std::get<RandomSelection>(spec.selection).seed;
    return select_random(pool, spec.k, seed);
}

Prompt assemble(const PromptSpec& spec, const std::vector<Demonstration>& demos,
                const TaskInstance& target) {
    if (demos.size() != spec.k) {
        throw UsageError("assemble: got " + std::to_string(demos.size()) + " demonstrations, spec k=" +
                         std::to_string(spec.k));
    }
    if (target.kind != spec.kind) {
        throw UsageError("assemble: target kind " + task_kind_name(target.kind) +
                         " does not match spec kind " + task_kind_name(spec.kind));
    }

    Prompt prompt;
    prompt.meta.spec_fingerprint = spec.fingerprint;
    prompt.meta.target_id = target.id;

    std::string text;
    if (spec.preamble && !spec.preamble->empty()) {
        text += *spec.preamble;
        text += "\n\n";
    }
    for (const auto& demo : demos) {
        if (demo.instance.kind != spec.kind) {
            throw UsageError("assemble: demonstration kind does not match spec kind");
        }
        text += render_instance(demo.instance, spec.template_set, spec.serialization);
        // Transformation answers complete the "Output:" line in place.
        text += spec.kind == TaskKind::data_transformation ? " " : "\n";
        text += demo.answer_text;
        text += "\n\n";
        prompt.meta.demonstration_ids.push_back(demo.instance.id);
    }
    text += render_instance(target, spec.template_set, spec.serialization);
    prompt.text = std::move(text);
    return prompt;
}

} // namespace wrangle
