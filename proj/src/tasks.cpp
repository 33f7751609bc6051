#include "wrangle/tasks.hpp"

#include <algorithm>

#include "wrangle/textutil.hpp"

namespace wrangle {

bool is_binary_task(TaskKind kind) {
    switch (kind) {
        case TaskKind::entity_matching:
        case TaskKind::error_detection:
        case TaskKind::schema_matching:
            return true;
        case TaskKind::data_imputation:
        case TaskKind::data_transformation:
            return false;
    }
    return false;
}

std::string task_kind_name(TaskKind kind) {
    switch (kind) {
        case TaskKind::entity_matching: return "entity_matching";
        case TaskKind::error_detection: return "error_detection";
        case TaskKind::data_imputation: return "data_imputation";
        case TaskKind::schema_matching: return "schema_matching";
        case TaskKind::data_transformation: return "data_transformation";
    }
    return "unknown";
}

TaskKind task_kind_from_name(const std::string& name) {
    if (name == "entity_matching") return TaskKind::entity_matching;
    if (name == "error_detection") return TaskKind::error_detection;
    if (name == "data_imputation") return TaskKind::data_imputation;
    if (name == "schema_matching") return TaskKind::schema_matching;
    if (name == "data_transformation") return TaskKind::data_transformation;
    throw ConfigError("unknown task kind '" + name + "'");
}

TaskInstance make_em_instance(std::string id, Entry left, Entry right) {
    return {TaskKind::entity_matching, std::move(id),
            EntityPairPayload{std::move(left), std::move(right)}};
}

TaskInstance make_ed_instance(std::string id, Entry entry, std::string attribute) {
    if (!entry.has(attribute)) {
        throw ConfigError("error-detection instance: entry has no attribute '" + attribute + "'");
    }
    return {TaskKind::error_detection, std::move(id),
            CellPayload{std::move(entry), std::move(attribute)}};
}

TaskInstance make_di_instance(std::string id, Entry entry, std::string target_attribute) {
    if (!entry.has(target_attribute)) {
        throw ConfigError("imputation instance: entry has no attribute '" + target_attribute + "'");
    }
    return {TaskKind::data_imputation, std::move(id),
            ImputationPayload{std::move(entry), std::move(target_attribute)}};
}

TaskInstance make_sm_instance(std::string id, Entry left_desc, Entry right_desc) {
    return {TaskKind::schema_matching, std::move(id),
            AttributePairPayload{std::move(left_desc), std::move(right_desc)}};
}

TaskInstance make_dt_instance(std::string id, std::string input_value) {
    return {TaskKind::data_transformation, std::move(id), TransformPayload{std::move(input_value)}};
}

TemplateSet builtin_template(TaskKind kind, const std::string& variant_id,
                             const std::string& entity_noun) {
    TemplateSet tmpl;
    tmpl.kind = kind;
    tmpl.variant_id = variant_id;
    tmpl.entity_noun = entity_noun;
    switch (kind) {
        case TaskKind::entity_matching:
            if (variant_id == "prompt1" || variant_id == "default") {
                tmpl.question_text =
                    "Are " + entity_noun + " A and " + entity_noun + " B the same?";
            } else if (variant_id == "prompt2") {
                tmpl.question_text =
                    "Are " + entity_noun + " A and " + entity_noun + " B equivalent?";
            } else {
                throw ConfigError("unknown entity-matching template variant '" + variant_id + "'");
            }
            return tmpl;
        case TaskKind::error_detection:
            if (variant_id != "default") {
                throw ConfigError("unknown error-detection template variant '" + variant_id + "'");
            }
            tmpl.question_text = "Is there an error in";
            return tmpl;
        case TaskKind::data_imputation:
            if (variant_id != "default") {
                throw ConfigError("unknown imputation template variant '" + variant_id + "'");
            }
            tmpl.question_text = "?";
            return tmpl;
        case TaskKind::schema_matching:
            if (variant_id != "default") {
                throw ConfigError("unknown schema-matching template variant '" + variant_id + "'");
            }
            tmpl.question_text = "Are Attribute A and Attribute B semantically the same?";
            return tmpl;
        case TaskKind::data_transformation:
            if (variant_id != "default") {
                throw ConfigError("unknown transformation template variant '" + variant_id + "'");
            }
            tmpl.question_text = "";
            return tmpl;
    }
    throw ConfigError("unknown task kind for template");
}

ParsedAnswer ParsedAnswer::binary(bool yes, std::string raw) {
    ParsedAnswer answer;
    answer.type = Type::binary;
    answer.yes = yes;
    answer.text = yes ? "yes" : "no";
    answer.raw = std::move(raw);
    return answer;
}

ParsedAnswer ParsedAnswer::value(std::string text, std::string raw) {
    ParsedAnswer answer;
    answer.type = Type::value;
    answer.text = std::move(text);
    answer.raw = std::move(raw);
    return answer;
}

std::string ParsedAnswer::canonical() const {
    return type == Type::binary ? (yes ? "yes" : "no") : text;
}

namespace {

std::string render_pair(const std::string& noun, const Entry& left, const Entry& right,
                        const std::string& question, const SerializationOptions& opts) {
    std::string out;
    out += noun;
    out += " A is ";
    out += serialize_entry(left, opts);
    out += ". ";
    out += noun;
    out += " B is ";
    out += serialize_entry(right, opts);
    out += ". ";
    out += question;
    return out;
}

std::string render_imputation(const ImputationPayload& payload, const TemplateSet& tmpl,
                              const SerializationOptions& opts) {
    // The target attribute (and its value) never appears in the body.
    std::vector<std::string> attrs;
    if (opts.attribute_subset) {
        attrs = *opts.attribute_subset;
    } else {
        for (const auto& [attr, value] : payload.entry.values) attrs.push_back(attr);
    }
    attrs.erase(std::remove(attrs.begin(), attrs.end(), payload.target_attribute), attrs.end());

    SerializationOptions body_opts = opts;
    body_opts.attribute_subset = attrs;
    std::string body = serialize_entry(payload.entry, body_opts);

    std::string out;
    if (!body.empty()) {
        out += body;
        out += opts.pair_separator;
    }
    out += payload.target_attribute;
    out += tmpl.question_text.empty() ? "?" : tmpl.question_text;
    return out;
}

} // namespace

std::string render_instance(const TaskInstance& instance, const TemplateSet& tmpl,
                            const SerializationOptions& opts) {
    if (tmpl.kind != instance.kind) {
        throw UsageError("template kind " + task_kind_name(tmpl.kind) +
                         " does not match instance kind " + task_kind_name(instance.kind));
    }
    switch (instance.kind) {
        case TaskKind::entity_matching: {
            const auto& payload = std::get<EntityPairPayload>(instance.payload);
            return render_pair(tmpl.entity_noun, payload.left, payload.right, tmpl.question_text,
                               opts);
        }
        case TaskKind::error_detection: {
            const auto& payload = std::get<CellPayload>(instance.payload);
            const auto* value = payload.entry.find(payload.attribute);
            if (value == nullptr) {
                throw ConfigError("error-detection render: entry has no attribute '" +
                                  payload.attribute + "'");
            }
            std::string out = tmpl.question_text;
            out += " ";
            out += payload.attribute;
            out += opts.kv_separator;
            out += *value ? **value : opts.null_token;
            out += "?";
            return out;
        }
        case TaskKind::data_imputation:
            return render_imputation(std::get<ImputationPayload>(instance.payload), tmpl, opts);
        case TaskKind::schema_matching: {
            const auto& payload = std::get<AttributePairPayload>(instance.payload);
            return render_pair("Attribute", payload.left_desc, payload.right_desc,
                               tmpl.question_text, opts);
        }
        case TaskKind::data_transformation: {
            const auto& payload = std::get<TransformPayload>(instance.payload);
            return "Input: " + payload.input_value + "\nOutput:";
        }
    }
    throw UsageError("unknown task kind");
}

ParsedAnswer parse_binary(const std::string& raw) {
    for (const auto& token : tokenize(raw)) {
        if (token == "yes") return ParsedAnswer::binary(true, raw);
        if (token == "no") return ParsedAnswer::binary(false, raw);
    }
    return ParsedAnswer::binary(false, raw); // default answer
}

ParsedAnswer parse_value(const std::string& raw) {
    // Completions usually lead with a newline; the answer is the first
    // nonempty line.
    std::size_t begin = raw.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return ParsedAnswer::value("", raw);
    std::size_t end = raw.find('\n', begin);
    if (end == std::string::npos) end = raw.size();
    std::string text = trim(std::string_view(raw).substr(begin, end - begin));
    while (text.size() >= 2) {
        const char first = text.front();
        const char last = text.back();
        if (first == last && (first == '"' || first == '\'' || first == '`')) {
            text = trim(std::string_view(text).substr(1, text.size() - 2));
        } else {
            break;
        }
    }
    return ParsedAnswer::value(std::move(text), raw);
}

} // namespace wrangle
