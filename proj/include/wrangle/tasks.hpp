#pragma once

#include <string>
#include <variant>
#include <vector>

#include "wrangle/serialize.hpp"
#include "wrangle/table.hpp"

namespace wrangle {

enum class TaskKind {
    entity_matching,
    error_detection,
    data_imputation,
    schema_matching,
    data_transformation,
};

// EM/ED/SM answers are yes/no; DI/DT answers are free-text values.
bool is_binary_task(TaskKind kind);

std::string task_kind_name(TaskKind kind);
TaskKind task_kind_from_name(const std::string& name);

struct EntityPairPayload {
    Entry left;
    Entry right;
};

struct CellPayload {
    Entry entry;
    std::string attribute;
};

struct ImputationPayload {
    Entry entry;
    std::string target_attribute;
};

struct AttributePairPayload {
    Entry left_desc;
    Entry right_desc;
};

struct TransformPayload {
    std::string input_value;
};

struct TaskInstance {
    TaskKind kind;
    std::string id;
    std::variant<EntityPairPayload, CellPayload, ImputationPayload, AttributePairPayload,
                 TransformPayload>
        payload;
};

TaskInstance make_em_instance(std::string id, Entry left, Entry right);
TaskInstance make_ed_instance(std::string id, Entry entry, std::string attribute);
TaskInstance make_di_instance(std::string id, Entry entry, std::string target_attribute);
TaskInstance make_sm_instance(std::string id, Entry left_desc, Entry right_desc);
TaskInstance make_dt_instance(std::string id, std::string input_value);

// A question template. For matching tasks question_text is the final
// question sentence; for error detection it is the leading clause; for
// imputation it is the suffix appended after the target attribute.
struct TemplateSet {
    TaskKind kind = TaskKind::entity_matching;
    std::string variant_id;
    std::string question_text;
    std::string entity_noun = "Product";
};

// Built-in variants: EM "prompt1" (..."the same?") and "prompt2"
// ("...equivalent?"), plus one default per remaining kind.
TemplateSet builtin_template(TaskKind kind, const std::string& variant_id,
                             const std::string& entity_noun);

struct ParsedAnswer {
    enum class Type { binary, value };
    Type type = Type::binary;
    bool yes = false;
    std::string text;
    std::string raw;

    static ParsedAnswer binary(bool yes, std::string raw);
    static ParsedAnswer value(std::string text, std::string raw);

    // Canonical form used in reports: "yes"/"no" or the value text.
    std::string canonical() const;
};

// Deterministic, byte-stable question rendering for one instance.
std::string render_instance(const TaskInstance& instance, const TemplateSet& tmpl,
                            const SerializationOptions& opts);

// Token scan for yes/no, first occurrence wins; anything else falls back
// to the default No answer. Total on all inputs.
ParsedAnswer parse_binary(const std::string& raw);

// First nonempty line, trimmed of whitespace and surrounding quotes.
ParsedAnswer parse_value(const std::string& raw);

} // namespace wrangle
