#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wrangle/backend.hpp"
#include "wrangle/prompts.hpp"
#include "wrangle/table.hpp"
#include "wrangle/tasks.hpp"

namespace wrangle {

struct F1Result {
    double value = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
};

// Positive class is match/error/yes. Any 0/0 quotient is 0.
F1Result f1(const std::vector<bool>& preds, const std::vector<bool>& golds);

// Fraction of equal values; vacuous truth (1.0) on empty input. When
// `normalize` is set, values compare lowercased, trimmed, with internal
// whitespace runs collapsed; otherwise byte equality.
double accuracy(const std::vector<std::string>& preds, const std::vector<std::string>& golds,
                bool normalize = true);

struct PredictionRecord {
    std::string instance_id;
    std::string prompt_digest;
    std::string prompt;
    std::string raw_completion;
    ParsedAnswer parsed;
    ParsedAnswer gold;
    bool correct = false;
};

struct MetricReport {
    std::string dataset;
    TaskKind kind = TaskKind::entity_matching;
    std::string metric; // "f1" or "accuracy"
    double value = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0; // binary tasks only
    std::size_t n = 0;
    bool normalized_values = true;
    std::string config_fingerprint;
    std::vector<PredictionRecord> records; // sorted by instance_id
};

struct EvalOptions {
    std::optional<std::size_t> cap; // sample cap, applied before dispatch
    std::uint64_t cap_seed = 0;
    bool normalize_values = true;
    int max_concurrency = 1;
    std::string dataset_name;
    // Model name and decoding parameters; the prompt is filled per instance.
    CompletionRequest request_template;
};

// A permanent backend failure mid-run; carries whatever records finished
// so expensive runs can be persisted and resumed from cache.
struct EvalAborted : Error {
    EvalAborted(std::string message, std::vector<PredictionRecord> partial)
        : Error(ErrorKind::transport, std::move(message)), partial(std::move(partial)) {}

    std::vector<PredictionRecord> partial;
};

// Aggregates records into a report: F1 with confusion counts for binary
// tasks, accuracy for value tasks.
MetricReport make_report(TaskKind kind, std::string dataset, std::string config_fingerprint,
                         bool normalized_values, std::vector<PredictionRecord> records);

// assemble -> complete -> parse -> score for each (capped) instance.
// Demonstrations come from the manual file or a seeded draw from `pool`
// (the train-side pool; evaluated ids must not appear among them).
MetricReport run_eval(const std::vector<TaskInstance>& instances,
                      const std::vector<ParsedAnswer>& golds,
                      const std::vector<Demonstration>& pool, const PromptSpec& spec,
                      CompletionBackend& backend, const EvalOptions& opts);

struct AblationVariant {
    std::string variant_id;
    std::string label;
    std::string template_variant = "prompt1";
    bool attribute_selection = true;
    bool attribute_names = true;
    enum class Selection { manual, random };
    Selection selection = Selection::manual;
    std::optional<std::filesystem::path> manual_path;
};

std::vector<AblationVariant> load_variants(const std::filesystem::path& path);

struct AblationResult {
    std::string variant_id;
    std::string label;
    std::vector<std::uint64_t> seeds;
    std::vector<double> per_seed_values;
    double mean = 0.0;
    double stddev = 0.0; // population
    std::vector<MetricReport> reports; // one per seed slot
};

// One row per variant. Random-selection variants sweep the seeds;
// manual-selection variants run once and report a std of exactly 0.
std::vector<AblationResult> run_ablation(const PromptSpec& base_spec,
                                         const std::vector<AblationVariant>& variants,
                                         const std::vector<std::uint64_t>& seeds,
                                         const std::vector<TaskInstance>& instances,
                                         const std::vector<ParsedAnswer>& golds,
                                         const std::vector<Demonstration>& pool,
                                         CompletionBackend& backend, const EvalOptions& opts);

struct SliceSpec {
    std::string slice_attribute;
};

struct SliceBand {
    std::string label;
    std::size_t n = 0;
    std::size_t correct = 0;
    std::optional<double> metric; // empty when n == 0
};

// Bands by gold-value frequency in the training table: freq=0,
// 0<freq<=10, freq>10. Band counts always sum to the report's n.
std::vector<SliceBand> slice_report(const MetricReport& report, const SliceSpec& slice,
                                    const Table& train);

// First n incorrect records, report order.
std::vector<const PredictionRecord*> error_inspect(const MetricReport& report, std::size_t n);

// Byte-stable JSON rendering; the file is the source of truth for every
// human-facing table.
std::string report_to_json(const MetricReport& report);
void write_report(const std::filesystem::path& path, const MetricReport& report);
MetricReport load_report(const std::filesystem::path& path);

} // namespace wrangle
