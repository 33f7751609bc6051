#include "wrangle/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "wrangle/textutil.hpp"

namespace wrangle {

namespace {

using ordered_json = nlohmann::ordered_json;

double safe_ratio(std::size_t numerator, std::size_t denominator) {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) / static_cast<double>(denominator);
}

} // namespace

F1Result f1(const std::vector<bool>& preds, const std::vector<bool>& golds) {
    if (preds.size() != golds.size()) {
        throw UsageError("f1: prediction and gold vectors differ in length");
    }
    F1Result result;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] && golds[i]) ++result.tp;
        else if (preds[i] && !golds[i]) ++result.fp;
        else if (!preds[i] && golds[i]) ++result.fn;
        else ++result.tn;
    }
    const double precision = safe_ratio(result.tp, result.tp + result.fp);
    const double recall = safe_ratio(result.tp, result.tp + result.fn);
    result.value = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    return result;
}

double accuracy(const std::vector<std::string>& preds, const std::vector<std::string>& golds,
                bool normalize) {
    if (preds.size() != golds.size()) {
        throw UsageError("accuracy: prediction and gold vectors differ in length");
    }
    if (preds.empty()) return 1.0; // vacuous; report carries n == 0
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool equal = normalize ? normalize_value(preds[i]) == normalize_value(golds[i])
                                     : preds[i] == golds[i];
        if (equal) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

namespace {

bool record_correct(const ParsedAnswer& parsed, const ParsedAnswer& gold, bool normalize) {
    if (gold.type == ParsedAnswer::Type::binary) {
        return parsed.yes == gold.yes;
    }
    return normalize ? normalize_value(parsed.text) == normalize_value(gold.text)
                     : parsed.text == gold.text;
}

} // namespace

MetricReport make_report(TaskKind kind, std::string dataset, std::string config_fingerprint,
                         bool normalized_values, std::vector<PredictionRecord> records) {
    MetricReport report;
    report.dataset = std::move(dataset);
    report.kind = kind;
    report.normalized_values = normalized_values;
    report.config_fingerprint = std::move(config_fingerprint);
    report.records = std::move(records);

    if (is_binary_task(report.kind)) {
        std::vector<bool> preds, golds;
        preds.reserve(report.records.size());
        golds.reserve(report.records.size());
        for (const auto& record : report.records) {
            preds.push_back(record.parsed.yes);
            golds.push_back(record.gold.yes);
        }
        const F1Result result = f1(preds, golds);
        report.metric = "f1";
        report.value = result.value;
        report.tp = result.tp;
        report.fp = result.fp;
        report.fn = result.fn;
        report.tn = result.tn;
    } else {
        std::vector<std::string> preds, golds;
        preds.reserve(report.records.size());
        golds.reserve(report.records.size());
        for (const auto& record : report.records) {
            preds.push_back(record.parsed.text);
            golds.push_back(record.gold.text);
        }
        report.metric = "accuracy";
        report.value = accuracy(preds, golds, report.normalized_values);
    }
    report.n = report.records.size();
    return report;
}

MetricReport run_eval(const std::vector<TaskInstance>& instances,
                      const std::vector<ParsedAnswer>& golds,
                      const std::vector<Demonstration>& pool, const PromptSpec& spec,
                      CompletionBackend& backend, const EvalOptions& opts) {
    if (instances.size() != golds.size()) {
        throw UsageError("run_eval: instances and golds differ in length");
    }

    const auto demos = resolve_demonstrations(spec, pool);

    std::vector<std::size_t> order(instances.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (opts.cap) order = sample_cap(order, *opts.cap, opts.cap_seed);

    // Demonstration hygiene: an evaluated instance must never be shown as
    // a solved example in its own prompt.
    std::unordered_set<std::string> demo_ids;
    for (const auto& demo : demos) demo_ids.insert(demo.instance.id);
    for (std::size_t index : order) {
        if (demo_ids.count(instances[index].id) != 0) {
            throw UsageError("run_eval: evaluated instance '" + instances[index].id +
                             "' appears among the demonstrations");
        }
    }

    std::vector<std::optional<PredictionRecord>> slots(order.size());
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t slot = cursor.fetch_add(1);
            if (slot >= order.size()) return;
            const std::size_t index = order[slot];
            try {
                const Prompt prompt = assemble(spec, demos, instances[index]);
                CompletionRequest request = opts.request_template;
                request.prompt = prompt.text;
                const CompletionResponse response = backend.complete(request);

                PredictionRecord record;
                record.instance_id = instances[index].id;
                record.prompt_digest = cache_key(request).digest;
                record.prompt = prompt.text;
                record.raw_completion = response.text;
                record.parsed = is_binary_task(spec.kind) ? parse_binary(response.text)
                                                          : parse_value(response.text);
                record.gold = golds[index];
                record.correct = record_correct(record.parsed, record.gold, opts.normalize_values);
                slots[slot] = std::move(record);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    const std::size_t n_workers =
        std::min<std::size_t>(std::max(opts.max_concurrency, 1), std::max<std::size_t>(order.size(), 1));
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();

    std::vector<PredictionRecord> records;
    records.reserve(order.size());
    for (auto& slot : slots) {
        if (slot) records.push_back(std::move(*slot));
    }
    std::sort(records.begin(), records.end(),
              [](const PredictionRecord& a, const PredictionRecord& b) {
                  return a.instance_id < b.instance_id;
              });

    if (first_error) {
        std::string message = "run_eval: aborted";
        try {
            std::rethrow_exception(first_error);
        } catch (const std::exception& e) {
            message = std::string("run_eval: aborted: ") + e.what();
        } catch (...) {
        }
        throw EvalAborted(message, std::move(records));
    }

    return make_report(spec.kind, opts.dataset_name, spec.fingerprint, opts.normalize_values,
                       std::move(records));
}

std::vector<AblationVariant> load_variants(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("variants: cannot open " + path.string());
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("variants: " + path.string() + ": " + e.what());
    }
    if (!doc.is_array() || doc.empty()) {
        throw UsageError("variants: " + path.string() + ": expected a nonempty JSON array");
    }
    std::vector<AblationVariant> variants;
    for (const auto& item : doc) {
        AblationVariant variant;
        variant.variant_id = item.at("variant_id").get<std::string>();
        variant.label = item.value("label", variant.variant_id);
        variant.template_variant = item.value("template_variant", std::string("prompt1"));
        variant.attribute_selection = item.value("attribute_selection", true);
        variant.attribute_names = item.value("attribute_names", true);
        const std::string selection = item.value("selection", std::string("manual"));
        if (selection == "manual") {
            variant.selection = AblationVariant::Selection::manual;
        } else if (selection == "random") {
            variant.selection = AblationVariant::Selection::random;
        } else {
            throw ConfigError("variants: unknown selection '" + selection + "' in " +
                              variant.variant_id);
        }
        if (item.contains("manual_file")) {
            variant.manual_path = item["manual_file"].get<std::string>();
        }
        variants.push_back(std::move(variant));
    }
    return variants;
}

namespace {

PromptSpec specialize(const PromptSpec& base, const AblationVariant& variant,
                      std::optional<std::uint64_t> seed) {
    PromptSpec spec = base;
    spec.template_set =
        builtin_template(base.kind, variant.template_variant, base.template_set.entity_noun);
    if (!variant.attribute_selection) spec.serialization.attribute_subset.reset();
    spec.serialization.include_attribute_names = variant.attribute_names;
    if (variant.selection == AblationVariant::Selection::manual) {
        if (variant.manual_path) {
            spec.selection = ManualSelection{*variant.manual_path};
        } else if (!std::holds_alternative<ManualSelection>(base.selection)) {
            throw ConfigError("variant " + variant.variant_id +
                              ": manual selection requires a manual demonstrations file");
        }
    } else {
        spec.selection = RandomSelection{seed.value_or(0)};
    }
    return spec;
}

} // namespace

std::vector<AblationResult> run_ablation(const PromptSpec& base_spec,
                                         const std::vector<AblationVariant>& variants,
                                         const std::vector<std::uint64_t>& seeds,
                                         const std::vector<TaskInstance>& instances,
                                         const std::vector<ParsedAnswer>& golds,
                                         const std::vector<Demonstration>& pool,
                                         CompletionBackend& backend, const EvalOptions& opts) {
    if (variants.empty()) throw UsageError("run_ablation: no variants");
    if (seeds.empty()) throw UsageError("run_ablation: no seeds");

    std::vector<AblationResult> results;
    results.reserve(variants.size());
    for (const auto& variant : variants) {
        AblationResult result;
        result.variant_id = variant.variant_id;
        result.label = variant.label;
        result.seeds = seeds;

        if (variant.selection == AblationVariant::Selection::manual) {
            // Seeds do not reach a curated prompt; one run, zero variance.
            const PromptSpec spec = specialize(base_spec, variant, std::nullopt);
            MetricReport report = run_eval(instances, golds, pool, spec, backend, opts);
            for (std::size_t i = 0; i < seeds.size(); ++i) {
                result.per_seed_values.push_back(report.value);
                result.reports.push_back(report);
            }
            result.mean = report.value;
            result.stddev = 0.0;
        } else {
            for (const auto seed : seeds) {
                const PromptSpec spec = specialize(base_spec, variant, seed);
                MetricReport report = run_eval(instances, golds, pool, spec, backend, opts);
                result.per_seed_values.push_back(report.value);
                result.reports.push_back(std::move(report));
            }
            const double n = static_cast<double>(result.per_seed_values.size());
            double sum = 0.0;
            for (double v : result.per_seed_values) sum += v;
            result.mean = sum / n;
            const bool all_equal = std::all_of(
                result.per_seed_values.begin(), result.per_seed_values.end(),
                [&](double v) { return v == result.per_seed_values.front(); });
            if (all_equal) {
                result.mean = result.per_seed_values.front();
                result.stddev = 0.0;
            } else {
                double ss = 0.0;
                for (double v : result.per_seed_values) ss += (v - result.mean) * (v - result.mean);
                result.stddev = std::sqrt(ss / n);
            }
        }
        results.push_back(std::move(result));
    }
    return results;
}

std::vector<SliceBand> slice_report(const MetricReport& report, const SliceSpec& slice,
                                    const Table& train) {
    if (std::find(train.columns.begin(), train.columns.end(), slice.slice_attribute) ==
        train.columns.end()) {
        throw DataError("slice: train table '" + train.name + "' has no attribute '" +
                        slice.slice_attribute + "'");
    }

    auto frequency = [&](const std::string& gold) {
        const std::string needle = normalize_value(gold);
        std::size_t count = 0;
        for (const auto& row : train.rows) {
            const auto* value = row.find(slice.slice_attribute);
            if (value != nullptr && value->has_value() && normalize_value(**value) == needle) {
                ++count;
            }
        }
        return count;
    };

    std::vector<SliceBand> bands{{"freq=0"}, {"0<freq<=10"}, {"freq>10"}};
    std::vector<std::vector<const PredictionRecord*>> members(3);
    for (const auto& record : report.records) {
        const std::size_t freq = frequency(record.gold.canonical());
        const std::size_t band = freq == 0 ? 0 : freq <= 10 ? 1 : 2;
        members[band].push_back(&record);
    }
    for (std::size_t b = 0; b < 3; ++b) {
        bands[b].n = members[b].size();
        if (members[b].empty()) continue;
        for (const auto* record : members[b]) {
            if (record->correct) ++bands[b].correct;
        }
        if (is_binary_task(report.kind)) {
            std::vector<bool> preds, golds;
            for (const auto* record : members[b]) {
                preds.push_back(record->parsed.yes);
                golds.push_back(record->gold.yes);
            }
            bands[b].metric = f1(preds, golds).value;
        } else {
            bands[b].metric =
                static_cast<double>(bands[b].correct) / static_cast<double>(bands[b].n);
        }
    }
    return bands;
}

std::vector<const PredictionRecord*> error_inspect(const MetricReport& report, std::size_t n) {
    std::vector<const PredictionRecord*> errors;
    for (const auto& record : report.records) {
        if (errors.size() >= n) break;
        if (!record.correct) errors.push_back(&record);
    }
    return errors;
}

std::string report_to_json(const MetricReport& report) {
    ordered_json doc;
    doc["config_fingerprint"] = report.config_fingerprint;
    doc["dataset"] = report.dataset;
    doc["kind"] = task_kind_name(report.kind);
    doc["metric"] = report.metric;
    doc["value"] = report.value;
    doc["n"] = report.n;
    if (is_binary_task(report.kind)) {
        doc["counts"] = {{"tp", report.tp}, {"fp", report.fp}, {"fn", report.fn}, {"tn", report.tn}};
    } else {
        doc["normalized_values"] = report.normalized_values;
    }
    doc["records"] = ordered_json::array();
    for (const auto& record : report.records) {
        doc["records"].push_back({{"instance_id", record.instance_id},
                                  {"prompt_digest", record.prompt_digest},
                                  {"prompt", record.prompt},
                                  {"raw_completion", record.raw_completion},
                                  {"parsed", record.parsed.canonical()},
                                  {"gold", record.gold.canonical()},
                                  {"correct", record.correct}});
    }
    return doc.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const MetricReport& report) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("report: cannot write " + path.string());
    out << report_to_json(report);
}

MetricReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("report: cannot open " + path.string());
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("report: " + path.string() + ": " + e.what());
    }
    MetricReport report;
    try {
        report.config_fingerprint = doc.at("config_fingerprint").get<std::string>();
        report.dataset = doc.at("dataset").get<std::string>();
        report.kind = task_kind_from_name(doc.at("kind").get<std::string>());
        report.metric = doc.at("metric").get<std::string>();
        report.value = doc.at("value").get<double>();
        report.n = doc.at("n").get<std::size_t>();
        if (doc.contains("counts")) {
            report.tp = doc["counts"].at("tp").get<std::size_t>();
            report.fp = doc["counts"].at("fp").get<std::size_t>();
            report.fn = doc["counts"].at("fn").get<std::size_t>();
            report.tn = doc["counts"].at("tn").get<std::size_t>();
        }
        report.normalized_values = doc.value("normalized_values", true);
        const bool binary = is_binary_task(report.kind);
        for (const auto& item : doc.at("records")) {
            PredictionRecord record;
            record.instance_id = item.at("instance_id").get<std::string>();
            record.prompt_digest = item.at("prompt_digest").get<std::string>();
            record.prompt = item.at("prompt").get<std::string>();
            record.raw_completion = item.at("raw_completion").get<std::string>();
            const std::string parsed = item.at("parsed").get<std::string>();
            const std::string gold = item.at("gold").get<std::string>();
            if (binary) {
                record.parsed = ParsedAnswer::binary(parsed == "yes", record.raw_completion);
                record.gold = ParsedAnswer::binary(gold == "yes", gold);
            } else {
                record.parsed = ParsedAnswer::value(parsed, record.raw_completion);
                record.gold = ParsedAnswer::value(gold, gold);
            }
            record.correct = item.at("correct").get<bool>();
            report.records.push_back(std::move(record));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("report: " + path.string() + ": " + e.what());
    }
    return report;
}

} // namespace wrangle
