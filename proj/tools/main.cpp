#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wrangle/config.hpp"
#include "wrangle/eval.hpp"
#include "wrangle/runner.hpp"

namespace {

using namespace wrangle;

std::string metric_label(const MetricReport& report) {
    return report.metric == "f1" ? "F1" : "Accuracy";
}

void print_metric_line(const MetricReport& report) {
    std::printf("%s = %.4f  (n=%zu)\n", metric_label(report).c_str(), report.value, report.n);
}

int cmd_validate(const std::string& config_path) {
    const ExperimentConfig config = load_config(config_path);
    const TaskData data = build_task_data(config);

    std::printf("config: %s\n", config_path.c_str());
    std::printf("task: %s\n", task_kind_name(config.task).c_str());
    std::printf("dataset: %s\n", config.dataset.name.c_str());
    for (const auto& [table, rows] : data.stats.tables) {
        std::printf("  table %s: %zu rows\n", table.c_str(), rows);
    }
    std::printf("instances: %zu (train %zu / valid %zu / test %zu, eval split '%s')\n",
                data.stats.total, data.stats.train, data.stats.valid, data.stats.test,
                config.eval_split.c_str());
    if (is_binary_task(config.task)) {
        std::printf("label balance: %zu positive / %zu negative\n", data.stats.positives,
                    data.stats.total - data.stats.positives);
    }
    if (config.k > 0 && std::holds_alternative<RandomSelection>(config.selection) &&
        data.pool.size() < config.k) {
        throw ConfigError("validate: random selection needs k=" + std::to_string(config.k) +
                          " demonstrations but the train pool has " +
                          std::to_string(data.pool.size()));
    }
    std::printf("demonstration pool: %zu\n", data.pool.size());
    std::printf("fingerprint: %s\n", fingerprint(config).c_str());
    std::printf("ok\n");
    return 0;
}

int cmd_run(const std::string& config_path, bool dry_run, std::int64_t limit,
            const std::string& backend_spec) {
    const ExperimentConfig config = load_config(config_path);
    TaskData data = build_task_data(config);
    if (limit >= 0 && static_cast<std::size_t>(limit) < data.instances.size()) {
        data.instances.resize(static_cast<std::size_t>(limit));
        data.golds.resize(static_cast<std::size_t>(limit));
    }
    const PromptSpec spec = config.prompt_spec();

    if (dry_run) {
        // No backend is ever constructed here; nothing can touch the network.
        const auto demos = resolve_demonstrations(spec, data.pool);
        bool first = true;
        for (const auto& instance : data.instances) {
            if (!first) std::printf("--------\n");
            first = false;
            const Prompt prompt = assemble(spec, demos, instance);
            std::fwrite(prompt.text.data(), 1, prompt.text.size(), stdout);
            std::printf("\n");
        }
        return 0;
    }

    auto backend = make_backend(config, backend_spec);
    try {
        const MetricReport report =
            run_eval(data.instances, data.golds, data.pool, spec, *backend, eval_options(config));
        write_report(config.report_path, report);
        print_metric_line(report);
        std::printf("report: %s\n", config.report_path.string().c_str());
        return 0;
    } catch (const EvalAborted& aborted) {
        const MetricReport partial =
            make_report(config.task, config.dataset.name, fingerprint(config),
                        config.normalize_values, aborted.partial);
        write_report(config.report_path, partial);
        std::fprintf(stderr, "error: %s\n", aborted.what());
        std::fprintf(stderr, "partial report (n=%zu of %zu) written to %s\n", partial.n,
                     data.instances.size(), config.report_path.string().c_str());
        return aborted.exit_code();
    }
}

std::filesystem::path per_run_report_path(const std::filesystem::path& base,
                                          const std::string& variant_id, std::uint64_t seed) {
    std::filesystem::path path = base;
    const std::string stem = path.stem().string();
    path.replace_filename(stem + "." + variant_id + ".s" + std::to_string(seed) + ".json");
    return path;
}

int cmd_ablate(const std::string& config_path, const std::string& variants_path,
               const std::string& seeds_arg, const std::string& backend_spec) {
    const ExperimentConfig config = load_config(config_path);
    const TaskData data = build_task_data(config);
    const auto variants = load_variants(variants_path);

    std::vector<std::uint64_t> seeds;
    {
        std::stringstream stream(seeds_arg);
        std::string item;
        while (std::getline(stream, item, ',')) {
            if (!item.empty()) seeds.push_back(std::stoull(item));
        }
    }
    if (seeds.empty()) throw UsageError("ablate: --seeds needs at least one seed");

    auto backend = make_backend(config, backend_spec);
    const auto results = run_ablation(config.prompt_spec(), variants, seeds, data.instances,
                                      data.golds, data.pool, *backend, eval_options(config));

    for (const auto& result : results) {
        for (std::size_t i = 0; i < result.seeds.size(); ++i) {
            write_report(per_run_report_path(config.report_path, result.variant_id, result.seeds[i]),
                         result.reports[i]);
        }
    }

    std::printf("%-42s %9s %9s  %s\n", "variant", "mean", "std", "per-seed");
    for (const auto& result : results) {
        std::string per_seed;
        for (std::size_t i = 0; i < result.per_seed_values.size(); ++i) {
            if (i != 0) per_seed += ",";
            char buffer[32];
            std::snprintf(buffer, sizeof(buffer), "%.4f", result.per_seed_values[i]);
            per_seed += buffer;
        }
        std::printf("%-42s %9.4f %9.4f  %s\n", result.label.c_str(), result.mean, result.stddev,
                    per_seed.c_str());
    }
    return 0;
}

int cmd_slice(const std::string& report_path, const std::string& attribute,
              const std::string& train_path) {
    const MetricReport report = load_report(report_path);
    const Table train = load_table(train_path, "train");
    const auto bands = slice_report(report, SliceSpec{attribute}, train);

    std::printf("%-12s %6s %8s %10s\n", "band", "n", "correct", report.metric.c_str());
    for (const auto& band : bands) {
        if (band.metric) {
            std::printf("%-12s %6zu %8zu %10.4f\n", band.label.c_str(), band.n, band.correct,
                        *band.metric);
        } else {
            std::printf("%-12s %6zu %8zu %10s\n", band.label.c_str(), band.n, band.correct, "-");
        }
    }
    return 0;
}

int cmd_inspect(const std::string& report_path, std::size_t n) {
    const MetricReport report = load_report(report_path);
    const auto errors = error_inspect(report, n);
    if (errors.empty()) {
        std::printf("0 errors\n");
        return 0;
    }
    std::size_t shown = 0;
    std::size_t total_errors = 0;
    for (const auto& record : report.records) {
        if (!record.correct) ++total_errors;
    }
    for (const auto* record : errors) {
        ++shown;
        std::printf("== error %zu/%zu: instance %s\n", shown, total_errors,
                    record->instance_id.c_str());
        std::printf("prompt:\n%s\n", record->prompt.c_str());
        std::printf("raw: %s\n", record->raw_completion.c_str());
        std::printf("parsed: %s\n", record->parsed.canonical().c_str());
        std::printf("gold: %s\n\n", record->gold.canonical().c_str());
    }
    return 0;
}

int cmd_cache_stats(const std::string& dir) {
    if (!std::filesystem::exists(dir)) {
        throw DataError("cache: no such directory: " + dir);
    }
    const auto stats = ResponseCache(dir).stats();
    std::printf("%zu entries, %ju bytes\n", stats.entries,
                static_cast<std::uintmax_t>(stats.bytes));
    return 0;
}

int cmd_cache_clear(const std::string& dir, bool yes) {
    if (!std::filesystem::exists(dir)) {
        throw DataError("cache: no such directory: " + dir);
    }
    if (!yes) {
        throw UsageError("cache clear: pass --yes to confirm emptying " + dir);
    }
    ResponseCache cache(dir);
    const auto before = cache.stats();
    cache.clear();
    std::printf("cleared %zu entries\n", before.entries);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"prompt-based data cleaning and integration runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string backend_spec = "api";
    bool dry_run = false;
    std::int64_t limit = -1;

    auto* validate = app.add_subcommand("validate", "check a config and its files, print stats");
    validate->add_option("config", config_path, "experiment config (JSON)")->required();

    auto* run = app.add_subcommand("run", "run an experiment end to end");
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_flag("--dry-run", dry_run, "print assembled prompts instead of dispatching");
    run->add_option("--limit", limit, "only the first N instances");
    run->add_option("--backend", backend_spec, "api | heuristic | fixture:PATH");

    std::string variants_path;
    std::string seeds_arg = "1,2,3";
    auto* ablate = app.add_subcommand("ablate", "run prompt-format/selection variants over seeds");
    ablate->add_option("config", config_path, "experiment config (JSON)")->required();
    ablate->add_option("--variants", variants_path, "variants file (JSON array)")->required();
    ablate->add_option("--seeds", seeds_arg, "comma-separated seeds");
    ablate->add_option("--backend", backend_spec, "api | heuristic | fixture:PATH");

    std::string report_path;
    std::string attribute;
    std::string train_path;
    auto* slice = app.add_subcommand("slice", "frequency-band breakdown of a report");
    slice->add_option("report", report_path, "report JSON path")->required();
    slice->add_option("--attribute", attribute, "attribute to count in the train table")->required();
    slice->add_option("--train", train_path, "train table CSV")->required();

    std::size_t inspect_n = 10;
    auto* inspect = app.add_subcommand("inspect", "print incorrect predictions from a report");
    inspect->add_option("report", report_path, "report JSON path")->required();
    inspect->add_option("-n", inspect_n, "max errors to print");

    std::string cache_dir;
    bool cache_yes = false;
    auto* cache = app.add_subcommand("cache", "inspect or clear the response cache");
    cache->require_subcommand(1);
    auto* cache_stats = cache->add_subcommand("stats", "entry count and bytes");
    cache_stats->add_option("dir", cache_dir, "cache directory")->required();
    auto* cache_clear = cache->add_subcommand("clear", "empty the cache directory");
    cache_clear->add_option("dir", cache_dir, "cache directory")->required();
    cache_clear->add_flag("--yes", cache_yes, "confirm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (run->parsed()) return cmd_run(config_path, dry_run, limit, backend_spec);
        if (ablate->parsed()) return cmd_ablate(config_path, variants_path, seeds_arg, backend_spec);
        if (slice->parsed()) return cmd_slice(report_path, attribute, train_path);
        if (inspect->parsed()) return cmd_inspect(report_path, inspect_n);
        if (cache_stats->parsed()) return cmd_cache_stats(cache_dir);
        if (cache_clear->parsed()) return cmd_cache_clear(cache_dir, cache_yes);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
