#include "wrangle/runner.hpp"

#include <algorithm>

namespace wrangle {

namespace {

struct LabeledInstance {
    TaskInstance instance;
    ParsedAnswer gold;
    std::string answer_text; // demonstration form of the gold
};

std::vector<LabeledInstance> build_pair_instances(const ExperimentConfig& config,
                                                  TaskData::Stats& stats) {
    const Table left = load_table(config.dataset.left_table, config.dataset.name + "/left");
    const Table right = load_table(config.dataset.right_table, config.dataset.name + "/right");
    const auto pairs = load_pairs(config.dataset.pairs);
    stats.tables.emplace_back(left.name, left.rows.size());
    stats.tables.emplace_back(right.name, right.rows.size());

    std::vector<LabeledInstance> items;
    items.reserve(pairs.size());
    for (const auto& pair : pairs) {
        const Entry& l = left.row_or_throw(pair.left_id);
        const Entry& r = right.row_or_throw(pair.right_id);
        const bool match = pair.label == MatchLabel::match;
        LabeledInstance item{
            config.task == TaskKind::schema_matching
                ? make_sm_instance(pair.left_id + "|" + pair.right_id, l, r)
                : make_em_instance(pair.left_id + "|" + pair.right_id, l, r),
            ParsedAnswer::binary(match, match ? "yes" : "no"),
            match ? "Yes" : "No",
        };
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<LabeledInstance> build_cell_instances(const ExperimentConfig& config,
                                                  TaskData::Stats& stats) {
    const Table table = load_table(config.dataset.table, config.dataset.name);
    const auto labels = load_cell_labels(config.dataset.labels);
    stats.tables.emplace_back(table.name, table.rows.size());

    std::vector<LabeledInstance> items;
    items.reserve(labels.size());
    for (const auto& label : labels) {
        const Entry& entry = table.row_or_throw(label.entry_id);
        if (!entry.has(label.attribute)) {
            throw DataError("cell label (" + label.entry_id + ", " + label.attribute +
                            ") does not resolve in table " + table.name);
        }
        LabeledInstance item{
            make_ed_instance(label.entry_id + "|" + label.attribute, entry, label.attribute),
            ParsedAnswer::binary(label.is_error, label.is_error ? "yes" : "no"),
            label.is_error ? "Yes" : "No",
        };
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<LabeledInstance> build_imputation_instances(const ExperimentConfig& config,
                                                        TaskData::Stats& stats) {
    const Table table = load_table(config.dataset.table, config.dataset.name);
    stats.tables.emplace_back(table.name, table.rows.size());
    const auto examples = make_imputation_examples(table, config.dataset.target_attribute);

    std::vector<LabeledInstance> items;
    items.reserve(examples.size());
    for (const auto& example : examples) {
        const Entry& entry = table.row_or_throw(example.entry_id);
        LabeledInstance item{
            make_di_instance(example.entry_id + "|" + example.target_attribute, entry,
                             example.target_attribute),
            ParsedAnswer::value(example.gold_value, example.gold_value),
            example.gold_value,
        };
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<LabeledInstance> build_transform_instances(const ExperimentConfig& config,
                                                       TaskData::Stats& stats) {
    const Table table = load_table(config.dataset.examples, config.dataset.name);
    stats.tables.emplace_back(table.name, table.rows.size());
    if (!std::count(table.columns.begin(), table.columns.end(), "input") ||
        !std::count(table.columns.begin(), table.columns.end(), "output")) {
        throw DataError("transformation examples need 'input' and 'output' columns: " +
                        config.dataset.examples.string());
    }

    std::vector<LabeledInstance> items;
    items.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        const auto* input = row.find("input");
        const auto* output = row.find("output");
        if (!input->has_value() || !output->has_value()) {
            throw DataError("transformation example row " + row.id + " has a NULL input or output");
        }
        LabeledInstance item{
            make_dt_instance(row.id, **input),
            ParsedAnswer::value(**output, **output),
            **output,
        };
        items.push_back(std::move(item));
    }
    return items;
}

} // namespace

TaskData build_task_data(const ExperimentConfig& config) {
    TaskData data;
    std::vector<LabeledInstance> items;
    switch (config.task) {
        case TaskKind::entity_matching:
        case TaskKind::schema_matching:
            items = build_pair_instances(config, data.stats);
            break;
        case TaskKind::error_detection:
            items = build_cell_instances(config, data.stats);
            break;
        case TaskKind::data_imputation:
            items = build_imputation_instances(config, data.stats);
            break;
        case TaskKind::data_transformation:
            items = build_transform_instances(config, data.stats);
            break;
    }

    data.stats.total = items.size();
    if (is_binary_task(config.task)) {
        data.stats.positives = static_cast<std::size_t>(
            std::count_if(items.begin(), items.end(),
                          [](const LabeledInstance& item) { return item.gold.yes; }));
    }

    std::vector<std::size_t> indices(items.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    const auto splits = make_splits(indices, config.split);
    data.stats.train = splits.train.size();
    data.stats.valid = splits.valid.size();
    data.stats.test = splits.test.size();

    // The demonstration pool always draws from the train split; random
    // selection never sees an evaluated instance.
    data.pool.reserve(splits.train.size());
    for (std::size_t index : splits.train) {
        data.pool.push_back(Demonstration{items[index].instance, items[index].answer_text});
    }

    const std::vector<std::size_t>* chosen = nullptr;
    if (config.eval_split == "train") chosen = &splits.train;
    else if (config.eval_split == "valid") chosen = &splits.valid;
    else if (config.eval_split == "test") chosen = &splits.test;

    auto add = [&](std::size_t index) {
        data.instances.push_back(items[index].instance);
        data.golds.push_back(items[index].gold);
    };
    if (chosen != nullptr) {
        for (std::size_t index : *chosen) add(index);
    } else {
        for (std::size_t index = 0; index < items.size(); ++index) add(index);
    }
    return data;
}

EvalOptions eval_options(const ExperimentConfig& config) {
    EvalOptions opts;
    opts.cap = config.sample_cap;
    opts.cap_seed = config.sample_seed;
    opts.normalize_values = config.normalize_values;
    opts.max_concurrency = config.backend.max_concurrency;
    opts.dataset_name = config.dataset.name;
    opts.request_template = config.request_template;
    return opts;
}

std::shared_ptr<CompletionBackend> make_backend(const ExperimentConfig& config,
                                                const std::string& backend_spec, bool with_cache) {
    std::shared_ptr<CompletionBackend> inner;
    if (backend_spec == "api") {
        inner = std::make_shared<HttpCompletionBackend>(config.backend);
    } else if (backend_spec == "heuristic") {
        inner = std::make_shared<HeuristicMatchBackend>();
    } else if (backend_spec.rfind("fixture:", 0) == 0) {
        inner = std::make_shared<FixtureBackend>(
            FixtureBackend::from_file(backend_spec.substr(std::string("fixture:").size())));
    } else {
        throw UsageError("unknown backend '" + backend_spec +
                         "'; expected api, heuristic, or fixture:PATH");
    }
    if (!with_cache) return inner;
    return std::make_shared<CachedBackend>(std::move(inner), config.cache_dir);
}

MetricReport run_experiment(const ExperimentConfig& config, CompletionBackend& backend) {
    const TaskData data = build_task_data(config);
    return run_eval(data.instances, data.golds, data.pool, config.prompt_spec(), backend,
                    eval_options(config));
}

} // namespace wrangle
