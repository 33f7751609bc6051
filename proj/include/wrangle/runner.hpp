#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wrangle/config.hpp"
#include "wrangle/eval.hpp"

namespace wrangle {

// A dataset instantiated for one experiment: the evaluated instances with
// aligned golds, and the train-split demonstration pool.
struct TaskData {
    std::vector<TaskInstance> instances;
    std::vector<ParsedAnswer> golds;
    std::vector<Demonstration> pool;

    struct Stats {
        std::size_t total = 0;
        std::size_t train = 0;
        std::size_t valid = 0;
        std::size_t test = 0;
        std::size_t positives = 0; // binary tasks
        std::vector<std::pair<std::string, std::size_t>> tables; // name -> rows
    } stats;
};

TaskData build_task_data(const ExperimentConfig& config);

EvalOptions eval_options(const ExperimentConfig& config);

// Backend spec strings accepted by the CLI: "api", "heuristic", or
// "fixture:PATH". Every backend is wrapped in the response cache.
std::shared_ptr<CompletionBackend> make_backend(const ExperimentConfig& config,
                                                const std::string& backend_spec,
                                                bool with_cache = true);

MetricReport run_experiment(const ExperimentConfig& config, CompletionBackend& backend);

} // namespace wrangle
