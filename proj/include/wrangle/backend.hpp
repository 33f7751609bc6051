#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wrangle/errors.hpp"

namespace wrangle {

struct CompletionRequest {
    std::string model;
    std::string prompt;
    int max_tokens = 30;
    double temperature = 0.0;
    std::vector<std::string> stop = {"\n\n"};
};

struct CompletionResponse {
    std::string text;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
    int latency_ms = 0;
    bool from_cache = false;
    int attempts = 1;
};

struct CacheKey {
    std::string digest; // 64 lowercase hex chars

    bool operator==(const CacheKey&) const = default;
};

struct BackendConfig {
    std::string endpoint_url = "https://api.openai.com";
    std::string auth_token_env = "OPENAI_API_KEY";
    int max_retries = 3;
    int base_backoff_ms = 250;
    int max_concurrency = 4;
    std::optional<double> requests_per_minute;

    void validate() const;
};

// Canonical request encoding: model 0x00 prompt 0x00 dec(temperature)
// 0x00 dec(max_tokens) 0x00 stops joined by 0x1F. Numbers render in
// decimal with trailing zeros trimmed, so the digest never depends on
// platform float formatting.
std::string canonical_request_encoding(const CompletionRequest& request);

CacheKey cache_key(const CompletionRequest& request);

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual CompletionResponse complete(const CompletionRequest& request) = 0;
    virtual std::string name() const = 0;
};

// OpenAI-completions wire protocol: POST <endpoint>/v1/completions with a
// bearer token from the configured environment variable. Transient
// failures (429, 5xx, timeouts) retry with exponential backoff and full
// jitter; other 4xx fail permanently.
class HttpCompletionBackend : public CompletionBackend {
public:
    explicit HttpCompletionBackend(BackendConfig config);

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string name() const override { return "api"; }

    const BackendConfig& config() const { return config_; }

private:
    void throttle();

    BackendConfig config_;
    std::mutex rate_mutex_;
    std::chrono::steady_clock::time_point next_slot_{};
};

// One JSON file per key under a two-level hex fan-out; writes go through
// a temp file and an atomic rename. Undecodable entries count as misses.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<CompletionResponse> lookup(const CompletionRequest& request) const;
    void store(const CompletionRequest& request, const CompletionResponse& response) const;

    std::filesystem::path entry_path(const CacheKey& key) const;
    const std::filesystem::path& dir() const { return dir_; }

    struct Stats {
        std::size_t entries = 0;
        std::uintmax_t bytes = 0;
    };
    Stats stats() const;
    void clear() const;

private:
    std::filesystem::path dir_;
};

// Wraps any backend with the persistent response cache. Hits return the
// stored text byte-for-byte with zero calls to the inner backend.
class CachedBackend : public CompletionBackend {
public:
    CachedBackend(std::shared_ptr<CompletionBackend> inner, std::filesystem::path cache_dir);

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string name() const override { return inner_->name() + "+cache"; }

    const ResponseCache& cache() const { return cache_; }

private:
    std::shared_ptr<CompletionBackend> inner_;
    ResponseCache cache_;
};

// Deterministic desk-scale stand-in for entity-matching runs: answers Yes
// iff the Jaccard similarity of the two serialized entities' token sets
// meets the threshold. Only understands prompts whose final block is an
// entity-matching rendering.
class HeuristicMatchBackend : public CompletionBackend {
public:
    explicit HeuristicMatchBackend(double threshold = 0.5) : threshold_(threshold) {}

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string name() const override { return "heuristic"; }

    double threshold() const { return threshold_; }

private:
    double threshold_;
};

// Exact prompt-to-text lookup for golden end-to-end tests. Unknown
// prompts either return the default text or fail, printing the prompt.
class FixtureBackend : public CompletionBackend {
public:
    FixtureBackend(std::map<std::string, std::string> responses,
                   std::optional<std::string> default_text = std::nullopt);

    static FixtureBackend from_file(const std::filesystem::path& path,
                                    std::optional<std::string> default_text = std::nullopt);

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string name() const override { return "fixture"; }

private:
    std::map<std::string, std::string> responses_;
    std::optional<std::string> default_text_;
};

} // namespace wrangle
