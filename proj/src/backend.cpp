#include "wrangle/backend.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "wrangle/hash.hpp"
#include "wrangle/textutil.hpp"

namespace wrangle {

namespace {

using json = nlohmann::json;

std::string decimal(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    std::string out(buffer, result.ptr);
    const auto dot = out.find('.');
    if (dot != std::string::npos && out.find_first_of("eE") == std::string::npos) {
        auto end = out.size();
        while (end > dot + 1 && out[end - 1] == '0') --end;
        if (end == dot + 1) --end; // drop a bare trailing dot
        out.resize(end);
    }
    return out.empty() ? "0" : out;
}

std::string decimal(int value) { return std::to_string(value); }

// Sleep for U(0, base * 2^attempt) milliseconds (full jitter).
void backoff_sleep(int base_ms, int attempt) {
    const int exponent = std::min(attempt, 20);
    const std::uint64_t ceiling = static_cast<std::uint64_t>(std::max(base_ms, 0)) << exponent;
    if (ceiling == 0) return;
    thread_local std::mt19937_64 jitter(std::random_device{}());
    const std::uint64_t wait = jitter() % (ceiling + 1);
    std::this_thread::sleep_for(std::chrono::milliseconds(wait));
}

struct SplitUrl {
    std::string base;        // scheme://host[:port]
    std::string path_prefix; // possibly empty
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("backend: endpoint_url must include a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, ""};
    }
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

json request_body(const CompletionRequest& request, const std::string& model) {
    return json{{"model", model},
                {"prompt", request.prompt},
                {"max_tokens", request.max_tokens},
                {"temperature", request.temperature},
                {"stop", request.stop}};
}

bool transient_status(int status) { return status == 429 || (status >= 500 && status < 600); }

} // namespace

void BackendConfig::validate() const {
    if (max_concurrency < 1) throw ConfigError("backend: max_concurrency must be >= 1");
    if (max_retries < 0) throw ConfigError("backend: max_retries must be >= 0");
    if (base_backoff_ms < 0) throw ConfigError("backend: base_backoff_ms must be >= 0");
    if (requests_per_minute && *requests_per_minute <= 0.0) {
        throw ConfigError("backend: requests_per_minute must be positive");
    }
}

std::string canonical_request_encoding(const CompletionRequest& request) {
    std::string out;
    out += request.model;
    out.push_back('\0');
    out += request.prompt;
    out.push_back('\0');
    out += decimal(request.temperature);
    out.push_back('\0');
    out += decimal(request.max_tokens);
    out.push_back('\0');
    for (std::size_t i = 0; i < request.stop.size(); ++i) {
        if (i != 0) out.push_back('\x1f');
        out += request.stop[i];
    }
    return out;
}

CacheKey cache_key(const CompletionRequest& request) {
    return CacheKey{sha256_hex(canonical_request_encoding(request))};
}

HttpCompletionBackend::HttpCompletionBackend(BackendConfig config) : config_(std::move(config)) {
    config_.validate();
}

void HttpCompletionBackend::throttle() {
    if (!config_.requests_per_minute) return;
    const auto interval = std::chrono::milliseconds(
        static_cast<std::int64_t>(60000.0 / *config_.requests_per_minute));
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(rate_mutex_);
        const auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_slot_);
        next_slot_ = slot + interval;
    }
    std::this_thread::sleep_until(slot);
}

CompletionResponse HttpCompletionBackend::complete(const CompletionRequest& request) {
    if (request.prompt.empty()) throw UsageError("backend: prompt must be nonempty");
    if (request.max_tokens < 1) throw UsageError("backend: max_tokens must be >= 1");

    const SplitUrl url = split_url(config_.endpoint_url);
    const std::string path = url.path_prefix + "/v1/completions";

    httplib::Headers headers;
    if (!config_.auth_token_env.empty()) {
        if (const char* token = std::getenv(config_.auth_token_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }
    const std::string body = request_body(request, request.model).dump();

    const auto started = std::chrono::steady_clock::now();
    int last_status = 0;
    std::string last_detail = "connection failed";

    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) backoff_sleep(config_.base_backoff_ms, attempt - 1);
        throttle();

        httplib::Client client(url.base);
        client.set_connection_timeout(std::chrono::seconds(10));
        client.set_read_timeout(std::chrono::seconds(120));
        auto result = client.Post(path, headers, body, "application/json");

        if (!result) {
            last_status = 0;
            last_detail = "transport: " + httplib::to_string(result.error());
            continue; // timeouts and connect errors are transient
        }
        last_status = result->status;
        if (result->status == 200) {
            json parsed;
            try {
                parsed = json::parse(result->body);
            } catch (const json::exception& e) {
                throw TransportError("backend: malformed response body: " + std::string(e.what()),
                                     200);
            }
            if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
                parsed["choices"].empty() || !parsed["choices"][0].contains("text")) {
                throw TransportError("backend: response has no choices[0].text", 200);
            }
            CompletionResponse response;
            response.text = parsed["choices"][0]["text"].get<std::string>();
            if (parsed.contains("usage")) {
                const auto& usage = parsed["usage"];
                if (usage.contains("prompt_tokens")) {
                    response.prompt_tokens = usage["prompt_tokens"].get<int>();
                }
                if (usage.contains("completion_tokens")) {
                    response.completion_tokens = usage["completion_tokens"].get<int>();
                }
            }
            response.latency_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                                       std::chrono::steady_clock::now() - started)
                                                       .count());
            response.attempts = attempt + 1;
            return response;
        }
        if (!transient_status(result->status)) {
            std::string message = "backend: HTTP " + std::to_string(result->status) + " from " +
                                  config_.endpoint_url + " (permanent)";
            if (result->status == 401 || result->status == 403) {
                message += "; check the token in $" + config_.auth_token_env;
            }
            throw TransportError(message, result->status);
        }
        last_detail = "HTTP " + std::to_string(result->status);
    }
    throw TransportError("backend: retries exhausted after " +
                             std::to_string(config_.max_retries + 1) + " attempts; last: " +
                             last_detail,
                         last_status);
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path ResponseCache::entry_path(const CacheKey& key) const {
    return dir_ / key.digest.substr(0, 2) / key.digest.substr(2, 2) / (key.digest + ".json");
}

std::optional<CompletionResponse> ResponseCache::lookup(const CompletionRequest& request) const {
    const auto path = entry_path(cache_key(request));
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    try {
        const json entry = json::parse(in);
        CompletionResponse response;
        response.text = entry.at("text").get<std::string>();
        response.from_cache = true;
        response.attempts = 0;
        return response;
    } catch (const json::exception& e) {
        std::cerr << "warning: corrupt cache entry treated as miss: " << path.string() << ": "
                  << e.what() << "\n";
        return std::nullopt;
    }
}

void ResponseCache::store(const CompletionRequest& request, const CompletionResponse& response) const {
    const auto key = cache_key(request);
    const auto path = entry_path(key);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
        throw DataError("cache: cannot create " + path.parent_path().string() + ": " + ec.message());
    }

    const json entry = {{"request",
                         {{"model", request.model},
                          {"prompt", request.prompt},
                          {"max_tokens", request.max_tokens},
                          {"temperature", request.temperature},
                          {"stop", request.stop}}},
                        {"text", response.text},
                        {"created_unix_ms",
                         std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count()}};

    static std::atomic<std::uint64_t> counter{0};
    const auto tmp = path.parent_path() /
                     (key.digest + ".tmp." + std::to_string(counter.fetch_add(1)));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cache: cannot write " + tmp.string());
        out << entry.dump(2) << "\n";
        if (!out) throw DataError("cache: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DataError("cache: cannot publish " + path.string() + ": " + ec.message());
    }
}

ResponseCache::Stats ResponseCache::stats() const {
    Stats stats;
    if (!std::filesystem::exists(dir_)) return stats;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir_)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            ++stats.entries;
            stats.bytes += entry.file_size();
        }
    }
    return stats;
}

void ResponseCache::clear() const {
    if (!std::filesystem::exists(dir_)) return;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        std::filesystem::remove_all(entry.path());
    }
}

CachedBackend::CachedBackend(std::shared_ptr<CompletionBackend> inner,
                             std::filesystem::path cache_dir)
    : inner_(std::move(inner)), cache_(std::move(cache_dir)) {}

CompletionResponse CachedBackend::complete(const CompletionRequest& request) {
    if (auto hit = cache_.lookup(request)) {
        return *hit;
    }
    CompletionResponse response = inner_->complete(request);
    response.from_cache = false;
    cache_.store(request, response);
    return response;
}

CompletionResponse HeuristicMatchBackend::complete(const CompletionRequest& request) {
    const std::string& prompt = request.prompt;
    const auto block_start = prompt.rfind("\n\n");
    const std::string block =
        block_start == std::string::npos ? prompt : prompt.substr(block_start + 2);

    const auto noun_end = block.find(' ');
    if (noun_end == std::string::npos) {
        throw DataError("heuristic backend: final block has no '<Noun> A is ' marker");
    }
    const std::string noun = block.substr(0, noun_end);
    const std::string marker_a = noun + " A is ";
    if (block.rfind(marker_a, 0) != 0) {
        throw DataError("heuristic backend: final block has no '" + marker_a + "' marker");
    }
    const std::string marker_b = ". " + noun + " B is ";
    const auto b_pos = block.find(marker_b, marker_a.size());
    if (b_pos == std::string::npos) {
        throw DataError("heuristic backend: final block has no '" + marker_b + "' marker");
    }
    const auto question_pos = block.rfind(". Are ");
    if (question_pos == std::string::npos || question_pos <= b_pos) {
        throw DataError("heuristic backend: final block has no '. Are ' question marker");
    }

    const std::string left = block.substr(marker_a.size(), b_pos - marker_a.size());
    const auto b_text = b_pos + marker_b.size();
    const std::string right = block.substr(b_text, question_pos - b_text);

    const double similarity = jaccard(token_set(left), token_set(right));
    CompletionResponse response;
    response.text = similarity >= threshold_ ? "Yes" : "No";
    return response;
}

FixtureBackend::FixtureBackend(std::map<std::string, std::string> responses,
                               std::optional<std::string> default_text)
    : responses_(std::move(responses)), default_text_(std::move(default_text)) {}

FixtureBackend FixtureBackend::from_file(const std::filesystem::path& path,
                                         std::optional<std::string> default_text) {
    std::ifstream in(path);
    if (!in) throw DataError("fixture backend: cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("fixture backend: " + path.string() + ": " + e.what());
    }
    std::map<std::string, std::string> responses;
    const json* mapping = &doc;
    if (doc.is_object() && doc.contains("responses")) {
        if (doc.contains("default") && doc["default"].is_string() && !default_text) {
            default_text = doc["default"].get<std::string>();
        }
        mapping = &doc["responses"];
    }
    if (!mapping->is_object()) {
        throw DataError("fixture backend: " + path.string() + ": expected a prompt->text object");
    }
    for (const auto& [prompt, text] : mapping->items()) {
        if (!text.is_string()) {
            throw DataError("fixture backend: " + path.string() + ": responses must be strings");
        }
        responses[prompt] = text.get<std::string>();
    }
    return FixtureBackend(std::move(responses), std::move(default_text));
}

CompletionResponse FixtureBackend::complete(const CompletionRequest& request) {
    CompletionResponse response;
    const auto it = responses_.find(request.prompt);
    if (it != responses_.end()) {
        response.text = it->second;
        return response;
    }
    if (default_text_) {
        response.text = *default_text_;
        return response;
    }
    throw DataError("fixture backend: no response for prompt:\n" + request.prompt);
}

} // namespace wrangle
