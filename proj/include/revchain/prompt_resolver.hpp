#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "revchain/prompts.hpp"
#include "revchain/resolver.hpp"

namespace revchain {

struct PromptResolverConfig {
  std::string endpoint_url;  // e.g. http://127.0.0.1:8089/v1/chat/completions
  std::string model_name = "gpt-3.5-turbo";
  double temperature = 0.1;
  int max_retries = 1;
  int timeout_seconds = 30;
  std::optional<std::string> request_log_path;
  std::string api_key;  // falls back to REVERSE_CHAIN_API_KEY
  int candidate_cap = kDefaultCandidateCap;
};

/// Resolver backed by a chat-completion-style HTTP endpoint. Every logical
/// decision is one logged entry; a malformed reply earns one re-ask with a
/// JSON-only reminder before degrading to none.
class PromptResolver : public Resolver {
 public:
  explicit PromptResolver(PromptResolverConfig config) : config_(std::move(config)) {
    if (config_.temperature < 0.0 || config_.temperature > 2.0)
      throw std::invalid_argument("temperature must be within [0, 2]");
    if (config_.api_key.empty()) {
      if (const char* env = std::getenv("REVERSE_CHAIN_API_KEY")) config_.api_key = env;
    }
    split_endpoint();
    if (config_.request_log_path) {
      log_.open(*config_.request_log_path, std::ios::trunc);
      if (!log_) throw std::runtime_error("cannot open request log: " + *config_.request_log_path);
    }
  }

  std::optional<std::string> select_api(const SelectionRequest& request) override {
    std::string prompt = render_selection_prompt(request, config_.candidate_cap);
    auto [reply, attempts] = ask(prompt, [](const std::string& r) {
      return !parse_selection_reply(r).malformed;
    });
    log_entry("selection", prompt, reply, attempts);
    return parse_selection_reply(reply).api;
  }

  std::map<std::string, ArgOutcome> complete_arguments(const CompletionRequest& request) override {
    std::vector<std::string> expected;
    for (const auto& a : request.unfilled) expected.push_back(a.name);
    std::string prompt = render_completion_prompt(request, config_.candidate_cap);
    auto [reply, attempts] = ask(prompt, [&](const std::string& r) {
      return !parse_completion_reply(r, expected).malformed;
    });
    log_entry("completion", prompt, reply, attempts);
    return parse_completion_reply(reply, expected).outcomes;
  }

  ArgOutcome extract_value(const CompletionRequest& request) override {
    std::string prompt = render_extraction_prompt(request);
    auto [reply, attempts] = ask(prompt, [](const std::string& r) {
      return !parse_extraction_reply(r).malformed;
    });
    log_entry("extraction", prompt, reply, attempts);
    return parse_extraction_reply(reply).outcome;
  }

  bool concurrent_safe() const override { return false; }  // shared log cursor

 private:
  void split_endpoint() {
    const std::string& url = config_.endpoint_url;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
      throw std::invalid_argument("endpoint URL must include a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      host_ = url;
      path_ = "/";
    } else {
      host_ = url.substr(0, path_start);
      path_ = url.substr(path_start);
    }
  }

  template <typename WellFormed>
  std::pair<std::string, std::vector<std::string>> ask(const std::string& prompt,
                                                       WellFormed&& well_formed) {
    std::vector<std::string> attempts;
    std::string current = prompt;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      std::string reply = call_endpoint(current);
      if (well_formed(reply) || attempt == config_.max_retries)
        return {reply, attempts};
      attempts.push_back(reply);
      current = prompt + "\n\nYour previous reply could not be parsed. Reply with JSON only.";
    }
    return {"", attempts};
  }

  std::string call_endpoint(const std::string& prompt) {
    nlohmann::ordered_json body;
    body["model"] = config_.model_name;
    body["temperature"] = config_.temperature;
    body["messages"] = nlohmann::ordered_json::array(
        {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}});

    httplib::Client client(host_);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (!config_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    last_latency_ms_ = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    if (!res)
      throw ResolverError("endpoint transport failure: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw ResolverError("endpoint returned HTTP " + std::to_string(res->status));
    auto doc = nlohmann::ordered_json::parse(res->body, nullptr, false);
    if (doc.is_discarded())
      throw ResolverError("endpoint reply is not JSON");
    try {
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw ResolverError("endpoint reply missing choices[0].message.content");
    }
  }

  void log_entry(const std::string& scenario, const std::string& prompt, const std::string& reply,
                 const std::vector<std::string>& attempts) {
    if (!log_.is_open()) return;
    std::lock_guard<std::mutex> lock(log_mutex_);
    nlohmann::ordered_json line;
    line["seq"] = seq_++;
    line["scenario"] = scenario;
    line["request"] = {{"model", config_.model_name},
                       {"temperature", config_.temperature},
                       {"prompt", prompt}};
    if (!attempts.empty()) line["discarded_attempts"] = attempts;
    line["reply"] = reply;
    line["latency_ms"] = last_latency_ms_;
    log_ << line.dump() << '\n';
    log_.flush();
  }

  PromptResolverConfig config_;
  std::string host_;
  std::string path_;
  std::ofstream log_;
  std::mutex log_mutex_;
  int seq_ = 0;
  long long last_latency_ms_ = 0;
};

}  // namespace revchain
