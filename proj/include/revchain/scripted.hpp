#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revchain/prompts.hpp"
#include "revchain/resolver.hpp"
#include "revchain/trace.hpp"

namespace revchain {

/// Replays previously recorded decisions in order. Accepts either a planning
/// trace (JSON lines of {seq, kind, payload}) or a prompt-resolver request log
/// ({seq, scenario, request, reply, ...}); the two are distinguished per line
/// by their fields. Single-session: holds a cursor.
class ScriptedResolver : public Resolver {
 public:
  struct Entry {
    std::string kind;                // selection | completion | extraction
    nlohmann::ordered_json payload;  // trace payload, empty for log entries
    std::string raw_reply;           // model reply text, empty for trace entries
    bool from_log = false;
  };

  explicit ScriptedResolver(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  static ScriptedResolver from_trace_events(const std::vector<TraceEvent>& events) {
    std::vector<Entry> entries;
    for (const auto& e : events) {
      if (e.kind == "guard") continue;
      entries.push_back({e.kind, e.payload, "", false});
    }
    return ScriptedResolver(std::move(entries));
  }

  static ScriptedResolver from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ResolverError("cannot open script file: " + path);
    std::vector<Entry> entries;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::ordered_json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        throw ResolverError("malformed script line: " + line.substr(0, 80));
      if (j.contains("reply")) {
        entries.push_back({j.value("scenario", ""), nlohmann::ordered_json::object(),
                           j.at("reply").get<std::string>(), true});
      } else if (j.contains("kind")) {
        if (j.at("kind") == "guard") continue;
        entries.push_back({j.at("kind").get<std::string>(),
                           j.value("payload", nlohmann::ordered_json::object()), "", false});
      } else {
        throw ResolverError("unrecognized script line: " + line.substr(0, 80));
      }
    }
    return ScriptedResolver(std::move(entries));
  }

  std::optional<std::string> select_api(const SelectionRequest&) override {
    const Entry& e = next("selection");
    if (e.from_log) return parse_selection_reply(e.raw_reply).api;
    if (!e.payload.contains("chosen") || e.payload.at("chosen").is_null()) return std::nullopt;
    return e.payload.at("chosen").get<std::string>();
  }

  std::map<std::string, ArgOutcome> complete_arguments(const CompletionRequest& request) override {
    const Entry& e = next("completion");
    std::vector<std::string> expected;
    for (const auto& a : request.unfilled) expected.push_back(a.name);
    if (e.from_log) return parse_completion_reply(e.raw_reply, expected).outcomes;
    std::map<std::string, ArgOutcome> out;
    for (const auto& name : expected) out[name] = outcome_from_json(e.payload, name);
    return out;
  }

  ArgOutcome extract_value(const CompletionRequest&) override {
    const Entry& e = next("extraction");
    if (e.from_log) return parse_extraction_reply(e.raw_reply).outcome;
    return outcome_from_payload(e.payload.value("outcome", nlohmann::ordered_json::object()));
  }

  std::size_t remaining() const { return entries_.size() - cursor_; }

 private:
  const Entry& next(const std::string& kind) {
    if (cursor_ >= entries_.size())
      throw ResolverError("script exhausted while requesting a " + kind + " decision");
    const Entry& e = entries_[cursor_++];
    if (e.kind != kind)
      throw ResolverError("script mismatch: expected " + kind + ", found " + e.kind);
    return e;
  }

  static ArgOutcome outcome_from_payload(const nlohmann::ordered_json& j) {
    const std::string kind = j.value("kind", "none");
    if (kind == "value") return ArgOutcome::value(j.value("value", ""));
    if (kind == "api") return ArgOutcome::use_api(j.value("api", ""));
    return ArgOutcome::none();
  }

  static ArgOutcome outcome_from_json(const nlohmann::ordered_json& payload,
                                      const std::string& arg) {
    if (!payload.contains("outcomes") || !payload.at("outcomes").contains(arg))
      return ArgOutcome::none();
    return outcome_from_payload(payload.at("outcomes").at(arg));
  }

  std::vector<Entry> entries_;
  std::size_t cursor_ = 0;
};

}  // namespace revchain
