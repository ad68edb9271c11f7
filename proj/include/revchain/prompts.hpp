#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "revchain/resolver.hpp"

namespace revchain {

inline constexpr int kDefaultCandidateCap = 32;

namespace detail {

inline void render_candidate_lines(std::ostringstream& os, const std::vector<ApiSpec>& candidates,
                                   int cap) {
  int shown = 0;
  for (const auto& api : candidates) {
    if (shown >= cap) break;
    os << "- " << api.name << ": " << api.description << " (output: " << api.output.name << " ["
       << to_string(api.output.value_type) << "])\n";
    ++shown;
  }
  if (static_cast<int>(candidates.size()) > cap)
    os << "(" << candidates.size() - cap << " more candidates omitted)\n";
}

inline void render_context_section(std::ostringstream& os,
                                   const std::vector<std::pair<std::string, std::string>>& context) {
  if (context.empty()) return;
  os << "Context:\n";
  for (const auto& [k, v] : context) os << "- " << k << ": " << v << "\n";
}

}  // namespace detail

/// Prompt asking the model to pick one API for a task description.
inline std::string render_selection_prompt(const SelectionRequest& request,
                                           int candidate_cap = kDefaultCandidateCap) {
  std::ostringstream os;
  os << "You are choosing the single API that accomplishes a task.\n";
  if (request.scenario == SelectionScenario::FinalApi)
    os << "Task: " << request.task_description << "\n";
  else
    os << "Task: produce a value for this argument: " << request.task_description << "\n";
  os << "Candidate APIs:\n";
  detail::render_candidate_lines(os, request.candidates, candidate_cap);
  os << "Reply with exactly one JSON object: {\"api\": \"<candidate name>\"} "
        "or {\"api\": null} if no candidate fits.";
  return os.str();
}

/// Prompt asking the model to fill all unfilled arguments of one API call.
inline std::string render_completion_prompt(const CompletionRequest& request,
                                            int candidate_cap = kDefaultCandidateCap) {
  std::ostringstream os;
  os << "You are filling the required arguments of an API call.\n";
  os << "User query: " << request.query << "\n";
  detail::render_context_section(os, request.context);
  os << "API: " << request.api.name << ": " << request.api.description << "\n";
  os << "Unfilled arguments:\n";
  for (const auto& arg : request.unfilled)
    os << "- " << arg.name << " (" << to_string(arg.value_type) << "): " << arg.description << "\n";
  for (const auto& arg : request.unfilled) {
    auto it = request.candidates_per_arg.find(arg.name);
    if (it == request.candidates_per_arg.end() || it->second.empty()) continue;
    os << "Candidate APIs whose output can fill " << arg.name << ":\n";
    detail::render_candidate_lines(os, it->second, candidate_cap);
  }
  os << "For every unfilled argument, decide one of: a value taken from the query or context, "
        "a candidate API whose output supplies it, or none if neither applies.\n";
  os << "Reply with exactly one JSON object mapping each argument name to "
        "{\"kind\": \"value\", \"value\": \"<text>\"} or "
        "{\"kind\": \"api\", \"api\": \"<candidate name>\"} or "
        "{\"kind\": \"none\"}.";
  return os.str();
}

/// Prompt for the query-only value-extraction step (no candidates visible).
inline std::string render_extraction_prompt(const CompletionRequest& request) {
  std::ostringstream os;
  const ArgSpec& arg = request.unfilled.front();
  os << "Extract the value of one argument from the user query and context, if present.\n";
  os << "User query: " << request.query << "\n";
  detail::render_context_section(os, request.context);
  os << "API: " << request.api.name << ": " << request.api.description << "\n";
  os << "Argument: " << arg.name << " (" << to_string(arg.value_type) << "): " << arg.description
     << "\n";
  os << "Reply with exactly one JSON object: {\"value\": \"<text>\"} "
        "or {\"value\": null} if the value is not present.";
  return os.str();
}

// ---------------------------------------------------------------------------
// Model reply parsing

/// Finds the first balanced JSON object in free text, tolerating surrounding
/// prose and code fences.
inline std::optional<nlohmann::ordered_json> extract_first_json_object(std::string_view text) {
  for (std::size_t start = text.find('{'); start != std::string_view::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (escaped)
          escaped = false;
        else if (c == '\\')
          escaped = true;
        else if (c == '"')
          in_string = false;
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          auto j = nlohmann::ordered_json::parse(text.substr(start, i - start + 1), nullptr, false);
          if (!j.is_discarded() && j.is_object()) return j;
          break;  // balanced but invalid; try the next '{'
        }
      }
    }
  }
  return std::nullopt;
}

struct SelectionReply {
  bool malformed = false;
  std::optional<std::string> api;
};

inline SelectionReply parse_selection_reply(std::string_view text) {
  auto j = extract_first_json_object(text);
  if (!j || !j->contains("api")) return {true, std::nullopt};
  const auto& v = j->at("api");
  if (v.is_null()) return {false, std::nullopt};
  if (v.is_string()) return {false, v.get<std::string>()};
  return {true, std::nullopt};
}

struct CompletionReply {
  bool malformed = false;
  std::map<std::string, ArgOutcome> outcomes;
  std::vector<std::string> anomalies;
};

/// Maps a model reply onto one outcome per expected argument. Missing keys
/// become NoneKnown with an anomaly note; extra keys are ignored and noted.
inline CompletionReply parse_completion_reply(std::string_view text,
                                              const std::vector<std::string>& expected_args) {
  CompletionReply reply;
  auto j = extract_first_json_object(text);
  if (!j) {
    reply.malformed = true;
    for (const auto& a : expected_args) reply.outcomes[a] = ArgOutcome::none();
    return reply;
  }
  for (const auto& arg : expected_args) {
    if (!j->contains(arg)) {
      reply.outcomes[arg] = ArgOutcome::none();
      reply.anomalies.push_back("missing argument '" + arg + "' in reply");
      continue;
    }
    const auto& v = j->at(arg);
    if (v.is_string()) {  // shorthand for a plain value
      reply.outcomes[arg] = ArgOutcome::value(v.get<std::string>());
    } else if (v.is_object()) {
      const std::string kind = v.value("kind", "");
      if (kind == "value" && v.contains("value") && !v.at("value").is_null()) {
        const auto& val = v.at("value");
        reply.outcomes[arg] = ArgOutcome::value(val.is_string() ? val.get<std::string>() : val.dump());
      } else if (kind == "api" && v.contains("api") && v.at("api").is_string()) {
        reply.outcomes[arg] = ArgOutcome::use_api(v.at("api").get<std::string>());
      } else if (kind == "none") {
        reply.outcomes[arg] = ArgOutcome::none();
      } else {
        reply.outcomes[arg] = ArgOutcome::none();
        reply.anomalies.push_back("unrecognized outcome shape for '" + arg + "'");
      }
    } else {
      reply.outcomes[arg] = ArgOutcome::none();
      reply.anomalies.push_back("unrecognized outcome shape for '" + arg + "'");
    }
  }
  for (auto it = j->begin(); it != j->end(); ++it) {
    if (std::find(expected_args.begin(), expected_args.end(), it.key()) == expected_args.end())
      reply.anomalies.push_back("reply names unknown argument '" + it.key() + "'");
  }
  return reply;
}

struct ExtractionReply {
  bool malformed = false;
  ArgOutcome outcome = ArgOutcome::none();
};

inline ExtractionReply parse_extraction_reply(std::string_view text) {
  auto j = extract_first_json_object(text);
  if (!j || !j->contains("value")) return {true, ArgOutcome::none()};
  const auto& v = j->at("value");
  if (v.is_null()) return {false, ArgOutcome::none()};
  if (v.is_string()) return {false, ArgOutcome::value(v.get<std::string>())};
  return {false, ArgOutcome::value(v.dump())};
}

}  // namespace revchain
