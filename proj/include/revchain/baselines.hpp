#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "revchain/plan.hpp"
#include "revchain/registry.hpp"

namespace revchain {

enum class BaselineMethod { ZeroShot, FewShot, ZeroShotCoT, FewShotCoT };

inline std::string to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::ZeroShot: return "zero-shot";
    case BaselineMethod::FewShot: return "few-shot";
    case BaselineMethod::ZeroShotCoT: return "zero-shot-cot";
    case BaselineMethod::FewShotCoT: return "few-shot-cot";
  }
  return "zero-shot";
}

inline std::optional<BaselineMethod> parse_baseline_method(std::string_view s) {
  if (s == "zero-shot") return BaselineMethod::ZeroShot;
  if (s == "few-shot") return BaselineMethod::FewShot;
  if (s == "zero-shot-cot") return BaselineMethod::ZeroShotCoT;
  if (s == "few-shot-cot") return BaselineMethod::FewShotCoT;
  return std::nullopt;
}

namespace detail {

inline const char* kFewShotExamples =
    "Example 1:\n"
    "Query: Please help Jack book a meeting room from 9:00 am to 10:00 am\n"
    "Answer: BookRoom(person_ID=Name2ID(person_name='Jack'), "
    "room_ID=RecommendRoom(start_time='9:00 am', end_time='10:00 am'), "
    "start_time='9:00 am', end_time='10:00 am')\n"
    "Example 2:\n"
    "Query: I'm Lucas, could you find a flight and book it to my destination?\n"
    "Answer: BookFlight(flight_ID=FindFlight(destination="
    "GetUserDestination(userName='Lucas')))\n";

inline const char* kFewShotCoTExamples =
    "Example 1:\n"
    "Query: Please help Jack book a meeting room from 9:00 am to 10:00 am\n"
    "Reasoning: The goal is booking a room, so the final call is BookRoom. Its person_ID "
    "is not in the query but Name2ID produces it from the name 'Jack'; its room_ID comes "
    "from RecommendRoom given the two times; start_time and end_time appear in the query.\n"
    "Answer: BookRoom(person_ID=Name2ID(person_name='Jack'), "
    "room_ID=RecommendRoom(start_time='9:00 am', end_time='10:00 am'), "
    "start_time='9:00 am', end_time='10:00 am')\n"
    "Example 2:\n"
    "Query: I'm Lucas, could you find a flight and book it to my destination?\n"
    "Reasoning: The goal is booking a flight, so the final call is BookFlight. Its "
    "flight_ID comes from FindFlight, whose destination comes from GetUserDestination "
    "given the user name 'Lucas'.\n"
    "Answer: BookFlight(flight_ID=FindFlight(destination="
    "GetUserDestination(userName='Lucas')))\n";

}  // namespace detail

/// Single-prompt baselines: the whole plan is requested in one shot, with the
/// call-expression grammar as the demanded output format.
inline std::string render_baseline_prompt(BaselineMethod method, const TaskInstance& instance) {
  std::ostringstream os;
  os << "You are an assistant that plans API calls to resolve a user query.\n";
  os << "Available APIs:\n";
  for (const auto& api : instance.pool.apis) {
    os << "- " << api.name << ": " << api.description << " Arguments:";
    if (api.arguments.empty()) os << " none";
    for (const auto& arg : api.arguments)
      os << " " << arg.name << " (" << to_string(arg.value_type) << ");";
    os << " Output: " << api.output.name << " (" << to_string(api.output.value_type) << ").\n";
  }
  if (!instance.context.empty()) {
    os << "Context:\n";
    for (const auto& [k, v] : instance.context) os << "- " << k << ": " << v << "\n";
  }
  if (method == BaselineMethod::FewShot || method == BaselineMethod::FewShotCoT)
    os << "Worked examples:\n"
       << (method == BaselineMethod::FewShot ? detail::kFewShotExamples
                                             : detail::kFewShotCoTExamples);
  if (method == BaselineMethod::ZeroShotCoT || method == BaselineMethod::FewShotCoT)
    os << "Think step by step: identify the goal API first, then work out where each "
          "argument value comes from, nesting API calls where needed.\n";
  os << "Query: " << instance.query << "\n";
  os << "Answer with the complete plan as nested call expressions of the form "
        "Name(arg='value', other=Other(...)); separate independent top-level calls "
        "with ';'. End your reply with the plan.";
  return os.str();
}

/// Scans a free-text reply for call expressions; the last contiguous block of
/// calls wins, so chain-of-thought prose before the final answer is ignored.
/// Returns nothing when no well-formed call is present.
inline std::optional<std::vector<PlanNode>> parse_baseline_reply(const std::string& text) {
  struct Match {
    PlanNode node;
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Match> matches;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
      ++pos;
      continue;
    }
    // Names directly preceded by identifier characters are substrings, skip.
    if (pos > 0 && (std::isalnum(static_cast<unsigned char>(text[pos - 1])) ||
                    text[pos - 1] == '_')) {
      while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                   text[pos] == '_'))
        ++pos;
      continue;
    }
    if (auto parsed = try_parse_call_at(text, pos)) {
      matches.push_back({std::move(parsed->first), pos, parsed->second});
      pos = parsed->second;
    } else {
      while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                   text[pos] == '_'))
        ++pos;
    }
  }
  if (matches.empty()) return std::nullopt;

  auto is_separator_gap = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      char c = text[i];
      if (!(c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ';' || c == ',' || c == '.'))
        return false;
    }
    return true;
  };

  std::size_t block_start = matches.size() - 1;
  while (block_start > 0 &&
         is_separator_gap(matches[block_start - 1].end, matches[block_start].begin))
    --block_start;

  std::vector<PlanNode> out;
  for (std::size_t i = block_start; i < matches.size(); ++i)
    out.push_back(std::move(matches[i].node));
  return out;
}

}  // namespace revchain
