#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revchain/plan.hpp"
#include "revchain/registry.hpp"

namespace revchain {

enum class VerdictOutcome { Correct, Incorrect, Malformed };

inline std::string to_string(VerdictOutcome o) {
  switch (o) {
    case VerdictOutcome::Correct: return "correct";
    case VerdictOutcome::Incorrect: return "incorrect";
    case VerdictOutcome::Malformed: return "malformed";
  }
  return "incorrect";
}

enum class ErrorClass { None, WrongFinalTool, WrongArgumentApi, WrongArgumentValue, OtherStructural };

inline std::string to_string(ErrorClass e) {
  switch (e) {
    case ErrorClass::None: return "none";
    case ErrorClass::WrongFinalTool: return "wrong_final_tool";
    case ErrorClass::WrongArgumentApi: return "wrong_argument_api";
    case ErrorClass::WrongArgumentValue: return "wrong_argument_value";
    case ErrorClass::OtherStructural: return "other_structural";
  }
  return "none";
}

struct Verdict {
  std::string instance_id;
  VerdictOutcome outcome = VerdictOutcome::Incorrect;
  ErrorClass error_class = ErrorClass::OtherStructural;
  std::string detail;
};

namespace detail {

struct DiffFlags {
  bool literal_api = false;   // gold sub-call answered with a literal
  bool value_diff = false;    // literal text mismatch
  bool structural = false;    // any other shape divergence
  std::string first_detail;
};

inline void note(DiffFlags& flags, bool& flag, const std::string& detail) {
  flag = true;
  if (flags.first_detail.empty()) flags.first_detail = detail;
}

inline void diff_nodes(const PlanNode& gold, const PlanNode& pred, const std::string& path,
                       DiffFlags& flags) {
  for (const auto& [key, gb] : gold.bindings) {
    const std::string here = path + "." + key;
    const Binding* pb = pred.find(key);
    if (pb == nullptr) {
      note(flags, flags.structural, "missing argument at " + here);
      continue;
    }
    if (const auto* gsc = std::get_if<SubCall>(&gb)) {
      if (std::holds_alternative<Literal>(*pb)) {
        note(flags, flags.literal_api,
             "argument at " + here + " needs API " + gsc->child->api_name +
                 " but got literal '" + std::get<Literal>(*pb).text + "'");
      } else if (const auto* psc = std::get_if<SubCall>(pb)) {
        if (gsc->child->api_name != psc->child->api_name)
          note(flags, flags.structural,
               "sub-call at " + here + " is " + psc->child->api_name + ", expected " +
                   gsc->child->api_name);
        else
          diff_nodes(*gsc->child, *psc->child, here + "/" + gsc->child->api_name, flags);
      } else {
        note(flags, flags.structural, "argument at " + here + " is unresolved");
      }
    } else if (const auto* glit = std::get_if<Literal>(&gb)) {
      if (const auto* plit = std::get_if<Literal>(pb)) {
        if (glit->text != plit->text)
          note(flags, flags.value_diff,
               "argument at " + here + " is '" + plit->text + "', expected '" + glit->text + "'");
      } else {
        note(flags, flags.structural, "argument at " + here + " is not a literal");
      }
    }
  }
  for (const auto& [key, pb] : pred.bindings)
    if (gold.find(key) == nullptr)
      note(flags, flags.structural, "unexpected argument at " + path + "." + key);
}

}  // namespace detail

/// Deterministic structural verdict. Error classes are assigned by fixed
/// priority: wrong final tool, then a literal standing in for a required
/// sub-call, then a literal value mismatch, then anything else.
inline Verdict judge(const std::optional<std::vector<PlanNode>>& predicted,
                     const std::vector<PlanNode>& gold, const std::string& instance_id = "") {
  Verdict v;
  v.instance_id = instance_id;
  if (!predicted.has_value()) {
    v.outcome = VerdictOutcome::Malformed;
    v.error_class = ErrorClass::OtherStructural;
    v.detail = "prediction could not be parsed";
    return v;
  }

  std::vector<PlanNode> g, p;
  g.reserve(gold.size());
  p.reserve(predicted->size());
  for (const auto& n : gold) g.push_back(canonicalize(n));
  for (const auto& n : *predicted) p.push_back(canonicalize(n));

  if (equivalent(g, p)) {
    v.outcome = VerdictOutcome::Correct;
    v.error_class = ErrorClass::None;
    return v;
  }
  v.outcome = VerdictOutcome::Incorrect;

  auto root_names = [](const std::vector<PlanNode>& nodes) {
    std::vector<std::string> names;
    for (const auto& n : nodes) names.push_back(n.api_name);
    std::sort(names.begin(), names.end());
    return names;
  };
  if (root_names(g) != root_names(p)) {
    v.error_class = ErrorClass::WrongFinalTool;
    v.detail = "final API mismatch: expected [" ;
    for (const auto& n : root_names(g)) v.detail += n + " ";
    v.detail += "], got [";
    for (const auto& n : root_names(p)) v.detail += n + " ";
    v.detail += "]";
    return v;
  }

  // Root multisets agree; pair calls by root name (canonical order breaks ties
  // deterministically) and diff each pair.
  auto by_key = [](const PlanNode& a, const PlanNode& b) {
    if (a.api_name != b.api_name) return a.api_name < b.api_name;
    return render_call_expr(a) < render_call_expr(b);
  };
  std::sort(g.begin(), g.end(), by_key);
  std::sort(p.begin(), p.end(), by_key);

  detail::DiffFlags flags;
  for (std::size_t i = 0; i < g.size(); ++i)
    detail::diff_nodes(g[i], p[i], g[i].api_name, flags);

  if (flags.literal_api)
    v.error_class = ErrorClass::WrongArgumentApi;
  else if (flags.value_diff && !flags.structural)
    v.error_class = ErrorClass::WrongArgumentValue;
  else
    v.error_class = ErrorClass::OtherStructural;
  v.detail = flags.first_detail;
  return v;
}

// ---------------------------------------------------------------------------
// Aggregation

struct LevelStat {
  int total = 0;
  int correct = 0;

  std::optional<double> accuracy() const {
    if (total == 0) return std::nullopt;
    return std::round(10000.0 * correct / total) / 100.0;
  }
};

struct EvalReport {
  LevelStat levels[3];  // L1, L2, L3
  LevelStat all;
  std::map<ErrorClass, int> error_counts;
  std::vector<Verdict> verdicts;
  std::string resolver_kind;
  std::string strategy_mode;
  std::string timestamp;

  double overall() const { return all.accuracy().value_or(0.0); }
};

/// Verdicts must be positionally aligned with instances.
inline EvalReport aggregate(const std::vector<Verdict>& verdicts,
                            const std::vector<TaskInstance>& instances,
                            const std::string& resolver_kind = "",
                            const std::string& strategy_mode = "",
                            const std::string& timestamp = "") {
  if (verdicts.size() != instances.size())
    throw std::invalid_argument("aggregate: one verdict per instance required");
  EvalReport report;
  report.resolver_kind = resolver_kind;
  report.strategy_mode = strategy_mode;
  report.timestamp = timestamp;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    LevelStat& stat = report.levels[static_cast<int>(instances[i].level)];
    ++stat.total;
    ++report.all.total;
    if (verdicts[i].outcome == VerdictOutcome::Correct) {
      ++stat.correct;
      ++report.all.correct;
    } else {
      ++report.error_counts[verdicts[i].error_class];
    }
    report.verdicts.push_back(verdicts[i]);
  }
  return report;
}

namespace detail {

inline std::string format_accuracy(const std::optional<double>& acc) {
  if (!acc) return "—";  // em dash for empty levels
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *acc);
  return buf;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const EvalReport& report, bool include_meta = true) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json levels;
  const char* names[3] = {"L1", "L2", "L3"};
  for (int i = 0; i < 3; ++i) {
    const LevelStat& s = report.levels[i];
    levels[names[i]] = {{"total", s.total},
                        {"correct", s.correct},
                        {"accuracy", s.accuracy() ? nlohmann::ordered_json(*s.accuracy())
                                                  : nlohmann::ordered_json(nullptr)}};
  }
  doc["levels"] = std::move(levels);
  doc["overall"] = report.all.accuracy() ? nlohmann::ordered_json(report.overall())
                                         : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json errors = nlohmann::ordered_json::object();
  for (ErrorClass e : {ErrorClass::WrongFinalTool, ErrorClass::WrongArgumentApi,
                       ErrorClass::WrongArgumentValue, ErrorClass::OtherStructural}) {
    auto it = report.error_counts.find(e);
    errors[to_string(e)] = it == report.error_counts.end() ? 0 : it->second;
  }
  doc["errors"] = std::move(errors);
  nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
  for (const auto& v : report.verdicts)
    verdicts.push_back({{"id", v.instance_id},
                        {"outcome", to_string(v.outcome)},
                        {"error_class", to_string(v.error_class)},
                        {"detail", v.detail}});
  doc["verdicts"] = std::move(verdicts);
  if (include_meta)
    doc["meta"] = {{"resolver", report.resolver_kind},
                   {"strategy", report.strategy_mode},
                   {"timestamp", report.timestamp}};
  return doc;
}

/// Aligned text table with level 1 | level 2 | level 3 | Overall columns.
inline std::string report_table(const EvalReport& report) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-12s %10s %10s %10s %10s\n", "", "level 1", "level 2",
                "level 3", "Overall");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-12s %10s %10s %10s %10s\n", "accuracy",
                detail::format_accuracy(report.levels[0].accuracy()).c_str(),
                detail::format_accuracy(report.levels[1].accuracy()).c_str(),
                detail::format_accuracy(report.levels[2].accuracy()).c_str(),
                detail::format_accuracy(report.all.accuracy()).c_str());
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-12s %10d %10d %10d %10d\n", "instances",
                report.levels[0].total, report.levels[1].total, report.levels[2].total,
                report.all.total);
  out += buf;
  return out;
}

}  // namespace revchain
