#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revchain/plan.hpp"
#include "revchain/registry.hpp"
#include "revchain/resolver.hpp"
#include "revchain/trace.hpp"

namespace revchain {

enum class StrategyMode { AllAtOnce, OneByOne, ThreeStep };

inline std::string to_string(StrategyMode m) {
  switch (m) {
    case StrategyMode::AllAtOnce: return "all-at-once";
    case StrategyMode::OneByOne: return "one-by-one";
    case StrategyMode::ThreeStep: return "three-step";
  }
  return "all-at-once";
}

inline std::optional<StrategyMode> parse_strategy_mode(std::string_view s) {
  if (s == "all-at-once") return StrategyMode::AllAtOnce;
  if (s == "one-by-one") return StrategyMode::OneByOne;
  if (s == "three-step") return StrategyMode::ThreeStep;
  return std::nullopt;
}

struct StrategyConfig {
  StrategyMode mode = StrategyMode::AllAtOnce;
  int max_depth = 8;
  int max_resolver_calls = 64;
};

enum class PlanStatus { Complete, NeedsUserInput, Failed };

inline std::string to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::Complete: return "complete";
    case PlanStatus::NeedsUserInput: return "needs-user-input";
    case PlanStatus::Failed: return "failed";
  }
  return "failed";
}

struct PlanningOutcome {
  PlanNode plan;
  PlanningTrace trace;
  PlanStatus status = PlanStatus::Failed;
  std::string failure_reason;
};

namespace detail {

inline bool contains_ask_user(const PlanNode& node) {
  for (const auto& [name, binding] : node.bindings) {
    if (std::holds_alternative<AskUser>(binding)) return true;
    if (const auto* sc = std::get_if<SubCall>(&binding))
      if (contains_ask_user(*sc->child)) return true;
  }
  return false;
}

inline nlohmann::ordered_json outcome_to_json(const ArgOutcome& oc) {
  nlohmann::ordered_json j;
  switch (oc.kind) {
    case ArgOutcome::Kind::Value:
      j["kind"] = "value";
      j["value"] = oc.text;
      break;
    case ArgOutcome::Kind::UseApi:
      j["kind"] = "api";
      j["api"] = oc.text;
      break;
    case ArgOutcome::Kind::NoneKnown:
      j["kind"] = "none";
      break;
  }
  return j;
}

/// One backward-chaining session. Strictly sequential; resolver decisions are
/// order-dependent.
class PlanningSession {
 public:
  PlanningSession(std::string query, std::vector<std::pair<std::string, std::string>> context,
                  const ApiPool& pool, Resolver& resolver, StrategyConfig config)
      : query_(std::move(query)),
        context_(std::move(context)),
        pool_(pool),
        resolver_(resolver),
        config_(config) {}

  PlanningOutcome run() {
    PlanningOutcome outcome;
    try {
      SelectionRequest req{query_, pool_.apis, SelectionScenario::FinalApi, {}};
      auto root_name = guarded_select(req);
      if (failed_) return finish(outcome, PlanNode{});
      if (!root_name) {
        fail("no final API selected");
        return finish(outcome, PlanNode{});
      }
      PlanNode root{*root_name, {}};
      std::vector<std::string> path_names{root.api_name};
      std::vector<PathStep> path;
      complete_node(root, path_names, path, 1);
      return finish(outcome, std::move(root));
    } catch (const ResolverError& e) {
      fail(std::string("resolver error: ") + e.what());
      return finish(outcome, PlanNode{});
    }
  }

 private:
  PlanningOutcome finish(PlanningOutcome& outcome, PlanNode plan) {
    outcome.plan = std::move(plan);
    outcome.trace.events = std::move(trace_);
    if (failed_) {
      outcome.status = PlanStatus::Failed;
      outcome.failure_reason = fail_reason_;
    } else {
      outcome.status =
          contains_ask_user(outcome.plan) ? PlanStatus::NeedsUserInput : PlanStatus::Complete;
    }
    return outcome;
  }

  void fail(std::string reason) {
    if (!failed_) {
      failed_ = true;
      fail_reason_ = std::move(reason);
    }
  }

  void guard_event(const std::string& kind, const std::string& location) {
    trace_.push_back({"guard", {{"guard", kind}, {"location", location}}});
    fail(kind + " guard tripped at " + location);
  }

  bool budget_ok(const std::string& location) {
    if (calls_ >= config_.max_resolver_calls) {
      guard_event("budget", location);
      return false;
    }
    return true;
  }

  std::optional<std::string> guarded_select(const SelectionRequest& req) {
    if (!budget_ok(path_to_string(req.path))) return std::nullopt;
    ++calls_;
    auto choice = resolver_.select_api(req);
    std::vector<std::string> anomalies;
    if (choice) {
      bool known = false;
      for (const auto& c : req.candidates)
        if (c.name == *choice) known = true;
      if (!known) {
        anomalies.push_back("selected API '" + *choice + "' is not a candidate");
        choice.reset();
      }
    }
    nlohmann::ordered_json payload;
    payload["scenario"] = to_string(req.scenario);
    payload["task"] = req.task_description;
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (const auto& c : req.candidates) names.push_back(c.name);
    payload["candidates"] = std::move(names);
    payload["chosen"] = choice ? nlohmann::ordered_json(*choice) : nlohmann::ordered_json(nullptr);
    if (!anomalies.empty()) payload["anomalies"] = anomalies;
    trace_.push_back({"selection", std::move(payload)});
    return choice;
  }

  std::map<std::string, ArgOutcome> guarded_complete(const CompletionRequest& req) {
    if (!budget_ok(path_to_string(req.path))) return {};
    ++calls_;
    auto raw = resolver_.complete_arguments(req);
    std::vector<std::string> anomalies;
    std::map<std::string, ArgOutcome> out;
    for (const auto& arg : req.unfilled) {
      auto it = raw.find(arg.name);
      if (it == raw.end()) {
        anomalies.push_back("no outcome for argument '" + arg.name + "'");
        out[arg.name] = ArgOutcome::none();
        continue;
      }
      out[arg.name] = validate_outcome(it->second, req, arg.name, anomalies);
    }
    for (const auto& [name, oc] : raw)
      if (out.find(name) == out.end())
        anomalies.push_back("outcome for unknown argument '" + name + "' ignored");
    nlohmann::ordered_json payload;
    payload["api"] = req.api.name;
    nlohmann::ordered_json outcomes = nlohmann::ordered_json::object();
    for (const auto& arg : req.unfilled) outcomes[arg.name] = outcome_to_json(out[arg.name]);
    payload["outcomes"] = std::move(outcomes);
    if (!anomalies.empty()) payload["anomalies"] = anomalies;
    trace_.push_back({"completion", std::move(payload)});
    return out;
  }

  std::optional<ArgOutcome> guarded_extract(const CompletionRequest& req) {
    if (!budget_ok(path_to_string(req.path))) return std::nullopt;
    ++calls_;
    ArgOutcome oc = resolver_.extract_value(req);
    std::vector<std::string> anomalies;
    if (oc.kind == ArgOutcome::Kind::UseApi) {
      anomalies.push_back("extraction returned an API; downgraded to none");
      oc = ArgOutcome::none();
    }
    nlohmann::ordered_json payload;
    payload["api"] = req.api.name;
    payload["arg"] = req.unfilled.front().name;
    payload["outcome"] = outcome_to_json(oc);
    if (!anomalies.empty()) payload["anomalies"] = anomalies;
    trace_.push_back({"extraction", std::move(payload)});
    return oc;
  }

  ArgOutcome validate_outcome(const ArgOutcome& oc, const CompletionRequest& req,
                              const std::string& arg_name, std::vector<std::string>& anomalies) {
    if (oc.kind != ArgOutcome::Kind::UseApi) return oc;
    auto it = req.candidates_per_arg.find(arg_name);
    if (it != req.candidates_per_arg.end())
      for (const auto& c : it->second)
        if (c.name == oc.text) return oc;
    anomalies.push_back("API '" + oc.text + "' for argument '" + arg_name +
                        "' is not a candidate; downgraded to none");
    return ArgOutcome::none();
  }

  /// Gathers one outcome per declared argument, then materializes bindings and
  /// recurses into new sub-calls depth-first, left-to-right.
  void complete_node(PlanNode& node, std::vector<std::string>& path_names,
                     std::vector<PathStep>& path, int depth) {
    const ApiSpec* spec = lookup(pool_, node.api_name);
    if (spec == nullptr) {
      fail("selected API '" + node.api_name + "' is not in the pool");
      return;
    }
    if (spec->arguments.empty()) return;

    std::map<std::string, std::vector<ApiSpec>> candidates;
    for (const auto& arg : spec->arguments)
      candidates[arg.name] = filter_by_type(pool_, arg.value_type);

    std::map<std::string, ArgOutcome> outcomes;
    switch (config_.mode) {
      case StrategyMode::AllAtOnce: {
        CompletionRequest req{query_, context_, *spec, spec->arguments, candidates, path};
        outcomes = guarded_complete(req);
        break;
      }
      case StrategyMode::OneByOne: {
        for (const auto& arg : spec->arguments) {
          if (failed_) return;
          CompletionRequest req{query_, context_, *spec, {arg}, candidates, path};
          auto one = guarded_complete(req);
          if (auto it = one.find(arg.name); it != one.end()) outcomes[arg.name] = it->second;
        }
        break;
      }
      case StrategyMode::ThreeStep: {
        for (const auto& arg : spec->arguments) {
          if (failed_) return;
          CompletionRequest req{query_, context_, *spec, {arg}, {}, path};
          auto extracted = guarded_extract(req);
          if (failed_) return;
          if (extracted && extracted->kind == ArgOutcome::Kind::Value) {
            outcomes[arg.name] = *extracted;
            continue;
          }
          const auto& cands = candidates[arg.name];
          if (cands.empty()) {
            // No type-matched API exists; fall straight back to asking the user.
            outcomes[arg.name] = ArgOutcome::none();
            continue;
          }
          std::vector<PathStep> sel_path = path;
          sel_path.push_back({spec->name, arg.name});
          SelectionRequest sel{arg.description, cands, SelectionScenario::ArgumentFill, sel_path};
          auto chosen = guarded_select(sel);
          if (failed_) return;
          outcomes[arg.name] = chosen ? ArgOutcome::use_api(*chosen) : ArgOutcome::none();
        }
        break;
      }
    }
    if (failed_) return;

    for (const auto& arg : spec->arguments) {
      ArgOutcome oc = outcomes.count(arg.name) ? outcomes[arg.name] : ArgOutcome::none();
      switch (oc.kind) {
        case ArgOutcome::Kind::Value:
          node.bindings.emplace_back(arg.name, Literal{oc.text, arg.value_type});
          break;
        case ArgOutcome::Kind::NoneKnown:
          node.bindings.emplace_back(arg.name, AskUser{arg.name + "?"});
          break;
        case ArgOutcome::Kind::UseApi: {
          std::string location = path_to_string(path) + "/" + spec->name + "." + arg.name;
          for (const auto& on_path : path_names) {
            if (on_path == oc.text) {
              guard_event("cycle", location);
              return;
            }
          }
          if (depth + 1 > config_.max_depth) {
            guard_event("depth", location);
            return;
          }
          PlanNode child{oc.text, {}};
          path_names.push_back(oc.text);
          path.push_back({spec->name, arg.name});
          complete_node(child, path_names, path, depth + 1);
          path.pop_back();
          path_names.pop_back();
          if (failed_) return;
          node.bindings.emplace_back(arg.name, SubCall{std::move(child)});
          break;
        }
      }
    }
  }

  std::string query_;
  std::vector<std::pair<std::string, std::string>> context_;
  const ApiPool& pool_;
  Resolver& resolver_;
  StrategyConfig config_;
  std::vector<TraceEvent> trace_;
  int calls_ = 0;
  bool failed_ = false;
  std::string fail_reason_;
};

}  // namespace detail

/// Plans backward from the final API for a query: selects the goal API, then
/// recursively completes arguments until every one is bound, a user question
/// remains, or a guard trips.
inline PlanningOutcome plan_query(const std::string& query,
                                  const std::vector<std::pair<std::string, std::string>>& context,
                                  const ApiPool& pool, Resolver& resolver,
                                  const StrategyConfig& config = {}) {
  return detail::PlanningSession(query, context, pool, resolver, config).run();
}

namespace detail {

inline void substitute_answers(PlanNode& node,
                               const std::map<std::string, std::string>& answers,
                               std::set<std::string>& used) {
  for (auto& [name, binding] : node.bindings) {
    if (auto* ask = std::get_if<AskUser>(&binding)) {
      auto it = answers.find(ask->question);
      if (it != answers.end()) {
        used.insert(it->first);
        binding = Literal{it->second, ValueType::Unknown};
      }
    } else if (auto* sc = std::get_if<SubCall>(&binding)) {
      substitute_answers(*sc->child, answers, used);
    }
  }
}

}  // namespace detail

/// Replaces answered AskUser bindings with literals and recomputes the status.
/// Answers for non-existent questions are reported via `unmatched` and ignored.
inline PlanningOutcome fill_ask_user(const PlanningOutcome& outcome,
                                     const std::map<std::string, std::string>& answers,
                                     std::vector<std::string>* unmatched = nullptr) {
  PlanningOutcome out = outcome;
  std::set<std::string> used;
  detail::substitute_answers(out.plan, answers, used);
  if (unmatched)
    for (const auto& [q, a] : answers)
      if (used.find(q) == used.end()) unmatched->push_back(q);
  if (out.status != PlanStatus::Failed)
    out.status =
        detail::contains_ask_user(out.plan) ? PlanStatus::NeedsUserInput : PlanStatus::Complete;
  return out;
}

}  // namespace revchain
