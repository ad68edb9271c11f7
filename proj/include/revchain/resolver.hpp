#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "revchain/plan.hpp"
#include "revchain/types.hpp"

namespace revchain {

/// Edge on the root-to-node path: the parent API and the argument taken.
struct PathStep {
  std::string api_name;
  std::string arg_name;
};

inline std::string path_to_string(const std::vector<PathStep>& path) {
  std::string s;
  for (const auto& step : path) {
    if (!s.empty()) s += "/";
    s += step.api_name + "." + step.arg_name;
  }
  return s.empty() ? "<root>" : s;
}

enum class SelectionScenario { FinalApi, ArgumentFill };

inline std::string to_string(SelectionScenario s) {
  return s == SelectionScenario::FinalApi ? "final_api" : "argument_fill";
}

struct SelectionRequest {
  std::string task_description;
  std::vector<ApiSpec> candidates;
  SelectionScenario scenario = SelectionScenario::FinalApi;
  std::vector<PathStep> path;  // empty for the final-API scenario
};

/// Per-argument decision returned by a resolver.
struct ArgOutcome {
  enum class Kind { Value, UseApi, NoneKnown };
  Kind kind = Kind::NoneKnown;
  std::string text;  // literal text for Value, API name for UseApi

  static ArgOutcome value(std::string v) { return {Kind::Value, std::move(v)}; }
  static ArgOutcome use_api(std::string name) { return {Kind::UseApi, std::move(name)}; }
  static ArgOutcome none() { return {Kind::NoneKnown, ""}; }

  bool operator==(const ArgOutcome&) const = default;
};

struct CompletionRequest {
  std::string query;
  std::vector<std::pair<std::string, std::string>> context;
  ApiSpec api;
  std::vector<ArgSpec> unfilled;
  std::map<std::string, std::vector<ApiSpec>> candidates_per_arg;
  std::vector<PathStep> path;  // edges from the plan root to this node
};

class ResolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The decision interface the planning engine calls.
class Resolver {
 public:
  virtual ~Resolver() = default;

  /// Returns a candidate name or nothing. Out-of-candidate answers are
  /// downgraded by the engine.
  virtual std::optional<std::string> select_api(const SelectionRequest& request) = 0;

  /// One outcome per unfilled argument.
  virtual std::map<std::string, ArgOutcome> complete_arguments(const CompletionRequest& request) = 0;

  /// Single-argument value extraction with no candidates visible; never UseApi.
  virtual ArgOutcome extract_value(const CompletionRequest& request) = 0;

  virtual bool concurrent_safe() const { return false; }
};

// ---------------------------------------------------------------------------
// Gold-plan oracle

/// Deterministic resolver built from gold plans, keyed by tree position so
/// repeated APIs with different bindings resolve correctly. With
/// `greedy_extract` it reproduces the documented failure mode of extracting a
/// nested literal where an API call is required.
class OracleResolver : public Resolver {
 public:
  explicit OracleResolver(std::vector<PlanNode> gold, bool greedy_extract = false)
      : gold_(std::move(gold)), greedy_extract_(greedy_extract) {
    if (gold_.empty()) throw ResolverError("oracle requires at least one gold plan");
  }

  OracleResolver(const PlanNode& gold, bool greedy_extract = false)
      : OracleResolver(std::vector<PlanNode>{gold}, greedy_extract) {}

  std::optional<std::string> select_api(const SelectionRequest& request) override {
    if (request.scenario == SelectionScenario::FinalApi) return gold_.front().api_name;
    if (request.path.empty()) throw ResolverError("oracle: argument-fill selection without a path");
    std::vector<PathStep> parent_path(request.path.begin(), request.path.end() - 1);
    const PlanNode& parent = navigate(parent_path);
    const Binding* b = parent.find(request.path.back().arg_name);
    if (b == nullptr) return std::nullopt;
    if (const auto* sc = std::get_if<SubCall>(b)) return sc->child->api_name;
    return std::nullopt;
  }

  std::map<std::string, ArgOutcome> complete_arguments(const CompletionRequest& request) override {
    const PlanNode& node = navigate(request.path);
    if (node.api_name != request.api.name)
      throw ResolverError("oracle: position/API mismatch at " + path_to_string(request.path) +
                          " (gold " + node.api_name + ", asked " + request.api.name + ")");
    std::map<std::string, ArgOutcome> out;
    for (const auto& arg : request.unfilled) out[arg.name] = outcome_for(node, arg.name);
    return out;
  }

  ArgOutcome extract_value(const CompletionRequest& request) override {
    if (request.unfilled.size() != 1)
      throw ResolverError("oracle: extraction expects exactly one argument");
    const PlanNode& node = navigate(request.path);
    const Binding* b = node.find(request.unfilled.front().name);
    if (b == nullptr) return ArgOutcome::none();
    if (const auto* lit = std::get_if<Literal>(b)) return ArgOutcome::value(lit->text);
    if (const auto* sc = std::get_if<SubCall>(b)) {
      if (!greedy_extract_) return ArgOutcome::none();  // correct restraint
      if (const auto* leaf = first_literal(*sc->child)) return ArgOutcome::value(leaf->text);
    }
    return ArgOutcome::none();
  }

  bool concurrent_safe() const override { return true; }

 private:
  const PlanNode& navigate(const std::vector<PathStep>& path) const {
    const PlanNode* cur = &gold_.front();
    for (const auto& step : path) {
      const Binding* b = cur->find(step.arg_name);
      const auto* sc = b ? std::get_if<SubCall>(b) : nullptr;
      if (sc == nullptr)
        throw ResolverError("oracle: request for a position outside the gold tree: " +
                            path_to_string(path));
      cur = sc->child.get();
    }
    return *cur;
  }

  ArgOutcome outcome_for(const PlanNode& node, const std::string& arg_name) const {
    const Binding* b = node.find(arg_name);
    if (b == nullptr) return ArgOutcome::none();
    if (const auto* lit = std::get_if<Literal>(b)) return ArgOutcome::value(lit->text);
    if (const auto* sc = std::get_if<SubCall>(b)) return ArgOutcome::use_api(sc->child->api_name);
    return ArgOutcome::none();
  }

  static const Literal* first_literal(const PlanNode& node) {
    for (const auto& [name, binding] : node.bindings) {
      if (const auto* lit = std::get_if<Literal>(&binding)) return lit;
      if (const auto* sc = std::get_if<SubCall>(&binding))
        if (const auto* found = first_literal(*sc->child)) return found;
    }
    return nullptr;
  }

  std::vector<PlanNode> gold_;
  bool greedy_extract_;
};

}  // namespace revchain
