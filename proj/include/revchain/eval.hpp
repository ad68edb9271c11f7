#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "revchain/engine.hpp"
#include "revchain/judge.hpp"
#include "revchain/registry.hpp"
#include "revchain/resolver.hpp"

namespace revchain {

/// Planning outcome mapped onto a judgeable prediction: a failed session has
/// no plan and is graded as malformed.
inline std::optional<std::vector<PlanNode>> prediction_from_outcome(const PlanningOutcome& outcome) {
  if (outcome.status == PlanStatus::Failed) return std::nullopt;
  return std::vector<PlanNode>{outcome.plan};
}

/// Evaluates every instance with a per-instance gold oracle. Instances fan out
/// across `workers` threads; verdicts keep instance order.
inline std::vector<Verdict> evaluate_with_oracle(const std::vector<TaskInstance>& instances,
                                                 const StrategyConfig& strategy, int workers = 1) {
  std::vector<Verdict> verdicts(instances.size());
  auto grade = [&](std::size_t i) {
    const TaskInstance& inst = instances[i];
    OracleResolver oracle(inst.gold_plans);
    PlanningOutcome outcome = plan_query(inst.query, inst.context, inst.pool, oracle, strategy);
    verdicts[i] = judge(prediction_from_outcome(outcome), inst.gold_plans, inst.id);
  };
  if (workers <= 1 || instances.size() < 2) {
    for (std::size_t i = 0; i < instances.size(); ++i) grade(i);
    return verdicts;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w)
    threads.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < instances.size(); i = next.fetch_add(1)) grade(i);
    });
  for (auto& t : threads) t.join();
  return verdicts;
}

/// Evaluates every instance sequentially against one shared resolver
/// (scripted replay or a live endpoint; both are order-dependent).
inline std::vector<Verdict> evaluate_with_resolver(const std::vector<TaskInstance>& instances,
                                                   Resolver& resolver,
                                                   const StrategyConfig& strategy) {
  std::vector<Verdict> verdicts;
  verdicts.reserve(instances.size());
  for (const auto& inst : instances) {
    PlanningOutcome outcome = plan_query(inst.query, inst.context, inst.pool, resolver, strategy);
    verdicts.push_back(judge(prediction_from_outcome(outcome), inst.gold_plans, inst.id));
  }
  return verdicts;
}

}  // namespace revchain
