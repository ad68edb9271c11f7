// Command-line front end: plan a single query, batch-evaluate a dataset,
// generate synthetic datasets, execute plans against a mock environment, and
// inspect planning traces.

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#ifdef _WIN32
#include <io.h>
#define REVCHAIN_ISATTY _isatty
#else
#include <unistd.h>
#define REVCHAIN_ISATTY isatty
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "revchain/revchain.hpp"
#include "revchain/prompt_resolver.hpp"

namespace {

using namespace revchain;

struct ResolverFlags {
  std::string resolver = "oracle";
  std::string script_path;
  std::string endpoint;
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.1;
  std::string log_path;
};

struct StrategyFlags {
  std::string strategy = "all-at-once";
  int max_depth = 8;
  int max_calls = 64;
};

void add_resolver_flags(CLI::App* cmd, ResolverFlags& flags) {
  cmd->add_option("--resolver", flags.resolver, "Resolver: oracle, scripted or prompt")
      ->check(CLI::IsMember({"oracle", "scripted", "prompt"}));
  cmd->add_option("--script", flags.script_path, "Trace or request-log file for scripted replay");
  cmd->add_option("--endpoint", flags.endpoint, "Chat-completion endpoint URL (prompt resolver)");
  cmd->add_option("--model", flags.model, "Model name sent to the endpoint");
  cmd->add_option("--temperature", flags.temperature, "Sampling temperature")
      ->check(CLI::Range(0.0, 2.0));
  cmd->add_option("--log", flags.log_path, "Request log path (prompt resolver)");
}

void add_strategy_flags(CLI::App* cmd, StrategyFlags& flags) {
  cmd->add_option("--strategy", flags.strategy, "Argument completion strategy")
      ->check(CLI::IsMember({"all-at-once", "one-by-one", "three-step"}));
  cmd->add_option("--max-depth", flags.max_depth, "Maximum plan nesting depth")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-calls", flags.max_calls, "Maximum resolver invocations per query")
      ->check(CLI::PositiveNumber);
}

StrategyConfig strategy_from_flags(const StrategyFlags& flags) {
  StrategyConfig config;
  config.mode = *parse_strategy_mode(flags.strategy);
  config.max_depth = flags.max_depth;
  config.max_resolver_calls = flags.max_calls;
  return config;
}

std::unique_ptr<Resolver> make_shared_resolver(const ResolverFlags& flags) {
  if (flags.resolver == "scripted") {
    if (flags.script_path.empty())
      throw std::runtime_error("--resolver scripted requires --script");
    return std::make_unique<ScriptedResolver>(ScriptedResolver::from_file(flags.script_path));
  }
  if (flags.resolver == "prompt") {
    if (flags.endpoint.empty())
      throw std::runtime_error("--resolver prompt requires --endpoint");
    PromptResolverConfig config;
    config.endpoint_url = flags.endpoint;
    config.model_name = flags.model;
    config.temperature = flags.temperature;
    if (!flags.log_path.empty()) config.request_log_path = flags.log_path;
    return std::make_unique<PromptResolver>(std::move(config));
  }
  return nullptr;  // oracle: built per instance from gold
}

/// Pool file shapes: a dataset array (use --index), a single sample object, or
/// a bare array of API objects.
TaskInstance load_pool_file(const std::string& path, int index) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pool file: " + path);
  auto doc = nlohmann::ordered_json::parse(in);
  auto parse_sample = [](const nlohmann::ordered_json& sample) {
    TaskInstance inst;
    inst.id = sample.value("id", "pool");
    if (sample.contains("APIs"))
      for (const auto& aj : sample.at("APIs")) inst.pool.apis.push_back(detail::parse_api(aj));
    inst.query = sample.value("Query", "");
    if (sample.contains("Label")) inst.gold_plans = parse_call_expr(sample.value("Label", ""));
    return inst;
  };
  if (doc.is_object()) return parse_sample(doc);
  if (!doc.is_array() || doc.empty()) throw std::runtime_error("empty pool file: " + path);
  if (doc.front().is_object() && doc.front().contains("name") && !doc.front().contains("APIs")) {
    TaskInstance inst;  // bare API array
    inst.id = "pool";
    for (const auto& aj : doc) inst.pool.apis.push_back(detail::parse_api(aj));
    return inst;
  }
  if (index < 0 || index >= static_cast<int>(doc.size()))
    throw std::runtime_error("--index out of range for " + path);
  return parse_sample(doc.at(index));
}

void collect_questions(const PlanNode& node, std::vector<std::string>& out) {
  for (const auto& [name, binding] : node.bindings) {
    if (const auto* ask = std::get_if<AskUser>(&binding)) {
      if (std::find(out.begin(), out.end(), ask->question) == out.end())
        out.push_back(ask->question);
    } else if (const auto* sc = std::get_if<SubCall>(&binding)) {
      collect_questions(*sc->child, out);
    }
  }
}

std::string current_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

int cmd_plan(const std::string& pool_path, int index, std::string query,
             const ResolverFlags& rflags, const StrategyFlags& sflags,
             const std::string& trace_out, bool no_interactive) {
  TaskInstance inst = load_pool_file(pool_path, index);
  if (!query.empty()) inst.query = query;
  if (inst.query.empty()) throw std::runtime_error("no query given (flag or pool file)");

  auto violations = validate_pool(inst.pool);
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << "pool violation: " << v.api << "/" << v.field << ": " << v.message << "\n";
    return 1;
  }

  std::unique_ptr<Resolver> shared = make_shared_resolver(rflags);
  std::unique_ptr<OracleResolver> oracle;
  if (!shared) {
    if (inst.gold_plans.empty())
      throw std::runtime_error("oracle resolver requires a Label in the pool file");
    oracle = std::make_unique<OracleResolver>(inst.gold_plans);
  }
  Resolver& resolver = shared ? *shared : *oracle;

  PlanningOutcome outcome =
      plan_query(inst.query, inst.context, inst.pool, resolver, strategy_from_flags(sflags));
  if (!trace_out.empty()) write_trace_file(trace_out, outcome.trace.events);

  if (outcome.status == PlanStatus::Failed) {
    std::cerr << "planning failed: " << outcome.failure_reason << "\n";
    return 1;
  }

  bool interactive = !no_interactive && REVCHAIN_ISATTY(0);
  if (outcome.status == PlanStatus::NeedsUserInput && interactive) {
    std::vector<std::string> questions;
    collect_questions(outcome.plan, questions);
    std::map<std::string, std::string> answers;
    for (const auto& q : questions) {
      std::cout << q << " " << std::flush;
      std::string answer;
      if (!std::getline(std::cin, answer)) break;
      answers[q] = answer;
    }
    outcome = fill_ask_user(outcome, answers);
  }

  std::cout << render_call_expr(outcome.plan) << "\n";
  return outcome.status == PlanStatus::Complete ? 0 : 2;
}

int cmd_eval(const std::string& dataset_path, const ResolverFlags& rflags,
             const StrategyFlags& sflags, const std::string& out_prefix, int workers,
             bool strict) {
  std::vector<std::string> warnings;
  auto instances = load_dataset(dataset_path, strict, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  StrategyConfig strategy = strategy_from_flags(sflags);
  std::vector<Verdict> verdicts;
  std::unique_ptr<Resolver> shared = make_shared_resolver(rflags);
  if (shared)
    verdicts = evaluate_with_resolver(instances, *shared, strategy);
  else
    verdicts = evaluate_with_oracle(instances, strategy, workers);

  EvalReport report = aggregate(verdicts, instances, rflags.resolver, sflags.strategy,
                                current_timestamp());
  std::ofstream json_out(out_prefix + ".json");
  json_out << report_to_json(report).dump(2) << "\n";
  std::ofstream table_out(out_prefix + ".txt");
  table_out << report_table(report);
  std::cout << report_table(report);
  return 0;
}

int cmd_gen(std::uint64_t seed, int count, const std::string& out_path,
            const std::string& env_path, const std::string& depths, int pool_min, int pool_max,
            int args_min, int args_max, double distractor_share) {
  GenConfig config;
  config.seed = seed;
  config.instance_count = count;
  config.pool_min = pool_min;
  config.pool_max = pool_max;
  config.args_min = args_min;
  config.args_max = args_max;
  config.distractor_type_share = distractor_share;
  if (!depths.empty()) {
    config.depth_distribution.clear();
    std::istringstream ss(depths);
    std::string part;
    while (std::getline(ss, part, ',')) {
      auto colon = part.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("bad --depths entry (want depth:prob): " + part);
      config.depth_distribution.emplace_back(std::stoi(part.substr(0, colon)),
                                             std::stod(part.substr(colon + 1)));
    }
  }
  GeneratedCorpus corpus = generate_tasks(config);
  save_dataset(corpus.instances, out_path);
  if (!env_path.empty()) save_env(corpus.env, env_path);
  std::printf("generated %zu instances (avg %.2f calls per instance) -> %s\n",
              corpus.instances.size(), corpus.avg_calls, out_path.c_str());
  return 0;
}

int cmd_exec(const std::string& plan_text, const std::string& plan_file,
             const std::string& env_path) {
  std::string text = plan_text;
  if (!plan_file.empty()) {
    std::ifstream in(plan_file);
    if (!in) throw std::runtime_error("cannot open plan file: " + plan_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  auto plans = parse_call_expr(text);
  if (plans.empty()) throw std::runtime_error("no call expression given");
  MockEnv env = load_env(env_path);
  for (const auto& plan : plans) {
    ExecResult result = execute(plan, env);
    for (const auto& record : result.call_log) {
      std::cout << record.api << "(";
      bool first = true;
      for (const auto& [name, value] : record.args) {
        if (!first) std::cout << ", ";
        first = false;
        std::cout << name << "='" << value << "'";
      }
      std::cout << ") -> " << record.output << "\n";
    }
    std::cout << "final: " << result.final_value << "\n";
  }
  return 0;
}

int cmd_trace_show(const std::string& path) {
  auto events = read_trace_file(path);
  int seq = 0;
  for (const auto& e : events)
    std::cout << seq++ << " " << e.kind << " " << e.payload.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backward-chaining multi-API planner"};
  app.set_config("--config");
  app.require_subcommand(1);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Plan a single query against an API pool");
  std::string plan_pool, plan_query_text, plan_trace_out;
  int plan_index = 0;
  bool plan_no_interactive = false;
  ResolverFlags plan_rflags;
  StrategyFlags plan_sflags;
  plan_cmd->add_option("query", plan_query_text, "Natural-language query");
  plan_cmd->add_option("--pool", plan_pool, "API pool or dataset file")->required();
  plan_cmd->add_option("--index", plan_index, "Sample index when the pool file is a dataset");
  plan_cmd->add_option("--trace-out", plan_trace_out, "Write the planning trace (JSON lines)");
  plan_cmd->add_flag("--no-interactive", plan_no_interactive,
                     "Emit ASK_USER sentinels instead of prompting");
  add_resolver_flags(plan_cmd, plan_rflags);
  add_strategy_flags(plan_cmd, plan_sflags);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a dataset with a resolver");
  std::string eval_dataset, eval_out = "report";
  int eval_workers = 1;
  bool eval_strict = false;
  ResolverFlags eval_rflags;
  StrategyFlags eval_sflags;
  eval_cmd->add_option("--dataset", eval_dataset, "Dataset JSON file")->required();
  eval_cmd->add_option("--out", eval_out, "Report path prefix (writes .json and .txt)");
  eval_cmd->add_option("--workers", eval_workers, "Worker threads (oracle resolver only)")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--strict", eval_strict, "Fail on malformed samples instead of skipping");
  add_resolver_flags(eval_cmd, eval_rflags);
  add_strategy_flags(eval_cmd, eval_sflags);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  std::uint64_t gen_seed = 1;
  int gen_count = 50, gen_pool_min = 4, gen_pool_max = 8, gen_args_min = 1, gen_args_max = 3;
  double gen_share = 0.5;
  std::string gen_out = "dataset.json", gen_env_out, gen_depths;
  gen_cmd->add_option("--seed", gen_seed, "Generator seed");
  gen_cmd->add_option("--count", gen_count, "Instance count")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--out", gen_out, "Dataset output path");
  gen_cmd->add_option("--env-out", gen_env_out, "Mock environment fixture output path");
  gen_cmd->add_option("--depths", gen_depths,
                      "Depth distribution, e.g. 2:0.5,3:0.4,4:0.1 (probabilities sum to 1)");
  gen_cmd->add_option("--pool-min", gen_pool_min, "Minimum pool size");
  gen_cmd->add_option("--pool-max", gen_pool_max, "Maximum pool size");
  gen_cmd->add_option("--args-min", gen_args_min, "Minimum arguments per API");
  gen_cmd->add_option("--args-max", gen_args_max, "Maximum arguments per API");
  gen_cmd->add_option("--distractor-share", gen_share,
                      "Fraction of distractors sharing gold argument types");

  // exec
  auto* exec_cmd = app.add_subcommand("exec", "Execute a plan against a mock environment");
  std::string exec_plan, exec_plan_file, exec_env;
  exec_cmd->add_option("--plan", exec_plan, "Plan as a call expression");
  exec_cmd->add_option("--plan-file", exec_plan_file, "File containing the call expression");
  exec_cmd->add_option("--env", exec_env, "Environment fixture file")->required();

  // trace show
  auto* trace_cmd = app.add_subcommand("trace", "Trace utilities");
  auto* trace_show = trace_cmd->add_subcommand("show", "Pretty-print a trace file");
  std::string trace_file;
  trace_show->add_option("--file", trace_file, "Trace file (JSON lines)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan_cmd)
      return cmd_plan(plan_pool, plan_index, plan_query_text, plan_rflags, plan_sflags,
                      plan_trace_out, plan_no_interactive);
    if (*eval_cmd)
      return cmd_eval(eval_dataset, eval_rflags, eval_sflags, eval_out, eval_workers, eval_strict);
    if (*gen_cmd)
      return cmd_gen(gen_seed, gen_count, gen_out, gen_env_out, gen_depths, gen_pool_min,
                     gen_pool_max, gen_args_min, gen_args_max, gen_share);
    if (*exec_cmd) return cmd_exec(exec_plan, exec_plan_file, exec_env);
    if (*trace_show) return cmd_trace_show(trace_file);
    std::cerr << "unknown subcommand\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
