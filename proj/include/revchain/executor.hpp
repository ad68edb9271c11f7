#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "revchain/plan.hpp"

namespace revchain {

class ExecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Canonical key for a call's argument tuple: sorted name=value pairs joined
/// with unit separators.
inline std::string canonical_arg_key(std::vector<std::pair<std::string, std::string>> args) {
  std::sort(args.begin(), args.end());
  std::string key;
  for (const auto& [name, value] : args) {
    key += name;
    key += '\x1e';
    key += value;
    key += '\x1f';
  }
  return key;
}

struct BehaviorSpec {
  enum class Kind { Digest, Table };
  Kind kind = Kind::Digest;
  std::string output_name = "output";              // digest prefix
  std::map<std::string, std::string> rows;         // canonical arg key -> output
};

inline BehaviorSpec digest_behavior(std::string output_name = "output") {
  return {BehaviorSpec::Kind::Digest, std::move(output_name), {}};
}

inline BehaviorSpec table_behavior(
    std::vector<std::pair<std::vector<std::pair<std::string, std::string>>, std::string>> rows) {
  BehaviorSpec b;
  b.kind = BehaviorSpec::Kind::Table;
  for (auto& [args, output] : rows) b.rows[canonical_arg_key(std::move(args))] = output;
  return b;
}

/// Deterministic stand-in for real APIs. Digest behaviors synthesize a stable
/// output from the API name and arguments; Table behaviors look up
/// hand-authored rows.
struct MockEnv {
  std::map<std::string, BehaviorSpec> behaviors;
};

/// Upsert; the latest registration wins.
inline void register_behavior(MockEnv& env, const std::string& api_name, BehaviorSpec behavior) {
  env.behaviors[api_name] = std::move(behavior);
}

namespace detail {

inline std::uint32_t fnv1a32(std::string_view data, std::uint32_t h = 2166136261u) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

inline std::string hex8(std::uint32_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(8, '0');
  for (int i = 7; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace detail

struct CallRecord {
  std::string api;
  std::vector<std::pair<std::string, std::string>> args;  // resolved, in binding order
  std::string output;
};

struct ExecResult {
  std::string final_value;
  std::vector<CallRecord> call_log;
};

namespace detail {

inline void collect_api_names(const PlanNode& node, std::vector<std::string>& out) {
  out.push_back(node.api_name);
  for (const auto& [name, binding] : node.bindings)
    if (const auto* sc = std::get_if<SubCall>(&binding)) collect_api_names(*sc->child, out);
}

}  // namespace detail

/// Runs a completed plan bottom-up. Pure in (plan, env); any error aborts with
/// the call log up to the failure point inside the exception message.
inline ExecResult execute(const PlanNode& plan, const MockEnv& env) {
  std::vector<std::string> referenced;
  detail::collect_api_names(plan, referenced);
  for (const auto& name : referenced)
    if (env.behaviors.find(name) == env.behaviors.end())
      throw ExecError("no behavior registered for API '" + name + "'");

  auto steps = execution_order(plan);
  ExecResult result;
  std::vector<std::string> outputs(steps.size());
  for (const auto& step : steps) {
    CallRecord record;
    record.api = step.api_name;
    for (const auto& [name, text] : step.literal_args) record.args.emplace_back(name, text);
    for (const auto& [name, producer] : step.dependency_args)
      record.args.emplace_back(name, outputs[producer]);

    const BehaviorSpec& behavior = env.behaviors.at(step.api_name);
    if (behavior.kind == BehaviorSpec::Kind::Digest) {
      std::string key = step.api_name + '\x1f' + canonical_arg_key(record.args);
      record.output = behavior.output_name + ":" + detail::hex8(detail::fnv1a32(key));
    } else {
      auto it = behavior.rows.find(canonical_arg_key(record.args));
      if (it == behavior.rows.end()) {
        std::string args_text;
        for (const auto& [n, v] : record.args) args_text += " " + n + "='" + v + "'";
        throw ExecError("no table row for call " + step.api_name + "(" + args_text + " )");
      }
      record.output = it->second;
    }
    outputs[step.order_index] = record.output;
    result.call_log.push_back(std::move(record));
  }
  result.final_value = outputs.back();
  return result;
}

// ---------------------------------------------------------------------------
// Env fixture file: {api_name: {"kind": "digest", "output": name?} |
//                    {"kind": "table", "rows": [{"args": {...}, "output": s}]}}

inline nlohmann::ordered_json env_to_json(const MockEnv& env) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [name, behavior] : env.behaviors) {
    nlohmann::ordered_json b;
    if (behavior.kind == BehaviorSpec::Kind::Digest) {
      b["kind"] = "digest";
      b["output"] = behavior.output_name;
    } else {
      b["kind"] = "table";
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& [key, output] : behavior.rows) {
        nlohmann::ordered_json args = nlohmann::ordered_json::object();
        std::size_t pos = 0;
        while (pos < key.size()) {
          std::size_t us = key.find('\x1e', pos);
          std::size_t rs = key.find('\x1f', us);
          args[key.substr(pos, us - pos)] = key.substr(us + 1, rs - us - 1);
          pos = rs + 1;
        }
        rows.push_back({{"args", std::move(args)}, {"output", output}});
      }
      b["rows"] = std::move(rows);
    }
    doc[name] = std::move(b);
  }
  return doc;
}

inline MockEnv env_from_json(const nlohmann::ordered_json& doc) {
  MockEnv env;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& b = it.value();
    BehaviorSpec behavior;
    if (b.value("kind", "digest") == "digest") {
      behavior.kind = BehaviorSpec::Kind::Digest;
      behavior.output_name = b.value("output", "output");
    } else {
      behavior.kind = BehaviorSpec::Kind::Table;
      for (const auto& row : b.value("rows", nlohmann::ordered_json::array())) {
        std::vector<std::pair<std::string, std::string>> args;
        for (auto ai = row.at("args").begin(); ai != row.at("args").end(); ++ai)
          args.emplace_back(ai.key(), ai.value().get<std::string>());
        behavior.rows[canonical_arg_key(std::move(args))] = row.at("output").get<std::string>();
      }
    }
    env.behaviors[it.key()] = std::move(behavior);
  }
  return env;
}

inline void save_env(const MockEnv& env, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ExecError("cannot write env fixture: " + path);
  out << env_to_json(env).dump(2) << '\n';
}

inline MockEnv load_env(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ExecError("cannot open env fixture: " + path);
  auto doc = nlohmann::ordered_json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw ExecError("malformed env fixture: " + path);
  return env_from_json(doc);
}

}  // namespace revchain
