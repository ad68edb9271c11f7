#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "revchain/plan.hpp"
#include "revchain/types.hpp"

namespace revchain {

enum class Level { L1, L2, L3 };

inline std::string to_string(Level l) {
  switch (l) {
    case Level::L1: return "L1";
    case Level::L2: return "L2";
    case Level::L3: return "L3";
  }
  return "L1";
}

/// Depth 1-2 -> L1, depth 3 -> L2, depth >= 4 -> L3.
inline Level level_for_depth(int depth) {
  if (depth <= 2) return Level::L1;
  if (depth == 3) return Level::L2;
  return Level::L3;
}

/// One dataset sample: API pool, query, gold plan(s), context facts, level.
struct TaskInstance {
  std::string id;
  ApiPool pool;
  std::string query;
  std::vector<std::pair<std::string, std::string>> context;
  std::vector<PlanNode> gold_plans;
  Level level = Level::L1;

  int max_gold_depth() const {
    int d = 0;
    for (const auto& p : gold_plans) d = std::max(d, nesting_depth(p));
    return d;
  }
};

// ---------------------------------------------------------------------------
// Pool operations

struct PoolViolation {
  std::string api;
  std::string field;
  std::string message;
};

/// Empty report iff every ApiSpec/ApiPool invariant holds. Violations are
/// data, not failures.
inline std::vector<PoolViolation> validate_pool(const ApiPool& pool) {
  std::vector<PoolViolation> out;
  std::set<std::string> seen;
  for (const auto& api : pool.apis) {
    if (!is_identifier(api.name))
      out.push_back({api.name, "name", "API name is not a valid identifier"});
    if (!seen.insert(api.name).second)
      out.push_back({api.name, "name", "duplicate API name"});
    std::set<std::string> arg_seen;
    for (const auto& arg : api.arguments) {
      if (arg.name.empty())
        out.push_back({api.name, "arguments", "empty argument name"});
      if (!arg_seen.insert(arg.name).second)
        out.push_back({api.name, "arguments", "duplicate argument name '" + arg.name + "'"});
    }
  }
  return out;
}

/// APIs whose output type equals `wanted`. Unknown means no narrowing is
/// possible, so the whole pool comes back.
inline std::vector<ApiSpec> filter_by_type(const ApiPool& pool, ValueType wanted) {
  if (wanted == ValueType::Unknown) return pool.apis;
  std::vector<ApiSpec> out;
  for (const auto& api : pool.apis)
    if (api.output.value_type == wanted) out.push_back(api);
  return out;
}

inline const ApiSpec* lookup(const ApiPool& pool, std::string_view name) {
  for (const auto& api : pool.apis)
    if (api.name == name) return &api;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Dataset I/O
//
// File format: UTF-8 JSON array of samples
//   {"id": str?, "APIs": [{name, description, arguments, output, format}],
//    "Query": str, "Label": str, "Context": {key: value}?}
// `arguments` accepts a list of objects or a name -> description mapping.
// `Label` holds one or more call expressions separated by newlines/semicolons.

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline std::vector<ArgSpec> parse_arguments(const ojson& j) {
  std::vector<ArgSpec> out;
  if (j.is_null()) return out;
  if (j.is_array()) {
    for (const auto& e : j) {
      ArgSpec a;
      if (e.is_string()) {
        a.name = e.get<std::string>();
      } else if (e.is_object()) {
        a.name = e.value("name", "");
        a.description = e.value("description", "");
        a.value_type = parse_value_type(e.value("type", ""));
      }
      out.push_back(std::move(a));
    }
    return out;
  }
  if (j.is_object()) {
    // Mapping form: name -> description string or name -> {description, type}.
    for (auto it = j.begin(); it != j.end(); ++it) {
      ArgSpec a;
      a.name = it.key();
      if (it.value().is_string()) {
        a.description = it.value().get<std::string>();
      } else if (it.value().is_object()) {
        a.description = it.value().value("description", "");
        a.value_type = parse_value_type(it.value().value("type", ""));
      }
      out.push_back(std::move(a));
    }
    return out;
  }
  throw DatasetError("unsupported 'arguments' shape");
}

inline OutputSpec parse_output(const ojson& j) {
  OutputSpec o;
  if (j.is_string()) {
    o.name = j.get<std::string>();
  } else if (j.is_object()) {
    o.name = j.value("name", "");
    o.description = j.value("description", "");
    o.value_type = parse_value_type(j.value("type", ""));
  }
  return o;
}

inline ApiSpec parse_api(const ojson& j) {
  ApiSpec api;
  api.name = j.value("name", "");
  api.description = j.value("description", "");
  if (j.contains("arguments")) api.arguments = parse_arguments(j.at("arguments"));
  if (j.contains("output")) api.output = parse_output(j.at("output"));
  if (j.contains("format") && j.at("format").is_string())
    api.format = j.at("format").get<std::string>();
  return api;
}

inline void check_gold_references(const TaskInstance& inst, const PlanNode& node) {
  if (lookup(inst.pool, node.api_name) == nullptr)
    throw DatasetError("label references API '" + node.api_name + "' absent from pool");
  for (const auto& [name, binding] : node.bindings)
    if (const auto* sc = std::get_if<SubCall>(&binding))
      check_gold_references(inst, *sc->child);
}

}  // namespace detail

/// Loads and normalizes a dataset file. In lenient mode samples with
/// unparseable labels or dangling API references are skipped and reported via
/// `warnings`; in strict mode they raise DatasetError.
inline std::vector<TaskInstance> load_dataset(const std::string& path, bool strict = false,
                                              std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset file: " + path);
  detail::ojson doc;
  try {
    doc = detail::ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError("malformed JSON in " + path + ": " + e.what());
  }
  if (!doc.is_array()) throw DatasetError("dataset root must be a JSON array: " + path);

  std::vector<TaskInstance> out;
  std::size_t index = 0;
  for (const auto& sample : doc) {
    TaskInstance inst;
    inst.id = sample.value("id", "sample-" + std::to_string(index));
    try {
      if (sample.contains("APIs"))
        for (const auto& aj : sample.at("APIs")) inst.pool.apis.push_back(detail::parse_api(aj));
      inst.query = sample.value("Query", "");
      if (sample.contains("Context") && sample.at("Context").is_object())
        for (auto it = sample.at("Context").begin(); it != sample.at("Context").end(); ++it)
          inst.context.emplace_back(it.key(), it.value().is_string()
                                                  ? it.value().get<std::string>()
                                                  : it.value().dump());
      const std::string label = sample.value("Label", "");
      try {
        inst.gold_plans = parse_call_expr(label);
      } catch (const ParseError& e) {
        throw DatasetError("unparseable label: " + std::string(e.what()));
      }
      for (const auto& p : inst.gold_plans) detail::check_gold_references(inst, p);
      // The label is ground truth; any stated level field is advisory only.
      inst.level = level_for_depth(inst.max_gold_depth());
      out.push_back(std::move(inst));
    } catch (const DatasetError& e) {
      if (strict) throw DatasetError("sample '" + inst.id + "': " + e.what());
      if (warnings)
        warnings->push_back("skipped sample '" + inst.id + "': " + e.what());
    }
    ++index;
  }
  return out;
}

inline nlohmann::ordered_json dataset_to_json(const std::vector<TaskInstance>& instances) {
  detail::ojson doc = detail::ojson::array();
  for (const auto& inst : instances) {
    detail::ojson s;
    s["id"] = inst.id;
    detail::ojson apis = detail::ojson::array();
    for (const auto& api : inst.pool.apis) {
      detail::ojson aj;
      aj["name"] = api.name;
      aj["description"] = api.description;
      detail::ojson args = detail::ojson::array();
      for (const auto& a : api.arguments) {
        args.push_back({{"name", a.name},
                        {"description", a.description},
                        {"type", to_string(a.value_type)}});
      }
      aj["arguments"] = std::move(args);
      aj["output"] = {{"name", api.output.name},
                      {"description", api.output.description},
                      {"type", to_string(api.output.value_type)}};
      if (api.format) aj["format"] = *api.format;
      apis.push_back(std::move(aj));
    }
    s["APIs"] = std::move(apis);
    s["Query"] = inst.query;
    s["Label"] = render_call_expr(inst.gold_plans);
    if (!inst.context.empty()) {
      detail::ojson ctx = detail::ojson::object();
      for (const auto& [k, v] : inst.context) ctx[k] = v;
      s["Context"] = std::move(ctx);
    }
    doc.push_back(std::move(s));
  }
  return doc;
}

inline void save_dataset(const std::vector<TaskInstance>& instances, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write dataset file: " + path);
  out << dataset_to_json(instances).dump(2) << '\n';
}

}  // namespace revchain
