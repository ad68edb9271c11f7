#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "revchain/revchain.hpp"

namespace support {

using namespace revchain;

// ---------------------------------------------------------------------------
// Hand-built fixtures

inline ApiSpec make_api(std::string name, std::vector<std::pair<std::string, ValueType>> args,
                        std::string out_name, ValueType out_type, std::string description = "") {
  ApiSpec api;
  api.name = std::move(name);
  api.description = description.empty() ? api.name + "." : std::move(description);
  for (auto& [arg_name, type] : args) {
    ArgSpec a;
    a.name = arg_name;
    a.value_type = type;
    a.description = "the " + arg_name;
    api.arguments.push_back(std::move(a));
  }
  api.output.name = std::move(out_name);
  api.output.value_type = out_type;
  return api;
}

/// Room-booking pool: the final API needs two IDs produced by sub-APIs plus
/// two times present in the query; one distractor API shares no output type
/// with any needed argument except string.
inline TaskInstance meeting_room_instance() {
  TaskInstance inst;
  inst.id = "meeting-room";
  inst.pool.apis = {
      make_api("BookRoom",
               {{"person_ID", ValueType::Identifier},
                {"room_ID", ValueType::Identifier},
                {"start_time", ValueType::Time},
                {"end_time", ValueType::Time}},
               "booking_ID", ValueType::Identifier, "Book a meeting room."),
      make_api("Name2ID", {{"person_name", ValueType::String}}, "person_ID",
               ValueType::Identifier, "Look up the ID of a person by name."),
      make_api("RecommendRoom",
               {{"start_time", ValueType::Time}, {"end_time", ValueType::Time}}, "room_ID",
               ValueType::Identifier, "Recommend the ID of an available meeting room."),
      make_api("GetWeather", {{"city", ValueType::String}}, "weather_report", ValueType::String,
               "Get the weather report for a city."),
  };
  inst.query = "Please help Jack book a meeting room from 9:00 am to 10:00 am";
  inst.gold_plans = parse_call_expr(
      "BookRoom(person_ID=Name2ID(person_name='Jack'), "
      "room_ID=RecommendRoom(start_time='9:00 am', end_time='10:00 am'), "
      "start_time='9:00 am', end_time='10:00 am')");
  inst.level = level_for_depth(inst.max_gold_depth());
  return inst;
}

/// Three-deep linear chain: book a flight found from a stored destination.
inline TaskInstance flight_instance() {
  TaskInstance inst;
  inst.id = "flight";
  inst.pool.apis = {
      make_api("BookFlight", {{"flight_ID", ValueType::Identifier}}, "booking",
               ValueType::Identifier, "Book a flight by ID."),
      make_api("FindFlight", {{"destination", ValueType::String}}, "flight_ID",
               ValueType::Identifier, "Find a flight to a destination."),
      make_api("GetUserDestination", {{"userName", ValueType::String}}, "destination",
               ValueType::String, "Get the stored destination of a user."),
  };
  inst.query = "I'm Lucas, could you find a flight and book it to my destination?";
  inst.gold_plans = parse_call_expr(
      "BookFlight(flight_ID=FindFlight(destination=GetUserDestination(userName='Lucas')))");
  inst.level = level_for_depth(inst.max_gold_depth());
  return inst;
}

// ---------------------------------------------------------------------------
// Random plan trees for round-trip fuzzing

/// Literal text over a charset that renders unambiguously (no quote chars):
/// words, digit runs, signed decimals, padded numbers, whitespace padding.
inline std::string random_literal(std::mt19937_64& rng) {
  static const char* words[] = {"New York", "9:00 am",  "Jack",    "a b c", "x",
                                "2025-03-01", "violet", "economy", ""};
  static const char* numbers[] = {"0",    "7",     "07",    "+3",   "-0",   "42",
                                  "1.0",  "01.50", "-12.5", "3.14", "100",  "0.0"};
  switch (rng() % 4) {
    case 0: return words[rng() % (sizeof(words) / sizeof(*words))];
    case 1: return numbers[rng() % (sizeof(numbers) / sizeof(*numbers))];
    case 2: {  // random word over a quote-free charset
      static const char charset[] =
          "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 _-.:";
      std::size_t len = rng() % 12;
      std::string s;
      for (std::size_t i = 0; i < len; ++i) s += charset[rng() % (sizeof(charset) - 1)];
      return s;
    }
    default:  // whitespace-padded (canonicalization trims)
      return "  " + std::string(words[rng() % (sizeof(words) / sizeof(*words))]) + " ";
  }
}

inline std::string random_name(std::mt19937_64& rng) {
  static const char* stems[] = {"Alpha", "Beta", "Gamma", "Delta", "Fetch", "Query", "Book",
                                "Find", "Get", "_private"};
  return std::string(stems[rng() % (sizeof(stems) / sizeof(*stems))]) +
         std::to_string(rng() % 100);
}

inline PlanNode random_plan(std::mt19937_64& rng, int max_depth, bool allow_ask_user = false) {
  PlanNode node{random_name(rng), {}};
  std::size_t nargs = rng() % 4;  // 0..3
  for (std::size_t i = 0; i < nargs; ++i) {
    std::string arg = "arg" + std::to_string(i) + "_" + std::to_string(rng() % 10);
    unsigned roll = rng() % 10;
    if (max_depth > 1 && roll < 4) {
      node.bindings.emplace_back(arg, SubCall{random_plan(rng, max_depth - 1, allow_ask_user)});
    } else if (allow_ask_user && roll == 9) {
      node.bindings.emplace_back(arg, AskUser{arg + "?"});
    } else {
      node.bindings.emplace_back(arg, Literal{random_literal(rng), ValueType::String});
    }
  }
  return node;
}

// ---------------------------------------------------------------------------
// Independent equivalence oracle (brute force, no shared code with
// canonicalize/equivalent beyond the PlanNode type itself)

/// Numeric check written independently: optional sign, digits, optional
/// fraction, nothing else.
inline bool oracle_is_number(const std::string& s) {
  std::size_t i = 0, digits = 0, frac = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
  if (digits == 0) return false;
  if (i == s.size()) return true;
  if (s[i] != '.') return false;
  ++i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++frac;
  return frac > 0 && i == s.size();
}

/// Compares two decimal strings by aligning them as scaled integers, a
/// different mechanism than string normalization.
inline bool oracle_numbers_equal(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    bool negative = false;
    std::size_t i = 0;
    if (s[0] == '+') i = 1;
    if (s[0] == '-') negative = true, i = 1;
    std::string ip, fp;
    std::size_t dot = s.find('.', i);
    if (dot == std::string::npos) {
      ip = s.substr(i);
    } else {
      ip = s.substr(i, dot - i);
      fp = s.substr(dot + 1);
    }
    return std::make_tuple(negative, ip, fp);
  };
  auto [na, ia, fa] = split(a);
  auto [nb, ib, fb] = split(b);
  while (fa.size() < fb.size()) fa += '0';
  while (fb.size() < fa.size()) fb += '0';
  std::string da = ia + fa, db = ib + fb;
  while (da.size() < db.size()) da = "0" + da;
  while (db.size() < da.size()) db = "0" + db;
  if (da == db) {
    bool zero = da.find_first_not_of('0') == std::string::npos;
    return zero || na == nb;
  }
  return false;
}

inline std::string oracle_trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n'))
    --e;
  return s.substr(b, e - b);
}

inline bool oracle_literals_equal(const std::string& a, const std::string& b) {
  std::string ta = oracle_trim(a), tb = oracle_trim(b);
  if (oracle_is_number(ta) && oracle_is_number(tb)) return oracle_numbers_equal(ta, tb);
  return ta == tb;
}

inline bool oracle_equivalent(const PlanNode& a, const PlanNode& b) {
  if (a.api_name != b.api_name) return false;
  if (a.bindings.size() != b.bindings.size()) return false;
  for (const auto& [name, ba] : a.bindings) {
    const Binding* bb = b.find(name);
    if (bb == nullptr) return false;
    bool ok = std::visit(
        [&](const auto& va) -> bool {
          using T = std::decay_t<decltype(va)>;
          if constexpr (std::is_same_v<T, Literal>) {
            const auto* lb = std::get_if<Literal>(bb);
            return lb != nullptr && oracle_literals_equal(va.text, lb->text);
          } else if constexpr (std::is_same_v<T, SubCall>) {
            const auto* sb = std::get_if<SubCall>(bb);
            return sb != nullptr && oracle_equivalent(*va.child, *sb->child);
          } else if constexpr (std::is_same_v<T, AskUser>) {
            return std::holds_alternative<AskUser>(*bb);
          } else {
            return std::holds_alternative<Unfilled>(*bb);
          }
        },
        ba);
    if (!ok) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Adversarial resolvers

/// Always answers with the same API, including for its own arguments — the
/// planner must refuse the self-referential chain via its cycle guard.
class SelfLoopResolver : public Resolver {
 public:
  explicit SelfLoopResolver(std::string target) : target_(std::move(target)) {}

  std::optional<std::string> select_api(const SelectionRequest&) override { return target_; }

  std::map<std::string, ArgOutcome> complete_arguments(const CompletionRequest& request) override {
    std::map<std::string, ArgOutcome> out;
    for (const auto& arg : request.unfilled) out[arg.name] = ArgOutcome::use_api(target_);
    return out;
  }

  ArgOutcome extract_value(const CompletionRequest&) override { return ArgOutcome::none(); }

 private:
  std::string target_;
};

/// Bounces between the APIs of a pool: each argument is answered with any
/// candidate not equal to the current API, producing unbounded recursion
/// unless the depth or budget guard stops it.
class PingPongResolver : public Resolver {
 public:
  std::optional<std::string> select_api(const SelectionRequest& request) override {
    return request.candidates.front().name;
  }

  std::map<std::string, ArgOutcome> complete_arguments(const CompletionRequest& request) override {
    std::map<std::string, ArgOutcome> out;
    for (const auto& arg : request.unfilled) {
      auto it = request.candidates_per_arg.find(arg.name);
      out[arg.name] = ArgOutcome::none();
      if (it == request.candidates_per_arg.end()) continue;
      for (const auto& c : it->second) {
        out[arg.name] = ArgOutcome::use_api(c.name);
        if (c.name != request.api.name) break;  // prefer a different API
      }
    }
    return out;
  }

  ArgOutcome extract_value(const CompletionRequest&) override { return ArgOutcome::none(); }
};

// ---------------------------------------------------------------------------
// Subprocess helper for CLI tests

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline CliResult run_cli(const std::string& args, const std::string& stdin_text = "") {
  static int counter = 0;
  std::string tag = std::to_string(counter++);
  std::string out_path = "/tmp/revchain_cli_out_" + tag;
  std::string err_path = "/tmp/revchain_cli_err_" + tag;
  std::string cmd = std::string(REVCHAIN_CLI_PATH) + " " + args;
  if (!stdin_text.empty()) {
    std::string in_path = "/tmp/revchain_cli_in_" + tag;
    std::ofstream(in_path) << stdin_text;
    cmd += " < " + in_path;
  } else {
    cmd += " < /dev/null";
  }
  cmd += " > " + out_path + " 2> " + err_path;
  int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

inline std::string asset_path(const std::string& rel) {
  return std::string(REVCHAIN_ASSET_DIR) + "/" + rel;
}

inline std::string temp_path(const std::string& name) {
  return "/tmp/revchain_test_" + name;
}

}  // namespace support
