#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "revchain/executor.hpp"
#include "revchain/plan.hpp"
#include "revchain/registry.hpp"
#include "revchain/types.hpp"

namespace revchain {

struct GenConfig {
  std::uint64_t seed = 1;
  int instance_count = 50;
  /// depth -> probability; probabilities must sum to 1.
  std::vector<std::pair<int, double>> depth_distribution = {
      {2, 798.0 / 1550.0}, {3, 693.0 / 1550.0}, {4, 49.0 / 1550.0}, {5, 10.0 / 1550.0}};
  int pool_min = 4;
  int pool_max = 8;
  int args_min = 1;
  int args_max = 3;
  /// Fraction of distractor APIs whose output type matches some gold argument
  /// type, so type filtering is non-trivially exercised.
  double distractor_type_share = 0.5;
};

struct GeneratedCorpus {
  std::vector<TaskInstance> instances;
  MockEnv env;  // digest behavior for every generated API
  double avg_calls = 0.0;
};

namespace detail {

struct CategoryVocab {
  const char* name;
  std::vector<const char*> stems;
};

inline const std::vector<CategoryVocab>& category_vocab() {
  static const std::vector<CategoryVocab> vocab = {
      {"geocoding", {"GetDirections", "DistanceCalculator", "LocateAddress"}},
      {"weather", {"GPS2Weather", "WeatherVerification", "GetForecast"}},
      {"book", {"AddBookToReadingList", "BooksByAuthor", "FindBookRating"}},
      {"transportation", {"FlightBooking", "FindFlightByDestination", "ReserveSeat"}},
      {"music", {"AddSongToPlaylist", "MusicConcert", "FindArtist"}},
      {"dining", {"SearchRestaurant", "TableReservation", "RestaurantReviews"}},
      {"entertainment", {"CinemaShowtimes", "MovieReview", "TheatrePlay"}},
      {"shopping", {"FindProductId", "NearestStore", "ComparePrices"}},
      {"health", {"GetExerciseRoutine", "NearbyHospitalQuery", "GetHealthInformation"}},
      {"travel", {"SearchHotel", "CheckBaggageAllowance", "PlanTrip"}},
      {"database", {"CheckInventory", "DateConversion", "RecordLookup"}},
      {"calculator", {"TaxCostCalculator", "CalculateCalorie", "TipCalculator"}},
      {"email", {"UserEmail2UserId", "SendReview", "DraftMessage"}},
      {"finance", {"InvestmentSuggestion", "CountryTaxRate", "LoanEstimator"}},
      {"conversion", {"User2Age", "HotelName2ID", "UnitConverter"}},
      {"clothing", {"SelectOutfit", "OutfitSuggestion", "FindClothingType"}},
      {"scheduling", {"ConvertTime", "GetEventCalendar", "FindFreeSlot"}},
      {"activities", {"ActivityBook", "PlanDayOut", "FindNearbyEvents"}},
      {"currency", {"CurrencyConversion", "GetExchangeRate", "HistoricRate"}},
      {"search", {"GetCurrentFuelPrice", "ProductSearch", "NewsLookup"}},
  };
  return vocab;
}

inline const std::vector<ValueType>& concrete_types() {
  static const std::vector<ValueType> types = {
      ValueType::String,  ValueType::Integer, ValueType::Float,      ValueType::Boolean,
      ValueType::Date,    ValueType::Time,    ValueType::DateTime,   ValueType::Identifier};
  return types;
}

inline const std::vector<const char*>& arg_names_for(ValueType t) {
  static const std::vector<const char*> strings = {"city",    "person_name", "keyword",
                                                   "title",   "destination", "cuisine",
                                                   "genre",   "author",      "hotel_name"};
  static const std::vector<const char*> integers = {"quantity", "zip_code", "rating",
                                                    "capacity", "budget"};
  static const std::vector<const char*> floats = {"price", "amount", "distance", "weight"};
  static const std::vector<const char*> bools = {"confirmed", "round_trip", "express"};
  static const std::vector<const char*> dates = {"date", "check_in_date", "departure_date",
                                                 "deadline"};
  static const std::vector<const char*> times = {"start_time", "end_time", "pickup_time"};
  static const std::vector<const char*> datetimes = {"appointment", "departure_slot",
                                                     "reservation_slot"};
  static const std::vector<const char*> ids = {"person_ID", "room_ID",  "flight_ID",
                                               "booking_ID", "product_ID", "hotel_ID",
                                               "order_ID",  "user_ID"};
  switch (t) {
    case ValueType::String: return strings;
    case ValueType::Integer: return integers;
    case ValueType::Float: return floats;
    case ValueType::Boolean: return bools;
    case ValueType::Date: return dates;
    case ValueType::Time: return times;
    case ValueType::DateTime: return datetimes;
    default: return ids;
  }
}

inline const std::vector<const char*>& output_names_for(ValueType t) {
  static const std::vector<const char*> strings = {"summary", "address", "report", "review_text"};
  static const std::vector<const char*> integers = {"total_count", "stock_level", "score"};
  static const std::vector<const char*> floats = {"total_price", "rate", "estimate"};
  static const std::vector<const char*> bools = {"availability", "is_valid"};
  static const std::vector<const char*> dates = {"available_date", "due_date"};
  static const std::vector<const char*> times = {"available_time", "opening_time"};
  static const std::vector<const char*> datetimes = {"scheduled_slot", "next_opening"};
  static const std::vector<const char*> ids = {"person_ID", "room_ID",  "flight_ID",
                                               "booking_ID", "product_ID", "result_ID"};
  switch (t) {
    case ValueType::String: return strings;
    case ValueType::Integer: return integers;
    case ValueType::Float: return floats;
    case ValueType::Boolean: return bools;
    case ValueType::Date: return dates;
    case ValueType::Time: return times;
    case ValueType::DateTime: return datetimes;
    default: return ids;
  }
}

class CorpusBuilder {
 public:
  explicit CorpusBuilder(const GenConfig& config) : config_(config), rng_(config.seed) {
    validate_config();
  }

  GeneratedCorpus build() {
    GeneratedCorpus corpus;
    long total_calls = 0;
    for (int i = 0; i < config_.instance_count; ++i) {
      TaskInstance inst = build_instance(i);
      for (const auto& api : inst.pool.apis)
        register_behavior(corpus.env, api.name, digest_behavior(api.output.name));
      total_calls += count_calls(inst.gold_plans.front());
      corpus.instances.push_back(std::move(inst));
    }
    if (config_.instance_count > 0)
      corpus.avg_calls = static_cast<double>(total_calls) / config_.instance_count;
    return corpus;
  }

 private:
  void validate_config() {
    double sum = 0.0;
    int max_depth = 0;
    for (const auto& [depth, prob] : config_.depth_distribution) {
      if (depth < 1 || prob < 0.0)
        throw std::invalid_argument("invalid depth distribution entry");
      sum += prob;
      if (prob > 0.0) max_depth = std::max(max_depth, depth);
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("depth distribution probabilities must sum to 1");
    if (config_.pool_max < max_depth)
      throw std::invalid_argument("unsatisfiable config: depth " + std::to_string(max_depth) +
                                  " cannot fit in a pool of at most " +
                                  std::to_string(config_.pool_max) + " APIs");
    if (config_.args_min < 1 || config_.args_max < config_.args_min)
      throw std::invalid_argument("invalid args-per-api range");
    if (config_.pool_min < 1 || config_.pool_max < config_.pool_min)
      throw std::invalid_argument("invalid pool size range");
    if (config_.instance_count < 0) throw std::invalid_argument("negative instance count");
  }

  int irange(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(irange(0, static_cast<int>(v.size()) - 1))];
  }

  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

  int draw_depth() {
    double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    double acc = 0.0;
    for (const auto& [depth, prob] : config_.depth_distribution) {
      acc += prob;
      if (r < acc) return depth;
    }
    return config_.depth_distribution.back().first;
  }

  std::string fresh_api_name(const CategoryVocab& category) {
    for (const char* stem : category.stems)
      if (used_api_names_.insert(stem).second) return stem;
    for (int i = 2;; ++i) {
      std::string name = std::string(pick(category.stems)) + "_" + std::to_string(i);
      if (used_api_names_.insert(name).second) return name;
    }
  }

  /// Literal text that is not a substring of any literal already used in the
  /// instance (and vice versa), so the query names it unambiguously.
  std::string fresh_literal(ValueType t, std::set<std::string>& used) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      std::string v = raw_literal(t);
      bool clash = false;
      for (const auto& u : used)
        if (u.find(v) != std::string::npos || v.find(u) != std::string::npos) clash = true;
      if (!clash) {
        used.insert(v);
        return v;
      }
    }
    // Force distinctness with a running counter.
    std::string v = raw_literal(t) + "_" + std::to_string(used.size());
    used.insert(v);
    return v;
  }

  std::string raw_literal(ValueType t) {
    static const std::vector<const char*> words = {
        "New York", "London",  "Los Angeles", "Paris",  "Tokyo",   "Jack",
        "Lucas",    "Alice",   "Bob",         "jazz",   "sushi",   "thriller",
        "Hilton",   "economy", "marathon",    "violet", "gourmet", "science fiction"};
    switch (t) {
      case ValueType::Integer: return std::to_string(irange(100, 999));
      case ValueType::Float: return std::to_string(irange(1, 99)) + "." + std::to_string(irange(1, 9));
      case ValueType::Boolean: return chance(0.5) ? "true" : "false";
      case ValueType::Date: {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "2025-%02d-%02d", irange(1, 12), irange(1, 28));
        return buf;
      }
      case ValueType::Time:
        return std::to_string(irange(1, 12)) + ":" + (chance(0.5) ? "00" : "30") + " " +
               (chance(0.5) ? "am" : "pm");
      case ValueType::DateTime: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "2025-%02d-%02d %d:%02d pm", irange(1, 12), irange(1, 28),
                      irange(1, 12), chance(0.5) ? 0 : 30);
        return buf;
      }
      case ValueType::Identifier: {
        std::string v(1, static_cast<char>('A' + irange(0, 25)));
        return v + std::to_string(irange(1000, 9999));
      }
      default: return pick(words);
    }
  }

  struct BuildState {
    const CategoryVocab* category = nullptr;
    std::vector<ApiSpec> specs;  // in creation order
    std::set<std::string> used_literals;
    std::vector<std::pair<std::string, std::string>> named_literals;  // (arg name, text)
    int budget = 0;  // remaining APIs allowed in the gold plan
  };

  PlanNode build_gold(BuildState& state, int depth, ValueType out_type) {
    ApiSpec spec;
    spec.name = fresh_api_name(*state.category);
    --state.budget;
    spec.output.value_type = out_type;
    spec.output.name = pick(output_names_for(out_type));
    spec.output.description = "The " + spec.output.name + " produced by " + spec.name + ".";
    spec.description = std::string(state.category->name) + ": " + spec.name + " returns the " +
                       spec.output.name + ".";

    int nargs = irange(config_.args_min, config_.args_max);
    if (depth > 1) nargs = std::max(nargs, 1);
    int chain_index = depth > 1 ? irange(0, nargs - 1) : -1;

    PlanNode node{spec.name, {}};
    std::set<std::string> arg_used;
    for (int i = 0; i < nargs; ++i) {
      ArgSpec arg;
      arg.value_type = pick(concrete_types());
      arg.name = pick(arg_names_for(arg.value_type));
      while (!arg_used.insert(arg.name).second) arg.name += "_" + std::to_string(i);
      arg.description = "The " + arg.name + " for " + spec.name + ".";

      bool make_chain = i == chain_index;
      // Occasionally branch with an extra leaf sub-call when budget allows.
      bool extra_call = !make_chain && depth >= 2 && state.budget > (depth - 1) && chance(0.2);
      if (make_chain || extra_call) {
        PlanNode child = build_gold(state, make_chain ? depth - 1 : 1, arg.value_type);
        node.bindings.emplace_back(arg.name, SubCall{std::move(child)});
      } else {
        std::string text = fresh_literal(arg.value_type, state.used_literals);
        state.named_literals.emplace_back(arg.name, text);
        node.bindings.emplace_back(arg.name, Literal{text, arg.value_type});
      }
      spec.arguments.push_back(std::move(arg));
    }
    std::string fmt = spec.name + "(";
    for (std::size_t i = 0; i < spec.arguments.size(); ++i)
      fmt += (i ? ", " : "") + spec.arguments[i].name;
    spec.format = fmt + ")";
    state.specs.push_back(std::move(spec));
    return node;
  }

  ApiSpec build_distractor(const BuildState& state, const std::vector<ValueType>& gold_arg_types) {
    ApiSpec spec;
    spec.name = fresh_api_name(*state.category);
    ValueType out_type = (!gold_arg_types.empty() && chance(config_.distractor_type_share))
                             ? gold_arg_types[static_cast<std::size_t>(
                                   irange(0, static_cast<int>(gold_arg_types.size()) - 1))]
                             : pick(concrete_types());
    spec.output.value_type = out_type;
    spec.output.name = pick(output_names_for(out_type));
    spec.output.description = "The " + spec.output.name + " produced by " + spec.name + ".";
    spec.description = std::string(state.category->name) + ": " + spec.name + " returns the " +
                       spec.output.name + ".";
    int nargs = irange(1, 2);
    std::set<std::string> arg_used;
    for (int i = 0; i < nargs; ++i) {
      ArgSpec arg;
      arg.value_type = pick(concrete_types());
      arg.name = pick(arg_names_for(arg.value_type));
      while (!arg_used.insert(arg.name).second) arg.name += "_" + std::to_string(i);
      arg.description = "The " + arg.name + " for " + spec.name + ".";
      spec.arguments.push_back(std::move(arg));
    }
    return spec;
  }

  std::string render_query(const BuildState& state, const std::string& root_api) {
    std::string slots;
    for (std::size_t i = 0; i < state.named_literals.size(); ++i) {
      const auto& [arg, text] = state.named_literals[i];
      if (i) slots += i + 1 == state.named_literals.size() ? " and " : ", ";
      slots += "'" + text + "' as the " + arg;
    }
    std::string category = state.category->name;
    switch (irange(0, 2)) {
      case 0:
        return "Please take care of this " + category + " request with " + root_api +
               (slots.empty() ? "." : ": use " + slots + ".");
      case 1:
        return "I need help with a " + category + " task. Run " + root_api +
               (slots.empty() ? " for me." : " for me, taking " + slots + ".");
      default:
        return "Could you handle a " + category + " request via " + root_api +
               (slots.empty() ? "?" : "? Take " + slots + ".");
    }
  }

  TaskInstance build_instance(int index) {
    BuildState state;
    state.category = &pick(category_vocab());
    int depth = draw_depth();
    int pool_size = irange(std::max(config_.pool_min, depth), config_.pool_max);
    state.budget = pool_size;

    TaskInstance inst;
    inst.id = "g" + std::to_string(config_.seed) + "-" + std::to_string(index);
    PlanNode gold = build_gold(state, depth, pick(concrete_types()));

    std::vector<ValueType> gold_arg_types;
    for (const auto& spec : state.specs)
      for (const auto& arg : spec.arguments) gold_arg_types.push_back(arg.value_type);

    inst.query = render_query(state, gold.api_name);
    inst.pool.apis = state.specs;
    while (static_cast<int>(inst.pool.apis.size()) < pool_size)
      inst.pool.apis.push_back(build_distractor(state, gold_arg_types));
    std::shuffle(inst.pool.apis.begin(), inst.pool.apis.end(), rng_);

    inst.gold_plans.push_back(std::move(gold));
    inst.level = level_for_depth(inst.max_gold_depth());
    return inst;
  }

  GenConfig config_;
  std::mt19937_64 rng_;
  std::set<std::string> used_api_names_;  // corpus-wide, so the merged env is unambiguous
};

}  // namespace detail

/// Fully deterministic given the seed. Every instance is solvable by
/// construction: gold edges are type-consistent and all gold literals appear
/// verbatim in the query.
inline GeneratedCorpus generate_tasks(const GenConfig& config) {
  return detail::CorpusBuilder(config).build();
}

}  // namespace revchain
