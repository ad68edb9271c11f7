#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revchain {

/// Value type vocabulary used for narrowing API candidates by output type.
enum class ValueType {
  String,
  Integer,
  Float,
  Boolean,
  Date,
  Time,
  DateTime,
  Identifier,
  Unknown,
};

inline std::string to_string(ValueType t) {
  switch (t) {
    case ValueType::String: return "string";
    case ValueType::Integer: return "integer";
    case ValueType::Float: return "float";
    case ValueType::Boolean: return "boolean";
    case ValueType::Date: return "date";
    case ValueType::Time: return "time";
    case ValueType::DateTime: return "datetime";
    case ValueType::Identifier: return "identifier";
    case ValueType::Unknown: return "unknown";
  }
  return "unknown";
}

/// Case-insensitive; unrecognized strings map to Unknown, never an error.
inline ValueType parse_value_type(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "string" || lower == "str" || lower == "text") return ValueType::String;
  if (lower == "integer" || lower == "int") return ValueType::Integer;
  if (lower == "float" || lower == "double" || lower == "number") return ValueType::Float;
  if (lower == "boolean" || lower == "bool") return ValueType::Boolean;
  if (lower == "date") return ValueType::Date;
  if (lower == "time") return ValueType::Time;
  if (lower == "datetime" || lower == "date_time" || lower == "timestamp") return ValueType::DateTime;
  if (lower == "identifier" || lower == "id") return ValueType::Identifier;
  return ValueType::Unknown;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

struct ArgSpec {
  std::string name;
  std::string description;
  ValueType value_type = ValueType::Unknown;
};

struct OutputSpec {
  std::string name;
  std::string description;
  ValueType value_type = ValueType::Unknown;
};

struct ApiSpec {
  std::string name;
  std::string description;
  std::vector<ArgSpec> arguments;
  OutputSpec output;
  std::optional<std::string> format;

  const ArgSpec* find_argument(std::string_view arg_name) const {
    for (const auto& a : arguments)
      if (a.name == arg_name) return &a;
    return nullptr;
  }
};

struct ApiPool {
  std::vector<ApiSpec> apis;
};

}  // namespace revchain
