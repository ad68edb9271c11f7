#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "revchain/types.hpp"

namespace revchain {

struct PlanNode;

/// Argument bound to a concrete text value.
struct Literal {
  std::string text;
  ValueType inferred_type = ValueType::String;
};

/// Argument that must be asked from the user. Rendered as the ASK_USER token.
struct AskUser {
  std::string question;
};

/// Argument not yet bound. Never present in gold or completed plans.
struct Unfilled {};

/// Argument produced by a nested API call. Owns its child node.
struct SubCall {
  std::unique_ptr<PlanNode> child;

  explicit SubCall(PlanNode node);
  SubCall(const SubCall& other);
  SubCall& operator=(const SubCall& other);
  SubCall(SubCall&&) noexcept = default;
  SubCall& operator=(SubCall&&) noexcept = default;
};

using Binding = std::variant<Literal, SubCall, AskUser, Unfilled>;

/// One call in the nested plan tree: an API name plus ordered named bindings.
struct PlanNode {
  std::string api_name;
  std::vector<std::pair<std::string, Binding>> bindings;

  const Binding* find(std::string_view arg_name) const {
    for (const auto& [k, v] : bindings)
      if (k == arg_name) return &v;
    return nullptr;
  }
  Binding* find(std::string_view arg_name) {
    for (auto& [k, v] : bindings)
      if (k == arg_name) return &v;
    return nullptr;
  }
};

inline SubCall::SubCall(PlanNode node) : child(std::make_unique<PlanNode>(std::move(node))) {}
inline SubCall::SubCall(const SubCall& other) : child(std::make_unique<PlanNode>(*other.child)) {}
inline SubCall& SubCall::operator=(const SubCall& other) {
  if (this != &other) child = std::make_unique<PlanNode>(*other.child);
  return *this;
}

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& expected)
      : std::runtime_error("parse error at offset " + std::to_string(offset) + ": expected " +
                           expected),
        offset_(offset),
        expected_(expected) {}

  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class CallParser {
 public:
  explicit CallParser(std::string_view text) : text_(text) {}

  std::vector<PlanNode> parse_all() {
    std::vector<PlanNode> out;
    skip_separators();
    while (!eof()) {
      out.push_back(parse_call());
      const std::size_t before = pos_;
      skip_separators();
      if (!eof() && pos_ == before)
        throw ParseError(pos_, "';' or newline between calls");
    }
    return out;
  }

  PlanNode parse_call() {
    skip_ws();
    std::string name = parse_name();
    skip_ws();
    expect('(', "'('");
    PlanNode node{std::move(name), {}};
    skip_ws();
    if (peek() == ')') {
      ++pos_;
      return node;
    }
    while (true) {
      skip_ws();
      std::string arg = parse_name();
      if (node.find(arg) != nullptr)
        throw ParseError(pos_, "distinct argument name ('" + arg + "' repeats)");
      skip_ws();
      expect('=', "'='");
      skip_ws();
      node.bindings.emplace_back(std::move(arg), parse_value());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(')', "',' or ')'");
      break;
    }
    return node;
  }

  std::size_t position() const { return pos_; }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!eof() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
                      text_[pos_] == '\n'))
      ++pos_;
  }

  void skip_separators() {
    while (!eof()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ';')
        ++pos_;
      else
        break;
    }
  }

  void expect(char c, const std::string& what) {
    if (peek() != c) throw ParseError(pos_, what);
    ++pos_;
  }

  std::string parse_name() {
    std::size_t start = pos_;
    if (eof() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_'))
      throw ParseError(pos_, "identifier");
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Binding parse_value() {
    char c = peek();
    if (c == '\'' || c == '"') return parse_quoted(c);
    if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    std::size_t start = pos_;
    std::string name = parse_name();
    skip_ws();
    if (name == "ASK_USER" && peek() != '(') return AskUser{""};
    if (peek() != '(') throw ParseError(pos_, "'(' after API name '" + name + "'");
    pos_ = start;
    return SubCall{parse_call()};
  }

  Binding parse_quoted(char quote) {
    ++pos_;  // opening quote
    std::size_t start = pos_;
    while (!eof() && text_[pos_] != quote) ++pos_;
    if (eof()) throw ParseError(pos_, std::string("closing ") + quote);
    std::string body(text_.substr(start, pos_ - start));
    ++pos_;  // closing quote
    return Literal{std::move(body), ValueType::String};
  }

  Binding parse_number() {
    std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') ++pos_;
    std::size_t digits = 0;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_, ++digits;
    if (digits == 0) throw ParseError(pos_, "digit");
    bool is_float = false;
    if (peek() == '.') {
      ++pos_;
      is_float = true;
      if (eof() || !std::isdigit(static_cast<unsigned char>(peek())))
        throw ParseError(pos_, "digit after '.'");
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    return Literal{std::string(text_.substr(start, pos_ - start)),
                   is_float ? ValueType::Float : ValueType::Integer};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one or more call expressions. Top-level calls split on
/// newline/semicolon. Empty input yields an empty list.
inline std::vector<PlanNode> parse_call_expr(std::string_view text) {
  return detail::CallParser(text).parse_all();
}

/// Attempts to parse a single call starting at `pos`. Returns the node and the
/// end offset, or nullopt if no well-formed call starts there.
inline std::optional<std::pair<PlanNode, std::size_t>> try_parse_call_at(std::string_view text,
                                                                         std::size_t pos) {
  if (pos >= text.size()) return std::nullopt;
  detail::CallParser p(text.substr(pos));
  try {
    PlanNode node = p.parse_call();
    return std::make_pair(std::move(node), pos + p.position());
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline void render_literal(std::ostringstream& os, const std::string& text) {
  // Quote style: single quotes unless the text itself contains one.
  char q = text.find('\'') == std::string::npos ? '\'' : '"';
  os << q << text << q;
}

inline void render_node(std::ostringstream& os, const PlanNode& node) {
  os << node.api_name << '(';
  bool first = true;
  for (const auto& [name, binding] : node.bindings) {
    if (!first) os << ", ";
    first = false;
    os << name << '=';
    std::visit(
        [&](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, Literal>) {
            render_literal(os, b.text);
          } else if constexpr (std::is_same_v<T, SubCall>) {
            render_node(os, *b.child);
          } else if constexpr (std::is_same_v<T, AskUser>) {
            os << "ASK_USER";
          } else {
            throw std::invalid_argument("cannot render plan with unfilled binding in " +
                                        node.api_name);
          }
        },
        binding);
  }
  os << ')';
}

}  // namespace detail

/// Canonical text form: single quotes, one space after commas, arguments in
/// stored order. Multiple top-level calls joined with "; ".
inline std::string render_call_expr(const std::vector<PlanNode>& nodes) {
  std::ostringstream os;
  bool first = true;
  for (const auto& n : nodes) {
    if (!first) os << "; ";
    first = false;
    detail::render_node(os, n);
  }
  return os.str();
}

inline std::string render_call_expr(const PlanNode& node) {
  std::ostringstream os;
  detail::render_node(os, node);
  return os.str();
}

// ---------------------------------------------------------------------------
// Canonicalization and equivalence

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool is_numeric_literal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (digits == 0) return false;
  if (i < s.size() && s[i] == '.') {
    ++i;
    std::size_t frac = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++frac;
    if (frac == 0) return false;
  }
  return i == s.size();
}

/// Exact decimal normalization: drop '+', strip leading zeros, strip trailing
/// fractional zeros ("1.0" -> "1", "010" -> "10", "-0" -> "0").
inline std::string normalize_number(const std::string& s) {
  std::string sign;
  std::size_t i = 0;
  if (s[0] == '+') {
    i = 1;
  } else if (s[0] == '-') {
    sign = "-";
    i = 1;
  }
  std::string int_part, frac_part;
  std::size_t dot = s.find('.', i);
  if (dot == std::string::npos) {
    int_part = s.substr(i);
  } else {
    int_part = s.substr(i, dot - i);
    frac_part = s.substr(dot + 1);
  }
  std::size_t nz = int_part.find_first_not_of('0');
  int_part = nz == std::string::npos ? "0" : int_part.substr(nz);
  std::size_t fe = frac_part.find_last_not_of('0');
  frac_part = fe == std::string::npos ? "" : frac_part.substr(0, fe + 1);
  if (int_part == "0" && frac_part.empty()) return "0";
  std::string out = sign + int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  return out;
}

inline std::string normalize_literal_text(const std::string& text) {
  std::string t = trim(text);
  if (!t.empty() && is_numeric_literal(t)) return normalize_number(t);
  return t;
}

}  // namespace detail

/// Sorts bindings by argument name, trims and numerically normalizes literal
/// text, recursively. Idempotent. API names are untouched.
inline PlanNode canonicalize(const PlanNode& node) {
  PlanNode out{node.api_name, {}};
  out.bindings.reserve(node.bindings.size());
  for (const auto& [name, binding] : node.bindings) {
    Binding b = std::visit(
        [](const auto& v) -> Binding {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Literal>) {
            return Literal{detail::normalize_literal_text(v.text), v.inferred_type};
          } else if constexpr (std::is_same_v<T, SubCall>) {
            return SubCall{canonicalize(*v.child)};
          } else {
            return v;
          }
        },
        binding);
    out.bindings.emplace_back(name, std::move(b));
  }
  std::stable_sort(out.bindings.begin(), out.bindings.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

namespace detail {

inline bool canonical_equal(const PlanNode& a, const PlanNode& b) {
  if (a.api_name != b.api_name || a.bindings.size() != b.bindings.size()) return false;
  for (std::size_t i = 0; i < a.bindings.size(); ++i) {
    const auto& [ka, ba] = a.bindings[i];
    const auto& [kb, bb] = b.bindings[i];
    if (ka != kb || ba.index() != bb.index()) return false;
    if (const auto* la = std::get_if<Literal>(&ba)) {
      if (la->text != std::get<Literal>(bb).text) return false;
    } else if (const auto* sa = std::get_if<SubCall>(&ba)) {
      if (!canonical_equal(*sa->child, *std::get<SubCall>(bb).child)) return false;
    }
    // AskUser questions and Unfilled carry no comparable payload.
  }
  return true;
}

}  // namespace detail

/// Structural equivalence modulo argument order, whitespace, quote style and
/// numeric literal formatting.
inline bool equivalent(const PlanNode& a, const PlanNode& b) {
  return detail::canonical_equal(canonicalize(a), canonicalize(b));
}

/// Set-wise equivalence of top-level call lists (any pairing).
inline bool equivalent(const std::vector<PlanNode>& a, const std::vector<PlanNode>& b) {
  if (a.size() != b.size()) return false;
  auto keys = [](const std::vector<PlanNode>& v) {
    std::vector<std::string> ks;
    ks.reserve(v.size());
    for (const auto& n : v) ks.push_back(render_call_expr(canonicalize(n)));
    std::sort(ks.begin(), ks.end());
    return ks;
  };
  return keys(a) == keys(b);
}

inline int nesting_depth(const PlanNode& node) {
  int best = 0;
  for (const auto& [name, binding] : node.bindings)
    if (const auto* sc = std::get_if<SubCall>(&binding))
      best = std::max(best, nesting_depth(*sc->child));
  return 1 + best;
}

inline int count_calls(const PlanNode& node) {
  int n = 1;
  for (const auto& [name, binding] : node.bindings)
    if (const auto* sc = std::get_if<SubCall>(&binding)) n += count_calls(*sc->child);
  return n;
}

// ---------------------------------------------------------------------------
// Execution schedule

struct ExecutionStep {
  int order_index = 0;
  std::string api_name;
  std::vector<std::pair<std::string, std::string>> literal_args;
  std::vector<std::pair<std::string, int>> dependency_args;  // arg name -> producing step
};

namespace detail {

inline int schedule_node(const PlanNode& node, std::vector<ExecutionStep>& steps) {
  ExecutionStep step;
  step.api_name = node.api_name;
  for (const auto& [name, binding] : node.bindings) {
    if (const auto* lit = std::get_if<Literal>(&binding)) {
      step.literal_args.emplace_back(name, lit->text);
    } else if (const auto* sc = std::get_if<SubCall>(&binding)) {
      step.dependency_args.emplace_back(name, schedule_node(*sc->child, steps));
    } else {
      throw std::invalid_argument("cannot schedule plan with unresolved binding '" + name +
                                  "' of " + node.api_name);
    }
  }
  step.order_index = static_cast<int>(steps.size());
  steps.push_back(std::move(step));
  return steps.back().order_index;
}

}  // namespace detail

/// Post-order schedule: children precede parents, every dependency index is
/// strictly smaller than its consumer's.
inline std::vector<ExecutionStep> execution_order(const PlanNode& node) {
  std::vector<ExecutionStep> steps;
  detail::schedule_node(node, steps);
  return steps;
}

}  // namespace revchain
