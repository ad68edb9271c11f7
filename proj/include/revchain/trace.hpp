#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace revchain {

/// One planning trace event. Serialized as JSON lines:
///   {"seq": n, "kind": "selection"|"completion"|"extraction"|"guard", "payload": {...}}
/// This file is also the scripted-replay input format.
struct TraceEvent {
  std::string kind;
  nlohmann::ordered_json payload;
};

struct PlanningTrace {
  std::vector<TraceEvent> events;

  int count(std::string_view kind) const {
    int n = 0;
    for (const auto& e : events)
      if (e.kind == kind) ++n;
    return n;
  }
};

inline void write_trace(std::ostream& out, const std::vector<TraceEvent>& events) {
  int seq = 0;
  for (const auto& e : events) {
    nlohmann::ordered_json line;
    line["seq"] = seq++;
    line["kind"] = e.kind;
    line["payload"] = e.payload;
    out << line.dump() << '\n';
  }
}

inline void write_trace_file(const std::string& path, const std::vector<TraceEvent>& events) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  write_trace(out, events);
}

inline std::vector<TraceEvent> read_trace(std::istream& in) {
  std::vector<TraceEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::ordered_json::parse(line);
    events.push_back({j.at("kind").get<std::string>(), j.value("payload", nlohmann::ordered_json::object())});
  }
  return events;
}

inline std::vector<TraceEvent> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return read_trace(in);
}

}  // namespace revchain
