#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "projcalc/point.hpp"
#include "projcalc/projections.hpp"

namespace projcalc::harness {

using json = nlohmann::json;

enum class Status { Pass, Fail, Undetermined };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Undetermined: return "undetermined";
  }
  return "?";
}

struct CaseResult {
  std::string id;
  std::string anchor;  // property the case exercises
  Status status = Status::Pass;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> labels;
  std::optional<json> witness;
  std::string repro;
};

struct Report {
  std::string suite;
  std::string timestamp;
  json config;
  std::vector<CaseResult> cases;
  std::map<std::string, std::uint64_t> coverage;

  std::size_t count(Status s) const {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [&](const auto& c) { return c.status == s; }));
  }
  bool ok() const { return count(Status::Fail) == 0; }
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class Tag>
json to_json(const Point<Tag>& p) {
  json a = json::array();
  for (Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

// Masks leave the library 0-based and appear 1-based in reports and flags.
inline json to_json(const Mask& m) {
  json a = json::array();
  for (Index i : m.indices()) a.push_back(i + 1);
  return a;
}

inline json to_json(const CaseResult& c) {
  json j;
  j["id"] = c.id;
  j["anchor"] = c.anchor;
  j["status"] = status_name(c.status);
  j["metrics"] = json::object();
  for (const auto& [k, v] : c.metrics) j["metrics"][k] = v;
  if (!c.labels.empty()) {
    j["labels"] = json::object();
    for (const auto& [k, v] : c.labels) j["labels"][k] = v;
  }
  if (c.witness) j["witness"] = *c.witness;
  j["repro"] = c.repro;
  return j;
}

inline json to_json(const Report& r) {
  json j;
  j["suite"] = r.suite;
  j["timestamp"] = r.timestamp;
  j["config"] = r.config;
  json cases = json::array();
  for (const auto& c : r.cases) cases.push_back(to_json(c));
  j["cases"] = std::move(cases);
  json counts;
  counts["total"] = r.cases.size();
  counts["pass"] = r.count(Status::Pass);
  counts["fail"] = r.count(Status::Fail);
  counts["undetermined"] = r.count(Status::Undetermined);
  j["summary"]["counts"] = counts;
  j["summary"]["coverage"] = r.coverage;
  return j;
}

namespace detail {

inline void dump(std::ostream& os, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        dump(os, it.value(), indent, depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // numeric arrays stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); });
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          dump(os, j[i], indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        dump(os, j[i], indent, depth + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

inline std::string dump_json(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::dump(os, j, indent, 0);
  os << "\n";
  return os.str();
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// One row per (case, metric).
inline std::string to_csv(const Report& r) {
  std::ostringstream os;
  os << "id,anchor,status,metric,value\n";
  for (const auto& c : r.cases) {
    if (c.metrics.empty()) {
      os << csv_escape(c.id) << "," << csv_escape(c.anchor) << "," << status_name(c.status) << ",,\n";
      continue;
    }
    for (const auto& [k, v] : c.metrics)
      os << csv_escape(c.id) << "," << csv_escape(c.anchor) << "," << status_name(c.status) << "," << csv_escape(k)
         << "," << format_double(v) << "\n";
  }
  return os.str();
}

}  // namespace projcalc::harness
