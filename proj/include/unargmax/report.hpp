#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "unargmax/error.hpp"
#include "unargmax/npy.hpp"
#include "unargmax/pipeline.hpp"
#include "unargmax/version.hpp"

namespace unargmax {

inline nlohmann::json report_to_json(const AuditReport& r) {
  using nlohmann::json;
  json meta = {
      {"name", r.name},
      {"classes", r.classes},
      {"dim", r.dim},
      {"has_bias", r.has_bias},
      {"bound", r.bound},
      {"patience", r.patience},
      {"mode", std::string(to_string(r.mode))},
      {"threads", r.threads},
      {"tool_version", kToolVersion},
      {"tie_tolerance", kTieTolerance},
      {"feasibility_tol", r.lp.feasibility_tol},
      {"optimality_tol", r.lp.optimality_tol},
      {"radius_threshold", r.lp.radius_threshold},
      {"audited", r.statuses.size()},
      {"order_note", "class index order; subword vocabularies are assumed frequency ordered"},
  };
  if (r.filter) {
    meta["filter"] = {{"allowed_scripts", r.filter->allowed_scripts},
                      {"drop_digits_punct", r.filter->drop_digits_punct},
                      {"keep_special", r.filter->keep_special}};
  }
  json summary = {
      {"argmaxable_approx", r.summary.argmaxable_approx},
      {"argmaxable_exact", r.summary.argmaxable_exact},
      {"unargmaxable", r.summary.unargmaxable},
      {"indeterminate", r.summary.indeterminate},
      {"potentially_unargmaxable", r.summary.potentially_unargmaxable},
  };
  json classes = json::array();
  for (const auto& st : r.statuses) {
    json c = {{"index", st.index},
              {"status", std::string(to_string(st.status))},
              {"potentially_unargmaxable", st.potentially_unargmaxable}};
    if (st.token) c["token"] = *st.token;
    if (st.approx_verdict) c["approx_outcome"] = std::string(to_string(*st.approx_verdict));
    if (st.steps) c["steps"] = *st.steps;
    if (st.radius) c["radius"] = std::isfinite(*st.radius) ? json(*st.radius) : json("inf");
    if (auto reason = st.reason_string(); !reason.empty()) c["reason"] = reason;
    if (st.competitor) c["competitor"] = *st.competitor;
    classes.push_back(std::move(c));
  }
  json timing = {{"wall_ms", r.timing.wall_ms}, {"approx_ms", r.timing.approx_ms}, {"exact_ms", r.timing.exact_ms}};
  return {{"meta", meta}, {"summary", summary}, {"classes", classes}, {"timing", timing}};
}

inline AuditSummary summary_from_json(const nlohmann::json& doc) {
  const auto& s = doc.at("summary");
  AuditSummary out;
  out.argmaxable_approx = s.at("argmaxable_approx").get<long>();
  out.argmaxable_exact = s.at("argmaxable_exact").get<long>();
  out.unargmaxable = s.at("unargmaxable").get<long>();
  out.indeterminate = s.at("indeterminate").get<long>();
  out.potentially_unargmaxable = s.at("potentially_unargmaxable").get<long>();
  return out;
}

inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline constexpr const char* kReportCsvHeader =
    "index,token,status,potentially_unargmaxable,approx_outcome,steps,radius,reason";

inline std::string report_to_csv(const AuditReport& r) {
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (const auto& st : r.statuses) {
    out += std::to_string(st.index) + ",";
    out += csv_quote(st.token.value_or("")) + ",";
    out += std::string(to_string(st.status)) + ",";
    out += st.potentially_unargmaxable ? "true," : "false,";
    out += (st.approx_verdict ? std::string(to_string(*st.approx_verdict)) : std::string()) + ",";
    out += (st.steps ? std::to_string(*st.steps) : std::string()) + ",";
    out += (st.radius ? format_double(*st.radius) : std::string()) + ",";
    out += st.reason_string() + "\n";
  }
  return out;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write " + path.string());
  out << text;
  if (!out) throw IOError("failed writing " + path.string());
}

}  // namespace detail

// Witness vectors go to a (k, d) float64 array at `path`; `path` + ".json"
// maps each array row to its class index.
inline void write_witnesses(const AuditReport& r, const std::filesystem::path& path) {
  std::vector<double> data;
  std::vector<Index> rows;
  for (const auto& st : r.statuses) {
    if (!st.witness) continue;
    rows.push_back(st.index);
    data.insert(data.end(), st.witness->data(), st.witness->data() + st.witness->size());
  }
  const std::size_t shape[2] = {rows.size(), static_cast<std::size_t>(r.dim)};
  npy::write(path, shape, data);
  nlohmann::json index = {{"rows", rows}, {"dim", r.dim}};
  detail::write_text(path.string() + ".json", index.dump(2) + "\n");
}

inline void write_report(const AuditReport& r, const std::optional<std::filesystem::path>& json_path,
                         const std::optional<std::filesystem::path>& csv_path,
                         const std::optional<std::filesystem::path>& witnesses_path) {
  if (json_path) detail::write_text(*json_path, report_to_json(r).dump(2) + "\n");
  if (csv_path) detail::write_text(*csv_path, report_to_csv(r));
  if (witnesses_path) write_witnesses(r, *witnesses_path);
}

}  // namespace unargmax
