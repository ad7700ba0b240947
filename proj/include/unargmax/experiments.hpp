#pragma once

// Audits of randomly initialized layers across bottleneck widths.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "unargmax/pipeline.hpp"
#include "unargmax/random.hpp"
#include "unargmax/report.hpp"
#include "unargmax/spec.hpp"

namespace unargmax {

// Weights (row by row) then bias, i.i.d. on (-1, 1).
inline SoftmaxSpec random_spec(Index n, Index d, bool with_bias, std::uint64_t seed) {
  if (n < 2 || d < 1) throw DomainError("random spec needs n >= 2 and d >= 1");
  SymmetricUniform draw(seed);
  SoftmaxSpec spec;
  spec.weights.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) spec.weights(i, j) = draw();
  }
  if (with_bias) {
    spec.bias = Vector(n);
    for (Index i = 0; i < n; ++i) (*spec.bias)(i) = draw();
  }
  spec.name = "uniform-n" + std::to_string(n) + "-d" + std::to_string(d) + (with_bias ? "-bias" : "") + "-seed" +
              std::to_string(seed);
  return spec;
}

struct ExperimentRow {
  Index n = 0;
  Index d = 0;
  bool with_bias = false;
  std::uint64_t seed = 0;
  long unargmaxable = 0;
  long potentially_unargmaxable = 0;
  long indeterminate = 0;
  double mean_steps = 0.0;  // over all classes; exhausted searches count as patience
  long max_steps = 0;
  double wall_ms = 0.0;
};

struct ExperimentTable {
  std::string generator = kGeneratorName;
  std::vector<ExperimentRow> rows;
};

inline ExperimentRow summarize(const AuditReport& report, std::uint64_t seed) {
  ExperimentRow row;
  row.n = report.classes;
  row.d = report.dim;
  row.with_bias = report.has_bias;
  row.seed = seed;
  row.unargmaxable = report.summary.unargmaxable;
  row.potentially_unargmaxable = report.summary.potentially_unargmaxable;
  row.indeterminate = report.summary.indeterminate;
  long total = 0;
  for (const auto& st : report.statuses) {
    const long s = st.steps.value_or(0);
    total += s;
    row.max_steps = std::max(row.max_steps, s);
  }
  row.mean_steps = report.statuses.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(report.statuses.size());
  row.wall_ms = report.timing.wall_ms;
  return row;
}

inline ExperimentTable sweep_dims(Index n, const std::vector<Index>& dims, bool with_bias,
                                  const std::vector<std::uint64_t>& seeds, const AuditConfig& cfg = {}) {
  ExperimentTable table;
  for (Index d : dims) {
    for (std::uint64_t seed : seeds) {
      const SoftmaxSpec spec = random_spec(n, d, with_bias, seed);
      AuditConfig run = cfg;
      run.keep_witnesses = false;
      table.rows.push_back(summarize(audit(spec, std::nullopt, run), seed));
    }
  }
  return table;
}

inline constexpr const char* kExperimentCsvHeader =
    "n,d,with_bias,seed,unargmaxable,potentially_unargmaxable,mean_steps,max_steps,wall_ms";

inline std::string experiment_to_csv(const ExperimentTable& table) {
  std::string out = std::string(kExperimentCsvHeader) + "\n";
  for (const auto& r : table.rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.d) + "," + (r.with_bias ? "true" : "false") + "," +
           std::to_string(r.seed) + "," + std::to_string(r.unargmaxable) + "," +
           std::to_string(r.potentially_unargmaxable) + "," + format_double(r.mean_steps) + "," +
           std::to_string(r.max_steps) + "," + format_double(r.wall_ms) + "\n";
  }
  return out;
}

}  // namespace unargmax
