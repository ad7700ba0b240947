#pragma once

// Combined detector: the reflection search settles most classes quickly;
// whatever it cannot prove goes to the inscribed-ball LP.

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "unargmax/braid_reflect.hpp"
#include "unargmax/chebyshev.hpp"
#include "unargmax/geometry.hpp"
#include "unargmax/model_io.hpp"
#include "unargmax/parallel.hpp"
#include "unargmax/spec.hpp"

namespace unargmax {

enum class AuditMode { Combined, ApproxOnly, ExactOnly };

inline std::string_view to_string(AuditMode m) {
  switch (m) {
    case AuditMode::Combined: return "combined";
    case AuditMode::ApproxOnly: return "approx-only";
    case AuditMode::ExactOnly: return "exact-only";
  }
  return "unknown";
}

inline AuditMode parse_mode(std::string_view s) {
  if (s == "combined") return AuditMode::Combined;
  if (s == "approx-only") return AuditMode::ApproxOnly;
  if (s == "exact-only") return AuditMode::ExactOnly;
  throw ValueError("unknown audit mode '" + std::string(s) + "'");
}

enum class StatusKind { ArgmaxableApprox, ArgmaxableExact, Unargmaxable, Indeterminate };

inline std::string_view to_string(StatusKind s) {
  switch (s) {
    case StatusKind::ArgmaxableApprox: return "argmaxable_approx";
    case StatusKind::ArgmaxableExact: return "argmaxable_exact";
    case StatusKind::Unargmaxable: return "unargmaxable";
    case StatusKind::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

enum class IndeterminateReason { SolverStalled, WitnessRejected, ExactSkipped };

inline std::string_view to_string(IndeterminateReason r) {
  switch (r) {
    case IndeterminateReason::SolverStalled: return "solver_stalled";
    case IndeterminateReason::WitnessRejected: return "witness_rejected";
    case IndeterminateReason::ExactSkipped: return "exact_skipped";
  }
  return "unknown";
}

struct ClassStatus {
  Index index = 0;
  std::optional<std::string> token;
  StatusKind status = StatusKind::Indeterminate;
  std::optional<UnargmaxableReason> unargmaxable_reason;
  std::optional<IndeterminateReason> indeterminate_reason;
  // The reflection search did not settle this class.
  bool potentially_unargmaxable = false;
  std::optional<ReflectVerdict> approx_verdict;
  std::optional<long> steps;
  std::optional<double> radius;
  std::optional<Vector> witness;
  std::optional<Index> competitor;  // duplicate row behind a forced verdict
  std::string note;
  double approx_ms = 0.0;
  double exact_ms = 0.0;

  bool argmaxable() const {
    return status == StatusKind::ArgmaxableApprox || status == StatusKind::ArgmaxableExact;
  }
  std::string reason_string() const {
    if (unargmaxable_reason) return std::string(to_string(*unargmaxable_reason));
    if (indeterminate_reason) return std::string(to_string(*indeterminate_reason));
    return {};
  }
};

struct AuditConfig {
  long patience = kDefaultPatience;
  Box box{};
  unsigned threads = 0;  // 0: hardware concurrency
  AuditMode mode = AuditMode::Combined;
  LpOptions lp{};
  bool keep_witnesses = true;
};

struct AuditSummary {
  long argmaxable_approx = 0;
  long argmaxable_exact = 0;
  long unargmaxable = 0;
  long indeterminate = 0;
  long potentially_unargmaxable = 0;

  friend bool operator==(const AuditSummary&, const AuditSummary&) = default;
};

struct AuditTiming {
  double wall_ms = 0.0;
  double approx_ms = 0.0;  // summed over classes
  double exact_ms = 0.0;
};

struct AuditReport {
  std::string name;
  Index classes = 0;
  Index dim = 0;
  bool has_bias = false;
  double bound = kDefaultBound;
  long patience = kDefaultPatience;
  AuditMode mode = AuditMode::Combined;
  unsigned threads = 1;
  LpOptions lp{};
  std::optional<TokenFilter> filter;
  std::vector<ClassStatus> statuses;
  AuditSummary summary;
  AuditTiming timing;
};

inline AuditSummary tally(std::span<const ClassStatus> statuses) {
  AuditSummary s;
  for (const auto& st : statuses) {
    switch (st.status) {
      case StatusKind::ArgmaxableApprox: ++s.argmaxable_approx; break;
      case StatusKind::ArgmaxableExact: ++s.argmaxable_exact; break;
      case StatusKind::Unargmaxable: ++s.unargmaxable; break;
      case StatusKind::Indeterminate: ++s.indeterminate; break;
    }
    if (st.potentially_unargmaxable) ++s.potentially_unargmaxable;
  }
  return s;
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

inline ClassStatus audit_one(const SoftmaxSpec& spec, const RowDuplicates& dups, Index c, const AuditConfig& cfg) {
  ClassStatus st;
  st.index = c;
  if (spec.tokens) st.token = (*spec.tokens)[static_cast<std::size_t>(c)];
  const DuplicateScan scan = scan_duplicates(spec, dups, c);

  if (cfg.mode != AuditMode::ExactOnly) {
    const auto t0 = std::chrono::steady_clock::now();
    ReflectOutcome outcome = prove_argmaxable(spec, c, ReflectConfig{cfg.patience, cfg.box}, scan);
    st.approx_ms = elapsed_ms(t0);
    st.approx_verdict = outcome.verdict;
    st.steps = outcome.steps;
    if (outcome.proved()) {
      st.status = StatusKind::ArgmaxableApprox;
      if (cfg.keep_witnesses) st.witness = std::move(outcome.point);
      return st;
    }
    st.potentially_unargmaxable = true;
    if (cfg.mode == AuditMode::ApproxOnly) {
      st.status = StatusKind::Indeterminate;
      st.indeterminate_reason = IndeterminateReason::ExactSkipped;
      return st;
    }
    if (outcome.verdict == ReflectVerdict::ImmediatelyBlocked) {
      st.status = StatusKind::Unargmaxable;
      st.unargmaxable_reason = UnargmaxableReason::DominatedByDuplicate;
      st.competitor = outcome.blocker;
      return st;
    }
  } else {
    st.potentially_unargmaxable = true;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    ExactVerdict v = decide_exact(spec, c, cfg.box, cfg.lp, scan);
    st.competitor = v.competitor;
    if (v.solution) st.radius = v.solution->radius;
    if (v.argmaxable()) {
      st.status = StatusKind::ArgmaxableExact;
      if (cfg.keep_witnesses) st.witness = std::move(v.solution->center);
    } else {
      st.status = StatusKind::Unargmaxable;
      st.unargmaxable_reason = v.reason;
    }
  } catch (const WitnessRejected& e) {
    st.status = StatusKind::Indeterminate;
    st.indeterminate_reason = IndeterminateReason::WitnessRejected;
    st.note = e.what();
  } catch (const SolverStalled& e) {
    st.status = StatusKind::Indeterminate;
    st.indeterminate_reason = IndeterminateReason::SolverStalled;
    st.note = e.what();
  }
  st.exact_ms = elapsed_ms(t0);
  return st;
}

}  // namespace detail

// Audits the given classes (ascending, no duplicates expected). Every class
// of the layer still competes in each constraint system.
inline AuditReport audit_classes(const SoftmaxSpec& spec, std::span<const Index> classes, const AuditConfig& cfg) {
  validate(spec);
  if (cfg.patience < 1) throw ValueError("patience must be at least 1");
  for (Index c : classes) check_target(spec, c);
  const auto t0 = std::chrono::steady_clock::now();

  AuditReport report;
  report.name = spec.name;
  report.classes = spec.classes();
  report.dim = spec.dim();
  report.has_bias = spec.has_bias();
  report.bound = cfg.box.bound();
  report.patience = cfg.patience;
  report.mode = cfg.mode;
  report.threads = resolve_threads(cfg.threads);
  report.lp = cfg.lp;

  const RowDuplicates dups(spec.weights);
  report.statuses.resize(classes.size());
  parallel_for(classes.size(), report.threads, [&](std::size_t i) {
    report.statuses[i] = detail::audit_one(spec, dups, classes[i], cfg);
  });

  report.summary = tally(report.statuses);
  for (const auto& st : report.statuses) {
    report.timing.approx_ms += st.approx_ms;
    report.timing.exact_ms += st.exact_ms;
  }
  report.timing.wall_ms = detail::elapsed_ms(t0);
  return report;
}

inline AuditReport audit(const SoftmaxSpec& spec, const std::optional<TokenFilter>& filter = std::nullopt,
                         const AuditConfig& cfg = {}) {
  const std::vector<Index> classes = filter ? apply_filter(spec, *filter) : all_classes(spec);
  AuditReport report = audit_classes(spec, classes, cfg);
  report.filter = filter;
  return report;
}

// Per-class reflection step counts in class-index order. Subword
// vocabularies are usually frequency ordered, so this doubles as a
// frequency-ordered profile.
inline std::vector<std::pair<Index, long>> step_histogram(const AuditReport& report) {
  if (report.mode == AuditMode::ExactOnly) {
    throw UnsupportedConfig("step histogram needs a report from a run with the reflection stage");
  }
  std::vector<std::pair<Index, long>> out;
  out.reserve(report.statuses.size());
  for (const auto& st : report.statuses) out.emplace_back(st.index, st.steps.value_or(0));
  return out;
}

}  // namespace unargmax
