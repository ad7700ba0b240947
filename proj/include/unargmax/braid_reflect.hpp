#pragma once

// One-sided search for a witness input: start at the target's own weight
// row and keep reflecting across the hyperplane that separates the target
// from whichever class currently wins.

#include <optional>
#include <string_view>

#include "unargmax/error.hpp"
#include "unargmax/geometry.hpp"
#include "unargmax/spec.hpp"

namespace unargmax {

inline constexpr long kDefaultPatience = 2500;

struct ReflectConfig {
  long patience = kDefaultPatience;
  Box box{};
};

enum class ReflectVerdict {
  ProvedArgmaxable,    // witness inside the box
  OutOfBoundsWitness,  // strict win, but outside the box
  Exhausted,           // patience used up without a strict win
  ImmediatelyBlocked,  // an identical row with a larger bias always wins
};

inline std::string_view to_string(ReflectVerdict v) {
  switch (v) {
    case ReflectVerdict::ProvedArgmaxable: return "proved";
    case ReflectVerdict::OutOfBoundsWitness: return "out_of_bounds";
    case ReflectVerdict::Exhausted: return "exhausted";
    case ReflectVerdict::ImmediatelyBlocked: return "blocked";
  }
  return "unknown";
}

struct ReflectOutcome {
  Index target = 0;
  ReflectVerdict verdict = ReflectVerdict::Exhausted;
  long steps = 0;
  Vector point;                   // witness for the first two verdicts, last iterate otherwise
  std::optional<Index> blocker;   // set for ImmediatelyBlocked

  bool proved() const { return verdict == ReflectVerdict::ProvedArgmaxable; }
};

namespace detail {

// Reflection of x across {w.x + beta = 0}, written exactly as the update
// x - 2 (w'.x + beta/|w|) w' with w' = w/|w|.
template <typename Normal>
void reflect_in_place(Vector& x, const Normal& w, double beta) {
  const double norm = w.norm();
  if (norm == 0.0) throw DegenerateHyperplane("cannot reflect across a hyperplane with zero normal");
  const Vector unit = w.transpose() / norm;
  const double dist = unit.dot(x);
  x -= 2.0 * (dist + beta / norm) * unit;
}

}  // namespace detail

// Reflects x across the hyperplane of row `violating` of the system. The
// system stores competitor-minus-target rows; the reflection uses the
// target-minus-competitor orientation, which describes the same hyperplane.
inline Vector reflect_step(const HalfspaceSystem& system, const Vector& x, Index violating) {
  if (violating < 0 || violating >= system.rows()) throw DomainError("constraint row out of range");
  if (x.size() != system.normals.cols()) throw ShapeError("point dimension does not match the system");
  Vector out = x;
  detail::reflect_in_place(out, -system.normals.row(violating), -system.offsets(violating));
  return out;
}

// Signed logit gap target minus competitor at x.
inline double logit_gap(const SoftmaxSpec& spec, Index target, Index competitor, const Vector& x) {
  return (spec.weights.row(target) - spec.weights.row(competitor)).dot(x) + spec.bias_at(target) -
         spec.bias_at(competitor);
}

inline ReflectOutcome prove_argmaxable(const SoftmaxSpec& spec, Index target, const ReflectConfig& config,
                                       const DuplicateScan& dup) {
  check_target(spec, target);
  if (config.patience < 1) throw ValueError("patience must be at least 1");
  ReflectOutcome out;
  out.target = target;
  out.point = spec.weights.row(target).transpose();
  if (dup.dominating) {
    out.verdict = ReflectVerdict::ImmediatelyBlocked;
    out.blocker = dup.dominating;
    return out;
  }
  if (dup.permanent_tie) {
    // An identical class ties everywhere; no reflection can break the tie.
    out.verdict = ReflectVerdict::Exhausted;
    out.steps = config.patience;
    return out;
  }

  Vector& x = out.point;
  for (long step = 0;; ++step) {
    const Vector y = logits(spec, x);
    const ArgmaxResult am = strict_argmax(y);
    if (am.winner && *am.winner == target) {
      out.steps = step;
      out.verdict = config.box.contains(x) ? ReflectVerdict::ProvedArgmaxable : ReflectVerdict::OutOfBoundsWitness;
      return out;
    }
    if (step == config.patience) {
      out.steps = step;
      out.verdict = ReflectVerdict::Exhausted;
      return out;
    }
    Index competitor = am.first_max;
    if (competitor == target) {
      // Target ties for the max: take the first other class attaining it.
      competitor = target == 0 ? 1 : 0;
      for (Index i = 0; i < y.size(); ++i) {
        if (i != target && y(i) > y(competitor)) competitor = i;
      }
    }
    detail::reflect_in_place(x, spec.weights.row(target) - spec.weights.row(competitor),
                             spec.bias_at(target) - spec.bias_at(competitor));
  }
}

inline ReflectOutcome prove_argmaxable(const SoftmaxSpec& spec, Index target, const ReflectConfig& config = {}) {
  return prove_argmaxable(spec, target, config, scan_duplicates(spec, target));
}

}  // namespace unargmax
