#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "unargmax/error.hpp"
#include "unargmax/spec.hpp"

namespace unargmax {

// Minimum logit gap for a class to count as the strict argmax.
inline constexpr double kTieTolerance = 1e-12;
inline constexpr double kDefaultBound = 100.0;

// The axis-aligned region -bound <= x_j <= bound.
class Box {
 public:
  explicit Box(double bound = kDefaultBound) : bound_(bound) {
    if (!(bound > 0.0) || !std::isfinite(bound)) throw ValueError("box bound must be positive and finite");
  }
  double bound() const { return bound_; }
  bool contains(const Vector& x) const { return x.size() == 0 || x.cwiseAbs().maxCoeff() <= bound_; }

 private:
  double bound_;
};

// Constraints "competitor logit < target logit" written as
// normals.row(i) * x + offsets(i) < 0, one row per competitor.
struct HalfspaceSystem {
  Index target = 0;
  Matrix normals;
  Vector offsets;
  Vector norms;
  std::vector<Index> competitors;  // row i -> class index

  Index rows() const { return normals.rows(); }
  double evaluate(Index row, const Vector& x) const { return normals.row(row).dot(x) + offsets(row); }
  // Competitor row index for class c (c != target).
  Index row_of(Index c) const { return c < target ? c : c - 1; }
};

inline void check_target(const SoftmaxSpec& spec, Index target) {
  if (target < 0 || target >= spec.classes()) {
    throw DomainError("class index " + std::to_string(target) + " out of range [0, " +
                      std::to_string(spec.classes()) + ")");
  }
}

inline HalfspaceSystem build_halfspaces(const SoftmaxSpec& spec, Index target) {
  check_target(spec, target);
  const Index n = spec.classes();
  HalfspaceSystem sys;
  sys.target = target;
  sys.normals.resize(n - 1, spec.dim());
  sys.offsets.resize(n - 1);
  sys.norms.resize(n - 1);
  sys.competitors.reserve(static_cast<std::size_t>(n - 1));
  Index row = 0;
  for (Index c = 0; c < n; ++c) {
    if (c == target) continue;
    sys.normals.row(row) = spec.weights.row(c) - spec.weights.row(target);
    sys.offsets(row) = spec.bias_at(c) - spec.bias_at(target);
    sys.norms(row) = sys.normals.row(row).norm();
    sys.competitors.push_back(c);
    ++row;
  }
  return sys;
}

inline Vector logits(const SoftmaxSpec& spec, const Vector& x) {
  if (x.size() != spec.dim()) {
    throw ShapeError("input has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(spec.dim()));
  }
  Vector y = spec.weights * x;
  if (spec.bias) y += *spec.bias;
  return y;
}

struct ArgmaxResult {
  std::optional<Index> winner;  // empty on a tie
  Index first_max = 0;          // lowest index attaining the maximum

  bool is_tie() const { return !winner.has_value(); }
};

inline ArgmaxResult strict_argmax(const Vector& y, double tie_tolerance = kTieTolerance) {
  ArgmaxResult out;
  Index best = 0;
  for (Index i = 1; i < y.size(); ++i) {
    if (y(i) > y(best)) best = i;
  }
  out.first_max = best;
  double runner_up = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < y.size(); ++i) {
    if (i != best) runner_up = std::max(runner_up, y(i));
  }
  if (y(best) - runner_up > tie_tolerance) out.winner = best;
  return out;
}

inline bool check_witness(const SoftmaxSpec& spec, Index target, const Vector& x, const Box& box) {
  check_target(spec, target);
  if (x.size() != spec.dim() || !x.allFinite() || !box.contains(x)) return false;
  auto am = strict_argmax(logits(spec, x));
  return am.winner && *am.winner == target;
}

// Groups classes whose weight rows are exactly equal. Such pairs yield
// zero-normal halfspaces, which both detectors resolve without geometry.
class RowDuplicates {
 public:
  explicit RowDuplicates(const Matrix& weights) : group_(static_cast<std::size_t>(weights.rows())) {
    const Index n = weights.rows();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    auto row_less = [&](Index a, Index b) {
      for (Index j = 0; j < weights.cols(); ++j) {
        if (weights(a, j) < weights(b, j)) return true;
        if (weights(b, j) < weights(a, j)) return false;
      }
      return a < b;
    };
    auto row_equal = [&](Index a, Index b) { return (weights.row(a).array() == weights.row(b).array()).all(); };
    std::sort(order.begin(), order.end(), row_less);
    std::size_t start = 0;
    while (start < order.size()) {
      std::size_t end = start + 1;
      while (end < order.size() && row_equal(order[start], order[end])) ++end;
      const std::size_t id = members_.size();
      std::vector<Index> members(order.begin() + static_cast<std::ptrdiff_t>(start),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(members.begin(), members.end());
      for (Index m : members) group_[static_cast<std::size_t>(m)] = id;
      members_.push_back(std::move(members));
      start = end;
    }
  }

  // Every class (including c itself) whose row equals row c, ascending.
  std::span<const Index> group_of(Index c) const { return members_[group_[static_cast<std::size_t>(c)]]; }
  bool has_duplicates() const { return members_.size() < group_.size(); }

 private:
  std::vector<std::size_t> group_;
  std::vector<std::vector<Index>> members_;
};

struct DuplicateScan {
  std::optional<Index> dominating;     // identical row with strictly larger bias
  std::optional<Index> permanent_tie;  // identical row and identical bias
};

inline DuplicateScan scan_duplicates(const SoftmaxSpec& spec, const RowDuplicates& dups, Index target) {
  DuplicateScan scan;
  const double bt = spec.bias_at(target);
  for (Index c : dups.group_of(target)) {
    if (c == target) continue;
    const double offset = spec.bias_at(c) - bt;
    if (offset > 0.0 && !scan.dominating) scan.dominating = c;
    if (offset == 0.0 && !scan.permanent_tie) scan.permanent_tie = c;
  }
  return scan;
}

}  // namespace unargmax

namespace unargmax {

// Same result as scan_duplicates without a precomputed index: one pass over
// the weight rows.
inline DuplicateScan scan_duplicates(const SoftmaxSpec& spec, Index target) {
  check_target(spec, target);
  DuplicateScan scan;
  const double bt = spec.bias_at(target);
  for (Index c = 0; c < spec.classes(); ++c) {
    if (c == target || !(spec.weights.row(c).array() == spec.weights.row(target).array()).all()) continue;
    const double offset = spec.bias_at(c) - bt;
    if (offset > 0.0 && !scan.dominating) scan.dominating = c;
    if (offset == 0.0 && !scan.permanent_tie) scan.permanent_tie = c;
  }
  return scan;
}

}  // namespace unargmax
