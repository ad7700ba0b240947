#pragma once

// Exact argmaxability test: the largest ball that fits inside the target's
// winning region (clipped to the box) has positive radius iff the class can
// strictly win somewhere.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unargmax/error.hpp"
#include "unargmax/geometry.hpp"
#include "unargmax/simplex.hpp"
#include "unargmax/spec.hpp"

namespace unargmax {

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  double radius_threshold = 1e-9;
  int max_rounds = 200;
  long max_pivots = 50000;  // per round
  Index batch = 0;          // rows added per round; 0 means 4 (d + 1)
};

// A family of LP rows  u_i . x + r <= c_i  with unit normals u_i. Sources
// only expose rows with a nonzero normal.
template <typename S>
concept HalfspaceSource = requires(const S& s, Index i, const Vector& x, Vector& out) {
  { s.rows() } -> std::convertible_to<Index>;
  { s.dim() } -> std::convertible_to<Index>;
  { s.competitor(i) } -> std::convertible_to<Index>;
  { s.unit_normal(i) } -> std::convertible_to<Vector>;
  { s.rhs(i) } -> std::convertible_to<double>;
  s.slacks(x, out);  // out_i = c_i - u_i . x for every row
};

// Rows taken from a materialized HalfspaceSystem.
class DenseHalfspaces {
 public:
  explicit DenseHalfspaces(const HalfspaceSystem& sys) {
    std::vector<Index> keep;
    for (Index i = 0; i < sys.rows(); ++i) {
      if (sys.norms(i) > 0.0) keep.push_back(i);
    }
    const auto n = static_cast<Index>(keep.size());
    unit_.resize(n, sys.normals.cols());
    rhs_.resize(n);
    for (Index k = 0; k < n; ++k) {
      const Index i = keep[static_cast<std::size_t>(k)];
      unit_.row(k) = sys.normals.row(i) / sys.norms(i);
      rhs_(k) = -sys.offsets(i) / sys.norms(i);
      competitors_.push_back(sys.competitors[static_cast<std::size_t>(i)]);
    }
  }

  Index rows() const { return unit_.rows(); }
  Index dim() const { return unit_.cols(); }
  Index competitor(Index i) const { return competitors_[static_cast<std::size_t>(i)]; }
  Vector unit_normal(Index i) const { return unit_.row(i).transpose(); }
  double rhs(Index i) const { return rhs_(i); }
  void slacks(const Vector& x, Vector& out) const { out = rhs_ - unit_ * x; }

 private:
  Matrix unit_;
  Vector rhs_;
  std::vector<Index> competitors_;
};

// Rows computed on demand from the spec. Memory stays O(|C|) per target,
// which matters when |C| * d is in the tens of millions.
class SpecHalfspaces {
 public:
  SpecHalfspaces(const SoftmaxSpec& spec, Index target) : spec_(&spec), target_(target) {
    check_target(spec, target);
    const auto wt = spec.weights.row(target);
    for (Index c = 0; c < spec.classes(); ++c) {
      if (c == target) continue;
      const double norm = (spec.weights.row(c) - wt).norm();
      if (norm > 0.0) {
        competitors_.push_back(c);
        norms_.push_back(norm);
      }
    }
  }

  Index rows() const { return static_cast<Index>(competitors_.size()); }
  Index dim() const { return spec_->dim(); }
  Index competitor(Index i) const { return competitors_[static_cast<std::size_t>(i)]; }
  Vector unit_normal(Index i) const {
    return (spec_->weights.row(competitor(i)) - spec_->weights.row(target_)).transpose() /
           norms_[static_cast<std::size_t>(i)];
  }
  double rhs(Index i) const {
    return (spec_->bias_at(target_) - spec_->bias_at(competitor(i))) / norms_[static_cast<std::size_t>(i)];
  }
  void slacks(const Vector& x, Vector& out) const {
    const Vector y = logits(*spec_, x);
    out.resize(rows());
    for (Index i = 0; i < rows(); ++i) {
      out(i) = (y(target_) - y(competitor(i))) / norms_[static_cast<std::size_t>(i)];
    }
  }

 private:
  const SoftmaxSpec* spec_;
  Index target_;
  std::vector<Index> competitors_;
  std::vector<double> norms_;
};

template <HalfspaceSource Source>
class ChebyshevProblem {
 public:
  ChebyshevProblem(Source source, Box box) : source_(std::move(source)), box_(box) {
    if (source_.rows() < 1) {
      throw DomainError("inscribed-ball problem needs at least one competitor row with a nonzero normal");
    }
  }
  const Source& source() const { return source_; }
  const Box& box() const { return box_; }

 private:
  Source source_;
  Box box_;
};

struct ActiveConstraint {
  enum class Kind { Competitor, UpperBox, LowerBox };
  Kind kind;
  Index index;  // competitor class index, or coordinate for box bounds

  friend bool operator==(const ActiveConstraint&, const ActiveConstraint&) = default;
};

struct ChebyshevSolution {
  double radius = 0.0;
  Vector center;
  std::vector<ActiveConstraint> active_set;
  long iterations = 0;
  int rounds = 0;
  double dual_bound = 0.0;  // upper bound on the radius from the LP multipliers
};

template <HalfspaceSource Source>
ChebyshevSolution solve_lp(const ChebyshevProblem<Source>& problem, const LpOptions& opt = {}) {
  const Source& src = problem.source();
  const Index d = src.dim();
  const Index total = src.rows();
  const double bound = problem.box().bound();
  const Index batch = opt.batch > 0 ? opt.batch : 4 * (d + 1);

  // Seed the working set with the rows that bind hardest at the origin.
  Vector slack;
  Vector x = Vector::Zero(d);
  src.slacks(x, slack);
  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Index{0});
  const Index first = std::min(batch, total);
  std::partial_sort(order.begin(), order.begin() + first, order.end(),
                    [&](Index a, Index b) { return slack(a) < slack(b) || (slack(a) == slack(b) && a < b); });
  std::vector<Index> working(order.begin(), order.begin() + first);
  std::vector<char> in_working(static_cast<std::size_t>(total), 0);
  for (Index i : working) in_working[static_cast<std::size_t>(i)] = 1;

  ChebyshevSolution sol;
  detail::RestrictedSolution rs;
  for (int round = 1;; ++round) {
    if (round > opt.max_rounds) {
      throw SolverStalled("constraint generation exceeded " + std::to_string(opt.max_rounds) + " rounds");
    }
    const auto m = static_cast<Index>(working.size());
    Matrix a(m, d);
    Vector c(m);
    for (Index k = 0; k < m; ++k) {
      const Index i = working[static_cast<std::size_t>(k)];
      a.row(k) = src.unit_normal(i).transpose();
      c(k) = src.rhs(i);
    }
    detail::ChebyshevSimplex simplex(a, c, bound, opt.max_pivots);
    rs = simplex.solve(x);
    sol.iterations += rs.pivots;
    sol.rounds = round;
    x = rs.x;

    src.slacks(x, slack);
    std::vector<Index> violated;
    for (Index i = 0; i < total; ++i) {
      if (!in_working[static_cast<std::size_t>(i)] && rs.r - slack(i) > opt.feasibility_tol) violated.push_back(i);
    }
    if (violated.empty()) {
      // Certify the primal side exactly: the best radius at this center
      // over all rows.
      sol.center = x;
      sol.radius = slack.minCoeff();

      const double weight = rs.lambda.sum();
      if (!(weight > 0.0)) throw SolverStalled("LP multipliers vanish; no optimality certificate");
      const Vector lambda = rs.lambda / weight;
      const Vector combo = a.transpose() * lambda;
      sol.dual_bound = lambda.dot(c) + bound * combo.lpNorm<1>();
      const double gap = sol.dual_bound - sol.radius;
      if (gap > opt.optimality_tol * std::max(1.0, std::abs(sol.radius))) {
        throw SolverStalled("optimality gap " + std::to_string(gap) + " exceeds tolerance");
      }

      for (Index i = 0; i < total; ++i) {
        if (slack(i) - sol.radius <= opt.feasibility_tol) {
          sol.active_set.push_back({ActiveConstraint::Kind::Competitor, src.competitor(i)});
        }
      }
      for (Index j = 0; j < d; ++j) {
        if (x(j) >= bound - opt.feasibility_tol) sol.active_set.push_back({ActiveConstraint::Kind::UpperBox, j});
        if (x(j) <= -bound + opt.feasibility_tol) sol.active_set.push_back({ActiveConstraint::Kind::LowerBox, j});
      }
      return sol;
    }
    const Index add = std::min<Index>(batch, static_cast<Index>(violated.size()));
    std::partial_sort(violated.begin(), violated.begin() + add, violated.end(),
                      [&](Index p, Index q) { return slack(p) < slack(q) || (slack(p) == slack(q) && p < q); });
    for (Index k = 0; k < add; ++k) {
      const Index i = violated[static_cast<std::size_t>(k)];
      working.push_back(i);
      in_working[static_cast<std::size_t>(i)] = 1;
    }
  }
}

enum class ExactKind { Argmaxable, Unargmaxable, DominatedByDuplicate };
enum class UnargmaxableReason { NonpositiveRadius, DominatedByDuplicate, PermanentTie };

inline std::string_view to_string(UnargmaxableReason r) {
  switch (r) {
    case UnargmaxableReason::NonpositiveRadius: return "lp_nonpositive_radius";
    case UnargmaxableReason::DominatedByDuplicate: return "dominated_by_duplicate";
    case UnargmaxableReason::PermanentTie: return "permanent_tie";
  }
  return "unknown";
}

struct ExactVerdict {
  ExactKind kind = ExactKind::Unargmaxable;
  UnargmaxableReason reason = UnargmaxableReason::NonpositiveRadius;  // when not Argmaxable
  std::optional<ChebyshevSolution> solution;  // absent when no LP was solved
  std::optional<Index> competitor;             // duplicate that dominates or ties

  bool argmaxable() const { return kind == ExactKind::Argmaxable; }
  double radius() const { return solution ? solution->radius : 0.0; }
};

// Thrown when the LP claims a positive radius but its center fails the
// strict-argmax check; treated like a stall by the pipeline.
class WitnessRejected : public SolverStalled {
 public:
  using SolverStalled::SolverStalled;
};

inline ExactVerdict decide_exact(const SoftmaxSpec& spec, Index target, const Box& box, const LpOptions& opt,
                                 const DuplicateScan& dup) {
  check_target(spec, target);
  ExactVerdict verdict;
  if (dup.dominating) {
    verdict.kind = ExactKind::DominatedByDuplicate;
    verdict.reason = UnargmaxableReason::DominatedByDuplicate;
    verdict.competitor = dup.dominating;
    return verdict;
  }
  SpecHalfspaces rows(spec, target);
  if (rows.rows() > 0) {
    verdict.solution = solve_lp(ChebyshevProblem<SpecHalfspaces>(std::move(rows), box), opt);
  } else if (!dup.permanent_tie) {
    // Every competitor shares the target's row with a smaller bias: the
    // target wins everywhere.
    ChebyshevSolution everywhere;
    everywhere.center = Vector::Zero(spec.dim());
    everywhere.radius = std::numeric_limits<double>::infinity();
    everywhere.dual_bound = everywhere.radius;
    verdict.solution = std::move(everywhere);
  }

  if (dup.permanent_tie) {
    verdict.kind = ExactKind::Unargmaxable;
    verdict.reason = UnargmaxableReason::PermanentTie;
    verdict.competitor = dup.permanent_tie;
    return verdict;
  }
  if (verdict.solution->radius > opt.radius_threshold) {
    if (!check_witness(spec, target, verdict.solution->center, box)) {
      throw WitnessRejected("LP center for class " + std::to_string(target) + " with radius " +
                            std::to_string(verdict.solution->radius) + " is not a strict witness");
    }
    verdict.kind = ExactKind::Argmaxable;
  } else {
    verdict.kind = ExactKind::Unargmaxable;
    verdict.reason = UnargmaxableReason::NonpositiveRadius;
  }
  return verdict;
}

inline ExactVerdict decide_exact(const SoftmaxSpec& spec, Index target, const Box& box = Box{},
                                 const LpOptions& opt = {}) {
  return decide_exact(spec, target, box, opt, scan_duplicates(spec, target));
}

}  // namespace unargmax
