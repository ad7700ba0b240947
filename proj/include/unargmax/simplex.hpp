#pragma once

// Bounded-variable primal simplex on a condensed (exchange) tableau for the
// inscribed-ball problem
//
//   maximize r  subject to  A x + r <= c,  -B <= x_j <= B,  r free,
//
// where the rows of A are unit vectors. The tableau keeps one row per basic
// variable and one column per nonbasic variable, so its width stays at d + 1
// no matter how many constraint rows are present.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "unargmax/error.hpp"
#include "unargmax/spec.hpp"

namespace unargmax::detail {

struct RestrictedSolution {
  Vector x;
  double r = 0.0;
  Vector lambda;  // multipliers on the rows of A, from the objective row
  long pivots = 0;
};

class ChebyshevSimplex {
 public:
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kDualTol = 1e-10;
  static constexpr double kDegenerateStep = 1e-12;
  static constexpr long kDegenerateRunBeforeBland = 50;

  ChebyshevSimplex(const Matrix& a, const Vector& c, double bound, long max_pivots)
      : a_(a), c_(c), bound_(bound), max_pivots_(max_pivots) {}

  RestrictedSolution solve(const Vector& start) {
    const Index m = a_.rows();
    const Index d = a_.cols();
    const Index nvars = d + 1 + m;
    const double inf = std::numeric_limits<double>::infinity();
    lower_.assign(static_cast<std::size_t>(nvars), 0.0);
    upper_.assign(static_cast<std::size_t>(nvars), inf);
    value_.assign(static_cast<std::size_t>(nvars), 0.0);
    for (Index j = 0; j < d; ++j) {
      lower_[idx(j)] = -bound_;
      upper_[idx(j)] = bound_;
    }
    lower_[idx(d)] = -inf;

    // Start from the clamped point with the largest feasible radius there;
    // every slack is then nonnegative so no phase one is needed.
    Vector x0 = start.cwiseMax(-bound_).cwiseMin(bound_);
    Vector slack = c_ - a_ * x0;
    const double r0 = slack.minCoeff();
    for (Index j = 0; j < d; ++j) value_[idx(j)] = x0(j);
    value_[idx(d)] = r0;
    for (Index i = 0; i < m; ++i) value_[idx(d + 1 + i)] = slack(i) - r0;

    // Rows 0..m-1 express the slacks s = c - A x - r, row m the objective.
    // The last column is the constant term.
    tab_.setZero(m + 1, d + 2);
    tab_.topLeftCorner(m, d) = -a_;
    tab_.block(0, d, m, 1).setConstant(-1.0);
    tab_.block(0, d + 1, m, 1) = c_;
    tab_(m, d) = 1.0;
    basic_.resize(static_cast<std::size_t>(m));
    nonbasic_.resize(static_cast<std::size_t>(d + 1));
    for (Index i = 0; i < m; ++i) basic_[idx(i)] = d + 1 + i;
    for (Index k = 0; k <= d; ++k) nonbasic_[idx(k)] = k;

    long pivots = 0;
    long degenerate_run = 0;
    bool bland = false;
    while (true) {
      const Index q = choose_entering(bland);
      if (q < 0) break;
      if (++pivots > max_pivots_) {
        throw SolverStalled("simplex exceeded " + std::to_string(max_pivots_) + " pivots");
      }
      const double sigma = tab_(m, q) > 0.0 ? 1.0 : -1.0;
      const Index entering = nonbasic_[idx(q)];
      double theta = sigma > 0.0 ? upper_[idx(entering)] - value_[idx(entering)]
                                 : value_[idx(entering)] - lower_[idx(entering)];
      theta = std::max(theta, 0.0);
      const Index leave = choose_leaving(q, sigma, theta, bland);
      if (leave >= 0) theta = ratio(leave, q, sigma);
      if (!std::isfinite(theta)) throw SolverStalled("inscribed-ball LP is unbounded");

      value_[idx(entering)] += sigma * theta;
      for (Index i = 0; i < m; ++i) value_[idx(basic_[idx(i)])] += tab_(i, q) * sigma * theta;

      if (theta <= kDegenerateStep) {
        if (++degenerate_run > kDegenerateRunBeforeBland) bland = true;
      } else {
        degenerate_run = 0;
      }

      if (leave >= 0) {
        const Index leaving = basic_[idx(leave)];
        value_[idx(leaving)] = tab_(leave, q) * sigma < 0.0 ? lower_[idx(leaving)] : upper_[idx(leaving)];
        pivot(leave, q);
        std::swap(basic_[idx(leave)], nonbasic_[idx(q)]);
      }
    }

    refresh_basic_values();
    RestrictedSolution out;
    out.pivots = pivots;
    out.x.resize(d);
    for (Index j = 0; j < d; ++j) out.x(j) = std::clamp(value_[idx(j)], -bound_, bound_);
    out.r = value_[idx(d)];
    out.lambda = Vector::Zero(m);
    for (Index k = 0; k <= d; ++k) {
      const Index v = nonbasic_[idx(k)];
      if (v > d) out.lambda(v - d - 1) = std::max(0.0, -tab_(m, k));
    }
    return out;
  }

 private:
  static std::size_t idx(Index i) { return static_cast<std::size_t>(i); }

  double bound_tol(double b) const { return 1e-12 * std::max(1.0, std::abs(b)); }

  Index choose_entering(bool bland) const {
    const Index m = a_.rows();
    Index best = -1;
    double best_score = 0.0;
    for (Index k = 0; k < tab_.cols() - 1; ++k) {
      const double f = tab_(m, k);
      const Index v = nonbasic_[idx(k)];
      const double val = value_[idx(v)];
      const double hi = upper_[idx(v)], lo = lower_[idx(v)];
      const bool up = f > kDualTol && (std::isinf(hi) || val < hi - bound_tol(hi));
      const bool down = f < -kDualTol && (std::isinf(lo) || val > lo + bound_tol(lo));
      if (!up && !down) continue;
      if (bland) {
        if (best < 0 || v < nonbasic_[idx(best)]) best = k;
      } else if (std::abs(f) > best_score) {
        best_score = std::abs(f);
        best = k;
      }
    }
    return best;
  }

  // Step length until basic row i hits a bound, or +inf.
  double ratio(Index i, Index q, double sigma) const {
    const double alpha = tab_(i, q) * sigma;
    const Index v = basic_[idx(i)];
    double lim = std::numeric_limits<double>::infinity();
    if (alpha < -kPivotTol && std::isfinite(lower_[idx(v)])) {
      lim = (value_[idx(v)] - lower_[idx(v)]) / -alpha;
    } else if (alpha > kPivotTol && std::isfinite(upper_[idx(v)])) {
      lim = (upper_[idx(v)] - value_[idx(v)]) / alpha;
    }
    return std::max(lim, 0.0);
  }

  // Returns the blocking row, or -1 when the entering variable reaches its
  // own bound first.
  Index choose_leaving(Index q, double sigma, double own_limit, bool bland) const {
    const Index m = a_.rows();
    double min_ratio = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m; ++i) min_ratio = std::min(min_ratio, ratio(i, q, sigma));
    if (!(min_ratio < own_limit)) return -1;
    const double cutoff = min_ratio * (1.0 + 1e-9) + 1e-12;
    Index best = -1;
    for (Index i = 0; i < m; ++i) {
      const double alpha = std::abs(tab_(i, q));
      if (alpha <= kPivotTol || ratio(i, q, sigma) > cutoff) continue;
      if (best < 0) {
        best = i;
      } else if (bland ? basic_[idx(i)] < basic_[idx(best)] : alpha > std::abs(tab_(best, q))) {
        best = i;
      }
    }
    return best;
  }

  void pivot(Index p, Index q) {
    const double piv = tab_(p, q);
    tab_.row(p) /= -piv;
    tab_(p, q) = 1.0 / piv;
    for (Index i = 0; i < tab_.rows(); ++i) {
      if (i == p) continue;
      const double a = tab_(i, q);
      if (a == 0.0) continue;
      tab_.row(i) += a * tab_.row(p);
      tab_(i, q) = a / piv;
    }
  }

  void refresh_basic_values() {
    const Index m = a_.rows();
    const Index cols = tab_.cols() - 1;
    Vector vn(cols + 1);
    for (Index k = 0; k < cols; ++k) vn(k) = value_[idx(nonbasic_[idx(k)])];
    vn(cols) = 1.0;
    const Vector vb = tab_.topRows(m) * vn;
    for (Index i = 0; i < m; ++i) value_[idx(basic_[idx(i)])] = vb(i);
  }

  const Matrix& a_;
  const Vector& c_;
  double bound_;
  long max_pivots_;
  Matrix tab_;
  std::vector<Index> basic_;
  std::vector<Index> nonbasic_;
  std::vector<double> lower_, upper_, value_;
};

}  // namespace unargmax::detail
