#pragma once

// Brute-force verifiers for small instances. They share no code with the
// reflection search or the LP beyond logit evaluation.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <vector>

#include "unargmax/error.hpp"
#include "unargmax/geometry.hpp"
#include "unargmax/random.hpp"
#include "unargmax/spec.hpp"

namespace unargmax {

namespace exact {

inline void two_sum(double a, double b, double& sum, double& err) {
  sum = a + b;
  const double bv = sum - a;
  const double av = sum - bv;
  err = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& prod, double& err) {
  prod = a * b;
  err = std::fma(a, b, -prod);
}

// Adds b to a nonoverlapping expansion ordered by increasing magnitude.
inline void grow_expansion(std::vector<double>& e, double b) {
  std::vector<double> h;
  h.reserve(e.size() + 1);
  double q = b;
  for (double component : e) {
    double sum, err;
    two_sum(q, component, sum, err);
    q = sum;
    if (err != 0.0) h.push_back(err);
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  e.swap(h);
}

// Sign of det[[bx-ax, by-ay],[cx-ax, cy-ay]], evaluated without rounding:
// +1 for a counter-clockwise turn a->b->c, -1 clockwise, 0 collinear.
inline int orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
  const double terms[6][2] = {{ax, by}, {bx, cy}, {cx, ay}, {-ay, bx}, {-by, cx}, {-cy, ax}};
  std::vector<double> e{0.0};
  for (const auto& t : terms) {
    double p, err;
    two_product(t[0], t[1], p, err);
    grow_expansion(e, err);
    grow_expansion(e, p);
  }
  for (auto it = e.rbegin(); it != e.rend(); ++it) {
    if (*it > 0.0) return 1;
    if (*it < 0.0) return -1;
  }
  return 0;
}

}  // namespace exact

enum class HullMembership { Vertex, NotVertex };

// Planar hull test on the weight rows. Without a bias a class is argmaxable
// iff its row is a vertex of the convex hull of all rows (and not shared
// with another class).
inline HullMembership hull_vertex_test(const SoftmaxSpec& spec, Index target) {
  if (spec.has_bias()) throw UnsupportedConfig("hull oracle requires a spec without bias");
  if (spec.dim() != 2) throw UnsupportedConfig("hull oracle requires d = 2");
  check_target(spec, target);

  struct Pt {
    double x, y;
    auto operator<=>(const Pt&) const = default;
  };
  std::vector<Pt> pts;
  for (Index i = 0; i < spec.classes(); ++i) pts.push_back({spec.weights(i, 0), spec.weights(i, 1)});
  const Pt t = pts[static_cast<std::size_t>(target)];
  if (std::count(pts.begin(), pts.end(), t) > 1) return HullMembership::NotVertex;

  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return HullMembership::Vertex;

  auto turn = [](const Pt& o, const Pt& a, const Pt& b) { return exact::orient2d(o.x, o.y, a.x, a.y, b.x, b.y); };
  std::vector<Pt> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Pt& p : pts) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return std::find(hull.begin(), hull.end(), t) != hull.end() ? HullMembership::Vertex : HullMembership::NotVertex;
}

// A ranking of all classes from lowest to highest logit; the last entry is
// the argmax.
using Permutation = std::vector<Index>;

inline constexpr double kParallelTolerance = 1e-12;

// Every ranking realized by some direction x in the plane, found by sweeping
// a unit vector through a full turn and sampling between critical angles.
inline std::set<Permutation> sweep_permutations(const SoftmaxSpec& spec) {
  if (spec.has_bias()) throw UnsupportedConfig("direction sweep requires a spec without bias");
  if (spec.dim() != 2) throw UnsupportedConfig("direction sweep requires d = 2");
  const Index n = spec.classes();

  std::vector<Eigen::Vector2d> diffs;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      Eigen::Vector2d dvec = (spec.weights.row(i) - spec.weights.row(j)).transpose();
      if (dvec.norm() == 0.0) throw DegenerateInstance("rows " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      diffs.push_back(dvec);
    }
  }
  for (std::size_t a = 0; a < diffs.size(); ++a) {
    for (std::size_t b = a + 1; b < diffs.size(); ++b) {
      const double cross = diffs[a].x() * diffs[b].y() - diffs[a].y() * diffs[b].x();
      if (std::abs(cross) < kParallelTolerance * diffs[a].norm() * diffs[b].norm()) {
        throw DegenerateInstance("two row differences are parallel");
      }
    }
  }

  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> angles;
  for (const auto& dvec : diffs) {
    const double base = std::atan2(dvec.y(), dvec.x());
    for (double a : {base + std::numbers::pi / 2, base - std::numbers::pi / 2}) {
      a = std::fmod(a, two_pi);
      if (a < 0) a += two_pi;
      angles.push_back(a);
    }
  }
  std::sort(angles.begin(), angles.end());

  std::set<Permutation> out;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const double lo = angles[k];
    const double hi = k + 1 < angles.size() ? angles[k + 1] : angles[0] + two_pi;
    const double mid = 0.5 * (lo + hi);
    const Vector x = (Vector(2) << std::cos(mid), std::sin(mid)).finished();
    const Vector y = spec.weights * x;
    Permutation perm(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::sort(perm.begin(), perm.end(), [&](Index a, Index b) { return y(a) < y(b); });
    out.insert(std::move(perm));
  }
  return out;
}

// Uniform random search of the box; returns the first strict-argmax
// witness for the target.
inline std::optional<Vector> sample_search(const SoftmaxSpec& spec, Index target, const Box& box, long samples,
                                           std::uint64_t seed) {
  check_target(spec, target);
  if (samples < 1) throw ValueError("sample count must be at least 1");
  SymmetricUniform draw(seed);
  Vector x(spec.dim());
  for (long s = 0; s < samples; ++s) {
    for (Index j = 0; j < spec.dim(); ++j) x(j) = box.bound() * draw();
    if (check_witness(spec, target, x, box)) return x;
  }
  return std::nullopt;
}

}  // namespace unargmax
