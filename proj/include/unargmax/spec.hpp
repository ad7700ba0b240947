#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "unargmax/error.hpp"

namespace unargmax {

using Index = Eigen::Index;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// The audited output layer: logits = weights * x + bias. Row i of `weights`
// belongs to class i.
struct SoftmaxSpec {
  Matrix weights;
  std::optional<Vector> bias;
  std::optional<std::vector<std::string>> tokens;
  std::string name;

  Index classes() const { return weights.rows(); }
  Index dim() const { return weights.cols(); }
  bool has_bias() const { return bias.has_value(); }
  double bias_at(Index i) const { return bias ? (*bias)(i) : 0.0; }
};

inline void validate(const SoftmaxSpec& spec) {
  if (spec.classes() < 2 || spec.dim() < 1) {
    throw ShapeError("weights must have at least 2 rows and 1 column, got " +
                     std::to_string(spec.classes()) + "x" + std::to_string(spec.dim()));
  }
  if (spec.bias && spec.bias->size() != spec.classes()) {
    throw LengthMismatch("bias has length " + std::to_string(spec.bias->size()) +
                         " but weights have " + std::to_string(spec.classes()) + " rows");
  }
  if (spec.tokens && static_cast<Index>(spec.tokens->size()) != spec.classes()) {
    throw LengthMismatch("vocabulary has " + std::to_string(spec.tokens->size()) +
                         " tokens but weights have " + std::to_string(spec.classes()) + " rows");
  }
  if (!spec.weights.allFinite()) throw ValueError("weights contain NaN or Inf");
  if (spec.bias && !spec.bias->allFinite()) throw ValueError("bias contains NaN or Inf");
}

inline SoftmaxSpec make_spec(Matrix weights, std::optional<Vector> bias = std::nullopt,
                             std::optional<std::vector<std::string>> tokens = std::nullopt,
                             std::string name = {}) {
  SoftmaxSpec spec{std::move(weights), std::move(bias), std::move(tokens), std::move(name)};
  validate(spec);
  return spec;
}

}  // namespace unargmax
