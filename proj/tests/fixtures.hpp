#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "unargmax/spec.hpp"

namespace unargmax::testing {

inline Matrix rows(std::initializer_list<std::initializer_list<double>> data) {
  Matrix m(static_cast<Index>(data.size()), static_cast<Index>(data.begin()->size()));
  Index i = 0;
  for (const auto& r : data) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> data) {
  Vector v(static_cast<Index>(data.size()));
  Index i = 0;
  for (double x : data) v(i++) = x;
  return v;
}

// Three unit vectors at 90, 210 and 330 degrees plus the origin, which sits
// at the centroid of their triangle.
inline SoftmaxSpec triangle_with_interior() {
  const double s = std::sqrt(3.0) / 2.0;
  return make_spec(rows({{0.0, 1.0}, {-s, -0.5}, {s, -0.5}, {0.0, 0.0}}), std::nullopt, std::nullopt, "triangle");
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::path(UNARGMAX_TEST_TMP) / name;
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace unargmax::testing
