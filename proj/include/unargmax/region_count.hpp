#pragma once

// Number of class rankings a Softmax layer with n classes and a
// d-dimensional input can realize, for generic weights (and, with a bias,
// a generic offset).

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "unargmax/error.hpp"

namespace unargmax {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

inline void check_count_domain(int n, int d) {
  if (n < 2) throw DomainError("number of classes must be at least 2, got " + std::to_string(n));
  if (d < 1) throw DomainError("dimension must be at least 1, got " + std::to_string(d));
}

}  // namespace detail

// Full grid [n][d] for 2 <= n <= max_n, 1 <= d <= max_d; lower indices unused.
//   Q(n, d) = Q(n-1, d) + (n-1) Q(n-1, d-1),  Q(2, d) = Q(n, 1) = 2.
inline std::vector<std::vector<BigInt>> no_bias_table(int max_n, int max_d) {
  detail::check_count_domain(max_n, max_d);
  std::vector<std::vector<BigInt>> q(static_cast<std::size_t>(max_n + 1),
                                     std::vector<BigInt>(static_cast<std::size_t>(max_d + 1)));
  for (int n = 2; n <= max_n; ++n) {
    for (int d = 1; d <= max_d; ++d) {
      auto& cell = q[static_cast<std::size_t>(n)][static_cast<std::size_t>(d)];
      if (n == 2 || d == 1) {
        cell = 2;
      } else {
        cell = q[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(d)] +
               BigInt(n - 1) * q[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(d - 1)];
      }
    }
  }
  return q;
}

// Unsigned Stirling numbers of the first kind |s(n, k)| for 0 <= k <= n <= max_n.
inline std::vector<std::vector<BigInt>> stirling_first_unsigned(int max_n) {
  std::vector<std::vector<BigInt>> s(static_cast<std::size_t>(max_n + 1),
                                     std::vector<BigInt>(static_cast<std::size_t>(max_n + 1)));
  s[0][0] = 1;
  for (int n = 1; n <= max_n; ++n) {
    for (int k = 1; k <= n; ++k) {
      s[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
          s[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k - 1)] +
          BigInt(n - 1) * s[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k)];
    }
  }
  return s;
}

// B(n, d) = sum_{k=0..d} |s(n, n-k)|.
inline std::vector<std::vector<BigInt>> with_bias_table(int max_n, int max_d) {
  detail::check_count_domain(max_n, max_d);
  const auto s = stirling_first_unsigned(max_n);
  std::vector<std::vector<BigInt>> b(static_cast<std::size_t>(max_n + 1),
                                     std::vector<BigInt>(static_cast<std::size_t>(max_d + 1)));
  for (int n = 2; n <= max_n; ++n) {
    BigInt running = 0;
    for (int k = 0; k <= max_d; ++k) {
      if (k <= n - 1) running += s[static_cast<std::size_t>(n)][static_cast<std::size_t>(n - k)];
      if (k >= 1) b[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] = running;
    }
  }
  return b;
}

inline BigInt count_no_bias(int n, int d) {
  detail::check_count_domain(n, d);
  return no_bias_table(n, d)[static_cast<std::size_t>(n)][static_cast<std::size_t>(d)];
}

inline BigInt count_with_bias(int n, int d) {
  detail::check_count_domain(n, d);
  return with_bias_table(n, d)[static_cast<std::size_t>(n)][static_cast<std::size_t>(d)];
}

inline BigInt count_regions(int n, int d, bool with_bias) {
  return with_bias ? count_with_bias(n, d) : count_no_bias(n, d);
}

inline BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace unargmax
