#pragma once

#include <cstdint>
#include <random>

namespace unargmax {

// Name recorded in experiment metadata so tables can be regenerated
// bit-for-bit elsewhere.
inline constexpr const char* kGeneratorName = "mt19937_64/u53-symmetric";

// Uniform draws on the open interval (-1, 1). std::mt19937_64 output is fixed
// by the standard; the mapping to reals is done here because
// std::uniform_real_distribution is implementation defined.
class SymmetricUniform {
 public:
  explicit SymmetricUniform(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    while (true) {
      const std::uint64_t bits = engine_() >> 11;  // 53 bits
      if (bits == 0) continue;                     // would map to exactly -1
      return 2.0 * (static_cast<double>(bits) * 0x1.0p-53) - 1.0;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace unargmax
