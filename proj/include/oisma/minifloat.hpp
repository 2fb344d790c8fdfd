#pragma once

// FP8 E4M3 reference: 4 exponent bits (bias 7), 3 mantissa bits, subnormals,
// all-ones exponent reserved. Positive finite range is 2^-9 .. 240 with 119
// distinct values. Only the non-negative half is modelled.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "oisma/errors.hpp"

namespace oisma::fp8 {

struct MinifloatFormat {
  static constexpr int kExponentBits = 4;
  static constexpr int kMantissaBits = 3;
  static constexpr int kExponentBias = 7;
  static constexpr int kMaxExponentField = (1 << kExponentBits) - 2;  // top field reserved
  static constexpr double kMaxFinite = 240.0;
  static constexpr double kMinNormal = 0.015625;          // 2^-6
  static constexpr double kMinSubnormal = 0.001953125;    // 2^-9
};

/// Value of an (exponent field, mantissa field) code.
inline double decode_fields(int exponent, int mantissa) {
  using F = MinifloatFormat;
  if (exponent == 0) return std::ldexp(mantissa, 1 - F::kExponentBias - F::kMantissaBits);
  return std::ldexp((1 << F::kMantissaBits) + mantissa,
                    exponent - F::kExponentBias - F::kMantissaBits);
}

/// All positive finite values in increasing order.
inline std::vector<double> enumerate_positive() {
  using F = MinifloatFormat;
  std::vector<double> out;
  for (int e = 0; e <= F::kMaxExponentField; ++e) {
    for (int m = 0; m < (1 << F::kMantissaBits); ++m) {
      if (e == 0 && m == 0) continue;
      out.push_back(decode_fields(e, m));
    }
  }
  return out;
}

/// Round to the nearest representable value, ties to even mantissa code.
inline double quantize(double x) {
  using F = MinifloatFormat;
  if (!std::isfinite(x) || x < 0.0 || x > F::kMaxFinite) {
    throw DomainError("FP8 quantize input " + std::to_string(x) + " outside [0, 240]");
  }
  if (x == 0.0) return 0.0;
  // Quantum (ulp) of the binade containing x; subnormals share the min-normal quantum.
  int exp2 = 0;
  std::frexp(x, &exp2);  // x = f * 2^exp2, f in [0.5, 1)
  const int binade = std::max(exp2 - 1, 1 - F::kExponentBias);
  const double quantum = std::ldexp(1.0, binade - F::kMantissaBits);
  // nearbyint under the default rounding mode is ties-to-even on the step
  // count, and the step count's parity is the mantissa code's parity.
  return std::nearbyint(x / quantum) * quantum;
}

/// quantize(a * b) with the exact product clamped into [0, 240].
inline double fp8_multiply(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
    throw DomainError("FP8 multiply operands must be finite and non-negative");
  }
  return quantize(std::min(a * b, MinifloatFormat::kMaxFinite));
}

/// Max-min normalization onto [0, 1].
inline std::vector<double> normalize(const std::vector<double>& values, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("degenerate normalization range (max == min)");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - lo) / (hi - lo));
  return out;
}

inline std::vector<double> normalize(const std::vector<double>& values) {
  if (values.empty()) throw DomainError("cannot normalize an empty list");
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return normalize(values, *lo, *hi);
}

/// The positive grid divided by 240 (min taken as 0): 119 values in (0, 1].
inline std::vector<double> normalized_grid() {
  return normalize(enumerate_positive(), 0.0, MinifloatFormat::kMaxFinite);
}

/// CSV with columns index,raw,normalized.
inline std::string dump_grid_csv() {
  std::ostringstream out;
  out.precision(17);
  out << "index,raw,normalized\n";
  const auto raw = enumerate_positive();
  const auto norm = normalized_grid();
  for (std::size_t i = 0; i < raw.size(); ++i) out << i << ',' << raw[i] << ',' << norm[i] << '\n';
  return out.str();
}

}  // namespace oisma::fp8
