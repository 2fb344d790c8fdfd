#pragma once

// Bent-Pyramid (BP) quasi-stochastic number format.
//
// A BP value k/10 (k = 0..9) is a fixed 10-bit pattern with exactly k ones,
// taken from one of two complementary datasets. Right-biased patterns never
// use bit 0, left-biased patterns never use bit 9, so the AND of a
// right-biased and a left-biased pattern always has both edge bits clear and
// the 8-bit "BP8" form (bits 1..8) carries the whole product.
//
// Bit index 0 is the leftmost character of the printed pattern.

#include <algorithm>
#include <array>
#include <cctype>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oisma/errors.hpp"

namespace oisma::bp {

enum class Bias { kRight, kLeft };

inline constexpr std::string_view to_string(Bias b) {
  return b == Bias::kRight ? "right" : "left";
}

inline constexpr int kLevels = 10;  // values 0.0 .. 0.9

/// Fixed-width bit string; index 0 is the leftmost printed bit.
template <std::size_t Width>
class BitPattern {
  static_assert(Width > 0 && Width <= 16);

 public:
  static constexpr std::size_t kWidth = Width;

  constexpr BitPattern() = default;

  /// Raw constructor: bit i of `mask` is pattern index i.
  static constexpr BitPattern from_mask(std::uint16_t mask) {
    BitPattern p;
    p.mask_ = static_cast<std::uint16_t>(mask & kFull);
    return p;
  }

  static BitPattern parse(std::string_view text) {
    if (text.size() != Width) {
      throw ParseError("bit pattern '" + std::string(text) + "' must have exactly " +
                       std::to_string(Width) + " characters");
    }
    std::uint16_t m = 0;
    for (std::size_t i = 0; i < Width; ++i) {
      if (text[i] == '1') {
        m |= static_cast<std::uint16_t>(1u << i);
      } else if (text[i] != '0') {
        throw ParseError("bit pattern '" + std::string(text) + "' contains a non-binary character");
      }
    }
    return from_mask(m);
  }

  constexpr bool operator[](std::size_t i) const { return (mask_ >> i) & 1u; }
  constexpr std::uint16_t mask() const { return mask_; }
  constexpr int ones() const { return std::popcount(mask_); }

  std::string str() const {
    std::string s(Width, '0');
    for (std::size_t i = 0; i < Width; ++i) {
      if ((*this)[i]) s[i] = '1';
    }
    return s;
  }

  friend constexpr BitPattern operator&(BitPattern a, BitPattern b) {
    return from_mask(a.mask_ & b.mask_);
  }
  friend constexpr bool operator==(BitPattern, BitPattern) = default;

 private:
  static constexpr std::uint16_t kFull = static_cast<std::uint16_t>((1u << Width) - 1u);
  std::uint16_t mask_ = 0;
};

using Bits10 = BitPattern<10>;
using Bits8 = BitPattern<8>;

/// One operand in the 10-bit physical form.
struct BpBitstream {
  Bits10 bits;
  int value_tenths = 0;
  Bias bias = Bias::kRight;

  friend bool operator==(const BpBitstream&, const BpBitstream&) = default;
};

/// Compressed operand: positions 1..8 of the parent 10-bit stream.
struct Bp8Bitstream {
  Bits8 bits;
  int value_tenths = 0;
  Bias bias = Bias::kRight;

  friend bool operator==(const Bp8Bitstream&, const Bp8Bitstream&) = default;
};

/// AND result of a right-biased and a left-biased operand.
template <std::size_t Width>
struct Product {
  BitPattern<Width> bits;

  int ones() const { return bits.ones(); }
  /// Products stay scaled by 10 whatever the physical width.
  double value() const { return ones() / 10.0; }
};

using BpProduct = Product<10>;
using Bp8Product = Product<8>;

/// The pair of complementary datasets. Stored as raw patterns so that an
/// invalid dataset can be represented and reported on by validate_dataset().
struct BpDataset {
  std::array<Bits10, kLevels> right{};
  std::array<Bits10, kLevels> left{};

  BpBitstream at(Bias bias, int tenths) const {
    if (tenths < 0 || tenths >= kLevels) {
      throw RangeError("BP value index " + std::to_string(tenths) + " outside 0..9");
    }
    const auto& table = bias == Bias::kRight ? right : left;
    return {table[static_cast<std::size_t>(tenths)], tenths, bias};
  }
  BpBitstream right_at(int tenths) const { return at(Bias::kRight, tenths); }
  BpBitstream left_at(int tenths) const { return at(Bias::kLeft, tenths); }

  friend bool operator==(const BpDataset&, const BpDataset&) = default;
};

/// Built-in dataset. Each side is a nested "pyramid": the pattern for k+1
/// adds one bit to the pattern for k. Right-biased fill order is
/// 5,6,7,1,2,9,3,4,8; left-biased fill order is 4,6,3,1,2,5,8,0,7.
inline const BpDataset& default_dataset() {
  static const BpDataset kDefault = [] {
    constexpr std::array<std::string_view, kLevels> kRight = {
        "0000000000", "0000010000", "0000011000", "0000011100", "0100011100",
        "0110011100", "0110011101", "0111011101", "0111111101", "0111111111"};
    constexpr std::array<std::string_view, kLevels> kLeft = {
        "0000000000", "0000100000", "0000101000", "0001101000", "0101101000",
        "0111101000", "0111111000", "0111111010", "1111111010", "1111111110"};
    BpDataset d;
    for (std::size_t k = 0; k < kLevels; ++k) {
      d.right[k] = Bits10::parse(kRight[k]);
      d.left[k] = Bits10::parse(kLeft[k]);
    }
    return d;
  }();
  return kDefault;
}

/// Checks every structural invariant of a dataset. At most one violation is
/// reported per entry (edge bit first, then population count); the worked
/// product 0.3 x 0.6 = 0.2 is checked last.
inline std::vector<std::string> validate_dataset(const BpDataset& d) {
  std::vector<std::string> violations;
  auto check_side = [&](const std::array<Bits10, kLevels>& table, Bias bias) {
    const std::size_t edge = bias == Bias::kRight ? 0 : 9;
    const std::string name = bias == Bias::kRight ? "right-biased" : "left-biased";
    for (std::size_t k = 0; k < kLevels; ++k) {
      const std::string where = " (value 0." + std::to_string(k) + ")";
      if (table[k][edge]) {
        violations.push_back(name + " bit" + std::to_string(edge) + " nonzero" + where);
      } else if (table[k].ones() != static_cast<int>(k)) {
        violations.push_back(name + " popcount " + std::to_string(table[k].ones()) +
                             " != " + std::to_string(k) + where);
      }
    }
    for (std::size_t a = 0; a < kLevels; ++a) {
      for (std::size_t b = a + 1; b < kLevels; ++b) {
        if (table[a] == table[b]) {
          violations.push_back(name + " values 0." + std::to_string(a) + " and 0." +
                               std::to_string(b) + " share a pattern");
        }
      }
    }
  };
  check_side(d.right, Bias::kRight);
  check_side(d.left, Bias::kLeft);
  if ((d.right[3] & d.left[6]).ones() != 2) {
    violations.push_back("worked example mismatch: right 0.3 AND left 0.6 has " +
                         std::to_string((d.right[3] & d.left[6]).ones()) + " ones, expected 2");
  }
  return violations;
}

/// Serializes a dataset in the text file format (BP10 / RIGHT / LEFT).
inline std::string dump_dataset(const BpDataset& d) {
  std::ostringstream out;
  out << "BP10\nRIGHT\n";
  for (const auto& p : d.right) out << p.str() << '\n';
  out << "LEFT\n";
  for (const auto& p : d.left) out << p.str() << '\n';
  return out.str();
}

/// Parses the text file format without checking dataset invariants. Blank
/// lines and '#' comments are ignored.
inline BpDataset parse_dataset(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), not_space));
    line.erase(std::find_if(line.rbegin(), line.rend(), not_space).base(), line.end());
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (lines.empty() || lines.front() != "BP10") {
    throw ParseError("dataset file must start with 'BP10'");
  }
  BpDataset d;
  std::size_t pos = 1;
  auto read_section = [&](std::string_view header, std::array<Bits10, kLevels>& table) {
    if (pos >= lines.size() || lines[pos] != header) {
      throw ParseError("expected section header '" + std::string(header) + "'");
    }
    ++pos;
    for (std::size_t k = 0; k < kLevels; ++k, ++pos) {
      if (pos >= lines.size() || lines[pos] == "LEFT" || lines[pos] == "RIGHT") {
        throw ParseError("section " + std::string(header) + " has " + std::to_string(k) +
                         " lines, expected 10");
      }
      table[k] = Bits10::parse(lines[pos]);
    }
  };
  read_section("RIGHT", d.right);
  read_section("LEFT", d.left);
  if (pos != lines.size()) {
    throw ParseError("unexpected trailing content after LEFT section: '" + lines[pos] + "'");
  }
  return d;
}

/// parse_dataset() followed by validation; fails on the first violation.
inline BpDataset load_dataset(std::string_view text) {
  BpDataset d = parse_dataset(text);
  if (auto v = validate_dataset(d); !v.empty()) throw ValidationError(v.front());
  return d;
}

/// Nearest tenth of p, ties rounding up. Returns 0..10 (no clamping); the
/// small epsilon keeps decimal ties such as 0.15 from being lost to binary
/// representation error.
inline int nearest_tenth(double p) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw DomainError("BP value " + std::to_string(p) + " outside [0, 1]");
  }
  return static_cast<int>(std::floor(p * 10.0 + 0.5 + 1e-9));
}

/// Representable BP level of p: nearest tenth clamped to 0.9.
inline int encode_tenths(double p) { return std::min(nearest_tenth(p), kLevels - 1); }

inline BpBitstream encode(double p, Bias bias, const BpDataset& d = default_dataset()) {
  return d.at(bias, encode_tenths(p));
}

inline double decode(const BpBitstream& b) { return b.bits.ones() / 10.0; }
inline double decode(const Bp8Bitstream& b) { return b.bits.ones() / 10.0; }
template <std::size_t W>
double decode(const Product<W>& p) {
  return p.value();
}

inline BpProduct multiply(const BpBitstream& x, const BpBitstream& y) {
  if (x.bias == y.bias) {
    throw CorrelationError("both operands are " + std::string(to_string(x.bias)) +
                           "-biased; multiplication needs one of each");
  }
  return {x.bits & y.bits};
}

inline Bp8Bitstream compress(const BpBitstream& b) {
  return {Bits8::from_mask(static_cast<std::uint16_t>(b.bits.mask() >> 1)), b.value_tenths,
          b.bias};
}

inline Bp8Product multiply8(const Bp8Bitstream& x, const Bp8Bitstream& y) {
  if (x.bias == y.bias) {
    throw CorrelationError("both operands are " + std::string(to_string(x.bias)) +
                           "-biased; multiplication needs one of each");
  }
  return {x.bits & y.bits};
}

/// 10x10 table of product ones for every (right k, left j) pair.
inline std::array<std::array<int, kLevels>, kLevels> product_table(const BpDataset& d) {
  std::array<std::array<int, kLevels>, kLevels> t{};
  for (std::size_t i = 0; i < kLevels; ++i) {
    for (std::size_t j = 0; j < kLevels; ++j) t[i][j] = (d.right[i] & d.left[j]).ones();
  }
  return t;
}

}  // namespace oisma::bp
