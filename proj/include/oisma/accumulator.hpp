#pragma once

// Gate-level model of the accumulation periphery.
//
//   counter16   : 16 SC bits -> 5-bit count, full/half adders only
//   converter64 : 4 x counter16 + two 5-bit adders + one 6-bit adder -> 7 bits
//   periphery256: 4 x converter64 + two 7-bit adders + one 8-bit adder -> 9 bits
//
// Counts are obtained by evaluating the netlist cell by cell, never by a
// direct popcount. Multi-bit adders are ripple-carry (HA at bit 0, FA above).

#include <algorithm>
#include <array>
#include <bitset>
#include <cstdint>
#include <deque>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "oisma/errors.hpp"

namespace oisma::accum {

using Wire = std::uint32_t;

enum class CellKind : std::uint8_t { kFull, kHalf };

/// Full adder: sum = a^b^c, carry = maj(a,b,c). Half adder ignores in[2].
struct AdderCell {
  CellKind kind = CellKind::kHalf;
  std::array<Wire, 3> in{};
  Wire sum = 0;
  Wire carry = 0;
};

struct NetlistStats {
  int full_adders = 0;
  int half_adders = 0;
  // Direct sub-blocks of the top level.
  int parallel_counters = 0;
  int converters = 0;
  std::vector<int> multibit_adder_widths;

  int single_bit_cells() const { return full_adders + half_adders; }
  int multibit_adders() const { return static_cast<int>(multibit_adder_widths.size()); }
};

/// Combinational DAG of adder cells. Wires [0, input_width) are primary
/// inputs; cells are stored in topological order.
class Netlist {
 public:
  std::size_t input_width() const { return input_width_; }
  std::size_t output_width() const { return outputs_.size(); }
  const std::vector<AdderCell>& cells() const { return cells_; }
  const NetlistStats& stats() const { return stats_; }

  /// Evaluates 64 independent input vectors at once: bit l of inputs[i] is
  /// input i of lane l. Returns one lane word per output bit (LSB first).
  std::vector<std::uint64_t> evaluate_lanes(std::span<const std::uint64_t> inputs) const {
    if (inputs.size() != input_width_) {
      throw RangeError("netlist expects " + std::to_string(input_width_) + " inputs, got " +
                       std::to_string(inputs.size()));
    }
    std::vector<std::uint64_t> w(wire_count_, 0);
    std::copy(inputs.begin(), inputs.end(), w.begin());
    for (const auto& c : cells_) {
      const std::uint64_t a = w[c.in[0]], b = w[c.in[1]];
      if (c.kind == CellKind::kFull) {
        const std::uint64_t ci = w[c.in[2]];
        w[c.sum] = a ^ b ^ ci;
        w[c.carry] = (a & b) | (a & ci) | (b & ci);
      } else {
        w[c.sum] = a ^ b;
        w[c.carry] = a & b;
      }
    }
    std::vector<std::uint64_t> out;
    out.reserve(outputs_.size());
    for (Wire o : outputs_) out.push_back(w[o]);
    return out;
  }

  /// Single-vector evaluation; inputs are 0/1 bytes.
  unsigned evaluate(std::span<const std::uint8_t> bits) const {
    std::vector<std::uint64_t> lanes(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) lanes[i] = bits[i] ? 1u : 0u;
    const auto out = evaluate_lanes(lanes);
    unsigned v = 0;
    for (std::size_t i = 0; i < out.size(); ++i) v |= static_cast<unsigned>(out[i] & 1u) << i;
    return v;
  }

  /// `<id> <kind> <in...> -> <sum> <carry>`, one cell per line.
  std::string dump() const {
    std::ostringstream out;
    out << "# inputs " << input_width_ << " outputs";
    for (Wire o : outputs_) out << ' ' << o;
    out << '\n';
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const auto& c = cells_[i];
      out << i << (c.kind == CellKind::kFull ? " FA " : " HA ") << c.in[0] << ' ' << c.in[1];
      if (c.kind == CellKind::kFull) out << ' ' << c.in[2];
      out << " -> " << c.sum << ' ' << c.carry << '\n';
    }
    return out.str();
  }

 private:
  friend class NetlistBuilder;
  std::size_t input_width_ = 0;
  std::size_t wire_count_ = 0;
  std::vector<AdderCell> cells_;
  std::vector<Wire> outputs_;
  NetlistStats stats_;
};

class NetlistBuilder {
 public:
  explicit NetlistBuilder(std::size_t inputs) {
    net_.input_width_ = inputs;
    net_.wire_count_ = inputs;
  }

  Wire input(std::size_t i) const { return static_cast<Wire>(i); }

  std::array<Wire, 2> full(Wire a, Wire b, Wire c) {
    const Wire s = fresh(), co = fresh();
    net_.cells_.push_back({CellKind::kFull, {a, b, c}, s, co});
    ++net_.stats_.full_adders;
    return {s, co};
  }

  std::array<Wire, 2> half(Wire a, Wire b) {
    const Wire s = fresh(), co = fresh();
    net_.cells_.push_back({CellKind::kHalf, {a, b, 0}, s, co});
    ++net_.stats_.half_adders;
    return {s, co};
  }

  /// Column-compression parallel counter over `bits` (all weight 1).
  /// Each column is reduced to one wire with FAs (3:2) while it holds three
  /// or more bits, then an HA (2:2); carries move to the next column.
  std::vector<Wire> parallel_counter(std::span<const Wire> bits) {
    std::vector<Wire> result;
    std::deque<Wire> column(bits.begin(), bits.end());
    while (!column.empty()) {
      std::deque<Wire> next;
      while (column.size() > 1) {
        if (column.size() >= 3) {
          const Wire a = column.front(); column.pop_front();
          const Wire b = column.front(); column.pop_front();
          const Wire c = column.front(); column.pop_front();
          auto [s, co] = full(a, b, c);
          column.push_back(s);
          next.push_back(co);
        } else {
          const Wire a = column.front(); column.pop_front();
          const Wire b = column.front(); column.pop_front();
          auto [s, co] = half(a, b);
          column.push_back(s);
          next.push_back(co);
        }
      }
      result.push_back(column.front());
      column = std::move(next);
    }
    return result;
  }

  /// n-bit + n-bit ripple-carry adder producing n+1 bits.
  std::vector<Wire> ripple_add(std::span<const Wire> a, std::span<const Wire> b) {
    if (a.size() != b.size() || a.empty()) throw DimensionError("ripple adder operand widths differ");
    std::vector<Wire> sum;
    auto [s0, c] = half(a[0], b[0]);
    sum.push_back(s0);
    for (std::size_t i = 1; i < a.size(); ++i) {
      auto [s, co] = full(a[i], b[i], c);
      sum.push_back(s);
      c = co;
    }
    sum.push_back(c);
    net_.stats_.multibit_adder_widths.push_back(static_cast<int>(a.size()));
    return sum;
  }

  /// Two-level binary tree over four equal-width partial counts.
  std::vector<Wire> adder_tree4(const std::array<std::vector<Wire>, 4>& parts) {
    auto left = ripple_add(parts[0], parts[1]);
    auto right = ripple_add(parts[2], parts[3]);
    return ripple_add(left, right);
  }

  Netlist finish(std::vector<Wire> outputs) && {
    net_.outputs_ = std::move(outputs);
    return std::move(net_);
  }

  /// Appends `sub` with its inputs bound to `inputs`; returns its outputs.
  /// Nested stats are folded into the running totals but not into the
  /// top-level block counts.
  std::vector<Wire> instantiate(const Netlist& sub, std::span<const Wire> inputs) {
    std::vector<Wire> map(sub.wire_count_);
    for (std::size_t i = 0; i < sub.input_width_; ++i) map[i] = inputs[i];
    for (std::size_t i = sub.input_width_; i < sub.wire_count_; ++i) map[i] = fresh();
    for (const auto& c : sub.cells_) {
      net_.cells_.push_back({c.kind, {map[c.in[0]], map[c.in[1]], map[c.in[2]]}, map[c.sum], map[c.carry]});
    }
    net_.stats_.full_adders += sub.stats_.full_adders;
    net_.stats_.half_adders += sub.stats_.half_adders;
    std::vector<Wire> out;
    for (Wire o : sub.outputs_) out.push_back(map[o]);
    return out;
  }

  NetlistStats& stats() { return net_.stats_; }

 private:
  Wire fresh() { return static_cast<Wire>(net_.wire_count_++); }
  Netlist net_;
};

inline Netlist build_counter16() {
  NetlistBuilder b(16);
  std::vector<Wire> in;
  for (std::size_t i = 0; i < 16; ++i) in.push_back(b.input(i));
  auto out = b.parallel_counter(in);
  return std::move(b).finish(std::move(out));
}

inline const Netlist& counter16_netlist() {
  static const Netlist n = build_counter16();
  return n;
}

inline Netlist build_converter64() {
  NetlistBuilder b(64);
  std::array<std::vector<Wire>, 4> parts;
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<Wire> in;
    for (std::size_t i = 0; i < 16; ++i) in.push_back(b.input(16 * k + i));
    parts[k] = b.instantiate(counter16_netlist(), in);
    ++b.stats().parallel_counters;
  }
  auto out = b.adder_tree4(parts);
  return std::move(b).finish(std::move(out));
}

inline const Netlist& converter64_netlist() {
  static const Netlist n = build_converter64();
  return n;
}

inline Netlist build_periphery256() {
  NetlistBuilder b(256);
  std::array<std::vector<Wire>, 4> parts;
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<Wire> in;
    for (std::size_t i = 0; i < 64; ++i) in.push_back(b.input(64 * k + i));
    parts[k] = b.instantiate(converter64_netlist(), in);
    ++b.stats().converters;
  }
  auto out = b.adder_tree4(parts);
  return std::move(b).finish(std::move(out));
}

inline const Netlist& periphery256_netlist() {
  static const Netlist n = build_periphery256();
  return n;
}

namespace detail {

template <std::size_t N>
unsigned eval_bitset(const Netlist& net, const std::bitset<N>& bits) {
  std::array<std::uint64_t, N> lanes{};
  for (std::size_t i = 0; i < N; ++i) lanes[i] = bits[i] ? 1u : 0u;
  const auto out = net.evaluate_lanes(lanes);
  unsigned v = 0;
  for (std::size_t i = 0; i < out.size(); ++i) v |= static_cast<unsigned>(out[i] & 1u) << i;
  return v;
}

inline void check_width(std::size_t got, std::size_t want) {
  if (got != want) {
    throw RangeError("expected " + std::to_string(want) + " input bits, got " + std::to_string(got));
  }
}

}  // namespace detail

/// 16 bits -> 5-bit count.
inline unsigned parallel_count16(std::span<const std::uint8_t> bits) {
  detail::check_width(bits.size(), 16);
  return counter16_netlist().evaluate(bits);
}
inline unsigned parallel_count16(const std::bitset<16>& bits) {
  return detail::eval_bitset(counter16_netlist(), bits);
}

/// 64 bits -> 7-bit count.
inline unsigned convert64(std::span<const std::uint8_t> bits) {
  detail::check_width(bits.size(), 64);
  return converter64_netlist().evaluate(bits);
}
inline unsigned convert64(const std::bitset<64>& bits) {
  return detail::eval_bitset(converter64_netlist(), bits);
}

/// 256 bits -> 9-bit count.
inline unsigned accumulate256(std::span<const std::uint8_t> bits) {
  detail::check_width(bits.size(), 256);
  return periphery256_netlist().evaluate(bits);
}
inline unsigned accumulate256(const std::bitset<256>& bits) {
  return detail::eval_bitset(periphery256_netlist(), bits);
}

enum class Structure { kCounter16, kConverter64, kPeriphery256 };

inline const Netlist& netlist(Structure s) {
  switch (s) {
    case Structure::kCounter16: return counter16_netlist();
    case Structure::kConverter64: return converter64_netlist();
    case Structure::kPeriphery256: return periphery256_netlist();
  }
  return counter16_netlist();
}

inline const NetlistStats& netlist_stats(Structure s) { return netlist(s).stats(); }

}  // namespace oisma::accum
