#pragma once

// Functional model of one 256-column x 128-row 1T1R OISMA array.
//
// HRS stores logic 1, LRS stores logic 0. Read and AND share a two-phase
// protocol (pre-charge/discharge, then floating & sensing); write is a single
// phase. Every operation returns an OpTrace whose control vectors mirror the
// array's control-signal table, with don't-care fields kept as X.

#include <array>
#include <bitset>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oisma/errors.hpp"

namespace oisma::array {

inline constexpr int kRows = 128;
inline constexpr int kCols = 256;

inline constexpr double kPrechargeNs = 14.0;
inline constexpr double kSenseNs = 6.0;
inline constexpr double kCycleNs = kPrechargeNs + kSenseNs;  // one 50 MHz cycle

enum class RramState : std::uint8_t { kLrs, kHrs };

inline constexpr bool logic_of(RramState s) { return s == RramState::kHrs; }
inline constexpr RramState state_of(bool logic) { return logic ? RramState::kHrs : RramState::kLrs; }

/// One wordline worth of bits; bit c is column c.
using RowBits = std::bitset<kCols>;

inline RowBits parse_row(std::string_view text) {
  if (text.size() != kCols) {
    throw RangeError("row must have " + std::to_string(kCols) + " bits, got " +
                     std::to_string(text.size()));
  }
  RowBits r;
  for (int c = 0; c < kCols; ++c) {
    const char ch = text[static_cast<std::size_t>(c)];
    if (ch != '0' && ch != '1') throw ParseError("row contains a non-binary character");
    r[static_cast<std::size_t>(c)] = ch == '1';
  }
  return r;
}

inline RowBits row_from_span(std::span<const std::uint8_t> bits) {
  if (bits.size() != kCols) {
    throw RangeError("row must have " + std::to_string(kCols) + " bits, got " +
                     std::to_string(bits.size()));
  }
  RowBits r;
  for (int c = 0; c < kCols; ++c) r[static_cast<std::size_t>(c)] = bits[static_cast<std::size_t>(c)] != 0;
  return r;
}

/// Column 0 first.
inline std::string row_string(const RowBits& r) {
  std::string s(kCols, '0');
  for (int c = 0; c < kCols; ++c) {
    if (r[static_cast<std::size_t>(c)]) s[static_cast<std::size_t>(c)] = '1';
  }
  return s;
}

enum class Signal : std::uint8_t { k0, k1, kX };
enum class Line : std::uint8_t { kCharge, kDischarge, kFloating };

inline constexpr std::string_view to_string(Signal s) {
  switch (s) {
    case Signal::k0: return "0";
    case Signal::k1: return "1";
    case Signal::kX: return "X";
  }
  return "?";
}

inline constexpr std::string_view to_string(Line l) {
  switch (l) {
    case Line::kCharge: return "Charge";
    case Line::kDischarge: return "Discharge";
    case Line::kFloating: return "Floating";
  }
  return "?";
}

inline constexpr Signal signal_of(bool b) { return b ? Signal::k1 : Signal::k0; }

struct ControlVector {
  Signal we = Signal::kX;
  Signal s = Signal::kX;
  Signal sb = Signal::kX;
  Signal r = Signal::kX;
  Signal in = Signal::kX;
  Signal pre_en = Signal::kX;
  Line bl = Line::kFloating;
  Line blb = Line::kFloating;

  /// S and Sb must be complementary unless one is a don't-care.
  constexpr bool consistent() const {
    if (s == Signal::kX || sb == Signal::kX) return true;
    return s != sb;
  }

  friend constexpr bool operator==(const ControlVector&, const ControlVector&) = default;
};

// Control vectors per operation phase.
namespace control {

inline constexpr ControlVector read_precharge() {
  return {Signal::k0, Signal::k0, Signal::k1, Signal::k1, Signal::kX, Signal::k1,
          Line::kCharge, Line::kDischarge};
}

inline constexpr ControlVector float_and_sense() {
  return {Signal::k0, Signal::k0, Signal::k1, Signal::k0, Signal::kX, Signal::k0,
          Line::kFloating, Line::kFloating};
}

/// IN = 1 pre-charges BL like a read; IN = 0 pre-discharges it.
inline constexpr ControlVector and_precharge(bool in) {
  return {Signal::k0, Signal::k1, Signal::k0, Signal::k0, signal_of(in), Signal::k1,
          in ? Line::kCharge : Line::kDischarge, Line::kDischarge};
}

inline constexpr ControlVector write(bool in) {
  return {Signal::k1, Signal::k1, Signal::k0, Signal::kX, signal_of(in), Signal::kX,
          in ? Line::kCharge : Line::kDischarge, in ? Line::kDischarge : Line::kCharge};
}

}  // namespace control

enum class OpKind { kRead, kAnd, kWrite };

inline constexpr std::string_view to_string(OpKind k) {
  switch (k) {
    case OpKind::kRead: return "READ";
    case OpKind::kAnd: return "AND";
    case OpKind::kWrite: return "WRITE";
  }
  return "?";
}

/// Read and AND occupy one full cycle; write is modelled as one cycle too.
inline constexpr double latency_ns(OpKind) { return kCycleNs; }

inline constexpr double precharge_fraction() { return kPrechargeNs / kCycleNs; }

/// A control vector plus the columns it drives. Per-column inputs (AND,
/// write) yield one variant per distinct IN value instead of 256 vectors.
struct PhaseVariant {
  ControlVector control;
  RowBits columns;
};

struct Phase {
  double duration_ns = 0.0;
  std::vector<PhaseVariant> variants;
};

struct OpTrace {
  OpKind kind = OpKind::kRead;
  int row = 0;
  std::vector<Phase> phases;

  double total_ns() const {
    double t = 0.0;
    for (const auto& p : phases) t += p.duration_ns;
    return t;
  }

  /// One line per (phase, variant):
  /// `<op> phase=<n> WE=<v> S=<v> Sb=<v> R=<v> IN=<v> Pre_en=<v> BL=<state> BLb=<state> dur_ns=<t>`
  std::string to_text() const {
    std::ostringstream out;
    for (std::size_t n = 0; n < phases.size(); ++n) {
      for (const auto& v : phases[n].variants) {
        const auto& c = v.control;
        out << to_string(kind) << " phase=" << n + 1 << " WE=" << to_string(c.we)
            << " S=" << to_string(c.s) << " Sb=" << to_string(c.sb) << " R=" << to_string(c.r)
            << " IN=" << to_string(c.in) << " Pre_en=" << to_string(c.pre_en)
            << " BL=" << to_string(c.bl) << " BLb=" << to_string(c.blb)
            << " dur_ns=" << phases[n].duration_ns << '\n';
      }
    }
    return out.str();
  }
};

namespace detail {

/// Splits per-column inputs into IN=0 / IN=1 representatives.
template <typename MakeVector>
std::vector<PhaseVariant> split_by_input(const RowBits& input, MakeVector make) {
  std::vector<PhaseVariant> v;
  if ((~input).any()) v.push_back({make(false), ~input});
  if (input.any()) v.push_back({make(true), input});
  return v;
}

}  // namespace detail

class OismaArray {
 public:
  /// Fresh array: every cell in LRS (logic 0).
  OismaArray() = default;

  RramState cell(int row, int col) const {
    check_row(row);
    if (col < 0 || col >= kCols) throw RangeError("column " + std::to_string(col) + " out of range");
    return state_of(stored(row)[static_cast<std::size_t>(col)]);
  }

  OpTrace write_row(int row, const RowBits& bits) {
    check_row(row);
    cells_[static_cast<std::size_t>(row)] = bits;
    OpTrace t{OpKind::kWrite, row, {}};
    t.phases.push_back({kCycleNs, detail::split_by_input(bits, control::write)});
    return t;
  }

  OpTrace write_row(int row, std::span<const std::uint8_t> bits) {
    return write_row(row, row_from_span(bits));
  }

  std::pair<RowBits, OpTrace> read_row(int row) const {
    check_row(row);
    OpTrace t{OpKind::kRead, row, {}};
    t.phases.push_back({kPrechargeNs, {{control::read_precharge(), RowBits{}.set()}}});
    t.phases.push_back({kSenseNs, {{control::float_and_sense(), RowBits{}.set()}}});
    return {stored(row), std::move(t)};
  }

  /// In-situ AND between the stored wordline and a per-column input vector.
  std::pair<RowBits, OpTrace> and_row(int row, const RowBits& input) const {
    check_row(row);
    OpTrace t{OpKind::kAnd, row, {}};
    t.phases.push_back({kPrechargeNs, detail::split_by_input(input, control::and_precharge)});
    t.phases.push_back({kSenseNs, {{control::float_and_sense(), RowBits{}.set()}}});
    return {stored(row) & input, std::move(t)};
  }

  std::pair<RowBits, OpTrace> and_row(int row, std::span<const std::uint8_t> input) const {
    return and_row(row, row_from_span(input));
  }

  /// Hot path for the dataflow engine: AND result without building a trace.
  RowBits and_bits(int row, const RowBits& input) const {
    check_row(row);
    return stored(row) & input;
  }

  /// Forces a cell to a fixed state regardless of writes (fault injection).
  void inject_stuck_at(int row, int col, RramState state) {
    check_row(row);
    if (col < 0 || col >= kCols) throw RangeError("column " + std::to_string(col) + " out of range");
    stuck_[{row, col}] = state;
  }

  void clear_faults() { stuck_.clear(); }

  /// 128 lines of 256 '0'/'1' characters, row 0 first.
  std::string snapshot() const {
    std::string out;
    out.reserve(static_cast<std::size_t>(kRows) * (kCols + 1));
    for (int r = 0; r < kRows; ++r) {
      out += row_string(stored(r));
      out += '\n';
    }
    return out;
  }

  static OismaArray from_snapshot(std::string_view text) {
    OismaArray a;
    std::istringstream in{std::string(text)};
    int r = 0;
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      if (r >= kRows) throw ParseError("snapshot has more than 128 rows");
      a.cells_[static_cast<std::size_t>(r++)] = parse_row(line);
    }
    if (r != kRows) throw ParseError("snapshot has " + std::to_string(r) + " rows, expected 128");
    return a;
  }

  friend bool operator==(const OismaArray& a, const OismaArray& b) {
    return a.cells_ == b.cells_ && a.stuck_ == b.stuck_;
  }

 private:
  static void check_row(int row) {
    if (row < 0 || row >= kRows) throw RangeError("wordline " + std::to_string(row) + " out of range");
  }

  RowBits stored(int row) const {
    RowBits r = cells_[static_cast<std::size_t>(row)];
    if (!stuck_.empty()) {
      for (const auto& [pos, state] : stuck_) {
        if (pos.first == row) r[static_cast<std::size_t>(pos.second)] = logic_of(state);
      }
    }
    return r;
  }

  std::array<RowBits, kRows> cells_{};
  std::map<std::pair<int, int>, RramState> stuck_;
};

}  // namespace oisma::array
