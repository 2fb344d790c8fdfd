#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oisma/array_sim.hpp"

using namespace oisma;
using namespace oisma::array;

namespace {

// Control-signal table, one row per phase: WE S Sb R IN Pre_en BL BLb.
const char* const kReadRows[] = {"0 0 1 1 X 1 Charge Discharge", "0 0 1 0 X 0 Floating Floating"};
const char* const kAnd0Rows[] = {"0 1 0 0 0 1 Discharge Discharge", "0 0 1 0 X 0 Floating Floating"};
const char* const kAnd1Rows[] = {"0 1 0 0 1 1 Charge Discharge", "0 0 1 0 X 0 Floating Floating"};
const char* const kWrite0Row = "1 1 0 X 0 X Discharge Charge";
const char* const kWrite1Row = "1 1 0 X 1 X Charge Discharge";

std::string fields(const ControlVector& c) {
  std::ostringstream s;
  s << to_string(c.we) << ' ' << to_string(c.s) << ' ' << to_string(c.sb) << ' ' << to_string(c.r) << ' '
    << to_string(c.in) << ' ' << to_string(c.pre_en) << ' ' << to_string(c.bl) << ' ' << to_string(c.blb);
  return s.str();
}

RowBits random_row(std::mt19937_64& g) {
  RowBits r;
  for (int w = 0; w < 4; ++w) {
    const std::uint64_t v = g();
    for (int b = 0; b < 64; ++b) r[static_cast<std::size_t>(w * 64 + b)] = (v >> b) & 1u;
  }
  return r;
}

RowBits repeat(const std::string& group) {
  std::string s;
  while (s.size() < kCols) s += group;
  return parse_row(s.substr(0, kCols));
}

}  // namespace

TEST(ControlGolden, ReadPhases) {
  OismaArray a;
  const auto [bits, t] = a.read_row(5);
  ASSERT_EQ(t.phases.size(), 2u);
  for (std::size_t p = 0; p < 2; ++p) {
    ASSERT_EQ(t.phases[p].variants.size(), 1u);
    EXPECT_EQ(fields(t.phases[p].variants[0].control), kReadRows[p]);
    EXPECT_TRUE(t.phases[p].variants[0].columns.all());
  }
}

TEST(ControlGolden, AndPhasesPerInputValue) {
  OismaArray a;
  RowBits in;
  for (int c = 0; c < kCols; c += 2) in.set(static_cast<std::size_t>(c));
  const auto [bits, t] = a.and_row(0, in);
  ASSERT_EQ(t.phases.size(), 2u);
  ASSERT_EQ(t.phases[0].variants.size(), 2u);
  for (const auto& v : t.phases[0].variants) {
    if (v.control.in == Signal::k1) {
      EXPECT_EQ(fields(v.control), kAnd1Rows[0]);
      EXPECT_EQ(v.columns, in);
    } else {
      EXPECT_EQ(fields(v.control), kAnd0Rows[0]);
      EXPECT_EQ(v.columns, ~in);
    }
  }
  ASSERT_EQ(t.phases[1].variants.size(), 1u);
  EXPECT_EQ(fields(t.phases[1].variants[0].control), kAnd0Rows[1]);
  EXPECT_EQ(fields(t.phases[1].variants[0].control), kAnd1Rows[1]);
}

TEST(ControlGolden, WritePhases) {
  OismaArray a;
  const auto ones = a.write_row(1, RowBits{}.set());
  ASSERT_EQ(ones.phases.size(), 1u);
  ASSERT_EQ(ones.phases[0].variants.size(), 1u);
  EXPECT_EQ(fields(ones.phases[0].variants[0].control), kWrite1Row);

  const auto zeros = a.write_row(1, RowBits{});
  ASSERT_EQ(zeros.phases[0].variants.size(), 1u);
  EXPECT_EQ(fields(zeros.phases[0].variants[0].control), kWrite0Row);
}

TEST(ControlGolden, FactoryFunctions) {
  EXPECT_EQ(fields(control::read_precharge()), kReadRows[0]);
  EXPECT_EQ(fields(control::float_and_sense()), kReadRows[1]);
  EXPECT_EQ(fields(control::and_precharge(false)), kAnd0Rows[0]);
  EXPECT_EQ(fields(control::and_precharge(true)), kAnd1Rows[0]);
  EXPECT_EQ(fields(control::write(false)), kWrite0Row);
  EXPECT_EQ(fields(control::write(true)), kWrite1Row);
  for (const auto& c : {control::read_precharge(), control::float_and_sense(), control::and_precharge(false),
                        control::and_precharge(true), control::write(false), control::write(true)}) {
    EXPECT_TRUE(c.consistent());
  }
}

TEST(ControlGolden, TraceText) {
  OismaArray a;
  const auto [bits, t] = a.read_row(0);
  EXPECT_EQ(t.to_text(),
            "READ phase=1 WE=0 S=0 Sb=1 R=1 IN=X Pre_en=1 BL=Charge BLb=Discharge dur_ns=14\n"
            "READ phase=2 WE=0 S=0 Sb=1 R=0 IN=X Pre_en=0 BL=Floating BLb=Floating dur_ns=6\n");
}

TEST(ControlVector, InconsistentSelectDetected) {
  ControlVector c = control::read_precharge();
  c.sb = c.s;
  EXPECT_FALSE(c.consistent());
}

TEST(Latency, Examples) {
  EXPECT_DOUBLE_EQ(latency_ns(OpKind::kRead), 20.0);
  EXPECT_DOUBLE_EQ(latency_ns(OpKind::kAnd), 20.0);
  EXPECT_DOUBLE_EQ(precharge_fraction(), 0.70);
  OismaArray a;
  EXPECT_DOUBLE_EQ(a.read_row(0).second.total_ns(), 20.0);
  EXPECT_DOUBLE_EQ(a.and_row(0, RowBits{}).second.phases[0].duration_ns, 14.0);
  EXPECT_DOUBLE_EQ(a.and_row(0, RowBits{}).second.total_ns(), 20.0);
}

TEST(ArrayOps, FreshArrayReadsZero) {
  OismaArray a;
  for (int r = 0; r < kRows; ++r) EXPECT_TRUE(a.read_row(r).first.none());
  EXPECT_EQ(a.cell(0, 0), RramState::kLrs);
}

TEST(ArrayOps, WriteReadRoundTrip) {
  OismaArray a;
  a.write_row(3, RowBits{}.set());
  EXPECT_TRUE(a.read_row(3).first.all());
  EXPECT_EQ(a.cell(3, 100), RramState::kHrs);

  std::mt19937_64 g(3);
  for (int i = 0; i < 500; ++i) {
    const int row = static_cast<int>(g() % kRows);
    const RowBits b = random_row(g);
    a.write_row(row, b);
    ASSERT_EQ(a.read_row(row).first, b);
  }
}

TEST(ArrayOps, WriteIsIdempotent) {
  std::mt19937_64 g(4);
  const RowBits b = random_row(g);
  OismaArray once, twice;
  once.write_row(9, b);
  twice.write_row(9, b);
  twice.write_row(9, b);
  EXPECT_EQ(once, twice);
}

TEST(ArrayOps, AndWithAllOnesIsRead) {
  std::mt19937_64 g(5);
  OismaArray a;
  for (int r = 0; r < kRows; ++r) a.write_row(r, random_row(g));
  for (int r = 0; r < kRows; ++r) ASSERT_EQ(a.and_row(r, RowBits{}.set()).first, a.read_row(r).first);
}

TEST(ArrayOps, AndWithZerosIsZero) {
  OismaArray a;
  a.write_row(0, RowBits{}.set());
  EXPECT_TRUE(a.and_row(0, RowBits{}).first.none());
}

TEST(ArrayOps, AndIsBitwiseBelowBothOperands) {
  std::mt19937_64 g(6);
  OismaArray a;
  for (int i = 0; i < 300; ++i) {
    const int row = static_cast<int>(g() % kRows);
    const RowBits stored = random_row(g), in = random_row(g);
    a.write_row(row, stored);
    const RowBits out = a.and_row(row, in).first;
    ASSERT_EQ(out & ~in, RowBits{});
    ASSERT_EQ(out & ~stored, RowBits{});
    ASSERT_EQ(out, a.and_bits(row, in));
  }
}

TEST(ArrayOps, BpGroupExample) {
  // 25 groups of 10 columns plus a 6-column tail.
  OismaArray a;
  a.write_row(7, repeat("0000011100"));
  const RowBits out = a.and_row(7, repeat("0111111000")).first;
  const std::string s = row_string(out);
  for (int g = 0; g < 25; ++g) EXPECT_EQ(s.substr(static_cast<std::size_t>(g * 10), 10), "0000011000");
  EXPECT_EQ(s.substr(250), "000001");
}

TEST(ArrayOps, ByteSpanInterface) {
  OismaArray a;
  std::vector<std::uint8_t> bits(kCols, 0);
  bits[0] = bits[255] = 1;
  a.write_row(2, bits);
  std::vector<std::uint8_t> in(kCols, 1);
  in[0] = 0;
  const RowBits out = a.and_row(2, in).first;
  EXPECT_EQ(out.count(), 1u);
  EXPECT_TRUE(out[255]);
}

TEST(ArrayOps, RangeErrors) {
  OismaArray a;
  EXPECT_THROW(a.read_row(128), RangeError);
  EXPECT_THROW(a.read_row(-1), RangeError);
  EXPECT_THROW(a.write_row(200, RowBits{}), RangeError);
  EXPECT_THROW(a.and_row(-3, RowBits{}), RangeError);
  EXPECT_THROW(a.cell(0, 256), RangeError);
  std::vector<std::uint8_t> short_row(255, 0);
  EXPECT_THROW(a.write_row(0, short_row), RangeError);
  EXPECT_THROW(a.and_row(0, short_row), RangeError);
  EXPECT_THROW(parse_row("0101"), RangeError);
}

TEST(ArrayOps, SnapshotRoundTrip) {
  std::mt19937_64 g(8);
  OismaArray a;
  for (int r = 0; r < kRows; r += 3) a.write_row(r, random_row(g));
  const std::string snap = a.snapshot();
  EXPECT_EQ(std::count(snap.begin(), snap.end(), '\n'), kRows);
  EXPECT_EQ(OismaArray::from_snapshot(snap), a);
  EXPECT_THROW(OismaArray::from_snapshot(snap.substr(0, snap.size() / 2)), ParseError);
}

TEST(ArrayOps, StuckAtFaultOverridesWrites) {
  OismaArray a;
  a.inject_stuck_at(4, 10, RramState::kHrs);
  a.write_row(4, RowBits{});
  EXPECT_TRUE(a.read_row(4).first[10]);
  EXPECT_EQ(a.read_row(4).first.count(), 1u);
  a.clear_faults();
  EXPECT_TRUE(a.read_row(4).first.none());
}
