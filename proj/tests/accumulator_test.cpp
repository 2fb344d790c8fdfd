#include <gtest/gtest.h>

#include <bit>
#include <bitset>
#include <random>
#include <set>
#include <vector>

#include "oisma/accumulator.hpp"

using namespace oisma;
using namespace oisma::accum;

namespace {

template <std::size_t N>
std::bitset<N> random_bits(std::mt19937_64& g, double density) {
  std::bernoulli_distribution coin(density);
  std::bitset<N> b;
  for (std::size_t i = 0; i < N; ++i) b[i] = coin(g);
  return b;
}

std::bitset<256> alternating256() {
  std::bitset<256> b;
  for (std::size_t i = 0; i < 256; i += 2) b.set(i);
  return b;
}

}  // namespace

TEST(Counter16, Examples) {
  EXPECT_EQ(parallel_count16(std::bitset<16>{}), 0u);
  EXPECT_EQ(parallel_count16(std::bitset<16>{}.set()), 16u);
  EXPECT_EQ(parallel_count16(std::bitset<16>("0101010101010101")), 8u);
}

TEST(Counter16, ExhaustiveAgainstPopcount) {
  for (std::uint32_t v = 0; v < (1u << 16); ++v) {
    ASSERT_EQ(parallel_count16(std::bitset<16>(v)), static_cast<unsigned>(std::popcount(v))) << v;
  }
}

TEST(Counter16, ExhaustiveLaneEvaluation) {
  // Same check through the 64-lane evaluator, 64 inputs per call.
  const auto& net = counter16_netlist();
  for (std::uint32_t base = 0; base < (1u << 16); base += 64) {
    std::array<std::uint64_t, 16> in{};
    for (std::uint32_t l = 0; l < 64; ++l) {
      for (std::size_t i = 0; i < 16; ++i) in[i] |= static_cast<std::uint64_t>(((base + l) >> i) & 1u) << l;
    }
    const auto out = net.evaluate_lanes(in);
    ASSERT_EQ(out.size(), 5u);
    for (std::uint32_t l = 0; l < 64; ++l) {
      unsigned v = 0;
      for (std::size_t b = 0; b < out.size(); ++b) v |= static_cast<unsigned>((out[b] >> l) & 1u) << b;
      ASSERT_EQ(v, static_cast<unsigned>(std::popcount(base + l)));
    }
  }
}

TEST(Converter64, CornerPatterns) {
  EXPECT_EQ(convert64(std::bitset<64>{}), 0u);
  EXPECT_EQ(convert64(std::bitset<64>{}.set()), 64u);
  for (std::size_t i = 0; i < 64; ++i) {
    std::bitset<64> hot;
    hot.set(i);
    ASSERT_EQ(convert64(hot), 1u);
    ASSERT_EQ(convert64(~hot), 63u);
  }
}

TEST(Converter64, RandomVectors) {
  std::mt19937_64 g(64);
  for (int i = 0; i < 100000; ++i) {
    const auto b = random_bits<64>(g, (i % 11) / 10.0);
    ASSERT_EQ(convert64(b), b.count());
  }
}

TEST(Periphery256, CornerPatterns) {
  EXPECT_EQ(accumulate256(std::bitset<256>{}), 0u);
  EXPECT_EQ(accumulate256(std::bitset<256>{}.set()), 256u);
  EXPECT_EQ(accumulate256(alternating256()), 128u);
  for (std::size_t i = 0; i < 256; ++i) {
    std::bitset<256> hot;
    hot.set(i);
    ASSERT_EQ(accumulate256(hot), 1u);
    ASSERT_EQ(accumulate256(~hot), 255u);
  }
}

TEST(Periphery256, RandomVectors) {
  std::mt19937_64 g(256);
  for (int i = 0; i < 100000; ++i) {
    const auto b = random_bits<256>(g, (i % 11) / 10.0);
    ASSERT_EQ(accumulate256(b), b.count());
  }
}

TEST(Periphery256, ComposesFromConverters) {
  std::mt19937_64 g(7);
  for (int i = 0; i < 2000; ++i) {
    const auto b = random_bits<256>(g, 0.5);
    unsigned sum = 0;
    for (std::size_t k = 0; k < 4; ++k) sum += convert64(std::bitset<64>(((b >> (64 * k)) & std::bitset<256>(~0ull)).to_ullong()));
    ASSERT_EQ(accumulate256(b), sum);
  }
}

TEST(Periphery256, SumOfByteSegments) {
  // AND rows from the dataflow engine are 32 byte-wide products.
  std::mt19937_64 g(9);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::uint8_t> bits(256);
    unsigned expected = 0;
    for (int w = 0; w < 32; ++w) {
      const auto byte = static_cast<std::uint8_t>(g());
      expected += static_cast<unsigned>(std::popcount(byte));
      for (int b = 0; b < 8; ++b) bits[static_cast<std::size_t>(w * 8 + b)] = (byte >> b) & 1u;
    }
    ASSERT_EQ(accumulate256(bits), expected);
  }
}

TEST(Interfaces, WidthErrors) {
  std::vector<std::uint8_t> v(15, 1);
  EXPECT_THROW(parallel_count16(v), RangeError);
  v.resize(63);
  EXPECT_THROW(convert64(v), RangeError);
  v.resize(255);
  EXPECT_THROW(accumulate256(v), RangeError);
  std::vector<std::uint8_t> ok(16, 1);
  EXPECT_EQ(parallel_count16(ok), 16u);
}

TEST(Structure, OutputWidths) {
  EXPECT_EQ(netlist(Structure::kCounter16).output_width(), 5u);
  EXPECT_EQ(netlist(Structure::kConverter64).output_width(), 7u);
  EXPECT_EQ(netlist(Structure::kPeriphery256).output_width(), 9u);
  EXPECT_EQ(netlist(Structure::kPeriphery256).input_width(), 256u);
}

TEST(Structure, Counter16Cells) {
  const auto& s = netlist_stats(Structure::kCounter16);
  EXPECT_EQ(s.single_bit_cells(), 15);
  EXPECT_EQ(s.multibit_adders(), 0);
}

TEST(Structure, Converter64Blocks) {
  const auto& s = netlist_stats(Structure::kConverter64);
  EXPECT_EQ(s.parallel_counters, 4);
  EXPECT_EQ(s.multibit_adder_widths, (std::vector<int>{5, 5, 6}));
}

TEST(Structure, Periphery256Blocks) {
  const auto& s = netlist_stats(Structure::kPeriphery256);
  EXPECT_EQ(s.converters, 4);
  EXPECT_EQ(s.multibit_adder_widths, (std::vector<int>{7, 7, 8}));
}

TEST(Structure, CellsAreTopologicallyOrdered) {
  for (auto st : {Structure::kCounter16, Structure::kConverter64, Structure::kPeriphery256}) {
    const auto& net = netlist(st);
    std::set<Wire> driven;
    for (std::size_t i = 0; i < net.input_width(); ++i) driven.insert(static_cast<Wire>(i));
    for (const auto& c : net.cells()) {
      const std::size_t arity = c.kind == CellKind::kFull ? 3 : 2;
      for (std::size_t k = 0; k < arity; ++k) ASSERT_TRUE(driven.count(c.in[k]));
      ASSERT_TRUE(driven.insert(c.sum).second);
      ASSERT_TRUE(driven.insert(c.carry).second);
    }
  }
}

TEST(Structure, DumpListsEveryCell) {
  const auto& net = netlist(Structure::kCounter16);
  const std::string d = net.dump();
  std::size_t fa = 0, ha = 0;
  for (std::size_t p = d.find(" FA "); p != std::string::npos; p = d.find(" FA ", p + 1)) ++fa;
  for (std::size_t p = d.find(" HA "); p != std::string::npos; p = d.find(" HA ", p + 1)) ++ha;
  EXPECT_EQ(fa + ha, net.cells().size());
  EXPECT_EQ(static_cast<int>(fa), net.stats().full_adders);
}
