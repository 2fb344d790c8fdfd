// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oisma/oisma.hpp"

using namespace oisma;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Check = std::function<void(Outcome&)>;

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f%%", v * 100.0);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

// 1
void worked_example(Outcome& o) {
  const auto& d = bp::default_dataset();
  const auto x = d.right_at(3), y = d.left_at(6);
  const auto p10 = bp::multiply(x, y);
  const auto x8 = bp::compress(x), y8 = bp::compress(y);
  const auto p8 = bp::multiply8(x8, y8);
  o.require(bp::decode(p10) == 0.2, "multiply decodes to 0.2");
  o.require(x8.bits.str() == "00001110", "right 0.3 BP8 = 00001110");
  o.require(y8.bits.str() == "11111100", "left 0.6 BP8 = 11111100");
  o.require(p8.bits.str() == "00001100", "BP8 product = 00001100");
  o.require(bp::decode(p8) == 0.2, "BP8 product decodes to 0.2");
  o.detail << "right0.3=" << x8.bits.str() << " left0.6=" << y8.bits.str() << " product=" << p8.bits.str()
           << " value=" << bp::decode(p10);
}

// 2
void bp8_equivalence(Outcome& o) {
  const auto& d = bp::default_dataset();
  int pairs = 0, equal = 0;
  for (int i = 0; i < bp::kLevels; ++i)
    for (int j = 0; j < bp::kLevels; ++j) {
      ++pairs;
      equal += bp::multiply(d.right_at(i), d.left_at(j)).ones() ==
               bp::multiply8(bp::compress(d.right_at(i)), bp::compress(d.left_at(j))).ones();
    }
  o.require(pairs == 100 && equal == 100, "all 100 pairs agree");
  o.detail << equal << "/" << pairs << " pairs identical";
}

// 3
void parallel_counters(Outcome& o) {
  std::size_t bad16 = 0;
  for (std::uint32_t v = 0; v < (1u << 16); ++v)
    bad16 += accum::parallel_count16(std::bitset<16>(v)) != static_cast<unsigned>(std::popcount(v));

  std::size_t corner = 0, bad_corner = 0;
  auto c64 = [&](const std::bitset<64>& b) { ++corner; bad_corner += accum::convert64(b) != b.count(); };
  auto c256 = [&](const std::bitset<256>& b) { ++corner; bad_corner += accum::accumulate256(b) != b.count(); };
  c64({});
  c64(std::bitset<64>{}.set());
  c256({});
  c256(std::bitset<256>{}.set());
  for (std::size_t i = 0; i < 64; ++i) {
    std::bitset<64> h;
    h.set(i);
    c64(h);
    c64(~h);
  }
  for (std::size_t i = 0; i < 256; ++i) {
    std::bitset<256> h;
    h.set(i);
    c256(h);
    c256(~h);
  }

  std::mt19937_64 g(0xACCE55);
  const std::size_t kRandom = 100000;
  std::size_t bad_random = 0;
  for (std::size_t t = 0; t < kRandom; ++t) {
    std::bitset<64> a(g());
    bad_random += accum::convert64(a) != a.count();
    std::bitset<256> b;
    for (int w = 0; w < 4; ++w) b |= std::bitset<256>(g()) << (64 * w);
    if (t % 3 == 1) b &= std::bitset<256>(g());  // sparser rows
    bad_random += accum::accumulate256(b) != b.count();
  }
  o.require(bad16 == 0, "counter16 exhaustive");
  o.require(bad_corner == 0, "corner patterns");
  o.require(bad_random == 0, "random vectors");
  o.detail << "counter16 65536/65536 ok=" << (bad16 == 0) << ", corner patterns " << corner - bad_corner << "/"
           << corner << ", random " << 2 * kRandom - bad_random << "/" << 2 * kRandom;
}

// 4
void fp8_format(Outcome& o) {
  const auto v = fp8::enumerate_positive();
  const auto le1 = std::count_if(v.begin(), v.end(), [](double x) { return x <= 1.0; });
  o.require(v.size() == 119, "119 values");
  o.require(v.back() == 240.0, "max 240");
  o.require(le1 == 56, "56 values <= 1");
  o.detail << "count=" << v.size() << " max=" << v.back() << " <=1.0: " << le1;
}

// 5
void mapping(Outcome& o) {
  const auto rep = bench::bench_mapping(bench::BenchConfig{});
  o.require(within(rep.bp10_mean_abs * 100, 1.19, 0.05), "BP10 1.19% +/- 0.05pp");
  o.require(within(rep.fp8_mean_abs * 100, 0.21, 0.05), "FP8 0.21% +/- 0.05pp");
  o.detail << "BP10 " << pct(rep.bp10_mean_abs) << " (target 1.19%), FP8 " << pct(rep.fp8_mean_abs)
           << " (target 0.21%)";
}

// 6
void multiplication(Outcome& o) {
  const auto rep = bench::bench_multiply(bench::BenchConfig{});
  const double map_bp = bench::bench_mapping(bench::BenchConfig{}).bp10_mean_abs;
  const double ratio = map_bp / rep.bp_mean_abs;
  o.require(rep.rows.size() == 14161, "14161 cases");
  o.require(within(rep.fp8_mean_abs * 100, 0.03, 0.02), "FP8 0.03% +/- 0.02pp");
  o.require(within(rep.bp_mean_abs * 100, 0.30, 0.15), "BP10 0.30% +/- 0.15pp");
  o.require(ratio >= 3.0, "mapping/multiply ratio >= 3");
  o.detail << rep.rows.size() << " cases, FP8 " << pct(rep.fp8_mean_abs) << ", BP10 " << pct(rep.bp_mean_abs)
           << ", mapping/multiply " << ratio << "x";
}

// 7
void matmul_trend(Outcome& o) {
  bench::BenchConfig cfg;
  cfg.include_fp8 = false;
  cfg.dims = {4, 8, 16, 32, 64, 128, 256};
  cfg.trials = 100;
  auto rep = bench::bench_matmul(cfg);
  cfg.dims = {512};
  cfg.trials = 30;
  const auto big = bench::bench_matmul(cfg);
  rep.summary.insert(rep.summary.end(), big.summary.begin(), big.summary.end());

  const auto& s = rep.summary;
  bool monotone = true;
  for (std::size_t i = 1; i < s.size(); ++i) monotone &= s[i].bp_mean <= s[i - 1].bp_mean + 0.003;
  o.require(s.front().bp_mean >= 0.07 && s.front().bp_mean <= 0.12, "N=4 in [7%, 12%]");
  o.require(s.back().bp_mean >= 0.013 && s.back().bp_mean <= 0.025, "N=512 in [1.3%, 2.5%]");
  o.require(monotone, "non-increasing within 0.3pp");
  for (const auto& m : s) o.detail << "N=" << m.dim << ":" << pct(m.bp_mean) << " ";
  o.detail << "(targets 9.42% at 4, 1.81% at 512)";
}

// 8
void architecture(Outcome& o) {
  std::mt19937_64 g(0xF1DE11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto rnd = [&](std::size_t r, std::size_t c) {
    MatrixReal m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = g() % 16 == 0 ? 1.0 : u(g);
    return m;
  };
  int cases = 0, exact = 0;
  for (int t = 0; t < 120; ++t) {
    const std::size_t k = 1 + g() % 320, n = 1 + g() % 48, count = 1 + g() % 3;
    std::vector<MatrixReal> ws;
    for (std::size_t m = 0; m < count; ++m) ws.push_back(rnd(k, 1 + g() % 64));
    const auto x = rnd(n, k);
    const auto run = dataflow::execute(dataflow::plan_placement(ws, dataflow::EngineGeometry{}), x);
    bool ok = true;
    for (std::size_t m = 0; m < count; ++m) ok &= run.outputs[m] == dataflow::matmul_bp(x, ws[m]);
    ++cases;
    exact += ok;
  }

  int states = 0, identity = 0;
  array::OismaArray arr;
  for (int round = 0; round < 4; ++round) {
    for (int r = 0; r < array::kRows; ++r) {
      array::RowBits b;
      for (int w = 0; w < 4; ++w) b |= array::RowBits(g()) << (64 * w);
      if (round == 1) b.reset();
      if (round == 2) b.set();
      arr.write_row(r, b);
      ++states;
      identity += arr.and_row(r, array::RowBits{}.set()).first == arr.read_row(r).first;
    }
  }
  o.require(cases >= 100 && exact == cases, "execute == matmul_bp");
  o.require(identity == states, "and_row(all-ones) == read_row");
  o.detail << exact << "/" << cases << " randomized plans bit-exact, identity input " << identity << "/" << states
           << " rows";
}

// 9
void control_protocol(Outcome& o) {
  using array::Line;
  using array::Signal;
  auto fields = [](const array::ControlVector& c) {
    std::ostringstream s;
    s << to_string(c.we) << ' ' << to_string(c.s) << ' ' << to_string(c.sb) << ' ' << to_string(c.r) << ' '
      << to_string(c.in) << ' ' << to_string(c.pre_en) << ' ' << to_string(c.bl) << ' ' << to_string(c.blb);
    return s.str();
  };
  struct Golden {
    const char* name;
    std::vector<std::string> phases;
  };
  const std::string sense = "0 0 1 0 X 0 Floating Floating";
  const Golden table[] = {
      {"read", {"0 0 1 1 X 1 Charge Discharge", sense}},
      {"and_in0", {"0 1 0 0 0 1 Discharge Discharge", sense}},
      {"and_in1", {"0 1 0 0 1 1 Charge Discharge", sense}},
      {"write0", {"1 1 0 X 0 X Discharge Charge"}},
      {"write1", {"1 1 0 X 1 X Charge Discharge"}},
  };
  array::OismaArray arr;
  std::vector<array::OpTrace> traces;
  traces.push_back(arr.read_row(0).second);
  traces.push_back(arr.and_row(0, array::RowBits{}).second);
  traces.push_back(arr.and_row(0, array::RowBits{}.set()).second);
  traces.push_back(arr.write_row(0, array::RowBits{}));
  traces.push_back(arr.write_row(0, array::RowBits{}.set()));

  int matched = 0, total = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    bool ok = t.phases.size() == table[i].phases.size();
    for (std::size_t p = 0; ok && p < t.phases.size(); ++p) {
      ok = t.phases[p].variants.size() == 1 && fields(t.phases[p].variants[0].control) == table[i].phases[p];
    }
    ++total;
    matched += ok;
    if (!ok) o.detail << table[i].name << " mismatch; ";
  }
  const bool timing = traces[0].total_ns() == 20.0 && traces[0].phases[0].duration_ns == 14.0 &&
                      traces[1].total_ns() == 20.0;
  o.require(matched == total, "all operations match the table");
  o.require(timing, "20 ns with 14 ns precharge");
  o.detail << matched << "/" << total << " operations field-for-field, read/AND " << traces[0].total_ns()
           << " ns";
}

// 10
void metrics(Outcome& o) {
  const perf::EnergyParams p;
  const double mac = perf::mac_energy_pj(p, perf::MultMode::kVmm, 8);
  const double one = perf::throughput_gops(perf::GeometryParams::single_array());
  const double full = perf::throughput_gops(perf::GeometryParams{});
  const auto m180 = perf::metrics(p, perf::GeometryParams::single_array());
  const auto cfg = perf::default_config();
  const auto m22 = perf::scale_to_node(m180, cfg.node("22nm"));
  o.require(within(mac, 2.2452, 1e-9), "2.2452 pJ");
  o.require(within(one, 3.2, 1e-9), "3.2 GOPS");
  o.require(within(full, 819.2, 1e-9), "819.2 GOPS");
  o.require(within(m180.tops_per_w, 0.891, 0.001), "0.891 TOPS/W");
  o.require(within(m180.gops_per_mm2, 3.98, 0.01), "3.98 GOPS/mm2");
  o.require(within(m22.tops_per_w, 89.5, 0.895), "89.5 TOPS/W");
  o.require(within(m22.gops_per_mm2 / 1e3, 3.28, 0.0328), "3.28 TOPS/mm2");
  o.require(within(m22.frequency_hz / 1e6, 372, 3.72), "372 MHz");
  o.detail << "MAC " << mac << " pJ, " << one << " / " << full << " GOPS, " << m180.tops_per_w << " TOPS/W, "
           << m180.gops_per_mm2 << " GOPS/mm2; 22nm " << m22.tops_per_w << " TOPS/W, "
           << m22.gops_per_mm2 / 1e3 << " TOPS/mm2, " << m22.frequency_hz / 1e6 << " MHz";
}

}  // namespace

int main() {
  const std::pair<const char*, Check> criteria[] = {
      {"worked-example exactness", worked_example},
      {"BP8/BP10 product equivalence", bp8_equivalence},
      {"parallel counter correctness", parallel_counters},
      {"FP8 format derivation", fp8_format},
      {"mapping benchmark", mapping},
      {"multiplication benchmark", multiplication},
      {"MatMul Frobenius trend", matmul_trend},
      {"architecture fidelity", architecture},
      {"control-protocol golden table", control_protocol},
      {"metrics arithmetic", metrics},
  };
  int failed = 0, n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %2d  %-32s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
