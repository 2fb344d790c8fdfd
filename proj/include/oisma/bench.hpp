#pragma once

// Accuracy and efficiency benchmarks.
//
//   mapping  : the 119 normalized FP8 grid values mapped to FP8 and BP10
//   multiply : all 119 x 119 grid products in FP8 and BP10
//   matmul   : relative Frobenius error of FP8 and BP N x N MatMul on
//              seeded uniform [0, 1] inputs
//   simulate : a placement + execution run with energy accounting
//
// Every CSV body is a pure function of the configuration; run metadata
// (timestamp) lives outside the CSV.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oisma/bp.hpp"
#include "oisma/dataflow.hpp"
#include "oisma/errors.hpp"
#include "oisma/matrix.hpp"
#include "oisma/minifloat.hpp"
#include "oisma/perf_model.hpp"

namespace oisma::bench {

// ---------------------------------------------------------------------------
// Randomness: std::mt19937_64 per trial, seeded by SplitMix64 over
// (seed, dim, trial) so that adding trials or dims never reshuffles others.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t dim, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ dim) ^ trial));
}

/// Uniform [0, 1) with 53 random bits; identical on every platform.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline MatrixReal random_matrix(std::mt19937_64& g, std::size_t rows, std::size_t cols) {
  MatrixReal m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = uniform01(g);
  return m;
}

/// The (X, W) operand pair of one MatMul trial.
inline std::pair<MatrixReal, MatrixReal> trial_operands(std::uint64_t seed, std::size_t dim, std::size_t trial) {
  auto g = trial_stream(seed, dim, trial);
  auto x = random_matrix(g, dim, dim);
  auto w = random_matrix(g, dim, dim);
  return {std::move(x), std::move(w)};
}

/// FNV-1a over the dataset's text form.
inline std::uint64_t dataset_hash(const bp::BpDataset& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bp::dump_dataset(d)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct BenchConfig {
  std::uint64_t seed = 1;
  std::vector<std::size_t> dims = {4, 8, 16, 32, 64, 128, 256, 512};
  std::size_t trials = 100;
  bp::BpDataset dataset = bp::default_dataset();
  std::string dataset_label = "default";
  bool include_fp8 = true;
  // Per-dim guard on N * N * trials.
  std::uint64_t work_cap = 512ULL * 512ULL * 100ULL;
  bool allow_large = false;
  unsigned workers = 0;  // 0 = hardware concurrency

  void validate() const {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (dims.empty()) throw ValidationError("at least one dimension required");
    for (auto n : dims) {
      if (n < 1) throw ValidationError("dimensions must be >= 1");
    }
  }
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

template <typename T>
double mean_of(const std::vector<T>& rows, double T::*field) {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += std::abs(r.*field);
  return s / static_cast<double>(rows.size());
}

/// Runs fn(0..count-1) on a worker pool and returns results in index order.
template <typename Result>
std::vector<Result> parallel_map(std::size_t count, unsigned workers, const std::function<Result(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Result> out(count);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < count; i += workers) out[i] = fn(i);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Mapping

struct MappingRow {
  std::size_t index = 0;
  double raw = 0.0;
  double baseline = 0.0;   // raw / 240
  double fp8 = 0.0;
  double fp8_err = 0.0;    // signed: mapped - baseline
  double bp10 = 0.0;       // nearest tenth of the BP10 grid
  double bp10_err = 0.0;
  double bp10_encoded = 0.0;  // representable operand (clamped to 0.9)
  double bp10_encoded_err = 0.0;
};

struct MappingReport {
  std::vector<MappingRow> rows;
  double fp8_mean_abs = 0.0;
  double bp10_mean_abs = 0.0;
  double bp10_encoded_mean_abs = 0.0;

  std::string csv() const {
    std::ostringstream out;
    out << "index,raw,baseline,fp8,fp8_err,bp10,bp10_err,bp10_encoded,bp10_encoded_err\n";
    for (const auto& r : rows) {
      out << r.index << ',' << detail::num(r.raw) << ',' << detail::num(r.baseline) << ','
          << detail::num(r.fp8) << ',' << detail::num(r.fp8_err) << ',' << detail::num(r.bp10) << ','
          << detail::num(r.bp10_err) << ',' << detail::num(r.bp10_encoded) << ','
          << detail::num(r.bp10_encoded_err) << '\n';
    }
    return out.str();
  }
};

inline MappingReport bench_mapping(const BenchConfig& cfg) {
  MappingReport rep;
  const auto raw = fp8::enumerate_positive();
  const auto base = fp8::normalized_grid();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    MappingRow r;
    r.index = i;
    r.raw = raw[i];
    r.baseline = base[i];
    r.fp8 = fp8::quantize(base[i]);
    r.fp8_err = r.fp8 - r.baseline;
    r.bp10 = bp::nearest_tenth(base[i]) / 10.0;
    r.bp10_err = r.bp10 - r.baseline;
    r.bp10_encoded = bp::decode(bp::encode(base[i], bp::Bias::kRight, cfg.dataset));
    r.bp10_encoded_err = r.bp10_encoded - r.baseline;
    rep.rows.push_back(r);
  }
  rep.fp8_mean_abs = detail::mean_of(rep.rows, &MappingRow::fp8_err);
  rep.bp10_mean_abs = detail::mean_of(rep.rows, &MappingRow::bp10_err);
  rep.bp10_encoded_mean_abs = detail::mean_of(rep.rows, &MappingRow::bp10_encoded_err);
  return rep;
}

// ---------------------------------------------------------------------------
// Multiplication

struct MultiplyRow {
  std::size_t i = 0;
  std::size_t j = 0;
  double exact = 0.0;  // max-min normalized FP64 product
  double fp8 = 0.0;
  double fp8_err = 0.0;
  double bp = 0.0;
  double bp_err = 0.0;
};

struct MultiplyReport {
  std::vector<MultiplyRow> rows;
  double fp8_mean_abs = 0.0;
  double bp_mean_abs = 0.0;
  double bp_mean_signed = 0.0;

  std::string csv() const {
    std::ostringstream out;
    out << "i,j,exact,fp8,fp8_err,bp,bp_err\n";
    for (const auto& r : rows) {
      out << r.i << ',' << r.j << ',' << detail::num(r.exact) << ',' << detail::num(r.fp8) << ','
          << detail::num(r.fp8_err) << ',' << detail::num(r.bp) << ',' << detail::num(r.bp_err) << '\n';
    }
    return out.str();
  }
};

/// Ordered pairs (i, j) of the grid: multiplicand i right-biased, multiplier
/// j left-biased. FP8 products are the exact products of the FP8 operands,
/// normalized, then quantized to the nearest FP8 value.
inline MultiplyReport bench_multiply(const BenchConfig& cfg) {
  MultiplyReport rep;
  const auto raw = fp8::enumerate_positive();
  const auto base = fp8::normalized_grid();
  const double pmin = raw.front() * raw.front();
  const double pmax = raw.back() * raw.back();
  std::vector<bp::BpBitstream> right, left;
  for (double a : base) {
    right.push_back(bp::encode(a, bp::Bias::kRight, cfg.dataset));
    left.push_back(bp::encode(a, bp::Bias::kLeft, cfg.dataset));
  }
  rep.rows.reserve(raw.size() * raw.size());
  double signed_sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = 0; j < raw.size(); ++j) {
      MultiplyRow r;
      r.i = i;
      r.j = j;
      r.exact = (raw[i] * raw[j] - pmin) / (pmax - pmin);
      r.fp8 = fp8::quantize(r.exact);
      r.fp8_err = r.fp8 - r.exact;
      r.bp = bp::multiply(right[i], left[j]).value();
      r.bp_err = r.bp - r.exact;
      signed_sum += r.bp_err;
      rep.rows.push_back(r);
    }
  }
  rep.fp8_mean_abs = detail::mean_of(rep.rows, &MultiplyRow::fp8_err);
  rep.bp_mean_abs = detail::mean_of(rep.rows, &MultiplyRow::bp_err);
  rep.bp_mean_signed = signed_sum / static_cast<double>(rep.rows.size());
  return rep;
}

// ---------------------------------------------------------------------------
// MatMul

struct MatmulRow {
  std::size_t dim = 0;
  std::size_t trial = 0;
  double fp8_err = 0.0;  // NaN when FP8 is skipped
  double bp_err = 0.0;
};

struct MatmulDimSummary {
  std::size_t dim = 0;
  std::size_t trials = 0;
  double fp8_mean = 0.0;
  double bp_mean = 0.0;
};

struct MatmulReport {
  std::vector<MatmulRow> rows;
  std::vector<MatmulDimSummary> summary;

  std::string csv() const {
    std::ostringstream out;
    out << "dim,trial,fp8_err,bp_err\n";
    for (const auto& r : rows) {
      out << r.dim << ',' << r.trial << ',' << detail::num(r.fp8_err) << ',' << detail::num(r.bp_err) << '\n';
    }
    return out.str();
  }

  std::string summary_csv() const {
    std::ostringstream out;
    out << "dim,trials,fp8_mean,bp_mean\n";
    for (const auto& s : summary) {
      out << s.dim << ',' << s.trials << ',' << detail::num(s.fp8_mean) << ',' << detail::num(s.bp_mean) << '\n';
    }
    return out.str();
  }
};

inline MatmulRow matmul_trial(const BenchConfig& cfg, std::size_t dim, std::size_t trial) {
  const auto [x, w] = trial_operands(cfg.seed, dim, trial);
  const auto ideal = dataflow::matmul_fp64(x, w);
  MatmulRow r;
  r.dim = dim;
  r.trial = trial;
  r.bp_err = dataflow::frobenius_rel_error(ideal, dataflow::matmul_bp(x, w, cfg.dataset));
  r.fp8_err = cfg.include_fp8 ? dataflow::frobenius_rel_error(ideal, dataflow::matmul_fp8(x, w))
                              : std::nan("");
  return r;
}

inline MatmulReport bench_matmul(const BenchConfig& cfg) {
  cfg.validate();
  for (auto n : cfg.dims) {
    const std::uint64_t work = static_cast<std::uint64_t>(n) * n * cfg.trials;
    if (work > cfg.work_cap && !cfg.allow_large) {
      throw CapacityError("dimension " + std::to_string(n) + " with " + std::to_string(cfg.trials) +
                          " trials exceeds the work cap; pass --allow-large to run it");
    }
  }
  MatmulReport rep;
  for (auto n : cfg.dims) {
    auto rows = detail::parallel_map<MatmulRow>(
        cfg.trials, cfg.workers, [&](std::size_t t) { return matmul_trial(cfg, n, t); });
    MatmulDimSummary s{n, cfg.trials, 0.0, 0.0};
    for (const auto& r : rows) {
      s.fp8_mean += r.fp8_err;
      s.bp_mean += r.bp_err;
    }
    s.fp8_mean /= static_cast<double>(rows.size());
    s.bp_mean /= static_cast<double>(rows.size());
    rep.summary.push_back(s);
    rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Workload simulation

struct SimulationReport {
  dataflow::PlacementPlan plan;
  dataflow::ExecuteResult result;
  bool matches_reference = false;
  perf::WorkloadEnergy vmm;
  perf::WorkloadEnergy single;

  std::string stats_text() const {
    const auto& s = result.stats;
    std::ostringstream out;
    out << "cycles " << s.cycles << "\nand_ops " << s.and_ops << "\ninput_reads " << s.input_reads
        << "\ninput_writes " << s.input_writes << "\nweight_writes " << s.weight_writes
        << "\naccumulator_invocations " << s.accumulator_invocations << "\nmacs " << s.macs << "\nops " << s.ops
        << "\nmatches_matmul_bp " << (matches_reference ? "yes" : "no") << '\n';
    for (const auto* e : {&vmm, &single}) {
      out << "energy_" << perf::to_string(e->mode) << "_fj mult=" << detail::num(e->mult_fj)
          << " accum=" << detail::num(e->accum_fj) << " read=" << detail::num(e->read_fj)
          << " total=" << detail::num(e->total_fj()) << " (estimate; writes not charged)\n";
    }
    return out.str();
  }
};

inline SimulationReport simulate_workload(const MatrixReal& x, const std::vector<MatrixReal>& weights,
                                          const bp::BpDataset& d = bp::default_dataset(),
                                          const dataflow::EngineGeometry& geometry = {},
                                          const perf::EnergyParams& energy = {}, std::size_t trace_limit = 8) {
  SimulationReport rep;
  rep.plan = dataflow::plan_placement(weights, geometry, d);
  rep.result = dataflow::execute(rep.plan, x, d, trace_limit);
  rep.matches_reference = true;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    if (!(rep.result.outputs[m] == dataflow::matmul_bp(x, weights[m], d))) rep.matches_reference = false;
  }
  rep.vmm = perf::workload_energy(rep.result.stats, energy, perf::MultMode::kVmm);
  rep.single = perf::workload_energy(rep.result.stats, energy, perf::MultMode::kSingle);
  return rep;
}

/// Transformer-style projection: one input X (rows x 128) against three
/// 128 x 32 weight tiles Q, K, V.
inline std::pair<MatrixReal, std::vector<MatrixReal>> qkv_demo_operands(std::uint64_t seed, std::size_t rows = 16) {
  auto g = trial_stream(seed, 0xC0FFEE, 0);
  auto x = random_matrix(g, rows, 128);
  std::vector<MatrixReal> w;
  for (int m = 0; m < 3; ++m) w.push_back(random_matrix(g, 128, 32));
  return {std::move(x), std::move(w)};
}

// ---------------------------------------------------------------------------
// Metrics

/// Measured-node row for a single 4 KB array, then one row per requested node.
inline std::vector<perf::MetricsReport> report_metrics(const perf::PerfConfig& cfg,
                                                       const std::vector<std::string>& nodes) {
  auto g = cfg.geometry;
  g.banks = 1;
  g.arrays_per_bank = 1;
  std::vector<perf::MetricsReport> rows{perf::metrics(cfg.energy, g)};
  for (const auto& n : nodes) rows.push_back(perf::scale_to_node(rows.front(), cfg.node(n)));
  return rows;
}

}  // namespace oisma::bench
