#pragma once

// Matrix multiplication on OISMA arrays.
//
// Inputs X are right-biased, weights W left-biased, both in BP8 form. A
// wordline holds 32 consecutive BP8 words (256 bits) of one weight column;
// one input chunk of 32 words is broadcast across the columns of every
// array that stores that chunk, ANDed in situ, and the 256-bit result is
// counted by the accumulation periphery. Ones are accumulated as integers
// and divided by 10 once per dot product.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oisma/accumulator.hpp"
#include "oisma/array_sim.hpp"
#include "oisma/bp.hpp"
#include "oisma/errors.hpp"
#include "oisma/matrix.hpp"
#include "oisma/minifloat.hpp"

namespace oisma::dataflow {

inline constexpr int kWordBits = 8;
inline constexpr int kWordsPerLine = array::kCols / kWordBits;  // 32

/// Matrix of BP8 words sharing one bias.
struct BpMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bp::Bias bias = bp::Bias::kRight;
  std::vector<bp::Bp8Bitstream> words;  // row-major

  const bp::Bp8Bitstream& operator()(std::size_t i, std::size_t j) const { return words[i * cols + j]; }
};

inline BpMatrix encode_matrix(const MatrixReal& m, bp::Bias bias,
                              const bp::BpDataset& d = bp::default_dataset()) {
  BpMatrix out{m.rows(), m.cols(), bias, {}};
  out.words.reserve(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      try {
        out.words.push_back(bp::compress(bp::encode(m(i, j), bias, d)));
      } catch (const DomainError& e) {
        throw DomainError("element (" + std::to_string(i) + "," + std::to_string(j) + "): " + e.what());
      }
    }
  }
  return out;
}

/// Operand values of an encoded matrix. BP8 keeps only bits 1..8, which is
/// exact for products but not for operands with an edge bit set, so the
/// value comes from the recorded level rather than the popcount.
inline MatrixReal decode_matrix(const BpMatrix& m) {
  MatrixReal out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j).value_tenths / 10.0;
  }
  return out;
}

namespace detail {

inline void check_inner(const MatrixReal& x, const MatrixReal& w) {
  if (x.cols() != w.rows()) {
    throw DimensionError("inner dimensions differ: " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + " times " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()));
  }
}

/// Packs BP8 masks eight to a 64-bit word, zero-padded.
inline std::vector<std::uint64_t> pack(const std::vector<std::uint8_t>& bytes) {
  std::vector<std::uint64_t> out((bytes.size() + 7) / 8, 0);
  for (std::size_t k = 0; k < bytes.size(); ++k) {
    out[k / 8] |= static_cast<std::uint64_t>(bytes[k]) << (8 * (k % 8));
  }
  return out;
}

}  // namespace detail

/// BP MatMul: out(i,j) = sum_k popcount(x_ik AND w_kj) / 10.
inline MatrixReal matmul_bp(const MatrixReal& x, const MatrixReal& w,
                            const bp::BpDataset& d = bp::default_dataset()) {
  detail::check_inner(x, w);
  const std::size_t n = x.rows(), k_dim = x.cols(), m = w.cols();
  const auto xe = encode_matrix(x, bp::Bias::kRight, d);
  const auto we = encode_matrix(w, bp::Bias::kLeft, d);

  std::vector<std::vector<std::uint64_t>> rows(n), cols(m);
  std::vector<std::uint8_t> buf(k_dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < k_dim; ++k) buf[k] = static_cast<std::uint8_t>(xe(i, k).bits.mask());
    rows[i] = detail::pack(buf);
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < k_dim; ++k) buf[k] = static_cast<std::uint8_t>(we(k, j).bits.mask());
    cols[j] = detail::pack(buf);
  }
  MatrixReal out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      std::uint64_t ones = 0;
      const auto& a = rows[i];
      const auto& b = cols[j];
      for (std::size_t t = 0; t < a.size(); ++t) ones += static_cast<std::uint64_t>(std::popcount(a[t] & b[t]));
      out(i, j) = static_cast<double>(ones) / 10.0;
    }
  }
  return out;
}

/// Exact double-precision product.
inline MatrixReal matmul_fp64(const MatrixReal& x, const MatrixReal& w) {
  detail::check_inner(x, w);
  MatrixReal out(x.rows(), w.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const double a = x(i, k);
      for (std::size_t j = 0; j < w.cols(); ++j) out(i, j) += a * w(k, j);
    }
  }
  return out;
}

/// FP8 operands and FP8-quantized products, accumulated in FP64.
inline MatrixReal matmul_fp8(const MatrixReal& x, const MatrixReal& w) {
  detail::check_inner(x, w);
  MatrixReal xq(x.rows(), x.cols()), wq(w.rows(), w.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k) xq(i, k) = fp8::quantize(x(i, k));
  for (std::size_t k = 0; k < w.rows(); ++k)
    for (std::size_t j = 0; j < w.cols(); ++j) wq(k, j) = fp8::quantize(w(k, j));
  MatrixReal out(x.rows(), w.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const double a = xq(i, k);
      for (std::size_t j = 0; j < w.cols(); ++j) out(i, j) += fp8::fp8_multiply(a, wq(k, j));
    }
  }
  return out;
}

inline double frobenius_norm(const MatrixReal& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

/// ||A - Ahat||_F / ||A||_F.
inline double frobenius_rel_error(const MatrixReal& a, const MatrixReal& ahat) {
  if (a.rows() != ahat.rows() || a.cols() != ahat.cols()) {
    throw DimensionError("Frobenius error needs equal shapes");
  }
  const double norm = frobenius_norm(a);
  if (norm == 0.0) throw DomainError("baseline matrix has zero Frobenius norm");
  double s = 0.0;
  for (std::size_t t = 0; t < a.data().size(); ++t) {
    const double d = a.data()[t] - ahat.data()[t];
    s += d * d;
  }
  return std::sqrt(s) / norm;
}

// ---------------------------------------------------------------------------
// Placement and execution

struct EngineGeometry {
  int banks = 64;
  int arrays_per_bank = 4;

  int arrays() const { return banks * arrays_per_bank; }
};

/// One weight wordline: 32 words of column `column`, k range starting at
/// chunk * 32, of weight matrix `matrix`.
struct WordlinePlacement {
  int matrix = 0;
  int array = 0;
  int wordline = 0;
  int chunk = 0;
  int column = 0;
};

struct PlacementPlan {
  std::size_t inner_dim = 0;           // K shared by all weight matrices
  int chunks = 0;                      // ceil(K / 32)
  std::vector<BpMatrix> weights;       // encoded, left-biased
  std::vector<WordlinePlacement> lines;
  int weight_arrays = 0;
  int input_array = 0;                 // id of the array holding input vectors
  std::vector<std::vector<int>> broadcast;  // chunk -> consuming array ids

  int fan_out(int chunk) const { return static_cast<int>(broadcast.at(static_cast<std::size_t>(chunk)).size()); }

  /// Array id -> (matrix, column, chunk range, wordline range) listing, then
  /// the broadcast table.
  std::string dump() const {
    std::ostringstream out;
    out << "# placement: " << weights.size() << " weight matrices, K=" << inner_dim << ", "
        << chunks << " chunks/column, " << weight_arrays << " weight arrays, input array "
        << input_array << '\n';
    std::size_t t = 0;
    while (t < lines.size()) {
      std::size_t u = t;
      while (u + 1 < lines.size() && lines[u + 1].array == lines[t].array &&
             lines[u + 1].matrix == lines[t].matrix) {
        ++u;
      }
      out << "array " << lines[t].array << " -> matrix " << lines[t].matrix << " columns "
          << lines[t].column << ".." << lines[u].column << " wordlines " << lines[t].wordline
          << ".." << lines[u].wordline << '\n';
      t = u + 1;
    }
    for (std::size_t c = 0; c < broadcast.size(); ++c) {
      out << "input chunk " << c << " (k " << c * kWordsPerLine << ".."
          << std::min(inner_dim, (c + 1) * kWordsPerLine) - 1 << ") -> arrays";
      for (int a : broadcast[c]) out << ' ' << a;
      out << '\n';
    }
    return out.str();
  }
};

/// Weight-stationary tiling. Every weight matrix starts on a fresh array;
/// column j of matrix m occupies `chunks` consecutive wordlines. One extra
/// array is reserved for input vectors.
inline PlacementPlan plan_placement(const std::vector<MatrixReal>& weights, const EngineGeometry& geometry,
                                    const bp::BpDataset& d = bp::default_dataset()) {
  if (weights.empty()) throw DimensionError("no weight matrices to place");
  PlacementPlan plan;
  plan.inner_dim = weights.front().rows();
  if (plan.inner_dim == 0) throw DimensionError("weight matrix has no rows");
  plan.chunks = static_cast<int>((plan.inner_dim + kWordsPerLine - 1) / kWordsPerLine);
  if (plan.chunks > array::kRows) throw CapacityError("weight column longer than one array");

  int next_array = 0;
  for (std::size_t mi = 0; mi < weights.size(); ++mi) {
    const auto& w = weights[mi];
    if (w.rows() != plan.inner_dim) throw DimensionError("weight matrices disagree on inner dimension");
    plan.weights.push_back(encode_matrix(w, bp::Bias::kLeft, d));
    int line = array::kRows;  // forces a fresh array
    int array_id = next_array - 1;
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (line + plan.chunks > array::kRows) {
        array_id = next_array++;
        line = 0;
      }
      for (int c = 0; c < plan.chunks; ++c) {
        plan.lines.push_back({static_cast<int>(mi), array_id, line++, c, static_cast<int>(j)});
      }
    }
  }
  plan.weight_arrays = next_array;
  if (plan.weight_arrays + 1 > geometry.arrays()) {
    throw CapacityError("placement needs " + std::to_string(plan.weight_arrays) +
                        " weight arrays plus 1 input array, inventory has " +
                        std::to_string(geometry.arrays()));
  }
  plan.input_array = plan.weight_arrays;
  plan.broadcast.assign(static_cast<std::size_t>(plan.chunks), {});
  for (const auto& l : plan.lines) {
    auto& b = plan.broadcast[static_cast<std::size_t>(l.chunk)];
    if (std::find(b.begin(), b.end(), l.array) == b.end()) b.push_back(l.array);
  }
  return plan;
}

struct ScheduleStats {
  std::uint64_t cycles = 0;
  std::uint64_t and_ops = 0;
  std::uint64_t input_reads = 0;
  std::uint64_t input_writes = 0;
  std::uint64_t weight_writes = 0;
  std::uint64_t accumulator_invocations = 0;
  std::uint64_t macs = 0;
  std::uint64_t ops = 0;

  ScheduleStats& operator+=(const ScheduleStats& o) {
    cycles += o.cycles;
    and_ops += o.and_ops;
    input_reads += o.input_reads;
    input_writes += o.input_writes;
    weight_writes += o.weight_writes;
    accumulator_invocations += o.accumulator_invocations;
    macs += o.macs;
    ops += o.ops;
    return *this;
  }
  friend ScheduleStats operator+(ScheduleStats a, const ScheduleStats& b) { return a += b; }
  friend bool operator==(const ScheduleStats&, const ScheduleStats&) = default;
};

struct ExecuteResult {
  std::vector<MatrixReal> outputs;  // one per weight matrix
  ScheduleStats stats;
  std::vector<array::OpTrace> trace_sample;
};

namespace detail {

inline array::RowBits line_bits(const std::vector<std::uint8_t>& words) {
  array::RowBits r;
  for (std::size_t t = 0; t < words.size(); ++t) {
    for (int b = 0; b < kWordBits; ++b) {
      if ((words[t] >> b) & 1u) r.set(t * kWordBits + static_cast<std::size_t>(b));
    }
  }
  return r;
}

}  // namespace detail

/// Loads the weights, then streams X through the input array in
/// input-stationary order: each input chunk is read once and broadcast to
/// every consuming array before the next chunk. `trace_limit` keeps the
/// first few control traces for inspection.
inline ExecuteResult execute(const PlacementPlan& plan, const MatrixReal& x,
                             const bp::BpDataset& d = bp::default_dataset(),
                             std::size_t trace_limit = 0) {
  if (x.cols() != plan.inner_dim) {
    throw DimensionError("input has " + std::to_string(x.cols()) + " columns, plan expects " +
                         std::to_string(plan.inner_dim));
  }
  ExecuteResult res;
  auto keep = [&](array::OpTrace t) {
    if (res.trace_sample.size() < trace_limit) res.trace_sample.push_back(std::move(t));
  };
  std::vector<array::OismaArray> arrays(static_cast<std::size_t>(plan.weight_arrays) + 1);

  // Weight load.
  std::vector<std::vector<const WordlinePlacement*>> by_chunk_array(
      static_cast<std::size_t>(plan.chunks) * arrays.size());
  for (const auto& l : plan.lines) {
    const auto& w = plan.weights[static_cast<std::size_t>(l.matrix)];
    std::vector<std::uint8_t> words(kWordsPerLine, 0);
    for (int t = 0; t < kWordsPerLine; ++t) {
      const std::size_t k = static_cast<std::size_t>(l.chunk) * kWordsPerLine + static_cast<std::size_t>(t);
      if (k < plan.inner_dim) words[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(w(k, static_cast<std::size_t>(l.column)).bits.mask());
    }
    keep(arrays[static_cast<std::size_t>(l.array)].write_row(l.wordline, detail::line_bits(words)));
    ++res.stats.weight_writes;
    by_chunk_array[static_cast<std::size_t>(l.chunk) * arrays.size() + static_cast<std::size_t>(l.array)].push_back(&l);
  }

  for (const auto& w : plan.weights) {
    res.outputs.emplace_back(x.rows(), w.cols);
    res.stats.macs += x.rows() * w.rows * w.cols;
  }

  const auto xe = encode_matrix(x, bp::Bias::kRight, d);
  auto& input_array = arrays[static_cast<std::size_t>(plan.input_array)];
  const std::size_t lines_per_row = static_cast<std::size_t>(plan.chunks);
  const std::size_t rows_per_batch = static_cast<std::size_t>(array::kRows) / lines_per_row;

  for (std::size_t batch = 0; batch < x.rows(); batch += rows_per_batch) {
    const std::size_t batch_end = std::min(x.rows(), batch + rows_per_batch);
    for (std::size_t i = batch; i < batch_end; ++i) {
      for (std::size_t c = 0; c < lines_per_row; ++c) {
        std::vector<std::uint8_t> words(kWordsPerLine, 0);
        for (std::size_t t = 0; t < kWordsPerLine; ++t) {
          const std::size_t k = c * kWordsPerLine + t;
          if (k < plan.inner_dim) words[t] = static_cast<std::uint8_t>(xe(i, k).bits.mask());
        }
        const int wl = static_cast<int>((i - batch) * lines_per_row + c);
        keep(input_array.write_row(wl, detail::line_bits(words)));
        ++res.stats.input_writes;
      }
    }
    for (std::size_t i = batch; i < batch_end; ++i) {
      for (std::size_t c = 0; c < lines_per_row; ++c) {
        const int wl = static_cast<int>((i - batch) * lines_per_row + c);
        auto [input, read_trace] = input_array.read_row(wl);
        keep(std::move(read_trace));
        ++res.stats.input_reads;
        for (int a : plan.broadcast[c]) {
          const auto& arr = arrays[static_cast<std::size_t>(a)];
          for (const WordlinePlacement* l : by_chunk_array[c * arrays.size() + static_cast<std::size_t>(a)]) {
            array::RowBits out;
            if (res.trace_sample.size() < trace_limit) {
              auto [bits, t] = arr.and_row(l->wordline, input);
              keep(std::move(t));
              out = bits;
            } else {
              out = arr.and_bits(l->wordline, input);
            }
            ++res.stats.and_ops;
            const unsigned ones = accum::accumulate256(out);
            ++res.stats.accumulator_invocations;
            res.outputs[static_cast<std::size_t>(l->matrix)](i, static_cast<std::size_t>(l->column)) += ones;
          }
        }
      }
    }
  }
  for (auto& o : res.outputs) {
    for (std::size_t i = 0; i < o.rows(); ++i)
      for (std::size_t j = 0; j < o.cols(); ++j) o(i, j) /= 10.0;
  }
  res.stats.cycles = res.stats.and_ops;
  res.stats.ops = 2 * res.stats.macs;
  return res;
}

}  // namespace oisma::dataflow
