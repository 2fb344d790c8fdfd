#pragma once

// Energy, power, throughput and area accounting.
//
// One MAC counts as two operations. The per-bit energies are the measured
// 50 MHz array averages (read, single-shot AND, continuous VMM AND,
// accumulation periphery); a MAC on an 8-bit BP word costs
// (mult + accum) x 8 bits.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oisma/dataflow.hpp"
#include "oisma/errors.hpp"

namespace oisma::perf {

struct EnergyParams {
  double read_fj_per_bit = 237.0;
  double mult_single_fj_per_bit = 216.0;
  double mult_vmm_fj_per_bit = 178.0;
  double accum_fj_per_bit = 102.65;

  void validate() const {
    if (!(read_fj_per_bit > 0 && mult_single_fj_per_bit > 0 && mult_vmm_fj_per_bit > 0 &&
          accum_fj_per_bit > 0)) {
      throw DomainError("energy parameters must be positive");
    }
  }
};

enum class MultMode { kSingle, kVmm };

inline constexpr std::string_view to_string(MultMode m) { return m == MultMode::kVmm ? "vmm" : "single"; }

struct GeometryParams {
  int rows = 128;
  int cols = 256;
  int arrays_per_bank = 4;
  int banks = 64;
  double frequency_hz = 50e6;
  int word_bits = 8;
  double area_mm2_per_array = 0.804241;  // effective computing area of one 4 KB array

  int arrays() const { return banks * arrays_per_bank; }

  /// The measured configuration: a single 4 KB array.
  static GeometryParams single_array() {
    GeometryParams g;
    g.banks = 1;
    g.arrays_per_bank = 1;
    return g;
  }
};

/// Multiplicative factors from the measured node to a target node.
struct ScalingFactors {
  std::string node = "180nm";
  double energy_ratio = 1.0;
  double delay_ratio = 1.0;
  double area_ratio = 1.0;

  void validate() const {
    if (!(energy_ratio > 0 && delay_ratio > 0 && area_ratio > 0)) {
      throw DomainError("scaling factors for node '" + node + "' must be positive");
    }
  }

  /// Applying `a` then `b` equals applying compose(a, b).
  friend ScalingFactors compose(const ScalingFactors& a, const ScalingFactors& b) {
    return {b.node, a.energy_ratio * b.energy_ratio, a.delay_ratio * b.delay_ratio,
            a.area_ratio * b.area_ratio};
  }
};

struct MetricsReport {
  std::string node = "180nm";
  double mac_energy_pj = 0.0;
  double frequency_hz = 0.0;
  double throughput_gops = 0.0;
  double area_mm2 = 0.0;
  double power_mw = 0.0;
  double tops_per_w = 0.0;
  double gops_per_mm2 = 0.0;
};

/// (mult + accum) x word_bits, in pJ.
inline double mac_energy_pj(const EnergyParams& p, MultMode mode, int word_bits) {
  if (word_bits < 1) throw DomainError("word_bits must be >= 1");
  p.validate();
  const double mult = mode == MultMode::kVmm ? p.mult_vmm_fj_per_bit : p.mult_single_fj_per_bit;
  return (mult + p.accum_fj_per_bit) * word_bits / 1000.0;
}

/// arrays x (cols / word_bits) MACs per cycle x 2 ops x f.
inline double throughput_gops(const GeometryParams& g) {
  if (g.word_bits < 1) throw DomainError("word_bits must be >= 1");
  const double macs_per_cycle = static_cast<double>(g.arrays()) * (g.cols / g.word_bits);
  return macs_per_cycle * 2.0 * g.frequency_hz / 1e9;
}

struct EfficiencyInputs {
  std::string node = "180nm";
  double throughput_gops = 0.0;
  double mac_energy_pj = 0.0;
  double area_mm2 = 0.0;
  double frequency_hz = 0.0;
};

inline MetricsReport efficiency(const EfficiencyInputs& in) {
  if (!(in.area_mm2 > 0)) throw DomainError("area must be positive");
  if (!(in.mac_energy_pj > 0)) throw DomainError("MAC energy must be positive");
  MetricsReport r;
  r.node = in.node;
  r.mac_energy_pj = in.mac_energy_pj;
  r.frequency_hz = in.frequency_hz;
  r.throughput_gops = in.throughput_gops;
  r.area_mm2 = in.area_mm2;
  r.tops_per_w = 2.0 / in.mac_energy_pj;  // 2 ops per pJ-MAC == TOPS/W
  r.gops_per_mm2 = in.throughput_gops / in.area_mm2;
  // MAC/s x J/MAC
  r.power_mw = in.throughput_gops * 1e9 / 2.0 * in.mac_energy_pj * 1e-12 * 1e3;
  return r;
}

/// Metrics of an engine at the measured node.
inline MetricsReport metrics(const EnergyParams& p, const GeometryParams& g, MultMode mode = MultMode::kVmm) {
  return efficiency({"180nm", throughput_gops(g), mac_energy_pj(p, mode, g.word_bits),
                     g.area_mm2_per_array * g.arrays(), g.frequency_hz});
}

inline MetricsReport scale_to_node(const MetricsReport& r, const ScalingFactors& f) {
  f.validate();
  return efficiency({f.node, r.throughput_gops / f.delay_ratio, r.mac_energy_pj * f.energy_ratio,
                     r.area_mm2 * f.area_ratio, r.frequency_hz / f.delay_ratio});
}

/// Energy estimate of a dataflow run, by component, in fJ. Every AND,
/// accumulation and input read touches a full 256-bit row. Writes are not
/// charged.
struct WorkloadEnergy {
  MultMode mode = MultMode::kVmm;
  double mult_fj = 0.0;
  double accum_fj = 0.0;
  double read_fj = 0.0;

  double total_fj() const { return mult_fj + accum_fj + read_fj; }
};

inline WorkloadEnergy workload_energy(const dataflow::ScheduleStats& s, const EnergyParams& p,
                                      MultMode mode = MultMode::kVmm, int row_bits = 256) {
  p.validate();
  const double mult = mode == MultMode::kVmm ? p.mult_vmm_fj_per_bit : p.mult_single_fj_per_bit;
  WorkloadEnergy e;
  e.mode = mode;
  e.mult_fj = static_cast<double>(s.and_ops) * mult * row_bits;
  e.accum_fj = static_cast<double>(s.accumulator_invocations) * p.accum_fj_per_bit * row_bits;
  e.read_fj = static_cast<double>(s.input_reads) * p.read_fj_per_bit * row_bits;
  return e;
}

// ---------------------------------------------------------------------------
// Configuration file: `key = value` lines, '#' comments.
//
//   energy.read_fj_per_bit, energy.mult_single_fj_per_bit,
//   energy.mult_vmm_fj_per_bit, energy.accum_fj_per_bit
//   geometry.rows, geometry.cols, geometry.arrays_per_bank, geometry.banks,
//   geometry.frequency_hz, geometry.word_bits, geometry.area_mm2_per_array
//   scale.<node>.energy_ratio, scale.<node>.delay_ratio, scale.<node>.area_ratio

struct PerfConfig {
  EnergyParams energy;
  GeometryParams geometry;
  std::map<std::string, ScalingFactors> nodes;

  const ScalingFactors& node(const std::string& name) const {
    auto it = nodes.find(name);
    if (it == nodes.end()) throw ValidationError("no scaling factors for node '" + name + "'");
    return it->second;
  }
};

/// Factors solved from the published 180nm -> 22nm pairs: 0.891 -> 89.5
/// TOPS/W, 50 -> 372 MHz, 3.2 GOPS / 0.804241 mm^2 -> 3.28 TOPS/mm^2.
inline ScalingFactors default_22nm() { return {"22nm", 0.0099529524, 0.1344086022, 0.0090253252}; }

inline PerfConfig default_config() {
  PerfConfig c;
  c.nodes.emplace("22nm", default_22nm());
  return c;
}

inline PerfConfig parse_config(std::string_view text) {
  PerfConfig c;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
    } catch (const std::logic_error&) {
      throw ParseError("config line " + std::to_string(line_no) + ": bad number '" + raw + "'");
    }
    auto as_int = [&] {
      if (v != std::floor(v)) throw ParseError("config key " + key + " needs an integer");
      return static_cast<int>(v);
    };
    if (key == "energy.read_fj_per_bit") c.energy.read_fj_per_bit = v;
    else if (key == "energy.mult_single_fj_per_bit") c.energy.mult_single_fj_per_bit = v;
    else if (key == "energy.mult_vmm_fj_per_bit") c.energy.mult_vmm_fj_per_bit = v;
    else if (key == "energy.accum_fj_per_bit") c.energy.accum_fj_per_bit = v;
    else if (key == "geometry.rows") c.geometry.rows = as_int();
    else if (key == "geometry.cols") c.geometry.cols = as_int();
    else if (key == "geometry.arrays_per_bank") c.geometry.arrays_per_bank = as_int();
    else if (key == "geometry.banks") c.geometry.banks = as_int();
    else if (key == "geometry.frequency_hz") c.geometry.frequency_hz = v;
    else if (key == "geometry.word_bits") c.geometry.word_bits = as_int();
    else if (key == "geometry.area_mm2_per_array") c.geometry.area_mm2_per_array = v;
    else if (key.rfind("scale.", 0) == 0) {
      const auto dot = key.rfind('.');
      const std::string node = key.substr(6, dot - 6);
      const std::string field = key.substr(dot + 1);
      if (node.empty() || dot <= 6) throw ParseError("config key " + key + " lacks a node name");
      auto& f = c.nodes[node];
      f.node = node;
      if (field == "energy_ratio") f.energy_ratio = v;
      else if (field == "delay_ratio") f.delay_ratio = v;
      else if (field == "area_ratio") f.area_ratio = v;
      else throw ParseError("unknown scaling field '" + field + "'");
    } else {
      throw ParseError("unknown config key '" + key + "'");
    }
  }
  c.energy.validate();
  for (const auto& [name, f] : c.nodes) f.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Report output

inline std::string metrics_csv(const std::vector<MetricsReport>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "node,frequency_mhz,power_mw,throughput_gops,mac_energy_pj,tops_per_w,gops_per_mm2,area_mm2\n";
  for (const auto& r : rows) {
    out << r.node << ',' << r.frequency_hz / 1e6 << ',' << r.power_mw << ',' << r.throughput_gops << ','
        << r.mac_energy_pj << ',' << r.tops_per_w << ',' << r.gops_per_mm2 << ',' << r.area_mm2 << '\n';
  }
  return out.str();
}

/// Human-readable table with the comparison-table row labels.
inline std::string metrics_table(const std::vector<MetricsReport>& rows) {
  std::ostringstream out;
  auto line = [&](std::string_view label, auto value_of) {
    out << std::left << std::setw(30) << label;
    for (const auto& r : rows) out << std::setw(16) << value_of(r);
    out << '\n';
  };
  auto fmt = [](double v, int prec) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
  };
  line("Technology", [](const MetricsReport& r) { return r.node; });
  line("Data Format", [](const MetricsReport&) { return std::string("BP8"); });
  line("Frequency (MHz)", [&](const MetricsReport& r) { return fmt(r.frequency_hz / 1e6, 1); });
  line("Power (mW)", [&](const MetricsReport& r) { return fmt(r.power_mw, 3); });
  line("Throughput (TOPS)", [&](const MetricsReport& r) { return fmt(r.throughput_gops / 1e3, 4); });
  line("Throughput (GOPS)", [&](const MetricsReport& r) { return fmt(r.throughput_gops, 3); });
  line("Energy per MAC (pJ)", [&](const MetricsReport& r) { return fmt(r.mac_energy_pj, 5); });
  line("Energy Efficiency (TOPS/W)", [&](const MetricsReport& r) { return fmt(r.tops_per_w, 3); });
  line("Area Efficiency (TOPS/mm^2)", [&](const MetricsReport& r) { return fmt(r.gops_per_mm2 / 1e3, 4); });
  line("Area Efficiency (GOPS/mm^2)", [&](const MetricsReport& r) { return fmt(r.gops_per_mm2, 3); });
  return out.str();
}

}  // namespace oisma::perf
