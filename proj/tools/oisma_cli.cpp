// oisma: command-line front end for the OISMA library.
//
//   oisma dataset validate|dump [<path>]
//   oisma grid
//   oisma netlist [counter16|converter64|periphery256]
//   oisma bench mapping|multiply|matmul [--dims ..] [--trials ..] [--seed ..]
//   oisma simulate --inputs x.csv --weights q.csv[,k.csv,v.csv] | --demo
//   oisma metrics [--node 22nm] [--config file]
//
// Exit codes: 0 success, 1 validation failure, 2 usage error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oisma/oisma.hpp"

namespace {

namespace fs = std::filesystem;
using namespace oisma;

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bp::BpDataset dataset_from(const std::string& path) {
  if (path.empty() || path == "default") return bp::default_dataset();
  return bp::load_dataset(read_file(path));
}

/// Writes `body` to <out>/<name> when an output directory is set.
void emit_file(const std::string& out_dir, const std::string& name, const std::string& body) {
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
  if (!f) throw UsageError("cannot write to '" + out_dir + "'");
  f << body;
}

void emit_metadata(const std::string& out_dir, const bench::BenchConfig& cfg, const std::string& command) {
  if (out_dir.empty()) return;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream m;
  m << "command " << command << "\nseed " << cfg.seed << "\ndataset " << cfg.dataset_label
    << "\ndataset_fnv1a " << std::hex << bench::dataset_hash(cfg.dataset) << std::dec
    << "\ntrials " << cfg.trials << "\ntimestamp " << now << '\n';
  emit_file(out_dir, command + "_metadata.txt", m.str());
}

std::string percent(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(4);
  s << v * 100.0 << '%';
  return s.str();
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream ss(text);
  for (std::string f; std::getline(ss, f, ',');) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(f, &used);
      if (used != f.size() || v < 1) throw std::invalid_argument(f);
      dims.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw UsageError("bad dimension '" + f + "' in --dims");
    }
  }
  if (dims.empty()) throw UsageError("--dims is empty");
  return dims;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string f; std::getline(ss, f, ',');) {
    if (!f.empty()) out.push_back(f);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OISMA in-memory stochastic multiplication simulator"};
  app.require_subcommand(1);

  std::string dataset_path = "default";
  std::string out_dir;
  bool as_csv = false;
  bool as_table = false;
  app.add_option("--dataset", dataset_path, "BP10 dataset file (or 'default')");
  app.add_option("--out", out_dir, "directory for CSV output");
  auto* csv_flag = app.add_flag("--csv", as_csv, "print CSV to stdout");
  app.add_flag("--table", as_table, "print a human-readable summary (default)")->excludes(csv_flag);

  // dataset
  auto* ds = app.add_subcommand("dataset", "validate or dump a BP10 dataset");
  ds->require_subcommand(1);
  std::string ds_path;
  auto* ds_validate = ds->add_subcommand("validate", "check a dataset file against every invariant");
  ds_validate->add_option("path", ds_path, "dataset file")->required();
  auto* ds_dump = ds->add_subcommand("dump", "print a dataset in file format");
  ds_dump->add_option("path", ds_path, "dataset file (default: built-in)");

  auto* grid = app.add_subcommand("grid", "dump the FP8 E4M3 positive grid as CSV");

  auto* net = app.add_subcommand("netlist", "dump an accumulation-periphery netlist");
  std::string net_name = "counter16";
  net->add_option("structure", net_name, "counter16 | converter64 | periphery256")
      ->check(CLI::IsMember({"counter16", "converter64", "periphery256"}));

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "accuracy benchmarks");
  bench_cmd->require_subcommand(1);
  auto* b_map = bench_cmd->add_subcommand("mapping", "FP8/BP10 mapping error over the normalized grid");
  auto* b_mul = bench_cmd->add_subcommand("multiply", "FP8/BP10 error over all 14,161 grid products");
  auto* b_mm = bench_cmd->add_subcommand("matmul", "relative Frobenius error of N x N MatMul");
  std::string dims_text = "4,8,16,32,64,128,256,512";
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  bool allow_large = false;
  bool no_fp8 = false;
  unsigned workers = 0;
  b_mm->add_option("--dims", dims_text, "comma-separated N values");
  b_mm->add_option("--trials", trials, "trials per dimension")->check(CLI::PositiveNumber);
  b_mm->add_option("--seed", seed, "64-bit seed");
  b_mm->add_option("--workers", workers, "worker threads (0 = all cores)");
  b_mm->add_flag("--allow-large", allow_large, "lift the N*N*trials work cap");
  b_mm->add_flag("--no-fp8", no_fp8, "skip the FP8 reference MatMul");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a MatMul through placement + array execution");
  std::string inputs_path, weights_list;
  bool demo = false;
  std::size_t trace_limit = 12;
  int banks = 64;
  sim->add_option("--inputs", inputs_path, "input matrix CSV");
  sim->add_option("--weights", weights_list, "comma-separated weight matrix CSVs");
  sim->add_flag("--demo", demo, "use the built-in Q/K/V broadcast example");
  sim->add_option("--trace-limit", trace_limit, "number of control traces to print");
  sim->add_option("--banks", banks, "banks in the engine (4 arrays each)")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "seed for --demo");

  // metrics
  auto* met = app.add_subcommand("metrics", "energy / throughput / area efficiency report");
  std::vector<std::string> nodes;
  std::string config_path;
  met->add_option("--node", nodes, "target node(s) to scale to, e.g. 22nm");
  met->add_option("--config", config_path, "performance config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ds) {
      if (*ds_validate) {
        // Lists every violation rather than stopping at the first.
        const bp::BpDataset d = bp::parse_dataset(read_file(ds_path));
        const auto v = bp::validate_dataset(d);
        if (v.empty()) {
          std::cout << "ok: " << ds_path << " satisfies every BP10 dataset invariant\n";
          return 0;
        }
        for (const auto& s : v) std::cout << "violation: " << s << '\n';
        return kExitValidation;
      }
      std::cout << bp::dump_dataset(dataset_from(ds_path.empty() ? dataset_path : ds_path));
      return 0;
    }

    if (*grid) {
      const auto csv = fp8::dump_grid_csv();
      emit_file(out_dir, "fp8_grid.csv", csv);
      std::cout << csv;
      return 0;
    }

    if (*net) {
      const auto s = net_name == "counter16"     ? accum::Structure::kCounter16
                     : net_name == "converter64" ? accum::Structure::kConverter64
                                                 : accum::Structure::kPeriphery256;
      const auto& n = accum::netlist(s);
      const auto& st = n.stats();
      std::cout << "# " << net_name << ": " << n.input_width() << " -> " << n.output_width() << " bits, "
                << st.full_adders << " FA, " << st.half_adders << " HA, " << st.parallel_counters
                << " counters, " << st.converters << " converters, " << st.multibit_adders()
                << " multi-bit adders\n"
                << n.dump();
      return 0;
    }

    bench::BenchConfig cfg;
    cfg.seed = seed;
    cfg.dataset = dataset_from(dataset_path);
    cfg.dataset_label = dataset_path;

    if (*bench_cmd) {
      if (*b_map) {
        const auto rep = bench::bench_mapping(cfg);
        emit_file(out_dir, "mapping.csv", rep.csv());
        emit_metadata(out_dir, cfg, "mapping");
        if (as_csv) {
          std::cout << rep.csv();
        } else {
          std::cout << "mapping over " << rep.rows.size() << " normalized FP8 values\n"
                    << "  FP8  average absolute error  " << percent(rep.fp8_mean_abs) << '\n'
                    << "  BP10 average absolute error  " << percent(rep.bp10_mean_abs) << '\n'
                    << "  BP10 (clamped to 0.9)        " << percent(rep.bp10_encoded_mean_abs) << '\n';
        }
        return 0;
      }
      if (*b_mul) {
        const auto rep = bench::bench_multiply(cfg);
        emit_file(out_dir, "multiply.csv", rep.csv());
        emit_metadata(out_dir, cfg, "multiply");
        if (as_csv) {
          std::cout << rep.csv();
        } else {
          std::cout << "multiplication over " << rep.rows.size() << " operand pairs\n"
                    << "  FP8  average absolute error  " << percent(rep.fp8_mean_abs) << '\n'
                    << "  BP10 average absolute error  " << percent(rep.bp_mean_abs) << '\n'
                    << "  BP10 average signed error    " << percent(rep.bp_mean_signed) << '\n';
        }
        return 0;
      }
      if (*b_mm) {
        cfg.dims = parse_dims(dims_text);
        cfg.trials = trials;
        cfg.allow_large = allow_large;
        cfg.include_fp8 = !no_fp8;
        cfg.workers = workers;
        const auto rep = bench::bench_matmul(cfg);
        emit_file(out_dir, "matmul.csv", rep.csv());
        emit_file(out_dir, "matmul_summary.csv", rep.summary_csv());
        emit_metadata(out_dir, cfg, "matmul");
        if (as_csv) {
          std::cout << rep.csv();
        } else {
          std::cout << "mean relative Frobenius error (" << cfg.trials << " trials, seed " << cfg.seed << ")\n";
          std::cout << "       N         FP8          BP\n";
          for (const auto& s : rep.summary) {
            std::cout << std::setw(8) << s.dim << std::setw(12) << (cfg.include_fp8 ? percent(s.fp8_mean) : "-")
                      << std::setw(12) << percent(s.bp_mean) << '\n';
          }
        }
        return 0;
      }
    }

    if (*sim) {
      MatrixReal x;
      std::vector<MatrixReal> weights;
      if (demo) {
        auto [dx, dw] = bench::qkv_demo_operands(seed);
        x = std::move(dx);
        weights = std::move(dw);
      } else {
        if (inputs_path.empty() || weights_list.empty()) {
          throw UsageError("simulate needs --inputs and --weights (or --demo)");
        }
        x = matrix_from_csv(read_file(inputs_path));
        for (const auto& p : split_commas(weights_list)) weights.push_back(matrix_from_csv(read_file(p)));
      }
      dataflow::EngineGeometry geom;
      geom.banks = banks;
      const auto rep = bench::simulate_workload(x, weights, cfg.dataset, geom, {}, trace_limit);
      std::cout << rep.plan.dump() << "# control trace sample\n";
      for (const auto& t : rep.result.trace_sample) std::cout << t.to_text();
      std::cout << "# schedule\n" << rep.stats_text();
      for (std::size_t m = 0; m < rep.result.outputs.size(); ++m) {
        emit_file(out_dir, "output_" + std::to_string(m) + ".csv", to_csv(rep.result.outputs[m]));
      }
      return rep.matches_reference ? 0 : kExitValidation;
    }

    if (*met) {
      const auto pc = config_path.empty() ? perf::default_config() : perf::parse_config(read_file(config_path));
      const auto rows = bench::report_metrics(pc, nodes);
      emit_file(out_dir, "metrics.csv", perf::metrics_csv(rows));
      std::cout << (as_csv ? perf::metrics_csv(rows) : perf::metrics_table(rows));
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const oisma::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
