#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qcsb/config.hpp"
#include "qcsb/harness.hpp"
#include "qcsb/json_io.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "TOML experiment config (default model when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "Output directory (overrides [output].directory)");
  cmd->add_option("--seed", opts.seed, "RNG seed (overrides [sweep].seed)");
  cmd->add_option("--threads", opts.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
}

qcsb::ExperimentConfig load(const CommonOptions& opts) {
  qcsb::ExperimentConfig config =
      opts.config_path.empty() ? qcsb::default_config() : qcsb::load_config(opts.config_path);
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  if (opts.seed) config.seed = *opts.seed;
  qcsb::validate(config);
  return config;
}

fs::path output_file(const qcsb::ExperimentConfig& config, const std::string& name) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
  std::cout << "wrote " << path.string() << '\n';
}

void write_json(const fs::path& path, const qcsb::Json& json) { write_text(path, json.dump(2) + "\n"); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-boson quasi-classical limit simulator"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* sim = app.add_subcommand("simulate", "Single (eps, t) run with state dumps (JSON)");
  add_common(sim, common);
  std::optional<double> sim_eps, sim_t;
  sim->add_option("--epsilon", sim_eps, "Semiclassical parameter (default: first grid value)");
  sim->add_option("--time", sim_t, "Evolution time (default: first grid value)");

  auto* sweep = app.add_subcommand("sweep", "Full eps sweep, CSV + JSON convergence report");
  add_common(sweep, common);

  auto* inv = app.add_subcommand("invariants", "Run the invariant suites and emit the ledger");
  add_common(inv, common);
  bool flip_alpha = false;
  inv->add_flag("--flip-alpha-sign", flip_alpha, "Negative control: mis-signed transport family");

  auto* four = app.add_subcommand("fourier", "Tabulate quantum and measure Fourier transforms over the eta grid");
  add_common(four, common);
  std::optional<double> four_eps, four_t;
  four->add_option("--epsilon", four_eps, "Semiclassical parameter (default: first grid value)");
  four->add_option("--time", four_t, "Evolution time (default: first grid value)");

  auto* trans = app.add_subcommand("transport", "Transport and Duhamel residuals under grid refinement");
  add_common(trans, common);
  double trans_t = 1.0;
  std::vector<std::size_t> trans_intervals{16, 32, 64, 128, 256};
  trans->add_option("--time", trans_t, "Length of the interval [0, t]")->check(CLI::PositiveNumber);
  trans->add_option("--intervals", trans_intervals, "Interval counts");

  CLI11_PARSE(app, argc, argv);

  try {
    const qcsb::ExperimentConfig config = load(common);

    if (sim->parsed()) {
      const double eps = sim_eps.value_or(config.epsilons.front());
      const double t = sim_t.value_or(config.times.front());
      write_json(output_file(config, config.prefix + "_simulate.json"), qcsb::simulate(config, eps, t));
      return 0;
    }

    if (sweep->parsed()) {
      const qcsb::ConvergenceReport report = qcsb::run_sweep(config, common.threads);
      write_text(output_file(config, config.prefix + ".csv"), qcsb::to_csv(report));
      write_json(output_file(config, config.prefix + ".json"), qcsb::to_json(report, config));
      for (const auto& fit : report.fits) {
        std::cout << "t=" << fit.t;
        if (fit.trace_distance_fitted) {
          std::cout << "  trace-distance order " << fit.trace_distance.slope << " (fit rms "
                    << fit.trace_distance.residual << ")";
        }
        std::cout << '\n';
      }
      for (const auto& row : report.rows) {
        if (!row.trusted) {
          std::cout << "untrusted: eps=" << row.epsilon << " t=" << row.t << " tail=" << row.tail_mass << '\n';
        }
      }
      return 0;
    }

    if (inv->parsed()) {
      qcsb::InvariantOptions options;
      options.flip_alpha_sign = flip_alpha;
      const qcsb::InvariantLedger ledger = qcsb::check_invariants(config, options);
      for (const auto& e : ledger.entries) {
        std::cout << (e.passed ? "PASS " : "FAIL ") << e.suite << ": " << e.check << "  value=" << e.value
                  << " threshold=" << e.threshold << '\n';
      }
      write_json(output_file(config, config.prefix + "_invariants.json"), qcsb::to_json(ledger));
      return ledger.all_passed() ? 0 : 1;
    }

    if (four->parsed()) {
      const double eps = four_eps.value_or(config.epsilons.front());
      const double t = four_t.value_or(config.times.front());
      const auto table = qcsb::fourier_table(config, eps, t);
      write_text(output_file(config, config.prefix + "_fourier.csv"), qcsb::fourier_csv(table, eps, t));
      return 0;
    }

    if (trans->parsed()) {
      const auto rows = qcsb::transport_study(config, trans_t, trans_intervals);
      write_text(output_file(config, config.prefix + "_transport.csv"), qcsb::transport_csv(rows));
      std::vector<double> tr, du;
      for (const auto& r : rows) {
        tr.push_back(r.transport_residual);
        du.push_back(r.duhamel_residual);
      }
      const auto tr_orders = qcsb::observed_orders(tr);
      const auto du_orders = qcsb::observed_orders(du);
      for (std::size_t i = 0; i < tr_orders.size(); ++i) {
        std::cout << rows[i].intervals << "->" << rows[i + 1].intervals << "  transport order " << tr_orders[i]
                  << "  duhamel order " << du_orders[i] << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
