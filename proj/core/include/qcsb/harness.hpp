#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcsb/config.hpp"
#include "qcsb/json_io.hpp"
#include "qcsb/measures.hpp"
#include "qcsb/spin_boson.hpp"

namespace qcsb {

/// Microscopic side of one sweep cell: the model at eps and the mixture
/// sum_i w_i gamma_i (x) |coherent z_i><coherent z_i|.
struct PreparedState {
  SpinBosonModel model;
  JointState state;
  double tail_mass = 0.0;  // max over atoms of the coherent mass cut off by the truncation
};

/// Throws PreconditionError when an atom violates the coherent-state safety
/// margin at this eps.
PreparedState prepare_microscopic(const ExperimentConfig& config, double epsilon);

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
};

/// Least-squares slope of log(error) against log(eps). Needs >= 3 pairs with
/// positive errors.
OrderFit fit_order(std::span<const std::pair<double, double>> pairs);

struct SweepRow {
  double epsilon = 0.0;
  double t = 0.0;
  double trace_distance = 0.0;
  double fourier_gap_max = 0.0;
  double number_moment_delta1 = 0.0;
  double number_moment_delta_half = 0.0;  // interaction picture, delta = 1/2
  double duhamel_residual = 0.0;
  double transport_residual = 0.0;
  double tail_mass = 0.0;
  double wall_ms = 0.0;
  bool trusted = true;  // tail_mass <= 0.1 * trace_distance
};

struct TimeFit {
  double t = 0.0;
  OrderFit trace_distance;
  OrderFit fourier_gap;
  bool trace_distance_fitted = false;
  bool fourier_gap_fitted = false;
};

struct ConvergenceReport {
  std::vector<SweepRow> rows;  // ordered by (epsilon index, time index)
  std::vector<TimeFit> fits;
  std::vector<double> initial_moment_half;  // per epsilon, t = 0
  std::vector<std::vector<int>> cutoffs;    // per epsilon
};

/// Runs every (eps, t) cell; eps values are processed on up to `threads`
/// workers and merged in grid order.
ConvergenceReport run_sweep(const ExperimentConfig& config, unsigned threads = 1);

/// Fixed column order: epsilon, t, trace_distance, fourier_gap_max,
/// number_moment_delta1, duhamel_residual, transport_residual, tail_mass, wall_ms.
std::string to_csv(const ConvergenceReport& report);
Json to_json(const ConvergenceReport& report, const ExperimentConfig& config);

struct InvariantEntry {
  std::string suite;
  std::string check;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct InvariantLedger {
  std::vector<InvariantEntry> entries;
  bool all_passed() const;
};

struct InvariantOptions {
  /// Negative control: generate the transport family with alpha of the wrong
  /// sign, so the transport suite must fail.
  bool flip_alpha_sign = false;
};

InvariantLedger check_invariants(const ExperimentConfig& config, const InvariantOptions& options = {});
Json to_json(const InvariantLedger& ledger);

/// Single (eps, t) run with state dumps.
Json simulate(const ExperimentConfig& config, double epsilon, double t);

struct FourierEntry {
  std::size_t eta_index = 0;
  ModeVector eta;
  ComplexMatrix quantum;
  ComplexMatrix measure;
  double gap = 0.0;  // trace norm of the difference
};

/// Gamma^_eps(t)(eta) against m^_t(eta) over the eta grid.
std::vector<FourierEntry> fourier_table(const ExperimentConfig& config, double epsilon, double t);
std::string fourier_csv(std::span<const FourierEntry> table, double epsilon, double t);

struct TransportStudyRow {
  std::size_t intervals = 0;
  double transport_residual = 0.0;  // max over the eta grid
  double duhamel_residual = 0.0;    // max over test operators, eta = 0 and the first grid point
};

/// Residuals over [0, t] for each interval count; Duhamel at the coarsest eps.
std::vector<TransportStudyRow> transport_study(const ExperimentConfig& config, double t,
                                               std::span<const std::size_t> intervals);
std::string transport_csv(std::span<const TransportStudyRow> rows);

/// Observed order log2(r_coarse / r_fine) for successive halvings.
std::vector<double> observed_orders(std::span<const double> residuals);

}  // namespace qcsb
