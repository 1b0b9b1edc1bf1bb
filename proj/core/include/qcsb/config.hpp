#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcsb/fock_space.hpp"
#include "qcsb/linalg.hpp"
#include "qcsb/measures.hpp"
#include "qcsb/qc_dynamics.hpp"
#include "qcsb/spin_boson.hpp"

namespace qcsb {

struct AtomSpec {
  double weight = 1.0;
  ModeVector z;
  std::optional<ComplexMatrix> gamma;  // falls back to ExperimentConfig::gamma0
};

struct GaussianSpec {
  std::vector<double> variances;
  std::size_t samples = 8;
};

/// Everything a sweep needs. Parsed from TOML (see docs/config.md) or built in
/// code; `validate` enforces the cross-field invariants.
struct ExperimentConfig {
  // [model]
  ComplexMatrix spin_hamiltonian;
  ComplexMatrix coupling;
  std::vector<double> omega;
  ModeVector form_factor;
  NuRegime regime = NuRegime::Stationary;

  // [initial]
  ComplexMatrix gamma0;
  std::vector<AtomSpec> atoms;
  std::optional<GaussianSpec> gaussian;

  // [sweep]
  std::vector<double> epsilons;
  std::vector<double> times;
  std::vector<std::vector<int>> cutoffs;  // one row per epsilon; empty means auto
  std::size_t steps = 0;                  // effective integrator steps per unit time; 0 means auto
  std::size_t grid_per_unit = 64;         // Duhamel/transport quadrature intervals per unit time
  std::vector<ModeVector> eta_grid;       // empty means two rays per mode
  std::uint64_t seed = 1;
  double tail_target = 1e-10;

  // [output]
  std::string output_dir = "out";
  std::string prefix = "sweep";
  bool record_timings = true;
};

/// 2-level model S = sigma_z, s = sigma_x, one mode with omega = 1, g = 1,
/// single coherent atom z = 1 carrying |0><0|, eps in {1/4, 1/8, 1/16, 1/32},
/// t in {0.5, 1, 2}.
ExperimentConfig default_config(NuRegime regime = NuRegime::Stationary);

ExperimentConfig parse_config(std::string_view toml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

void validate(const ExperimentConfig& config);

std::size_t mode_count(const ExperimentConfig& config);

/// The configured atoms, or the Gaussian sample drawn with config.seed.
StateValuedMeasure initial_measure(const ExperimentConfig& config);

/// Configured eta grid or the default: per mode, the points r e_j and
/// i r e_j for r in {0.25, 0.5, 1, 2}.
std::vector<ModeVector> eta_grid(const ExperimentConfig& config);

/// Per-mode cutoffs at eps: explicit when configured, otherwise the smallest
/// n_j with n_j >= 4 max|z_j|^2/eps whose Poisson tail at the widened
/// amplitude (initial amplitude plus eta shift plus coupling drift, all in
/// units of sqrt(eps)) stays below tail_target.
std::vector<int> cutoffs_for(const ExperimentConfig& config, const StateValuedMeasure& measure,
                             double epsilon);

SpinBosonModel microscopic_model(const ExperimentConfig& config, const FockSpace& fock);
EffectiveModel effective_model(const ExperimentConfig& config);

}  // namespace qcsb
