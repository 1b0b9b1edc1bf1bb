#include "qcsb/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <toml.hpp>

namespace qcsb {

namespace {

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace

ExperimentConfig default_config(NuRegime regime) {
  ExperimentConfig c;
  c.spin_hamiltonian = pauli_z();
  c.coupling = pauli_x();
  c.omega = {1.0};
  c.form_factor = ModeVector::Constant(1, Complex(1.0, 0.0));
  c.regime = regime;
  c.gamma0 = ComplexMatrix::Zero(2, 2);
  c.gamma0(0, 0) = 1.0;
  c.atoms = {AtomSpec{1.0, ModeVector::Constant(1, Complex(1.0, 0.0)), std::nullopt}};
  c.epsilons = {0.25, 0.125, 0.0625, 0.03125};
  c.times = {0.5, 1.0, 2.0};
  return c;
}

// ---------------------------------------------------------------------------
// TOML decoding

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw PreconditionError("config: " + key + ": " + what);
}

double as_double(const toml::node& node, const std::string& key) {
  if (auto v = node.value<double>()) return *v;
  fail(key, "expected a number");
}

Complex as_complex(const toml::node& node, const std::string& key) {
  if (node.is_number()) return {as_double(node, key), 0.0};
  const auto* arr = node.as_array();
  if (arr == nullptr || arr->size() != 2) fail(key, "expected a number or an [re, im] pair");
  return {as_double(*arr->get(0), key), as_double(*arr->get(1), key)};
}

const toml::array& as_array(const toml::node* node, const std::string& key) {
  if (node == nullptr) fail(key, "missing");
  const auto* arr = node->as_array();
  if (arr == nullptr) fail(key, "expected an array");
  return *arr;
}

std::vector<double> doubles(const toml::node* node, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : as_array(node, key)) out.push_back(as_double(item, key));
  return out;
}

ModeVector mode_vector(const toml::node* node, const std::string& key) {
  const auto& arr = as_array(node, key);
  ModeVector out(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t j = 0; j < arr.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = as_complex(*arr.get(j), key);
  }
  return out;
}

ComplexMatrix matrix(const toml::node* node, const std::string& key) {
  const auto& rows = as_array(node, key);
  if (rows.empty()) fail(key, "empty matrix");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  Eigen::Index n_cols = -1;
  ComplexMatrix out;
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const auto& row = as_array(rows.get(static_cast<std::size_t>(i)), key);
    if (n_cols < 0) {
      n_cols = static_cast<Eigen::Index>(row.size());
      out.resize(n_rows, n_cols);
    } else if (static_cast<Eigen::Index>(row.size()) != n_cols) {
      fail(key, "ragged matrix rows");
    }
    for (Eigen::Index j = 0; j < n_cols; ++j) {
      out(i, j) = as_complex(*row.get(static_cast<std::size_t>(j)), key);
    }
  }
  return out;
}

std::uint64_t non_negative(const toml::table& table, const char* name, const std::string& key,
                           std::int64_t fallback) {
  const toml::node* node = table.get(name);
  if (node == nullptr) return static_cast<std::uint64_t>(fallback);
  const auto v = node->value<std::int64_t>();
  if (!v || *v < 0) fail(key, "expected a non-negative integer");
  return static_cast<std::uint64_t>(*v);
}

const toml::table& section(const toml::table& root, const char* name) {
  const auto* t = root[name].as_table();
  if (t == nullptr) fail(name, "missing section");
  return *t;
}

}  // namespace

ExperimentConfig parse_config(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw PreconditionError(msg.str());
  }

  ExperimentConfig c;
  const auto& model = section(root, "model");
  c.spin_hamiltonian = matrix(model.get("spin_hamiltonian"), "model.spin_hamiltonian");
  c.coupling = matrix(model.get("coupling"), "model.coupling");
  c.omega = doubles(model.get("omega"), "model.omega");
  c.form_factor = mode_vector(model.get("form_factor"), "model.form_factor");
  c.regime = parse_nu_regime(model["nu_regime"].value_or<std::string>("stationary"));

  const auto& initial = section(root, "initial");
  c.gamma0 = matrix(initial.get("gamma"), "initial.gamma");
  const std::string kind = initial["kind"].value_or<std::string>("atoms");
  if (kind == "atoms") {
    for (const auto& node : as_array(initial.get("atoms"), "initial.atoms")) {
      const auto* t = node.as_table();
      if (t == nullptr) fail("initial.atoms", "expected tables");
      AtomSpec a;
      a.weight = (*t)["weight"].value_or(1.0);
      a.z = mode_vector(t->get("z"), "initial.atoms.z");
      if (t->contains("gamma")) a.gamma = matrix(t->get("gamma"), "initial.atoms.gamma");
      c.atoms.push_back(std::move(a));
    }
  } else if (kind == "gaussian") {
    GaussianSpec g;
    g.variances = doubles(initial.get("variances"), "initial.variances");
    g.samples = non_negative(initial, "samples", "initial.samples", 8);
    c.gaussian = std::move(g);
  } else {
    fail("initial.kind", "expected 'atoms' or 'gaussian'");
  }

  const auto& sweep = section(root, "sweep");
  c.epsilons = doubles(sweep.get("epsilons"), "sweep.epsilons");
  c.times = doubles(sweep.get("times"), "sweep.times");
  if (sweep.contains("cutoffs")) {
    for (const auto& row : as_array(sweep.get("cutoffs"), "sweep.cutoffs")) {
      std::vector<int> r;
      for (const auto& item : as_array(&row, "sweep.cutoffs")) {
        auto v = item.value<std::int64_t>();
        if (!v || *v < 1 || *v > 1'000'000) fail("sweep.cutoffs", "expected positive integers");
        r.push_back(static_cast<int>(*v));
      }
      c.cutoffs.push_back(std::move(r));
    }
  }
  c.steps = non_negative(sweep, "steps", "sweep.steps", 0);
  c.grid_per_unit = non_negative(sweep, "grid_per_unit", "sweep.grid_per_unit", 64);
  if (sweep.contains("eta_grid")) {
    for (const auto& row : as_array(sweep.get("eta_grid"), "sweep.eta_grid")) {
      c.eta_grid.push_back(mode_vector(&row, "sweep.eta_grid"));
    }
  }
  c.seed = non_negative(sweep, "seed", "sweep.seed", 1);
  c.tail_target = sweep["tail_target"].value_or(1e-10);

  if (const auto* out = root["output"].as_table()) {
    c.output_dir = (*out)["directory"].value_or<std::string>("out");
    c.prefix = (*out)["prefix"].value_or<std::string>("sweep");
    c.record_timings = (*out)["record_timings"].value_or(true);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::size_t mode_count(const ExperimentConfig& config) { return config.omega.size(); }

void validate(const ExperimentConfig& config) {
  validate(effective_model(config));
  if (config.spin_hamiltonian.rows() < 2) {
    throw DimensionError("config: spin dimension must be at least 2");
  }
  if (config.gamma0.rows() != config.spin_hamiltonian.rows() ||
      config.gamma0.cols() != config.spin_hamiltonian.cols()) {
    throw DimensionError("config: initial.gamma has the wrong dimension");
  }
  if (config.atoms.empty() == !config.gaussian.has_value()) {
    throw PreconditionError("config: give either explicit atoms or a Gaussian sampler");
  }
  if (config.epsilons.empty()) throw PreconditionError("config: epsilon grid is empty");
  for (std::size_t i = 0; i < config.epsilons.size(); ++i) {
    if (!(config.epsilons[i] > 0.0)) throw PreconditionError("config: epsilons must be positive");
    if (i > 0 && !(config.epsilons[i] < config.epsilons[i - 1])) {
      throw PreconditionError("config: epsilon grid must be strictly decreasing");
    }
  }
  if (config.times.empty()) throw PreconditionError("config: time grid is empty");
  for (double t : config.times) {
    if (!(t > 0.0) || !std::isfinite(t)) throw PreconditionError("config: times must be positive");
  }
  if (!config.cutoffs.empty()) {
    if (config.cutoffs.size() != config.epsilons.size()) {
      throw PreconditionError("config: sweep.cutoffs needs one row per epsilon");
    }
    for (const auto& row : config.cutoffs) {
      if (row.size() != mode_count(config)) {
        throw DimensionError("config: sweep.cutoffs rows need one entry per mode");
      }
    }
  }
  if (config.grid_per_unit < 2) throw PreconditionError("config: grid_per_unit must be >= 2");
  for (const auto& eta : config.eta_grid) {
    if (static_cast<std::size_t>(eta.size()) != mode_count(config)) {
      throw DimensionError("config: eta grid points need one entry per mode");
    }
  }
  if (!(config.tail_target > 0.0)) throw PreconditionError("config: tail_target must be positive");
  const StateValuedMeasure measure = initial_measure(config);
  if (std::abs(total_mass(measure) - 1.0) > 1e-12) {
    throw PreconditionError("config: initial atoms must carry total weight 1");
  }
  // Safety margin for explicit cutoffs is checked when the state is prepared.
}

StateValuedMeasure initial_measure(const ExperimentConfig& config) {
  if (config.gaussian) {
    return sample_gaussian_measure(mode_count(config), config.gaussian->variances, config.gamma0,
                                   config.gaussian->samples, config.seed);
  }
  std::vector<Atom> atoms;
  atoms.reserve(config.atoms.size());
  for (const AtomSpec& a : config.atoms) {
    if (static_cast<std::size_t>(a.z.size()) != mode_count(config)) {
      throw DimensionError("config: atom point has the wrong number of modes");
    }
    atoms.push_back({a.weight, a.z, a.gamma.value_or(config.gamma0)});
  }
  return StateValuedMeasure(std::move(atoms));
}

std::vector<ModeVector> eta_grid(const ExperimentConfig& config) {
  if (!config.eta_grid.empty()) return config.eta_grid;
  const auto m = static_cast<Eigen::Index>(mode_count(config));
  std::vector<ModeVector> grid;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Complex direction : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
      for (double r : {0.25, 0.5, 1.0, 2.0}) {
        ModeVector eta = ModeVector::Zero(m);
        eta[j] = r * direction;
        grid.push_back(std::move(eta));
      }
    }
  }
  return grid;
}

std::vector<int> cutoffs_for(const ExperimentConfig& config, const StateValuedMeasure& measure,
                             double epsilon) {
  if (!config.cutoffs.empty()) {
    const auto it = std::find(config.epsilons.begin(), config.epsilons.end(), epsilon);
    if (it == config.epsilons.end()) {
      throw PreconditionError("config: no explicit cutoffs for epsilon " + std::to_string(epsilon));
    }
    return config.cutoffs[static_cast<std::size_t>(it - config.epsilons.begin())];
  }
  const std::size_t m = mode_count(config);
  const double t_max = *std::max_element(config.times.begin(), config.times.end());
  const double coupling_norm = herm_eig(config.coupling).eigenvalues.cwiseAbs().maxCoeff();
  const double nu_eps = nu_of_epsilon(config.regime, epsilon);
  const std::vector<ModeVector> etas = eta_grid(config);
  std::vector<int> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    double z_max = 0.0;
    for (const Atom& a : measure.atoms()) z_max = std::max(z_max, std::abs(a.point[jj]));
    double eta_max = 0.0;
    for (const ModeVector& eta : etas) eta_max = std::max(eta_max, std::abs(eta[jj]));
    // drift of the mode amplitude driven by s (x) phi(g), bounded by the
    // linear growth and by the oscillation amplitude
    const double field_freq = nu_eps * epsilon * config.omega[j];
    const double drift_time = std::min(t_max, 2.0 / field_freq);
    const double drift = coupling_norm * std::abs(config.form_factor[jj]) * drift_time;
    const double amplitude = (z_max + epsilon * (eta_max + drift)) / std::sqrt(epsilon);
    const int by_margin = static_cast<int>(std::ceil(4.0 * z_max * z_max / epsilon));
    out[j] = std::max({by_margin, safe_cutoff(amplitude * amplitude, config.tail_target), 4});
  }
  return out;
}

SpinBosonModel microscopic_model(const ExperimentConfig& config, const FockSpace& fock) {
  SpinBosonModel model{config.spin_hamiltonian, config.coupling, Dispersion(config.omega),
                       config.form_factor, config.regime, fock};
  validate(model);
  return model;
}

EffectiveModel effective_model(const ExperimentConfig& config) {
  return {config.spin_hamiltonian, config.coupling, Dispersion(config.omega), config.form_factor,
          nu_limit(config.regime)};
}

}  // namespace qcsb
