#include "qcsb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "qcsb/qc_dynamics.hpp"

namespace qcsb {

PreparedState prepare_microscopic(const ExperimentConfig& config, double epsilon) {
  const StateValuedMeasure measure = initial_measure(config);
  FockSpace fock(cutoffs_for(config, measure, epsilon), epsilon);
  SpinBosonModel model = microscopic_model(config, fock);
  const auto d = static_cast<Eigen::Index>(model.dimension());
  JointState state{ComplexMatrix::Zero(d, d), epsilon, 0.0};
  double tail = 0.0;
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const Atom& a = measure.atoms()[i];
    ComplexVector psi;
    try {
      psi = coherent_vector(fock, a.point);
    } catch (const PreconditionError& e) {
      throw PreconditionError("prepare_microscopic: atom " + std::to_string(i) + " at eps=" +
                              std::to_string(epsilon) + ": " + e.what());
    }
    state.rho += a.weight * kron(a.gamma, psi * psi.adjoint());
    tail = std::max(tail, coherent_tail_mass(fock, a.point));
  }
  state.rho /= state.rho.trace().real();
  return {std::move(model), std::move(state), tail};
}

OrderFit fit_order(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw PreconditionError("fit_order: need at least 3 (eps, error) pairs");
  const auto n = static_cast<double>(pairs.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [eps, err] : pairs) {
    if (!(eps > 0.0)) throw PreconditionError("fit_order: epsilon values must be positive");
    if (!(err > 0.0)) throw PreconditionError("fit_order: error values must be positive");
    sx += std::log(eps);
    sy += std::log(err);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [eps, err] : pairs) {
    const double dx = std::log(eps) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err) - my);
  }
  if (sxx == 0.0) throw PreconditionError("fit_order: epsilon values must not all coincide");
  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& [eps, err] : pairs) {
    const double r = std::log(err) - (fit.intercept + fit.slope * std::log(eps));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

namespace {

std::vector<double> uniform_grid(double t, std::size_t intervals) {
  std::vector<double> grid(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    grid[k] = t * static_cast<double>(k) / static_cast<double>(intervals);
  }
  grid.back() = t;
  return grid;
}

std::size_t intervals_for(const ExperimentConfig& config, double t) {
  return std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround(t * static_cast<double>(config.grid_per_unit))));
}

// The harness integrates the effective dynamics 8x finer than the default
// step rule so integrator error stays well below the eps-gap.
std::size_t effective_steps(const ExperimentConfig& config, const EffectiveModel& em,
                            const ModeVector& z, double t) {
  if (config.steps > 0) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(t * static_cast<double>(config.steps))));
  }
  return 8 * default_steps(em, z, 0.0, t);
}

StateValuedMeasure evolve_effective(const ExperimentConfig& config, const EffectiveModel& em,
                                    const StateValuedMeasure& initial, double t) {
  std::vector<Atom> atoms = initial.atoms();
  for (Atom& a : atoms) {
    const ComplexMatrix u = propagate(em, a.point, t, effective_steps(config, em, a.point, t)).unitary;
    a.gamma = u * a.gamma * u.adjoint();
    a.point = em.omega.free_flow(a.point, t, em.nu);
  }
  return StateValuedMeasure(std::move(atoms));
}

// Fixed midpoint substeps per quadrature interval keep the integrator step
// proportional to the grid spacing, so refinement studies see a clean order.
constexpr std::size_t kTransportSubsteps = 8;

double max_transport_residual(const EffectiveModel& em, std::span<const StateValuedMeasure> family,
                              std::span<const ModeVector> etas, double t) {
  double worst = transport_residual(em, family, ModeVector::Zero(em.form_factor.size()), 0.0, t);
  for (const ModeVector& eta : etas) {
    worst = std::max(worst, transport_residual(em, family, eta, 0.0, t));
  }
  return worst;
}

double max_duhamel_residual(const MicroscopicDynamics& dyn, std::span<const JointState> upsilons,
                            const std::vector<ModeVector>& etas) {
  const auto ops = default_test_operators(dyn.model().spin_dimension());
  double worst = 0.0;
  for (const ModeVector& eta : etas) {
    for (double r : duhamel_residuals(dyn, upsilons, eta, ops)) worst = std::max(worst, r);
  }
  return worst;
}

std::vector<ModeVector> duhamel_etas(const ExperimentConfig& config) {
  const auto grid = eta_grid(config);
  return {ModeVector::Zero(static_cast<Eigen::Index>(mode_count(config))), grid.front()};
}

struct EpsilonResult {
  std::vector<SweepRow> rows;
  double initial_moment_half = 0.0;
  std::vector<int> cutoffs;
};

EpsilonResult run_epsilon(const ExperimentConfig& config, double epsilon) {
  using Clock = std::chrono::steady_clock;
  const PreparedState prep = prepare_microscopic(config, epsilon);
  const MicroscopicDynamics dyn(prep.model);
  const EffectiveModel em = effective_model(config);
  const StateValuedMeasure m0 = initial_measure(config);
  const std::size_t ds = prep.model.spin_dimension();
  const auto etas = eta_grid(config);
  std::vector<ComplexMatrix> weyls;
  weyls.reserve(etas.size());
  for (const ModeVector& eta : etas) weyls.push_back(weyl_op(prep.model.fock, eta));

  EpsilonResult out;
  out.cutoffs = prep.model.fock.cutoffs();
  out.initial_moment_half = number_moment(prep.model.fock, ds, prep.state, 0.5);

  for (double t : config.times) {
    const auto start = Clock::now();
    SweepRow row;
    row.epsilon = epsilon;
    row.t = t;
    const std::size_t intervals = intervals_for(config, t);
    const std::vector<double> grid = uniform_grid(t, intervals);
    const std::vector<JointState> traj = dyn.trajectory(prep.state, grid);
    std::vector<JointState> upsilons;
    upsilons.reserve(traj.size());
    double tail = prep.tail_mass;
    for (const JointState& s : traj) {
      upsilons.push_back(dyn.interaction_picture(s));
      tail = std::max(tail, top_rung_population(prep.model.fock, ds, s));
    }
    const JointState& gamma_t = traj.back();

    const StateValuedMeasure m_t = evolve_effective(config, em, m0, t);
    row.trace_distance =
        trace_distance(partial_trace_boson(gamma_t.rho, ds, prep.model.boson_dimension()), m_t.barycenter());
    for (std::size_t k = 0; k < etas.size(); ++k) {
      const ComplexMatrix gap = quantum_fourier(gamma_t.rho, ds, weyls[k]) - measure_fourier(m_t, etas[k]);
      row.fourier_gap_max = std::max(row.fourier_gap_max, trace_norm(gap));
    }
    row.number_moment_delta1 = number_moment(prep.model.fock, ds, gamma_t, 1.0);
    row.number_moment_delta_half = number_moment(prep.model.fock, ds, upsilons.back(), 0.5);
    row.duhamel_residual = max_duhamel_residual(dyn, upsilons, duhamel_etas(config));

    const auto family = interaction_measure_trajectory(
        em, m0, t, intervals, kTransportSubsteps);
    row.transport_residual = max_transport_residual(em, family, etas, t);

    row.tail_mass = tail;
    row.trusted = tail <= 0.1 * row.trace_distance;
    row.wall_ms = config.record_timings
                      ? std::chrono::duration<double, std::milli>(Clock::now() - start).count()
                      : 0.0;
    out.rows.push_back(row);
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConvergenceReport run_sweep(const ExperimentConfig& config, unsigned threads) {
  validate(config);
  const std::size_t n = config.epsilons.size();
  std::vector<EpsilonResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_epsilon(config, config.epsilons[i]);
      } catch (const std::exception& e) {
        errors[i] = std::make_exception_ptr(std::runtime_error(
            "sweep cell eps=" + format_double(config.epsilons[i]) + ": " + e.what()));
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ConvergenceReport report;
  for (auto& r : results) {
    report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
    report.initial_moment_half.push_back(r.initial_moment_half);
    report.cutoffs.push_back(r.cutoffs);
  }
  for (std::size_t ti = 0; ti < config.times.size(); ++ti) {
    TimeFit fit;
    fit.t = config.times[ti];
    std::vector<std::pair<double, double>> d_pairs, f_pairs;
    for (std::size_t ei = 0; ei < n; ++ei) {
      const SweepRow& row = report.rows[ei * config.times.size() + ti];
      d_pairs.emplace_back(row.epsilon, row.trace_distance);
      f_pairs.emplace_back(row.epsilon, row.fourier_gap_max);
    }
    auto positive = [](const auto& pairs) {
      return std::all_of(pairs.begin(), pairs.end(), [](const auto& p) { return p.second > 0.0; });
    };
    if (n >= 3 && positive(d_pairs)) {
      fit.trace_distance = fit_order(d_pairs);
      fit.trace_distance_fitted = true;
    }
    if (n >= 3 && positive(f_pairs)) {
      fit.fourier_gap = fit_order(f_pairs);
      fit.fourier_gap_fitted = true;
    }
    report.fits.push_back(fit);
  }
  return report;
}

std::string to_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "epsilon,t,trace_distance,fourier_gap_max,number_moment_delta1,duhamel_residual,"
         "transport_residual,tail_mass,wall_ms\n";
  for (const SweepRow& r : report.rows) {
    out << format_double(r.epsilon) << ',' << format_double(r.t) << ','
        << format_double(r.trace_distance) << ',' << format_double(r.fourier_gap_max) << ','
        << format_double(r.number_moment_delta1) << ',' << format_double(r.duhamel_residual) << ','
        << format_double(r.transport_residual) << ',' << format_double(r.tail_mass) << ','
        << format_double(r.wall_ms) << '\n';
  }
  return out.str();
}

namespace {

Json fit_to_json(const OrderFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}};
}

}  // namespace

Json to_json(const ConvergenceReport& report, const ExperimentConfig& config) {
  Json rows = Json::array();
  for (const SweepRow& r : report.rows) {
    rows.push_back({{"epsilon", r.epsilon},
                    {"t", r.t},
                    {"trace_distance", r.trace_distance},
                    {"fourier_gap_max", r.fourier_gap_max},
                    {"number_moment_delta1", r.number_moment_delta1},
                    {"number_moment_delta_half_interaction", r.number_moment_delta_half},
                    {"duhamel_residual", r.duhamel_residual},
                    {"transport_residual", r.transport_residual},
                    {"tail_mass", r.tail_mass},
                    {"trusted", r.trusted},
                    {"wall_ms", r.wall_ms}});
  }
  Json fits = Json::array();
  for (const TimeFit& f : report.fits) {
    Json entry = {{"t", f.t}};
    entry["trace_distance"] = f.trace_distance_fitted ? fit_to_json(f.trace_distance) : Json(nullptr);
    entry["fourier_gap"] = f.fourier_gap_fitted ? fit_to_json(f.fourier_gap) : Json(nullptr);
    fits.push_back(std::move(entry));
  }
  return {{"metrics_note",
           "trace_distance compares reduced spin states; fourier_gap_max is the maximum trace-norm "
           "gap over the eta grid. Both are harness conventions for quasi-classical convergence."},
          {"nu_regime", std::string(to_string(config.regime))},
          {"seed", config.seed},
          {"epsilons", config.epsilons},
          {"times", config.times},
          {"cutoffs", report.cutoffs},
          {"initial_number_moment_delta_half", report.initial_moment_half},
          {"rows", std::move(rows)},
          {"order_fits", std::move(fits)}};
}

bool InvariantLedger::all_passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

Json to_json(const InvariantLedger& ledger) {
  Json entries = Json::array();
  for (const auto& e : ledger.entries) {
    entries.push_back({{"suite", e.suite},
                       {"check", e.check},
                       {"passed", e.passed},
                       {"value", e.value},
                       {"threshold", e.threshold}});
  }
  return {{"all_passed", ledger.all_passed()}, {"entries", std::move(entries)}};
}

namespace {

void record(InvariantLedger& ledger, std::string suite, std::string check, double value,
            double threshold) {
  ledger.entries.push_back({std::move(suite), std::move(check),
                            std::isfinite(value) && value <= threshold, value, threshold});
}

ModeVector random_mode_vector(std::mt19937_64& rng, Eigen::Index modes) {
  std::normal_distribution<double> normal;
  ModeVector v(modes);
  for (Eigen::Index j = 0; j < modes; ++j) v[j] = Complex(normal(rng), normal(rng));
  return v;
}

double ccr_residual(const FockSpace& fock, const ModeVector& f, const ModeVector& g) {
  const ComplexMatrix a = annihilation(fock, f);
  const ComplexMatrix ad = creation(fock, g);
  const ComplexMatrix comm = a * ad - ad * a;
  const Complex expected = fock.epsilon() * inner(f, g);
  double worst = 0.0;
  const auto safe = fock.truncation_safe_indices();
  for (std::size_t r : safe) {
    for (std::size_t c : safe) {
      const Complex want = r == c ? expected : Complex(0.0);
      worst = std::max(worst, std::abs(comm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) - want));
    }
  }
  return worst;
}

double weyl_relation_residual(const FockSpace& fock, const ModeVector& eta1, const ModeVector& eta2,
                              int low_occupation) {
  const ComplexMatrix lhs = weyl_op(fock, eta1) * weyl_op(fock, eta2);
  const Complex phase = std::polar(1.0, -fock.epsilon() * inner(eta1, eta2).imag());
  const ComplexMatrix rhs = phase * weyl_op(fock, eta1 + eta2);
  double worst = 0.0;
  for (std::size_t n = 0; n < fock.dimension(); ++n) {
    if (fock.total_occupation(n) > low_occupation) continue;
    const auto col = static_cast<Eigen::Index>(n);
    worst = std::max(worst, (lhs.col(col) - rhs.col(col)).cwiseAbs().maxCoeff());
  }
  return worst;
}

// Two-step refinement: passes when the fine residual is at round-off, or when
// the observed order is at least `order` and the fine residual below `limit`.
void record_refinement(InvariantLedger& ledger, const std::string& suite, double coarse, double fine,
                       double order, double limit) {
  record(ledger, suite, "residual at fine grid", fine, limit);
  if (fine <= 1e-10) {
    record(ledger, suite, "observed order (residual at round-off)", 0.0, 0.0);
  } else {
    const double observed = std::log2(coarse / fine);
    ledger.entries.push_back({suite, "observed order >= " + format_double(order),
                              std::isfinite(observed) && observed >= order, observed, order});
  }
}

}  // namespace

InvariantLedger check_invariants(const ExperimentConfig& config, const InvariantOptions& options) {
  validate(config);
  InvariantLedger ledger;
  const auto modes = static_cast<Eigen::Index>(mode_count(config));
  std::mt19937_64 rng(config.seed);

  // eps-CCR on the truncation-safe sub-block
  {
    const std::vector<int> cutoffs(static_cast<std::size_t>(modes), modes == 1 ? 12 : 6);
    for (double eps : {config.epsilons.front(), config.epsilons.back()}) {
      const FockSpace fock(cutoffs, eps);
      const ModeVector f = random_mode_vector(rng, modes);
      const ModeVector g = random_mode_vector(rng, modes);
      record(ledger, "ccr", "eps=" + format_double(eps), ccr_residual(fock, f, g), 1e-10);
    }
  }

  // Weyl relation on low-occupation states
  {
    const ModeVector eta1 = ModeVector::Constant(modes, Complex(0.7, 0.2));
    const ModeVector eta2 = ModeVector::Constant(modes, Complex(-0.4, 0.9));
    for (double eps : {config.epsilons.front(), config.epsilons.back()}) {
      const double reach = std::sqrt(eps) * (eta1.norm() + eta2.norm()) + 2.0;
      const int cutoff = safe_cutoff(reach * reach, config.tail_target);
      const FockSpace fock(std::vector<int>(static_cast<std::size_t>(modes), cutoff), eps);
      record(ledger, "weyl", "eps=" + format_double(eps),
             weyl_relation_residual(fock, eta1, eta2, 2), 1e-6);
    }
  }

  const double eps = config.epsilons.front();
  const double t_max = *std::max_element(config.times.begin(), config.times.end());
  const PreparedState prep = prepare_microscopic(config, eps);
  const MicroscopicDynamics dyn(prep.model);

  // unitarity of the microscopic evolution
  {
    const JointState out = dyn.evolve(prep.state, t_max);
    record(ledger, "unitarity", "trace", std::abs(out.rho.trace() - prep.state.rho.trace()), 1e-9);
    record(ledger, "unitarity", "hermiticity", hermiticity_residual(out.rho), 1e-9);
    const RealVector before = herm_eig(prep.state.rho).eigenvalues;
    const RealVector after = herm_eig(out.rho).eigenvalues;
    record(ledger, "unitarity", "spectrum", (before - after).cwiseAbs().maxCoeff(), 1e-9);
  }

  const EffectiveModel em = effective_model(config);
  const StateValuedMeasure m0 = initial_measure(config);

  // mass conservation of the effective dynamics
  {
    const double mass0 = total_mass(m0);
    record(ledger, "mass", "evolve_measure",
           std::abs(total_mass(evolve_effective(config, em, m0, t_max)) - mass0), 0.0);
    record(ledger, "mass", "interaction_measure_evolution",
           std::abs(total_mass(interaction_measure_evolution(em, m0, t_max)) - mass0), 0.0);
  }

  // Duhamel residual over [0, 1] at 128 and 256 intervals
  {
    std::vector<double> residuals;
    for (std::size_t intervals : {128u, 256u}) {
      const auto traj = dyn.trajectory(prep.state, uniform_grid(1.0, intervals));
      std::vector<JointState> ups;
      for (const auto& s : traj) ups.push_back(dyn.interaction_picture(s));
      residuals.push_back(max_duhamel_residual(dyn, ups, duhamel_etas(config)));
    }
    record_refinement(ledger, "duhamel", residuals[0], residuals[1], 1.8, 1e-6);
  }

  // transport residual over [0, 1] at 128 and 256 intervals
  {
    EffectiveModel generating = em;
    if (options.flip_alpha_sign) generating.form_factor = -generating.form_factor;
    const auto etas = eta_grid(config);
    std::vector<double> residuals;
    for (std::size_t intervals : {128u, 256u}) {
      const auto family = interaction_measure_trajectory(
          generating, m0, 1.0, intervals, kTransportSubsteps);
      residuals.push_back(max_transport_residual(em, family, etas, 1.0));
    }
    record_refinement(ledger, "transport", residuals[0], residuals[1], 1.8,
                      std::numeric_limits<double>::infinity());
  }
  return ledger;
}

Json simulate(const ExperimentConfig& config, double epsilon, double t) {
  validate(config);
  const PreparedState prep = prepare_microscopic(config, epsilon);
  const MicroscopicDynamics dyn(prep.model);
  const std::size_t ds = prep.model.spin_dimension();
  const JointState gamma_t = dyn.evolve(prep.state, t);
  const JointState upsilon_t = dyn.interaction_picture(gamma_t);
  const EffectiveModel em = effective_model(config);
  const StateValuedMeasure m_t = evolve_effective(config, em, initial_measure(config), t);
  const ComplexMatrix reduced = partial_trace_boson(gamma_t.rho, ds, prep.model.boson_dimension());

  Json gaps = Json::array();
  for (const FourierEntry& e : fourier_table(config, epsilon, t)) gaps.push_back(e.gap);
  return {{"epsilon", epsilon},
          {"t", t},
          {"nu_regime", std::string(to_string(config.regime))},
          {"cutoffs", prep.model.fock.cutoffs()},
          {"tail_mass", std::max(prep.tail_mass, top_rung_population(prep.model.fock, ds, gamma_t))},
          {"reduced_state", matrix_to_json(reduced)},
          {"effective_barycenter", matrix_to_json(m_t.barycenter())},
          {"trace_distance", trace_distance(reduced, m_t.barycenter())},
          {"fourier_gaps", std::move(gaps)},
          {"number_moment_delta1", number_moment(prep.model.fock, ds, gamma_t, 1.0)},
          {"number_moment_delta_half_interaction", number_moment(prep.model.fock, ds, upsilon_t, 0.5)},
          {"effective_measure", measure_to_json(m_t)},
          {"joint_state", state_to_json(gamma_t, ds, prep.model.boson_dimension())}};
}

std::vector<FourierEntry> fourier_table(const ExperimentConfig& config, double epsilon, double t) {
  validate(config);
  const PreparedState prep = prepare_microscopic(config, epsilon);
  const MicroscopicDynamics dyn(prep.model);
  const JointState gamma_t = dyn.evolve(prep.state, t);
  const EffectiveModel em = effective_model(config);
  const StateValuedMeasure m_t = evolve_effective(config, em, initial_measure(config), t);
  const auto etas = eta_grid(config);
  std::vector<FourierEntry> table;
  for (std::size_t k = 0; k < etas.size(); ++k) {
    FourierEntry e;
    e.eta_index = k;
    e.eta = etas[k];
    e.quantum = quantum_fourier(prep.model, gamma_t, etas[k]);
    e.measure = measure_fourier(m_t, etas[k]);
    e.gap = trace_norm(e.quantum - e.measure);
    table.push_back(std::move(e));
  }
  return table;
}

std::string fourier_csv(std::span<const FourierEntry> table, double epsilon, double t) {
  std::ostringstream out;
  out << "epsilon,t,eta_index,eta,row,col,quantum_re,quantum_im,measure_re,measure_im,gap\n";
  for (const FourierEntry& e : table) {
    std::string eta;
    for (Eigen::Index j = 0; j < e.eta.size(); ++j) {
      if (j > 0) eta += ';';
      eta += format_double(e.eta[j].real()) + ':' + format_double(e.eta[j].imag());
    }
    for (Eigen::Index a = 0; a < e.quantum.rows(); ++a) {
      for (Eigen::Index b = 0; b < e.quantum.cols(); ++b) {
        out << format_double(epsilon) << ',' << format_double(t) << ',' << e.eta_index << ','
            << eta << ',' << a << ',' << b << ',' << format_double(e.quantum(a, b).real()) << ','
            << format_double(e.quantum(a, b).imag()) << ',' << format_double(e.measure(a, b).real())
            << ',' << format_double(e.measure(a, b).imag()) << ',' << format_double(e.gap) << '\n';
      }
    }
  }
  return out.str();
}

std::vector<TransportStudyRow> transport_study(const ExperimentConfig& config, double t,
                                               std::span<const std::size_t> intervals) {
  validate(config);
  const EffectiveModel em = effective_model(config);
  const StateValuedMeasure m0 = initial_measure(config);
  const auto etas = eta_grid(config);
  const PreparedState prep = prepare_microscopic(config, config.epsilons.front());
  const MicroscopicDynamics dyn(prep.model);
  std::vector<TransportStudyRow> rows;
  for (std::size_t n : intervals) {
    if (n < 1) throw PreconditionError("transport_study: interval counts must be positive");
    TransportStudyRow row;
    row.intervals = n;
    const auto family =
        interaction_measure_trajectory(em, m0, t, n, kTransportSubsteps);
    row.transport_residual = max_transport_residual(em, family, etas, t);
    const auto traj = dyn.trajectory(prep.state, uniform_grid(t, n));
    std::vector<JointState> ups;
    for (const auto& s : traj) ups.push_back(dyn.interaction_picture(s));
    row.duhamel_residual = max_duhamel_residual(dyn, ups, duhamel_etas(config));
    rows.push_back(row);
  }
  return rows;
}

std::string transport_csv(std::span<const TransportStudyRow> rows) {
  std::ostringstream out;
  out << "intervals,transport_residual,duhamel_residual\n";
  for (const auto& r : rows) {
    out << r.intervals << ',' << format_double(r.transport_residual) << ','
        << format_double(r.duhamel_residual) << '\n';
  }
  return out.str();
}

std::vector<double> observed_orders(std::span<const double> residuals) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < residuals.size(); ++i) {
    out.push_back(std::log2(residuals[i] / residuals[i + 1]));
  }
  return out;
}

}  // namespace qcsb
