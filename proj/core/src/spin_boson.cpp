#include "qcsb/spin_boson.hpp"

#include <cmath>
#include <string>

namespace qcsb {

double nu_of_epsilon(NuRegime regime, double epsilon) {
  return regime == NuRegime::Stationary ? 1.0 : 1.0 / epsilon;
}

double nu_limit(NuRegime regime) { return regime == NuRegime::Stationary ? 0.0 : 1.0; }

std::string_view to_string(NuRegime regime) {
  return regime == NuRegime::Stationary ? "stationary" : "free_field";
}

NuRegime parse_nu_regime(std::string_view name) {
  if (name == "stationary") return NuRegime::Stationary;
  if (name == "free_field") return NuRegime::FreeField;
  throw PreconditionError("unknown nu regime '" + std::string(name) +
                          "' (expected stationary or free_field)");
}

void validate(const SpinBosonModel& model) {
  const auto& s = model.spin_hamiltonian;
  const auto& c = model.coupling;
  if (s.rows() != s.cols() || c.rows() != c.cols() || s.rows() != c.rows()) {
    throw DimensionError("SpinBosonModel: S and s must be square with equal dimension");
  }
  if (s.rows() < 2) {
    throw DimensionError("SpinBosonModel: spin dimension must be at least 2");
  }
  if (!is_hermitian(s) || !is_hermitian(c)) {
    throw PreconditionError("SpinBosonModel: S and s must be Hermitian");
  }
  if (model.omega.modes() != model.fock.modes() ||
      static_cast<std::size_t>(model.form_factor.size()) != model.fock.modes()) {
    throw DimensionError("SpinBosonModel: omega, g and the Fock space disagree on the mode count");
  }
  if (!model.form_factor.allFinite()) {
    throw PreconditionError("SpinBosonModel: non-finite form factor");
  }
}

void validate_joint_state(const JointState& state) {
  const auto& rho = state.rho;
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw DimensionError("JointState: density matrix must be square");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-10) {
    throw PreconditionError("JointState: trace differs from 1");
  }
  if (!is_hermitian(rho)) {
    throw PreconditionError("JointState: density matrix is not Hermitian");
  }
  const HermitianEig eig = herm_eig(rho);
  if (eig.eigenvalues[0] < -1e-10) {
    throw PreconditionError("JointState: density matrix is not positive");
  }
}

ComplexMatrix free_hamiltonian(const SpinBosonModel& model) {
  validate(model);
  const auto db = static_cast<Eigen::Index>(model.boson_dimension());
  const ComplexMatrix boson_free = model.nu() * d_gamma(model.fock, model.omega);
  return kron(model.spin_hamiltonian, ComplexMatrix::Identity(db, db)) +
         kron(ComplexMatrix::Identity(model.spin_hamiltonian.rows(), model.spin_hamiltonian.rows()),
              boson_free);
}

ComplexMatrix assemble_hamiltonian(const SpinBosonModel& model) {
  ComplexMatrix h = free_hamiltonian(model);
  h += kron(model.coupling, field_op(model.fock, model.form_factor));
  return h;
}

ComplexMatrix conjugate_by_product(const ComplexMatrix& rho, const ComplexMatrix& spin_unitary,
                                   const ComplexVector& boson_phases) {
  const Eigen::Index ds = spin_unitary.rows();
  const Eigen::Index db = boson_phases.size();
  if (rho.rows() != ds * db || rho.cols() != ds * db) {
    throw DimensionError("conjugate_by_product: dimension mismatch");
  }
  const ComplexMatrix phase_outer = boson_phases * boson_phases.adjoint();
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (Eigen::Index a = 0; a < ds; ++a) {
    for (Eigen::Index b = 0; b < ds; ++b) {
      auto block = out.block(a * db, b * db, db, db);
      for (Eigen::Index ap = 0; ap < ds; ++ap) {
        for (Eigen::Index bp = 0; bp < ds; ++bp) {
          const Complex c = spin_unitary(a, ap) * std::conj(spin_unitary(b, bp));
          if (c == Complex(0.0)) continue;
          block += c * rho.block(ap * db, bp * db, db, db);
        }
      }
      block = block.cwiseProduct(phase_outer);
    }
  }
  return out;
}

MicroscopicDynamics::MicroscopicDynamics(SpinBosonModel model)
    : model_(std::move(model)),
      hamiltonian_eig_(herm_eig(assemble_hamiltonian(model_))),
      spin_eig_(herm_eig(model_.spin_hamiltonian)),
      boson_free_energies_(model_.nu() * d_gamma_diagonal(model_.fock, model_.omega)) {}

namespace {

void check_state_dimension(const SpinBosonModel& model, const JointState& state) {
  const auto d = static_cast<Eigen::Index>(model.dimension());
  if (state.rho.rows() != d || state.rho.cols() != d) {
    throw DimensionError("JointState dimension " + std::to_string(state.rho.rows()) +
                         " does not match the model dimension " + std::to_string(d));
  }
}

ComplexMatrix phase_evolved(const ComplexMatrix& in_eigenbasis, const RealVector& energies,
                            double t) {
  const Eigen::Index d = energies.size();
  ComplexVector phases(d);
  for (Eigen::Index k = 0; k < d; ++k) phases[k] = std::polar(1.0, -t * energies[k]);
  return phases.asDiagonal() * in_eigenbasis * phases.conjugate().asDiagonal();
}

}  // namespace

JointState MicroscopicDynamics::evolve(const JointState& state, double t) const {
  const double times[] = {t};
  return trajectory(state, times).front();
}

std::vector<JointState> MicroscopicDynamics::trajectory(const JointState& initial,
                                                        std::span<const double> times) const {
  check_state_dimension(model_, initial);
  if (std::abs(initial.rho.trace() - Complex(1.0)) > 1e-8 || !is_hermitian(initial.rho)) {
    throw PreconditionError("evolve: initial state is not a unit-trace Hermitian matrix");
  }
  const ComplexMatrix& v = hamiltonian_eig_.eigenvectors;
  const ComplexMatrix in_basis = conjugate(v, initial.rho);
  std::vector<JointState> out;
  out.reserve(times.size());
  for (double t : times) {
    const ComplexMatrix g = phase_evolved(in_basis, hamiltonian_eig_.eigenvalues, t);
    ComplexMatrix tmp = v * g;
    JointState s{tmp * v.adjoint(), initial.epsilon, initial.time + t};
    out.push_back(std::move(s));
  }
  return out;
}

ComplexMatrix MicroscopicDynamics::free_spin_propagator(double t) const {
  return unitary_exp(spin_eig_, -t);
}

ComplexVector MicroscopicDynamics::free_boson_phases(double t) const {
  ComplexVector phases(boson_free_energies_.size());
  for (Eigen::Index n = 0; n < phases.size(); ++n) {
    phases[n] = std::polar(1.0, -t * boson_free_energies_[n]);
  }
  return phases;
}

JointState MicroscopicDynamics::interaction_picture(const JointState& state) const {
  check_state_dimension(model_, state);
  const double t = state.time;
  return {conjugate_by_product(state.rho, free_spin_propagator(-t), free_boson_phases(-t)),
          state.epsilon, t};
}

JointState MicroscopicDynamics::schrodinger_picture(const JointState& upsilon) const {
  check_state_dimension(model_, upsilon);
  const double t = upsilon.time;
  return {conjugate_by_product(upsilon.rho, free_spin_propagator(t), free_boson_phases(t)),
          upsilon.epsilon, t};
}

ComplexMatrix MicroscopicDynamics::spin_coupling_at(double tau) const {
  const ComplexMatrix u = unitary_exp(spin_eig_, tau);
  return u * model_.coupling * u.adjoint();
}

ModeVector MicroscopicDynamics::form_factor_at(double tau) const {
  return model_.omega.free_flow(model_.form_factor, -tau, model_.nu() * model_.epsilon());
}

JointState evolve(const SpinBosonModel& model, const JointState& state, double t) {
  return MicroscopicDynamics(model).evolve(state, t);
}

JointState interaction_picture(const SpinBosonModel& model, const JointState& state) {
  return MicroscopicDynamics(model).interaction_picture(state);
}

ComplexMatrix quantum_fourier(const ComplexMatrix& rho, std::size_t d_spin,
                              const ComplexMatrix& weyl) {
  const Eigen::Index ds = static_cast<Eigen::Index>(d_spin);
  const Eigen::Index db = weyl.rows();
  if (weyl.rows() != weyl.cols() || rho.rows() != ds * db || rho.cols() != ds * db) {
    throw DimensionError("quantum_fourier: dimension mismatch");
  }
  // tr(rho_ab W) = sum_{mn} rho_ab(m, n) W(n, m)
  const ComplexMatrix wt = weyl.transpose();
  ComplexMatrix out(ds, ds);
  for (Eigen::Index a = 0; a < ds; ++a) {
    for (Eigen::Index b = 0; b < ds; ++b) {
      out(a, b) = rho.block(a * db, b * db, db, db).cwiseProduct(wt).sum();
    }
  }
  return out;
}

ComplexMatrix quantum_fourier(const SpinBosonModel& model, const JointState& state,
                              const ModeVector& eta) {
  check_state_dimension(model, state);
  return quantum_fourier(state.rho, model.spin_dimension(), weyl_op(model.fock, eta));
}

double number_moment(const FockSpace& fock, std::size_t d_spin, const JointState& state,
                     double delta) {
  if (!(delta > 0.0)) throw PreconditionError("number_moment: delta must be positive");
  const RealVector weights = boson_marginal_diagonal(state.rho, d_spin, fock.dimension());
  const RealVector number = number_diagonal(fock);
  double moment = 0.0;
  for (Eigen::Index n = 0; n < weights.size(); ++n) {
    moment += std::pow(number[n] + 1.0, delta) * weights[n];
  }
  return moment;
}

double top_rung_population(const FockSpace& fock, std::size_t d_spin, const JointState& state) {
  const RealVector weights = boson_marginal_diagonal(state.rho, d_spin, fock.dimension());
  double mass = 0.0;
  for (std::size_t n = 0; n < fock.dimension(); ++n) {
    if (fock.at_cutoff(n)) mass += weights[static_cast<Eigen::Index>(n)];
  }
  return std::max(mass, 0.0);
}

namespace {

// tr(rho (A (x) B))
Complex trace_with_product(const ComplexMatrix& rho, const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index ds = a.rows();
  const Eigen::Index db = b.rows();
  const ComplexMatrix bt = b.transpose();
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < ds; ++i) {
    for (Eigen::Index j = 0; j < ds; ++j) {
      if (a(j, i) == Complex(0.0)) continue;
      acc += a(j, i) * rho.block(i * db, j * db, db, db).cwiseProduct(bt).sum();
    }
  }
  return acc;
}

}  // namespace

std::vector<double> duhamel_residuals(const MicroscopicDynamics& dynamics,
                                      std::span<const JointState> trajectory, const ModeVector& eta,
                                      std::span<const ComplexMatrix> test_ops, Quadrature rule) {
  if (trajectory.size() < 2) {
    throw PreconditionError("duhamel_residual: the time grid needs at least 2 points");
  }
  const auto& model = dynamics.model();
  const std::size_t ds = model.spin_dimension();
  for (const ComplexMatrix& k : test_ops) {
    if (k.rows() != static_cast<Eigen::Index>(ds) || k.cols() != k.rows()) {
      throw DimensionError("duhamel_residual: test operators must act on the spin space");
    }
  }
  const double s = trajectory.front().time;
  const double t = trajectory.back().time;
  const double dt = (t - s) / static_cast<double>(trajectory.size() - 1);
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const double expected = s + dt * static_cast<double>(k);
    if (std::abs(trajectory[k].time - expected) > 1e-9 * (1.0 + std::abs(t - s))) {
      throw PreconditionError("duhamel_residual: trajectory is not on a uniform grid");
    }
  }
  const ComplexMatrix weyl = weyl_op(model.fock, eta);
  const RealVector weights = quadrature_weights(trajectory.size(), rule);

  std::vector<Complex> integral(test_ops.size(), 0.0);
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const JointState& y = trajectory[k];
    const double w = weights[static_cast<Eigen::Index>(k)];
    const ComplexMatrix s_tau = dynamics.spin_coupling_at(y.time);
    const ComplexMatrix phi_tau = field_op(model.fock, dynamics.form_factor_at(y.time));
    const ComplexMatrix w_phi = weyl * phi_tau;
    const ComplexMatrix phi_w = phi_tau * weyl;
    // tr([V, Y] K) = tr(Y [K, V]) with K = k (x) W, V = s(tau) (x) phi(tau)
    for (std::size_t i = 0; i < test_ops.size(); ++i) {
      const Complex kv = trace_with_product(y.rho, test_ops[i] * s_tau, w_phi);
      const Complex vk = trace_with_product(y.rho, s_tau * test_ops[i], phi_w);
      integral[i] += (w * dt) * Complex(0.0, -1.0) * (kv - vk);
    }
  }
  const ComplexMatrix start_fourier = quantum_fourier(trajectory.front().rho, ds, weyl);
  const ComplexMatrix end_fourier = quantum_fourier(trajectory.back().rho, ds, weyl);
  std::vector<double> out(test_ops.size());
  for (std::size_t i = 0; i < test_ops.size(); ++i) {
    const Complex lhs = (end_fourier * test_ops[i]).trace() - (start_fourier * test_ops[i]).trace();
    out[i] = std::abs(lhs - integral[i]);
  }
  return out;
}

double duhamel_residual(const MicroscopicDynamics& dynamics, std::span<const JointState> trajectory,
                        const ModeVector& eta, const ComplexMatrix& test_op, Quadrature rule) {
  return duhamel_residuals(dynamics, trajectory, eta, std::span<const ComplexMatrix>(&test_op, 1), rule)
      .front();
}

std::vector<ComplexMatrix> default_test_operators(std::size_t d_spin) {
  const auto d = static_cast<Eigen::Index>(d_spin);
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(a, b) = 1.0;
      ops.push_back(std::move(e));
    }
  }
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      ComplexMatrix x = ComplexMatrix::Zero(d, d);
      x(a, b) = x(b, a) = 1.0;
      ComplexMatrix y = ComplexMatrix::Zero(d, d);
      y(a, b) = Complex(0.0, -1.0);
      y(b, a) = Complex(0.0, 1.0);
      ops.push_back(std::move(x));
      ops.push_back(std::move(y));
    }
    if (a + 1 < d) {
      ComplexMatrix z = ComplexMatrix::Zero(d, d);
      z(a, a) = 1.0;
      z(a + 1, a + 1) = -1.0;
      ops.push_back(std::move(z));
    }
  }
  return ops;
}

}  // namespace qcsb
