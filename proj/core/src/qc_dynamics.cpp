#include "qcsb/qc_dynamics.hpp"

#include <cmath>
#include <string>

namespace qcsb {

EffectiveModel effective_model(const SpinBosonModel& model) {
  validate(model);
  return {model.spin_hamiltonian, model.coupling, model.omega, model.form_factor,
          nu_limit(model.regime)};
}

void validate(const EffectiveModel& model) {
  const auto& s = model.spin_hamiltonian;
  const auto& c = model.coupling;
  if (s.rows() != s.cols() || c.rows() != c.cols() || s.rows() != c.rows() || s.rows() < 1) {
    throw DimensionError("EffectiveModel: S and s must be square with equal dimension");
  }
  if (!is_hermitian(s) || !is_hermitian(c)) {
    throw PreconditionError("EffectiveModel: S and s must be Hermitian");
  }
  if (static_cast<std::size_t>(model.form_factor.size()) != model.omega.modes()) {
    throw DimensionError("EffectiveModel: g and omega disagree on the mode count");
  }
  if (!std::isfinite(model.nu) || model.nu < 0.0) {
    throw PreconditionError("EffectiveModel: nu must be a non-negative number");
  }
}

namespace {

void check_point(const EffectiveModel& model, const ModeVector& z) {
  if (static_cast<std::size_t>(z.size()) != model.omega.modes()) {
    throw DimensionError("qc_dynamics: point has " + std::to_string(z.size()) +
                         " modes, model has " + std::to_string(model.omega.modes()));
  }
}

double spectral_radius(const ComplexMatrix& a) {
  return herm_eig(a).eigenvalues.cwiseAbs().maxCoeff();
}

}  // namespace

double alpha(const EffectiveModel& model, const ModeVector& z, double s) {
  check_point(model, z);
  const ModeVector rotated = model.omega.free_flow(model.form_factor, -s, model.nu);
  return 2.0 * inner(z, rotated).real();
}

double alpha_integral(const EffectiveModel& model, const ModeVector& z, double t_from,
                      double t_to) {
  check_point(model, z);
  const double span = t_to - t_from;
  Complex acc = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double kappa = model.nu * model.omega[static_cast<std::size_t>(j)];
    const Complex c = std::conj(z[j]) * model.form_factor[j];
    const double x = kappa * span;
    Complex integral;
    if (std::abs(x) < 1e-6) {
      integral = span * (1.0 + Complex(0.0, x / 2.0) - x * x / 6.0);
    } else {
      // e^{ix} - 1 written without cancellation
      const double half = std::sin(x / 2.0);
      integral = Complex(-2.0 * half * half, std::sin(x)) / Complex(0.0, kappa);
    }
    acc += c * std::polar(1.0, kappa * t_from) * integral;
  }
  return 2.0 * acc.real();
}

ComplexMatrix effective_hamiltonian(const EffectiveModel& model, const ModeVector& z, double s) {
  return model.spin_hamiltonian + alpha(model, z, s) * model.coupling;
}

std::size_t default_steps(const EffectiveModel& model, const ModeVector& z, double t_from,
                          double t_to) {
  check_point(model, z);
  double alpha_max = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    alpha_max += 2.0 * std::abs(z[j]) * std::abs(model.form_factor[j]);
  }
  const double rate = spectral_radius(model.spin_hamiltonian) +
                      alpha_max * spectral_radius(model.coupling);
  const double steps = std::ceil(std::abs(t_to - t_from) * rate / 0.05);
  return std::max<std::size_t>(1, static_cast<std::size_t>(steps));
}

Propagator propagate(const EffectiveModel& model, const ModeVector& z, double t_from, double t_to,
                     std::size_t steps) {
  validate(model);
  check_point(model, z);
  if (steps == 0) throw PreconditionError("propagate: steps must be positive");
  const double dt = (t_to - t_from) / static_cast<double>(steps);
  const Eigen::Index d = model.spin_hamiltonian.rows();
  ComplexMatrix u = ComplexMatrix::Identity(d, d);
  for (std::size_t k = 0; k < steps; ++k) {
    const double mid = t_from + (static_cast<double>(k) + 0.5) * dt;
    u = unitary_exp(effective_hamiltonian(model, z, mid), -dt) * u;
  }
  return {std::move(u), t_from, t_to, z};
}

Propagator propagate(const EffectiveModel& model, const ModeVector& z, double t,
                     std::size_t steps) {
  return propagate(model, z, 0.0, t, steps);
}

Propagator interaction_propagate(const EffectiveModel& model, const ModeVector& z, double t_from,
                                 double t_to, std::size_t steps) {
  validate(model);
  check_point(model, z);
  if (steps == 0) throw PreconditionError("interaction_propagate: steps must be positive");
  const HermitianEig spin = herm_eig(model.spin_hamiltonian);
  const HermitianEig coupling = herm_eig(model.coupling);
  const double dt = (t_to - t_from) / static_cast<double>(steps);
  const Eigen::Index d = model.spin_hamiltonian.rows();
  ComplexMatrix u = ComplexMatrix::Identity(d, d);
  for (std::size_t k = 0; k < steps; ++k) {
    const double mid = t_from + (static_cast<double>(k) + 0.5) * dt;
    // exp(-i dt a s(mid)) = e^{i mid S} exp(-i dt a s) e^{-i mid S}
    const double a = alpha(model, z, mid);
    if (a == 0.0) continue;
    const ComplexMatrix frame = unitary_exp(spin, mid);
    const ComplexMatrix kick = unitary_exp(coupling, -dt * a);
    u = frame * kick * frame.adjoint() * u;
  }
  return {std::move(u), t_from, t_to, z};
}

ComplexMatrix dyson_partial_sum(const EffectiveModel& model, const ModeVector& z, double t,
                                std::size_t order, std::size_t steps) {
  validate(model);
  check_point(model, z);
  if (order > kMaxDysonOrder) {
    throw PreconditionError("dyson_partial_sum: order " + std::to_string(order) +
                            " exceeds the maximum " + std::to_string(kMaxDysonOrder));
  }
  if (steps == 0) throw PreconditionError("dyson_partial_sum: steps must be positive");
  const Eigen::Index d = model.spin_hamiltonian.rows();
  const HermitianEig spin = herm_eig(model.spin_hamiltonian);
  const double dt = t / static_cast<double>(steps);

  // B(tau) = -i alpha_tau(z) s(tau) on the grid
  std::vector<ComplexMatrix> generator(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double tau = dt * static_cast<double>(k);
    const ComplexMatrix frame = unitary_exp(spin, tau);
    generator[k] = Complex(0.0, -alpha(model, z, tau)) * (frame * model.coupling * frame.adjoint());
  }

  std::vector<ComplexMatrix> term(steps + 1, ComplexMatrix::Identity(d, d));
  ComplexMatrix sum = ComplexMatrix::Identity(d, d);
  std::vector<ComplexMatrix> next(steps + 1);
  for (std::size_t n = 1; n <= order; ++n) {
    next[0] = ComplexMatrix::Zero(d, d);
    ComplexMatrix prev_integrand = generator[0] * term[0];
    for (std::size_t k = 1; k <= steps; ++k) {
      ComplexMatrix integrand = generator[k] * term[k];
      next[k] = next[k - 1] + (0.5 * dt) * (prev_integrand + integrand);
      prev_integrand = std::move(integrand);
    }
    std::swap(term, next);
    sum += term[steps];
  }
  return unitary_exp(spin, -t) * sum;
}

StateValuedMeasure evolve_measure(const EffectiveModel& model, const StateValuedMeasure& initial,
                                  double t, std::size_t steps) {
  std::vector<Atom> atoms = initial.atoms();
  for (Atom& a : atoms) {
    const std::size_t n = steps > 0 ? steps : default_steps(model, a.point, 0.0, t);
    const ComplexMatrix u = propagate(model, a.point, t, n).unitary;
    a.gamma = u * a.gamma * u.adjoint();
    a.point = model.omega.free_flow(a.point, t, model.nu);
  }
  return StateValuedMeasure(std::move(atoms));
}

StateValuedMeasure interaction_measure_evolution(const EffectiveModel& model,
                                                 const StateValuedMeasure& initial, double t,
                                                 std::size_t steps) {
  std::vector<Atom> atoms = initial.atoms();
  for (Atom& a : atoms) {
    const std::size_t n = steps > 0 ? steps : default_steps(model, a.point, 0.0, t);
    const ComplexMatrix u = interaction_propagate(model, a.point, 0.0, t, n).unitary;
    a.gamma = u * a.gamma * u.adjoint();
  }
  return StateValuedMeasure(std::move(atoms));
}

std::vector<StateValuedMeasure> interaction_measure_trajectory(const EffectiveModel& model,
                                                               const StateValuedMeasure& initial,
                                                               double t, std::size_t intervals,
                                                               std::size_t substeps) {
  if (intervals == 0 || substeps == 0) {
    throw PreconditionError("interaction_measure_trajectory: intervals and substeps must be positive");
  }
  const Eigen::Index d = static_cast<Eigen::Index>(initial.spin_dimension());
  std::vector<ComplexMatrix> unitaries(initial.size(), ComplexMatrix::Identity(d, d));
  std::vector<StateValuedMeasure> family;
  family.reserve(intervals + 1);
  family.push_back(initial);
  const double dt = t / static_cast<double>(intervals);
  for (std::size_t k = 0; k < intervals; ++k) {
    std::vector<Atom> atoms = initial.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const ComplexMatrix step =
          interaction_propagate(model, atoms[i].point, dt * static_cast<double>(k),
                                dt * static_cast<double>(k + 1), substeps)
              .unitary;
      unitaries[i] = step * unitaries[i];
      atoms[i].gamma = unitaries[i] * atoms[i].gamma * unitaries[i].adjoint();
    }
    family.emplace_back(std::move(atoms));
  }
  return family;
}

double transport_residual(const EffectiveModel& model, std::span<const StateValuedMeasure> family,
                          const ModeVector& eta, double s, double t, Quadrature rule) {
  validate(model);
  if (family.size() < 2) {
    throw PreconditionError("transport_residual: the time grid needs at least 2 points");
  }
  const std::size_t atoms = family.front().size();
  for (const auto& m : family) {
    if (m.size() != atoms) {
      throw DimensionError("transport_residual: family members have different atom counts");
    }
  }
  const HermitianEig spin = herm_eig(model.spin_hamiltonian);
  const double dt = (t - s) / static_cast<double>(family.size() - 1);
  const Eigen::Index d = model.spin_hamiltonian.rows();
  const RealVector weights = quadrature_weights(family.size(), rule);

  ComplexMatrix integral = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double tau = s + dt * static_cast<double>(k);
    const ComplexMatrix frame = unitary_exp(spin, tau);
    const ComplexMatrix s_tau = frame * model.coupling * frame.adjoint();
    ComplexMatrix integrand = ComplexMatrix::Zero(d, d);
    for (const Atom& a : family[k].atoms()) {
      const Complex weight = a.weight * alpha(model, a.point, tau) *
                             std::polar(1.0, 2.0 * inner(eta, a.point).real());
      integrand += weight * (a.gamma * s_tau - s_tau * a.gamma);
    }
    integral += (weights[static_cast<Eigen::Index>(k)] * dt) * integrand;
  }
  const ComplexMatrix lhs = measure_fourier(family.back(), eta) - measure_fourier(family.front(), eta);
  return trace_norm(lhs - Complex(0.0, 1.0) * integral);
}

}  // namespace qcsb
