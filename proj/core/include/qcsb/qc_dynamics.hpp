#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qcsb/fock_space.hpp"
#include "qcsb/linalg.hpp"
#include "qcsb/measures.hpp"
#include "qcsb/spin_boson.hpp"

namespace qcsb {

/// Limit dynamics of the spin driven by the classical field. `nu` is
/// lim eps * nu(eps), either 0 or 1.
struct EffectiveModel {
  ComplexMatrix spin_hamiltonian;
  ComplexMatrix coupling;
  Dispersion omega;
  ModeVector form_factor;
  double nu = 0.0;
};

EffectiveModel effective_model(const SpinBosonModel& model);
void validate(const EffectiveModel& model);

/// alpha_s(z) = 2 Re <z, e^{i nu s omega} g>.
double alpha(const EffectiveModel& model, const ModeVector& z, double s);

/// int_{t_from}^{t_to} alpha_tau(z) dtau in closed form; the nu*omega -> 0
/// limit is taken by series when |nu omega (t_to - t_from)| < 1e-6.
double alpha_integral(const EffectiveModel& model, const ModeVector& z, double t_from, double t_to);

/// h(z, s) = S + alpha_s(z) s_op.
ComplexMatrix effective_hamiltonian(const EffectiveModel& model, const ModeVector& z, double s);

struct Propagator {
  ComplexMatrix unitary;
  double t_from = 0.0;
  double t_to = 0.0;
  ModeVector z;
};

/// Step count with dtau * (||S|| + max|alpha| ||s||) <= 0.05.
std::size_t default_steps(const EffectiveModel& model, const ModeVector& z, double t_from,
                          double t_to);

/// Solves i dU/dt = h(z, t) U, U(t_from) = 1, with midpoint-exponential steps.
/// Throws PreconditionError when steps == 0.
Propagator propagate(const EffectiveModel& model, const ModeVector& z, double t_from, double t_to,
                     std::size_t steps);
Propagator propagate(const EffectiveModel& model, const ModeVector& z, double t, std::size_t steps);

/// Interaction-picture propagator generated by alpha_tau(z) s(tau) with
/// s(tau) = e^{i tau S} s e^{-i tau S}.
Propagator interaction_propagate(const EffectiveModel& model, const ModeVector& z, double t_from,
                                 double t_to, std::size_t steps);

inline constexpr std::size_t kMaxDysonOrder = 8;

/// e^{-itS} sum_{n<=order} (-i)^n int_{t>s1>...>sn>0} s(s1) alpha_{s1} ... s(sn) alpha_{sn},
/// with each nested integral by cumulative trapezoidal quadrature on `steps`
/// uniform intervals.
ComplexMatrix dyson_partial_sum(const EffectiveModel& model, const ModeVector& z, double t,
                                std::size_t order, std::size_t steps);

/// Per atom: gamma -> U(z) gamma U(z)^dagger with U evaluated at the original
/// point, point -> e^{-i t nu omega} z, weight unchanged. steps == 0 picks
/// default_steps per atom.
StateValuedMeasure evolve_measure(const EffectiveModel& model, const StateValuedMeasure& initial,
                                  double t, std::size_t steps = 0);

/// Per atom: gamma conjugated by interaction_propagate; points and weights fixed.
/// steps == 0 picks default_steps per atom.
StateValuedMeasure interaction_measure_evolution(const EffectiveModel& model,
                                                 const StateValuedMeasure& initial, double t,
                                                 std::size_t steps = 0);

/// interaction_measure_evolution sampled at t * k / intervals, k = 0..intervals,
/// integrating each interval with `substeps` midpoint steps.
std::vector<StateValuedMeasure> interaction_measure_trajectory(const EffectiveModel& model,
                                                               const StateValuedMeasure& initial,
                                                               double t, std::size_t intervals,
                                                               std::size_t substeps);

/// Trace norm of
///   n^_t(eta) - n^_s(eta) - i int_s^t sum_i w_i [gamma_i(tau), s(tau)] alpha_tau(z_i) e^{2i Re<eta, z_i>} dtau
/// for a family sampled on a uniform grid over [s, t].
double transport_residual(const EffectiveModel& model, std::span<const StateValuedMeasure> family,
                          const ModeVector& eta, double s, double t,
                          Quadrature rule = Quadrature::Trapezoid);

}  // namespace qcsb
