#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "qcsb/fock_space.hpp"
#include "qcsb/linalg.hpp"

namespace qcsb {

/// Scaling of the free field energy. Stationary: nu(eps) = 1, so
/// eps * nu(eps) -> 0. FreeField: nu(eps) = 1/eps, so eps * nu(eps) -> 1.
enum class NuRegime { Stationary, FreeField };

double nu_of_epsilon(NuRegime regime, double epsilon);
/// lim eps * nu(eps).
double nu_limit(NuRegime regime);

std::string_view to_string(NuRegime regime);
NuRegime parse_nu_regime(std::string_view name);

/// H_eps = S (x) 1 + nu(eps) 1 (x) dGamma_eps(omega) + s (x) phi_eps(g).
struct SpinBosonModel {
  ComplexMatrix spin_hamiltonian;
  ComplexMatrix coupling;
  Dispersion omega;
  ModeVector form_factor;
  NuRegime regime;
  FockSpace fock;

  std::size_t spin_dimension() const { return static_cast<std::size_t>(spin_hamiltonian.rows()); }
  std::size_t boson_dimension() const { return fock.dimension(); }
  std::size_t dimension() const { return spin_dimension() * boson_dimension(); }
  double epsilon() const { return fock.epsilon(); }
  double nu() const { return nu_of_epsilon(regime, fock.epsilon()); }
};

/// Throws DimensionError / PreconditionError when the model is inconsistent.
void validate(const SpinBosonModel& model);

/// Density matrix on spin (x) boson at a given time.
struct JointState {
  ComplexMatrix rho;
  double epsilon = 0.0;
  double time = 0.0;
};

/// Checks unit trace, Hermiticity and positivity (min eigenvalue >= -1e-10).
void validate_joint_state(const JointState& state);

ComplexMatrix assemble_hamiltonian(const SpinBosonModel& model);

/// H_eps restricted to g = 0.
ComplexMatrix free_hamiltonian(const SpinBosonModel& model);

/// (U (x) diag(phases)) rho (U (x) diag(phases))^dagger without forming the
/// Kronecker product.
ComplexMatrix conjugate_by_product(const ComplexMatrix& rho, const ComplexMatrix& spin_unitary,
                                   const ComplexVector& boson_phases);

/// Exact dynamics generated by H_eps. The Hamiltonian and the spin part of
/// the free Hamiltonian are diagonalized once at construction.
class MicroscopicDynamics {
 public:
  explicit MicroscopicDynamics(SpinBosonModel model);

  const SpinBosonModel& model() const { return model_; }
  const HermitianEig& spectrum() const { return hamiltonian_eig_; }

  /// e^{-itH} rho e^{itH}; the returned state carries time state.time + t.
  JointState evolve(const JointState& state, double t) const;

  /// evolve(initial, t) for every t in `times`, sharing the basis change.
  std::vector<JointState> trajectory(const JointState& initial, std::span<const double> times) const;

  /// Upsilon(t) = e^{itH^f} Gamma(t) e^{-itH^f}, t = state.time.
  JointState interaction_picture(const JointState& state) const;
  /// Inverse of interaction_picture.
  JointState schrodinger_picture(const JointState& upsilon) const;

  /// e^{-itH^f} as a spin unitary and boson phases.
  ComplexMatrix free_spin_propagator(double t) const;
  ComplexVector free_boson_phases(double t) const;

  /// s(tau) = e^{i tau S} s e^{-i tau S}.
  ComplexMatrix spin_coupling_at(double tau) const;
  /// e^{i eps nu(eps) tau omega} g, so that phi_eps(tau) = phi_eps(form_factor_at(tau)).
  ModeVector form_factor_at(double tau) const;

 private:
  SpinBosonModel model_;
  HermitianEig hamiltonian_eig_;
  HermitianEig spin_eig_;
  RealVector boson_free_energies_;
};

JointState evolve(const SpinBosonModel& model, const JointState& state, double t);
JointState interaction_picture(const SpinBosonModel& model, const JointState& state);

/// tr_boson(rho (1 (x) weyl)) for a precomputed Weyl operator.
ComplexMatrix quantum_fourier(const ComplexMatrix& rho, std::size_t d_spin, const ComplexMatrix& weyl);

/// Gamma-hat(eta) = tr_boson(Gamma (1 (x) W_eps(eta))).
ComplexMatrix quantum_fourier(const SpinBosonModel& model, const JointState& state,
                              const ModeVector& eta);

/// tr((dGamma_eps(1) + 1)^delta Gamma).
double number_moment(const FockSpace& fock, std::size_t d_spin, const JointState& state,
                     double delta);

/// Weight of the boson marginal on states where some mode sits at its cutoff.
double top_rung_population(const FockSpace& fock, std::size_t d_spin, const JointState& state);

/// Residual of the weak Duhamel identity for the interaction-picture
/// trajectory on a uniform time grid, tested against `test_op`:
///   | tr(Y^(t)(eta) k) - tr(Y^(s)(eta) k) + i int_s^t tr([V(tau), Y(tau)] (k (x) W(eta))) dtau |
/// with V(tau) = s(tau) (x) phi_eps(tau) and composite quadrature on the grid.
double duhamel_residual(const MicroscopicDynamics& dynamics, std::span<const JointState> trajectory,
                        const ModeVector& eta, const ComplexMatrix& test_op,
                        Quadrature rule = Quadrature::Simpson);

/// duhamel_residual for several test operators sharing one pass over the grid.
std::vector<double> duhamel_residuals(const MicroscopicDynamics& dynamics,
                                      std::span<const JointState> trajectory, const ModeVector& eta,
                                      std::span<const ComplexMatrix> test_ops,
                                      Quadrature rule = Quadrature::Simpson);

/// Matrix units E_ab plus the generalized Pauli basis of the spin space.
std::vector<ComplexMatrix> default_test_operators(std::size_t d_spin);

}  // namespace qcsb
