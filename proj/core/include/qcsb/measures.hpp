#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qcsb/fock_space.hpp"
#include "qcsb/linalg.hpp"

namespace qcsb {

/// One atom w * delta_z carrying the spin density matrix gamma(z).
struct Atom {
  double weight = 0.0;
  ModeVector point;
  ComplexMatrix gamma;
};

/// Finite atomic state-valued measure sum_i w_i gamma_i delta_{z_i}.
/// Invariants (checked on construction): at least one atom, weights >= 0,
/// total mass in (0, 1], equal mode counts, each gamma a unit-trace positive
/// matrix of the same dimension.
class StateValuedMeasure {
 public:
  explicit StateValuedMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  std::size_t modes() const { return static_cast<std::size_t>(atoms_.front().point.size()); }
  std::size_t spin_dimension() const { return static_cast<std::size_t>(atoms_.front().gamma.rows()); }

  /// sum_i w_i gamma_i, summed in atom order.
  ComplexMatrix barycenter() const;

 private:
  std::vector<Atom> atoms_;
};

double total_mass(const StateValuedMeasure& measure);

/// m^(eta) = sum_i w_i e^{2i Re<eta, z_i>} gamma_i.
ComplexMatrix measure_fourier(const StateValuedMeasure& measure, const ModeVector& eta);

/// Moves each point along z -> e^{-i t nu omega} z; weights and gammas stay.
StateValuedMeasure pushforward_free_field(const StateValuedMeasure& measure, const Dispersion& omega,
                                          double t, double nu);

/// K atoms of weight 1/K with points drawn from independent circular complex
/// Gaussians, E|z_j|^2 = variances[j], each carrying gamma0. Deterministic in
/// `seed` on a given platform.
StateValuedMeasure sample_gaussian_measure(std::size_t modes, const std::vector<double>& variances,
                                           const ComplexMatrix& gamma0, std::size_t samples,
                                           std::uint64_t seed);

}  // namespace qcsb
