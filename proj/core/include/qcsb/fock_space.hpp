#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qcsb/linalg.hpp"

namespace qcsb {

/// Amplitudes over the M one-particle modes. The one-particle inner product
/// <f, g> = sum conj(f_j) g_j is antilinear in the first slot.
using ModeVector = ComplexVector;

Complex inner(const ModeVector& f, const ModeVector& g);

/// Strictly positive single-particle frequencies, one per mode.
class Dispersion {
 public:
  explicit Dispersion(std::vector<double> frequencies);

  std::size_t modes() const { return frequencies_.size(); }
  double operator[](std::size_t j) const { return frequencies_[j]; }
  const std::vector<double>& frequencies() const { return frequencies_; }
  double max() const;

  /// Componentwise e^{-i t nu omega_j} z_j.
  ModeVector free_flow(const ModeVector& z, double t, double nu) const;

 private:
  std::vector<double> frequencies_;
};

/// Multimode bosonic Fock space truncated by independent per-mode occupation
/// cutoffs. Basis states are occupation multi-indices ordered
/// lexicographically, first mode most significant.
class FockSpace {
 public:
  FockSpace(std::vector<int> cutoffs, double epsilon);

  std::size_t modes() const { return cutoffs_.size(); }
  std::size_t dimension() const { return dimension_; }
  double epsilon() const { return epsilon_; }
  const std::vector<int>& cutoffs() const { return cutoffs_; }

  /// Occupation of `mode` in basis state `index`.
  int occupation(std::size_t index, std::size_t mode) const {
    return occupations_[index * cutoffs_.size() + mode];
  }
  std::vector<int> occupations(std::size_t index) const;
  int total_occupation(std::size_t index) const;
  std::size_t index_of(std::span<const int> occupation) const;

  /// True when every mode sits at least one rung below its cutoff.
  bool truncation_safe(std::size_t index) const;
  /// True when some mode sits exactly at its cutoff.
  bool at_cutoff(std::size_t index) const;

  std::vector<std::size_t> truncation_safe_indices() const;

 private:
  std::vector<int> cutoffs_;
  std::vector<std::size_t> strides_;
  std::vector<int> occupations_;
  double epsilon_;
  std::size_t dimension_;
};

/// a_eps(f) = sum_j conj(f_j) a_eps,j with <n-1|a_eps,j|n> = sqrt(eps n).
ComplexMatrix annihilation(const FockSpace& fock, const ModeVector& f);

/// a*_eps(f), the adjoint of annihilation(fock, f).
ComplexMatrix creation(const FockSpace& fock, const ModeVector& f);

/// dGamma_eps(omega): diagonal, eigenvalue eps * sum_j omega_j n_j.
ComplexMatrix d_gamma(const FockSpace& fock, const Dispersion& omega);

/// Diagonal of d_gamma as a real vector.
RealVector d_gamma_diagonal(const FockSpace& fock, const Dispersion& omega);

/// eps * total occupation, i.e. dGamma_eps(1).
RealVector number_diagonal(const FockSpace& fock);

/// Segal field phi_eps(g) = a*_eps(g) + a_eps(g).
ComplexMatrix field_op(const FockSpace& fock, const ModeVector& g);

/// W_eps(eta) = exp(i phi_eps(eta)).
ComplexMatrix weyl_op(const FockSpace& fock, const ModeVector& eta);

/// Normalized coherent vector with a_eps(f) Psi ~= <f, z> Psi. Throws
/// PreconditionError unless |z_j|^2/eps <= cutoff_j / 4 for every mode.
ComplexVector coherent_vector(const FockSpace& fock, const ModeVector& z);

/// |Psi><Psi| for coherent_vector(fock, z).
ComplexMatrix coherent_state(const FockSpace& fock, const ModeVector& z);

/// Mass of the untruncated coherent state that lies outside the cutoffs.
double coherent_tail_mass(const FockSpace& fock, const ModeVector& z);

/// P(N > cutoff) for N ~ Poisson(mean).
double poisson_tail(double mean, int cutoff);

/// Smallest cutoff with 4*mean <= cutoff and poisson_tail(mean, cutoff) < tail.
int safe_cutoff(double mean, double tail);

}  // namespace qcsb
