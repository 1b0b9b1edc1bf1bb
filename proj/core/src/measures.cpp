#include "qcsb/measures.hpp"

#include <cmath>
#include <random>
#include <string>

namespace qcsb {

namespace {

constexpr double kMassSlack = 1e-12;

void check_gamma(const ComplexMatrix& gamma, Eigen::Index dim, std::size_t atom) {
  const std::string where = "StateValuedMeasure: atom " + std::to_string(atom);
  if (gamma.rows() != dim || gamma.cols() != dim) {
    throw DimensionError(where + " has a gamma of the wrong dimension");
  }
  if (std::abs(gamma.trace() - Complex(1.0)) > 1e-10) {
    throw PreconditionError(where + " has a gamma without unit trace");
  }
  if (!is_hermitian(gamma) || herm_eig(gamma).eigenvalues[0] < -1e-10) {
    throw PreconditionError(where + " has a gamma that is not a density matrix");
  }
}

}  // namespace

StateValuedMeasure::StateValuedMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw PreconditionError("StateValuedMeasure: at least one atom is required");
  const Eigen::Index modes = atoms_.front().point.size();
  const Eigen::Index dim = atoms_.front().gamma.rows();
  if (modes < 1 || dim < 1) throw DimensionError("StateValuedMeasure: empty point or gamma");
  double mass = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw PreconditionError("StateValuedMeasure: negative or non-finite weight");
    }
    if (a.point.size() != modes) {
      throw DimensionError("StateValuedMeasure: atoms disagree on the mode count");
    }
    if (!a.point.allFinite()) throw PreconditionError("StateValuedMeasure: non-finite point");
    check_gamma(a.gamma, dim, i);
    mass += a.weight;
  }
  if (!(mass > 0.0) || mass > 1.0 + kMassSlack) {
    throw PreconditionError("StateValuedMeasure: total mass must lie in (0, 1]");
  }
}

ComplexMatrix StateValuedMeasure::barycenter() const {
  ComplexMatrix out = ComplexMatrix::Zero(atoms_.front().gamma.rows(), atoms_.front().gamma.cols());
  for (const Atom& a : atoms_) out += a.weight * a.gamma;
  return out;
}

double total_mass(const StateValuedMeasure& measure) {
  double mass = 0.0;
  for (const Atom& a : measure.atoms()) mass += a.weight;
  return mass;
}

ComplexMatrix measure_fourier(const StateValuedMeasure& measure, const ModeVector& eta) {
  if (static_cast<std::size_t>(eta.size()) != measure.modes()) {
    throw DimensionError("measure_fourier: eta has the wrong number of modes");
  }
  const Eigen::Index d = static_cast<Eigen::Index>(measure.spin_dimension());
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const Atom& a : measure.atoms()) {
    const double phase = 2.0 * inner(eta, a.point).real();
    out += (a.weight * std::polar(1.0, phase)) * a.gamma;
  }
  return out;
}

StateValuedMeasure pushforward_free_field(const StateValuedMeasure& measure, const Dispersion& omega,
                                          double t, double nu) {
  std::vector<Atom> atoms = measure.atoms();
  for (Atom& a : atoms) a.point = omega.free_flow(a.point, t, nu);
  return StateValuedMeasure(std::move(atoms));
}

StateValuedMeasure sample_gaussian_measure(std::size_t modes, const std::vector<double>& variances,
                                           const ComplexMatrix& gamma0, std::size_t samples,
                                           std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("sample_gaussian_measure: need at least one sample");
  if (variances.size() != modes || modes == 0) {
    throw DimensionError("sample_gaussian_measure: one variance per mode is required");
  }
  for (double v : variances) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw PreconditionError("sample_gaussian_measure: variances must be positive");
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Atom> atoms;
  atoms.reserve(samples);
  const double w = 1.0 / static_cast<double>(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    ModeVector z(static_cast<Eigen::Index>(modes));
    for (std::size_t j = 0; j < modes; ++j) {
      const double sd = std::sqrt(0.5 * variances[j]);
      const double re = sd * normal(rng);
      const double im = sd * normal(rng);
      z[static_cast<Eigen::Index>(j)] = Complex(re, im);
    }
    atoms.push_back({w, std::move(z), gamma0});
  }
  return StateValuedMeasure(std::move(atoms));
}

}  // namespace qcsb
