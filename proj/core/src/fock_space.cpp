#include "qcsb/fock_space.hpp"

#include <cmath>
#include <string>

namespace qcsb {

Complex inner(const ModeVector& f, const ModeVector& g) {
  if (f.size() != g.size()) {
    throw DimensionError("inner: mode vectors have different lengths");
  }
  return f.dot(g);  // Eigen conjugates the left operand
}

Dispersion::Dispersion(std::vector<double> frequencies) : frequencies_(std::move(frequencies)) {
  if (frequencies_.empty()) {
    throw PreconditionError("Dispersion: at least one mode is required");
  }
  for (double w : frequencies_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw PreconditionError("Dispersion: frequencies must be finite and strictly positive");
    }
  }
}

double Dispersion::max() const {
  double m = 0.0;
  for (double w : frequencies_) m = std::max(m, w);
  return m;
}

ModeVector Dispersion::free_flow(const ModeVector& z, double t, double nu) const {
  if (static_cast<std::size_t>(z.size()) != modes()) {
    throw DimensionError("Dispersion::free_flow: mode count mismatch");
  }
  ModeVector out(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    out[j] = std::polar(1.0, -t * nu * frequencies_[static_cast<std::size_t>(j)]) * z[j];
  }
  return out;
}

FockSpace::FockSpace(std::vector<int> cutoffs, double epsilon)
    : cutoffs_(std::move(cutoffs)), epsilon_(epsilon), dimension_(1) {
  if (cutoffs_.empty()) {
    throw PreconditionError("FockSpace: at least one mode is required");
  }
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    throw PreconditionError("FockSpace: epsilon must be positive");
  }
  for (int c : cutoffs_) {
    if (c < 1) throw PreconditionError("FockSpace: cutoffs must be at least 1");
    dimension_ *= static_cast<std::size_t>(c) + 1;
    if (dimension_ > kMaxDimension) {
      throw DimensionError("FockSpace: dimension exceeds the maximum");
    }
  }
  const std::size_t m = cutoffs_.size();
  strides_.assign(m, 1);
  for (std::size_t j = m - 1; j > 0; --j) {
    strides_[j - 1] = strides_[j] * (static_cast<std::size_t>(cutoffs_[j]) + 1);
  }
  occupations_.resize(dimension_ * m);
  for (std::size_t idx = 0; idx < dimension_; ++idx) {
    std::size_t rest = idx;
    for (std::size_t j = 0; j < m; ++j) {
      occupations_[idx * m + j] = static_cast<int>(rest / strides_[j]);
      rest %= strides_[j];
    }
  }
}

std::vector<int> FockSpace::occupations(std::size_t index) const {
  const auto first = occupations_.begin() + static_cast<std::ptrdiff_t>(index * modes());
  return {first, first + static_cast<std::ptrdiff_t>(modes())};
}

int FockSpace::total_occupation(std::size_t index) const {
  int total = 0;
  for (std::size_t j = 0; j < modes(); ++j) total += occupation(index, j);
  return total;
}

std::size_t FockSpace::index_of(std::span<const int> occupation) const {
  if (occupation.size() != modes()) {
    throw DimensionError("FockSpace::index_of: wrong number of modes");
  }
  std::size_t idx = 0;
  for (std::size_t j = 0; j < modes(); ++j) {
    if (occupation[j] < 0 || occupation[j] > cutoffs_[j]) {
      throw PreconditionError("FockSpace::index_of: occupation outside the truncation");
    }
    idx += static_cast<std::size_t>(occupation[j]) * strides_[j];
  }
  return idx;
}

bool FockSpace::truncation_safe(std::size_t index) const {
  for (std::size_t j = 0; j < modes(); ++j) {
    if (occupation(index, j) >= cutoffs_[j]) return false;
  }
  return true;
}

bool FockSpace::at_cutoff(std::size_t index) const {
  for (std::size_t j = 0; j < modes(); ++j) {
    if (occupation(index, j) == cutoffs_[j]) return true;
  }
  return false;
}

std::vector<std::size_t> FockSpace::truncation_safe_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dimension_; ++i) {
    if (truncation_safe(i)) out.push_back(i);
  }
  return out;
}

namespace {

void check_modes(const FockSpace& fock, const ModeVector& f, const char* who) {
  if (static_cast<std::size_t>(f.size()) != fock.modes()) {
    throw DimensionError(std::string(who) + ": mode vector length does not match the Fock space");
  }
}

}  // namespace

ComplexMatrix annihilation(const FockSpace& fock, const ModeVector& f) {
  check_modes(fock, f, "annihilation");
  const auto d = static_cast<Eigen::Index>(fock.dimension());
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  const double eps = fock.epsilon();
  std::vector<int> occ;
  for (std::size_t n = 0; n < fock.dimension(); ++n) {
    occ = fock.occupations(n);
    for (std::size_t j = 0; j < fock.modes(); ++j) {
      const int nj = occ[j];
      if (nj == 0) continue;
      occ[j] = nj - 1;
      const std::size_t m = fock.index_of(occ);
      occ[j] = nj;
      a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) +=
          std::conj(f[static_cast<Eigen::Index>(j)]) * std::sqrt(eps * nj);
    }
  }
  return a;
}

ComplexMatrix creation(const FockSpace& fock, const ModeVector& f) {
  return annihilation(fock, f).adjoint();
}

RealVector d_gamma_diagonal(const FockSpace& fock, const Dispersion& omega) {
  if (omega.modes() != fock.modes()) {
    throw DimensionError("d_gamma: dispersion length does not match the Fock space");
  }
  RealVector diag(static_cast<Eigen::Index>(fock.dimension()));
  for (std::size_t n = 0; n < fock.dimension(); ++n) {
    double e = 0.0;
    for (std::size_t j = 0; j < fock.modes(); ++j) e += omega[j] * fock.occupation(n, j);
    diag[static_cast<Eigen::Index>(n)] = fock.epsilon() * e;
  }
  return diag;
}

ComplexMatrix d_gamma(const FockSpace& fock, const Dispersion& omega) {
  return d_gamma_diagonal(fock, omega).cast<Complex>().asDiagonal();
}

RealVector number_diagonal(const FockSpace& fock) {
  return d_gamma_diagonal(fock, Dispersion(std::vector<double>(fock.modes(), 1.0)));
}

ComplexMatrix field_op(const FockSpace& fock, const ModeVector& g) {
  const ComplexMatrix a = annihilation(fock, g);
  return a + a.adjoint();
}

namespace {

// Single-mode W(c). W(-c) is formed as the adjoint of W(c), so W(c)^dagger = W(-c) holds bit for bit.
ComplexMatrix single_mode_weyl(int cutoff, double epsilon, Complex c) {
  const FockSpace mode({cutoff}, epsilon);
  if (c == Complex(0.0)) return ComplexMatrix::Identity(cutoff + 1, cutoff + 1);
  ModeVector v(1);
  const bool flip = c.real() < 0.0 || (c.real() == 0.0 && c.imag() < 0.0);
  v[0] = flip ? -c : c;
  const ComplexMatrix w = unitary_exp(field_op(mode, v), 1.0);
  return flip ? ComplexMatrix(w.adjoint()) : w;
}

}  // namespace

ComplexMatrix weyl_op(const FockSpace& fock, const ModeVector& eta) {
  check_modes(fock, eta, "weyl_op");
  // Fields on distinct modes commute on the box truncation, so W factorizes mode by mode.
  ComplexMatrix out = single_mode_weyl(fock.cutoffs()[0], fock.epsilon(), eta[0]);
  for (std::size_t j = 1; j < fock.modes(); ++j) {
    out = kron(out, single_mode_weyl(fock.cutoffs()[j], fock.epsilon(), eta[static_cast<Eigen::Index>(j)]));
  }
  return out;
}

ComplexVector coherent_vector(const FockSpace& fock, const ModeVector& z) {
  check_modes(fock, z, "coherent_vector");
  const double eps = fock.epsilon();
  std::vector<std::vector<Complex>> per_mode(fock.modes());
  for (std::size_t j = 0; j < fock.modes(); ++j) {
    const Complex zj = z[static_cast<Eigen::Index>(j)];
    const double mean = std::norm(zj) / eps;
    if (mean > 0.25 * fock.cutoffs()[j]) {
      throw PreconditionError("coherent_vector: mean occupation " + std::to_string(mean) +
                              " of mode " + std::to_string(j) +
                              " exceeds a quarter of its cutoff " +
                              std::to_string(fock.cutoffs()[j]));
    }
    const Complex beta = zj / std::sqrt(eps);
    auto& amp = per_mode[j];
    amp.resize(static_cast<std::size_t>(fock.cutoffs()[j]) + 1);
    amp[0] = std::exp(-0.5 * mean);
    for (std::size_t n = 1; n < amp.size(); ++n) {
      amp[n] = amp[n - 1] * beta / std::sqrt(static_cast<double>(n));
    }
  }
  ComplexVector psi(static_cast<Eigen::Index>(fock.dimension()));
  for (std::size_t n = 0; n < fock.dimension(); ++n) {
    Complex c = 1.0;
    for (std::size_t j = 0; j < fock.modes(); ++j) {
      c *= per_mode[j][static_cast<std::size_t>(fock.occupation(n, j))];
    }
    psi[static_cast<Eigen::Index>(n)] = c;
  }
  psi.normalize();
  return psi;
}

ComplexMatrix coherent_state(const FockSpace& fock, const ModeVector& z) {
  const ComplexVector psi = coherent_vector(fock, z);
  return psi * psi.adjoint();
}

double poisson_tail(double mean, int cutoff) {
  if (mean < 0.0) throw PreconditionError("poisson_tail: negative mean");
  if (mean == 0.0) return 0.0;
  double tail = 0.0;
  for (int n = cutoff + 1;; ++n) {
    const double term = std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
    tail += term;
    if (n > mean && term < 1e-18 * tail) break;
    if (n > cutoff + 100000) break;
  }
  return tail;
}

int safe_cutoff(double mean, double tail) {
  int cutoff = std::max(1, static_cast<int>(std::ceil(4.0 * mean)));
  while (poisson_tail(mean, cutoff) >= tail) ++cutoff;
  return cutoff;
}

double coherent_tail_mass(const FockSpace& fock, const ModeVector& z) {
  check_modes(fock, z, "coherent_tail_mass");
  double log_inside = 0.0;
  for (std::size_t j = 0; j < fock.modes(); ++j) {
    const double mean = std::norm(z[static_cast<Eigen::Index>(j)]) / fock.epsilon();
    log_inside += std::log1p(-poisson_tail(mean, fock.cutoffs()[j]));
  }
  return -std::expm1(log_inside);
}

}  // namespace qcsb
