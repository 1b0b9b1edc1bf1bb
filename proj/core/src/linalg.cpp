#include "qcsb/linalg.hpp"

#include <cmath>

namespace qcsb {

double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double hermiticity_tolerance(const ComplexMatrix& a) {
  return 1e-8 * (1.0 + max_abs(a));
}

double hermiticity_residual(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("hermiticity_residual: matrix is not square");
  }
  return max_abs(a - a.adjoint());
}

bool is_hermitian(const ComplexMatrix& a) {
  return a.rows() == a.cols() && hermiticity_residual(a) <= hermiticity_tolerance(a);
}

HermitianEig herm_eig(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError("herm_eig: expected a non-empty square matrix");
  }
  if (!a.allFinite()) {
    throw PreconditionError("herm_eig: non-finite entries");
  }
  if (hermiticity_residual(a) > hermiticity_tolerance(a)) {
    throw PreconditionError("herm_eig: matrix is not Hermitian");
  }
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("herm_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix unitary_exp(const HermitianEig& eig, double s) {
  const Eigen::Index n = eig.eigenvalues.size();
  if (s == 0.0) return ComplexMatrix::Identity(n, n);
  ComplexVector phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases[k] = std::polar(1.0, s * eig.eigenvalues[k]);
  }
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

ComplexMatrix unitary_exp(const ComplexMatrix& a, double s) {
  return unitary_exp(herm_eig(a), s);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (rows > kMaxDimension || cols > kMaxDimension) {
    throw DimensionError("kron: result exceeds the maximum dimension");
  }
  ComplexMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace {

void check_joint(const ComplexMatrix& joint, std::size_t d_spin, std::size_t d_boson,
                 const char* who) {
  const auto d = static_cast<Eigen::Index>(d_spin * d_boson);
  if (d_spin == 0 || d_boson == 0 || joint.rows() != d || joint.cols() != d) {
    throw DimensionError(std::string(who) + ": joint dimension does not equal d_spin * d_boson");
  }
}

}  // namespace

ComplexMatrix partial_trace_boson(const ComplexMatrix& joint, std::size_t d_spin,
                                  std::size_t d_boson) {
  check_joint(joint, d_spin, d_boson, "partial_trace_boson");
  const auto ds = static_cast<Eigen::Index>(d_spin);
  const auto db = static_cast<Eigen::Index>(d_boson);
  ComplexMatrix out(ds, ds);
  for (Eigen::Index a = 0; a < ds; ++a) {
    for (Eigen::Index b = 0; b < ds; ++b) {
      out(a, b) = joint.block(a * db, b * db, db, db).trace();
    }
  }
  return out;
}

RealVector boson_marginal_diagonal(const ComplexMatrix& joint, std::size_t d_spin,
                                   std::size_t d_boson) {
  check_joint(joint, d_spin, d_boson, "boson_marginal_diagonal");
  const auto db = static_cast<Eigen::Index>(d_boson);
  RealVector out = RealVector::Zero(db);
  for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(d_spin); ++a) {
    out += joint.diagonal().segment(a * db, db).real();
  }
  return out;
}

double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw DimensionError("trace_distance: dimension mismatch");
  }
  const ComplexMatrix diff = rho - sigma;
  if (hermiticity_residual(diff) > hermiticity_tolerance(diff)) {
    throw PreconditionError("trace_distance: inputs are not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (diff + diff.adjoint()),
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("trace_distance: eigensolver did not converge");
  }
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double trace_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

ComplexMatrix conjugate(const ComplexMatrix& unitary, const ComplexMatrix& a) {
  ComplexMatrix tmp = a * unitary;
  return unitary.adjoint() * tmp;
}

RealVector quadrature_weights(std::size_t points, Quadrature rule) {
  if (points < 2) throw PreconditionError("quadrature_weights: need at least 2 grid points");
  const std::size_t n = points - 1;
  RealVector w = RealVector::Zero(static_cast<Eigen::Index>(points));
  if (rule == Quadrature::Trapezoid || n == 1) {
    w.setOnes();
    w[0] = 0.5;
    w[static_cast<Eigen::Index>(n)] = 0.5;
    return w;
  }
  const std::size_t simpson_end = n % 2 == 0 ? n : n - 3;
  for (std::size_t k = 0; k < simpson_end; k += 2) {
    w[static_cast<Eigen::Index>(k)] += 1.0 / 3.0;
    w[static_cast<Eigen::Index>(k + 1)] += 4.0 / 3.0;
    w[static_cast<Eigen::Index>(k + 2)] += 1.0 / 3.0;
  }
  if (simpson_end != n) {
    const auto k = static_cast<Eigen::Index>(simpson_end);
    w[k] += 3.0 / 8.0;
    w[k + 1] += 9.0 / 8.0;
    w[k + 2] += 9.0 / 8.0;
    w[k + 3] += 3.0 / 8.0;
  }
  return w;
}

}  // namespace qcsb
