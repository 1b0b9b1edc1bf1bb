#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qcsb {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Thrown when operand shapes do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an input violates a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an iterative numerical kernel fails.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Largest matrix side the library will build. Dense D^2 storage beyond this
/// is not a desk-scale workload.
inline constexpr std::size_t kMaxDimension = 8192;

struct HermitianEig {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // unitary, columns are eigenvectors
};

/// Max-entry norm.
double max_abs(const ComplexMatrix& a);

/// 1e-8 * (1 + ||A||_max).
double hermiticity_tolerance(const ComplexMatrix& a);

/// ||A - A^dagger||_max.
double hermiticity_residual(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a);

HermitianEig herm_eig(const ComplexMatrix& a);

/// exp(i s A) for Hermitian A.
ComplexMatrix unitary_exp(const ComplexMatrix& a, double s);

/// exp(i s A) from a cached decomposition of A.
ComplexMatrix unitary_exp(const HermitianEig& eig, double s);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Traces out the second (bosonic) factor of a spin (x) boson operator. The
/// joint index is spin * d_boson + boson.
ComplexMatrix partial_trace_boson(const ComplexMatrix& joint, std::size_t d_spin,
                                  std::size_t d_boson);

/// Diagonal of the bosonic marginal, i.e. the occupation-basis weights.
RealVector boson_marginal_diagonal(const ComplexMatrix& joint, std::size_t d_spin,
                                   std::size_t d_boson);

/// (1/2) sum |lambda_k(rho - sigma)| for Hermitian inputs.
double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// Sum of singular values; works for non-Hermitian operators such as Fourier
/// transforms of states.
double trace_norm(const ComplexMatrix& a);

/// Composite rules on a uniform grid. Simpson uses the 3/8 rule on the last
/// three intervals when the interval count is odd, and falls back to the
/// trapezoid rule for a single interval.
enum class Quadrature { Trapezoid, Simpson };

/// Weights w_k for int f ~ dt * sum_k w_k f(t_k) over `points` grid points.
RealVector quadrature_weights(std::size_t points, Quadrature rule);

/// B^dagger A B computed with one temporary.
ComplexMatrix conjugate(const ComplexMatrix& unitary, const ComplexMatrix& a);

}  // namespace qcsb
