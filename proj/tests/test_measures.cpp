#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qcsb/measures.hpp"
#include "support/oracles.hpp"

using namespace qcsb;

namespace {

ModeVector mv(std::initializer_list<Complex> values) {
  ModeVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index j = 0;
  for (Complex c : values) v[j++] = c;
  return v;
}

ModeVector random_modes(std::mt19937_64& rng, Eigen::Index m, double scale = 1.0) {
  std::normal_distribution<double> normal;
  ModeVector v(m);
  for (Eigen::Index j = 0; j < m; ++j) v[j] = scale * Complex(normal(rng), normal(rng));
  return v;
}

StateValuedMeasure random_measure(std::mt19937_64& rng, std::size_t atoms, Eigen::Index modes, Eigen::Index d,
                                  double mass = 1.0) {
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  std::vector<double> w(atoms);
  double total = 0.0;
  for (double& x : w) total += (x = unit(rng));
  std::vector<Atom> out;
  for (std::size_t i = 0; i < atoms; ++i) {
    out.push_back({mass * w[i] / total, random_modes(rng, modes), oracle::random_density(rng, d)});
  }
  return StateValuedMeasure(std::move(out));
}

ComplexMatrix up() {
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 0) = 1.0;
  return g;
}

}  // namespace

TEST(StateValuedMeasure, RejectsInvalidAtoms) {
  EXPECT_THROW(StateValuedMeasure({}), PreconditionError);
  EXPECT_THROW(StateValuedMeasure({{-0.1, mv({0.0}), up()}, {1.0, mv({0.0}), up()}}), PreconditionError);
  EXPECT_THROW(StateValuedMeasure({{0.7, mv({0.0}), up()}, {0.7, mv({1.0}), up()}}), PreconditionError);
  EXPECT_THROW(StateValuedMeasure({{0.0, mv({0.0}), up()}}), PreconditionError);
  EXPECT_THROW(StateValuedMeasure({{0.5, mv({0.0}), up()}, {0.5, mv({0.0, 1.0}), up()}}), DimensionError);
  EXPECT_THROW(StateValuedMeasure({{1.0, mv({0.0}), 2.0 * up()}}), PreconditionError);
  ComplexMatrix not_positive = ComplexMatrix::Zero(2, 2);
  not_positive(0, 0) = 2.0;
  not_positive(1, 1) = -1.0;
  EXPECT_THROW(StateValuedMeasure({{1.0, mv({0.0}), not_positive}}), PreconditionError);
  EXPECT_THROW(StateValuedMeasure({{0.5, mv({0.0}), up()}, {0.5, mv({0.0}), ComplexMatrix::Identity(3, 3) / 3.0}}),
               DimensionError);
  EXPECT_NO_THROW(StateValuedMeasure({{0.5, mv({0.0}), up()}}));
}

TEST(MeasureFourier, SingleAtomIsPhaseTimesGamma) {
  const ModeVector z = mv({Complex(0.3, -0.8), Complex(1.1, 0.4)});
  const ModeVector eta = mv({Complex(-0.5, 0.2), Complex(0.7, 0.9)});
  const ComplexMatrix gamma = ComplexMatrix::Identity(2, 2) / 2.0;
  const StateValuedMeasure m({{1.0, z, gamma}});
  const double re = (std::conj(eta[0]) * z[0] + std::conj(eta[1]) * z[1]).real();
  const ComplexMatrix expected = std::polar(1.0, 2.0 * re) * gamma;
  EXPECT_LE(max_abs(measure_fourier(m, eta) - expected), 1e-15);
}

TEST(MeasureFourier, ZeroIsBarycenter) {
  std::mt19937_64 rng(11);
  const StateValuedMeasure m = random_measure(rng, 7, 2, 3);
  const ComplexMatrix at_zero = measure_fourier(m, ModeVector::Zero(2));
  EXPECT_EQ(at_zero, m.barycenter());
  EXPECT_NEAR(at_zero.trace().real(), 1.0, 1e-15);
}

TEST(MeasureFourier, SymmetricPairGivesCosine) {
  const ModeVector z = mv({Complex(0.6, 1.3)});
  const ComplexMatrix gamma = up();
  const StateValuedMeasure m({{0.5, z, gamma}, {0.5, -z, gamma}});
  for (double a : {-2.0, -0.7, 0.0, 0.4, 1.9}) {
    const ModeVector eta = mv({Complex(a, 0.5 * a + 0.1)});
    const double phase = 2.0 * (std::conj(eta[0]) * z[0]).real();
    // Two-term sum written out directly.
    const Complex two_term = 0.5 * std::exp(Complex(0.0, phase)) + 0.5 * std::exp(Complex(0.0, -phase));
    EXPECT_NEAR(std::abs(two_term - std::cos(phase)), 0.0, 1e-15);
    EXPECT_LE(max_abs(measure_fourier(m, eta) - two_term * gamma), 1e-15);
  }
}

TEST(MeasureFourier, RejectsWrongModeCount) {
  const StateValuedMeasure m({{1.0, mv({0.0}), up()}});
  EXPECT_THROW(measure_fourier(m, mv({0.0, 0.0})), DimensionError);
}

TEST(MeasureFourier, TraceAtZeroEqualsMassForSubProbability) {
  std::mt19937_64 rng(12);
  const StateValuedMeasure m = random_measure(rng, 5, 1, 2, 0.5);
  EXPECT_NEAR(total_mass(m), 0.5, 1e-15);
  EXPECT_NEAR(measure_fourier(m, ModeVector::Zero(1)).trace().real(), total_mass(m), 1e-15);
}

TEST(MeasureFourier, TraceNormBoundedByMass) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const StateValuedMeasure m = random_measure(rng, 6, 2, 3, trial % 2 == 0 ? 1.0 : 0.6);
    for (int k = 0; k < 10; ++k) {
      const ModeVector eta = random_modes(rng, 2, 2.0);
      EXPECT_LE(trace_norm(measure_fourier(m, eta)), total_mass(m) + 1e-12);
    }
  }
}

TEST(MeasureFourier, CompletelyPositiveDefinite) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 2;
    const StateValuedMeasure m = random_measure(rng, 4, 2, d);
    const int n = 5;
    std::vector<ModeVector> etas;
    std::vector<ComplexMatrix> ts;
    for (int j = 0; j < n; ++j) {
      etas.push_back(random_modes(rng, 2));
      ts.push_back(oracle::random_hermitian(rng, d) + Complex(0.0, 1.0) * oracle::random_hermitian(rng, d));
    }
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) sum += ts[j] * measure_fourier(m, etas[j] - etas[k]) * ts[k].adjoint();
    }
    EXPECT_LE(hermiticity_residual(sum), 1e-9 * std::max(1.0, max_abs(sum)));
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((sum + sum.adjoint()) / 2.0);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(Pushforward, StationaryIsIdentity) {
  std::mt19937_64 rng(21);
  const StateValuedMeasure m = random_measure(rng, 4, 2, 2);
  const StateValuedMeasure p = pushforward_free_field(m, Dispersion({1.0, 2.5}), 3.7, 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(p.atoms()[i].point, m.atoms()[i].point);
    EXPECT_EQ(p.atoms()[i].gamma, m.atoms()[i].gamma);
    EXPECT_EQ(p.atoms()[i].weight, m.atoms()[i].weight);
  }
}

TEST(Pushforward, FullPeriodIsIdentity) {
  const double w = 1.7;
  const StateValuedMeasure m({{1.0, mv({Complex(0.4, -1.2)}), up()}});
  const StateValuedMeasure p = pushforward_free_field(m, Dispersion({w}), 2.0 * std::numbers::pi / w, 1.0);
  EXPECT_LE(std::abs(p.atoms()[0].point[0] - m.atoms()[0].point[0]), 1e-14);
}

TEST(Pushforward, MatchesComponentwisePhase) {
  const ModeVector z = mv({Complex(0.4, -1.2), Complex(-0.3, 0.5)});
  const StateValuedMeasure m({{1.0, z, up()}});
  const double t = 0.9;
  const StateValuedMeasure p = pushforward_free_field(m, Dispersion({1.0, 3.0}), t, 1.0);
  EXPECT_LE(std::abs(p.atoms()[0].point[0] - std::polar(1.0, -t * 1.0) * z[0]), 1e-15);
  EXPECT_LE(std::abs(p.atoms()[0].point[1] - std::polar(1.0, -t * 3.0) * z[1]), 1e-15);
}

TEST(Pushforward, PreservesNormsMassAndGammas) {
  std::mt19937_64 rng(22);
  const StateValuedMeasure m = random_measure(rng, 6, 3, 2, 0.8);
  const Dispersion omega({0.5, 1.0, 4.0});
  for (double t : {0.1, 1.0, 17.3}) {
    const StateValuedMeasure p = pushforward_free_field(m, omega, t, 1.0);
    EXPECT_EQ(total_mass(p), total_mass(m));
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_NEAR(p.atoms()[i].point.norm(), m.atoms()[i].point.norm(), 1e-14);
      EXPECT_EQ(p.atoms()[i].gamma, m.atoms()[i].gamma);
    }
  }
}

TEST(Pushforward, GroupActionInTime) {
  std::mt19937_64 rng(23);
  const StateValuedMeasure m = random_measure(rng, 5, 2, 2);
  const Dispersion omega({1.0, 2.0});
  const double t = 0.75, s = 0.5;
  const StateValuedMeasure two_step = pushforward_free_field(pushforward_free_field(m, omega, t, 1.0), omega, s, 1.0);
  const StateValuedMeasure one_step = pushforward_free_field(m, omega, t + s, 1.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    // Equal up to the rounding of one complex rotation.
    EXPECT_LE((two_step.atoms()[i].point - one_step.atoms()[i].point).cwiseAbs().maxCoeff(),
              4e-16 * m.atoms()[i].point.cwiseAbs().maxCoeff() + 1e-300);
  }
}

TEST(GaussianSampler, DegenerateVarianceStaysNearOrigin) {
  const StateValuedMeasure m = sample_gaussian_measure(2, {1e-20, 1e-20}, up(), 1, 5);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.atoms()[0].weight, 1.0);
  EXPECT_LE(m.atoms()[0].point.norm(), 1e-8);
  EXPECT_EQ(m.atoms()[0].gamma, up());
}

TEST(GaussianSampler, SecondMomentMatchesVariances) {
  const std::vector<double> variances = {0.5, 2.0};
  const std::size_t k = 10000;
  const StateValuedMeasure m = sample_gaussian_measure(2, variances, up(), k, 42);
  ASSERT_EQ(m.size(), k);
  double mean_sq = 0.0;
  for (const Atom& a : m.atoms()) {
    EXPECT_EQ(a.weight, 1.0 / static_cast<double>(k));
    mean_sq += a.point.squaredNorm();
  }
  mean_sq /= static_cast<double>(k);
  const double expected = variances[0] + variances[1];
  EXPECT_LE(std::abs(mean_sq - expected), 0.05 * expected);
  EXPECT_NEAR(total_mass(m), 1.0, 1e-12);
}

TEST(GaussianSampler, SameSeedSameEnsemble) {
  const StateValuedMeasure a = sample_gaussian_measure(2, {1.0, 1.0}, up(), 100, 7);
  const StateValuedMeasure b = sample_gaussian_measure(2, {1.0, 1.0}, up(), 100, 7);
  const StateValuedMeasure c = sample_gaussian_measure(2, {1.0, 1.0}, up(), 100, 8);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.atoms()[i].point, b.atoms()[i].point);
    differs = differs || a.atoms()[i].point != c.atoms()[i].point;
  }
  EXPECT_TRUE(differs);
}

TEST(GaussianSampler, RejectsBadArguments) {
  EXPECT_THROW(sample_gaussian_measure(1, {1.0}, up(), 0, 1), PreconditionError);
  EXPECT_THROW(sample_gaussian_measure(1, {0.0}, up(), 3, 1), PreconditionError);
  EXPECT_THROW(sample_gaussian_measure(1, {-1.0}, up(), 3, 1), PreconditionError);
  EXPECT_THROW(sample_gaussian_measure(2, {1.0}, up(), 3, 1), DimensionError);
}
