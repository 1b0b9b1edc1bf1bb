// Seeded randomized checks of the structural invariants. Each test sweeps a
// fixed list of seeds so failures are reproducible.

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qcsb/qc_dynamics.hpp"
#include "qcsb/spin_boson.hpp"
#include "support/oracles.hpp"

using namespace qcsb;

namespace {

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 5, 8, 13, 21, 34};

ModeVector random_modes(std::mt19937_64& rng, Eigen::Index m, double scale = 1.0) {
  std::normal_distribution<double> normal;
  ModeVector v(m);
  for (Eigen::Index j = 0; j < m; ++j) v[j] = scale * Complex(normal(rng), normal(rng));
  return v;
}

std::vector<double> random_frequencies(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(0.3, 2.0);
  std::vector<double> w(m);
  for (double& x : w) x = u(rng);
  return w;
}

}  // namespace

TEST(Properties, HermEigReconstructionAcrossSizes) {
  std::mt19937_64 rng(101);
  for (Eigen::Index n : {1, 2, 7, 64, 300, 2048}) {
    const ComplexMatrix a = oracle::random_hermitian(rng, n);
    const HermitianEig e = herm_eig(a);
    const ComplexMatrix back = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.adjoint();
    EXPECT_LE((back - a).norm(), 1e-10 * (1.0 + a.norm())) << n;
    for (Eigen::Index k = 1; k < n; ++k) EXPECT_LE(e.eigenvalues[k - 1], e.eigenvalues[k]);
  }
}

TEST(Properties, UnitaryExpGroupLaw) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const ComplexMatrix a = oracle::random_hermitian(rng, 6);
    const double s = u(rng), t = u(rng);
    EXPECT_LE(max_abs(unitary_exp(a, s) * unitary_exp(a, t) - unitary_exp(a, s + t)), 1e-9) << seed;
  }
}

TEST(Properties, PartialTracePreservesTraceAndPositivity) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    const ComplexMatrix rho = oracle::random_density(rng, 3 * 5);
    const ComplexMatrix r = partial_trace_boson(rho, 3, 5);
    EXPECT_NEAR(std::abs(r.trace() - rho.trace()), 0.0, 1e-13);
    EXPECT_GE(herm_eig(r).eigenvalues[0], -1e-10);
  }
}

TEST(Properties, TraceDistanceTriangle) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    const ComplexMatrix a = oracle::random_density(rng, 4);
    const ComplexMatrix b = oracle::random_density(rng, 4);
    const ComplexMatrix c = oracle::random_density(rng, 4);
    EXPECT_LE(trace_distance(a, c), trace_distance(a, b) + trace_distance(b, c) + 1e-10);
  }
}

TEST(Properties, CcrOnSafeBlock) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    const Eigen::Index m = seed % 2 == 0 ? 1 : 2;
    const FockSpace fock(std::vector<int>(static_cast<std::size_t>(m), m == 1 ? 12 : 6), 1.0 / (1 + seed % 5));
    const ModeVector f = random_modes(rng, m), g = random_modes(rng, m);
    const ComplexMatrix a = annihilation(fock, f), ad = creation(fock, g);
    const ComplexMatrix comm = a * ad - ad * a;
    const Complex expected = fock.epsilon() * inner(f, g);
    for (std::size_t r : fock.truncation_safe_indices()) {
      for (std::size_t c : fock.truncation_safe_indices()) {
        const Complex want = r == c ? expected : Complex(0.0);
        EXPECT_LE(std::abs(comm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) - want), 1e-10);
      }
    }
  }
}

TEST(Properties, FieldHermitianAndNumberCommutesWithDGamma) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    const FockSpace fock({5, 4}, 0.3);
    const ComplexMatrix phi = field_op(fock, random_modes(rng, 2));
    EXPECT_EQ(hermiticity_residual(phi), 0.0);
    const ComplexMatrix dg = d_gamma(fock, Dispersion(random_frequencies(rng, 2)));
    const ComplexMatrix n = d_gamma(fock, Dispersion({1.0, 1.0}));
    EXPECT_LE(max_abs(dg * n - n * dg), 1e-13);
  }
}

TEST(Properties, WeylAdjointIsExactInverseField) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    const FockSpace fock({6, 5}, 0.2);
    const ModeVector eta = random_modes(rng, 2);
    EXPECT_EQ(weyl_op(fock, eta).adjoint(), weyl_op(fock, -eta)) << seed;
  }
  const FockSpace fock({6}, 0.2);
  EXPECT_EQ(weyl_op(fock, ModeVector::Zero(1)), ComplexMatrix::Identity(7, 7));
}

TEST(Properties, CoherentMeanOccupation) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    const double eps = 1.0 / static_cast<double>(2 + seed % 6);
    const ModeVector z = random_modes(rng, 1, 0.7);
    const double mean = std::norm(z[0]) / eps;
    const FockSpace fock({std::max(safe_cutoff(mean, 1e-12), static_cast<int>(std::ceil(4.0 * mean)) + 4)}, eps);
    const ComplexVector psi = coherent_vector(fock, z);
    double occupation = 0.0;
    for (Eigen::Index n = 0; n < psi.size(); ++n) occupation += static_cast<double>(n) * std::norm(psi[n]);
    EXPECT_LE(std::abs(occupation - mean), 0.01 * std::max(mean, 1e-3)) << seed;
  }
}

TEST(Properties, MicroscopicEvolutionIsUnitary) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> time(-10.0, 10.0);
    const Eigen::Index d = seed % 2 == 0 ? 2 : 3;
    const std::size_t m = seed % 3 == 0 ? 2 : 1;
    const SpinBosonModel model{oracle::random_hermitian(rng, d),
                               oracle::random_hermitian(rng, d),
                               Dispersion(random_frequencies(rng, m)),
                               random_modes(rng, static_cast<Eigen::Index>(m), 0.5),
                               seed % 2 == 0 ? NuRegime::Stationary : NuRegime::FreeField,
                               FockSpace(std::vector<int>(m, m == 1 ? 10 : 4), 0.25)};
    const auto n = static_cast<Eigen::Index>(model.dimension());
    const JointState rho{oracle::random_density(rng, n), 0.25, 0.0};
    const JointState out = evolve(model, rho, time(rng));
    EXPECT_LE(std::abs(out.rho.trace() - 1.0), 1e-9);
    EXPECT_LE(hermiticity_residual(out.rho), 1e-9);
    EXPECT_LE((herm_eig(out.rho).eigenvalues - herm_eig(rho.rho).eigenvalues).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Properties, QuantumFourierBoundedAndReducedAtZero) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    const SpinBosonModel model{oracle::pauli_z(), oracle::pauli_x(), Dispersion({1.0}), random_modes(rng, 1),
                               NuRegime::Stationary, FockSpace({12}, 0.2)};
    const JointState rho{oracle::random_density(rng, 26), 0.2, 0.0};
    EXPECT_LE(max_abs(quantum_fourier(model, rho, ModeVector::Zero(1)) - partial_trace_boson(rho.rho, 2, 13)),
              1e-14);
    EXPECT_LE(trace_norm(quantum_fourier(model, rho, random_modes(rng, 1, 2.0))), 1.0 + 1e-10);
  }
}

TEST(Properties, NumberMomentOrderedInDelta) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    const FockSpace fock({9}, 0.25);
    const JointState rho{oracle::random_density(rng, 20), 0.25, 0.0};
    const double half = number_moment(fock, 2, rho, 0.5);
    const double one = number_moment(fock, 2, rho, 1.0);
    EXPECT_GE(half, 1.0);
    EXPECT_LE(half, one + 1e-12);
    // Jensen: E[(N+1)^{1/2}] <= E[N+1]^{1/2}
    EXPECT_LE(half, std::sqrt(one) + 1e-12);
  }
}

TEST(Properties, EffectiveEvolutionConservesMassAndSpectra) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    std::vector<Atom> atoms;
    for (int i = 0; i < 3; ++i) atoms.push_back({1.0 / 3.0, random_modes(rng, 2), oracle::random_density(rng, 3)});
    const StateValuedMeasure m0(atoms);
    const EffectiveModel model{oracle::random_hermitian(rng, 3), oracle::random_hermitian(rng, 3),
                               Dispersion(random_frequencies(rng, 2)), random_modes(rng, 2),
                               seed % 2 == 0 ? 0.0 : 1.0};
    std::uniform_real_distribution<double> time(0.1, 3.0);
    const StateValuedMeasure m = evolve_measure(model, m0, time(rng));
    EXPECT_EQ(total_mass(m), total_mass(m0));
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_LE((herm_eig(m.atoms()[i].gamma).eigenvalues - herm_eig(m0.atoms()[i].gamma).eigenvalues)
                    .cwiseAbs()
                    .maxCoeff(),
                1e-12);
      if (model.nu == 0.0) {
        EXPECT_EQ(m.atoms()[i].point, m0.atoms()[i].point);
      }
    }
  }
}

TEST(Properties, StationaryHamiltonianIsTimeIndependent) {
  for (std::uint64_t seed : kSeeds) {
    std::mt19937_64 rng(seed);
    const EffectiveModel model{oracle::random_hermitian(rng, 2), oracle::random_hermitian(rng, 2),
                               Dispersion(random_frequencies(rng, 3)), random_modes(rng, 3), 0.0};
    const ModeVector z = random_modes(rng, 3);
    std::uniform_real_distribution<double> time(-20.0, 20.0);
    EXPECT_EQ(effective_hamiltonian(model, z, time(rng)), effective_hamiltonian(model, z, 0.0));
  }
}
