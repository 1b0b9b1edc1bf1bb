#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "qcsb/config.hpp"
#include "qcsb/json_io.hpp"
#include "support/oracles.hpp"

using namespace qcsb;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(QCSB_SOURCE_DIR) / "configs";

const char* kMinimal = R"(
[model]
spin_hamiltonian = [[1.0, 0.0], [0.0, -1.0]]
coupling = [[0.0, 1.0], [1.0, 0.0]]
omega = [1.0, 2.0]
form_factor = [[1.0, 0.0], [0.0, 0.5]]
nu_regime = "free_field"

[initial]
kind = "atoms"
gamma = [[0.5, [0.0, -0.5]], [[0.0, 0.5], 0.5]]
atoms = [{ weight = 0.25, z = [[1.0, 0.5], 0.0] },
         { weight = 0.75, z = [[0.0, -1.0], [0.2, 0.0]], gamma = [[1.0, 0.0], [0.0, 0.0]] }]

[sweep]
epsilons = [0.5, 0.25]
times = [1.0]
cutoffs = [[6, 7], [9, 10]]
steps = 40
grid_per_unit = 16
eta_grid = [[[0.5, 0.0], 0.0], [0.0, [0.0, 1.0]]]
seed = 99
tail_target = 1e-8

[output]
directory = "results"
prefix = "demo"
record_timings = false
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

void expect_rejected(const std::string& text, const std::string& fragment) {
  try {
    parse_config(text);
    ADD_FAILURE() << "accepted config, expected error containing '" << fragment << "'";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Config, ParsesEveryField) {
  const ExperimentConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.spin_hamiltonian, oracle::pauli_z());
  EXPECT_EQ(c.coupling, oracle::pauli_x());
  EXPECT_EQ(c.omega, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(c.form_factor[1], Complex(0.0, 0.5));
  EXPECT_EQ(c.regime, NuRegime::FreeField);
  EXPECT_EQ(c.gamma0(0, 1), Complex(0.0, -0.5));
  EXPECT_EQ(c.gamma0(1, 0), Complex(0.0, 0.5));
  ASSERT_EQ(c.atoms.size(), 2u);
  EXPECT_EQ(c.atoms[0].weight, 0.25);
  EXPECT_EQ(c.atoms[0].z[0], Complex(1.0, 0.5));
  EXPECT_FALSE(c.atoms[0].gamma.has_value());
  ASSERT_TRUE(c.atoms[1].gamma.has_value());
  EXPECT_EQ((*c.atoms[1].gamma)(0, 0), Complex(1.0));
  EXPECT_EQ(c.epsilons, (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(c.times, (std::vector<double>{1.0}));
  EXPECT_EQ(c.cutoffs, (std::vector<std::vector<int>>{{6, 7}, {9, 10}}));
  EXPECT_EQ(c.steps, 40u);
  EXPECT_EQ(c.grid_per_unit, 16u);
  ASSERT_EQ(c.eta_grid.size(), 2u);
  EXPECT_EQ(c.eta_grid[1][1], Complex(0.0, 1.0));
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.tail_target, 1e-8);
  EXPECT_EQ(c.output_dir, "results");
  EXPECT_EQ(c.prefix, "demo");
  EXPECT_FALSE(c.record_timings);

  const StateValuedMeasure m = initial_measure(c);
  EXPECT_EQ(m.atoms()[0].gamma, c.gamma0);
  EXPECT_EQ(cutoffs_for(c, m, 0.25), (std::vector<int>{9, 10}));
  EXPECT_THROW(cutoffs_for(c, m, 0.1), PreconditionError);
  EXPECT_EQ(eta_grid(c).size(), 2u);
}

TEST(Config, ShippedConfigsLoad) {
  const ExperimentConfig stationary = load_config(kConfigs / "default.toml");
  const ExperimentConfig reference = default_config(NuRegime::Stationary);
  EXPECT_EQ(stationary.spin_hamiltonian, reference.spin_hamiltonian);
  EXPECT_EQ(stationary.coupling, reference.coupling);
  EXPECT_EQ(stationary.epsilons, reference.epsilons);
  EXPECT_EQ(stationary.times, reference.times);
  EXPECT_EQ(stationary.regime, NuRegime::Stationary);
  EXPECT_EQ(load_config(kConfigs / "free_field.toml").regime, NuRegime::FreeField);
  const ExperimentConfig gaussian = load_config(kConfigs / "gaussian.toml");
  ASSERT_TRUE(gaussian.gaussian.has_value());
  EXPECT_EQ(initial_measure(gaussian).size(), gaussian.gaussian->samples);
}

TEST(Config, DefaultsForOptionalKeys) {
  std::string text = kMinimal;
  text = replace(text, "steps = 40\n", "");
  text = replace(text, "grid_per_unit = 16\n", "");
  text = replace(text, "seed = 99\n", "");
  text = replace(text, "nu_regime = \"free_field\"\n", "");
  text = text.substr(0, text.find("[output]"));
  const ExperimentConfig c = parse_config(text);
  EXPECT_EQ(c.steps, 0u);
  EXPECT_EQ(c.grid_per_unit, 64u);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.regime, NuRegime::Stationary);
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_TRUE(c.record_timings);
}

TEST(Config, DefaultEtaGridHasTwoRaysPerMode) {
  ExperimentConfig c = default_config();
  const auto grid = eta_grid(c);
  ASSERT_EQ(grid.size(), 8u);
  EXPECT_EQ(grid[0][0], Complex(0.25, 0.0));
  EXPECT_EQ(grid[7][0], Complex(0.0, 2.0));
}

TEST(Config, AutoCutoffsRespectMarginAndTail) {
  const ExperimentConfig c = default_config();
  const StateValuedMeasure m = initial_measure(c);
  int previous = 0;
  for (double eps : c.epsilons) {
    const std::vector<int> n = cutoffs_for(c, m, eps);
    ASSERT_EQ(n.size(), 1u);
    EXPECT_GE(n[0], static_cast<int>(std::ceil(4.0 / eps)));
    EXPECT_LE(poisson_tail(1.0 / eps, n[0]), c.tail_target);
    EXPECT_GT(n[0], previous);
    previous = n[0];
  }
}

TEST(Config, Rejections) {
  const std::string base = kMinimal;
  expect_rejected("[model", "TOML parse error");
  expect_rejected(replace(base, "[initial]", "[initial_data]"), "initial");
  expect_rejected(replace(base, "epsilons = [0.5, 0.25]", "epsilons = [0.25, 0.5]"), "strictly decreasing");
  expect_rejected(replace(base, "epsilons = [0.5, 0.25]", "epsilons = [0.5, -0.25]"), "positive");
  expect_rejected(replace(base, "times = [1.0]", "times = []"), "time grid");
  expect_rejected(replace(base, "steps = 40", "steps = -3"), "sweep.steps");
  expect_rejected(replace(base, "seed = 99", "seed = 1.5"), "sweep.seed");
  expect_rejected(replace(base, "cutoffs = [[6, 7], [9, 10]]", "cutoffs = [[6, 7]]"), "one row per epsilon");
  expect_rejected(replace(base, "cutoffs = [[6, 7], [9, 10]]", "cutoffs = [[6, 0], [9, 10]]"), "positive integers");
  expect_rejected(replace(base, "cutoffs = [[6, 7], [9, 10]]", "cutoffs = [[6], [9]]"), "one entry per mode");
  expect_rejected(replace(base, "nu_regime = \"free_field\"", "nu_regime = \"fast\""), "unknown nu regime");
  expect_rejected(replace(base, "kind = \"atoms\"", "kind = \"cloud\""), "initial.kind");
  expect_rejected(replace(base, "weight = 0.25", "weight = 0.5"), "total");
  expect_rejected(replace(base, "omega = [1.0, 2.0]", "omega = [1.0]"), "mode count");
  expect_rejected(replace(base, "coupling = [[0.0, 1.0], [1.0, 0.0]]", "coupling = [[0.0, 1.0], [2.0, 0.0]]"),
                  "Hermitian");
  expect_rejected(replace(base, "coupling = [[0.0, 1.0], [1.0, 0.0]]", "coupling = [[0.0, 1.0], [1.0]]"), "ragged");
  expect_rejected(replace(base, "form_factor = [[1.0, 0.0], [0.0, 0.5]]", "form_factor = [[1.0, 0.0, 3.0], 0.5]"),
                  "[re, im]");
  expect_rejected(replace(base, "tail_target = 1e-8", "tail_target = 0.0"), "tail_target");
  expect_rejected(replace(base, "grid_per_unit = 16", "grid_per_unit = 1"), "grid_per_unit");
  expect_rejected(replace(base, "eta_grid = [[[0.5, 0.0], 0.0], [0.0, [0.0, 1.0]]]", "eta_grid = [[0.5]]"),
                  "eta grid");
  EXPECT_THROW(load_config(kConfigs / "missing.toml"), PreconditionError);
}

TEST(Json, MatrixAndVectorRoundTrip) {
  std::mt19937_64 rng(3);
  const ComplexMatrix m = oracle::random_hermitian(rng, 3);
  const Json j = matrix_to_json(m);
  EXPECT_EQ(j[1][2][0].get<double>(), m(1, 2).real());
  EXPECT_EQ(j[1][2][1].get<double>(), m(1, 2).imag());
  EXPECT_EQ(matrix_from_json(Json::parse(j.dump())), m);
  ModeVector v(2);
  v << Complex(0.1, -0.2), Complex(3.0, 4.0);
  EXPECT_EQ(mode_vector_from_json(Json::parse(mode_vector_to_json(v).dump())), v);
  EXPECT_THROW(matrix_from_json(Json::parse("[[[1, 0]], [[1, 0], [0, 0]]]")), PreconditionError);
  EXPECT_THROW(mode_vector_from_json(Json::parse("[[1, 0, 0]]")), PreconditionError);
}

TEST(Json, StateDumpFormat) {
  std::mt19937_64 rng(4);
  const JointState s{oracle::random_density(rng, 6), 0.125, 2.0};
  const Json j = state_to_json(s, 2, 3);
  EXPECT_EQ(j["dimensions"], Json::parse("[2, 3]"));
  EXPECT_EQ(j["epsilon"].get<double>(), 0.125);
  EXPECT_EQ(j["time"].get<double>(), 2.0);
  ASSERT_EQ(j["entries"].size(), 36u);
  EXPECT_EQ(j["entries"][1 * 6 + 4][1].get<double>(), s.rho(1, 4).imag());
  const JointState back = state_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.rho, s.rho);
  EXPECT_EQ(back.epsilon, s.epsilon);
  EXPECT_EQ(back.time, s.time);
  EXPECT_THROW(state_to_json(s, 2, 2), DimensionError);
  Json bad = j;
  bad["entries"].erase(0);
  EXPECT_THROW(state_from_json(bad), DimensionError);
}

TEST(Json, EnsembleRoundTrip) {
  const StateValuedMeasure m = sample_gaussian_measure(2, {0.3, 0.7}, oracle::pauli_x() / 2.0 +
                                                                          ComplexMatrix::Identity(2, 2) / 2.0,
                                                       5, 17);
  const Json j = measure_to_json(m);
  ASSERT_EQ(j.size(), 5u);
  EXPECT_TRUE(j[0].contains("weight"));
  EXPECT_TRUE(j[0].contains("z"));
  EXPECT_TRUE(j[0].contains("gamma"));
  const StateValuedMeasure back = measure_from_json(Json::parse(j.dump()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(back.atoms()[i].weight, m.atoms()[i].weight);
    EXPECT_EQ(back.atoms()[i].point, m.atoms()[i].point);
    EXPECT_EQ(back.atoms()[i].gamma, m.atoms()[i].gamma);
  }
  EXPECT_THROW(measure_from_json(Json::parse("{}")), PreconditionError);
}
