#include <gtest/gtest.h>

#include <random>

#include "dcqo/ising.hpp"
#include "dcqo/portfolio.hpp"
#include "dense.hpp"

using namespace dcqo;

namespace {

ProblemSpec spec_for(int n, int g, std::uint64_t seed) {
  ProblemSpec s;
  s.market = generate_instance(n, seed);
  s.g = g;
  return s;
}

std::vector<int> spins_of(std::uint64_t b, int n) {
  std::vector<int> s(n);
  for (int q = 0; q < n; ++q) s[q] = spin_of(b, q);
  return s;
}

// energy(s) + beta == -cost(x(s)) for every configuration.
double max_encoding_error(const ProblemSpec& spec) {
  const IsingModel model = to_ising(spec);
  const int nq = spec.n_qubits();
  double err = 0.0;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << nq); ++b) {
    const auto x = decode_allocation(allocation_bits(b, nq), spec.g);
    const double lhs = energy(model, spins_of(b, nq)) + model.beta_offset;
    err = std::max(err, std::abs(lhs + cost(spec, x)));
  }
  return err;
}

}  // namespace

TEST(Ising, ZeroObjectiveGivesZeroModel) {
  auto s = spec_for(3, 2, 1);
  s.theta1 = s.theta2 = s.theta3 = 0.0;
  const auto m = to_ising(s);
  for (double h : m.h) EXPECT_EQ(h, 0.0);
  for (const auto& row : m.J) {
    for (double j : row) EXPECT_EQ(j, 0.0);
  }
  EXPECT_EQ(m.beta_offset, 0.0);
}

TEST(Ising, SingleBudgetQubitByHand) {
  ProblemSpec s;
  s.market.n = 1;
  s.market.m = {0.0};
  s.market.rho = {{0.0}};
  s.theta1 = s.theta3 = 0.0;
  s.theta2 = 1.0;
  const auto m = to_ising(s);
  // -cost = (x - 1)^2: x = 1 (spin +1) gives 0, x = 0 (spin -1) gives 1.
  EXPECT_NEAR(energy(m, std::vector<int>{+1}) + m.beta_offset, 0.0, 1e-15);
  EXPECT_NEAR(energy(m, std::vector<int>{-1}) + m.beta_offset, 1.0, 1e-15);
  EXPECT_NEAR(m.h[0], -0.5, 1e-15);
  EXPECT_NEAR(m.beta_offset, 0.5, 1e-15);
}

TEST(Ising, EncodingExhaustive) {
  EXPECT_LT(max_encoding_error(spec_for(3, 2, 5)), 1e-9);
  EXPECT_LT(max_encoding_error(spec_for(2, 1, 3)), 1e-12);
  auto s = spec_for(2, 3, 9);
  s.b = 1.7;
  s.theta1 = 0.9;
  EXPECT_LT(max_encoding_error(s), 1e-9);
}

TEST(Ising, QuboMatchesCostOnAllBitstrings) {
  const auto s = spec_for(3, 2, 12);
  const Qubo q = to_qubo(s);
  for (std::uint64_t b = 0; b < 64; ++b) {
    const auto z = allocation_bits(b, 6);
    double v = q.constant;
    for (int i = 0; i < 6; ++i) {
      v += q.c[i] * z[i];
      for (int j = 0; j < 6; ++j) v += q.Q[i][j] * z[i] * z[j];
    }
    EXPECT_NEAR(v, -cost(s, decode_allocation(z, 2)), 1e-12);
  }
}

TEST(Ising, PrintedCouplingsAgreeAtOneSlice) {
  // The closed-form coefficients agree with the derived model for g = 1.
  const auto s = spec_for(4, 1, 2);
  const auto d = printed_formula_delta(s, to_ising(s));
  EXPECT_LT(d.max_abs_dJ, 1e-14);
  EXPECT_TRUE(std::isfinite(d.max_abs_dh));
}

TEST(Ising, EnergyExamples) {
  auto m = IsingModel::zeros(3);
  m.h[0] = 1.0;
  EXPECT_EQ(energy(m, std::vector<int>{-1, 1, 1}), -1.0);
  const auto z = IsingModel::zeros(3);
  for (std::uint64_t b = 0; b < 8; ++b) EXPECT_EQ(energy_of_index(z, b), 0.0);
  EXPECT_THROW(energy(m, std::vector<int>{1, 1}), DimensionError);
}

TEST(Ising, EnergyDiagonalMatchesDenseHamiltonian) {
  std::mt19937_64 rng(4);
  const auto m = oracle::random_model(4, rng);
  const oracle::Mat h = oracle::dense_problem(m);
  const auto diag = energy_diagonal(m);
  EXPECT_LT((h - oracle::Mat(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
  for (std::size_t b = 0; b < diag.size(); ++b) EXPECT_NEAR(diag[b], h(b, b).real(), 1e-14);
  EXPECT_LT((oracle::dense(problem_hamiltonian(m)) - h).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((oracle::dense(driver_hamiltonian(m)) - oracle::dense_driver(m)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Ising, GroundStates) {
  auto m = IsingModel::zeros(3);
  m.h = {0.5, 1.0, 2.0};
  auto g = ground_states(m);
  ASSERT_EQ(g.degeneracy(), 1u);
  EXPECT_EQ(g.states[0], 7u);  // all spins -1
  EXPECT_EQ(ground_states(IsingModel::zeros(4)).degeneracy(), 16u);
  auto f = IsingModel::zeros(2);
  f.set_coupling(0, 1, -1.0);
  g = ground_states(f);
  EXPECT_EQ(g.states, (std::vector<std::uint64_t>{0, 3}));
  std::mt19937_64 rng(1);
  EXPECT_THROW(ground_states(oracle::random_model(5, rng), 4), ConfigError);
}

TEST(Ising, GroundTruthAgreesWithCostMaximum) {
  const auto s = spec_for(3, 2, 6);
  const auto m = to_ising(s);
  const auto g = ground_states(m);
  double best = -1e300;
  for (std::uint64_t b = 0; b < 64; ++b) best = std::max(best, cost(s, decode_allocation(allocation_bits(b, 6), 2)));
  EXPECT_NEAR(g.energy + m.beta_offset, -best, 1e-12);
}

TEST(Ising, SuccessProbability) {
  auto f = IsingModel::zeros(2);
  f.set_coupling(0, 1, -1.0);
  const auto g = ground_states(f);
  EXPECT_NEAR(success_probability(uniform_superposition(2), g), 0.5, 1e-15);
  EXPECT_EQ(success_probability(StateVector::basis(2, 3), g), 1.0);
  EXPECT_EQ(success_probability(StateVector::basis(2, 1), g), 0.0);
  EXPECT_THROW(success_probability(uniform_superposition(1), g), DimensionError);
}

TEST(Ising, ModelValidation) {
  auto m = IsingModel::zeros(2);
  m.J[0][1] = 1.0;
  EXPECT_THROW(m.validate(), ConfigError);
  m = IsingModel::zeros(2);
  m.h.push_back(0.0);
  EXPECT_THROW(m.validate(), DimensionError);
  EXPECT_THROW(IsingModel::zeros(2).set_coupling(1, 1, 0.5), ConfigError);
}
