#include <gtest/gtest.h>

#include <random>

#include "dcqo/evolve.hpp"
#include "dcqo/portfolio.hpp"
#include "dense.hpp"

using namespace dcqo;

namespace {

IsingModel portfolio_model(int n, int g, std::uint64_t seed) {
  ProblemSpec s;
  s.market = generate_instance(n, seed);
  s.g = g;
  return to_ising(s);
}

struct FrozenSchedule {
  double lam;
  double lambda(double) const { return lam; }
  double lambda_dot(double) const { return 0.0; }
};

oracle::Mat dense_cd(CdMode mode, const IsingModel& m, double t, double T) {
  return oracle::dense(cd_term(mode, m, lambda(t, T), lambda_dot(t, T)));
}

}  // namespace

TEST(Evolve, TermOrder) {
  std::mt19937_64 rng(1);
  const auto m = oracle::random_model(3, rng);
  const TermPlan none(m, CdMode::None);
  ASSERT_EQ(none.terms().size(), 3u + 3u + 3u);
  EXPECT_EQ(none.terms()[0].string, PauliString::parse("XII"));
  EXPECT_EQ(none.terms()[3].string, PauliString::parse("ZII"));
  EXPECT_EQ(none.terms()[6].string, PauliString::parse("ZZI"));
  EXPECT_EQ(none.terms()[7].string, PauliString::parse("ZIZ"));
  EXPECT_EQ(none.terms()[8].string, PauliString::parse("IZZ"));
  const TermPlan acd(m, CdMode::ACD);
  int prev_weight = 0;
  for (std::size_t k = 9; k < acd.terms().size(); ++k) {
    EXPECT_GE(acd.terms()[k].string.weight(), prev_weight);
    prev_weight = acd.terms()[k].string.weight();
  }
  EXPECT_EQ(acd.terms()[9].string, PauliString::parse("YII"));
}

TEST(Evolve, PlanHamiltonianMatchesDefinition) {
  std::mt19937_64 rng(2);
  const auto m = oracle::random_model(3, rng, 0.8);
  for (auto mode : {CdMode::None, CdMode::LCD, CdMode::ACD}) {
    const TermPlan plan(m, mode);
    for (double t : {0.0, 0.3, 0.5, 1.0}) {
      const double lam = lambda(t, 1.0), ld = lambda_dot(t, 1.0);
      const oracle::Mat want =
          oracle::dense(adiabatic_hamiltonian(m, lam)) + oracle::dense(cd_term(mode, m, lam, ld));
      EXPECT_LT((oracle::dense(plan.hamiltonian(lam, ld)) - want).cwiseAbs().maxCoeff(), 1e-13);
    }
  }
}

TEST(Evolve, TrotterStepsMatchDenseProductOfExponentials) {
  std::mt19937_64 rng(3);
  const auto m = oracle::random_model(3, rng, 1.1);
  const Schedule sched(0.9, 3);
  for (auto mode : {CdMode::None, CdMode::LCD, CdMode::ACD}) {
    const TermPlan plan(m, mode);
    oracle::Vec psi = oracle::to_eigen(uniform_superposition(3));
    for (int k = 1; k <= sched.M; ++k) {
      const double t = sched.time(k);
      const auto c = plan.coefficients(lambda(t, sched.T), lambda_dot(t, sched.T));
      for (std::size_t j = 0; j < c.size(); ++j) {
        psi = (oracle::cd{0, -sched.dt() * c[j]} * oracle::dense(plan.terms()[j].string)).exp() * psi;
      }
    }
    EXPECT_LT(oracle::max_diff(evolve_state(m, sched, mode), psi), 1e-12) << to_string(mode);
  }
}

TEST(Evolve, TermOrderSensitivityIsFirstOrder) {
  const auto m = portfolio_model(2, 2, 3);
  const TermPlan plan(m, CdMode::ACD);
  auto gap = [&](int steps) {
    const Schedule sched(1.0, steps);
    oracle::Vec psi = oracle::to_eigen(uniform_superposition(4));
    for (int k = 1; k <= steps; ++k) {
      const double t = sched.time(k);
      const auto c = plan.coefficients(lambda(t, sched.T), lambda_dot(t, sched.T));
      for (std::size_t j = c.size(); j-- > 0;) {
        psi = (oracle::cd{0, -sched.dt() * c[j]} * oracle::dense(plan.terms()[j].string)).exp() * psi;
      }
    }
    return oracle::max_diff(evolve_state(m, sched, CdMode::ACD), psi);
  };
  const double g1 = gap(20), g2 = gap(40);
  EXPECT_GT(g1, 1e-6);
  EXPECT_GT(g1 / g2, 1.6);
  EXPECT_LT(g1 / g2, 2.4);
}

TEST(Evolve, ConvergesToTimeOrderedDenseEvolution) {
  std::mt19937_64 rng(4);
  const auto m = oracle::random_model(3, rng);
  const double T = 1.0;
  const SineSquaredSchedule fn{T};
  for (auto mode : {CdMode::None, CdMode::LCD, CdMode::ACD}) {
    const oracle::Vec ref = oracle::dense_evolve(
        m, T, 4000, fn, [&](double t) { return dense_cd(mode, m, t, T); },
        oracle::to_eigen(uniform_superposition(3)));
    const auto psi = evolve_state(m, Schedule(T, 4000), mode);
    EXPECT_LT(oracle::max_diff(psi, ref), 2e-3) << to_string(mode);
  }
}

TEST(Evolve, LcdDrivesSingleQubitToGround) {
  auto m = IsingModel::zeros(1);
  m.h[0] = 1.0;
  const auto truth = ground_states(m);
  const Schedule fast(1.0, 2000);
  const double p_none = evolve(m, truth, fast, CdMode::None).success_probability;
  const double p_lcd = evolve(m, truth, fast, CdMode::LCD).success_probability;
  const double p_acd = evolve(m, truth, fast, CdMode::ACD).success_probability;
  EXPECT_LT(p_none, 0.9);
  EXPECT_GT(p_lcd, 0.999);
  EXPECT_GT(p_acd, 0.999);
}

TEST(Evolve, VanishingTimeKeepsUniformState) {
  const auto m = portfolio_model(3, 2, 7);
  const auto truth = ground_states(m);
  const auto r = evolve(m, truth, Schedule(1e-6, 1), CdMode::None);
  const double want = static_cast<double>(truth.degeneracy()) / 64.0;
  EXPECT_NEAR(r.success_probability, want, 0.05 * want);
}

TEST(Evolve, CommutingSegmentHasNoTrotterError) {
  std::mt19937_64 rng(5);
  const auto m = oracle::random_model(4, rng);
  const Schedule sched(2.0, 5);
  const FrozenSchedule frozen{1.0};
  const auto coarse = evolve_state(m, sched, CdMode::None, frozen);
  const auto ref = exact_evolve_reference(m, sched, CdMode::None, frozen);
  const oracle::Vec exact =
      (oracle::cd{0, -2.0} * oracle::dense_problem(m)).exp() * oracle::to_eigen(uniform_superposition(4));
  EXPECT_LT(oracle::max_diff(coarse, oracle::to_eigen(ref)), 1e-10);
  EXPECT_LT(oracle::max_diff(coarse, exact), 1e-10);
}

TEST(Evolve, FineStepsApproachReference) {
  std::mt19937_64 rng(6);
  const auto m = oracle::random_model(4, rng);
  const auto sched = Schedule::from_step(1.0, 0.0125);
  for (auto mode : {CdMode::None, CdMode::LCD, CdMode::ACD}) {
    const auto psi = evolve_state(m, sched, mode);
    EXPECT_GE(psi.fidelity(exact_evolve_reference(m, sched, mode)), 0.99);
  }
  EXPECT_THROW(exact_evolve_reference(oracle::random_model(11, rng), sched, CdMode::None), ConfigError);
}

TEST(Evolve, HalvingTheStepShrinksTheError) {
  const auto m = portfolio_model(3, 2, 2);
  for (auto mode : {CdMode::None, CdMode::ACD}) {
    const auto coarse = Schedule(1.0, 20), fine = Schedule(1.0, 40);
    const double e1 = 1.0 - evolve_state(m, coarse, mode).fidelity(exact_evolve_reference(m, coarse, mode));
    const double e2 = 1.0 - evolve_state(m, fine, mode).fidelity(exact_evolve_reference(m, fine, mode));
    EXPECT_GE(e1 / e2, 3.5) << to_string(mode);
  }
}

TEST(Evolve, ReportFields) {
  const auto m = portfolio_model(3, 2, 4);
  const auto truth = ground_states(m);
  InstanceInfo info;
  info.id = 17;
  const auto r = evolve(m, truth, Schedule::from_step(1.0, 0.05), CdMode::ACD, info);
  EXPECT_EQ(r.instance.id, 17);
  EXPECT_EQ(r.M, 20);
  EXPECT_EQ(r.n_qubits, 6);
  EXPECT_GE(r.success_probability, 0.0);
  EXPECT_LE(r.success_probability, 1.0);
  EXPECT_LT(r.norm_error, 1e-12);
  EXPECT_GE(r.final_energy, r.ground_energy - 1e-12);
  EXPECT_EQ(r.degeneracy, truth.degeneracy());
  GroundTruth bad;
  bad.states = {1u << 7};
  EXPECT_THROW(evolve(m, bad, Schedule(1.0, 2), CdMode::None), DimensionError);
}

TEST(Evolve, RunsAreBitwiseReproducible) {
  const auto m = portfolio_model(4, 2, 8);
  const auto s = Schedule(1.0, 20);
  EXPECT_EQ(evolve_state(m, s, CdMode::ACD), evolve_state(m, s, CdMode::ACD));
}

TEST(Enhancement, EqualProbabilities) {
  const auto s = enhancement_metrics(std::vector<double>{0.1, 0.2, 0.3}, std::vector<double>{0.1, 0.2, 0.3});
  for (const auto& e : s.p_enh) EXPECT_EQ(*e, 1.0);
  EXPECT_EQ(s.r_enh, 0.0);
  EXPECT_EQ(s.mean, 1.0);
  EXPECT_EQ(s.stddev, 0.0);
}

TEST(Enhancement, AllImproved) {
  const auto s = enhancement_metrics(std::vector<double>{0.2, 0.5}, std::vector<double>{0.1, 0.25});
  EXPECT_EQ(s.r_enh, 1.0);
  EXPECT_EQ(s.mean, 2.0);
}

TEST(Enhancement, ZeroBaseline) {
  const auto s = enhancement_metrics(std::vector<double>{0.3, 0.0, 0.2}, std::vector<double>{0.0, 0.0, 0.4});
  EXPECT_FALSE(s.p_enh[0].has_value());
  EXPECT_FALSE(s.p_enh[1].has_value());
  EXPECT_EQ(s.undefined, 2u);
  EXPECT_EQ(s.enhanced, 1u);
  EXPECT_NEAR(s.r_enh, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(s.mean, 0.5);
}

TEST(Enhancement, CountMatchesRatio) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(50), b(50);
  for (int i = 0; i < 50; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  const auto s = enhancement_metrics(a, b);
  int count = 0;
  for (int i = 0; i < 50; ++i) count += a[i] / b[i] > 1.0;
  EXPECT_EQ(s.r_enh * 50, count);
}

TEST(Enhancement, Pairing) {
  EXPECT_THROW(enhancement_metrics(std::vector<double>{1.0}, std::vector<double>{}), DimensionError);
  std::vector<RunReport> a(2), b(2);
  a[1].instance.id = 1;
  b[1].instance.id = 2;
  EXPECT_THROW(enhancement_metrics(a, b), DimensionError);
}
