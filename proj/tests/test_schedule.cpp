#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "dcqo/portfolio.hpp"
#include "dcqo/schedule.hpp"
#include "dense.hpp"

using namespace dcqo;

namespace {

constexpr double pi = std::numbers::pi;

// Vertex of the parabola through (x - d, x, x + d).
double parabola_vertex(double f0, double f1, double f2, double x, double d) {
  return x - d * (f2 - f0) / (2.0 * (f2 - 2.0 * f1 + f0));
}

PauliSum lcd_gauge(int n, const std::vector<double>& alpha) {
  PauliSum a(n);
  for (int i = 0; i < n; ++i) a.add(PauliString::y(n, i), alpha[i]);
  return a;
}

// Tr[G^2] / 2^N from dense matrices.
double dense_action(const IsingModel& m, double lam, const oracle::Mat& gauge) {
  const oracle::Mat hi = oracle::dense_driver(m), hp = oracle::dense_problem(m);
  const oracle::Mat h = (1.0 - lam) * hi + lam * hp;
  const oracle::Mat g = (hp - hi) + oracle::cd{0, 1} * (gauge * h - h * gauge);
  return (g * g).trace().real() / static_cast<double>(h.rows());
}

IsingModel portfolio_model(int n, int g, std::uint64_t seed) {
  ProblemSpec s;
  s.market = generate_instance(n, seed);
  s.g = g;
  return to_ising(s);
}

}  // namespace

TEST(Schedule, LambdaEndpointsAndMidpoint) {
  EXPECT_EQ(lambda(0.0, 2.0), 0.0);
  EXPECT_EQ(lambda(2.0, 2.0), 1.0);
  EXPECT_NEAR(lambda(1.0, 2.0), 0.5, 1e-15);
  EXPECT_THROW(lambda(2.5, 2.0), ConfigError);
  EXPECT_THROW(lambda(-0.1, 2.0), ConfigError);
  EXPECT_THROW(lambda(0.0, 0.0), ConfigError);
}

TEST(Schedule, LambdaDot) {
  EXPECT_EQ(lambda_dot(0.0, 3.0), 0.0);
  EXPECT_EQ(lambda_dot(3.0, 3.0), 0.0);
  EXPECT_NEAR(lambda_dot(0.5, 1.0), pi * pi / 4.0, 1e-14);
  for (double t : {0.1, 0.37, 0.5, 0.81}) {
    const double h = 1e-6;
    const double fd = (lambda(t + h, 1.0) - lambda(t - h, 1.0)) / (2 * h);
    EXPECT_NEAR(lambda_dot(t, 1.0), fd, 1e-8);
  }
}

TEST(Schedule, LambdaIsMonotone) {
  double prev = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double l = lambda(k * 0.01, 2.0);
    EXPECT_GE(l, prev);
    EXPECT_LE(l, 1.0);
    prev = l;
  }
}

TEST(Schedule, StepGrid) {
  const auto s = Schedule::from_step(1.0, 0.05);
  EXPECT_EQ(s.M, 20);
  EXPECT_EQ(s.time(s.M), 1.0);
  EXPECT_EQ(Schedule::from_step(100.0, 0.05).M, 2000);
  EXPECT_THROW(Schedule::from_step(1.0, 0.3), ConfigError);
  EXPECT_THROW(Schedule::from_step(1.0, 0.0), ConfigError);
  EXPECT_THROW(Schedule(1.0, 0), ConfigError);
  EXPECT_EQ(parse_cd_mode("acd"), CdMode::ACD);
  EXPECT_THROW(parse_cd_mode("ACD!"), ConfigError);
}

TEST(Schedule, LcdAlphaEndpoints) {
  std::mt19937_64 rng(3);
  const auto m = oracle::random_model(4, rng, 0.7);
  const auto a0 = lcd_alpha(m, 0.0);
  const auto a1 = lcd_alpha(m, 1.0);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(a0[i], m.h[i] / (2 * m.hx), 1e-15);
    double k2 = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) k2 += 4 * m.J[i][j] * m.J[i][j];
    }
    EXPECT_NEAR(a1[i], m.hx * m.h[i] / (2 * (m.h[i] * m.h[i] + k2)), 1e-15);
  }
  EXPECT_THROW(lcd_alpha(m, 1.5), ConfigError);
}

TEST(Schedule, ActionMatchesDenseTrace) {
  std::mt19937_64 rng(9);
  const auto m = oracle::random_model(3, rng);
  const PauliSum gauge = lcd_gauge(3, {0.3, -0.2, 0.9});
  for (double lam : {0.0, 0.3, 1.0}) {
    EXPECT_NEAR(action(m, lam, gauge), dense_action(m, lam, oracle::dense(gauge)), 1e-12);
  }
}

TEST(Schedule, LcdAlphaMinimizesAction) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = oracle::random_model(2, rng, 0.5 + trial * 0.3);
    for (double lam : {0.1, 0.5, 0.9}) {
      const auto alpha = lcd_alpha(m, lam);
      for (int i = 0; i < 2; ++i) {
        const double d = 0.25;
        double f[3];
        for (int k = 0; k < 3; ++k) {
          auto a = alpha;
          a[i] += (k - 1) * d;
          f[k] = action(m, lam, lcd_gauge(2, a));
        }
        EXPECT_NEAR(parabola_vertex(f[0], f[1], f[2], alpha[i], d), alpha[i], 1e-12);
      }
    }
  }
}

TEST(Schedule, AcdAlphaMatchesParabolaSingleQubit) {
  auto m = IsingModel::zeros(1, 0.8);
  m.h[0] = 1.3;
  const AcdGenerator gen(m);
  for (double lam : {0.2, 0.5, 0.7}) {
    const auto c = gen.alpha1(lam);
    ASSERT_FALSE(c.degenerate);
    const double d = 0.1;
    double f[3];
    for (int k = 0; k < 3; ++k) f[k] = action(m, lam, (c.alpha + (k - 1) * d) * gen.direction());
    EXPECT_NEAR(parabola_vertex(f[0], f[1], f[2], c.alpha, d), c.alpha, 1e-12);
  }
}

TEST(Schedule, AcdCachedActionMatchesSymbolic) {
  const auto m = portfolio_model(2, 2, 3);
  const AcdGenerator gen(m);
  for (double lam : {0.0, 0.25, 0.6, 1.0}) {
    for (double a : {-1.0, 0.0, 0.4}) {
      const double direct = action(m, lam, a * gen.direction());
      EXPECT_NEAR(gen.action(lam, a), direct, 1e-12 * std::max(1.0, direct));
    }
  }
}

TEST(Schedule, AcdDegenerateWhenNoGaugeDirection) {
  const auto m = IsingModel::zeros(3);
  const auto c = acd_alpha1(m, 0.5);
  EXPECT_TRUE(c.degenerate);
  EXPECT_EQ(c.alpha, 0.0);
}

TEST(Schedule, AcdNeverIncreasesAction) {
  const auto m = portfolio_model(3, 2, 1);
  const AcdGenerator gen(m);
  const auto c = gen.alpha1(0.5);
  EXPECT_LE(action(m, 0.5, c.alpha * gen.direction()), action(m, 0.5, PauliSum(m.n_qubits)) + 1e-12);
}

TEST(Schedule, CdTermVanishesAtBoundaries) {
  const auto m = portfolio_model(2, 2, 5);
  const double T = 1.7;
  for (auto mode : {CdMode::None, CdMode::LCD, CdMode::ACD}) {
    for (double t : {0.0, T}) {
      EXPECT_TRUE(cd_term(mode, m, lambda(t, T), lambda_dot(t, T)).empty()) << to_string(mode);
    }
  }
}

TEST(Schedule, LcdTermSingleQubit) {
  auto m = IsingModel::zeros(1);
  m.h[0] = 0.4;
  const auto term = cd_term(CdMode::LCD, m, 0.3, 2.0);
  ASSERT_EQ(term.size(), 1u);
  EXPECT_NEAR(term.coefficient(PauliString::y(1, 0)).real(), 2.0 * lcd_alpha(m, 0.3)[0], 1e-15);
}

TEST(Schedule, AcdDirectionMatchesClosedForm) {
  // i[H_i, H_p] = -2 hx [sum_i h_i Y_i + sum_{i != j} J_ij (Y_i Z_j + Z_i Y_j)].
  std::mt19937_64 rng(12);
  const auto m = oracle::random_model(2, rng, 0.9);
  PauliSum closed(2);
  for (int i = 0; i < 2; ++i) {
    closed.add(PauliString::y(2, i), m.h[i]);
    for (int j = 0; j < 2; ++j) {
      if (j == i) continue;
      closed.add(multiply(PauliString::y(2, i), PauliString::z(2, j)), m.J[i][j]);
      closed.add(multiply(PauliString::z(2, i), PauliString::y(2, j)), m.J[i][j]);
    }
  }
  closed *= -2.0 * m.hx;
  const AcdGenerator gen(m);
  EXPECT_LT((oracle::dense(gen.direction()) - oracle::dense(closed)).cwiseAbs().maxCoeff(), 1e-14);
  // The full CD operator is lambda_dot * alpha_1 * D.
  const auto term = cd_term(CdMode::ACD, m, 0.4, 1.5, &gen);
  const double a = gen.alpha1(0.4).alpha;
  EXPECT_LT((oracle::dense(term) - 1.5 * a * oracle::dense(closed)).cwiseAbs().maxCoeff(), 1e-13);
}
