#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dcqo/error.hpp"

namespace dcqo {

/// Knobs of the synthetic market generator.
///
/// Returns are drawn uniform in [0, max_return). The covariance is
/// s^2 (F F^T + diag(d)) with F an n x r standard-normal loading matrix,
/// r = max(1, floor(n * factor_ratio)), d uniform in [idio_lo, idio_hi) and s
/// fixed so the mean variance equals `target_variance`.
struct GenParams {
  double max_return = 0.01;
  double factor_ratio = 0.5;
  double idio_lo = 0.5;
  double idio_hi = 1.5;
  double target_variance = 1e-4;

  void validate() const {
    if (!(max_return > 0) || !(factor_ratio > 0) || !(idio_lo > 0) || !(idio_hi > idio_lo) ||
        !(target_variance > 0)) {
      throw ConfigError("generator parameters must be positive with idio_hi > idio_lo");
    }
  }

  friend bool operator==(const GenParams&, const GenParams&) = default;
};

struct MarketData {
  int n = 0;
  std::vector<double> m;                 // mean daily returns
  std::vector<std::vector<double>> rho;  // covariance, symmetric PSD

  friend bool operator==(const MarketData&, const MarketData&) = default;
};

/// Full input of the discrete mean-variance problem.
///
/// Weight roles: theta1 scales the return, theta2 the budget penalty and
/// theta3 the risk term. `cost` documents the objective.
struct ProblemSpec {
  MarketData market;
  double b = 1.0;  // budget
  int g = 1;       // slices per asset
  double theta1 = 0.3;
  double theta2 = 0.5;
  double theta3 = 0.2;
  double hx = 1.0;
  int qubit_cap = kDefaultQubitCap;

  int n() const { return market.n; }
  int n_qubits() const { return market.n * g; }
  double granularity() const { return std::ldexp(1.0, 1 - g); }
  std::int64_t max_units() const { return (std::int64_t{1} << g) - 1; }

  double theta_return() const { return theta1; }
  double theta_risk() const { return theta3; }
  double theta_budget() const { return theta2; }

  void validate() const {
    if (market.n < 1) throw ConfigError("asset count must be >= 1");
    if (static_cast<int>(market.m.size()) != market.n ||
        static_cast<int>(market.rho.size()) != market.n) {
      throw ConfigError("market data shape does not match asset count");
    }
    for (const auto& row : market.rho) {
      if (static_cast<int>(row.size()) != market.n) throw ConfigError("covariance must be n x n");
    }
    if (g < 1 || g > 30) throw ConfigError("slices per asset g must be in [1, 30]");
    if (!(hx > 0)) throw ConfigError("transverse field hx must be positive");
    if (n_qubits() > qubit_cap) {
      throw ConfigError("n*g = " + std::to_string(n_qubits()) + " exceeds qubit cap " +
                        std::to_string(qubit_cap));
    }
  }
};

using Allocation = std::vector<std::int64_t>;

inline MarketData generate_instance(int n, std::uint64_t seed, const GenParams& params = {}) {
  if (n < 1) throw ConfigError("asset count must be >= 1");
  params.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ret(0.0, params.max_return);
  std::uniform_real_distribution<double> idio(params.idio_lo, params.idio_hi);
  std::normal_distribution<double> normal(0.0, 1.0);

  MarketData md;
  md.n = n;
  md.m.resize(n);
  for (auto& mi : md.m) mi = ret(rng);

  const int r = std::max(1, static_cast<int>(std::floor(n * params.factor_ratio)));
  std::vector<double> loadings(static_cast<std::size_t>(n) * r);
  for (auto& f : loadings) f = normal(rng);
  std::vector<double> d(n);
  for (auto& di : d) di = idio(rng);

  md.rho.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < r; ++k) s += loadings[i * r + k] * loadings[j * r + k];
      if (i == j) s += d[i];
      md.rho[i][j] = s;
    }
  }
  double mean_diag = 0.0;
  for (int i = 0; i < n; ++i) mean_diag += md.rho[i][i];
  mean_diag /= n;
  const double scale = params.target_variance / mean_diag;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      md.rho[i][j] *= scale;
      md.rho[j][i] = md.rho[i][j];
    }
  }
  return md;
}

inline void check_allocation(const ProblemSpec& spec, const Allocation& x) {
  if (static_cast<int>(x.size()) != spec.n()) {
    throw DimensionError("allocation length " + std::to_string(x.size()) + " != asset count " +
                         std::to_string(spec.n()));
  }
  for (auto xi : x) {
    if (xi < 0 || xi > spec.max_units()) {
      throw ConfigError("allocation entry " + std::to_string(xi) + " outside [0, " +
                        std::to_string(spec.max_units()) + "]");
    }
  }
}

/// Objective to maximize:
///   theta1 * sum_i m_i x_i - theta3 * sum_ij rho_ij x_i x_j
///     - theta2 * (G_f * b * sum_i x_i - b)^2
inline double cost(const ProblemSpec& spec, const Allocation& x) {
  check_allocation(spec, x);
  const int n = spec.n();
  double ret = 0.0, risk = 0.0, total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = static_cast<double>(x[i]);
    ret += spec.market.m[i] * xi;
    total += xi;
    for (int j = 0; j < n; ++j) risk += spec.market.rho[i][j] * xi * static_cast<double>(x[j]);
  }
  const double gap = spec.granularity() * spec.b * total - spec.b;
  return spec.theta_return() * ret - spec.theta_risk() * risk - spec.theta_budget() * gap * gap;
}

/// Bit position of the k-th binary digit (k = 0 is weight 1) of asset i.
/// Zero-based form of u(i, k) = (i - 1) g + k.
inline int bit_index(int asset, int digit, int g) { return asset * g + digit; }

inline std::vector<std::uint8_t> encode_allocation(const Allocation& x, int g) {
  std::vector<std::uint8_t> bits(x.size() * static_cast<std::size_t>(g));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= (std::int64_t{1} << g)) throw ConfigError("allocation out of range");
    for (int k = 0; k < g; ++k) {
      bits[bit_index(static_cast<int>(i), k, g)] = static_cast<std::uint8_t>((x[i] >> k) & 1);
    }
  }
  return bits;
}

inline Allocation decode_allocation(const std::vector<std::uint8_t>& bits, int g) {
  if (g < 1 || bits.size() % g != 0) throw DimensionError("bit count not a multiple of g");
  Allocation x(bits.size() / g, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int k = 0; k < g; ++k) {
      if (bits[bit_index(static_cast<int>(i), k, g)]) x[i] |= std::int64_t{1} << k;
    }
  }
  return x;
}

}  // namespace dcqo
