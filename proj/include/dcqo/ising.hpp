#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dcqo/error.hpp"
#include "dcqo/pauli.hpp"
#include "dcqo/portfolio.hpp"
#include "dcqo/statevec.hpp"

namespace dcqo {

/// Problem Hamiltonian H_p = sum_i h_i Z_i + sum_{i != j} J_ij Z_i Z_j + beta.
///
/// J is symmetric with zero diagonal, so the pair (i, j) with i < j carries a
/// coupling of 2 J_ij. `energy` excludes `beta_offset`.
///
/// Spin convention: basis bit q = 0 is spin s_q = +1, and the allocation bit
/// is z_q = (1 + s_q) / 2.
struct IsingModel {
  int n_qubits = 0;
  std::vector<double> h;
  std::vector<std::vector<double>> J;
  double beta_offset = 0.0;
  double hx = 1.0;

  static IsingModel zeros(int n, double hx = 1.0) {
    IsingModel m;
    m.n_qubits = n;
    m.h.assign(n, 0.0);
    m.J.assign(n, std::vector<double>(n, 0.0));
    m.hx = hx;
    return m;
  }

  double pair_coupling(int i, int j) const { return 2.0 * J[i][j]; }

  void set_coupling(int i, int j, double value) {
    if (i == j) throw ConfigError("Ising coupling needs i != j");
    J[i][j] = value;
    J[j][i] = value;
  }

  void validate() const {
    if (n_qubits < 1) throw ConfigError("Ising model needs at least one qubit");
    if (static_cast<int>(h.size()) != n_qubits || static_cast<int>(J.size()) != n_qubits) {
      throw DimensionError("Ising model field/coupling sizes do not match n_qubits");
    }
    for (int i = 0; i < n_qubits; ++i) {
      if (static_cast<int>(J[i].size()) != n_qubits) throw DimensionError("J must be N x N");
      if (J[i][i] != 0.0) throw ConfigError("J diagonal must be zero");
      for (int j = 0; j < i; ++j) {
        if (J[i][j] != J[j][i]) throw ConfigError("J must be symmetric");
      }
    }
  }

  /// Sum of |h_i| + sum_{i<j} |2 J_ij|, a scale for tolerances.
  double magnitude() const {
    double s = 0.0;
    for (int i = 0; i < n_qubits; ++i) {
      s += std::abs(h[i]);
      for (int j = i + 1; j < n_qubits; ++j) s += std::abs(pair_coupling(i, j));
    }
    return s;
  }

  friend bool operator==(const IsingModel&, const IsingModel&) = default;
};

inline int spin_of(std::uint64_t basis_index, int q) { return ((basis_index >> q) & 1) ? -1 : 1; }

inline std::uint64_t basis_index_of(std::span<const int> spins) {
  std::uint64_t b = 0;
  for (std::size_t q = 0; q < spins.size(); ++q) {
    if (spins[q] == -1) b |= std::uint64_t{1} << q;
  }
  return b;
}

/// Allocation bits z_q = (1 + s_q) / 2 for the given basis state.
inline std::vector<std::uint8_t> allocation_bits(std::uint64_t basis_index, int n_qubits) {
  std::vector<std::uint8_t> z(n_qubits);
  for (int q = 0; q < n_qubits; ++q) z[q] = spin_of(basis_index, q) == 1 ? 1 : 0;
  return z;
}

inline double energy(const IsingModel& model, std::span<const int> spins) {
  if (static_cast<int>(spins.size()) != model.n_qubits) {
    throw DimensionError("spin configuration length " + std::to_string(spins.size()) +
                         " != " + std::to_string(model.n_qubits));
  }
  double e = 0.0;
  for (int i = 0; i < model.n_qubits; ++i) {
    if (spins[i] != 1 && spins[i] != -1) throw ConfigError("spins must be +1 or -1");
    e += model.h[i] * spins[i];
  }
  for (int i = 0; i < model.n_qubits; ++i) {
    for (int j = i + 1; j < model.n_qubits; ++j) e += model.pair_coupling(i, j) * spins[i] * spins[j];
  }
  return e;
}

inline double energy_of_index(const IsingModel& model, std::uint64_t b) {
  double e = 0.0;
  for (int i = 0; i < model.n_qubits; ++i) {
    const int si = spin_of(b, i);
    e += model.h[i] * si;
    for (int j = i + 1; j < model.n_qubits; ++j) e += model.pair_coupling(i, j) * si * spin_of(b, j);
  }
  return e;
}

/// energy() for every basis state, in index order.
inline std::vector<double> energy_diagonal(const IsingModel& model, int qubit_cap = kDefaultQubitCap) {
  if (model.n_qubits > qubit_cap) throw ConfigError("Ising model exceeds qubit cap");
  std::vector<double> diag(std::size_t{1} << model.n_qubits);
  for (std::size_t b = 0; b < diag.size(); ++b) diag[b] = energy_of_index(model, b);
  return diag;
}

/// Problem Hamiltonian without the offset as a Pauli sum: h_i Z_i and
/// 2 J_ij Z_i Z_j for i < j.
inline PauliSum problem_hamiltonian(const IsingModel& model) {
  const int n = model.n_qubits;
  PauliSum hp(n);
  for (int i = 0; i < n; ++i) hp.add(PauliString::z(n, i), model.h[i]);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      hp.add(multiply(PauliString::z(n, i), PauliString::z(n, j)), model.pair_coupling(i, j));
    }
  }
  return hp;
}

/// H_i = -hx sum_i X_i.
inline PauliSum driver_hamiltonian(const IsingModel& model) {
  PauliSum hi(model.n_qubits);
  for (int i = 0; i < model.n_qubits; ++i) hi.add(PauliString::x(model.n_qubits, i), -model.hx);
  return hi;
}

/// Quadratic form of the negated objective over allocation bits:
/// -cost = sum_{q,r} Q_qr z_q z_r + sum_q c_q z_q + constant, Q symmetric.
struct Qubo {
  std::vector<std::vector<double>> Q;
  std::vector<double> c;
  double constant = 0.0;
};

inline Qubo to_qubo(const ProblemSpec& spec) {
  spec.validate();
  const int g = spec.g;
  const int nq = spec.n_qubits();
  const double gf = spec.granularity();
  const double b2 = spec.b * spec.b;
  Qubo qubo;
  qubo.Q.assign(nq, std::vector<double>(nq, 0.0));
  qubo.c.assign(nq, 0.0);
  auto weight = [](int q, int g) { return std::ldexp(1.0, q % g); };
  for (int q = 0; q < nq; ++q) {
    const int aq = q / g;
    const double wq = weight(q, g);
    // -theta_r m x and the cross term of -(-theta_b)(G b sum x - b)^2.
    qubo.c[q] = -spec.theta_return() * spec.market.m[aq] * wq - 2.0 * spec.theta_budget() * gf * b2 * wq;
    for (int r = 0; r < nq; ++r) {
      const int ar = r / g;
      qubo.Q[q][r] = wq * weight(r, g) *
                     (spec.theta_risk() * spec.market.rho[aq][ar] + spec.theta_budget() * gf * gf * b2);
    }
  }
  qubo.constant = spec.theta_budget() * b2;
  return qubo;
}

/// Substitutes z = (1 + s)/2 into a QUBO.
inline IsingModel qubo_to_ising(const Qubo& qubo, double hx) {
  const int n = static_cast<int>(qubo.c.size());
  IsingModel model = IsingModel::zeros(n, hx);
  double beta = qubo.constant;
  for (int q = 0; q < n; ++q) {
    // z_q^2 = z_q contributes like a linear term.
    double hq = 0.5 * (qubo.c[q] + qubo.Q[q][q]);
    beta += 0.5 * (qubo.c[q] + qubo.Q[q][q]);
    for (int r = 0; r < n; ++r) {
      if (r == q) continue;
      // z_q z_r = (1 + s_q + s_r + s_q s_r) / 4, summed over ordered pairs.
      hq += 0.5 * qubo.Q[q][r];
      beta += 0.25 * qubo.Q[q][r];
    }
    model.h[q] = hq;
  }
  for (int q = 0; q < n; ++q) {
    for (int r = q + 1; r < n; ++r) model.set_coupling(q, r, 0.25 * 0.5 * (qubo.Q[q][r] + qubo.Q[r][q]));
  }
  model.beta_offset = beta;
  return model;
}

/// Ising model whose energy plus beta_offset equals -cost on every
/// configuration (minimizing energy maximizes the objective).
inline IsingModel to_ising(const ProblemSpec& spec) { return qubo_to_ising(to_qubo(spec), spec.hx); }

/// Coefficients as printed in the closed-form J_ij / h_i expressions,
/// generalized to g > 1 with the bit weights 2^k. Used only as a logged
/// cross-check against the self-derived model.
struct PrintedFormulaDelta {
  double max_abs_dh = 0.0;
  double max_abs_dJ = 0.0;
};

inline PrintedFormulaDelta printed_formula_delta(const ProblemSpec& spec, const IsingModel& derived) {
  const int g = spec.g;
  const int nq = spec.n_qubits();
  const double gf = spec.granularity();
  const double b2 = spec.b * spec.b;
  std::vector<std::vector<double>> jp(nq, std::vector<double>(nq, 0.0));
  for (int q = 0; q < nq; ++q) {
    for (int r = 0; r < nq; ++r) {
      const double w = std::ldexp(1.0, q % g + r % g);
      jp[q][r] = 0.25 * w * (spec.theta2 * b2 * gf * gf + spec.theta3 * spec.market.rho[q / g][r / g]);
    }
  }
  PrintedFormulaDelta d;
  for (int q = 0; q < nq; ++q) {
    double hp = 0.5 * std::ldexp(1.0, q % g) * (-spec.theta1 * spec.market.m[q / g] - 2.0 * spec.theta2 * b2 * gf);
    for (int r = 0; r < nq; ++r) hp += jp[q][r];
    d.max_abs_dh = std::max(d.max_abs_dh, std::abs(hp - derived.h[q]));
    for (int r = 0; r < nq; ++r) {
      if (r != q) d.max_abs_dJ = std::max(d.max_abs_dJ, std::abs(jp[q][r] - derived.J[q][r]));
    }
  }
  return d;
}

struct GroundTruth {
  double energy = 0.0;
  std::vector<std::uint64_t> states;  // ascending basis indices
  std::size_t degeneracy() const { return states.size(); }
};

inline constexpr double kGroundTieTol = 1e-12;

/// Exhaustive minimum over all 2^N configurations. States within
/// 1e-12 * max(|E_min|, model magnitude) of the minimum are ties.
inline GroundTruth ground_states(const IsingModel& model, int qubit_cap = kDefaultQubitCap) {
  model.validate();
  if (model.n_qubits > qubit_cap) {
    throw ConfigError("ground_states: N = " + std::to_string(model.n_qubits) + " exceeds cap " +
                      std::to_string(qubit_cap));
  }
  const auto diag = energy_diagonal(model, qubit_cap);
  const double emin = *std::min_element(diag.begin(), diag.end());
  const double tol = kGroundTieTol * std::max(std::abs(emin), model.magnitude());
  GroundTruth truth;
  truth.energy = emin;
  for (std::size_t b = 0; b < diag.size(); ++b) {
    if (diag[b] - emin <= tol) truth.states.push_back(b);
  }
  return truth;
}

inline double success_probability(const StateVector& state, const GroundTruth& truth) {
  double p = 0.0;
  for (auto b : truth.states) {
    if (b >= state.dim()) throw DimensionError("ground state index outside the state dimension");
    p += std::norm(state[b]);
  }
  return std::clamp(p, 0.0, 1.0);
}

inline double expectation(const StateVector& state, const IsingModel& model) {
  state.check(model.n_qubits);
  const auto diag = energy_diagonal(model);
  return expectation_diagonal(state, diag);
}

}  // namespace dcqo
