#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dcqo/error.hpp"
#include "dcqo/pauli.hpp"

namespace dcqo {

namespace detail {

// Fixed-order pairwise summation; the result depends only on the input
// order, never on how the caller schedules work.
template <typename T, typename F>
T pairwise_sum(std::size_t begin, std::size_t end, const F& term) {
  constexpr std::size_t kLeaf = 64;
  if (end - begin <= kLeaf) {
    T acc{};
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum<T>(begin, mid, term) + pairwise_sum<T>(mid, end, term);
}

// Amplitude factor c with P|b> = c |b ^ x_mask>.
inline cplx pauli_action_factor(const PauliString& p, std::uint64_t b) {
  const int e = p.phase + std::popcount(p.x_mask & p.z_mask) + 2 * std::popcount(b & p.z_mask);
  static constexpr double re[4] = {1, 0, -1, 0};
  static constexpr double im[4] = {0, 1, 0, -1};
  return {re[e & 3], im[e & 3]};
}

}  // namespace detail

/// Dense 2^N amplitude vector. Basis index bit q is qubit q, with bit value 0
/// the +1 eigenstate of Z.
class StateVector {
 public:
  StateVector(int n_qubits, int qubit_cap = kDefaultQubitCap) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > qubit_cap) {
      throw ConfigError("state vector needs 1 <= N <= " + std::to_string(qubit_cap) + ", got " +
                        std::to_string(n_qubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, cplx{});
    amps_[0] = 1.0;
  }

  static StateVector basis(int n_qubits, std::uint64_t index, int qubit_cap = kDefaultQubitCap) {
    StateVector s(n_qubits, qubit_cap);
    if (index >= s.dim()) throw DimensionError("basis index out of range");
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
  }

  static StateVector from_amplitudes(int n_qubits, std::vector<cplx> amps,
                                     int qubit_cap = kDefaultQubitCap) {
    StateVector s(n_qubits, qubit_cap);
    if (amps.size() != s.dim()) throw DimensionError("amplitude count must be 2^N");
    s.amps_ = std::move(amps);
    return s;
  }

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::span<cplx> amplitudes() { return amps_; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }
  cplx& operator[](std::size_t i) { return amps_[i]; }

  double norm_squared() const {
    return detail::pairwise_sum<double>(0, amps_.size(), [&](std::size_t i) { return std::norm(amps_[i]); });
  }

  cplx inner(const StateVector& o) const {
    check(o.n_qubits_);
    return detail::pairwise_sum<cplx>(0, amps_.size(),
                                      [&](std::size_t i) { return std::conj(amps_[i]) * o.amps_[i]; });
  }

  double fidelity(const StateVector& o) const { return std::norm(inner(o)); }

  void check(int n) const {
    if (n != n_qubits_) {
      throw DimensionError("qubit-count mismatch: state has " + std::to_string(n_qubits_) +
                           ", operand has " + std::to_string(n));
    }
  }

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  int n_qubits_;
  std::vector<cplx> amps_;
};

inline StateVector uniform_superposition(int n_qubits, int qubit_cap = kDefaultQubitCap) {
  StateVector s(n_qubits, qubit_cap);
  const double a = std::sqrt(std::ldexp(1.0, -n_qubits));
  for (auto& amp : s.amplitudes()) amp = a;
  return s;
}

/// psi <- exp(-i theta P) psi = cos(theta) psi - i sin(theta) P psi, valid
/// because P^2 = I for a Hermitian Pauli string.
inline void apply_pauli_exp(StateVector& state, const PauliString& p, double theta) {
  state.check(p.n_qubits);
  if (!p.is_hermitian()) throw ConfigError("apply_pauli_exp needs a Hermitian string (phase +-1)");
  if (theta == 0.0) return;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  auto amps = state.amplitudes();
  const std::size_t dim = amps.size();

  if (p.x_mask == 0) {
    const double sign0 = p.phase == 0 ? 1.0 : -1.0;
    const cplx even{c, -s * sign0};
    const cplx odd{c, s * sign0};
    for (std::size_t b = 0; b < dim; ++b) {
      amps[b] *= (std::popcount(b & p.z_mask) & 1) ? odd : even;
    }
    return;
  }

  const std::uint64_t pivot = std::bit_floor(p.x_mask);
  const cplx minus_is{0.0, -s};
  for (std::size_t b = 0; b < dim; ++b) {
    if (b & pivot) continue;
    const std::size_t b2 = b ^ p.x_mask;
    const cplx a1 = amps[b];
    const cplx a2 = amps[b2];
    // (P psi)[b] = factor(b2) * psi[b2] and vice versa.
    amps[b] = c * a1 + minus_is * detail::pauli_action_factor(p, b2) * a2;
    amps[b2] = c * a2 + minus_is * detail::pauli_action_factor(p, b) * a1;
  }
}

/// Multiplies amplitude b by exp(-i theta diag[b]).
inline void apply_diagonal_phase(StateVector& state, std::span<const double> diag, double theta) {
  auto amps = state.amplitudes();
  if (diag.size() != amps.size()) throw DimensionError("diagonal length must be 2^N");
  if (theta == 0.0) return;
  for (std::size_t b = 0; b < amps.size(); ++b) {
    const double phi = -theta * diag[b];
    amps[b] *= cplx{std::cos(phi), std::sin(phi)};
  }
}

inline constexpr double kHermitianTol = 1e-10;

/// <psi|H|psi> for a Hermitian Pauli sum. Throws if the imaginary residue
/// exceeds 1e-10 (relative to the operator scale when that is larger than 1).
inline double expectation(const StateVector& state, const PauliSum& h) {
  state.check(h.n_qubits());
  auto amps = state.amplitudes();
  cplx total{};
  for (const auto& [key, coeff] : h.terms()) {
    const PauliString p = h.string_of(key);
    const cplx ev = detail::pairwise_sum<cplx>(0, amps.size(), [&](std::size_t b) {
      return std::conj(amps[b ^ p.x_mask]) * detail::pauli_action_factor(p, b) * amps[b];
    });
    total += coeff * ev;
  }
  const double scale = std::max(1.0, h.max_abs_coefficient());
  if (std::abs(total.imag()) > kHermitianTol * scale) {
    throw ConfigError("expectation of a non-Hermitian operator (imaginary part " +
                      std::to_string(total.imag()) + ")");
  }
  return total.real();
}

/// sum_b |psi_b|^2 diag[b].
inline double expectation_diagonal(const StateVector& state, std::span<const double> diag) {
  auto amps = state.amplitudes();
  if (diag.size() != amps.size()) throw DimensionError("diagonal length must be 2^N");
  return detail::pairwise_sum<double>(0, amps.size(),
                                      [&](std::size_t b) { return std::norm(amps[b]) * diag[b]; });
}

}  // namespace dcqo
