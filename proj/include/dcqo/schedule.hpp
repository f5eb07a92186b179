#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dcqo/error.hpp"
#include "dcqo/ising.hpp"
#include "dcqo/pauli.hpp"

namespace dcqo {

enum class CdMode { None, LCD, ACD };

inline std::string_view to_string(CdMode m) {
  switch (m) {
    case CdMode::None: return "none";
    case CdMode::LCD: return "lcd";
    case CdMode::ACD: return "acd";
  }
  return "?";
}

inline CdMode parse_cd_mode(std::string_view s) {
  if (s == "none") return CdMode::None;
  if (s == "lcd") return CdMode::LCD;
  if (s == "acd") return CdMode::ACD;
  throw ConfigError("unknown CD mode '" + std::string(s) + "' (expected none, lcd or acd)");
}

/// Total time T split into M equal Trotter steps. Step k ends at
/// t_k = k T / M, so t_M == T exactly.
struct Schedule {
  double T = 1.0;
  int M = 20;

  Schedule() = default;
  Schedule(double total_time, int steps) : T(total_time), M(steps) {
    if (!(T > 0) || !std::isfinite(T)) throw ConfigError("total time T must be positive");
    if (M < 1) throw ConfigError("step count M must be >= 1");
  }

  /// Builds the schedule from a step size; dt must divide T within 1e-12.
  static Schedule from_step(double total_time, double dt) {
    if (!(dt > 0)) throw ConfigError("step size dt must be positive");
    if (!(total_time > 0)) throw ConfigError("total time T must be positive");
    const double ratio = total_time / dt;
    const double steps = std::round(ratio);
    if (steps < 1 || std::abs(steps * dt - total_time) > 1e-12 * std::max(1.0, total_time)) {
      throw ConfigError("dt = " + std::to_string(dt) + " does not divide T = " + std::to_string(total_time));
    }
    return Schedule(total_time, static_cast<int>(steps));
  }

  double dt() const { return T / M; }
  double time(int k) const { return T * k / M; }
};

namespace detail {
inline void check_time(double t, double T) {
  if (!(T > 0)) throw ConfigError("total time T must be positive");
  if (t < 0.0 || t > T) {
    throw ConfigError("time " + std::to_string(t) + " outside [0, " + std::to_string(T) + "]");
  }
}
inline void check_lambda(double lam) {
  if (!(lam >= 0.0 && lam <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
}
}  // namespace detail

/// lambda(t) = sin^2[(pi/2) sin^2(pi t / 2T)].
inline double lambda(double t, double T) {
  detail::check_time(t, T);
  const double inner = std::sin(std::numbers::pi * t / (2.0 * T));
  const double outer = std::sin(0.5 * std::numbers::pi * inner * inner);
  return outer * outer;
}

/// d lambda / dt = (pi^2 / 4T) sin(pi sin^2(pi t / 2T)) sin(pi t / T).
inline double lambda_dot(double t, double T) {
  detail::check_time(t, T);
  if (t == 0.0 || t == T) return 0.0;
  constexpr double pi = std::numbers::pi;
  const double inner = std::sin(pi * t / (2.0 * T));
  return pi * pi / (4.0 * T) * std::sin(pi * inner * inner) * std::sin(pi * t / T);
}

/// Default scheduling function over [0, T].
struct SineSquaredSchedule {
  double T;
  double lambda(double t) const { return dcqo::lambda(t, T); }
  double lambda_dot(double t) const { return dcqo::lambda_dot(t, T); }
};

/// Local CD coefficients alpha_i for the ansatz sum_i alpha_i Y_i.
///
/// Minimizing Tr[G^2] with G = dH/dlambda + i[A, H_ad] separates per qubit:
///   alpha_i = hx h_i / (2 [hx^2 (1-lam)^2 + lam^2 (h_i^2 + sum_{j!=i} K_ij^2)])
/// where K_ij = 2 J_ij is the pair coupling of Z_i Z_j.
inline std::vector<double> lcd_alpha(const IsingModel& model, double lam) {
  detail::check_lambda(lam);
  const int n = model.n_qubits;
  std::vector<double> alpha(n, 0.0);
  const double hx = model.hx;
  for (int i = 0; i < n; ++i) {
    double k2 = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) k2 += model.pair_coupling(i, j) * model.pair_coupling(i, j);
    }
    const double denom =
        2.0 * (hx * hx * (1.0 - lam) * (1.0 - lam) + lam * lam * (model.h[i] * model.h[i] + k2));
    alpha[i] = denom > 0.0 ? hx * model.h[i] / denom : 0.0;
  }
  return alpha;
}

/// H_ad(lambda) = (1 - lambda) H_i + lambda H_p.
inline PauliSum adiabatic_hamiltonian(const IsingModel& model, double lam) {
  return (1.0 - lam) * driver_hamiltonian(model) + lam * problem_hamiltonian(model);
}

/// dH_ad / dlambda = H_p - H_i.
inline PauliSum adiabatic_derivative(const IsingModel& model) {
  return problem_hamiltonian(model) - driver_hamiltonian(model);
}

/// S(A) = Tr[G^2] / 2^N with G = dH/dlambda + i[A, H_ad], built term by term.
inline double action(const IsingModel& model, double lam, const PauliSum& gauge) {
  const PauliSum h_ad = adiabatic_hamiltonian(model, lam);
  const PauliSum g = adiabatic_derivative(model) + cplx{0, 1} * commutator(gauge, h_ad);
  return normalized_trace_product(g, g).real();
}

/// First-order nested-commutator gauge potential A = alpha_1 D with
/// D = i[H_ad, dH_ad/dlambda] = i[H_i, H_p], which does not depend on lambda.
///
/// With C(lambda) = i[D, H_ad] = (1 - lambda) C0 + lambda C1 the action is a
/// parabola in alpha_1 whose coefficients are lambda polynomials; the traces
/// below are evaluated once per model.
class AcdGenerator {
 public:
  explicit AcdGenerator(const IsingModel& model)
      : direction_(model.n_qubits), deriv_(adiabatic_derivative(model)) {
    const PauliSum hi = driver_hamiltonian(model);
    const PauliSum hp = problem_hamiltonian(model);
    direction_ = cplx{0, 1} * commutator(hi, hp);
    const PauliSum c0 = cplx{0, 1} * commutator(direction_, hi);
    const PauliSum c1 = cplx{0, 1} * commutator(direction_, hp);
    t0_ = normalized_trace_product(deriv_, c0).real();
    t1_ = normalized_trace_product(deriv_, c1).real();
    a00_ = normalized_trace_product(c0, c0).real();
    a01_ = normalized_trace_product(c0, c1).real();
    a11_ = normalized_trace_product(c1, c1).real();
    s_deriv_ = normalized_trace_product(deriv_, deriv_).real();
  }

  /// D, Hermitian with real coefficients.
  const PauliSum& direction() const { return direction_; }

  struct Coefficient {
    double alpha = 0.0;
    bool degenerate = false;
  };

  /// Minimizer of S(alpha) = s_deriv + 2 alpha <dH, C> + alpha^2 <C, C>.
  Coefficient alpha1(double lam) const {
    detail::check_lambda(lam);
    const double u = 1.0 - lam;
    const double cc = u * u * a00_ + 2.0 * u * lam * a01_ + lam * lam * a11_;
    const double dc = u * t0_ + lam * t1_;
    if (!(cc > kDegenerateTol * std::max(1.0, s_deriv_))) return {0.0, true};
    return {-dc / cc, false};
  }

  /// S(alpha) from the cached traces.
  double action(double lam, double alpha) const {
    const double u = 1.0 - lam;
    const double cc = u * u * a00_ + 2.0 * u * lam * a01_ + lam * lam * a11_;
    const double dc = u * t0_ + lam * t1_;
    return s_deriv_ + 2.0 * alpha * dc + alpha * alpha * cc;
  }

  static constexpr double kDegenerateTol = 1e-14;

 private:
  PauliSum direction_;
  PauliSum deriv_;
  double t0_ = 0, t1_ = 0, a00_ = 0, a01_ = 0, a11_ = 0, s_deriv_ = 0;
};

inline AcdGenerator::Coefficient acd_alpha1(const IsingModel& model, double lam) {
  return AcdGenerator(model).alpha1(lam);
}

/// lambda_dot * A_lambda for the chosen ansatz.
inline PauliSum cd_term(CdMode mode, const IsingModel& model, double lam, double lam_dot,
                        const AcdGenerator* acd = nullptr) {
  detail::check_lambda(lam);
  const int n = model.n_qubits;
  PauliSum out(n);
  if (lam_dot == 0.0) return out;
  switch (mode) {
    case CdMode::None:
      break;
    case CdMode::LCD: {
      const auto alpha = lcd_alpha(model, lam);
      for (int i = 0; i < n; ++i) out.add(PauliString::y(n, i), lam_dot * alpha[i]);
      break;
    }
    case CdMode::ACD: {
      if (acd != nullptr) {
        out = lam_dot * acd->alpha1(lam).alpha * acd->direction();
      } else {
        AcdGenerator gen(model);
        out = lam_dot * gen.alpha1(lam).alpha * gen.direction();
      }
      break;
    }
  }
  return out;
}

}  // namespace dcqo
