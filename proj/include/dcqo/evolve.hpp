#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcqo/error.hpp"
#include "dcqo/ising.hpp"
#include "dcqo/pauli.hpp"
#include "dcqo/schedule.hpp"
#include "dcqo/statevec.hpp"

namespace dcqo {

/// Ordered list of Hermitian strings whose coefficients depend on
/// (lambda, lambda_dot). Order: X fields, Z fields, ZZ couplings (i < j),
/// then CD terms by weight and qubit index.
class TermPlan {
 public:
  enum class Source { Driver, Field, Coupling, LcdY, AcdTerm };

  struct Term {
    PauliString string;
    Source source;
    int i = 0;
    int j = 0;
    double weight = 0.0;  // fixed factor: h_i, 2 J_ij, or the D coefficient
  };

  TermPlan(const IsingModel& model, CdMode mode) : model_(model), mode_(mode) {
    model.validate();
    const int n = model.n_qubits;
    for (int i = 0; i < n; ++i) terms_.push_back({PauliString::x(n, i), Source::Driver, i, i, model.hx});
    for (int i = 0; i < n; ++i) terms_.push_back({PauliString::z(n, i), Source::Field, i, i, model.h[i]});
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        terms_.push_back({multiply(PauliString::z(n, i), PauliString::z(n, j)), Source::Coupling, i, j,
                          model.pair_coupling(i, j)});
      }
    }
    if (mode == CdMode::LCD) {
      for (int i = 0; i < n; ++i) terms_.push_back({PauliString::y(n, i), Source::LcdY, i, i, 1.0});
    } else if (mode == CdMode::ACD) {
      acd_.emplace(model);
      std::vector<Term> cd;
      for (const auto& [key, c] : acd_->direction().terms()) {
        cd.push_back({acd_->direction().string_of(key), Source::AcdTerm, 0, 0, c.real()});
      }
      std::sort(cd.begin(), cd.end(), [](const Term& a, const Term& b) {
        const int wa = a.string.weight(), wb = b.string.weight();
        if (wa != wb) return wa < wb;
        const auto sa = a.string.x_mask | a.string.z_mask, sb = b.string.x_mask | b.string.z_mask;
        // Lower qubit indices first: compare supports by their lowest set bits.
        const auto ra = std::countr_zero(sa), rb = std::countr_zero(sb);
        if (ra != rb) return ra < rb;
        if (sa != sb) return sa < sb;
        return a.string.x_mask < b.string.x_mask;
      });
      terms_.insert(terms_.end(), cd.begin(), cd.end());
    }
  }

  const std::vector<Term>& terms() const { return terms_; }
  CdMode mode() const { return mode_; }
  const IsingModel& model() const { return model_; }

  /// Coefficient c_j for every term at one instant.
  std::vector<double> coefficients(double lam, double lam_dot) const {
    std::vector<double> lcd;
    double acd = 0.0;
    if (mode_ == CdMode::LCD && lam_dot != 0.0) lcd = lcd_alpha(model_, lam);
    if (mode_ == CdMode::ACD && lam_dot != 0.0) acd = acd_->alpha1(lam).alpha;
    std::vector<double> c(terms_.size());
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const Term& t = terms_[k];
      switch (t.source) {
        case Source::Driver: c[k] = -(1.0 - lam) * t.weight; break;
        case Source::Field:
        case Source::Coupling: c[k] = lam * t.weight; break;
        case Source::LcdY: c[k] = lam_dot == 0.0 ? 0.0 : lam_dot * lcd[t.i]; break;
        case Source::AcdTerm: c[k] = lam_dot * acd * t.weight; break;
      }
    }
    return c;
  }

  /// Sum of c_j P_j as a Pauli sum (the instantaneous H(t)).
  PauliSum hamiltonian(double lam, double lam_dot) const {
    const auto c = coefficients(lam, lam_dot);
    PauliSum h(model_.n_qubits);
    for (std::size_t k = 0; k < terms_.size(); ++k) h.add(terms_[k].string, c[k]);
    return h;
  }

 private:
  IsingModel model_;
  CdMode mode_;
  std::vector<Term> terms_;
  std::optional<AcdGenerator> acd_;
};

/// Applies M first-order Trotter steps; step k uses coefficients at
/// t_k = k dt, k = 1..M.
template <typename ScheduleFn>
void trotter_evolve(StateVector& state, const TermPlan& plan, const Schedule& sched, const ScheduleFn& fn) {
  state.check(plan.model().n_qubits);
  const double dt = sched.dt();
  for (int k = 1; k <= sched.M; ++k) {
    const double t = sched.time(k);
    const auto c = plan.coefficients(fn.lambda(t), fn.lambda_dot(t));
    const auto& terms = plan.terms();
    for (std::size_t j = 0; j < terms.size(); ++j) apply_pauli_exp(state, terms[j].string, dt * c[j]);
  }
}

/// Identifying data attached to a run. Filled by the caller; enough to
/// regenerate the instance in isolation.
struct InstanceInfo {
  std::int64_t id = 0;
  std::uint64_t seed = 0;
  std::uint64_t master_seed = 0;
  int n_assets = 0;
  int g = 0;
  double budget = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
  double hx = 0.0;
  GenParams gen;
};

struct RunReport {
  InstanceInfo instance;
  CdMode cd_mode = CdMode::None;
  int n_qubits = 0;
  double T = 0.0;
  int M = 0;
  double dt = 0.0;
  double success_probability = 0.0;
  double final_energy = 0.0;  // <H_p>, offset excluded
  double ground_energy = 0.0;
  std::size_t degeneracy = 0;
  double norm_error = 0.0;  // |1 - <psi|psi>|
  double elapsed_ms = 0.0;
};

template <typename ScheduleFn>
StateVector evolve_state(const IsingModel& model, const Schedule& sched, CdMode mode, const ScheduleFn& fn,
                         int qubit_cap = kDefaultQubitCap) {
  if (model.n_qubits > qubit_cap) throw ConfigError("evolve: N exceeds qubit cap");
  const TermPlan plan(model, mode);
  StateVector state = uniform_superposition(model.n_qubits, qubit_cap);
  trotter_evolve(state, plan, sched, fn);
  return state;
}

inline StateVector evolve_state(const IsingModel& model, const Schedule& sched, CdMode mode) {
  return evolve_state(model, sched, mode, SineSquaredSchedule{sched.T});
}

inline RunReport evolve(const IsingModel& model, const GroundTruth& truth, const Schedule& sched, CdMode mode,
                        const InstanceInfo& info = {}, int qubit_cap = kDefaultQubitCap) {
  const auto start = std::chrono::steady_clock::now();
  if (!truth.states.empty() && truth.states.back() >> model.n_qubits) {
    throw DimensionError("ground truth does not match the model dimension");
  }
  const StateVector state = evolve_state(model, sched, mode, SineSquaredSchedule{sched.T}, qubit_cap);
  RunReport r;
  r.instance = info;
  r.cd_mode = mode;
  r.n_qubits = model.n_qubits;
  r.T = sched.T;
  r.M = sched.M;
  r.dt = sched.dt();
  r.success_probability = success_probability(state, truth);
  r.final_energy = expectation_diagonal(state, energy_diagonal(model, qubit_cap));
  r.ground_energy = truth.energy;
  r.degeneracy = truth.degeneracy();
  r.norm_error = std::abs(1.0 - state.norm_squared());
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline constexpr int kReferenceRefinement = 64;
inline constexpr int kReferenceQubitCap = 10;

/// Same first-order scheme on a 64x finer grid, used as the quasi-exact
/// reference for Trotter-error measurements.
template <typename ScheduleFn>
StateVector exact_evolve_reference(const IsingModel& model, const Schedule& sched, CdMode mode,
                                   const ScheduleFn& fn) {
  if (model.n_qubits > kReferenceQubitCap) throw ConfigError("reference evolution is capped at N <= 10");
  return evolve_state(model, Schedule(sched.T, sched.M * kReferenceRefinement), mode, fn);
}

inline StateVector exact_evolve_reference(const IsingModel& model, const Schedule& sched, CdMode mode) {
  return exact_evolve_reference(model, sched, mode, SineSquaredSchedule{sched.T});
}

struct EnhancementStats {
  std::vector<std::optional<double>> p_enh;  // nullopt where P0 == 0
  double mean = 0.0;                         // over defined entries
  double stddev = 0.0;                       // population standard deviation
  double r_enh = 0.0;
  std::size_t enhanced = 0;
  std::size_t undefined = 0;
};

/// P_enh_i = P_i / P0_i and R_enh = (#P_enh > 1) / I0. An instance with
/// P0 == 0 has undefined P_enh, is left out of the mean, and counts as
/// enhanced iff P > 0.
inline EnhancementStats enhancement_metrics(const std::vector<double>& p_cd, const std::vector<double>& p_plain) {
  if (p_cd.size() != p_plain.size()) throw DimensionError("enhancement_metrics: unpaired lists");
  EnhancementStats s;
  s.p_enh.resize(p_cd.size());
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t i = 0; i < p_cd.size(); ++i) {
    if (p_plain[i] == 0.0) {
      ++s.undefined;
      if (p_cd[i] > 0.0) ++s.enhanced;
      continue;
    }
    const double e = p_cd[i] / p_plain[i];
    s.p_enh[i] = e;
    sum += e;
    ++defined;
    if (e > 1.0) ++s.enhanced;
  }
  if (defined > 0) {
    s.mean = sum / static_cast<double>(defined);
    double var = 0.0;
    for (const auto& e : s.p_enh) {
      if (e) var += (*e - s.mean) * (*e - s.mean);
    }
    s.stddev = std::sqrt(var / static_cast<double>(defined));
  }
  if (!p_cd.empty()) s.r_enh = static_cast<double>(s.enhanced) / static_cast<double>(p_cd.size());
  return s;
}

inline EnhancementStats enhancement_metrics(const std::vector<RunReport>& reports_cd,
                                            const std::vector<RunReport>& reports_plain) {
  if (reports_cd.size() != reports_plain.size()) throw DimensionError("enhancement_metrics: unpaired lists");
  std::vector<double> a, b;
  for (std::size_t i = 0; i < reports_cd.size(); ++i) {
    if (reports_cd[i].instance.id != reports_plain[i].instance.id) {
      throw DimensionError("enhancement_metrics: instance ids differ at position " + std::to_string(i));
    }
    a.push_back(reports_cd[i].success_probability);
    b.push_back(reports_plain[i].success_probability);
  }
  return enhancement_metrics(a, b);
}

}  // namespace dcqo
