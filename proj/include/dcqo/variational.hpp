#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dcqo/error.hpp"
#include "dcqo/ising.hpp"
#include "dcqo/seed.hpp"
#include "dcqo/statevec.hpp"

namespace dcqo {

enum class AnsatzMode { QAOA, DCQAOA };
enum class DcPlacement { AfterMixer, BeforeMixer };

inline std::string_view to_string(AnsatzMode m) { return m == AnsatzMode::QAOA ? "qaoa" : "dcqaoa"; }
inline std::string_view to_string(DcPlacement p) {
  return p == DcPlacement::AfterMixer ? "after_mixer" : "before_mixer";
}

inline AnsatzMode parse_ansatz_mode(std::string_view s) {
  if (s == "qaoa") return AnsatzMode::QAOA;
  if (s == "dcqaoa" || s == "dc-qaoa") return AnsatzMode::DCQAOA;
  throw ConfigError("unknown ansatz '" + std::string(s) + "' (expected qaoa or dcqaoa)");
}

struct AnsatzConfig {
  int p = 1;
  AnsatzMode mode = AnsatzMode::QAOA;
  DcPlacement placement = DcPlacement::AfterMixer;
  double init_lo = -std::numbers::pi / 2;
  double init_hi = std::numbers::pi / 2;
  int restarts = 20;
  int top_k = 10;
  double step_size = 0.1;
  int max_iters = 500;
  double grad_tol = 1e-6;
  double fd_step = 1e-5;
  double adagrad_eps = 1e-8;

  int params_per_layer() const { return mode == AnsatzMode::QAOA ? 2 : 3; }
  std::size_t param_count() const { return static_cast<std::size_t>(p) * params_per_layer(); }

  void validate() const {
    if (p < 1) throw ConfigError("layer count p must be >= 1");
    if (top_k < 1 || restarts < top_k) throw ConfigError("need restarts >= topk >= 1");
    if (!(step_size > 0)) throw ConfigError("step size must be positive");
    if (max_iters < 0) throw ConfigError("iteration cap must be >= 0");
    if (!(fd_step > 0)) throw ConfigError("finite-difference step must be positive");
    if (!(init_hi >= init_lo)) throw ConfigError("init range must satisfy lo <= hi");
  }
};

/// Parameters are laid out per layer as (gamma, beta) or (gamma, beta, alpha).
using Params = std::vector<double>;

/// Model plus its cached energy diagonal; all ansatz evaluations go
/// through this.
class VariationalProblem {
 public:
  explicit VariationalProblem(IsingModel model) : model_(std::move(model)), diag_(energy_diagonal(model_)) {
    model_.validate();
  }

  const IsingModel& model() const { return model_; }
  const std::vector<double>& diagonal() const { return diag_; }

  StateVector state(const Params& params, const AnsatzConfig& cfg) const {
    if (params.size() != cfg.param_count()) {
      throw ConfigError("expected " + std::to_string(cfg.param_count()) + " parameters, got " +
                        std::to_string(params.size()));
    }
    const int n = model_.n_qubits;
    StateVector psi = uniform_superposition(n);
    const int stride = cfg.params_per_layer();
    for (int layer = 0; layer < cfg.p; ++layer) {
      const double gamma = params[layer * stride];
      const double beta = params[layer * stride + 1];
      apply_diagonal_phase(psi, diag_, gamma);
      if (cfg.mode == AnsatzMode::DCQAOA && cfg.placement == DcPlacement::BeforeMixer) {
        apply_dc(psi, params[layer * stride + 2]);
      }
      for (int q = 0; q < n; ++q) apply_pauli_exp(psi, PauliString::x(n, q), beta);
      if (cfg.mode == AnsatzMode::DCQAOA && cfg.placement == DcPlacement::AfterMixer) {
        apply_dc(psi, params[layer * stride + 2]);
      }
    }
    return psi;
  }

  double cost(const Params& params, const AnsatzConfig& cfg) const {
    return expectation_diagonal(state(params, cfg), diag_);
  }

  /// Central differences with step cfg.fd_step.
  std::vector<double> gradient(Params params, const AnsatzConfig& cfg) const {
    std::vector<double> grad(params.size());
    const double h = cfg.fd_step;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double orig = params[k];
      params[k] = orig + h;
      const double up = cost(params, cfg);
      params[k] = orig - h;
      const double down = cost(params, cfg);
      params[k] = orig;
      grad[k] = (up - down) / (2.0 * h);
    }
    return grad;
  }

 private:
  // U_D(alpha) = exp(-i alpha sum_i h_i Y_i); the factors commute.
  void apply_dc(StateVector& psi, double alpha) const {
    const int n = model_.n_qubits;
    for (int q = 0; q < n; ++q) apply_pauli_exp(psi, PauliString::y(n, q), alpha * model_.h[q]);
  }

  IsingModel model_;
  std::vector<double> diag_;
};

inline StateVector ansatz_state(const IsingModel& model, const Params& params, const AnsatzConfig& cfg) {
  return VariationalProblem(model).state(params, cfg);
}

inline double cost(const IsingModel& model, const Params& params, const AnsatzConfig& cfg) {
  return VariationalProblem(model).cost(params, cfg);
}

inline std::vector<double> gradient(const IsingModel& model, const Params& params, const AnsatzConfig& cfg) {
  return VariationalProblem(model).gradient(params, cfg);
}

struct RestartResult {
  int index = 0;
  Params initial;
  Params params;
  double cost = 0.0;
  double success_probability = 0.0;
  int iterations = 0;
  double min_cost_seen = 0.0;  // lowest cost over all iterates
};

struct VariationalReport {
  std::int64_t instance_id = 0;
  AnsatzMode mode = AnsatzMode::QAOA;
  int p = 1;
  std::uint64_t seed = 0;
  Params best_params;
  double best_cost = 0.0;
  double best_success_probability = 0.0;
  std::vector<RestartResult> restarts;  // in restart-index order
  std::vector<int> ranking;             // restart indices by descending P_s
  double topk_mean = 0.0;
  double topk_std = 0.0;  // population standard deviation
  int top_k = 0;
};

inline Params random_init(const AnsatzConfig& cfg, std::uint64_t seed, int restart) {
  std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
  std::uniform_real_distribution<double> dist(cfg.init_lo, cfg.init_hi);
  Params p(cfg.param_count());
  for (auto& v : p) v = dist(rng);
  return p;
}

/// One Adagrad descent from `init`: accumulate squared gradients and step by
/// step_size * g / (sqrt(G) + eps) until the cap or |g| < grad_tol.
inline RestartResult adagrad_descent(const VariationalProblem& prob, const GroundTruth& truth,
                                     const AnsatzConfig& cfg, Params init) {
  RestartResult r;
  r.initial = init;
  Params theta = std::move(init);
  std::vector<double> accum(theta.size(), 0.0);
  r.min_cost_seen = prob.cost(theta, cfg);
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const auto g = prob.gradient(theta, cfg);
    const double gnorm = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
    if (gnorm < cfg.grad_tol) break;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      accum[k] += g[k] * g[k];
      theta[k] -= cfg.step_size * g[k] / (std::sqrt(accum[k]) + cfg.adagrad_eps);
    }
    r.min_cost_seen = std::min(r.min_cost_seen, prob.cost(theta, cfg));
  }
  r.iterations = it;
  r.params = theta;
  const StateVector psi = prob.state(theta, cfg);
  r.cost = expectation_diagonal(psi, prob.diagonal());
  r.success_probability = success_probability(psi, truth);
  return r;
}

inline VariationalReport optimize(const IsingModel& model, const GroundTruth& truth, const AnsatzConfig& cfg,
                                  std::uint64_t seed, std::int64_t instance_id = 0) {
  cfg.validate();
  const VariationalProblem prob(model);
  VariationalReport rep;
  rep.instance_id = instance_id;
  rep.mode = cfg.mode;
  rep.p = cfg.p;
  rep.seed = seed;
  rep.top_k = cfg.top_k;
  for (int r = 0; r < cfg.restarts; ++r) {
    RestartResult res = adagrad_descent(prob, truth, cfg, random_init(cfg, seed, r));
    res.index = r;
    rep.restarts.push_back(std::move(res));
  }
  rep.ranking.resize(rep.restarts.size());
  std::iota(rep.ranking.begin(), rep.ranking.end(), 0);
  std::stable_sort(rep.ranking.begin(), rep.ranking.end(), [&](int a, int b) {
    return rep.restarts[a].success_probability > rep.restarts[b].success_probability;
  });
  const RestartResult& best = rep.restarts[rep.ranking.front()];
  rep.best_params = best.params;
  rep.best_cost = best.cost;
  rep.best_success_probability = best.success_probability;
  double sum = 0.0;
  for (int k = 0; k < cfg.top_k; ++k) sum += rep.restarts[rep.ranking[k]].success_probability;
  rep.topk_mean = sum / cfg.top_k;
  double var = 0.0;
  for (int k = 0; k < cfg.top_k; ++k) {
    const double d = rep.restarts[rep.ranking[k]].success_probability - rep.topk_mean;
    var += d * d;
  }
  rep.topk_std = std::sqrt(var / cfg.top_k);
  return rep;
}

}  // namespace dcqo
