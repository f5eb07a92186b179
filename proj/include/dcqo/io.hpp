#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcqo/error.hpp"
#include "dcqo/evolve.hpp"
#include "dcqo/ising.hpp"
#include "dcqo/portfolio.hpp"
#include "dcqo/variational.hpp"

namespace dcqo {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

inline json to_json(const GenParams& g) {
  return {{"max_return", g.max_return},
          {"factor_ratio", g.factor_ratio},
          {"idio_lo", g.idio_lo},
          {"idio_hi", g.idio_hi},
          {"target_variance", g.target_variance}};
}

inline GenParams gen_params_from_json(const json& j) {
  GenParams g;
  g.max_return = j.value("max_return", g.max_return);
  g.factor_ratio = j.value("factor_ratio", g.factor_ratio);
  g.idio_lo = j.value("idio_lo", g.idio_lo);
  g.idio_hi = j.value("idio_hi", g.idio_hi);
  g.target_variance = j.value("target_variance", g.target_variance);
  return g;
}

/// Instance file: {n, g, b, theta1, theta2, theta3, hx, m, rho, seed, gen_params}.
/// Doubles are written in shortest round-trip form, so reading back is
/// bit-exact.
struct InstanceFile {
  ProblemSpec spec;
  std::uint64_t seed = 0;
  GenParams gen;
};

inline json to_json(const InstanceFile& f) {
  const ProblemSpec& s = f.spec;
  return {{"n", s.market.n},     {"g", s.g},           {"b", s.b},
          {"theta1", s.theta1},  {"theta2", s.theta2}, {"theta3", s.theta3},
          {"hx", s.hx},          {"m", s.market.m},    {"rho", s.market.rho},
          {"seed", f.seed},      {"gen_params", to_json(f.gen)}};
}

inline InstanceFile instance_from_json(const json& j) {
  try {
    InstanceFile f;
    f.spec.market.n = j.at("n").get<int>();
    f.spec.g = j.at("g").get<int>();
    f.spec.b = j.at("b").get<double>();
    f.spec.theta1 = j.at("theta1").get<double>();
    f.spec.theta2 = j.at("theta2").get<double>();
    f.spec.theta3 = j.at("theta3").get<double>();
    f.spec.hx = j.at("hx").get<double>();
    f.spec.market.m = j.at("m").get<std::vector<double>>();
    f.spec.market.rho = j.at("rho").get<std::vector<std::vector<double>>>();
    f.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("gen_params")) f.gen = gen_params_from_json(j.at("gen_params"));
    f.spec.validate();
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed instance JSON: ") + e.what());
  }
}

inline json to_json(const IsingModel& m) {
  return {{"n_qubits", m.n_qubits}, {"h", m.h}, {"J", m.J}, {"beta_offset", m.beta_offset}, {"hx", m.hx}};
}

inline IsingModel ising_from_json(const json& j) {
  try {
    IsingModel m;
    m.n_qubits = j.at("n_qubits").get<int>();
    m.h = j.at("h").get<std::vector<double>>();
    m.J = j.at("J").get<std::vector<std::vector<double>>>();
    m.beta_offset = j.at("beta_offset").get<double>();
    m.hx = j.at("hx").get<double>();
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed Ising JSON: ") + e.what());
  }
}

inline json to_json(const InstanceInfo& info) {
  return {{"b", info.budget},   {"theta1", info.theta1}, {"theta2", info.theta2},
          {"theta3", info.theta3}, {"hx", info.hx},     {"master_seed", info.master_seed},
          {"gen_params", to_json(info.gen)}};
}

/// One JSON line per (instance, mode) run. `elapsed_ms` is the only
/// non-deterministic field.
inline json to_json(const RunReport& r) {
  return {{"instance_id", r.instance.id},
          {"seed", r.instance.seed},
          {"mode", std::string(to_string(r.cd_mode))},
          {"N", r.n_qubits},
          {"n", r.instance.n_assets},
          {"g", r.instance.g},
          {"T", r.T},
          {"M", r.M},
          {"dt", r.dt},
          {"P", r.success_probability},
          {"energy", r.final_energy},
          {"ground_energy", r.ground_energy},
          {"degeneracy", r.degeneracy},
          {"norm_error", r.norm_error},
          {"config", to_json(r.instance)},
          {"version", kVersion},
          {"elapsed_ms", r.elapsed_ms}};
}

inline RunReport run_report_from_json(const json& j) {
  RunReport r;
  r.instance.id = j.at("instance_id").get<std::int64_t>();
  r.instance.seed = j.value("seed", std::uint64_t{0});
  r.cd_mode = parse_cd_mode(j.at("mode").get<std::string>());
  r.n_qubits = j.at("N").get<int>();
  r.instance.n_assets = j.value("n", 0);
  r.instance.g = j.value("g", 0);
  r.T = j.at("T").get<double>();
  r.M = j.value("M", 0);
  r.dt = j.at("dt").get<double>();
  r.success_probability = j.at("P").get<double>();
  r.final_energy = j.value("energy", 0.0);
  r.ground_energy = j.value("ground_energy", 0.0);
  r.degeneracy = j.value("degeneracy", std::size_t{0});
  r.norm_error = j.value("norm_error", 0.0);
  r.elapsed_ms = j.value("elapsed_ms", 0.0);
  if (j.contains("config")) {
    const json& c = j.at("config");
    r.instance.budget = c.value("b", 0.0);
    r.instance.theta1 = c.value("theta1", 0.0);
    r.instance.theta2 = c.value("theta2", 0.0);
    r.instance.theta3 = c.value("theta3", 0.0);
    r.instance.hx = c.value("hx", 0.0);
    r.instance.master_seed = c.value("master_seed", std::uint64_t{0});
    if (c.contains("gen_params")) r.instance.gen = gen_params_from_json(c.at("gen_params"));
  }
  if (!(r.success_probability >= 0.0 && r.success_probability <= 1.0)) {
    throw ConfigError("success probability outside [0, 1]");
  }
  return r;
}

inline json to_json(const AnsatzConfig& c) {
  return {{"p", c.p},
          {"mode", std::string(to_string(c.mode))},
          {"dc_placement", std::string(to_string(c.placement))},
          {"init_range", {c.init_lo, c.init_hi}},
          {"restarts", c.restarts},
          {"top_k", c.top_k},
          {"step_size", c.step_size},
          {"max_iters", c.max_iters},
          {"grad_tol", c.grad_tol},
          {"fd_step", c.fd_step},
          {"adagrad_eps", c.adagrad_eps}};
}

inline json to_json(const VariationalReport& r, const AnsatzConfig& cfg) {
  json restarts = json::array();
  for (const auto& rr : r.restarts) {
    restarts.push_back({{"index", rr.index},
                        {"P", rr.success_probability},
                        {"cost", rr.cost},
                        {"iterations", rr.iterations},
                        {"params", rr.params}});
  }
  return {{"instance_id", r.instance_id},
          {"mode", std::string(to_string(r.mode))},
          {"p", r.p},
          {"seed", r.seed},
          {"best_params", r.best_params},
          {"best_cost", r.best_cost},
          {"best_P", r.best_success_probability},
          {"top_k", r.top_k},
          {"topk_mean", r.topk_mean},
          {"topk_std", r.topk_std},
          {"ranking", r.ranking},
          {"restarts", restarts},
          {"config", to_json(cfg)},
          {"version", kVersion}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
}

}  // namespace dcqo
