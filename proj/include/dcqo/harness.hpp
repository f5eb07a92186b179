#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dcqo/error.hpp"
#include "dcqo/evolve.hpp"
#include "dcqo/io.hpp"
#include "dcqo/ising.hpp"
#include "dcqo/portfolio.hpp"
#include "dcqo/schedule.hpp"
#include "dcqo/seed.hpp"
#include "dcqo/variational.hpp"

namespace dcqo {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled by exactly one worker, so results written to slot i do not depend
/// on the thread count. The first exception (lowest index) is rethrown.
template <typename F>
void parallel_for(std::size_t count, int threads, const F& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::size_t err_index = count;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (i < err_index) {
            err_index = i;
            err = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

/// Corpus and run parameters shared by sweep, tsweep and qaoa.
struct SweepConfig {
  int instances = 100;
  int n = 6;
  int g = 2;
  double b = 1.0;
  double theta1 = 0.3;
  double theta2 = 0.5;
  double theta3 = 0.2;
  double hx = 1.0;
  double T = 1.0;
  double dt = 0.05;
  std::vector<double> t_grid;  // tsweep only, ascending
  std::vector<CdMode> modes{CdMode::None, CdMode::LCD, CdMode::ACD};
  std::uint64_t master_seed = 1;
  GenParams gen;
  int threads = 1;
  int qubit_cap = kDefaultQubitCap;

  void validate() const {
    if (instances < 1) throw ConfigError("instance count must be >= 1");
    if (n < 1 || g < 1) throw ConfigError("n and g must be >= 1");
    if (n * g > qubit_cap) {
      throw ConfigError("N = n*g = " + std::to_string(n * g) + " exceeds cap " + std::to_string(qubit_cap));
    }
    if (!(hx > 0)) throw ConfigError("hx must be positive");
    gen.validate();
    (void)Schedule::from_step(T, dt);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      (void)Schedule::from_step(t_grid[k], dt);
      if (k > 0 && !(t_grid[k] > t_grid[k - 1])) throw ConfigError("T grid must be strictly ascending");
    }
    if (modes.empty()) throw ConfigError("at least one mode is required");
    if (threads < 1) throw ConfigError("thread count must be >= 1");
  }

  /// Modes with the plain (None) baseline first and duplicates removed.
  std::vector<CdMode> run_modes() const {
    std::vector<CdMode> out{CdMode::None};
    for (auto m : modes) {
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    return out;
  }
};

inline json to_json(const SweepConfig& c) {
  json modes = json::array();
  for (auto m : c.run_modes()) modes.push_back(std::string(to_string(m)));
  return {{"instances", c.instances}, {"n", c.n},
          {"g", c.g},                 {"N", c.n * c.g},
          {"b", c.b},                 {"theta1", c.theta1},
          {"theta2", c.theta2},       {"theta3", c.theta3},
          {"hx", c.hx},               {"T", c.T},
          {"dt", c.dt},               {"t_grid", c.t_grid},
          {"modes", modes},           {"master_seed", c.master_seed},
          {"gen_params", to_json(c.gen)}};
}

struct CorpusInstance {
  InstanceInfo info;
  ProblemSpec spec;
};

/// Instance i of the corpus; its seed depends only on (master_seed, i).
inline CorpusInstance make_instance(const SweepConfig& c, int index) {
  CorpusInstance ci;
  ci.info.id = index;
  ci.info.seed = derive_seed(c.master_seed, static_cast<std::uint64_t>(index));
  ci.info.master_seed = c.master_seed;
  ci.info.n_assets = c.n;
  ci.info.g = c.g;
  ci.info.budget = c.b;
  ci.info.theta1 = c.theta1;
  ci.info.theta2 = c.theta2;
  ci.info.theta3 = c.theta3;
  ci.info.hx = c.hx;
  ci.info.gen = c.gen;
  ci.spec.market = generate_instance(c.n, ci.info.seed, c.gen);
  ci.spec.g = c.g;
  ci.spec.b = c.b;
  ci.spec.theta1 = c.theta1;
  ci.spec.theta2 = c.theta2;
  ci.spec.theta3 = c.theta3;
  ci.spec.hx = c.hx;
  ci.spec.qubit_cap = c.qubit_cap;
  ci.spec.validate();
  return ci;
}

struct Histogram {
  std::vector<double> edges;                // bins + 1 entries
  std::map<std::string, std::vector<int>> counts;  // per mode
};

/// Uniform bins over [0, max P]; the last bin is closed on the right.
inline Histogram make_histogram(const std::map<std::string, std::vector<double>>& values, int bins = 25) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  double top = 0.0;
  for (const auto& [mode, v] : values) {
    for (double x : v) top = std::max(top, x);
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (int k = 0; k <= bins; ++k) h.edges[k] = top * k / bins;
  for (const auto& [mode, v] : values) {
    auto& cnt = h.counts[mode];
    cnt.assign(bins, 0);
    for (double x : v) {
      int k = top > 0 ? static_cast<int>(std::floor(x / top * bins)) : 0;
      cnt[std::clamp(k, 0, bins - 1)]++;
    }
  }
  return h;
}

inline json to_json(const Histogram& h) {
  json counts = json::object();
  for (const auto& [mode, c] : h.counts) counts[mode] = c;
  return {{"edges", h.edges}, {"counts", counts}};
}

inline json to_json(const EnhancementStats& s) {
  json per = json::array();
  for (const auto& e : s.p_enh) per.push_back(e ? json(*e) : json(nullptr));
  return {{"mean", s.mean},         {"std", s.stddev},         {"R_enh", s.r_enh},
          {"enhanced", s.enhanced}, {"undefined", s.undefined}, {"P_enh", per}};
}

struct SweepReport {
  SweepConfig config;
  std::vector<CdMode> modes;                  // run order, None first
  std::vector<std::vector<RunReport>> runs;   // [instance][mode]
  std::map<CdMode, EnhancementStats> enhancement;  // per CD mode vs None
  Histogram histogram;

  std::vector<double> probabilities(CdMode m) const {
    const auto k = static_cast<std::size_t>(std::find(modes.begin(), modes.end(), m) - modes.begin());
    if (k == modes.size()) throw ConfigError("mode not part of this sweep");
    std::vector<double> p;
    for (const auto& row : runs) p.push_back(row[k].success_probability);
    return p;
  }
};

inline SweepReport run_sweep(const SweepConfig& config) {
  config.validate();
  SweepReport rep;
  rep.config = config;
  rep.modes = config.run_modes();
  rep.runs.resize(config.instances);
  const Schedule sched = Schedule::from_step(config.T, config.dt);
  parallel_for(config.instances, config.threads, [&](std::size_t i) {
    const CorpusInstance ci = make_instance(config, static_cast<int>(i));
    const IsingModel model = to_ising(ci.spec);
    const GroundTruth truth = ground_states(model, config.qubit_cap);
    auto& row = rep.runs[i];
    for (auto m : rep.modes) row.push_back(evolve(model, truth, sched, m, ci.info, config.qubit_cap));
  });
  std::map<std::string, std::vector<double>> hist_values;
  const auto plain = rep.probabilities(CdMode::None);
  for (auto m : rep.modes) {
    hist_values[std::string(to_string(m))] = rep.probabilities(m);
    if (m != CdMode::None) rep.enhancement[m] = enhancement_metrics(rep.probabilities(m), plain);
  }
  rep.histogram = make_histogram(hist_values);
  return rep;
}

/// Rows for the JSON-lines output, instance-major in mode order.
inline std::vector<json> sweep_rows(const SweepReport& rep) {
  std::vector<json> rows;
  for (const auto& inst : rep.runs) {
    for (const auto& r : inst) rows.push_back(to_json(r));
  }
  return rows;
}

inline json sweep_summary(const SweepReport& rep) {
  json per_instance = json::array();
  for (const auto& inst : rep.runs) {
    json row = {{"instance_id", inst.front().instance.id},
                {"seed", inst.front().instance.seed},
                {"P0", inst.front().success_probability},
                {"degeneracy", inst.front().degeneracy},
                {"ground_energy", inst.front().ground_energy}};
    json p = json::object(), enh = json::object();
    for (const auto& r : inst) {
      p[std::string(to_string(r.cd_mode))] = r.success_probability;
      if (r.cd_mode != CdMode::None) {
        const double p0 = inst.front().success_probability;
        enh[std::string(to_string(r.cd_mode))] = p0 > 0 ? json(r.success_probability / p0) : json(nullptr);
      }
    }
    row["P"] = p;
    row["P_enh"] = enh;
    per_instance.push_back(row);
  }
  json agg = json::object();
  for (const auto& [m, s] : rep.enhancement) {
    json a = to_json(s);
    a.erase("P_enh");
    agg[std::string(to_string(m))] = a;
  }
  return {{"config", to_json(rep.config)},
          {"version", kVersion},
          {"instances", per_instance},
          {"aggregate", agg},
          {"histogram", to_json(rep.histogram)}};
}

/// Success probability curves P(T) for each instance and mode.
struct TSweepReport {
  SweepConfig config;
  std::vector<CdMode> modes;
  // curves[instance][mode][t-index]
  std::vector<std::vector<std::vector<double>>> curves;
  std::vector<RunReport> runs;  // instance-major, then T, then mode

  /// P_enh of `mode` vs None at grid point t_index, one per instance.
  std::vector<double> enhancement_at(CdMode mode, std::size_t t_index) const {
    const auto k = static_cast<std::size_t>(std::find(modes.begin(), modes.end(), mode) - modes.begin());
    if (k == modes.size()) throw ConfigError("mode not part of this sweep");
    std::vector<double> out;
    for (const auto& inst : curves) {
      const double p0 = inst[0][t_index];
      out.push_back(p0 > 0 ? inst[k][t_index] / p0 : (inst[k][t_index] > 0 ? INFINITY : 1.0));
    }
    return out;
  }
};

inline TSweepReport run_tsweep(const SweepConfig& config) {
  config.validate();
  if (config.t_grid.empty()) throw ConfigError("tsweep needs a non-empty T grid");
  TSweepReport rep;
  rep.config = config;
  rep.modes = config.run_modes();
  const std::size_t nt = config.t_grid.size();
  rep.curves.assign(config.instances, std::vector<std::vector<double>>(rep.modes.size(), std::vector<double>(nt)));
  std::vector<std::vector<RunReport>> runs(config.instances);
  parallel_for(config.instances, config.threads, [&](std::size_t i) {
    const CorpusInstance ci = make_instance(config, static_cast<int>(i));
    const IsingModel model = to_ising(ci.spec);
    const GroundTruth truth = ground_states(model, config.qubit_cap);
    for (std::size_t t = 0; t < nt; ++t) {
      const Schedule sched = Schedule::from_step(config.t_grid[t], config.dt);
      for (std::size_t k = 0; k < rep.modes.size(); ++k) {
        RunReport r = evolve(model, truth, sched, rep.modes[k], ci.info, config.qubit_cap);
        rep.curves[i][k][t] = r.success_probability;
        runs[i].push_back(std::move(r));
      }
    }
  });
  for (auto& r : runs) rep.runs.insert(rep.runs.end(), r.begin(), r.end());
  return rep;
}

inline json tsweep_summary(const TSweepReport& rep) {
  json inst = json::array();
  for (std::size_t i = 0; i < rep.curves.size(); ++i) {
    json curves = json::object();
    for (std::size_t k = 0; k < rep.modes.size(); ++k) curves[std::string(to_string(rep.modes[k]))] = rep.curves[i][k];
    inst.push_back({{"instance_id", i}, {"P", curves}});
  }
  json median = json::object();
  for (auto m : rep.modes) {
    if (m == CdMode::None) continue;
    std::vector<double> med;
    for (std::size_t t = 0; t < rep.config.t_grid.size(); ++t) {
      auto e = rep.enhancement_at(m, t);
      std::sort(e.begin(), e.end());
      const std::size_t n = e.size();
      med.push_back(n % 2 ? e[n / 2] : 0.5 * (e[n / 2 - 1] + e[n / 2]));
    }
    median[std::string(to_string(m))] = med;
  }
  return {{"config", to_json(rep.config)},
          {"version", kVersion},
          {"t_grid", rep.config.t_grid},
          {"instances", inst},
          {"median_P_enh", median}};
}

struct QaoaSweepConfig {
  SweepConfig corpus;  // instances, n, g, b, thetas, hx, seed, threads
  std::vector<int> layers{1, 3};
  std::vector<AnsatzMode> modes{AnsatzMode::QAOA, AnsatzMode::DCQAOA};
  AnsatzConfig ansatz;  // p and mode are overwritten per run
};

struct QaoaRun {
  std::int64_t instance_id = 0;
  AnsatzConfig config;
  VariationalReport report;
};

/// Every (instance, p, mode) combination. Both ansatz modes at a given
/// (instance, p) share the restart seed.
inline std::vector<QaoaRun> run_qaoa(const QaoaSweepConfig& q) {
  SweepConfig corpus = q.corpus;
  if (corpus.modes.empty()) corpus.modes = {CdMode::None};
  corpus.validate();
  q.ansatz.validate();
  struct Job {
    int instance;
    int p;
    AnsatzMode mode;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < q.corpus.instances; ++i) {
    for (int p : q.layers) {
      for (auto m : q.modes) jobs.push_back({i, p, m});
    }
  }
  std::vector<QaoaRun> out(jobs.size());
  parallel_for(jobs.size(), q.corpus.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const CorpusInstance ci = make_instance(q.corpus, job.instance);
    const IsingModel model = to_ising(ci.spec);
    const GroundTruth truth = ground_states(model, q.corpus.qubit_cap);
    AnsatzConfig cfg = q.ansatz;
    cfg.p = job.p;
    cfg.mode = job.mode;
    out[j].instance_id = job.instance;
    out[j].config = cfg;
    out[j].report = optimize(model, truth, cfg, derive_seed(ci.info.seed, static_cast<std::uint64_t>(job.p)), job.instance);
  });
  return out;
}

namespace detail {
/// Shortest decimal text that reads back to the same double.
inline std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
}  // namespace detail

/// Result of the `report` subcommand.
struct ReportOutput {
  std::string csv;
  json summary;
  std::vector<std::string> errors;  // "line N: message"
};

/// Reads RunReport JSON lines and builds the analysis CSV and summary.
///
/// P_enh of a row is P / P0 with P0 the "none" row of the same
/// (instance_id, T, dt); it is empty when no baseline exists or P0 == 0.
inline ReportOutput build_report(std::istream& in, int bins = 25) {
  ReportOutput out;
  std::vector<RunReport> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(run_report_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      out.errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }

  using GroupKey = std::tuple<std::int64_t, double, double>;
  std::map<GroupKey, double> baseline;
  for (const auto& r : rows) {
    if (r.cd_mode == CdMode::None) baseline[{r.instance.id, r.T, r.dt}] = r.success_probability;
  }

  std::ostringstream csv;
  csv << "instance_id,mode,N,n,g,T,dt,P,P_enh,energy,degeneracy\n";
  // Aggregation per (mode, T, dt).
  using ModeKey = std::tuple<std::string, double, double>;
  std::map<ModeKey, std::vector<double>> p_cd, p_plain;
  std::map<std::string, std::vector<double>> hist_values;
  for (const auto& r : rows) {
    const std::string mode(to_string(r.cd_mode));
    csv << r.instance.id << ',' << mode << ',' << r.n_qubits << ',' << r.instance.n_assets << ','
        << r.instance.g << ',' << detail::shortest(r.T) << ',' << detail::shortest(r.dt) << ','
        << detail::shortest(r.success_probability) << ',';
    auto it = baseline.find({r.instance.id, r.T, r.dt});
    if (it != baseline.end() && it->second > 0) csv << detail::shortest(r.success_probability / it->second);
    csv << ',' << detail::shortest(r.final_energy) << ',' << r.degeneracy << '\n';
    hist_values[mode].push_back(r.success_probability);
    if (r.cd_mode != CdMode::None && it != baseline.end()) {
      p_cd[{mode, r.T, r.dt}].push_back(r.success_probability);
      p_plain[{mode, r.T, r.dt}].push_back(it->second);
    }
  }
  out.csv = csv.str();

  json groups = json::array();
  for (const auto& [key, pc] : p_cd) {
    const auto stats = enhancement_metrics(pc, p_plain.at(key));
    json g = to_json(stats);
    g.erase("P_enh");
    g["mode"] = std::get<0>(key);
    g["baseline"] = "none";
    g["T"] = std::get<1>(key);
    g["dt"] = std::get<2>(key);
    g["count"] = pc.size();
    groups.push_back(g);
  }
  json config = json::object();
  if (!rows.empty()) config = to_json(rows.front().instance);
  out.summary = {{"rows", rows.size()},
                 {"malformed", out.errors.size()},
                 {"config", config},
                 {"groups", groups},
                 {"histogram", to_json(make_histogram(hist_values, bins))},
                 {"version", kVersion}};
  return out;
}

}  // namespace dcqo
