// dcqo command line: instance generation, encoding, annealing runs,
// sweeps, variational runs and report post-processing.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dcqo/harness.hpp"
#include "dcqo/io.hpp"

namespace {

using namespace dcqo;

struct Options {
  int n = 6;
  int g = 2;
  double budget = 1.0;
  double theta1 = 0.3, theta2 = 0.5, theta3 = 0.2;
  double hx = 1.0;
  double T = 1.0;
  double dt = 0.05;
  std::vector<std::string> modes;
  std::vector<double> t_grid{0.5, 1.0, 2.0, 4.0};
  std::vector<int> layers{1, 3};
  std::vector<std::string> ansatz{"qaoa", "dcqaoa"};
  std::string placement = "after_mixer";
  int restarts = 20;
  int topk = 10;
  int max_iters = 500;
  std::uint64_t seed = 1;
  int index = 0;
  int instances = 100;
  bool full_scale = false;
  int threads = 1;
  int cap = kDefaultQubitCap;
  std::string in;
  std::string out = "-";
  std::string summary;
  int bins = 25;
};

/// Output sink: "-" is stdout. Opened before any work so an unwritable path
/// fails fast.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw std::runtime_error("cannot write " + path);
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

SweepConfig sweep_config(const Options& o) {
  SweepConfig c;
  c.instances = o.full_scale ? 1000 : o.instances;
  c.n = o.n;
  c.g = o.g;
  c.b = o.budget;
  c.theta1 = o.theta1;
  c.theta2 = o.theta2;
  c.theta3 = o.theta3;
  c.hx = o.hx;
  c.T = o.T;
  c.dt = o.dt;
  c.master_seed = o.seed;
  c.threads = o.threads;
  c.qubit_cap = o.cap;
  if (!o.modes.empty()) {
    c.modes.clear();
    for (const auto& m : o.modes) c.modes.push_back(parse_cd_mode(m));
  }
  return c;
}

/// Instance from --in, or instance `--index` of the corpus given by the flags.
InstanceFile load_instance(const Options& o) {
  if (!o.in.empty()) {
    InstanceFile f = instance_from_json(read_json_file(o.in));
    f.spec.qubit_cap = o.cap;
    f.spec.validate();
    return f;
  }
  if (o.index < 0) throw ConfigError("--index must be >= 0");
  SweepConfig c = sweep_config(o);
  c.instances = o.index + 1;
  c.validate();
  const CorpusInstance ci = make_instance(c, o.index);
  return {ci.spec, ci.info.seed, c.gen};
}

InstanceInfo info_of(const InstanceFile& f, const Options& o) {
  InstanceInfo info;
  info.id = o.in.empty() ? o.index : 0;
  info.seed = f.seed;
  info.master_seed = o.in.empty() ? o.seed : 0;
  info.n_assets = f.spec.n();
  info.g = f.spec.g;
  info.budget = f.spec.b;
  info.theta1 = f.spec.theta1;
  info.theta2 = f.spec.theta2;
  info.theta3 = f.spec.theta3;
  info.hx = f.spec.hx;
  info.gen = f.gen;
  return info;
}

void write_summary(const std::string& path, const json& j) {
  if (path.empty()) return;
  Sink s(path);
  s.get() << j.dump(2) << '\n';
}

void add_problem_flags(CLI::App* app, Options& o) {
  app->add_option("--n", o.n, "number of assets")->check(CLI::PositiveNumber);
  app->add_option("--g", o.g, "binary slices per asset")->check(CLI::PositiveNumber);
  app->add_option("--budget", o.budget, "budget b");
  app->add_option("--theta1", o.theta1, "return weight");
  app->add_option("--theta2", o.theta2, "budget penalty weight");
  app->add_option("--theta3", o.theta3, "risk weight");
  app->add_option("--hx", o.hx, "transverse field strength");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--cap", o.cap, "qubit cap")->check(CLI::Range(1, 30));
}

void add_schedule_flags(CLI::App* app, Options& o) {
  app->add_option("--T", o.T, "total evolution time");
  app->add_option("--dt", o.dt, "Trotter step");
}

void add_run_flags(CLI::App* app, Options& o) {
  app->add_option("--instances", o.instances, "corpus size")->check(CLI::PositiveNumber);
  app->add_flag("--full-scale", o.full_scale, "use 1000 instances");
  app->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "JSON-lines output path ('-' for stdout)");
  app->add_option("--summary", o.summary, "summary JSON path");
}

int run(int argc, char** argv) {
  Options o;
  CLI::App app{"Counterdiabatic portfolio optimization simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "emit an instance JSON");
  add_problem_flags(gen, o);
  gen->add_option("--index", o.index, "corpus index");
  gen->add_option("--out", o.out, "output path");

  auto* enc = app.add_subcommand("encode", "instance -> Ising JSON");
  add_problem_flags(enc, o);
  enc->add_option("--in", o.in, "instance JSON")->check(CLI::ExistingFile);
  enc->add_option("--index", o.index, "corpus index");
  enc->add_option("--out", o.out, "output path");

  auto* evo = app.add_subcommand("evolve", "single annealing run");
  add_problem_flags(evo, o);
  add_schedule_flags(evo, o);
  evo->add_option("--in", o.in, "instance JSON")->check(CLI::ExistingFile);
  evo->add_option("--index", o.index, "corpus index");
  evo->add_option("--mode", o.modes, "none, lcd or acd")->check(CLI::IsMember({"none", "lcd", "acd"}));
  evo->add_option("--out", o.out, "output path");

  auto* sw = app.add_subcommand("sweep", "paired runs over a random corpus");
  add_problem_flags(sw, o);
  add_schedule_flags(sw, o);
  add_run_flags(sw, o);
  sw->add_option("--mode", o.modes, "CD modes compared against none")
      ->check(CLI::IsMember({"none", "lcd", "acd"}));

  auto* ts = app.add_subcommand("tsweep", "success probability versus T");
  add_problem_flags(ts, o);
  add_run_flags(ts, o);
  ts->add_option("--dt", o.dt, "Trotter step");
  ts->add_option("--T", o.t_grid, "ascending T grid")->delimiter(',');
  ts->add_option("--mode", o.modes, "CD modes compared against none")
      ->check(CLI::IsMember({"none", "lcd", "acd"}));

  auto* qa = app.add_subcommand("qaoa", "QAOA / DC-QAOA optimization");
  add_problem_flags(qa, o);
  add_run_flags(qa, o);
  qa->add_option("--layers", o.layers, "layer counts p")->delimiter(',');
  qa->add_option("--ansatz", o.ansatz, "qaoa and/or dcqaoa")->delimiter(',');
  qa->add_option("--placement", o.placement, "DC unitary placement")
      ->check(CLI::IsMember({"after_mixer", "before_mixer"}));
  qa->add_option("--restarts", o.restarts, "random restarts")->check(CLI::PositiveNumber);
  qa->add_option("--topk", o.topk, "restarts averaged")->check(CLI::PositiveNumber);
  qa->add_option("--max-iters", o.max_iters, "Adagrad iteration cap")->check(CLI::NonNegativeNumber);

  auto* rep = app.add_subcommand("report", "JSON-lines reports -> CSV and summary");
  rep->add_option("--in", o.in, "JSON-lines input ('-' for stdin)")->required();
  rep->add_option("--out", o.out, "CSV output path");
  rep->add_option("--summary", o.summary, "summary JSON path ('-' for stdout)");
  rep->add_option("--bins", o.bins, "histogram bins")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*gen) {
    Sink out(o.out);
    out.get() << to_json(load_instance(o)).dump() << '\n';
  } else if (*enc) {
    Sink out(o.out);
    const InstanceFile f = load_instance(o);
    const IsingModel model = to_ising(f.spec);
    const GroundTruth truth = ground_states(model, o.cap);
    json j = to_json(model);
    j["ground_energy"] = truth.energy;
    j["ground_states"] = truth.states;
    const auto d = printed_formula_delta(f.spec, model);
    j["printed_delta"] = {{"max_abs_dh", d.max_abs_dh}, {"max_abs_dJ", d.max_abs_dJ}};
    j["version"] = kVersion;
    out.get() << j.dump() << '\n';
  } else if (*evo) {
    Sink out(o.out);
    const InstanceFile f = load_instance(o);
    const Schedule sched = Schedule::from_step(o.T, o.dt);
    const IsingModel model = to_ising(f.spec);
    const GroundTruth truth = ground_states(model, o.cap);
    const InstanceInfo info = info_of(f, o);
    if (o.modes.empty()) o.modes.push_back("none");
    for (const auto& m : o.modes) {
      out.get() << to_json(evolve(model, truth, sched, parse_cd_mode(m), info, o.cap)).dump() << '\n';
    }
  } else if (*sw) {
    const SweepConfig c = sweep_config(o);
    c.validate();
    Sink out(o.out);
    const SweepReport r = run_sweep(c);
    for (const auto& row : sweep_rows(r)) out.get() << row.dump() << '\n';
    write_summary(o.summary, sweep_summary(r));
  } else if (*ts) {
    SweepConfig c = sweep_config(o);
    c.t_grid = o.t_grid;
    c.T = o.t_grid.empty() ? o.T : o.t_grid.front();
    c.validate();
    Sink out(o.out);
    const TSweepReport r = run_tsweep(c);
    for (const auto& row : r.runs) out.get() << to_json(row).dump() << '\n';
    write_summary(o.summary, tsweep_summary(r));
  } else if (*qa) {
    QaoaSweepConfig q;
    q.corpus = sweep_config(o);
    q.layers = o.layers;
    q.modes.clear();
    for (const auto& a : o.ansatz) q.modes.push_back(parse_ansatz_mode(a));
    q.ansatz.restarts = o.restarts;
    q.ansatz.top_k = o.topk;
    q.ansatz.max_iters = o.max_iters;
    q.ansatz.placement = o.placement == "before_mixer" ? DcPlacement::BeforeMixer : DcPlacement::AfterMixer;
    q.corpus.validate();
    q.ansatz.validate();
    if (q.layers.empty() || q.modes.empty()) throw ConfigError("need at least one layer count and ansatz");
    for (int p : q.layers) {
      if (p < 1) throw ConfigError("layer counts must be >= 1");
    }
    Sink out(o.out);
    for (const auto& run : run_qaoa(q)) {
      json j = to_json(run.report, run.config);
      j["master_seed"] = q.corpus.master_seed;
      out.get() << j.dump() << '\n';
    }
  } else if (*rep) {
    Sink out(o.out);
    ReportOutput r;
    if (o.in == "-") {
      r = build_report(std::cin, o.bins);
    } else {
      std::ifstream in(o.in);
      if (!in) throw ConfigError("cannot open " + o.in);
      r = build_report(in, o.bins);
    }
    for (const auto& e : r.errors) std::cerr << "report: " << e << '\n';
    out.get() << r.csv;
    write_summary(o.summary, r.summary);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
