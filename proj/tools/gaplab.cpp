// gaplab: command-line front end for the random graph alignment toolkit.
//
// Exit codes: 0 success, 1 domain or input error, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaplab/admissibility.hpp"
#include "gaplab/correlated.hpp"
#include "gaplab/graph.hpp"
#include "gaplab/greedy.hpp"
#include "gaplab/harness.hpp"
#include "gaplab/io.hpp"
#include "gaplab/oracle.hpp"

namespace {

using namespace gaplab;
using json = nlohmann::ordered_json;

struct Common {
  std::size_t n = 100;
  std::optional<double> p;
  std::string p_rule;
  double eta = 0.05;
  std::uint64_t seed = default_root_seed();
  std::size_t reps = 1;
  std::size_t workers = 1;
  std::string config;
  std::string out;
  std::string format = "jsonl";

  [[nodiscard]] double resolve_p() const {
    if (p && !p_rule.empty()) throw CLI::ValidationError("--p and --p-rule are mutually exclusive");
    if (p) {
      if (!(*p >= 0.0 && *p <= 1.0)) throw DomainError("p must lie in [0, 1]");
      return *p;
    }
    if (!p_rule.empty()) return PRule::parse(p_rule).resolve(n);
    throw CLI::RequiredError("--p or --p-rule");
  }
};

// Writes to --out when given, else to stdout.
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write(out);
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph '" + path + "'");
  return read_edge_list(in);
}

void add_size_and_density(CLI::App* cmd, Common& c) {
  cmd->add_option("--n", c.n, "Number of vertices")->check(CLI::PositiveNumber);
  cmd->add_option("--p", c.p, "Edge density");
  cmd->add_option("--p-rule", c.p_rule, "Density rule: abs:v, pc:c (multiple of sqrt(log n / n)) or pow:a (n^-a)");
  cmd->add_option("--seed", c.seed, "Root seed (default: $GAPLAB_SEED or 0)");
}

int cmd_generate(const Common& c, const std::string& which) {
  const double p = c.resolve_p();
  const Graph g = sample_er(c.n, p, Seed(c.seed).child(which));
  emit(c.out, [&](std::ostream& os) { write_edge_list(os, g); });
  return 0;
}

int cmd_align(const Common& c, const std::string& g_path, const std::string& h_path, const std::string& traj_path,
              bool timing) {
  std::optional<Graph> g;
  std::optional<Graph> h;
  double p = 0.0;
  const Seed base = Seed(c.seed).child("align");
  if (!g_path.empty() || !h_path.empty()) {
    if (g_path.empty() || h_path.empty()) throw CLI::ValidationError("--g and --gs must be given together");
    g = load_graph(g_path);
    h = load_graph(h_path);
    p = c.p || !c.p_rule.empty() ? c.resolve_p() : (g->density() + h->density()) / 2.0;
  } else {
    p = c.resolve_p();
    g = sample_er(c.n, p, base.child("G"));
    h = sample_er(c.n, p, base.child("Gs"));
  }
  RunRecord r = make_record(*g, *h, p, c.eta, TieBreak::UniformSample, base.child("alg"), timing);
  r.experiment = "align";
  r.p_rule = c.p_rule.empty() ? PRule{PRule::Kind::Absolute, p}.str() : c.p_rule;
  r.seed = c.seed;
  if (!traj_path.empty()) {
    GreedyConfig gc;
    gc.eta = c.eta;
    gc.p = p;
    gc.seed = base.child("alg");
    gc.capture_trajectory = true;
    const AlignmentResult res = greedy_align(*g, *h, gc);
    std::ofstream out(traj_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + traj_path + "'");
    write_trajectory_csv(out, trajectory(res));
  }
  emit(c.out, [&](std::ostream& os) {
    if (c.format == "csv") {
      os << "n,p,eta,seed,regime,overlap,centered,scale,ratio,ops,algorithm\n";
      auto opt = [](const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); };
      os << r.n << ',' << detail::format_double(r.p) << ',' << detail::format_double(r.eta) << ',' << r.seed << ','
         << to_string(r.regime) << ',' << r.overlap << ',' << detail::format_double(r.centered) << ',' << opt(r.scale)
         << ',' << opt(r.ratio) << ',' << r.ops << ',' << r.algorithm << '\n';
    } else {
      os << to_json(r).dump() << '\n';
    }
  });
  return 0;
}

int cmd_oracle(const Common& c, std::size_t cap) {
  const double p = c.resolve_p();
  const Seed base = Seed(c.seed).child("oracle");
  const Graph g = sample_er(c.n, p, base.child("G"));
  const Graph h = sample_er(c.n, p, base.child("Gs"));
  const BruteResult brute = brute_max_overlap(g, h, cap, c.workers);
  GreedyConfig gc;
  gc.eta = c.eta;
  gc.p = p;
  gc.seed = base.child("alg");
  const AlignmentResult greedy = greedy_align(g, h, gc);
  json j;
  j["n"] = c.n;
  j["p"] = p;
  j["seed"] = c.seed;
  j["brute_max"] = brute.max_value;
  j["argmax"] = to_word(brute.argmax);
  j["argmax_count"] = brute.argmax_count;
  j["greedy"] = greedy.overlap_value;
  j["greedy_pi"] = to_word(greedy.pi_star);
  emit(c.out, [&](std::ostream& os) { os << j.dump() << '\n'; });
  if (greedy.overlap_value > brute.max_value) {
    std::cerr << "error: greedy overlap exceeds the exhaustive maximum\n";
    return 1;
  }
  return 0;
}

int cmd_admissible(const Common& c, const std::string& g_path, const std::string& mode, std::uint64_t samples) {
  const double p = c.resolve_p();
  const Graph g = g_path.empty() ? sample_er(c.n, p, Seed(c.seed).child("G")) : load_graph(g_path);
  CheckOptions opt;
  if (mode == "exact") opt.mode = CheckMode::Exact;
  else if (mode == "mc") opt.mode = CheckMode::MonteCarlo;
  else throw CLI::ValidationError("--mode must be exact or mc");
  opt.samples = samples;
  opt.seed = Seed(c.seed).child("admissibility");
  opt.workers = c.workers;
  const AdmissibilityReport rep = is_admissible(g, p, opt);
  emit(c.out, [&](std::ostream& os) { os << to_json(rep).dump(2) << '\n'; });
  return 0;
}

int cmd_correlate(const Common& c, double alpha, std::optional<double> epsilon, std::optional<std::size_t> branching,
                  std::optional<std::size_t> depth, std::size_t leaf_cap) {
  const double p = c.resolve_p();
  const Seed base = Seed(c.seed).child("correlate");
  if (!epsilon && !branching && !depth) {
    const CorrelatedPair pair = sample_2alpha(c.n, p, alpha, base);
    if (!c.out.empty()) {
      std::ofstream a(c.out + ".first.edges", std::ios::binary);
      std::ofstream b(c.out + ".second.edges", std::ios::binary);
      if (!a || !b) throw std::runtime_error("cannot write under prefix '" + c.out + "'");
      write_edge_list(a, pair.first);
      write_edge_list(b, pair.second);
    }
    std::size_t common = 0;
    for (std::uint64_t k = 0; k < pair_count(c.n); ++k) {
      const auto [i, j] = edge_pair(k, c.n);
      common += pair.first.has_edge(i, j) == pair.second.has_edge(i, j);
    }
    json j;
    j["n"] = c.n;
    j["p"] = p;
    j["alpha"] = alpha;
    j["shared_labels"] = pair.shared_labels;
    j["prefix_span"] = prefix_span(alpha, c.n);
    j["agreeing_labels"] = common;
    std::cout << j.dump() << '\n';
    return 0;
  }
  const AlphaSchedule sched = choose_schedule(epsilon.value_or(0.3));
  const CorrelatedFamily fam = sample_tree_family(c.n, p, sched, branching, depth, base, leaf_cap);
  emit(c.out, [&](std::ostream& os) {
    os << "# levels " << sched.n_levels << " D " << sched.d_branch << " delta " << detail::format_double(sched.delta)
       << " riemann " << detail::format_double(sched.riemann_sum) << '\n';
    fam.write_manifest(os);
  });
  return 0;
}

int cmd_ogp_scan(const Common& c, double beta0, double band_eta, double threshold_frac, std::size_t cap) {
  const double p = c.resolve_p();
  const Seed base = Seed(c.seed).child("ogp-scan");
  const Graph g = sample_er(c.n, p, base.child("G"));
  const Graph g_prime = sample_er(c.n, p, base.child("G'"));
  const Graph h = sample_er(c.n, p, base.child("Gs"));
  const ForbiddenBand band = ForbiddenBand::for_beta(beta0, band_eta);
  const double mean = mean_overlap(c.n, p);
  const double best = static_cast<double>(brute_max_overlap(g, h, cap, c.workers).max_value) - mean;
  const SolutionThreshold thr = SolutionThreshold::absolute(threshold_frac * best);
  GreedyConfig gc;
  gc.eta = c.eta;
  gc.p = p;
  gc.seed = base.child("alg");
  const PairAlgorithm alg = [&](const Graph& a, const Graph& b) { return greedy_align(a, b, gc).pi_star; };
  const InterpolationReport rep = interpolation_ogp_scan(g, g_prime, h, p, band, thr, alg, cap);
  const auto witness = detect_forbidden_2ogp(g, g_prime, h, p, band, thr, cap);
  json j;
  j["n"] = c.n;
  j["p"] = p;
  j["seed"] = c.seed;
  j["rho0"] = band.rho0;
  j["band_eta"] = band.eta;
  j["threshold"] = thr.value;
  j["ogp_holds"] = rep.ogp_holds ? json(*rep.ogp_holds) : json(nullptr);
  j["suc_holds"] = rep.suc_holds;
  j["stable_holds"] = rep.stable_holds;
  j["ends_holds"] = rep.ends_holds;
  j["step_distances"] = rep.step_distances;
  j["endpoint_witness"] = witness ? json::array({to_word(witness->first), to_word(witness->second)}) : json(nullptr);
  emit(c.out, [&](std::ostream& os) { os << j.dump() << '\n'; });
  return 0;
}

int cmd_experiment(const Common& c, bool seed_given, bool workers_given) {
  if (c.config.empty()) throw CLI::RequiredError("--config");
  ExperimentConfig cfg = load_config(c.config);
  if (seed_given) cfg.seed = c.seed;
  if (workers_given) cfg.workers = c.workers;
  const ConvergenceResult res = run_convergence(cfg);
  write_outputs(cfg, res);
  if (cfg.summary_path.empty()) write_summary_csv(std::cout, res.summary);
  if (cfg.records_path.empty() && cfg.summary_path.empty() && c.format == "jsonl") write_jsonl(std::cout, res.records);
  return 0;
}

int cmd_trajectory(const Common& c, double slack) {
  const double p = c.resolve_p();
  const TrajectoryReport rep = run_trajectory(c.n, p, c.eta, c.seed, slack);
  if (c.out.empty()) {
    write_trajectory_csv(std::cout, rep.records);
    std::cerr << to_json(rep).dump() << '\n';
  } else {
    emit(c.out, [&](std::ostream& os) { write_trajectory_csv(os, rep.records); });
    std::cout << to_json(rep).dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random graph alignment: greedy online matching, exhaustive oracles, OGP diagnostics"};
  app.require_subcommand(1);
  Common c;

  auto* generate = app.add_subcommand("generate", "Sample G(n, p) and write an edge list");
  add_size_and_density(generate, c);
  std::string which = "G";
  generate->add_option("--stream", which, "Seed label of the graph (G or Gs)");
  generate->add_option("--out", c.out, "Output path (default stdout)");

  auto* align = app.add_subcommand("align", "Run greedy A_eta on a sampled or given pair");
  add_size_and_density(align, c);
  align->add_option("--eta", c.eta, "Greedy prefix/suffix fraction");
  std::string g_path;
  std::string h_path;
  std::string traj_path;
  bool timing = false;
  align->add_option("--g", g_path, "First graph (edge list)");
  align->add_option("--gs", h_path, "Second graph (edge list)");
  align->add_option("--trajectory-out", traj_path, "Write the per-step trajectory CSV");
  align->add_flag("--timing", timing, "Include runtime_ms in the record");
  align->add_option("--out", c.out, "Output path (default stdout)");
  align->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));

  auto* oracle = app.add_subcommand("oracle", "Exhaustive maximum overlap versus greedy on a small instance");
  add_size_and_density(oracle, c);
  std::size_t cap = kDefaultBruteCap;
  oracle->add_option("--eta", c.eta, "Greedy prefix/suffix fraction");
  oracle->add_option("--cap", cap, "Largest n enumerated");
  oracle->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  oracle->add_option("--out", c.out, "Output path (default stdout)");

  auto* admissible = app.add_subcommand("admissible", "Check the p-admissibility clauses");
  add_size_and_density(admissible, c);
  std::string mode = "mc";
  std::uint64_t samples = 1000;
  std::string adm_graph;
  admissible->add_option("--g", adm_graph, "Graph to check (edge list); default samples G(n, p)");
  admissible->add_option("--mode", mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  admissible->add_option("--samples", samples, "Monte Carlo samples per clause");
  admissible->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  admissible->add_option("--out", c.out, "Output path (default stdout)");

  auto* correlate = app.add_subcommand("correlate", "Sample a (2, alpha) pair or a tree-correlated family");
  add_size_and_density(correlate, c);
  double alpha = 0.5;
  std::optional<double> epsilon;
  std::optional<std::size_t> branching;
  std::optional<std::size_t> depth;
  std::size_t leaf_cap = 64;
  correlate->add_option("--alpha", alpha, "Shared label fraction of a pair");
  correlate->add_option("--epsilon", epsilon, "Tree family: schedule parameter");
  correlate->add_option("--branching", branching, "Tree family: branching override");
  correlate->add_option("--depth", depth, "Tree family: depth override");
  correlate->add_option("--leaf-cap", leaf_cap, "Tree family: maximum leaves");
  correlate->add_option("--out", c.out, "Pair: output prefix; tree: manifest path");

  auto* scan = app.add_subcommand("ogp-scan", "Interpolation-path scan with the 2-OGP detector");
  add_size_and_density(scan, c);
  double beta0 = 0.97;
  double band_eta = 0.01;
  double threshold_frac = 0.9;
  std::size_t scan_cap = 7;
  scan->add_option("--eta", c.eta, "Greedy prefix/suffix fraction");
  scan->add_option("--beta0", beta0, "Band parameter beta0 in (sqrt(25/27), 1)");
  scan->add_option("--band-eta", band_eta, "Half width of the forbidden band, in units of n");
  scan->add_option("--threshold-frac", threshold_frac, "Solution threshold as a fraction of the best centered overlap");
  scan->add_option("--cap", scan_cap, "Largest n enumerated");
  scan->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  scan->add_option("--out", c.out, "Output path (default stdout)");

  auto* experiment = app.add_subcommand("experiment", "Run a convergence sweep from a config file");
  experiment->add_option("--config", c.config, "Config path")->required();
  auto* seed_opt = experiment->add_option("--seed", c.seed, "Override the config seed");
  auto* workers_opt = experiment->add_option("--workers", c.workers, "Override the config worker count");
  experiment->add_option("--format", c.format, "Stdout format when the config names no outputs")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  auto* traj = app.add_subcommand("trajectory", "Per-step greedy gains and the step events");
  add_size_and_density(traj, c);
  double slack = 0.5;
  traj->add_option("--eta", c.eta, "Greedy prefix/suffix fraction");
  traj->add_option("--slack", slack, "Relative slack of the middle-step event");
  traj->add_option("--out", c.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) return cmd_generate(c, which);
    if (*align) return cmd_align(c, g_path, h_path, traj_path, timing);
    if (*oracle) return cmd_oracle(c, cap);
    if (*admissible) return cmd_admissible(c, adm_graph, mode, samples);
    if (*correlate) return cmd_correlate(c, alpha, epsilon, branching, depth, leaf_cap);
    if (*scan) return cmd_ogp_scan(c, beta0, band_eta, threshold_frac, scan_cap);
    if (*experiment) return cmd_experiment(c, seed_opt->count() > 0, workers_opt->count() > 0);
    if (*traj) return cmd_trajectory(c, slack);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
