#pragma once

// Experiment driver: configuration parsing, convergence sweeps over (n, p)
// grids, trajectory diagnostics, and JSONL / CSV output.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gaplab/errors.hpp"
#include "gaplab/graph.hpp"
#include "gaplab/greedy.hpp"
#include "gaplab/rng.hpp"
#include "gaplab/thresholds.hpp"

namespace gaplab {

// ---------------------------------------------------------------------------
// p rules

/// How a grid point's edge density is derived from n:
///   abs:v  p = v
///   pc:c   p = c · sqrt(log n / n)
///   pow:a  p = n^{-a}
struct PRule {
  enum class Kind { Absolute, CriticalMultiple, Power };
  Kind kind = Kind::Absolute;
  double value = 0.0;

  [[nodiscard]] double resolve(std::size_t n) const {
    const double nd = static_cast<double>(n);
    double p = 0.0;
    switch (kind) {
      case Kind::Absolute: p = value; break;
      case Kind::CriticalMultiple: p = value * p_critical(nd); break;
      case Kind::Power: p = std::pow(nd, -value); break;
    }
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("p rule " + str() + " resolves to p = " + std::to_string(p) + " at n = " + std::to_string(n));
    }
    return p;
  }

  [[nodiscard]] std::string str() const;

  static PRule parse(const std::string& text);
};

namespace detail {

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline double parse_double(const std::string& text, const char* what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) throw std::invalid_argument(std::string(what) + ": not a number: '" + text + "'");
  return v;
}

inline std::uint64_t parse_uint(const std::string& text, const char* what) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) throw std::invalid_argument(std::string(what) + ": not an unsigned integer: '" + text + "'");
  return v;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline std::string PRule::str() const {
  switch (kind) {
    case Kind::Absolute: return "abs:" + detail::format_double(value);
    case Kind::CriticalMultiple: return "pc:" + detail::format_double(value);
    case Kind::Power: return "pow:" + detail::format_double(value);
  }
  return {};
}

/// Accepts "abs:v", "pc:c", "pow:a", or a bare number (absolute).
inline PRule PRule::parse(const std::string& text) {
  const std::string t = detail::trim(text);
  const auto colon = t.find(':');
  if (colon == std::string::npos) return {Kind::Absolute, detail::parse_double(t, "p rule")};
  const std::string tag = t.substr(0, colon);
  const double v = detail::parse_double(t.substr(colon + 1), "p rule");
  if (tag == "abs") return {Kind::Absolute, v};
  if (tag == "pc") return {Kind::CriticalMultiple, v};
  if (tag == "pow") return {Kind::Power, v};
  throw std::invalid_argument("unknown p rule '" + tag + "' (expected abs, pc or pow)");
}

// ---------------------------------------------------------------------------
// Configuration

struct GridPoint {
  std::size_t n = 0;
  PRule rule;
};

inline std::uint64_t default_root_seed() {
  if (const char* env = std::getenv("GAPLAB_SEED")) return detail::parse_uint(env, "GAPLAB_SEED");
  return 0;
}

struct ExperimentConfig {
  std::string id = "experiment";
  std::vector<GridPoint> grid;
  double eta = 0.05;
  std::size_t replicates = 1;
  std::uint64_t seed = default_root_seed();
  std::string records_path;  // JSONL; empty = not written
  std::string summary_path;  // CSV; empty = not written
  std::size_t workers = 1;
  bool include_timing = false;  // runtime_ms breaks byte-identical output
  TieBreak tie_break = TieBreak::UniformSample;

  void validate() const {
    if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
    if (grid.empty()) throw std::invalid_argument("experiment grid is empty");
    for (const auto& g : grid) {
      if (g.n < 1) throw std::invalid_argument("grid n must be positive");
    }
    if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("eta must lie in [0, 1/2)");
  }
};

/// Grid entries "n:rule", e.g. "1000:pc:3" or "2500:abs:0.005", separated by
/// ';' or ','.
inline std::vector<GridPoint> parse_grid(const std::string& text) {
  std::vector<GridPoint> out;
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ',', ';');
  for (const auto& entry : detail::split(normalized, ';')) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("grid entry '" + entry + "' needs the form n:rule");
    GridPoint gp;
    gp.n = detail::parse_uint(detail::trim(entry.substr(0, colon)), "grid n");
    gp.rule = PRule::parse(entry.substr(colon + 1));
    out.push_back(gp);
  }
  return out;
}

/// Flat "key = value" text; '#' starts a comment. Keys: id, grid, n (comma
/// list), p-rule (comma list), p, eta, reps, seed, workers, out, summary,
/// include-timing, tie-break. With n and p-rule/p the grid is their product.
inline ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::vector<std::size_t> ns;
  std::vector<PRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "id") cfg.id = value;
    else if (key == "grid") {
      auto g = parse_grid(value);
      cfg.grid.insert(cfg.grid.end(), g.begin(), g.end());
    } else if (key == "n") {
      for (const auto& v : detail::split(value, ',')) ns.push_back(detail::parse_uint(v, "n"));
    } else if (key == "p-rule" || key == "p") {
      for (const auto& v : detail::split(value, ',')) rules.push_back(PRule::parse(v));
    } else if (key == "eta") cfg.eta = detail::parse_double(value, "eta");
    else if (key == "reps") cfg.replicates = detail::parse_uint(value, "reps");
    else if (key == "seed") cfg.seed = detail::parse_uint(value, "seed");
    else if (key == "workers") cfg.workers = detail::parse_uint(value, "workers");
    else if (key == "out") cfg.records_path = value;
    else if (key == "summary") cfg.summary_path = value;
    else if (key == "include-timing") cfg.include_timing = value == "true" || value == "1";
    else if (key == "tie-break") {
      if (value == "uniform") cfg.tie_break = TieBreak::UniformSample;
      else if (value == "perturbation") cfg.tie_break = TieBreak::Perturbation;
      else throw std::invalid_argument("tie-break must be uniform or perturbation");
    } else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (!ns.empty() || !rules.empty()) {
    if (ns.empty() || rules.empty()) throw std::invalid_argument("config: n and p-rule must be given together");
    for (std::size_t n : ns) {
      for (const auto& r : rules) cfg.grid.push_back({n, r});
    }
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Records

struct RunRecord {
  std::string experiment;
  std::size_t point = 0;
  std::size_t n = 0;
  std::string p_rule;
  double p = 0.0;
  double eta = 0.0;
  std::uint64_t seed = 0;
  std::size_t replicate = 0;
  Regime regime = Regime::Sparse;
  std::size_t overlap = 0;
  double centered = 0.0;
  std::optional<double> scale;
  std::optional<double> ratio;
  std::uint64_t ops = 0;
  std::optional<double> runtime_ms;
  std::string algorithm;
};

inline nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  j["point"] = r.point;
  j["n"] = r.n;
  j["p_rule"] = r.p_rule;
  j["p"] = r.p;
  j["eta"] = r.eta;
  j["seed"] = r.seed;
  j["replicate"] = r.replicate;
  j["regime"] = to_string(r.regime);
  j["overlap"] = r.overlap;
  j["centered"] = r.centered;
  j["scale"] = r.scale ? nlohmann::ordered_json(*r.scale) : nlohmann::ordered_json(nullptr);
  j["ratio"] = r.ratio ? nlohmann::ordered_json(*r.ratio) : nlohmann::ordered_json(nullptr);
  j["ops"] = r.ops;
  if (r.runtime_ms) j["runtime_ms"] = *r.runtime_ms;
  j["algorithm"] = r.algorithm;
  return j;
}

inline void write_jsonl(std::ostream& os, const std::vector<RunRecord>& records) {
  for (const auto& r : records) os << to_json(r).dump() << '\n';
}

/// Seeds of one replicate: children "G", "Gs" (the two graphs) and "alg".
inline Seed replicate_seed(std::uint64_t root, const std::string& experiment, std::size_t point, std::size_t replicate) {
  return Seed(root).derive(detail::hash_tag(experiment), static_cast<std::uint64_t>(point),
                           static_cast<std::uint64_t>(replicate));
}

inline const char* algorithm_tag(TieBreak t) {
  return t == TieBreak::Perturbation ? "greedy_perturbed" : "greedy";
}

/// Aligns one pair and fills a record. centered is overlap - e_np(n, p).
inline RunRecord make_record(const Graph& g, const Graph& h, double p, double eta, TieBreak tie_break, const Seed& alg_seed,
                             bool include_timing) {
  GreedyConfig gc;
  gc.eta = eta;
  gc.p = p;
  gc.seed = alg_seed;
  gc.tie_break = tie_break;
  const auto t0 = std::chrono::steady_clock::now();
  const AlignmentResult res = greedy_align(g, h, gc);
  const auto t1 = std::chrono::steady_clock::now();
  RunRecord r;
  r.n = g.n();
  r.p = p;
  r.eta = eta;
  r.regime = classify_regime(static_cast<double>(r.n), p);
  r.overlap = res.overlap_value;
  r.centered = static_cast<double>(r.overlap) - e_np(static_cast<double>(r.n), p);
  r.scale = regime_scale(r.n, p, r.regime);
  r.ratio = normalized_ratio(r.centered, r.n, p, r.regime);
  r.ops = res.counters.total();
  if (include_timing) r.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  r.algorithm = algorithm_tag(tie_break);
  return r;
}

// ---------------------------------------------------------------------------
// Convergence sweeps

struct SummaryRow {
  std::size_t point = 0;
  std::size_t n = 0;
  std::string p_rule;
  std::optional<double> p;
  std::optional<Regime> regime;
  std::size_t runs = 0;
  std::size_t ratio_count = 0;
  std::optional<double> mean_ratio, stderr_ratio, min_ratio, max_ratio, median_ratio;
  std::optional<double> mean_ops;
  std::string error;  // non-empty when the point could not be resolved
};

struct ConvergenceResult {
  std::vector<RunRecord> records;  // point-major, then replicate
  std::vector<SummaryRow> summary;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

/// Summary statistics of one grid point, from its records in replicate order.
inline SummaryRow summarize(std::size_t point, std::size_t n, const std::string& rule, std::span<const RunRecord> recs) {
  SummaryRow row;
  row.point = point;
  row.n = n;
  row.p_rule = rule;
  row.runs = recs.size();
  if (recs.empty()) return row;
  row.p = recs.front().p;
  row.regime = recs.front().regime;
  std::vector<double> ratios;
  double ops = 0.0;
  for (const auto& r : recs) {
    if (r.ratio) ratios.push_back(*r.ratio);
    ops += static_cast<double>(r.ops);
  }
  row.mean_ops = ops / static_cast<double>(recs.size());
  row.ratio_count = ratios.size();
  if (ratios.empty()) return row;
  double sum = 0.0;
  for (double x : ratios) sum += x;
  const double mean = sum / static_cast<double>(ratios.size());
  double ss = 0.0;
  for (double x : ratios) ss += (x - mean) * (x - mean);
  row.mean_ratio = mean;
  row.stderr_ratio = ratios.size() > 1
                         ? std::sqrt(ss / static_cast<double>(ratios.size() - 1) / static_cast<double>(ratios.size()))
                         : 0.0;
  row.min_ratio = *std::min_element(ratios.begin(), ratios.end());
  row.max_ratio = *std::max_element(ratios.begin(), ratios.end());
  row.median_ratio = median_of(ratios);
  return row;
}

/// Runs every (grid point, replicate) on a worker pool. Each job derives its
/// own seeds, and results are stored by job index, so output does not depend
/// on the worker count. Points whose p rule cannot be resolved are reported in
/// the summary and skipped.
inline ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Job {
    std::size_t point;
    std::size_t replicate;
    double p;
  };
  std::vector<Job> jobs;
  std::vector<std::string> errors(cfg.grid.size());
  for (std::size_t pt = 0; pt < cfg.grid.size(); ++pt) {
    try {
      const double p = cfg.grid[pt].rule.resolve(cfg.grid[pt].n);
      for (std::size_t rep = 0; rep < cfg.replicates; ++rep) jobs.push_back({pt, rep, p});
    } catch (const DomainError& e) {
      errors[pt] = e.what();
    }
  }
  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& job = jobs[k];
      const std::size_t n = cfg.grid[job.point].n;
      const Seed base = replicate_seed(cfg.seed, cfg.id, job.point, job.replicate);
      const Graph g = sample_er(n, job.p, base.child("G"));
      const Graph h = sample_er(n, job.p, base.child("Gs"));
      RunRecord r = make_record(g, h, job.p, cfg.eta, cfg.tie_break, base.child("alg"), cfg.include_timing);
      r.experiment = cfg.id;
      r.point = job.point;
      r.p_rule = cfg.grid[job.point].rule.str();
      r.seed = cfg.seed;
      r.replicate = job.replicate;
      records[k] = std::move(r);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(1, jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  ConvergenceResult out;
  out.records = std::move(records);
  std::size_t cursor = 0;
  for (std::size_t pt = 0; pt < cfg.grid.size(); ++pt) {
    std::size_t end = cursor;
    while (end < out.records.size() && out.records[end].point == pt) ++end;
    SummaryRow row = summarize(pt, cfg.grid[pt].n, cfg.grid[pt].rule.str(),
                               std::span<const RunRecord>(out.records.data() + cursor, end - cursor));
    row.error = errors[pt];
    out.summary.push_back(std::move(row));
    cursor = end;
  }
  return out;
}

inline constexpr const char* kSummaryHeader =
    "point,n,p_rule,p,regime,runs,ratio_count,mean_ratio,stderr_ratio,min_ratio,max_ratio,median_ratio,mean_ops,error";

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); };
  os << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << r.point << ',' << r.n << ',' << r.p_rule << ',' << opt(r.p) << ',' << (r.regime ? to_string(*r.regime) : "")
       << ',' << r.runs << ',' << r.ratio_count << ',' << opt(r.mean_ratio) << ',' << opt(r.stderr_ratio) << ','
       << opt(r.min_ratio) << ',' << opt(r.max_ratio) << ',' << opt(r.median_ratio) << ',' << opt(r.mean_ops) << ','
       << err << '\n';
  }
}

/// Writes records and summary to the configured paths.
inline void write_outputs(const ExperimentConfig& cfg, const ConvergenceResult& res) {
  if (!cfg.records_path.empty()) {
    std::ofstream out(cfg.records_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + cfg.records_path + "'");
    write_jsonl(out, res.records);
  }
  if (!cfg.summary_path.empty()) {
    std::ofstream out(cfg.summary_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + cfg.summary_path + "'");
    write_summary_csv(out, res.summary);
  }
}

// ---------------------------------------------------------------------------
// Trajectory diagnostics

struct TrajectoryReport {
  std::size_t n = 0;
  double p = 0.0;
  double eta = 0.0;
  double slack = 0.0;
  std::uint64_t seed = 0;
  std::vector<TrajectoryRecord> records;
  std::size_t middle_steps = 0;    // a < s <= b
  std::size_t middle_cleared = 0;  // o_s >= s p² + sqrt(2(1 - slack) s p² log n)
  double middle_fraction = 0.0;
  std::optional<double> mean_middle_gain;  // mean standardized gain; unset when undefined (p = 0)
  std::size_t last_steps = 0;              // s > b
  std::size_t last_cleared = 0;            // o_s >= s p² - sqrt(10 n p² log n)
  bool last_steps_hold = true;
  std::size_t overlap = 0;
};

/// Evaluates the per-step events on a captured trajectory. A middle step
/// counts as cleared only when its standardized gain is defined.
inline TrajectoryReport assess_trajectory(std::vector<TrajectoryRecord> records, std::size_t n, double p, double eta,
                                          double slack) {
  if (!(slack >= 0.0 && slack <= 1.0)) throw std::invalid_argument("slack must lie in [0, 1]");
  TrajectoryReport rep;
  rep.n = n;
  rep.p = p;
  rep.eta = eta;
  rep.slack = slack;
  const double log_n = std::log(static_cast<double>(n));
  const std::size_t a = detail::greedy_prefix_end(eta, n);
  const std::size_t b = detail::greedy_middle_end(eta, n);
  const double last_margin = std::sqrt(10.0 * static_cast<double>(n) * p * p * log_n);
  double gain_sum = 0.0;
  std::size_t gain_count = 0;
  for (const auto& r : records) {
    rep.overlap += r.o_s;
    const double mean = static_cast<double>(r.s) * p * p;
    if (r.s > a && r.s <= b) {
      ++rep.middle_steps;
      if (r.standardized_gain) {
        gain_sum += *r.standardized_gain;
        ++gain_count;
        if (static_cast<double>(r.o_s) >= mean + std::sqrt(2.0 * (1.0 - slack) * mean * log_n)) ++rep.middle_cleared;
      }
    } else if (r.s > b) {
      ++rep.last_steps;
      if (static_cast<double>(r.o_s) >= mean - last_margin) ++rep.last_cleared;
    }
  }
  rep.middle_fraction = rep.middle_steps ? static_cast<double>(rep.middle_cleared) / static_cast<double>(rep.middle_steps) : 0.0;
  if (gain_count) rep.mean_middle_gain = gain_sum / static_cast<double>(gain_count);
  rep.last_steps_hold = rep.last_cleared == rep.last_steps;
  rep.records = std::move(records);
  return rep;
}

/// Samples G, Gs ~ G(n, p) from `seed` and runs A_η with trajectory capture.
inline TrajectoryReport run_trajectory(std::size_t n, double p, double eta, std::uint64_t seed, double slack = 0.5) {
  const Seed base = Seed(seed).child("trajectory");
  const Graph g = sample_er(n, p, base.child("G"));
  const Graph h = sample_er(n, p, base.child("Gs"));
  GreedyConfig gc;
  gc.eta = eta;
  gc.p = p;
  gc.seed = base.child("alg");
  gc.capture_trajectory = true;
  AlignmentResult res = greedy_align(g, h, gc);
  TrajectoryReport rep = assess_trajectory(std::move(*res.trajectory), n, p, eta, slack);
  rep.seed = seed;
  return rep;
}

inline nlohmann::ordered_json to_json(const TrajectoryReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["p"] = r.p;
  j["eta"] = r.eta;
  j["seed"] = r.seed;
  j["slack"] = r.slack;
  j["overlap"] = r.overlap;
  j["middle_steps"] = r.middle_steps;
  j["middle_cleared"] = r.middle_cleared;
  j["middle_fraction"] = r.middle_fraction;
  j["mean_middle_gain"] = r.mean_middle_gain ? nlohmann::ordered_json(*r.mean_middle_gain) : nlohmann::ordered_json(nullptr);
  j["last_steps"] = r.last_steps;
  j["last_cleared"] = r.last_cleared;
  j["last_steps_hold"] = r.last_steps_hold;
  return j;
}

}  // namespace gaplab
