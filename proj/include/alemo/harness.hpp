#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "alemo/benchmarks.hpp"
#include "alemo/metrics.hpp"
#include "alemo/optimizer.hpp"
#include "alemo/scenario.hpp"

namespace alemo {

// ---------------------------------------------------------------------------
// Small statistics helpers
// ---------------------------------------------------------------------------

inline double vec_mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double vec_median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Standard error of the mean (sample standard deviation / sqrt(n)); 0 for a
/// single observation.
inline double vec_sem(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("sem: empty sample");
  if (v.size() < 2) return 0.0;
  const double m = vec_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) /
         std::sqrt(static_cast<double>(v.size()));
}

/// Linear-interpolation quantile of a sample (the common "type 7" rule).
inline double vec_quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p outside [0,1]");
  std::sort(v.begin(), v.end());
  const double h = static_cast<double>(v.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

struct RankSumResult {
  double u = 0;  // Mann-Whitney U of the first sample
  double z = 0;
  double p = 1;
};

/// Two-sided Wilcoxon rank-sum test via the tie-corrected normal
/// approximation (no continuity correction). Degenerate variance (all values
/// tied) yields p = 1.
inline RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("rank_sum_test: empty sample");
  const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(n);
  for (double x : a) pooled.emplace_back(x, 0);
  for (double x : b) pooled.emplace_back(x, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& u, const auto& v) { return u.first < v.first; });

  double w1 = 0.0;       // rank sum of sample a
  double tie_term = 0.0; // sum over tie groups of t^3 - t
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].second == 0) w1 += avg_rank;
    tie_term += t * t * t - t;
    i = j;
  }

  RankSumResult r;
  r.u = w1 - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
  const double mu = 0.5 * static_cast<double>(n1) * static_cast<double>(n2);
  const double nn = static_cast<double>(n);
  const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                     ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (var <= 0.0) return r;
  r.z = (r.u - mu) / std::sqrt(var);
  r.p = std::erfc(std::abs(r.z) / std::sqrt(2.0));
  return r;
}

// ---------------------------------------------------------------------------
// Trace files
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct TraceMeta {
  std::string problem;
  std::string algo;
  std::size_t dim = 0;
  std::size_t objectives = 0;
  std::size_t budget = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
};

inline std::string trace_csv(const RunTrace& trace, const TraceMeta& meta) {
  std::string out;
  out += "# alemo-trace v1\n";
  out += "# problem=" + meta.problem + " algo=" + meta.algo + " dim=" + std::to_string(meta.dim) +
         " objectives=" + std::to_string(meta.objectives) + " budget=" +
         std::to_string(meta.budget) + " trial=" + std::to_string(meta.trial) + " seed=" +
         std::to_string(meta.seed) + "\n";
  out += "eval_index,phase";
  for (std::size_t k = 1; k <= meta.objectives; ++k) out += ",f" + std::to_string(k);
  for (std::size_t j = 1; j <= meta.dim; ++j) out += ",x" + std::to_string(j);
  out += "\n";
  for (const TraceRecord& rec : trace.records) {
    out += std::to_string(rec.eval_index);
    out += ',';
    out += to_string(rec.phase);
    for (double f : rec.f) {
      out += ',';
      out += format_double(f);
    }
    for (double x : rec.x) {
      out += ',';
      out += format_double(x);
    }
    out += '\n';
  }
  return out;
}

struct ParsedTrace {
  TraceMeta meta;
  std::vector<TraceRecord> records;
};

inline ParsedTrace parse_trace(std::istream& in, const std::string& origin = "<stream>") {
  auto fail = [&](const std::string& why) -> void {
    throw std::runtime_error("parse_trace: " + origin + ": " + why);
  };
  std::string line;
  if (!std::getline(in, line) || line != "# alemo-trace v1") fail("missing 'alemo-trace v1' header");
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) fail("missing metadata line");

  ParsedTrace out;
  {
    std::istringstream meta_in(line.substr(2));
    std::string token;
    while (meta_in >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = token.substr(0, eq);
      const std::string val = token.substr(eq + 1);
      if (key == "problem") out.meta.problem = val;
      else if (key == "algo") out.meta.algo = val;
      else if (key == "dim") out.meta.dim = std::stoul(val);
      else if (key == "objectives") out.meta.objectives = std::stoul(val);
      else if (key == "budget") out.meta.budget = std::stoul(val);
      else if (key == "trial") out.meta.trial = std::stoul(val);
      else if (key == "seed") out.meta.seed = std::stoull(val);
    }
  }
  if (out.meta.dim == 0 || out.meta.objectives == 0) fail("metadata lacks dim/objectives");
  if (!std::getline(in, line) || line.rfind("eval_index,phase", 0) != 0) fail("missing column header");

  const std::size_t expected_cols = 2 + out.meta.objectives + out.meta.dim;
  long expected_index = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cols.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cols.size() != expected_cols)
      fail("row has " + std::to_string(cols.size()) + " columns, expected " +
           std::to_string(expected_cols));
    TraceRecord rec;
    rec.eval_index = std::stol(cols[0]);
    if (rec.eval_index != expected_index) fail("eval_index gap at " + cols[0]);
    ++expected_index;
    if (cols[1] == "init") rec.phase = Phase::init;
    else if (cols[1] == "explore") rec.phase = Phase::explore;
    else if (cols[1] == "exploit") rec.phase = Phase::exploit;
    else fail("unknown phase '" + cols[1] + "'");
    auto num = [&](const std::string& s) {
      double v = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc{}) fail("bad number '" + s + "'");
      return v;
    };
    for (std::size_t k = 0; k < out.meta.objectives; ++k) rec.f.push_back(num(cols[2 + k]));
    for (std::size_t j = 0; j < out.meta.dim; ++j)
      rec.x.push_back(num(cols[2 + out.meta.objectives + j]));
    out.records.push_back(std::move(rec));
  }
  if (out.records.empty()) fail("no records");
  return out;
}

inline ParsedTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_trace: cannot open " + path.string());
  return parse_trace(in, path.string());
}

// ---------------------------------------------------------------------------
// Metric curves over the cumulative archive
// ---------------------------------------------------------------------------

struct MetricCurves {
  std::vector<double> hv;
  std::vector<double> igd;  // empty when no reference front is available
};

/// HV (and IGD when a reference front is given) of the cumulative archive's
/// non-dominated front after each evaluation.
inline MetricCurves metric_curves(const std::vector<TraceRecord>& records, const ObjectiveVector& z,
                                  const std::vector<ObjectiveVector>* reference = nullptr) {
  MetricCurves curves;
  curves.hv.reserve(records.size());
  if (reference != nullptr) curves.igd.reserve(records.size());
  std::vector<ObjectiveVector> front;
  for (const TraceRecord& rec : records) {
    bool dominated_or_duplicate = false;
    for (const ObjectiveVector& f : front) {
      if (f == rec.f || dominates(f, rec.f)) {
        dominated_or_duplicate = true;
        break;
      }
    }
    if (!dominated_or_duplicate) {
      std::erase_if(front, [&](const ObjectiveVector& f) { return dominates(rec.f, f); });
      front.push_back(rec.f);
    }
    curves.hv.push_back(hypervolume(front, z));
    if (reference != nullptr) curves.igd.push_back(igd(*reference, front));
  }
  return curves;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::string problem = "zdt1";  // benchmark name or "geothermal"
  std::size_t dim = 10;
  std::size_t objectives = 2;
  bool classical_zdt4 = false;
  std::string algo = "alemo";  // alemo | nsga2
  std::size_t budget = 300;
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  std::size_t workers = 0;  // 0 = hardware concurrency
  std::string out_dir = "runs/experiment";
  std::string scenario_path;  // geothermal only
  AlemoConfig optimizer{};    // np + variation shared with the nsga2 baseline

  bool is_geothermal() const { return detail::lower(problem) == "geothermal"; }

  void validate() const {
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (algo != "alemo" && algo != "nsga2")
      throw std::invalid_argument("config: algo must be 'alemo' or 'nsga2'");
    if (is_geothermal()) {
      if (scenario_path.empty())
        throw std::invalid_argument("config: geothermal runs need --scenario");
    } else {
      validate_spec(BenchmarkSpec{problem, dim, objectives, classical_zdt4});
    }
    if (algo == "nsga2" && budget < optimizer.np)
      throw std::invalid_argument("config: budget below population size");
  }
};

struct TrialOutcome {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double seconds = 0;
  RunTrace trace;
};

struct ExperimentResult {
  ExperimentConfig cfg;
  std::vector<TrialOutcome> trials;
  ObjectiveVector z;
  std::vector<double> final_hv;   // one per successful trial
  std::vector<double> final_igd;  // empty when no analytic front exists
  std::filesystem::path out_dir;
  bool all_failed = false;
  double wall_seconds = 0;
};

inline std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) {
  return RandomStream(base_seed).child(trial).seed();
}

inline std::size_t resolve_workers(std::size_t requested, std::size_t trials) {
  std::size_t w = requested;
  if (w == 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    w = hc == 0 ? 1 : hc;
  }
  if (const char* env = std::getenv("ALEMO_MAX_WORKERS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap > 0) w = std::min<std::size_t>(w, cap);
  }
  return std::max<std::size_t>(1, std::min(w, std::max<std::size_t>(trials, 1)));
}

/// Run all trials (in parallel), write traces/fronts/convergence/summary into
/// cfg.out_dir, and return the in-memory results.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();

  std::unique_ptr<Problem> owned;
  std::vector<ObjectiveVector> reference;
  if (cfg.is_geothermal()) {
    owned = make_problem(load_scenario(cfg.scenario_path));
  } else {
    const BenchmarkSpec spec{cfg.problem, cfg.dim, cfg.objectives, cfg.classical_zdt4};
    owned = std::make_unique<BenchmarkProblem>(spec);
    reference = true_front(spec);
  }
  const Problem& problem = *owned;
  if (cfg.algo == "alemo" && cfg.budget < cfg.optimizer.resolved_initial(problem.dimension()))
    throw std::invalid_argument("config: budget below the initial design size");

  ExperimentResult result;
  result.cfg = cfg;
  result.out_dir = cfg.out_dir;
  result.trials.resize(cfg.trials);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= cfg.trials) return;
      TrialOutcome& out = result.trials[t];
      out.trial = t;
      out.seed = trial_seed(cfg.seed, t);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (cfg.algo == "alemo") {
          AlemoConfig ac = cfg.optimizer;
          ac.budget = cfg.budget;
          ac.seed = out.seed;
          out.trace = alemo_run(problem, ac);
        } else {
          out.trace = nsga2_run(problem, cfg.optimizer.np, cfg.budget, cfg.optimizer.variation,
                                out.seed);
        }
        out.ok = true;
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const std::size_t n_workers = resolve_workers(cfg.workers, cfg.trials);
  {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  result.all_failed = std::none_of(result.trials.begin(), result.trials.end(),
                                   [](const TrialOutcome& t) { return t.ok; });

  // Reference point: pre-registered from the analytic front for benchmarks;
  // for the geothermal problem, derived from the union of everything any
  // trial evaluated.
  if (!reference.empty()) {
    result.z = default_reference_point(reference);
  } else if (!result.all_failed) {
    std::vector<ObjectiveVector> all_points;
    for (const TrialOutcome& t : result.trials)
      if (t.ok)
        for (const TraceRecord& rec : t.trace.records) all_points.push_back(rec.f);
    result.z = default_reference_point(all_points);
  }

  std::filesystem::create_directories(result.out_dir);
  auto trial_name = [](const char* prefix, std::size_t t) {
    std::ostringstream name;
    name << prefix << "_";
    name.width(3);
    name.fill('0');
    name << t << ".csv";
    return name.str();
  };

  std::vector<MetricCurves> curves(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const TrialOutcome& out = result.trials[t];
    if (!out.ok) continue;
    TraceMeta meta{cfg.problem, cfg.algo, problem.dimension(), problem.objective_count(),
                   cfg.budget, t, out.seed};
    write_text_atomic(result.out_dir / trial_name("trace", t), trace_csv(out.trace, meta));

    std::string front_txt = "# alemo-front v1\n";
    {
      std::string header = "eval_index";
      for (std::size_t k = 1; k <= problem.objective_count(); ++k) header += ",f" + std::to_string(k);
      for (std::size_t j = 1; j <= problem.dimension(); ++j) header += ",x" + std::to_string(j);
      front_txt += header + "\n";
      for (const EvaluatedSample& s : out.trace.final_front) {
        front_txt += std::to_string(s.eval_index);
        for (double f : s.f) front_txt += "," + format_double(f);
        for (double x : s.x) front_txt += "," + format_double(x);
        front_txt += "\n";
      }
    }
    write_text_atomic(result.out_dir / trial_name("front", t), front_txt);

    curves[t] = metric_curves(out.trace.records, result.z, reference.empty() ? nullptr : &reference);
    result.final_hv.push_back(curves[t].hv.back());
    if (!reference.empty()) result.final_igd.push_back(curves[t].igd.back());
  }

  if (!result.all_failed) {
    std::string conv = "eval_index,hv_median,hv_mean,hv_sem";
    const bool with_igd = !reference.empty();
    if (with_igd) conv += ",igd_median,igd_mean,igd_sem";
    conv += "\n";
    for (std::size_t e = 0; e < cfg.budget; ++e) {
      std::vector<double> hv_at, igd_at;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        if (!result.trials[t].ok) continue;
        hv_at.push_back(curves[t].hv[e]);
        if (with_igd) igd_at.push_back(curves[t].igd[e]);
      }
      conv += std::to_string(e + 1);
      conv += "," + format_double(vec_median(hv_at));
      conv += "," + format_double(vec_mean(hv_at));
      conv += "," + format_double(vec_sem(hv_at));
      if (with_igd) {
        conv += "," + format_double(vec_median(igd_at));
        conv += "," + format_double(vec_mean(igd_at));
        conv += "," + format_double(vec_sem(igd_at));
      }
      conv += "\n";
    }
    write_text_atomic(result.out_dir / "convergence.csv", conv);
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

  nlohmann::json summary;
  summary["schema"] = "alemo-summary v1";
  summary["problem"] = cfg.problem;
  summary["algo"] = cfg.algo;
  summary["dim"] = problem.dimension();
  summary["objectives"] = problem.objective_count();
  summary["budget"] = cfg.budget;
  summary["trials"] = cfg.trials;
  summary["seed"] = cfg.seed;
  summary["workers"] = n_workers;
  if (!cfg.scenario_path.empty()) summary["scenario"] = cfg.scenario_path;
  summary["z"] = result.z;
  summary["wall_seconds"] = result.wall_seconds;
  nlohmann::json trials_json = nlohmann::json::array();
  {
    std::size_t ok_index = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const TrialOutcome& out = result.trials[t];
      nlohmann::json tj;
      tj["trial"] = t;
      tj["seed"] = out.seed;
      tj["ok"] = out.ok;
      tj["seconds"] = out.seconds;
      if (out.ok) {
        tj["final_hv"] = result.final_hv[ok_index];
        if (!result.final_igd.empty()) tj["final_igd"] = result.final_igd[ok_index];
        ++ok_index;
      } else {
        tj["error"] = out.error;
      }
      trials_json.push_back(tj);
    }
  }
  summary["trial_results"] = trials_json;
  if (!result.final_hv.empty()) summary["final_hv_median"] = vec_median(result.final_hv);
  if (!result.final_igd.empty()) summary["final_igd_median"] = vec_median(result.final_igd);
  write_text_atomic(result.out_dir / "summary.json", summary.dump(2) + "\n");

  return result;
}

// ---------------------------------------------------------------------------
// Comparing experiment directories
// ---------------------------------------------------------------------------

struct MethodStats {
  std::string label;  // algo name, disambiguated when repeated
  std::string algo;
  std::filesystem::path dir;
  std::vector<double> final_hv;
  std::vector<double> final_igd;
};

struct PairTest {
  std::string label_a, label_b;
  double p_hv = 1;
};

struct ProblemComparison {
  std::string problem;
  std::size_t dim = 0;
  std::size_t objectives = 0;
  std::size_t budget = 0;
  ObjectiveVector z;
  std::vector<MethodStats> methods;
  std::vector<PairTest> tests;
};

struct ComparisonReport {
  std::vector<ProblemComparison> problems;
  std::vector<std::string> labels;            // shared across problems
  std::vector<double> mean_rank;              // Borda mean rank per label
  std::vector<std::size_t> ranking_order;     // label indices, best first
};

/// Recompute final-front metrics from the raw traces in each directory and
/// compare methods per problem, including rank-sum tests and a Borda ranking
/// across problems. Directories covering the same problem must share the
/// budget, and every problem must be covered by the same set of methods.
inline ComparisonReport compare_runs(const std::vector<std::filesystem::path>& dirs) {
  if (dirs.empty()) throw std::invalid_argument("compare_runs: no directories given");

  struct DirData {
    std::filesystem::path dir;
    std::vector<ParsedTrace> traces;
    TraceMeta meta;
  };
  std::vector<DirData> data;
  for (const auto& dir : dirs) {
    DirData d;
    d.dir = dir;
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir))
      throw std::invalid_argument("compare_runs: not a directory: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("trace_", 0) == 0 && entry.path().extension() == ".csv")
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw std::invalid_argument("compare_runs: no trace files in " + dir.string());
    for (const auto& f : files) d.traces.push_back(load_trace(f));
    d.meta = d.traces.front().meta;
    for (const ParsedTrace& t : d.traces) {
      if (t.meta.problem != d.meta.problem || t.meta.dim != d.meta.dim ||
          t.meta.objectives != d.meta.objectives || t.meta.budget != d.meta.budget ||
          t.meta.algo != d.meta.algo)
        throw std::invalid_argument("compare_runs: inconsistent traces inside " + dir.string());
    }
    data.push_back(std::move(d));
  }

  // Group by problem identity.
  auto key_of = [](const TraceMeta& m) {
    return m.problem + "/d" + std::to_string(m.dim) + "/m" + std::to_string(m.objectives);
  };
  std::vector<std::string> keys;
  for (const DirData& d : data) {
    const std::string k = key_of(d.meta);
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }

  ComparisonReport report;
  for (const std::string& key : keys) {
    ProblemComparison pc;
    std::vector<const DirData*> group;
    for (const DirData& d : data)
      if (key_of(d.meta) == key) group.push_back(&d);
    pc.problem = group.front()->meta.problem;
    pc.dim = group.front()->meta.dim;
    pc.objectives = group.front()->meta.objectives;
    pc.budget = group.front()->meta.budget;
    for (const DirData* d : group)
      if (d->meta.budget != pc.budget)
        throw std::invalid_argument("compare_runs: budgets differ for problem " + key);

    // Shared reference point: analytic for benchmarks, cross-directory union
    // otherwise.
    std::vector<ObjectiveVector> reference;
    const std::string lowered = detail::lower(pc.problem);
    if (lowered != "geothermal") {
      const BenchmarkSpec spec{pc.problem, pc.dim, pc.objectives, false};
      reference = true_front(spec);
      pc.z = default_reference_point(reference);
    } else {
      std::vector<ObjectiveVector> all_points;
      for (const DirData* d : group)
        for (const ParsedTrace& t : d->traces)
          for (const TraceRecord& rec : t.records) all_points.push_back(rec.f);
      pc.z = default_reference_point(all_points);
    }

    std::map<std::string, int> label_uses;
    for (const DirData* d : group) {
      MethodStats ms;
      ms.algo = d->meta.algo;
      const int n_used = label_uses[ms.algo]++;
      ms.label = n_used == 0 ? ms.algo : ms.algo + "#" + std::to_string(n_used + 1);
      ms.dir = d->dir;
      for (const ParsedTrace& t : d->traces) {
        const MetricCurves curves =
            metric_curves(t.records, pc.z, reference.empty() ? nullptr : &reference);
        ms.final_hv.push_back(curves.hv.back());
        if (!reference.empty()) ms.final_igd.push_back(curves.igd.back());
      }
      pc.methods.push_back(std::move(ms));
    }

    for (std::size_t a = 0; a < pc.methods.size(); ++a)
      for (std::size_t b = a + 1; b < pc.methods.size(); ++b) {
        PairTest pt;
        pt.label_a = pc.methods[a].label;
        pt.label_b = pc.methods[b].label;
        pt.p_hv = rank_sum_test(pc.methods[a].final_hv, pc.methods[b].final_hv).p;
        pc.tests.push_back(pt);
      }
    report.problems.push_back(std::move(pc));
  }

  // Rectangular coverage: every problem must expose the same label set.
  std::vector<std::string> labels;
  for (const MethodStats& ms : report.problems.front().methods) labels.push_back(ms.label);
  std::sort(labels.begin(), labels.end());
  for (const ProblemComparison& pc : report.problems) {
    std::vector<std::string> here;
    for (const MethodStats& ms : pc.methods) here.push_back(ms.label);
    std::sort(here.begin(), here.end());
    if (here != labels)
      throw std::invalid_argument(
          "compare_runs: method sets differ across problems (ranking needs rectangular coverage)");
  }
  report.labels = labels;

  // Borda ranking: per problem, rank methods by median final HV (best = 1,
  // ties averaged), then average ranks across problems.
  report.mean_rank.assign(labels.size(), 0.0);
  for (const ProblemComparison& pc : report.problems) {
    std::vector<std::pair<double, std::size_t>> scored;  // (-median, label index)
    for (const MethodStats& ms : pc.methods) {
      const auto it = std::find(labels.begin(), labels.end(), ms.label);
      scored.emplace_back(-vec_median(ms.final_hv),
                          static_cast<std::size_t>(it - labels.begin()));
    }
    std::sort(scored.begin(), scored.end());
    std::size_t i = 0;
    while (i < scored.size()) {
      std::size_t j = i;
      while (j < scored.size() && scored[j].first == scored[i].first) ++j;
      const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
      for (std::size_t k = i; k < j; ++k) report.mean_rank[scored[k].second] += avg_rank;
      i = j;
    }
  }
  for (double& r : report.mean_rank) r /= static_cast<double>(report.problems.size());
  report.ranking_order.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) report.ranking_order[i] = i;
  std::stable_sort(report.ranking_order.begin(), report.ranking_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return report.mean_rank[a] < report.mean_rank[b];
                   });
  return report;
}

inline std::string format_report(const ComparisonReport& report) {
  std::ostringstream out;
  for (const ProblemComparison& pc : report.problems) {
    out << "problem " << pc.problem << " (d=" << pc.dim << ", m=" << pc.objectives
        << ", budget=" << pc.budget << ")\n";
    for (const MethodStats& ms : pc.methods) {
      out << "  " << ms.label << ": median final HV = " << format_double(vec_median(ms.final_hv));
      if (!ms.final_igd.empty())
        out << ", median final IGD = " << format_double(vec_median(ms.final_igd));
      out << "  (" << ms.final_hv.size() << " trials, " << ms.dir.string() << ")\n";
    }
    for (const PairTest& pt : pc.tests)
      out << "  rank-sum " << pt.label_a << " vs " << pt.label_b
          << ": p = " << format_double(pt.p_hv) << "\n";
  }
  out << "ranking by mean rank over " << report.problems.size() << " problem(s):\n";
  for (std::size_t pos = 0; pos < report.ranking_order.size(); ++pos) {
    const std::size_t i = report.ranking_order[pos];
    out << "  " << pos + 1 << ". " << report.labels[i]
        << " (mean rank " << format_double(report.mean_rank[i]) << ")\n";
  }
  return out.str();
}

}  // namespace alemo
