#pragma once
// Monte Carlo campaigns over the graph ensembles: per-trial records tying
// samplers, structural audits and spectral quantities together, plus a
// deterministic aggregator (quantiles, event frequencies with Wilson 95%
// intervals).
//
// Reproducibility contract: a config fully determines every record. Each
// trial draws from a counter-based stream keyed by (seed, grid_index, trial),
// workers write into preassigned slots, and the final record list is sorted
// by (n, p, model, trial) -- so thread count and scheduling never change the
// output.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "rmtsharp/errors.hpp"
#include "rmtsharp/matrix.hpp"
#include "rmtsharp/models.hpp"
#include "rmtsharp/rng.hpp"
#include "rmtsharp/spectral.hpp"
#include "rmtsharp/structure.hpp"
#include "rmtsharp/vectors.hpp"

namespace rmtsharp {

// ---------------------------------------------------------------------------
// Experiment taxonomy.

enum class ExperimentKind {
  ZeroColumnProbability,  // Monte Carlo zero-column frequency vs closed form
  PhaseTransition,        // invertibility frequencies across np = log n + k
  SminScaling,            // conditional quantiles of s_min * sqrt(n/p)
  NormConcentration,      // centered operator norm / sqrt(np) flatness
  StructureAudit,         // light columns and the six typical properties
  DistanceIdentity,       // quadratic-form distance vs projection oracle
  HsNormCheck,            // |A^{-1} x| vs Hilbert-Schmidt norm small-ball event
};

inline const char* to_string(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::ZeroColumnProbability: return "zero_column_probability";
    case ExperimentKind::PhaseTransition: return "phase_transition";
    case ExperimentKind::SminScaling: return "smin_scaling";
    case ExperimentKind::NormConcentration: return "norm_concentration";
    case ExperimentKind::StructureAudit: return "structure_audit";
    case ExperimentKind::DistanceIdentity: return "distance_identity";
    case ExperimentKind::HsNormCheck: return "hs_norm_check";
  }
  return "unknown";
}

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (ExperimentKind e :
       {ExperimentKind::ZeroColumnProbability, ExperimentKind::PhaseTransition,
        ExperimentKind::SminScaling, ExperimentKind::NormConcentration,
        ExperimentKind::StructureAudit, ExperimentKind::DistanceIdentity,
        ExperimentKind::HsNormCheck})
    if (s == to_string(e)) return e;
  throw parameter_error("unknown experiment kind: " + s);
}

// ---------------------------------------------------------------------------
// Configuration.

// Exactly one of the three density rules describes the p-grid:
//  - k offsets:    p = (log n + k) / n, one point per k;
//  - explicit p:   taken verbatim, one point per value;
//  - log factor:   p = f * log n / n, a single point per n.
struct DensityRule {
  std::vector<double> k;
  std::vector<double> p;
  double log_factor = 0.0;

  int forms_set() const {
    return (k.empty() ? 0 : 1) + (p.empty() ? 0 : 1) + (log_factor > 0.0 ? 1 : 0);
  }
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::PhaseTransition;
  std::vector<ModelKind> models{ModelKind::UndirectedER};
  std::vector<int> n{1000};
  DensityRule density;
  int trials = 100;
  std::uint64_t seed = 1;

  // Optional per-trial computations (certificates and zero lines are always
  // recorded where the experiment defines them).
  bool record_spectra = true;
  bool record_centered = false;
  bool record_eigen = false;
  bool record_wall_time = false;  // leave the wall_ms CSV column empty unless set

  double tol = 1e-10;
  int n_dense = 1024;
  int max_iter = 10000;
  int threads = 0;  // 0: hardware concurrency (capped by RMT_SHARP_THREADS)

  StructureParams structure;
  VectorClassParams vectors;

  // Distance-identity instance cycling (full matrix sizes).
  int dist_nmin = 5;
  int dist_nmax = 50;

  // Hilbert-Schmidt small-ball check.
  int hs_draws = 100;
  double hs_eps1 = 0.1;
  double hs_eps2 = 0.25;

  double c0 = 0.5;  // density floor for norm concentration: np >= c0 log n

  std::string output;  // CSV path; empty = caller handles serialization
};

// One resolved grid point.
struct GridPoint {
  ModelKind model = ModelKind::UndirectedER;
  int n = 0;
  double p = 0.0;
  double k = 0.0;  // np - log n, recorded for readability
};

// ---------------------------------------------------------------------------
// Records.

struct TrialRecord {
  ExperimentKind experiment = ExperimentKind::PhaseTransition;
  ModelKind model = ModelKind::UndirectedER;
  int n = 0;
  double p = 0.0;
  double k = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::optional<bool> omega0;
  std::optional<int> zero_rows;
  std::optional<int> zero_cols;
  std::optional<bool> invertible;

  std::optional<double> s_min, s2, s_max;
  std::optional<double> centered_norm;
  std::optional<double> sigma, sigma_tilde;
  std::optional<double> lambda0, eigvec_dev;
  std::optional<double> khat;  // centered_norm / sqrt(np)

  std::optional<int> light_count;
  std::optional<bool> prop_no_heavy, prop_light_disjoint, prop_light_meets,
      prop_fold_overlap, prop_extension, prop_fold_size;
  std::optional<int> ell0;
  std::optional<double> rho;

  std::optional<bool> mc_zero_col;
  std::optional<double> formula_zero_col;

  std::optional<double> dist_quad, dist_proj, dist_gap;
  std::optional<bool> dist_exact;

  std::optional<double> hs_norm_inv, hs_freq1, hs_freq2;

  std::optional<double> wall_ms;
};

// ---------------------------------------------------------------------------
// Grid resolution and validation.

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw parameter_error(msg);
}

}  // namespace detail

inline std::vector<GridPoint> resolve_grid(const ExperimentConfig& cfg) {
  detail::require(cfg.trials >= 1, "trials must be at least 1");
  detail::require(!cfg.models.empty(), "model list must be nonempty");
  detail::require(cfg.tol > 0.0, "tol must be positive");
  detail::require(cfg.max_iter >= 1, "max_iter must be at least 1");
  detail::require(cfg.n_dense >= 1, "n_dense must be at least 1");

  if (cfg.experiment == ExperimentKind::DistanceIdentity) {
    detail::require(cfg.dist_nmin >= 5 && cfg.dist_nmax <= 200 &&
                        cfg.dist_nmin <= cfg.dist_nmax,
                    "distance identity sizes must satisfy 5 <= nmin <= nmax <= 200");
    return {};  // sizes cycle per trial; no (n, p) grid
  }

  detail::require(!cfg.n.empty(), "n grid must be nonempty");
  for (int n : cfg.n) detail::require(n >= 1, "grid n must be positive");
  detail::require(cfg.density.forms_set() == 1,
                  "exactly one density rule (k offsets, explicit p, or log factor) "
                  "must be configured");

  std::vector<GridPoint> grid;
  for (int n : cfg.n) {
    const double logn = std::log(static_cast<double>(n));
    std::vector<double> ps;
    if (!cfg.density.k.empty())
      for (double k : cfg.density.k) ps.push_back((logn + k) / static_cast<double>(n));
    else if (!cfg.density.p.empty())
      ps = cfg.density.p;
    else
      ps.push_back(cfg.density.log_factor * logn / static_cast<double>(n));

    for (double p : ps)
      for (ModelKind model : cfg.models) {
        detail::require(p > 0.0 && p < 1.0,
                        "density rule yields p outside (0,1) at n = " + std::to_string(n));
        GridPoint g{model, n, p, static_cast<double>(n) * p - logn};
        GraphModel{model, n, p}.validate();  // directed also needs p < 1/2

        switch (cfg.experiment) {
          case ExperimentKind::ZeroColumnProbability:
            detail::require(model == ModelKind::BipartiteBlock,
                            "the zero-column formula assumes i.i.d. entries; only the "
                            "bipartite block model is accepted");
            break;
          case ExperimentKind::SminScaling:
            detail::require(g.k >= 4.0,
                            "smin scaling runs deep in the invertible phase; need "
                            "np - log n >= 4");
            break;
          case ExperimentKind::NormConcentration:
            detail::require(static_cast<double>(n) * p >= cfg.c0 * logn,
                            "norm concentration requires np >= c0 log n");
            break;
          case ExperimentKind::StructureAudit:
            detail::require(static_cast<double>(n) * p >= std::log(1.0 / p),
                            "structure audit requires np >= log(1/p)");
            break;
          case ExperimentKind::HsNormCheck:
            detail::require(cfg.hs_draws >= 1, "hs_draws must be at least 1");
            detail::require(cfg.hs_eps1 > 0.0 && cfg.hs_eps1 < 1.0 && cfg.hs_eps2 > 0.0 &&
                                cfg.hs_eps2 < 1.0,
                            "hs eps levels must lie in (0,1)");
            break;
          default:
            break;
        }
        grid.push_back(g);
      }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Single-trial runners.

namespace detail {

inline void fill_zero_lines(TrialRecord& rec, const SparseBinaryMatrix& a) {
  const ZeroLines z = detect_zero_lines(a);
  rec.omega0 = z.omega0;
  rec.zero_rows = static_cast<int>(z.zero_rows.size());
  rec.zero_cols = static_cast<int>(z.zero_cols.size());
}

inline void fill_spectra(TrialRecord& rec, const SparseBinaryMatrix& a,
                         const ExperimentConfig& cfg) {
  const SingularTriple t = singular_extremes(a, cfg.tol, cfg.n_dense, cfg.max_iter);
  rec.s_min = t.s_min;
  rec.s2 = t.s2;
  rec.s_max = t.s_max;
  SpectralSummary s;
  s.s_min = t.s_min;
  s.s2 = t.s2;
  s.s_max = t.s_max;
  s.singular_exact = (rec.invertible && *rec.invertible) ? Certificate::Invertible
                                                         : Certificate::Singular;
  const auto [sigma, sigma_tilde] = condition_numbers(s);
  rec.sigma = sigma;
  rec.sigma_tilde = sigma_tilde;
}

inline void fill_centered(TrialRecord& rec, const SparseBinaryMatrix& a,
                          const GraphModel& model, const ExperimentConfig& cfg) {
  try {
    const double norm = centered_operator_norm(a, model, cfg.tol, cfg.max_iter);
    rec.centered_norm = norm;
    rec.khat = norm / std::sqrt(static_cast<double>(model.n) * model.p);
  } catch (const convergence_error&) {
    // Recorded as missing; the aggregator works on present values only.
  }
}

inline void fill_eigen(TrialRecord& rec, const SparseBinaryMatrix& a,
                       const ExperimentConfig& cfg) {
  const TopEigenpair top = top_eigenpair(a, cfg.tol, cfg.max_iter);
  if (top.converged) {
    rec.lambda0 = top.lambda0;
    rec.eigvec_dev = top.eigvec_dev;
  }
}

inline TrialRecord run_one_trial(const ExperimentConfig& cfg, const GridPoint& g,
                                 std::uint64_t grid_index, int trial) {
  const auto started = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.experiment = cfg.experiment;
  rec.model = g.model;
  rec.n = g.n;
  rec.p = g.p;
  rec.k = g.k;
  rec.trial = trial;
  rec.seed = cfg.seed;
  rec.stream = (grid_index << 32) | static_cast<std::uint64_t>(trial);

  const GraphModel model{g.model, g.n, g.p};
  SeededRng rng{cfg.seed, rec.stream};
  const SparseBinaryMatrix a = sample(model, rng);

  switch (cfg.experiment) {
    case ExperimentKind::ZeroColumnProbability: {
      fill_zero_lines(rec, a);
      rec.mc_zero_col = (*rec.zero_cols > 0);
      rec.formula_zero_col = omega_col_probability(g.n, g.p);
      break;
    }
    case ExperimentKind::PhaseTransition:
    case ExperimentKind::SminScaling: {
      fill_zero_lines(rec, a);
      const Certificate cert = certify_singularity(a);
      rec.invertible = (cert == Certificate::Invertible);
      if (*rec.invertible) {
        if (cfg.record_spectra) fill_spectra(rec, a, cfg);
      } else {
        const double inf = std::numeric_limits<double>::infinity();
        rec.sigma = inf;          // exact: the matrix is singular
        rec.sigma_tilde = inf;
      }
      if (cfg.record_centered) fill_centered(rec, a, model, cfg);
      if (cfg.record_eigen) fill_eigen(rec, a, cfg);
      break;
    }
    case ExperimentKind::NormConcentration: {
      fill_zero_lines(rec, a);
      fill_centered(rec, a, model, cfg);
      break;
    }
    case ExperimentKind::StructureAudit: {
      const StructuralReport rep =
          check_typical_structure(a, g.p, cfg.structure, rec.stream);
      rec.omega0 = rep.zero.omega0;
      rec.zero_rows = static_cast<int>(rep.zero.zero_rows.size());
      rec.zero_cols = static_cast<int>(rep.zero.zero_cols.size());
      rec.light_count = static_cast<int>(rep.light_cols.size());
      rec.prop_no_heavy = rep.props[0];
      rec.prop_light_disjoint = rep.props[1];
      rec.prop_light_meets = rep.props[2];
      rec.prop_fold_overlap = rep.props[3];
      rec.prop_extension = rep.props[4];
      rec.prop_fold_size = rep.props[5];
      if (static_cast<double>(g.n) * g.p > 1.0) {
        const RhoEll0 re = compute_rho_ell0(g.n, g.p, cfg.vectors);
        rec.ell0 = re.ell0;
        rec.rho = re.rho;
      }
      break;
    }
    case ExperimentKind::HsNormCheck: {
      fill_zero_lines(rec, a);
      const Certificate cert = certify_singularity(a);
      rec.invertible = (cert == Certificate::Invertible);
      if (*rec.invertible) {
        rec.hs_norm_inv = hs_norm_inverse(a);
        const Eigen::MatrixXd dense = a.to_dense();
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);
        const double bound1 =
            std::sqrt(g.p * (1.0 - g.p) / cfg.hs_eps1) * *rec.hs_norm_inv;
        const double bound2 =
            std::sqrt(g.p * (1.0 - g.p) / cfg.hs_eps2) * *rec.hs_norm_inv;
        int hits1 = 0, hits2 = 0;
        Eigen::VectorXd x(g.n);
        for (int draw = 0; draw < cfg.hs_draws; ++draw) {
          CounterStream cs(rng, rng_tag::kVector, static_cast<std::uint64_t>(draw));
          for (int j = 0; j < g.n; ++j)
            x[j] = (cs.next_bernoulli(g.p) ? 1.0 : 0.0) - g.p;
          const double norm = lu.solve(x).norm();
          if (norm <= bound1) ++hits1;
          if (norm <= bound2) ++hits2;
        }
        rec.hs_freq1 = static_cast<double>(hits1) / cfg.hs_draws;
        rec.hs_freq2 = static_cast<double>(hits2) / cfg.hs_draws;
      }
      break;
    }
    case ExperimentKind::DistanceIdentity:
      break;  // handled by run_one_distance_trial
  }

  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - started)
                    .count();
  return rec;
}

// Distance-identity trials cycle size, model and density so the instance set
// covers the parameter box without extra configuration.
inline TrialRecord run_one_distance_trial(const ExperimentConfig& cfg, int trial) {
  static constexpr double kDensities[] = {0.08, 0.15, 0.25, 0.35, 0.45};
  static constexpr ModelKind kModels[] = {ModelKind::UndirectedER, ModelKind::DirectedER,
                                          ModelKind::BipartiteBlock};
  const auto started = std::chrono::steady_clock::now();

  const int span = cfg.dist_nmax - cfg.dist_nmin + 1;
  const int size = cfg.dist_nmin + (trial % span);
  const ModelKind model_kind = kModels[trial % 3];
  const double p = kDensities[trial % 5];

  TrialRecord rec;
  rec.experiment = cfg.experiment;
  rec.model = model_kind;
  rec.n = size;
  rec.p = p;
  rec.k = static_cast<double>(size) * p - std::log(static_cast<double>(size));
  rec.trial = trial;
  rec.seed = cfg.seed;
  rec.stream = static_cast<std::uint64_t>(trial);

  const GraphModel model{model_kind, size, p};
  SeededRng rng{cfg.seed, rec.stream};
  const SparseBinaryMatrix a = sample(model, rng);
  fill_zero_lines(rec, a);

  const DistanceInstance inst = make_distance_instance(a);
  const QuadFormDistance qf = distance_via_quadratic_form(inst);
  rec.dist_quad = qf.value;
  rec.dist_exact = qf.exact;
  rec.dist_proj = distance_column_to_span(a, 1);
  rec.dist_gap = std::fabs(*rec.dist_quad - *rec.dist_proj);

  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - started)
                    .count();
  return rec;
}

inline int resolve_threads(int configured) {
  int threads = configured > 0 ? configured
                               : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* cap = std::getenv("RMT_SHARP_THREADS")) {
    const int limit = std::atoi(cap);
    if (limit >= 1) threads = std::min(threads, limit);
  }
  return threads;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Campaign driver.

inline std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.structure.validate();
  cfg.vectors.validate();
  const std::vector<GridPoint> grid = resolve_grid(cfg);
  const bool distance = (cfg.experiment == ExperimentKind::DistanceIdentity);
  const std::size_t total = distance ? static_cast<std::size_t>(cfg.trials)
                                     : grid.size() * static_cast<std::size_t>(cfg.trials);

  std::vector<TrialRecord> records(total);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) break;
      try {
        if (distance) {
          records[i] = detail::run_one_distance_trial(cfg, static_cast<int>(i));
        } else {
          const std::size_t gi = i / static_cast<std::size_t>(cfg.trials);
          const int trial = static_cast<int>(i % static_cast<std::size_t>(cfg.trials));
          records[i] = detail::run_one_trial(cfg, grid[gi], gi, trial);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(total);  // drain remaining work
        break;
      }
    }
  };

  const int threads = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(detail::resolve_threads(cfg.threads)), total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.p != b.p) return a.p < b.p;
    if (a.model != b.model) return static_cast<int>(a.model) < static_cast<int>(b.model);
    return a.trial < b.trial;
  });
  return records;
}

// ---------------------------------------------------------------------------
// Aggregation.

// Type-7 (linear interpolation) quantile; infinities are legal inputs and
// propagate without producing NaN. The input need not be sorted.
inline double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw parameter_error("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw parameter_error("quantile level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || lo + 1 >= values.size()) return values[lo];
  const double a = values[lo], b = values[lo + 1];
  if (std::isinf(b)) return frac > 0.0 ? b : a;
  return a + frac * (b - a);
}

struct WilsonInterval {
  double freq = 0.0;
  double low = 0.0;
  double high = 0.0;
};

inline WilsonInterval wilson_interval(long long numer, long long denom) {
  if (denom <= 0) throw parameter_error("Wilson interval needs a positive denominator");
  if (numer < 0 || numer > denom)
    throw parameter_error("Wilson interval numerator out of range");
  constexpr double z = 1.959963984540054;  // 95% two-sided normal quantile
  const double nd = static_cast<double>(denom);
  const double phat = static_cast<double>(numer) / nd;
  const double z2 = z * z;
  const double denom_adj = 1.0 + z2 / nd;
  const double center = (phat + z2 / (2.0 * nd)) / denom_adj;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / nd + z2 / (4.0 * nd * nd)) / denom_adj;
  return {phat, std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct FieldStats {
  long long count = 0;
  double mean = 0.0;
  double q10 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct EventStats {
  long long numer = 0;
  long long denom = 0;
  WilsonInterval wilson;
};

struct ZeroColComparison {
  double freq = 0.0;
  double formula = 0.0;
  double abs_diff = 0.0;
  double band3 = 0.0;  // 3 sigma binomial band around the closed form
};

struct GroupAggregate {
  ModelKind model = ModelKind::UndirectedER;
  int n = 0;
  double p = 0.0;
  double k = 0.0;
  long long count = 0;
  std::map<std::string, FieldStats> numeric;
  std::map<std::string, EventStats> events;
  std::optional<double> khat_q99;
  std::optional<int> ell0;
  std::optional<double> rho;
  std::optional<ZeroColComparison> zero_col;
};

struct AggregateReport {
  ExperimentKind experiment = ExperimentKind::PhaseTransition;
  std::vector<GroupAggregate> groups;
};

namespace detail {

inline FieldStats field_stats(const std::vector<double>& vals) {
  FieldStats f;
  f.count = static_cast<long long>(vals.size());
  double sum = 0.0;
  f.min = vals.front();
  f.max = vals.front();
  for (double v : vals) {
    sum += v;
    f.min = std::min(f.min, v);
    f.max = std::max(f.max, v);
  }
  f.mean = sum / static_cast<double>(vals.size());
  f.q10 = quantile_type7(vals, 0.10);
  f.q50 = quantile_type7(vals, 0.50);
  f.q90 = quantile_type7(vals, 0.90);
  return f;
}

}  // namespace detail

// Groups records by (n, p, model) and reduces each group to quantiles and
// Wilson-bracketed event frequencies. Deterministic: maps are ordered and the
// record order does not affect any statistic.
inline AggregateReport aggregate(const std::vector<TrialRecord>& records) {
  AggregateReport report;
  if (records.empty()) return report;
  report.experiment = records.front().experiment;
  for (const TrialRecord& r : records)
    if (r.experiment != report.experiment)
      throw parameter_error("aggregate requires records from a single experiment");

  std::map<std::tuple<int, double, int>, std::vector<const TrialRecord*>> groups;
  for (const TrialRecord& r : records)
    groups[{r.n, r.p, static_cast<int>(r.model)}].push_back(&r);

  for (const auto& [key, rows] : groups) {
    GroupAggregate g;
    g.n = std::get<0>(key);
    g.p = std::get<1>(key);
    g.model = static_cast<ModelKind>(std::get<2>(key));
    g.k = rows.front()->k;
    g.count = static_cast<long long>(rows.size());
    g.ell0 = rows.front()->ell0;
    g.rho = rows.front()->rho;

    auto collect = [&](const char* name, auto getter) {
      std::vector<double> vals;
      for (const TrialRecord* r : rows) {
        const auto v = getter(*r);
        if (v) vals.push_back(static_cast<double>(*v));
      }
      if (!vals.empty()) g.numeric[name] = detail::field_stats(vals);
    };
    collect("s_min", [](const TrialRecord& r) { return r.s_min; });
    collect("s2", [](const TrialRecord& r) { return r.s2; });
    collect("s_max", [](const TrialRecord& r) { return r.s_max; });
    collect("sigma", [](const TrialRecord& r) { return r.sigma; });
    collect("sigma_tilde", [](const TrialRecord& r) { return r.sigma_tilde; });
    collect("centered_norm", [](const TrialRecord& r) { return r.centered_norm; });
    collect("khat", [](const TrialRecord& r) { return r.khat; });
    collect("lambda0", [](const TrialRecord& r) { return r.lambda0; });
    collect("eigvec_dev", [](const TrialRecord& r) { return r.eigvec_dev; });
    collect("light_count", [](const TrialRecord& r) { return r.light_count; });
    collect("hs_norm_inv", [](const TrialRecord& r) { return r.hs_norm_inv; });
    collect("hs_freq1", [](const TrialRecord& r) { return r.hs_freq1; });
    collect("hs_freq2", [](const TrialRecord& r) { return r.hs_freq2; });
    collect("dist_quad", [](const TrialRecord& r) { return r.dist_quad; });
    collect("dist_proj", [](const TrialRecord& r) { return r.dist_proj; });
    collect("smin_scaled", [&](const TrialRecord& r) -> std::optional<double> {
      if (!r.s_min) return std::nullopt;
      return *r.s_min * std::sqrt(static_cast<double>(r.n) / r.p);
    });
    collect("dist_gap_rel", [](const TrialRecord& r) -> std::optional<double> {
      if (!r.dist_gap || !r.dist_proj) return std::nullopt;
      return *r.dist_gap / std::max(1.0, *r.dist_proj);
    });

    auto event = [&](const char* name, auto flag_of) {
      long long numer = 0, denom = 0;
      for (const TrialRecord* r : rows) {
        const std::optional<bool> f = flag_of(*r);
        if (!f) continue;
        ++denom;
        if (*f) ++numer;
      }
      if (denom > 0) {
        EventStats e{numer, denom, wilson_interval(numer, denom)};
        g.events[name] = e;
      }
    };
    event("omega0", [](const TrialRecord& r) { return r.omega0; });
    event("invertible", [](const TrialRecord& r) { return r.invertible; });
    event("invertible_given_not_omega0",
          [](const TrialRecord& r) -> std::optional<bool> {
            if (!r.invertible || !r.omega0 || *r.omega0) return std::nullopt;
            return r.invertible;
          });
    event("mc_zero_col", [](const TrialRecord& r) { return r.mc_zero_col; });
    event("light_empty", [](const TrialRecord& r) -> std::optional<bool> {
      if (!r.light_count) return std::nullopt;
      return *r.light_count == 0;
    });
    event("prop_no_heavy", [](const TrialRecord& r) { return r.prop_no_heavy; });
    event("prop_light_disjoint",
          [](const TrialRecord& r) { return r.prop_light_disjoint; });
    event("prop_light_meets", [](const TrialRecord& r) { return r.prop_light_meets; });
    event("prop_fold_overlap", [](const TrialRecord& r) { return r.prop_fold_overlap; });
    event("prop_extension", [](const TrialRecord& r) { return r.prop_extension; });
    event("prop_fold_size", [](const TrialRecord& r) { return r.prop_fold_size; });
    event("dist_exact", [](const TrialRecord& r) { return r.dist_exact; });
    event("dist_lower_valid", [](const TrialRecord& r) -> std::optional<bool> {
      if (!r.dist_exact || *r.dist_exact) return std::nullopt;  // lower-bound branch only
      if (!r.dist_quad || !r.dist_proj) return std::nullopt;
      return *r.dist_quad <= *r.dist_proj + 1e-8;
    });
    event("smin_vanishing", [](const TrialRecord& r) -> std::optional<bool> {
      if (!r.invertible || !*r.invertible || !r.s_min || !r.s_max) return std::nullopt;
      return *r.s_min <= 1e-8 * *r.s_max;
    });

    // Run-level estimate of the norm constant, then the eigenpair deviation
    // flags measured against it.
    {
      std::vector<double> khats;
      for (const TrialRecord* r : rows)
        if (r->khat) khats.push_back(*r->khat);
      if (!khats.empty()) g.khat_q99 = quantile_type7(khats, 0.99);
    }
    event("lambda0_large", [&](const TrialRecord& r) -> std::optional<bool> {
      if (!r.lambda0) return std::nullopt;
      return *r.lambda0 >= static_cast<double>(r.n) * r.p / 2.0;
    });
    if (g.khat_q99) {
      event("eigvec_close", [&](const TrialRecord& r) -> std::optional<bool> {
        if (!r.eigvec_dev) return std::nullopt;
        const double np = static_cast<double>(r.n) * r.p;
        return *r.eigvec_dev * std::sqrt(np) <= 16.0 * *g.khat_q99;
      });
    }

    if (report.experiment == ExperimentKind::ZeroColumnProbability) {
      long long hits = 0, total = 0;
      for (const TrialRecord* r : rows)
        if (r->mc_zero_col) {
          ++total;
          if (*r->mc_zero_col) ++hits;
        }
      if (total > 0) {
        ZeroColComparison zc;
        zc.freq = static_cast<double>(hits) / static_cast<double>(total);
        zc.formula = rows.front()->formula_zero_col.value_or(
            omega_col_probability(g.n, g.p));
        zc.abs_diff = std::fabs(zc.freq - zc.formula);
        zc.band3 =
            3.0 * std::sqrt(zc.formula * (1.0 - zc.formula) / static_cast<double>(total));
        g.zero_col = zc;
      }
    }

    report.groups.push_back(std::move(g));
  }
  return report;
}

}  // namespace rmtsharp
