#pragma once

// Operator-difference identities via triple operator integrals and
// Lipschitz-type ratio experiments in S_p.

#include "opint/besov.hpp"
#include "opint/core.hpp"
#include "opint/function.hpp"
#include "opint/operator_integrals.hpp"
#include "opint/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace opint {

// ---------------------------------------------------------------------------
// Identity checks

enum class IdentityKind { first, second, full };

inline std::string to_string(IdentityKind k) {
  switch (k) {
    case IdentityKind::first: return "first";
    case IdentityKind::second: return "second";
    case IdentityKind::full: return "full";
  }
  return "?";
}

struct IdentityCheckReport {
  IdentityKind kind = IdentityKind::first;
  std::string f_id;
  Eigen::Index dim = 0;
  std::uint64_t seed = 0;
  double lhs_norm = 0.0;  // Frobenius
  double rhs_norm = 0.0;
  double residual_norm = 0.0;
  double relative_residual = 0.0;
};

namespace detail {

inline IdentityCheckReport make_identity_report(IdentityKind kind, const FunctionR2& f, const Matrix& lhs,
                                                const Matrix& rhs) {
  IdentityCheckReport r;
  r.kind = kind;
  r.f_id = f.label();
  r.dim = lhs.rows();
  r.lhs_norm = lhs.norm();
  r.rhs_norm = rhs.norm();
  r.residual_norm = (lhs - rhs).norm();
  r.relative_residual = r.residual_norm / std::max(r.lhs_norm, std::numeric_limits<double>::min());
  return r;
}

inline auto first_divided_difference(const FunctionR2& f) {
  return [f](double x1, double x2, double y) { return divided_difference_first(f, x1, x2, y); };
}
inline auto second_divided_difference(const FunctionR2& f) {
  return [f](double x, double y1, double y2) { return divided_difference_second(f, x, y1, y2); };
}

}  // namespace detail

// f(A1,B) - f(A2,B) against ∭ ∂[1]f dE_{A1} (A1-A2) dE_{A2} dE_B
inline IdentityCheckReport difference_first_identity_check(const FunctionR2& f, const HermitianMatrix& a1,
                                                           const HermitianMatrix& a2, const HermitianMatrix& b,
                                                           double cluster_tol = kDefaultClusterTol) {
  detail::require_dims("difference_first_identity_check", {a1.dim(), a2.dim(), b.dim()});
  const auto ea1 = spectral_measure(a1, cluster_tol);
  const auto ea2 = spectral_measure(a2, cluster_tol);
  const auto eb = spectral_measure(b, cluster_tol);
  const Matrix lhs = f_of_pair(f, ea1, eb) - f_of_pair(f, ea2, eb);
  const Matrix rhs = triple_oi_first(detail::first_divided_difference(f), ea1, a1.matrix() - a2.matrix(), ea2, eb,
                                     "d1[" + f.label() + "]")
                         .value;
  return detail::make_identity_report(IdentityKind::first, f, lhs, rhs);
}

// f(A,B1) - f(A,B2) against ∭ ∂[2]f dE_A dE_{B1} (B1-B2) dE_{B2}
inline IdentityCheckReport difference_second_identity_check(const FunctionR2& f, const HermitianMatrix& a,
                                                            const HermitianMatrix& b1, const HermitianMatrix& b2,
                                                            double cluster_tol = kDefaultClusterTol) {
  detail::require_dims("difference_second_identity_check", {a.dim(), b1.dim(), b2.dim()});
  const auto ea = spectral_measure(a, cluster_tol);
  const auto eb1 = spectral_measure(b1, cluster_tol);
  const auto eb2 = spectral_measure(b2, cluster_tol);
  const Matrix lhs = f_of_pair(f, ea, eb1) - f_of_pair(f, ea, eb2);
  const Matrix rhs = triple_oi_second(detail::second_divided_difference(f), ea, eb1, b1.matrix() - b2.matrix(),
                                      eb2, "d2[" + f.label() + "]")
                         .value;
  return detail::make_identity_report(IdentityKind::second, f, lhs, rhs);
}

// f(A1,B1) - f(A2,B2) against
//   ∭ ∂[1]f dE_{A1} (A1-A2) dE_{A2} dE_{B1} + ∭ ∂[2]f dE_{A2} dE_{B1} (B1-B2) dE_{B2}
inline IdentityCheckReport full_difference_identity_check(const FunctionR2& f, const HermitianMatrix& a1,
                                                          const HermitianMatrix& a2, const HermitianMatrix& b1,
                                                          const HermitianMatrix& b2,
                                                          double cluster_tol = kDefaultClusterTol) {
  detail::require_dims("full_difference_identity_check", {a1.dim(), a2.dim(), b1.dim(), b2.dim()});
  const auto ea1 = spectral_measure(a1, cluster_tol);
  const auto ea2 = spectral_measure(a2, cluster_tol);
  const auto eb1 = spectral_measure(b1, cluster_tol);
  const auto eb2 = spectral_measure(b2, cluster_tol);
  const Matrix lhs = f_of_pair(f, ea1, eb1) - f_of_pair(f, ea2, eb2);
  const Matrix first =
      triple_oi_first(detail::first_divided_difference(f), ea1, a1.matrix() - a2.matrix(), ea2, eb1).value;
  const Matrix second =
      triple_oi_second(detail::second_divided_difference(f), ea2, eb1, b1.matrix() - b2.matrix(), eb2).value;
  return detail::make_identity_report(IdentityKind::full, f, lhs, first + second);
}

// ---------------------------------------------------------------------------
// Seeded instance generation

struct GeneratorPolicy {
  Ensemble ensemble = Ensemble::gue();
  double min_gap_rel = 1e-4;         // within one operator, relative to nominal range
  double cross_gap_rel = 1e-9;       // between spectra of the two operators of a pair
  double perturbation = 0.5;         // S_2 norm of the generated difference (identity runs)
  bool stress_collisions = false;    // force exactly shared eigenvalues

  double min_gap() const { return min_gap_rel * ensemble.nominal_range(); }
  double cross_gap() const { return cross_gap_rel * ensemble.nominal_range(); }
};

namespace detail {

inline double min_cross_gap(const RealVector& x, const RealVector& y) {
  double best = std::numeric_limits<double>::infinity();
  Eigen::Index j = 0, k = 0;  // both ascending: merge walk
  while (j < x.size() && k < y.size()) {
    best = std::min(best, std::abs(x[j] - y[k]));
    if (x[j] < y[k]) ++j; else ++k;
  }
  return best;
}

// Diagonal pair sharing half of its eigenvalues exactly.
inline std::pair<HermitianMatrix, HermitianMatrix> colliding_pair(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coin(0, 1);
  RealVector x(dim), y(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    x[i] = static_cast<double>(i) - static_cast<double>(dim) / 2.0;
    y[i] = (i % 2 == 0 || coin(rng)) ? x[i] : x[i] + 0.5;
  }
  return {HermitianMatrix::diagonal(x), HermitianMatrix::diagonal(y)};
}

}  // namespace detail

// (H, H + D) with ||D||_2 = policy.perturbation and spectra separated by the
// cross gap (resampling D as needed). In stress mode: an exactly colliding
// diagonal pair.
inline std::pair<HermitianMatrix, HermitianMatrix> generate_pair(Eigen::Index dim, const GeneratorPolicy& policy,
                                                                 std::uint64_t seed) {
  if (policy.stress_collisions) return detail::colliding_pair(dim, seed);
  const auto h = random_hermitian(dim, policy.ensemble, policy.min_gap(), derive_seed(seed, 0));
  const auto lam = eigendecompose(h).eigenvalues;
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    auto pp = prescribed_perturbation(h, SchattenIndex(2.0), policy.perturbation, derive_seed(seed, attempt + 1));
    if (detail::min_cross_gap(lam, eigendecompose(pp.perturbed).eigenvalues) >= policy.cross_gap())
      return {h, pp.perturbed};
  }
  throw NumericalError("generate_pair: could not separate spectra by the cross gap after 64 attempts");
}

struct IdentitySuiteConfig {
  std::vector<int> dims{4, 8, 16, 32, 64};
  int trials = 100;  // per kind; dims and functions are cycled
  std::uint64_t seed = 0;
  std::vector<IdentityKind> kinds{IdentityKind::first, IdentityKind::second, IdentityKind::full};
  std::vector<FunctionR2> functions;
  GeneratorPolicy policy;
  int threads = 1;
};

struct IdentitySuiteReport {
  std::vector<IdentityCheckReport> rows;
  double max_relative_residual = 0.0;
};

namespace detail {

// Runs task(i) for i in [0, n) on `threads` workers; results land by index,
// so output never depends on scheduling.
template <class Task>
void parallel_for(std::size_t n, int threads, const Task& task) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

inline IdentityCheckReport identity_instance(IdentityKind kind, const FunctionR2& f, Eigen::Index dim,
                                             const GeneratorPolicy& policy, std::uint64_t seed) {
  IdentityCheckReport r;
  switch (kind) {
    case IdentityKind::first: {
      auto [a1, a2] = generate_pair(dim, policy, derive_seed(seed, 1));
      auto b = random_hermitian(dim, policy.ensemble, policy.min_gap(), derive_seed(seed, 2));
      r = difference_first_identity_check(f, a1, a2, b);
      break;
    }
    case IdentityKind::second: {
      auto a = random_hermitian(dim, policy.ensemble, policy.min_gap(), derive_seed(seed, 1));
      auto [b1, b2] = generate_pair(dim, policy, derive_seed(seed, 2));
      r = difference_second_identity_check(f, a, b1, b2);
      break;
    }
    case IdentityKind::full: {
      auto [a1, a2] = generate_pair(dim, policy, derive_seed(seed, 1));
      auto [b1, b2] = generate_pair(dim, policy, derive_seed(seed, 2));
      r = full_difference_identity_check(f, a1, a2, b1, b2);
      break;
    }
  }
  r.seed = seed;
  return r;
}

inline IdentitySuiteReport run_identity_suite(const IdentitySuiteConfig& cfg) {
  if (cfg.functions.empty()) throw ValidationError("identity suite: 'functions' must not be empty");
  if (cfg.dims.empty()) throw ValidationError("identity suite: 'dims' must not be empty");
  if (cfg.trials < 1) throw ValidationError("identity suite: 'trials' must be >= 1");
  for (int d : cfg.dims)
    if (d < 1) throw ValidationError("identity suite: every entry of 'dims' must be >= 1");

  const std::size_t per_kind = static_cast<std::size_t>(cfg.trials);
  IdentitySuiteReport rep;
  rep.rows.resize(per_kind * cfg.kinds.size());
  detail::parallel_for(rep.rows.size(), cfg.threads, [&](std::size_t i) {
    const auto kind = cfg.kinds[i / per_kind];
    const std::size_t t = i % per_kind;
    const int dim = cfg.dims[t % cfg.dims.size()];
    const auto& f = cfg.functions[t % cfg.functions.size()];
    rep.rows[i] = identity_instance(kind, f, dim, cfg.policy, derive_seed(cfg.seed, i));
  });
  for (const auto& r : rep.rows) rep.max_relative_residual = std::max(rep.max_relative_residual, r.relative_residual);
  return rep;
}

// ---------------------------------------------------------------------------
// Lipschitz experiments

enum class Normalizer { besov, sigma_sup, none };
enum class EvaluationPath { direct, sharp };
enum class PerturbSides { both, first, second };

inline std::string to_string(Normalizer n) {
  switch (n) {
    case Normalizer::besov: return "besov";
    case Normalizer::sigma_sup: return "sigma_sup";
    case Normalizer::none: return "none";
  }
  return "?";
}
inline std::string to_string(EvaluationPath e) { return e == EvaluationPath::direct ? "direct" : "sharp"; }
inline std::string to_string(PerturbSides s) {
  switch (s) {
    case PerturbSides::both: return "both";
    case PerturbSides::first: return "first";
    case PerturbSides::second: return "second";
  }
  return "?";
}

struct LipschitzConfig {
  std::vector<SchattenIndex> ps{SchattenIndex(1.0), SchattenIndex(1.5), SchattenIndex(2.0)};
  std::vector<int> dims{4, 8, 16, 32, 64};
  int trials = 200;  // per (p, dim); functions are cycled
  std::uint64_t seed = 0;
  Ensemble ensemble = Ensemble::gue();
  double min_gap_rel = 1e-4;
  std::vector<FunctionR2> functions;
  double perturbation = 0.1;  // S_p norm of each generated difference
  Normalizer normalizer = Normalizer::besov;
  EvaluationPath path = EvaluationPath::direct;
  PerturbSides sides = PerturbSides::both;
  int threads = 1;

  // scan mode
  int restarts = 8;    // per (p, dim)
  int steps = 16;      // greedy steps per restart
  double step_size = 0.5;
  double growth_threshold = 1.5;
};

struct LipschitzTrial {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double p = 2.0;  // +inf for the operator norm
  double sigma = 0.0;
  std::string f_id;
  int dim = 0;
  double diff_norm = 0.0;
  double pert_norm = 0.0;
  double ratio = 0.0;
  double besov_norm_upper = 0.0;  // normalizer actually used (1 for "none")
  double normalized = 0.0;        // ratio / normalizer
  bool skipped = false;
};

struct DimensionSummary {
  std::size_t index = 0;
  double p = 2.0;
  int dim = 0;
  double max_ratio = 0.0;
  double max_normalized = 0.0;
  std::size_t count = 0;
};

struct Trend {
  double p = 2.0;
  double growth_factor = 1.0;  // max_normalized at largest dim / at smallest dim
  double spread = 1.0;         // max / min of max_normalized over dims
  double loglog_slope = 0.0;
  bool grows = false;
};

struct ExperimentReport {
  std::string mode;  // "lipschitz" | "scan"
  LipschitzConfig config;
  std::vector<LipschitzTrial> trials;
  std::size_t skipped = 0;
  double empirical_constant = 0.0;
  std::vector<DimensionSummary> summary;
  std::vector<Trend> trends;
};

inline double normalizer_value(const FunctionR2& f, Normalizer kind) {
  switch (kind) {
    case Normalizer::none: return 1.0;
    case Normalizer::besov: {
      if (!f.has_modes())
        throw CapabilityError("lipschitz: besov normalizer needs Fourier metadata for '" + f.label() + "'");
      BesovOptions opts;
      opts.sup_grid = 0;  // only the upper end is used
      return besov_norm(f, BesovFlavor::inhomogeneous, opts).upper;
    }
    case Normalizer::sigma_sup:
      return support_radius(f) * sup_norm(f, 0).upper;
  }
  return 1.0;
}

namespace detail {

struct TrialSetup {
  HermitianMatrix a1, b1;
  Matrix da, db;  // directions, scaled to the target S_p norm
};

inline Matrix pair_value(const FunctionR2& f, const HermitianMatrix& a, const HermitianMatrix& b, EvaluationPath path) {
  return path == EvaluationPath::direct ? f_of_pair(f, a, b) : f_of_pair_sharp(f, a, b);
}

inline void evaluate_trial(LipschitzTrial& t, const FunctionR2& f, const TrialSetup& s, SchattenIndex p,
                           EvaluationPath path) {
  const HermitianMatrix a2(hermitize(s.a1.matrix() + s.da));
  const HermitianMatrix b2(hermitize(s.b1.matrix() + s.db));
  const double na = schatten_norm(s.a1.matrix() - a2.matrix(), p);
  const double nb = schatten_norm(s.b1.matrix() - b2.matrix(), p);
  t.pert_norm = std::max(na, nb);
  if (t.pert_norm == 0.0) {
    t.skipped = true;
    t.diff_norm = t.ratio = t.normalized = 0.0;
    return;
  }
  t.skipped = false;
  t.diff_norm = schatten_norm(pair_value(f, s.a1, s.b1, path) - pair_value(f, a2, b2, path), p);
  t.ratio = t.diff_norm / t.pert_norm;
  t.normalized = t.ratio == 0.0 ? 0.0 : t.ratio / t.besov_norm_upper;
}

inline Matrix scaled_direction(Eigen::Index dim, SchattenIndex p, double target, std::mt19937_64& rng) {
  if (target == 0.0) return Matrix::Zero(dim, dim);
  Matrix d = gue_sample(dim, rng);
  return d * (target / schatten_norm(d, p));
}

inline TrialSetup make_setup(const LipschitzConfig& cfg, int dim, SchattenIndex p, std::uint64_t seed) {
  const double gap = cfg.min_gap_rel * cfg.ensemble.nominal_range();
  auto a1 = random_hermitian(dim, cfg.ensemble, gap, derive_seed(seed, 1));
  auto b1 = random_hermitian(dim, cfg.ensemble, gap, derive_seed(seed, 2));
  std::mt19937_64 rng(derive_seed(seed, 3));
  const double ta = cfg.sides == PerturbSides::second ? 0.0 : cfg.perturbation;
  const double tb = cfg.sides == PerturbSides::first ? 0.0 : cfg.perturbation;
  Matrix da = scaled_direction(dim, p, ta, rng);
  Matrix db = scaled_direction(dim, p, tb, rng);
  return {std::move(a1), std::move(b1), std::move(da), std::move(db)};
}

inline void validate(const LipschitzConfig& cfg) {
  if (cfg.functions.empty()) throw ValidationError("lipschitz: 'functions' must not be empty");
  if (cfg.dims.empty()) throw ValidationError("lipschitz: 'dims' must not be empty");
  if (cfg.ps.empty()) throw ValidationError("lipschitz: 'p' must not be empty");
  if (cfg.trials < 1) throw ValidationError("lipschitz: 'trials' must be >= 1");
  if (!(cfg.perturbation >= 0) || !std::isfinite(cfg.perturbation))
    throw ValidationError("lipschitz: 'perturbation' must be a finite number >= 0");
  for (int d : cfg.dims)
    if (d < 1) throw ValidationError("lipschitz: every entry of 'dims' must be >= 1");
}

inline void summarize(ExperimentReport& rep) {
  std::map<std::pair<double, int>, DimensionSummary> by;
  rep.skipped = 0;
  rep.empirical_constant = 0.0;
  for (const auto& t : rep.trials) {
    if (t.skipped) {
      ++rep.skipped;
      continue;
    }
    rep.empirical_constant = std::max(rep.empirical_constant, t.normalized);
    auto& s = by[{t.p, t.dim}];
    s.p = t.p;
    s.dim = t.dim;
    s.max_ratio = std::max(s.max_ratio, t.ratio);
    s.max_normalized = std::max(s.max_normalized, t.normalized);
    ++s.count;
  }
  rep.summary.clear();
  for (auto& [key, s] : by) {
    s.index = rep.summary.size();
    rep.summary.push_back(s);
  }

  rep.trends.clear();
  for (const auto& p : rep.config.ps) {
    std::vector<const DimensionSummary*> rows;
    for (const auto& s : rep.summary)
      if (s.p == p.value()) rows.push_back(&s);
    if (rows.empty()) continue;
    Trend tr;
    tr.p = p.value();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (auto* r : rows) {
      lo = std::min(lo, r->max_normalized);
      hi = std::max(hi, r->max_normalized);
    }
    tr.spread = lo > 0 ? hi / lo : (hi > 0 ? std::numeric_limits<double>::infinity() : 1.0);
    const double first = rows.front()->max_normalized, last = rows.back()->max_normalized;
    tr.growth_factor = first > 0 ? last / first : 1.0;
    if (rows.size() >= 2 && lo > 0) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double m = static_cast<double>(rows.size());
      for (auto* r : rows) {
        const double x = std::log(static_cast<double>(r->dim)), y = std::log(r->max_normalized);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double den = m * sxx - sx * sx;
      tr.loglog_slope = den != 0 ? (m * sxy - sx * sy) / den : 0.0;
    }
    tr.grows = tr.growth_factor > rep.config.growth_threshold;
    rep.trends.push_back(tr);
  }
}

}  // namespace detail

// Recomputes skipped count, empirical constant, per-dimension summary and
// trends from the trial rows.
inline void summarize(ExperimentReport& rep) { detail::summarize(rep); }

inline ExperimentReport lipschitz_experiment(const LipschitzConfig& cfg) {
  detail::validate(cfg);
  std::vector<double> norms;
  for (const auto& f : cfg.functions) norms.push_back(normalizer_value(f, cfg.normalizer));

  ExperimentReport rep;
  rep.mode = "lipschitz";
  rep.config = cfg;
  const std::size_t per = static_cast<std::size_t>(cfg.trials);
  const std::size_t n = cfg.ps.size() * cfg.dims.size() * per;
  rep.trials.resize(n);
  detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
    const std::size_t t = i % per;
    const int dim = cfg.dims[(i / per) % cfg.dims.size()];
    const SchattenIndex p = cfg.ps[i / (per * cfg.dims.size())];
    const std::size_t fi = t % cfg.functions.size();
    const auto& f = cfg.functions[fi];

    LipschitzTrial& trial = rep.trials[i];
    trial.index = i;
    trial.seed = derive_seed(cfg.seed, i);
    trial.p = p.value();
    trial.dim = dim;
    trial.f_id = f.label();
    trial.sigma = f.support_radius().value_or(std::numeric_limits<double>::quiet_NaN());
    trial.besov_norm_upper = norms[fi];
    detail::evaluate_trial(trial, f, detail::make_setup(cfg, dim, p, trial.seed), p, cfg.path);
  });
  detail::summarize(rep);
  return rep;
}

// Exploratory search for dimension growth of the ratio, intended for p > 2
// and p = ∞ (p = 2 as a control). Each restart draws an instance and then
// greedily perturbs the directions, keeping changes that raise the ratio.
inline ExperimentReport p_above_2_scan(const LipschitzConfig& cfg) {
  detail::validate(cfg);
  for (const auto& p : cfg.ps)
    if (p.value() < 2.0) throw ValidationError("scan: every p must be >= 2 (got " + p.to_string() + ")");
  if (cfg.restarts < 1) throw ValidationError("scan: 'restarts' must be >= 1");
  if (cfg.steps < 0) throw ValidationError("scan: 'steps' must be >= 0");
  std::vector<double> norms;
  for (const auto& f : cfg.functions) norms.push_back(normalizer_value(f, cfg.normalizer));

  ExperimentReport rep;
  rep.mode = "scan";
  rep.config = cfg;
  const std::size_t per = static_cast<std::size_t>(cfg.restarts);
  const std::size_t n = cfg.ps.size() * cfg.dims.size() * per;
  rep.trials.resize(n);
  detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
    const std::size_t t = i % per;
    const int dim = cfg.dims[(i / per) % cfg.dims.size()];
    const SchattenIndex p = cfg.ps[i / (per * cfg.dims.size())];
    const std::size_t fi = t % cfg.functions.size();
    const auto& f = cfg.functions[fi];

    LipschitzTrial& best = rep.trials[i];
    best.index = i;
    best.seed = derive_seed(cfg.seed, i);
    best.p = p.value();
    best.dim = dim;
    best.f_id = f.label();
    best.sigma = f.support_radius().value_or(std::numeric_limits<double>::quiet_NaN());
    best.besov_norm_upper = norms[fi];

    auto setup = detail::make_setup(cfg, dim, p, best.seed);
    detail::evaluate_trial(best, f, setup, p, cfg.path);
    std::mt19937_64 rng(derive_seed(best.seed, 4));
    for (int step = 0; step < cfg.steps; ++step) {
      auto cand = setup;
      auto nudge = [&](Matrix& d) {
        const double target = schatten_norm(d, p);
        if (target == 0.0) return;
        Matrix g = detail::gue_sample(dim, rng);
        d += cfg.step_size * target / schatten_norm(g, p) * g;
        d *= target / schatten_norm(d, p);
      };
      nudge(cand.da);
      nudge(cand.db);
      LipschitzTrial trial = best;
      detail::evaluate_trial(trial, f, cand, p, cfg.path);
      if (!trial.skipped && trial.ratio > best.ratio) {
        best = trial;
        setup = std::move(cand);
      }
    }
  });
  detail::summarize(rep);
  return rep;
}

}  // namespace opint
