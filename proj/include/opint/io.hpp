#pragma once

// JSON/CSV documents: matrix exchange, catalog specs, experiment configs and
// reports. Doubles are written with 17 significant digits (CSV) or the
// shortest round-trip form (JSON), so re-reading reproduces them exactly.

#include "opint/besov.hpp"
#include "opint/function.hpp"
#include "opint/perturbation.hpp"
#include "opint/spectral.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace opint::io {

using json = nlohmann::json;

inline std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no infinities or NaN: ∞ is "inf", NaN is null.
inline json real_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  if (std::isnan(v)) return json(nullptr);
  return json(v);
}

inline double real_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity" || s == "infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ValidationError("field '" + field + "': expected a number");
}

template <class T>
T required(const json& j, const std::string& field) {
  if (!j.contains(field)) throw ValidationError("missing field '" + field + "'");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("field '" + field + "' has the wrong type");
  }
}

template <class T>
T optional_field(const json& j, const std::string& field, T fallback) {
  if (!j.contains(field) || j.at(field).is_null()) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("field '" + field + "' has the wrong type");
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Matrix exchange: {dim, entries: row-major [[re, im], ...]}

inline json matrix_to_json(const Matrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("matrix document: only square matrices are exchanged");
  json entries = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back({m(r, c).real(), m(r, c).imag()});
  return {{"dim", m.rows()}, {"entries", entries}};
}

inline Matrix matrix_from_json(const json& j) {
  const auto dim = required<long long>(j, "dim");
  if (dim < 1) throw ValidationError("field 'dim' must be >= 1");
  if (!j.contains("entries") || !j.at("entries").is_array())
    throw ValidationError("field 'entries' must be an array");
  const auto& e = j.at("entries");
  if (static_cast<long long>(e.size()) != dim * dim) {
    std::ostringstream os;
    os << "field 'entries': expected " << dim * dim << " [re, im] pairs, got " << e.size();
    throw ValidationError(os.str());
  }
  Matrix m(dim, dim);
  for (long long i = 0; i < dim * dim; ++i) {
    const auto& pair = e[i];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      std::ostringstream os;
      os << "field 'entries'[" << i << "]: expected [re, im]";
      throw ValidationError(os.str());
    }
    m(i / dim, i % dim) = Complex(pair[0].get<double>(), pair[1].get<double>());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Catalog specification: a compact string, or
// {type, modes: [{a, b, re, im}], lambda, children, a, b, re, im}.

inline FunctionR2 function_from_json(const json& j) {
  if (j.is_string()) return parse_function_spec(j.get<std::string>());
  if (!j.is_object()) throw ValidationError("function spec: expected a string or an object");
  const auto type = required<std::string>(j, "type");

  auto children = [&]() {
    std::vector<FunctionR2> out;
    if (!j.contains("children") || !j.at("children").is_array())
      throw ValidationError("function spec '" + type + "': field 'children' must be an array");
    for (const auto& c : j.at("children")) out.push_back(function_from_json(c));
    return out;
  };
  auto only_child = [&]() {
    auto c = children();
    if (c.size() != 1) throw ValidationError("function spec '" + type + "': expects exactly one child");
    return c.front();
  };
  auto modes = [&]() {
    std::vector<FourierMode> out;
    if (!j.contains("modes")) return out;
    if (!j.at("modes").is_array()) throw ValidationError("function spec: field 'modes' must be an array");
    for (const auto& m : j.at("modes"))
      out.push_back({required<double>(m, "a"), required<double>(m, "b"),
                     {optional_field<double>(m, "re", 1.0), optional_field<double>(m, "im", 0.0)}});
    return out;
  };

  if (type == "plane_wave") {
    if (j.contains("modes")) return catalog::trig_poly(modes());
    return catalog::plane_wave(required<double>(j, "a"), required<double>(j, "b"));
  }
  if (type == "trig_poly") return catalog::trig_poly(modes());
  if (type == "mode")
    return catalog::mode(required<double>(j, "a"), required<double>(j, "b"),
                         {optional_field<double>(j, "re", 1.0), optional_field<double>(j, "im", 0.0)});
  if (type == "const")
    return catalog::constant({required<double>(j, "re"), optional_field<double>(j, "im", 0.0)});
  if (type == "zero") return catalog::zero();
  if (type == "x") return catalog::coordinate_x();
  if (type == "y") return catalog::coordinate_y();
  if (type == "x2") return catalog::square_x();
  if (type == "y2") return catalog::square_y();
  if (type == "sum") return catalog::sum(children());
  if (type == "scale")
    return catalog::scale(only_child(), {optional_field<double>(j, "re", 1.0), optional_field<double>(j, "im", 0.0)});
  if (type == "dilate") return catalog::dilate(only_child(), required<double>(j, "lambda"));
  if (type == "sharp") return f_sharp(only_child());
  throw ValidationError("function spec: unknown type '" + type + "'");
}

inline std::vector<FunctionR2> functions_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("field 'functions' must be an array");
  std::vector<FunctionR2> out;
  for (const auto& f : j) out.push_back(function_from_json(f));
  return out;
}

// Default catalog: one trigonometric polynomial per σ ∈ {1, 2, 4, 8}.
inline std::vector<FunctionR2> default_functions() {
  std::vector<FunctionR2> out;
  for (double s : {1.0, 2.0, 4.0, 8.0}) {
    out.push_back(catalog::trig_poly({{s, 0.0, {0.5, 0.0}},
                                      {0.0, s, {0.0, 0.3}},
                                      {0.6 * s, -0.8 * s, {0.2, 0.0}},
                                      {0.25 * s, 0.5 * s, {-0.1, 0.1}}}));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config documents

inline std::vector<SchattenIndex> ps_from_json(const json& j) {
  std::vector<SchattenIndex> out;
  auto one = [&](const json& v) { out.emplace_back(real_from_json(v, "p")); };
  if (j.is_array()) {
    for (const auto& v : j) one(v);
  } else {
    one(j);
  }
  if (out.empty()) throw ValidationError("field 'p' must not be empty");
  return out;
}

inline std::vector<int> dims_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("field 'dims' must be an array");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<int>() < 1)
      throw ValidationError("field 'dims': entries must be integers >= 1");
    out.push_back(v.get<int>());
  }
  return out;
}

// {kind: gue|spread, radius, min_gap}; min_gap is relative to the nominal
// spectral range (4 for gue, 2 * radius for spread).
inline void ensemble_from_json(const json& j, Ensemble& ens, double& min_gap_rel) {
  if (!j.is_object()) throw ValidationError("field 'ensemble' must be an object");
  const auto kind = optional_field<std::string>(j, "kind", "gue");
  if (kind == "gue") {
    ens = Ensemble::gue();
  } else if (kind == "spread" || kind == "spread-spectrum") {
    const double r = optional_field<double>(j, "radius", 1.0);
    if (!(r > 0)) throw ValidationError("field 'ensemble.radius' must be > 0");
    ens = Ensemble::spread(r);
  } else {
    throw ValidationError("field 'ensemble.kind': unknown ensemble '" + kind + "'");
  }
  min_gap_rel = optional_field<double>(j, "min_gap", min_gap_rel);
  if (!(min_gap_rel >= 0)) throw ValidationError("field 'ensemble.min_gap' must be >= 0");
}

inline json ensemble_to_json(const Ensemble& e, double min_gap_rel) {
  json j{{"kind", e.name()}, {"min_gap", min_gap_rel}};
  if (e.kind == Ensemble::Kind::spread) j["radius"] = e.radius;
  return j;
}

inline std::uint64_t seed_from_json(const json& j) {
  if (!j.contains("seed")) return 0;
  if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0)
    throw ValidationError("field 'seed' must be a nonnegative integer");
  return j.at("seed").get<std::uint64_t>();
}

inline json functions_to_json(const std::vector<FunctionR2>& fs) {
  json out = json::array();
  for (const auto& f : fs) out.push_back(f.label());
  return out;
}

inline IdentityKind identity_kind_from_string(const std::string& s) {
  if (s == "first") return IdentityKind::first;
  if (s == "second") return IdentityKind::second;
  if (s == "full") return IdentityKind::full;
  throw ValidationError("field 'kind': expected first|second|full|all, got '" + s + "'");
}

inline IdentitySuiteConfig identity_config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("identity config must be a JSON object");
  IdentitySuiteConfig cfg;
  if (j.contains("dims")) cfg.dims = dims_from_json(j.at("dims"));
  cfg.trials = optional_field<int>(j, "trials", cfg.trials);
  if (cfg.trials < 1) throw ValidationError("field 'trials' must be >= 1");
  cfg.seed = seed_from_json(j);
  cfg.functions = j.contains("functions") ? functions_from_json(j.at("functions")) : default_functions();
  if (j.contains("kind")) {
    const auto& k = j.at("kind");
    cfg.kinds.clear();
    if (k.is_string() && k.get<std::string>() == "all") {
      cfg.kinds = {IdentityKind::first, IdentityKind::second, IdentityKind::full};
    } else if (k.is_string()) {
      cfg.kinds.push_back(identity_kind_from_string(k.get<std::string>()));
    } else if (k.is_array()) {
      for (const auto& v : k) cfg.kinds.push_back(identity_kind_from_string(v.get<std::string>()));
    } else {
      throw ValidationError("field 'kind' must be a string or an array");
    }
  }
  if (j.contains("ensemble")) ensemble_from_json(j.at("ensemble"), cfg.policy.ensemble, cfg.policy.min_gap_rel);
  cfg.policy.perturbation = optional_field<double>(j, "perturbation", cfg.policy.perturbation);
  if (!(cfg.policy.perturbation > 0)) throw ValidationError("field 'perturbation' must be > 0");
  cfg.policy.cross_gap_rel = optional_field<double>(j, "cross_gap", cfg.policy.cross_gap_rel);
  cfg.policy.stress_collisions = optional_field<bool>(j, "stress", false);
  return cfg;
}

inline json identity_config_to_json(const IdentitySuiteConfig& cfg) {
  json kinds = json::array();
  for (auto k : cfg.kinds) kinds.push_back(to_string(k));
  return {{"mode", "identity"},
          {"dims", cfg.dims},
          {"trials", cfg.trials},
          {"seed", cfg.seed},
          {"kind", kinds},
          {"functions", functions_to_json(cfg.functions)},
          {"ensemble", ensemble_to_json(cfg.policy.ensemble, cfg.policy.min_gap_rel)},
          {"perturbation", cfg.policy.perturbation},
          {"cross_gap", cfg.policy.cross_gap_rel},
          {"stress", cfg.policy.stress_collisions}};
}

inline Normalizer normalizer_from_string(const std::string& s) {
  if (s == "besov") return Normalizer::besov;
  if (s == "sigma_sup") return Normalizer::sigma_sup;
  if (s == "none") return Normalizer::none;
  throw ValidationError("field 'normalizer': expected besov|sigma_sup|none, got '" + s + "'");
}

inline LipschitzConfig lipschitz_config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("experiment config must be a JSON object");
  LipschitzConfig cfg;
  if (j.contains("p")) cfg.ps = ps_from_json(j.at("p"));
  if (j.contains("dims")) cfg.dims = dims_from_json(j.at("dims"));
  cfg.trials = optional_field<int>(j, "trials", cfg.trials);
  if (cfg.trials < 1) throw ValidationError("field 'trials' must be >= 1");
  cfg.seed = seed_from_json(j);
  if (j.contains("ensemble")) ensemble_from_json(j.at("ensemble"), cfg.ensemble, cfg.min_gap_rel);
  cfg.functions = j.contains("functions") ? functions_from_json(j.at("functions")) : default_functions();
  cfg.perturbation = optional_field<double>(j, "perturbation", cfg.perturbation);
  if (!(cfg.perturbation >= 0)) throw ValidationError("field 'perturbation' must be >= 0");
  cfg.normalizer = normalizer_from_string(optional_field<std::string>(j, "normalizer", "besov"));
  const auto path = optional_field<std::string>(j, "evaluation", "direct");
  if (path == "direct") cfg.path = EvaluationPath::direct;
  else if (path == "sharp") cfg.path = EvaluationPath::sharp;
  else throw ValidationError("field 'evaluation': expected direct|sharp, got '" + path + "'");
  const auto sides = optional_field<std::string>(j, "sides", "both");
  if (sides == "both") cfg.sides = PerturbSides::both;
  else if (sides == "first") cfg.sides = PerturbSides::first;
  else if (sides == "second") cfg.sides = PerturbSides::second;
  else throw ValidationError("field 'sides': expected both|first|second, got '" + sides + "'");
  cfg.restarts = optional_field<int>(j, "restarts", cfg.restarts);
  cfg.steps = optional_field<int>(j, "steps", cfg.steps);
  cfg.step_size = optional_field<double>(j, "step_size", cfg.step_size);
  cfg.growth_threshold = optional_field<double>(j, "growth_threshold", cfg.growth_threshold);
  return cfg;
}

inline json lipschitz_config_to_json(const LipschitzConfig& cfg, const std::string& mode) {
  json ps = json::array();
  for (const auto& p : cfg.ps) ps.push_back(real_to_json(p.value()));
  json j{{"mode", mode},
         {"p", ps},
         {"dims", cfg.dims},
         {"trials", cfg.trials},
         {"seed", cfg.seed},
         {"ensemble", ensemble_to_json(cfg.ensemble, cfg.min_gap_rel)},
         {"functions", functions_to_json(cfg.functions)},
         {"perturbation", cfg.perturbation},
         {"normalizer", to_string(cfg.normalizer)},
         {"evaluation", to_string(cfg.path)},
         {"sides", to_string(cfg.sides)}};
  if (mode == "scan") {
    j["restarts"] = cfg.restarts;
    j["steps"] = cfg.steps;
    j["step_size"] = cfg.step_size;
    j["growth_threshold"] = cfg.growth_threshold;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Identity reports

inline json identity_report_to_json(const IdentitySuiteReport& rep, const IdentitySuiteConfig& cfg) {
  json rows = json::array();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    rows.push_back({{"index", i},
                    {"seed", r.seed},
                    {"dim", r.dim},
                    {"kind", to_string(r.kind)},
                    {"f_id", r.f_id},
                    {"lhs_norm", r.lhs_norm},
                    {"rhs_norm", r.rhs_norm},
                    {"residual_norm", r.residual_norm},
                    {"relative_residual", r.relative_residual}});
  }
  return {{"config", identity_config_to_json(cfg)},
          {"rows", rows},
          {"max_relative_residual", rep.max_relative_residual}};
}

inline std::string identity_report_to_csv(const IdentitySuiteReport& rep) {
  std::ostringstream os;
  os << "index,seed,dim,kind,f_id,lhs_norm,rhs_norm,residual_norm,relative_residual\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    os << i << ',' << r.seed << ',' << r.dim << ',' << to_string(r.kind) << ",\"" << r.f_id << "\","
       << num(r.lhs_norm) << ',' << num(r.rhs_norm) << ',' << num(r.residual_norm) << ','
       << num(r.relative_residual) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Experiment reports

inline json experiment_report_to_json(const ExperimentReport& rep) {
  json trials = json::array();
  for (const auto& t : rep.trials)
    trials.push_back({{"index", t.index},
                      {"seed", t.seed},
                      {"p", real_to_json(t.p)},
                      {"sigma", real_to_json(t.sigma)},
                      {"f_id", t.f_id},
                      {"dim", t.dim},
                      {"diff_norm", t.diff_norm},
                      {"pert_norm", t.pert_norm},
                      {"ratio", t.ratio},
                      {"besov_norm_upper", t.besov_norm_upper},
                      {"normalized", t.normalized},
                      {"skipped", t.skipped}});
  json summary = json::array();
  for (const auto& s : rep.summary)
    summary.push_back({{"index", s.index},
                       {"p", real_to_json(s.p)},
                       {"dim", s.dim},
                       {"max_ratio", s.max_ratio},
                       {"max_normalized", s.max_normalized},
                       {"count", s.count}});
  json trends = json::array();
  for (const auto& t : rep.trends)
    trends.push_back({{"p", real_to_json(t.p)},
                      {"growth_factor", real_to_json(t.growth_factor)},
                      {"spread", real_to_json(t.spread)},
                      {"loglog_slope", t.loglog_slope},
                      {"grows", t.grows}});
  return {{"mode", rep.mode},
          {"config", lipschitz_config_to_json(rep.config, rep.mode)},
          {"seed", rep.config.seed},
          {"empirical_constant", rep.empirical_constant},
          {"skipped", rep.skipped},
          {"trials", trials},
          {"summary", summary},
          {"trends", trends}};
}

inline ExperimentReport experiment_report_from_json(const json& j) {
  ExperimentReport rep;
  rep.mode = required<std::string>(j, "mode");
  if (!j.contains("config")) throw ValidationError("missing field 'config'");
  rep.config = lipschitz_config_from_json(j.at("config"));
  if (!j.contains("trials") || !j.at("trials").is_array()) throw ValidationError("field 'trials' must be an array");
  for (const auto& t : j.at("trials")) {
    LipschitzTrial tr;
    tr.index = required<std::size_t>(t, "index");
    tr.seed = required<std::uint64_t>(t, "seed");
    tr.p = real_from_json(t.at("p"), "p");
    tr.sigma = real_from_json(t.at("sigma"), "sigma");
    tr.f_id = required<std::string>(t, "f_id");
    tr.dim = required<int>(t, "dim");
    tr.diff_norm = required<double>(t, "diff_norm");
    tr.pert_norm = required<double>(t, "pert_norm");
    tr.ratio = required<double>(t, "ratio");
    tr.besov_norm_upper = required<double>(t, "besov_norm_upper");
    tr.normalized = required<double>(t, "normalized");
    tr.skipped = required<bool>(t, "skipped");
    rep.trials.push_back(std::move(tr));
  }
  summarize(rep);
  return rep;
}

inline std::string experiment_report_to_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "index,seed,dim,p,sigma,f_id,diff_norm,pert_norm,ratio,normalizer,normalized,skipped\n";
  for (const auto& t : rep.trials)
    os << t.index << ',' << t.seed << ',' << t.dim << ',' << num(t.p) << ',' << num(t.sigma) << ",\"" << t.f_id
       << "\"," << num(t.diff_norm) << ',' << num(t.pert_norm) << ',' << num(t.ratio) << ','
       << num(t.besov_norm_upper) << ',' << num(t.normalized) << ',' << (t.skipped ? 1 : 0) << '\n';
  return os.str();
}

struct PlotData {
  std::string series;   // p,dim,trial,ratio,normalized
  std::string summary;  // index,p,dim,max_ratio,max_normalized,count
};

inline PlotData emit_plot_data(const ExperimentReport& rep) {
  PlotData out;
  std::ostringstream series, summary;
  series << "p,dim,trial,ratio,normalized\n";
  // Trials of one (p, dim) pair are contiguous; the trial column restarts at 0 per pair.
  std::map<std::pair<double, int>, std::size_t> counter;
  for (const auto& t : rep.trials) {
    if (t.skipped) continue;
    const std::size_t k = counter[{t.p, t.dim}]++;
    series << num(t.p) << ',' << t.dim << ',' << k << ',' << num(t.ratio) << ',' << num(t.normalized) << '\n';
  }
  summary << "index,p,dim,max_ratio,max_normalized,count\n";
  for (const auto& s : rep.summary)
    summary << s.index << ',' << num(s.p) << ',' << s.dim << ',' << num(s.max_ratio) << ','
            << num(s.max_normalized) << ',' << s.count << '\n';
  out.series = series.str();
  out.summary = summary.str();
  return out;
}

// ---------------------------------------------------------------------------
// Besov reports

inline json besov_report_to_json(const BesovReport& rep) {
  auto rows = [](const std::vector<BesovBlockRow>& rs) {
    json out = json::array();
    for (const auto& r : rs)
      out.push_back({{"n", r.n},
                     {"lower", r.contribution.lower},
                     {"upper", r.contribution.upper},
                     {"sup_lower", r.sup_norm.lower},
                     {"sup_upper", r.sup_norm.upper}});
    return out;
  };
  json j{{"f_id", rep.f_id},
         {"inhomogeneous", {{"blocks", rows(rep.block_norms)},
                            {"lower", rep.inhomogeneous_norm.lower},
                            {"upper", rep.inhomogeneous_norm.upper}}}};
  if (rep.homogeneous_norm)
    j["homogeneous"] = {{"blocks", rows(rep.homogeneous_blocks)},
                        {"lower", rep.homogeneous_norm->lower},
                        {"upper", rep.homogeneous_norm->upper}};
  else
    j["homogeneous"] = nullptr;
  return j;
}

// One row per block: (flavor, n, lower, upper) with lower/upper the block's
// contribution 2^n * sup-norm, followed by the sup-norm interval itself.
inline std::string besov_report_to_csv(const BesovReport& rep) {
  std::ostringstream os;
  os << "flavor,n,lower,upper,sup_lower,sup_upper\n";
  auto emit = [&](const char* flavor, const std::vector<BesovBlockRow>& rs) {
    for (const auto& r : rs)
      os << flavor << ',' << r.n << ',' << num(r.contribution.lower) << ',' << num(r.contribution.upper) << ','
         << num(r.sup_norm.lower) << ',' << num(r.sup_norm.upper) << '\n';
  };
  emit("inhomogeneous", rep.block_norms);
  emit("homogeneous", rep.homogeneous_blocks);
  return os.str();
}

}  // namespace opint::io
