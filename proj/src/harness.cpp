#include "mirrorvi/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include "mirrorvi/errors.hpp"
#include "mirrorvi/trace_io.hpp"

namespace mirrorvi {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError(where + ": " + msg);
}

template <class T>
T get_number(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0)) {
      fail(where + "." + key, "expected a non-negative integer");
    }
  }
  return v.get<T>();
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if constexpr (std::is_same_v<T, bool>) {
    if (!j.at(key).is_boolean()) fail(where + "." + key, "expected a boolean");
    return j.at(key).get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.at(key).is_string()) fail(where + "." + key, "expected a string");
    return j.at(key).get<std::string>();
  } else {
    return get_number<T>(j, key, where);
  }
}

Vector parse_vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(where + "[" + std::to_string(i) + "]", "expected a number");
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) fail(where, "expected an array of rows");
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j[0].size());
  Matrix M(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Vector row = parse_vector(j[static_cast<std::size_t>(r)], where + "[" + std::to_string(r) + "]");
    if (row.size() != cols) fail(where, "ragged matrix");
    M.row(r) = row.transpose();
  }
  return M;
}

// Bounds given either as a scalar (needs n) or as an array.
Vector parse_bound(const json& j, const std::string& key, std::optional<Index> n,
                   const std::string& where) {
  const json& v = j.at(key);
  if (v.is_number()) {
    if (!n) fail(where + "." + key, "scalar bound needs \"n\"");
    return Vector::Constant(*n, v.get<double>());
  }
  return parse_vector(v, where + "." + key);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(where + "." + key, "unknown key");
  }
}

std::string join_path(const std::string& path, const std::string& suffix) {
  return path.empty() ? path : path + suffix;
}

}  // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Adaptive:
      return "adaptive";
    case SolverKind::AdaptiveInexact:
      return "adaptive_inexact";
    case SolverKind::Fixed:
      return "fixed";
  }
  return "unknown";
}

FeasibleSet parse_set(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type")) fail(where, "set needs a \"type\"");
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "simplex") {
      check_keys(j, {"type", "n"}, where);
      return FeasibleSet::simplex(get_number<Index>(j, "n", where));
    }
    if (type == "box") {
      check_keys(j, {"type", "n", "lower", "upper"}, where);
      std::optional<Index> n;
      if (j.contains("n")) n = get_number<Index>(j, "n", where);
      return FeasibleSet::box(parse_bound(j, "lower", n, where), parse_bound(j, "upper", n, where));
    }
    if (type == "ball") {
      check_keys(j, {"type", "n", "center", "radius"}, where);
      Vector center = j.contains("center") ? parse_vector(j.at("center"), where + ".center")
                                           : Vector::Zero(get_number<Index>(j, "n", where));
      return FeasibleSet::ball(std::move(center), get_number<double>(j, "radius", where));
    }
    if (type == "product") {
      check_keys(j, {"type", "factors"}, where);
      std::vector<FeasibleSet> factors;
      const json& fs = j.at("factors");
      if (!fs.is_array()) fail(where + ".factors", "expected an array");
      for (std::size_t i = 0; i < fs.size(); ++i) {
        factors.push_back(parse_set(fs[i], where + ".factors[" + std::to_string(i) + "]"));
      }
      return FeasibleSet::product(std::move(factors));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  fail(where + ".type", "unknown set type '" + type + "'");
}

namespace {

InstanceSpec parse_instance(const json& j, const std::string& where) {
  InstanceSpec spec;
  if (!j.is_object() || !j.contains("family")) fail(where, "instance needs a \"family\"");
  spec.family = j.at("family").get<std::string>();
  spec.seed = get_or<std::uint64_t>(j, "seed", 0, where);
  if (spec.family == "bilinear") {
    check_keys(j, {"family", "seed", "m", "n", "entry_scale", "matrix"}, where);
    if (j.contains("matrix")) {
      spec.matrix = parse_matrix(j.at("matrix"), where + ".matrix");
    } else {
      spec.m = get_number<Index>(j, "m", where);
      spec.n = get_number<Index>(j, "n", where);
      spec.entry_scale = get_or<double>(j, "entry_scale", 1.0, where);
    }
  } else if (spec.family == "affine") {
    check_keys(j, {"family", "seed", "n", "M", "b", "set", "geometry"}, where);
    if (j.contains("M")) spec.M = parse_matrix(j.at("M"), where + ".M");
    if (j.contains("b")) spec.b = parse_vector(j.at("b"), where + ".b");
    spec.n = j.contains("n") ? get_number<Index>(j, "n", where) : (spec.M ? spec.M->rows() : 0);
    if (!j.contains("set")) fail(where, "affine instance needs a \"set\"");
    spec.set = parse_set(j.at("set"), where + ".set");
    spec.geometry = get_or<std::string>(j, "geometry", "euclidean", where);
  } else if (spec.family == "holder") {
    check_keys(j, {"family", "seed", "n", "nu", "set", "center"}, where);
    spec.n = get_number<Index>(j, "n", where);
    spec.nu = get_number<double>(j, "nu", where);
    spec.set = j.contains("set") ? parse_set(j.at("set"), where + ".set")
                                 : FeasibleSet::box(spec.n, 0.0, 1.0);
    if (j.contains("center")) spec.center = parse_vector(j.at("center"), where + ".center");
  } else {
    fail(where + ".family", "unknown family '" + spec.family + "'");
  }
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const json& j, const std::string& source) {
  const std::string where = source;
  check_keys(j,
             {"schema_version", "instance", "solver", "epsilon", "L0", "L0_seed", "L0_times_known_L",
              "max_outer", "max_backtracks_per_iter", "L_floor", "record_trace", "certificate_probes",
              "probe_seed", "delta_u", "noise_seed", "L_fixed", "fixed_iterations", "repetitions",
              "output"},
             where);
  ExperimentConfig cfg;
  cfg.source = source;
  cfg.schema_version = get_or<int>(j, "schema_version", -1, where);
  if (cfg.schema_version != kConfigSchemaVersion) {
    fail(where + ".schema_version", "expected " + std::to_string(kConfigSchemaVersion));
  }
  if (!j.contains("instance")) fail(where, "missing \"instance\"");
  cfg.instance = parse_instance(j.at("instance"), where + ".instance");

  const std::string solver = get_or<std::string>(j, "solver", "adaptive", where);
  if (solver == "adaptive") {
    cfg.solver = SolverKind::Adaptive;
  } else if (solver == "adaptive_inexact") {
    cfg.solver = SolverKind::AdaptiveInexact;
  } else if (solver == "fixed") {
    cfg.solver = SolverKind::Fixed;
  } else {
    fail(where + ".solver", "unknown solver '" + solver + "'");
  }

  SolverConfig& sc = cfg.solver_config;
  sc.epsilon = get_or<double>(j, "epsilon", sc.epsilon, where);
  if (j.contains("L0")) {
    const json& v = j.at("L0");
    if (v.is_string() && v.get<std::string>() == "auto") {
      sc.L0.reset();
    } else if (v.is_number()) {
      sc.L0 = v.get<double>();
    } else {
      fail(where + ".L0", "expected \"auto\" or a number");
    }
  }
  sc.L0_seed = get_or<std::uint64_t>(j, "L0_seed", sc.L0_seed, where);
  if (j.contains("L0_times_known_L")) cfg.L0_times_known_L = get_number<double>(j, "L0_times_known_L", where);
  sc.max_outer = get_or<std::size_t>(j, "max_outer", sc.max_outer, where);
  sc.max_backtracks_per_iter = get_or<int>(j, "max_backtracks_per_iter", sc.max_backtracks_per_iter, where);
  sc.L_floor = get_or<double>(j, "L_floor", sc.L_floor, where);
  sc.record_trace = get_or<bool>(j, "record_trace", sc.record_trace, where);
  sc.certificate_probes = get_or<std::size_t>(j, "certificate_probes", sc.certificate_probes, where);
  sc.probe_seed = get_or<std::uint64_t>(j, "probe_seed", sc.probe_seed, where);
  try {
    sc.validate();
  } catch (const std::exception& e) {
    fail(where, e.what());
  }

  cfg.delta_u = get_or<double>(j, "delta_u", 0.0, where);
  if (!(cfg.delta_u >= 0.0)) fail(where + ".delta_u", "must be >= 0");
  cfg.noise_seed = get_or<std::uint64_t>(j, "noise_seed", 0, where);
  if (j.contains("L_fixed")) {
    const json& v = j.at("L_fixed");
    if (v.is_number()) {
      cfg.L_fixed = v.get<double>();
    } else if (!(v.is_string() && v.get<std::string>() == "known")) {
      fail(where + ".L_fixed", "expected \"known\" or a number");
    }
  }
  if (j.contains("fixed_iterations")) {
    const json& v = j.at("fixed_iterations");
    if (v.is_number_integer()) {
      cfg.fixed_iterations = v.get<std::size_t>();
    } else if (!(v.is_string() && v.get<std::string>() == "bound")) {
      fail(where + ".fixed_iterations", "expected \"bound\" or an integer");
    }
  }
  cfg.repetitions = get_or<std::size_t>(j, "repetitions", 1, where);
  if (cfg.repetitions < 1) fail(where + ".repetitions", "must be >= 1");
  if (j.contains("output")) {
    const json& out = j.at("output");
    check_keys(out, {"trace", "iterates", "summary"}, where + ".output");
    cfg.trace_path = get_or<std::string>(out, "trace", "", where + ".output");
    cfg.iterates_path = get_or<std::string>(out, "iterates", "", where + ".output");
    cfg.summary_path = get_or<std::string>(out, "summary", "", where + ".output");
  }
  return cfg;
}

json load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) { return parse_config(load_config_json(path), path); }

ProblemInstance build_instance(const InstanceSpec& spec) {
  if (spec.family == "bilinear") {
    if (spec.matrix) return make_bilinear_saddle(*spec.matrix, spec.seed);
    return make_bilinear_saddle(spec.m, spec.n, spec.entry_scale, spec.seed);
  }
  if (spec.family == "affine") {
    const Index n = spec.n;
    Matrix M;
    Vector b;
    if (spec.M) {
      M = *spec.M;
    } else {
      // Random monotone operator: PSD part plus skew part.
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      Matrix B(n, n), C(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k) B(i, k) = unif(rng);
      for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k) C(i, k) = unif(rng);
      M = B.transpose() * B / static_cast<double>(n) + 0.5 * (C - C.transpose());
    }
    if (spec.b) {
      b = *spec.b;
    } else {
      std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      b.resize(M.rows());
      for (Index i = 0; i < b.size(); ++i) b[i] = unif(rng);
    }
    ProxSetup setup = ProxSetup::euclidean(*spec.set);
    if (spec.geometry == "entropy") {
      const auto* s = std::get_if<Simplex>(&spec.set->variant());
      if (!s) throw ConfigError("affine instance: entropy geometry needs a simplex set");
      setup = ProxSetup::entropy(s->n);
    } else if (spec.geometry != "euclidean") {
      throw ConfigError("affine instance: unknown geometry '" + spec.geometry + "'");
    }
    ProblemInstance inst = make_affine_vi(M, b, setup);
    inst.rng_seed = spec.seed;
    return inst;
  }
  if (spec.family == "holder") {
    ProblemInstance inst = make_holder_field(spec.n, spec.nu, *spec.set, spec.center);
    inst.rng_seed = spec.seed;
    return inst;
  }
  throw ConfigError("unknown instance family '" + spec.family + "'");
}

TheoreticalBound theoretical_bound(const ExperimentConfig& config, const ProblemInstance& inst) {
  TheoreticalBound out;
  out.R_sq = prox_radius_sq(inst.setup);
  const double eps = config.solver_config.epsilon;
  const double factor = config.solver == SolverKind::AdaptiveInexact ? 2.0 : 1.0;
  if (inst.known_L) {
    out.L = *inst.known_L;
    out.N = lipschitz_iteration_bound(factor * *out.L, out.R_sq, eps);
    return out;
  }
  bool finite = false;
  for (const HolderParam& p : inst.oracle.holder) finite = finite || std::isfinite(p.constant);
  if (finite) {
    const HolderBound hb = holder_iteration_bound(inst.oracle.holder, std::sqrt(out.R_sq), eps);
    out.L = hb.two_L_effective / 2.0;
    out.N = factor == 1.0 ? hb.N : lipschitz_iteration_bound(factor * *out.L, out.R_sq, eps);
  }
  return out;
}

json to_json(const RunSummary& s) {
  json j;
  j["instance"] = s.instance;
  j["solver"] = s.solver;
  j["status"] = to_string(s.status);
  j["N"] = s.N;
  j["S_N"] = s.S_N;
  j["total_oracle_calls"] = s.total_oracle_calls;
  j["l0_oracle_calls"] = s.l0_oracle_calls;
  j["total_prox_calls"] = s.total_prox_calls;
  j["max_accepted_L"] = s.max_accepted_L;
  j["min_accepted_L"] = s.min_accepted_L;
  j["weighted_gap"] = s.weighted_gap;
  j["weak_gap_at_probes"] = s.weak_gap_at_probes;
  j["saddle_gap"] = s.saddle_gap ? json(*s.saddle_gap) : json(nullptr);
  j["certificate_lhs_max"] = s.certificate_lhs_max;
  j["wall_time"] = s.wall_time;
  j["theoretical_N_bound"] = s.theoretical_N_bound ? json(*s.theoretical_N_bound) : json(nullptr);
  j["epsilon"] = s.epsilon;
  j["delta_u"] = s.delta_u;
  j["L0_used"] = s.L0_used;
  j["known_L"] = s.known_L ? json(*s.known_L) : json(nullptr);
  j["R_sq"] = s.R_sq;
  j["R_sq_pairwise"] = std::isfinite(s.R_sq_pairwise) ? json(s.R_sq_pairwise) : json("inf");
  return j;
}

ExperimentRun run_experiment_full(const ExperimentConfig& config, const std::string& path_suffix) {
  ProblemInstance inst = [&] {
    try {
      return build_instance(config.instance);
    } catch (const std::exception& e) {
      throw ConfigError(config.source + ": instance: " + e.what());
    }
  }();

  SolverConfig sc = config.solver_config;
  if (config.L0_times_known_L) {
    if (!inst.known_L) throw ConfigError(config.source + ": L0_times_known_L: instance has no known_L");
    sc.L0 = *config.L0_times_known_L * *inst.known_L;
  }
  const TheoreticalBound bound = theoretical_bound(config, inst);

  ExperimentRun run;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (config.solver) {
      case SolverKind::Adaptive:
        run.result = adaptive_mirror_prox(inst.oracle, inst.setup, sc);
        break;
      case SolverKind::AdaptiveInexact: {
        InexactOracle noisy(inst.oracle, inst.setup, config.delta_u, config.noise_seed,
                            sc.epsilon / 2.0);
        run.result = inexact_adaptive_mirror_prox(noisy, inst.setup, sc);
        break;
      }
      case SolverKind::Fixed: {
        const std::optional<double> L = config.L_fixed ? config.L_fixed : inst.known_L;
        if (!L) throw ConfigError("L_fixed: \"known\" requested but the instance has no known_L");
        std::size_t N = 0;
        if (config.fixed_iterations) {
          N = *config.fixed_iterations;
        } else if (bound.N) {
          N = *bound.N;
        } else {
          throw ConfigError("fixed_iterations: \"bound\" requested but no bound is available");
        }
        run.result = fixed_mirror_prox(inst.oracle, inst.setup, *L, N, sc.record_trace);
        break;
      }
    }
  } catch (const ConfigError& e) {
    throw ConfigError(config.source + ": solver: " + e.what());
  } catch (const std::exception& e) {
    throw Error(config.source + ": solver " + to_string(config.solver) + ": " + e.what());
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const SolveResult& r = run.result;
  RunSummary& s = run.summary;
  s.instance = inst.name;
  s.solver = to_string(config.solver);
  s.status = r.status;
  s.N = r.N;
  s.S_N = r.S_N;
  s.total_oracle_calls = r.oracle_calls;
  s.l0_oracle_calls = r.l0_oracle_calls;
  s.total_prox_calls = r.prox_calls;
  s.max_accepted_L = r.max_accepted_L;
  s.min_accepted_L = r.min_accepted_L;
  s.certificate_lhs_max = r.certificate_lhs_max;
  s.wall_time = wall;
  s.theoretical_N_bound = bound.N;
  s.epsilon = sc.epsilon;
  s.delta_u = config.solver == SolverKind::AdaptiveInexact ? config.delta_u : 0.0;
  s.L0_used = r.L0_used;
  s.known_L = inst.known_L;
  s.R_sq = r.R_sq_used;
  s.R_sq_pairwise = r.R_sq_pairwise;
  if (r.N > 0) {
    const GapReport gaps = certify_gap(r, inst);
    s.weighted_gap = gaps.weighted_gap;
    s.weak_gap_at_probes = gaps.weak_gap_at_probes;
    s.saddle_gap = gaps.saddle_gap;
  }

  if (!config.trace_path.empty()) write_trace_file(join_path(config.trace_path, path_suffix), r);
  if (!config.iterates_path.empty() && sc.record_trace) {
    write_iterates_file(join_path(config.iterates_path, path_suffix), r);
  }
  if (!config.summary_path.empty()) {
    const std::string path = join_path(config.summary_path, path_suffix);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open summary file for writing: " + path);
    out << to_json(s).dump(2) << '\n';
  }
  return run;
}

RunSummary run_experiment(const ExperimentConfig& config) { return run_experiment_full(config).summary; }

std::vector<RunSummary> run_repetitions(const ExperimentConfig& config) {
  if (config.repetitions == 1) return {run_experiment(config)};
  std::vector<std::future<RunSummary>> jobs;
  for (std::size_t i = 0; i < config.repetitions; ++i) {
    jobs.push_back(std::async(std::launch::async, [&config, i] {
      return run_experiment_full(config, ".rep" + std::to_string(i)).summary;
    }));
  }
  std::vector<RunSummary> out;
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

Variant parse_variant(const std::string& token) {
  Variant v;
  v.label = token;
  const auto colon = token.find(':');
  v.overrides = json::object();
  v.overrides["solver"] = token.substr(0, colon);
  if (colon == std::string::npos) return v;
  std::stringstream ss(token.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("variant '" + token + "': expected key=value");
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    v.overrides[key] = value.is_discarded() ? json(raw) : value;
  }
  return v;
}

std::vector<ComparisonRow> compare_solvers(const json& base_config, const std::vector<Variant>& variants,
                                           const std::string& source) {
  if (variants.size() < 2) throw ConfigError("compare_solvers: need at least two variants");
  std::vector<ExperimentConfig> configs;
  for (const Variant& v : variants) {
    json cfg = base_config;
    for (const auto& [key, value] : v.overrides.items()) cfg[key] = value;
    configs.push_back(parse_config(cfg, source + " [" + v.label + "]"));
  }
  std::vector<std::future<RunSummary>> jobs;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&configs, i] {
      return run_experiment_full(configs[i], ".v" + std::to_string(i)).summary;
    }));
  }
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < jobs.size(); ++i) rows.push_back({variants[i].label, jobs[i].get()});
  return rows;
}

std::string comparison_table(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "label,solver,status,N,oracle_calls,prox_calls,max_L,min_L,weighted_gap,saddle_gap,"
         "theoretical_N_bound\n";
  for (const ComparisonRow& row : rows) {
    const RunSummary& s = row.summary;
    out << '"' << row.label << "\"," << s.solver << ',' << to_string(s.status) << ',' << s.N << ','
        << s.total_oracle_calls << ',' << s.total_prox_calls << ',' << format_double(s.max_accepted_L)
        << ',' << format_double(s.min_accepted_L) << ',' << format_double(s.weighted_gap) << ','
        << (s.saddle_gap ? format_double(*s.saddle_gap) : std::string()) << ','
        << (s.theoretical_N_bound ? std::to_string(*s.theoretical_N_bound) : std::string()) << '\n';
  }
  return out.str();
}

}  // namespace mirrorvi
