#include "fracwell/scenario.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fracwell/errors.hpp"
#include "fracwell/expr.hpp"
#include "fracwell/io.hpp"

namespace fracwell {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---- schema helpers --------------------------------------------------------

void expect_object(const json& j, const std::string& path, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(path + ": unknown key '" + key + "'");
}

// Number or constant expression ("1/3", "2*pi").
double number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const Expr e(v.get<std::string>());
    if (!e.is_constant()) throw ConfigError(path + ": expected a constant, got '" + e.text() + "'");
    return e(0.0, 0.0);
  }
  throw ConfigError(path + ": expected a number");
}

long integer(const json& v, const std::string& path) {
  const double d = number(v, path);
  if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError(path + ": expected an integer");
  return static_cast<long>(d);
}

// Expression field: strings pass through, numbers are printed exactly.
std::string expression(const json& v, const std::string& path) {
  if (v.is_string()) {
    Expr check(v.get<std::string>());  // parse errors surface as ConfigError
    return check.text();
  }
  if (v.is_number()) return format_double(v.get<double>());
  throw ConfigError(path + ": expected a number or an expression");
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path + ": expected true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

template <class F>
void with(const json& j, const char* key, F&& f) {
  if (j.contains(key)) f(j.at(key));
}

Interval interval(const json& v, const std::string& path) {
  const auto a = numbers(v, path);
  if (a.size() != 2 || !(a[0] < a[1])) throw ConfigError(path + ": expected [a, b] with a < b");
  return {a[0], a[1]};
}

KernelSpec parse_kernel(const json& j) {
  expect_object(j, "kernel", {"type", "p", "q", "a", "s"});
  KernelSpec k;
  with(j, "type", [&](auto& v) { k.type = text(v, "kernel.type"); });
  with(j, "p", [&](auto& v) { k.p = expression(v, "kernel.p"); });
  with(j, "q", [&](auto& v) { k.q = expression(v, "kernel.q"); });
  with(j, "a", [&](auto& v) { k.a = expression(v, "kernel.a"); });
  with(j, "s", [&](auto& v) { k.s = number(v, "kernel.s"); });
  return k;
}

SourceSpec parse_source(const json& j) {
  expect_object(j, "source", {"type", "q", "coeff", "a", "b", "q1", "q2"});
  SourceSpec s;
  with(j, "type", [&](auto& v) { s.type = text(v, "source.type"); });
  with(j, "q", [&](auto& v) { s.q = number(v, "source.q"); });
  with(j, "coeff", [&](auto& v) { s.coeff = expression(v, "source.coeff"); });
  with(j, "a", [&](auto& v) { s.a = expression(v, "source.a"); });
  with(j, "b", [&](auto& v) { s.b = expression(v, "source.b"); });
  with(j, "q1", [&](auto& v) { s.q1 = expression(v, "source.q1"); });
  with(j, "q2", [&](auto& v) { s.q2 = expression(v, "source.q2"); });
  return s;
}

Mesh1D parse_mesh(const json& j) {
  expect_object(j, "mesh", {"L", "M", "R", "near_diag_levels"});
  double L = 1.0, R = -1.0;
  long M = 64, levels = 6;
  with(j, "L", [&](auto& v) { L = number(v, "mesh.L"); });
  with(j, "M", [&](auto& v) { M = integer(v, "mesh.M"); });
  with(j, "R", [&](auto& v) { R = number(v, "mesh.R"); });
  with(j, "near_diag_levels", [&](auto& v) { levels = integer(v, "mesh.near_diag_levels"); });
  if (M < 4 || M > 4096) throw ConfigError("mesh.M must lie in [4, 4096]");
  Mesh1D m(L, static_cast<int>(M), R, static_cast<int>(levels));
  m.validate();
  return m;
}

Scheme parse_scheme(const std::string& s) {
  if (s == "implicit") return Scheme::ImplicitEulerNewton;
  if (s == "explicit") return Scheme::ExplicitAdaptive;
  throw ConfigError("integrator.scheme: expected 'implicit' or 'explicit', got '" + s + "'");
}

std::string scheme_name(Scheme s) {
  return s == Scheme::ImplicitEulerNewton ? "implicit" : "explicit";
}

IntegratorConfig parse_integrator(const json& j) {
  expect_object(j, "integrator",
                {"scheme", "dt0", "dt_min", "dt_max", "t_end", "newton_tol", "newton_max_iter",
                 "blowup_norm_threshold", "vanish_norm_threshold", "output_stride", "adaptive",
                 "max_rel_change", "rtol", "atol", "max_steps", "record_seminorm"});
  IntegratorConfig c;
  const std::string p = "integrator.";
  with(j, "scheme", [&](auto& v) { c.scheme = parse_scheme(text(v, p + "scheme")); });
  with(j, "dt0", [&](auto& v) { c.dt0 = number(v, p + "dt0"); });
  with(j, "dt_min", [&](auto& v) { c.dt_min = number(v, p + "dt_min"); });
  with(j, "dt_max", [&](auto& v) { c.dt_max = number(v, p + "dt_max"); });
  with(j, "t_end", [&](auto& v) { c.t_end = number(v, p + "t_end"); });
  with(j, "newton_tol", [&](auto& v) { c.newton_tol = number(v, p + "newton_tol"); });
  with(j, "newton_max_iter",
       [&](auto& v) { c.newton_max_iter = static_cast<int>(integer(v, p + "newton_max_iter")); });
  with(j, "blowup_norm_threshold",
       [&](auto& v) { c.blowup_norm_threshold = number(v, p + "blowup_norm_threshold"); });
  with(j, "vanish_norm_threshold",
       [&](auto& v) { c.vanish_norm_threshold = number(v, p + "vanish_norm_threshold"); });
  with(j, "output_stride",
       [&](auto& v) { c.output_stride = static_cast<int>(integer(v, p + "output_stride")); });
  with(j, "adaptive", [&](auto& v) { c.adaptive = boolean(v, p + "adaptive"); });
  with(j, "max_rel_change", [&](auto& v) { c.max_rel_change = number(v, p + "max_rel_change"); });
  with(j, "rtol", [&](auto& v) { c.rtol = number(v, p + "rtol"); });
  with(j, "atol", [&](auto& v) { c.atol = number(v, p + "atol"); });
  with(j, "max_steps", [&](auto& v) { c.max_steps = integer(v, p + "max_steps"); });
  with(j, "record_seminorm", [&](auto& v) { c.record_seminorm = boolean(v, p + "record_seminorm"); });
  c.validate();
  return c;
}

InitialSpec parse_initial(const json& j) {
  expect_object(j, "initial", {"type", "expr", "scale", "delta", "target", "target_factor",
                               "first", "second", "path"});
  InitialSpec i;
  with(j, "type", [&](auto& v) { i.type = text(v, "initial.type"); });
  with(j, "expr", [&](auto& v) { i.expr = expression(v, "initial.expr"); });
  with(j, "scale", [&](auto& v) { i.scale = number(v, "initial.scale"); });
  with(j, "delta", [&](auto& v) { i.delta = number(v, "initial.delta"); });
  with(j, "target", [&](auto& v) { i.target = number(v, "initial.target"); });
  with(j, "target_factor", [&](auto& v) { i.target_factor = number(v, "initial.target_factor"); });
  with(j, "first", [&](auto& v) { i.first = interval(v, "initial.first"); });
  with(j, "second", [&](auto& v) { i.second = interval(v, "initial.second"); });
  with(j, "path", [&](auto& v) { i.path = text(v, "initial.path"); });
  static const std::set<std::string> types{"expr", "fiber", "critical", "high_energy", "file"};
  if (!types.count(i.type)) throw ConfigError("initial.type: unknown type '" + i.type + "'");
  if (!(i.delta > 0.0)) throw ConfigError("initial.delta must be positive");
  if (i.type == "file" && i.path.empty()) throw ConfigError("initial.path required for type file");
  if (i.type == "high_energy" && !(i.target > 0.0) && !(i.target_factor > 1.0))
    throw ConfigError("initial: high_energy needs target > 0 or target_factor > 1");
  return i;
}

AnalysisSpec parse_analysis(const json& j) {
  expect_object(j, "analysis", {"n_directions", "embedding_samples", "delta_grid", "safety",
                                "classify", "delta_prime", "refine_depth"});
  AnalysisSpec a;
  with(j, "n_directions",
       [&](auto& v) { a.n_directions = static_cast<int>(integer(v, "analysis.n_directions")); });
  with(j, "embedding_samples", [&](auto& v) {
    a.embedding_samples = static_cast<int>(integer(v, "analysis.embedding_samples"));
  });
  with(j, "delta_grid", [&](auto& v) { a.delta_grid = numbers(v, "analysis.delta_grid"); });
  with(j, "safety", [&](auto& v) { a.safety = number(v, "analysis.safety"); });
  with(j, "classify", [&](auto& v) { a.classify = boolean(v, "analysis.classify"); });
  with(j, "refine_depth", [&](auto& v) { a.refine_depth = boolean(v, "analysis.refine_depth"); });
  with(j, "delta_prime", [&](auto& v) { a.delta_prime = number(v, "analysis.delta_prime"); });
  if (a.n_directions < 1) throw ConfigError("analysis.n_directions must be positive");
  if (a.embedding_samples < 1) throw ConfigError("analysis.embedding_samples must be positive");
  if (!(a.safety > 0.0 && a.safety <= 1.0)) throw ConfigError("analysis.safety must lie in (0, 1]");
  if (a.delta_prime && !(*a.delta_prime > 0.0 && *a.delta_prime < 1.0))
    throw ConfigError("analysis.delta_prime must lie in (0, 1)");
  if (a.delta_grid.empty()) throw ConfigError("analysis.delta_grid must not be empty");
  for (std::size_t i = 0; i < a.delta_grid.size(); ++i)
    if (!(a.delta_grid[i] > 0.0) || (i > 0 && !(a.delta_grid[i] > a.delta_grid[i - 1])))
      throw ConfigError("analysis.delta_grid must be positive and strictly increasing");
  return a;
}

const std::set<std::string>& sweep_parameters() {
  static const std::set<std::string> p{"initial.scale", "initial.delta", "initial.target_factor",
                                       "kernel.s",      "mesh.M",        "seed",
                                       "integrator.dt0", "integrator.t_end"};
  return p;
}

SweepSpec parse_sweep(const json& j) {
  expect_object(j, "sweep", {"parameter", "values"});
  SweepSpec s;
  s.parameter = text(j.at("parameter"), "sweep.parameter");
  s.values = numbers(j.at("values"), "sweep.values");
  if (!sweep_parameters().count(s.parameter))
    throw ConfigError("sweep.parameter: unsupported '" + s.parameter + "'");
  if (s.values.empty()) throw ConfigError("sweep.values must not be empty");
  return s;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + p.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

// ---- config ----------------------------------------------------------------

ScenarioConfig parse_config(const json& j) {
  expect_object(j, "config", {"schema_version", "name", "result", "seed", "kernel", "source",
                              "mesh", "integrator", "initial", "analysis", "sweep", "preset"});
  ScenarioConfig c;
  if (j.contains("preset")) c = preset(text(j.at("preset"), "preset"));
  if (j.contains("schema_version") && integer(j.at("schema_version"), "schema_version") !=
                                          kSchemaVersion)
    throw ConfigError("schema_version: expected " + std::to_string(kSchemaVersion));
  with(j, "name", [&](auto& v) { c.name = text(v, "name"); });
  with(j, "result", [&](auto& v) { c.result = text(v, "result"); });
  with(j, "seed", [&](auto& v) {
    const long s = integer(v, "seed");
    if (s < 0) throw ConfigError("seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  });
  // Sections replace the preset's section wholesale when given.
  with(j, "kernel", [&](auto& v) { c.kernel = parse_kernel(v); });
  with(j, "source", [&](auto& v) { c.source = parse_source(v); });
  with(j, "mesh", [&](auto& v) { c.mesh = parse_mesh(v); });
  with(j, "integrator", [&](auto& v) { c.integrator = parse_integrator(v); });
  with(j, "initial", [&](auto& v) { c.initial = parse_initial(v); });
  with(j, "analysis", [&](auto& v) { c.analysis = parse_analysis(v); });
  with(j, "sweep", [&](auto& v) { c.sweep = parse_sweep(v); });
  // Build once so that bad exponents or fields fail as config errors.
  build_kernel(c.kernel, c.mesh.L);
  build_source(c.source, c.mesh.L);
  return c;
}

ScenarioConfig load_config(const fs::path& path) {
  const std::string body = read_file(path);
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  ScenarioConfig c = parse_config(j);
  if (c.initial.type == "file" && fs::path(c.initial.path).is_relative())
    c.initial.path = (path.parent_path() / c.initial.path).string();
  return c;
}

json to_json(const ScenarioConfig& c) {
  const auto& I = c.integrator;
  json j{{"schema_version", kSchemaVersion},
         {"name", c.name},
         {"result", c.result},
         {"seed", c.seed},
         {"kernel", {{"type", c.kernel.type}, {"p", c.kernel.p}, {"q", c.kernel.q},
                     {"a", c.kernel.a}, {"s", c.kernel.s}}},
         {"source", {{"type", c.source.type}, {"q", c.source.q}, {"coeff", c.source.coeff},
                     {"a", c.source.a}, {"b", c.source.b}, {"q1", c.source.q1},
                     {"q2", c.source.q2}}},
         {"mesh", {{"L", c.mesh.L}, {"M", c.mesh.M}, {"R", c.mesh.R},
                   {"near_diag_levels", c.mesh.near_diag_levels}}},
         {"integrator",
          {{"scheme", scheme_name(I.scheme)}, {"dt0", I.dt0}, {"dt_min", I.dt_min},
           {"dt_max", I.dt_max}, {"t_end", I.t_end}, {"newton_tol", I.newton_tol},
           {"newton_max_iter", I.newton_max_iter},
           {"blowup_norm_threshold", I.blowup_norm_threshold},
           {"vanish_norm_threshold", I.vanish_norm_threshold},
           {"output_stride", I.output_stride}, {"adaptive", I.adaptive},
           {"max_rel_change", I.max_rel_change}, {"rtol", I.rtol}, {"atol", I.atol},
           {"max_steps", I.max_steps}, {"record_seminorm", I.record_seminorm}}},
         {"initial",
          {{"type", c.initial.type}, {"expr", c.initial.expr}, {"scale", c.initial.scale},
           {"delta", c.initial.delta}, {"target", c.initial.target},
           {"target_factor", c.initial.target_factor},
           {"first", {c.initial.first.a, c.initial.first.b}},
           {"second", {c.initial.second.a, c.initial.second.b}}, {"path", c.initial.path}}},
         {"analysis",
          {{"n_directions", c.analysis.n_directions},
           {"embedding_samples", c.analysis.embedding_samples},
           {"delta_grid", c.analysis.delta_grid}, {"safety", c.analysis.safety},
           {"classify", c.analysis.classify},
           {"refine_depth", c.analysis.refine_depth}}}};
  if (c.analysis.delta_prime) j["analysis"]["delta_prime"] = *c.analysis.delta_prime;
  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  return j;
}

// ---- presets ---------------------------------------------------------------

std::vector<std::string> preset_names() { return {"rrem1", "S1", "S2", "S3", "S4"}; }

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  // Quadratic kernel with a cubic source: alpha = 5/2 > 2 and the depth is
  // cheap to sample, which keeps every theorem scenario fast.
  c.kernel = KernelSpec{"power", "2", "4", "1", 0.5};
  c.source = SourceSpec{};
  c.source.type = "single_power";
  c.source.q = 3.0;
  if (name == "rrem1") {
    c.result = "a variable-exponent kernel with a two-power source whose exponents stay "
               "above max{2, g+} and below the fractional Sobolev exponent satisfies every "
               "structural condition";
    c.kernel = KernelSpec{"power_variable", "2.4 - 0.4*abs(x-y)", "4", "1", 0.3};
    c.source.type = "two_power";
    c.source.a = "1";
    c.source.b = "1";
    c.source.q1 = "3 + 0.2*x";
    c.source.q2 = "3.6 + 0.2*x";
    c.initial.type = "fiber";
    c.initial.scale = 0.5;
    c.integrator.t_end = 1.0;
  } else if (name == "S1") {
    c.result = "data in the stable set below the well depth give a global solution that "
               "stays in the stable set and decays";
    c.initial.type = "fiber";
    c.initial.scale = 0.5;
    c.integrator.t_end = 5.0;
  } else if (name == "S2") {
    c.result = "data in the unstable set below the well depth blow up in finite time, no "
               "later than the explicit concavity bound";
    c.initial.type = "fiber";
    c.initial.scale = 1.5;
    c.integrator.t_end = 100.0;
  } else if (name == "S3") {
    c.result = "at the critical energy level, data with nonnegative Nehari functional give a "
               "global solution, reached through the scaled sequence (1 - 1/k) u0";
    c.initial.type = "critical";
    c.initial.scale = 0.99;
    c.integrator.t_end = 5.0;
  } else if (name == "S4") {
    c.result = "for any prescribed energy level above the well depth there is initial data "
               "with negative Nehari functional whose solution blows up";
    c.initial.type = "high_energy";
    c.initial.target_factor = 3.0;
    c.integrator.t_end = 50.0;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

// ---- families ---------------------------------------------------------------

KernelFamily build_kernel(const KernelSpec& k, double L) {
  auto constant = [](const std::string& text, const char* what) {
    const Expr e(text);
    if (!e.is_constant()) throw ConfigError(std::string("kernel.") + what + " must be constant");
    return e(0.0, 0.0);
  };
  if (k.type == "power") return KernelFamily::power(constant(k.p, "p"), k.s, L);
  if (k.type == "power_variable") {
    const Expr p(k.p);
    return KernelFamily::power_variable([p](double x, double y) { return p(x, y); }, k.s, L,
                                        "p(x,y) = " + p.text());
  }
  if (k.type == "double_phase") {
    const Expr a(k.a);
    return KernelFamily::double_phase(constant(k.p, "p"), constant(k.q, "q"),
                                      [a](double x, double y) { return a(x, y); }, k.s, L,
                                      "a(x,y) = " + a.text());
  }
  if (k.type == "orlicz_power_log")
    return KernelFamily::orlicz(orlicz_power_log(constant(k.p, "p")), k.s, L);
  throw ConfigError("kernel.type: unknown type '" + k.type + "'");
}

SourceFamily build_source(const SourceSpec& s, double L) {
  auto field = [](const std::string& text, const char* what) {
    const Expr e(text);
    if (e.uses_y()) throw ConfigError(std::string("source.") + what + " may only depend on x");
    return Field1([e](double x) { return e(x); });
  };
  if (s.type == "zero") return SourceFamily::zero(L);
  if (s.type == "single_power") {
    if (!(s.q > 1.0)) throw ConfigError("source.q must exceed 1");
    const Expr coeff(s.coeff);
    if (coeff.is_constant()) return SourceFamily::single_power(s.q, coeff(0.0), L);
    return SourceFamily::single_power(s.q, field(s.coeff, "coeff"), L);
  }
  if (s.type == "two_power")
    return SourceFamily::two_power(field(s.a, "a"), field(s.b, "b"), field(s.q1, "q1"),
                                   field(s.q2, "q2"), L,
                                   "a = " + s.a + ", b = " + s.b + ", q1 = " + s.q1 +
                                       ", q2 = " + s.q2);
  throw ConfigError("source.type: unknown type '" + s.type + "'");
}

// ---- context ---------------------------------------------------------------

ScenarioContext::ScenarioContext(ScenarioConfig c) : cfg(std::move(c)) {
  form = std::make_shared<NonlocalForm>(cfg.mesh, build_kernel(cfg.kernel, cfg.mesh.L),
                                        build_source(cfg.source, cfg.mesh.L));
}

void ScenarioContext::ensure_depth() {
  if (depth) return;
  if (form->source().is_zero())
    throw ConditionViolation("f0", "the potential well needs a nonzero source");
  directions = default_directions(*form, cfg.analysis.n_directions, cfg.seed);
  depth = std::make_unique<DepthEstimator>(*form, directions);
  if (cfg.analysis.refine_depth) {
    const GroundState g = nehari_descent(*form, depth->fiber(depth->depth(1.0).argmin).direction());
    const Eigen::VectorXd unit = g.c / std::sqrt(form->l2_norm_sq(g.c));
    directions.push_back(unit);
    depth->add(*form, unit);
  }
  curve = depth_curve(*depth, cfg.analysis.delta_grid);
  d_hat = depth->depth(1.0).value;
}

EmbeddingConstants ScenarioContext::embedding() {
  if (!embedding_) {
    if (!form->source().is_zero()) ensure_depth();
    embedding_ = estimate_embedding_constants(*form, cfg.analysis.embedding_samples, cfg.seed,
                                              directions);
  }
  return *embedding_;
}

Eigen::VectorXd ScenarioContext::initial_data() {
  const auto& in = cfg.initial;
  const auto& space = form->space();
  auto from_expr = [&] {
    const Expr e(in.expr);
    if (e.uses_y()) throw ConfigError("initial.expr may only depend on x");
    return space.coefficients(GridFunction::from(cfg.mesh, [&](double x) { return e(x); }));
  };
  if (in.type == "expr") return in.scale * from_expr();
  if (in.type == "fiber") {
    const Eigen::VectorXd v = from_expr();
    if (v.cwiseAbs().maxCoeff() == 0.0) throw ConfigError("initial.expr vanishes on the mesh");
    return in.scale * lambda_star(*form, v, in.delta) * v;
  }
  if (in.type == "critical") {
    ensure_depth();
    const Fiber& f = depth->fiber(depth->depth(in.delta).argmin);
    return in.scale * f.lambda_star(in.delta) * f.direction();
  }
  if (in.type == "high_energy") {
    ensure_depth();
    const double target = in.target > 0.0 ? in.target : in.target_factor * d_hat;
    return construct_high_energy_data(*form, target, in.first, in.second, embedding()).c;
  }
  if (in.type == "file") {
    std::ifstream is(in.path);
    if (!is) throw ConfigError("cannot open initial data file " + in.path);
    return space.coefficients(GridFunction::read_csv(is, cfg.mesh));
  }
  throw ConfigError("initial.type: unknown type '" + in.type + "'");
}

// ---- commands ----------------------------------------------------------------

namespace {

json header(const ScenarioConfig& cfg, const char* kind) {
  return {{"schema_version", kSchemaVersion},
          {"kind", kind},
          {"scenario", cfg.name},
          {"result", cfg.result}};
}

void write_json(const fs::path& p, const json& j) { write_atomic(p, j.dump(2) + "\n"); }

ClassifyOptions classify_options(const ScenarioConfig& cfg) {
  ClassifyOptions o;
  o.n_directions = cfg.analysis.n_directions;
  o.seed = cfg.seed;
  o.delta_grid = cfg.analysis.delta_grid;
  return o;
}

}  // namespace

int cmd_check_family(const ScenarioConfig& cfg, const fs::path& out, std::ostream& log) {
  const KernelFamily fam = build_kernel(cfg.kernel, cfg.mesh.L);
  const SourceFamily src = build_source(cfg.source, cfg.mesh.L);
  const ConditionReport rep = check_structural_conditions(fam, src);
  json j = header(cfg, "conditions");
  j["report"] = to_json(rep);
  write_json(out / "conditions.json", j);
  for (const auto& e : rep.entries)
    log << (e.pass ? "  pass " : (e.required ? "  FAIL " : "  warn ")) << e.name << ": "
        << e.witness << "\n";
  const bool ok = rep.all_required_pass();
  log << (ok ? "all required conditions hold\n" : "required conditions fail\n");
  return ok ? 0 : 1;
}

int cmd_classify(const ScenarioConfig& cfg, const fs::path& out, std::ostream& log) {
  ScenarioContext ctx(cfg);
  const Eigen::VectorXd c0 = ctx.initial_data();
  ctx.ensure_depth();
  const VariationalReport rep = classify(*ctx.form, c0, *ctx.depth, ctx.curve,
                                         classify_options(cfg));
  json j = header(cfg, "classification");
  j["report"] = to_json(rep);
  j["curve"] = to_json(rep.curve);
  write_json(out / "classification.json", j);
  write_atomic(out / "initial.csv", grid_csv(ctx.form->space().to_grid(c0)));
  log << "region " << rep.region << ", energy " << rep.energy_level << " (E = "
      << format_double(rep.E) << ", I = " << format_double(rep.I)
      << ", d_hat = " << format_double(rep.d_hat) << ")\n";
  return 0;
}

int cmd_depth_curve(const ScenarioConfig& cfg, const fs::path& out, std::ostream& log) {
  ScenarioContext ctx(cfg);
  ctx.ensure_depth();
  write_atomic(out / "depth_curve.csv", depth_curve_csv(ctx.curve));
  json j = header(cfg, "depth_curve");
  j["curve"] = to_json(ctx.curve);
  j["d_hat"] = ctx.d_hat;
  const EmbeddingConstants ec = ctx.embedding();
  j["embedding"] = to_json(ec);
  try {
    const BoundConstants b =
        bound_constants(ctx.form->family(), ctx.form->source(), ec, 1.0, ctx.d_hat);
    j["bounds"] = to_json(b);
    j["d_hat_above_lower_bound"] = ctx.d_hat >= b.depth_lower_bound;
  } catch (const ConditionViolation& e) {
    j["bounds"] = nullptr;
    j["bounds_error"] = e.what();
  }
  write_json(out / "depth_curve.json", j);
  log << "d_hat(1) = " << format_double(ctx.d_hat) << ", argmax delta = "
      << format_double(ctx.curve.delta[ctx.curve.argmax]) << "\n";
  return 0;
}

int cmd_run(const ScenarioConfig& cfg, const fs::path& out, std::ostream& log) {
  ScenarioContext ctx(cfg);
  const NonlocalForm& form = *ctx.form;
  const Eigen::VectorXd c0 = ctx.initial_data();
  write_atomic(out / "initial.csv", grid_csv(form.space().to_grid(c0)));

  json summary = header(cfg, "run");
  summary["config"] = to_json(cfg);

  std::optional<VariationalReport> rep;
  if (cfg.analysis.classify && !form.source().is_zero()) {
    ctx.ensure_depth();
    rep = classify(form, c0, *ctx.depth, ctx.curve, classify_options(cfg));
    summary["initial"] = to_json(*rep);
    log << "initial data: region " << rep->region << ", energy " << rep->energy_level << "\n";
  }

  TrajectoryRecord rec;
  if (cfg.initial.type == "high_energy") {
    const HighEnergyReport he =
        high_energy_driver(form, c0, cfg.integrator, *ctx.depth, ctx.embedding());
    summary["high_energy"] = to_json(he);
    rec = he.record;
  } else {
    rec = run(form, c0, cfg.integrator);
  }
  write_atomic(out / "trajectory.csv", trajectory_csv(rec));
  summary["trajectory"] = trajectory_summary(rec);
  log << "status " << to_string(rec.status) << " after " << rec.accepted << " steps\n";

  if (rep && rep->energy_level == "critical" && rep->I > 0.0) {
    const CriticalEnergyReport cr = critical_energy_driver(form, c0, cfg.integrator);
    summary["critical"] = to_json(cr);
  }
  if (rep && !rep->is_zero) {
    const double d_safe = cfg.analysis.safety * rep->d_hat;
    const auto side = rep->region == "W" ? WellSide::Stable : WellSide::Unstable;
    if (rep->region == "W" || rep->region == "V") {
      json v = json::array();
      for (const auto& x : well_invariance_monitor(rec, rep->d_hat, side))
        v.push_back({{"t", x.t}, {"what", x.what}});
      summary["well_violations"] = v;
    }
    if (rep->region == "V" && rep->E < d_safe) {
      try {
        const double alpha = select_alpha(form.source(), form.family());
        summary["blowup"] = to_json(blowup_analysis(rec, d_safe, alpha));
      } catch (const ConditionViolation& e) {
        summary["blowup_error"] = e.what();
      }
    } else if (rep->region == "W" && rep->energy_level == "low") {
      const double d1 = rep->delta1.value_or(0.0);
      const double dp = cfg.analysis.delta_prime.value_or(0.5 * (d1 + 1.0));
      summary["decay"] =
          to_json(decay_analysis(rec, form.family().g_minus(), ctx.embedding().C_star, dp));
    }
  }
  write_json(out / "summary.json", summary);
  if (rec.status == RunStatus::SolverFailure) {
    log << "solver failure: " << rec.message << "\n";
    return 3;
  }
  return 0;
}

namespace {

void apply_sweep_value(ScenarioConfig& c, const std::string& param, double v) {
  if (param == "initial.scale") c.initial.scale = v;
  else if (param == "initial.delta") c.initial.delta = v;
  else if (param == "initial.target_factor") c.initial.target_factor = v;
  else if (param == "kernel.s") c.kernel.s = v;
  else if (param == "mesh.M") c.mesh = Mesh1D(c.mesh.L, static_cast<int>(v), c.mesh.R,
                                              c.mesh.near_diag_levels);
  else if (param == "seed") c.seed = static_cast<std::uint64_t>(v);
  else if (param == "integrator.dt0") c.integrator.dt0 = v;
  else if (param == "integrator.t_end") c.integrator.t_end = v;
  else throw ConfigError("sweep.parameter: unsupported '" + param + "'");
}

}  // namespace

int cmd_sweep(const ScenarioConfig& cfg, const fs::path& out, std::ostream& log, int threads) {
  if (!cfg.sweep) throw ConfigError("sweep: config has no sweep section");
  const SweepSpec& sw = *cfg.sweep;
  const std::size_t n = sw.values.size();
  std::vector<int> codes(n, 0);
  std::vector<std::string> logs(n);
  std::vector<std::string> dirs(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      std::ostringstream os;
      char name[32];
      std::snprintf(name, sizeof name, "run_%03zu", i);
      dirs[i] = name;
      codes[i] = guarded(
          [&] {
            ScenarioConfig c = cfg;
            c.sweep.reset();
            apply_sweep_value(c, sw.parameter, sw.values[i]);
            c.name = cfg.name + "/" + name;
            return cmd_run(c, out / name, os);
          },
          os);
      logs[i] = os.str();
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
  }

  json idx = header(cfg, "sweep_index");
  idx["parameter"] = sw.parameter;
  json runs = json::array();
  int worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    log << "[" << dirs[i] << " " << sw.parameter << " = " << format_double(sw.values[i])
        << "] exit " << codes[i] << "\n"
        << logs[i];
    json r{{"index", i}, {"value", sw.values[i]}, {"dir", dirs[i]}, {"exit_code", codes[i]}};
    const fs::path sp = out / dirs[i] / "summary.json";
    if (fs::exists(sp)) r["status"] = json::parse(read_file(sp))["trajectory"]["status"];
    runs.push_back(r);
    worst = std::max(worst, codes[i]);
  }
  idx["runs"] = runs;
  write_json(out / "index.json", idx);
  return worst;
}

int cmd_report(const fs::path& out, std::ostream& log) {
  if (!fs::is_directory(out)) throw ConfigError("report: no directory " + out.string());
  std::vector<fs::path> found;
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.is_regular_file() && e.path().filename() == "summary.json") found.push_back(e.path());
  std::sort(found.begin(), found.end());
  json rows = json::array();
  for (const auto& p : found) {
    const json s = json::parse(read_file(p));
    json row{{"dir", fs::relative(p.parent_path(), out).generic_string()},
             {"scenario", s.value("scenario", "")},
             {"result", s.value("result", "")},
             {"status", s["trajectory"].value("status", "")},
             {"E0", s["trajectory"].value("E0", 0.0)}};
    if (s.contains("initial")) row["region"] = s["initial"].value("region", "");
    if (s.contains("blowup")) row["bound_respected"] = s["blowup"]["bound_respected"];
    if (s.contains("decay")) row["decay_bound_respected"] = s["decay"]["bound_curve_respected"];
    log << row["dir"].get<std::string>() << ": " << row["status"].get<std::string>() << "\n";
    rows.push_back(row);
  }
  json rep{{"schema_version", kSchemaVersion}, {"kind", "report"}, {"runs", rows}};
  write_json(out / "report.json", rep);
  log << found.size() << " runs\n";
  return 0;
}

int guarded(const std::function<int()>& body, std::ostream& log) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConditionViolation& e) {
    log << "condition (" << e.condition << ") violated: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    log << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    log << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace fracwell
