#include "fracwell/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fracwell/errors.hpp"

namespace fracwell {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + tmp.string());
    os << content;
    if (!os.flush()) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string trajectory_csv(const TrajectoryRecord& rec) {
  std::ostringstream os;
  os << "t,l2_norm,seminorm,E,I,D,r,int_l2\n";
  for (const auto& s : rec.samples)
    os << format_double(s.t) << ',' << format_double(s.l2_norm) << ','
       << format_double(s.seminorm) << ',' << format_double(s.E) << ',' << format_double(s.I)
       << ',' << format_double(s.D) << ',' << format_double(s.r) << ','
       << format_double(s.int_l2) << '\n';
  return os.str();
}

std::string depth_curve_csv(const DepthCurve& curve) {
  std::ostringstream os;
  os << "delta,d_hat\n";
  for (std::size_t i = 0; i < curve.delta.size(); ++i)
    os << format_double(curve.delta[i]) << ',' << format_double(curve.value[i]) << '\n';
  return os.str();
}

std::string grid_csv(const GridFunction& u) {
  std::ostringstream os;
  u.write_csv(os);
  return os.str();
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const ConditionReport& r) {
  json j;
  j["all_required_pass"] = r.all_required_pass();
  j["failures"] = r.failures();
  j["delta2_K"] = r.delta2_K;
  j["alpha"] = r.alpha;
  j["sampling"] = r.sampling;
  j["warnings"] = r.warnings;
  json e = json::array();
  for (const auto& c : r.entries)
    e.push_back({{"name", c.name}, {"pass", c.pass}, {"required", c.required},
                 {"witness", c.witness}});
  j["conditions"] = e;
  return j;
}

json to_json(const DepthCurve& c) {
  return {{"delta", c.delta},
          {"d_hat", c.value},
          {"argmax_delta", c.argmax >= 0 ? json(c.delta[c.argmax]) : json(nullptr)},
          {"increasing_left", c.increasing_left},
          {"decreasing_right", c.decreasing_right}};
}

json to_json(const VariationalReport& r) {
  return {{"E", r.E},
          {"I", r.I},
          {"J", r.J},
          {"pairing", r.pairing},
          {"source_moment", r.moment},
          {"seminorm", r.seminorm},
          {"l2_norm", r.l2_norm},
          {"phi_norm", r.phi_norm},
          {"tol_I", r.tol_I},
          {"region", r.region},
          {"energy_level", r.energy_level},
          {"is_zero", r.is_zero},
          {"d_hat", r.d_hat},
          {"d_hat_note", "sampled minimum over directions: an upper bound of the true depth"},
          {"delta1", opt(r.delta1)},
          {"delta2", opt(r.delta2)}};
}

json to_json(const EmbeddingConstants& c) {
  return {{"C_star", c.C_star},     {"C_1G", c.C_1G},       {"C_star_G", c.C_star_G},
          {"C_max", c.C_max},       {"samples", c.samples},
          {"note", "sampled maxima: lower bounds of the true constants"}};
}

json to_json(const BoundConstants& b) {
  return {{"delta", b.delta},   {"delta_min", b.delta_min},
          {"y", b.y},           {"z", b.z},
          {"C_d", b.C_d},       {"depth_lower_bound", b.depth_lower_bound},
          {"T_star", opt(b.T_star)}, {"T_star_star", opt(b.T_star_star)},
          {"notes", b.notes}};
}

json to_json(const BlowupAnalysis& b) {
  const auto& m = b.concavity;
  return {{"t_blow", opt(b.t_blow)},
          {"T_star", opt(b.T_star)},
          {"integral_at_bound", b.integral_at_bound},
          {"bound_respected", b.bound_respected},
          {"note", b.note},
          {"concavity",
           {{"a", m.a},
            {"b", m.b},
            {"beta", m.beta},
            {"theta", m.theta},
            {"T", m.T},
            {"samples", m.t.size()},
            {"max_second_difference", m.max_second_difference},
            {"scale", m.scale},
            {"concave", m.concave}}}};
}

json to_json(const DecayAnalysis& d) {
  return {{"regime", to_string(d.regime)},
          {"delta_prime", d.delta_prime},
          {"fitted", d.fitted},
          {"predicted", d.predicted},
          {"bound_curve_respected", d.bound_curve_respected},
          {"note", d.note + "; uses the sampled C_star, a lower bound, which makes the check stricter"}};
}

json to_json(const CriticalEnergyReport& r) {
  json runs = json::array();
  for (std::size_t i = 0; i < r.k.size(); ++i)
    runs.push_back({{"k", r.k[i]},
                    {"lambda", r.lambda[i]},
                    {"E", r.E[i]},
                    {"I", r.I[i]},
                    {"status", to_string(r.status[i])}});
  return {{"E0", r.E0},
          {"runs", runs},
          {"energies_increasing", r.energies_increasing},
          {"all_positive_I", r.all_positive_I},
          {"none_blown_up", r.none_blown_up}};
}

json to_json(const HighEnergyReport& r) {
  return {{"E0", r.E0},
          {"I0", r.I0},
          {"l2_norm", r.l2_norm},
          {"lambda_hat", r.lambda_hat},
          {"Lambda_hat", r.Lambda_hat},
          {"corollary_threshold", r.corollary_threshold},
          {"corollary_holds", r.corollary_holds},
          {"prediction", r.prediction},
          {"status", to_string(r.record.status)},
          {"l2_monotone", r.l2_monotone},
          {"outcome_matches", r.outcome_matches}};
}

json trajectory_summary(const TrajectoryRecord& rec) {
  return {{"status", to_string(rec.status)},
          {"t_blow", opt(rec.t_blow)},
          {"t_vanish", opt(rec.t_vanish)},
          {"message", rec.message},
          {"E0", rec.E0},
          {"samples", rec.samples.size()},
          {"accepted_steps", rec.accepted},
          {"rejected_steps", rec.rejected},
          {"max_energy_increase", rec.max_energy_increase},
          {"energy_identity_residual", energy_identity_residual(rec)},
          {"final_time", rec.samples.empty() ? 0.0 : rec.samples.back().t}};
}

}  // namespace fracwell
