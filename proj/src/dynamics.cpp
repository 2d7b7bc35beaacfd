#include "fracwell/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracwell/errors.hpp"
#include "fracwell/operator.hpp"
#include "fracwell/source.hpp"

namespace fracwell {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void IntegratorConfig::validate() const {
  if (!(dt_min > 0.0 && dt_min <= dt0 && dt0 <= dt_max))
    throw ConfigError("integrator: need 0 < dt_min <= dt0 <= dt_max");
  if (!(t_end > 0.0)) throw ConfigError("integrator: t_end must be positive");
  if (!(newton_tol > 0.0) || newton_max_iter < 1)
    throw ConfigError("integrator: invalid Newton settings");
  if (!(blowup_norm_threshold > 1.0) || !(vanish_norm_threshold > 0.0) ||
      !(vanish_norm_threshold < 1.0))
    throw ConfigError("integrator: thresholds must be positive (blow-up > 1 > vanish)");
  if (output_stride < 1) throw ConfigError("integrator: output_stride must be >= 1");
  if (!(max_rel_change > 0.0) || !(rtol > 0.0) || !(atol >= 0.0))
    throw ConfigError("integrator: invalid step-control tolerances");
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Running: return "running";
    case RunStatus::GlobalHorizon: return "global-horizon";
    case RunStatus::Vanished: return "vanished";
    case RunStatus::BlownUp: return "blown-up";
    case RunStatus::SolverFailure: return "solver-failure";
  }
  return "unknown";
}

std::string to_string(DecayRegime r) {
  switch (r) {
    case DecayRegime::FiniteTime: return "finite-time";
    case DecayRegime::Exponential: return "exponential";
    case DecayRegime::Algebraic: return "algebraic";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

Stepper::Stepper(const NonlocalForm& form, IntegratorConfig cfg)
    : form_(&form), cfg_(std::move(cfg)), mass_ldlt_(form.space().mass()) {
  cfg_.validate();
}

VectorXd Stepper::rhs(const VectorXd& c) const {
  return mass_ldlt_.solve(assemble_residual(*form_, c));
}

bool Stepper::step(State& s) {
  if (s.dt <= 0.0) s.dt = cfg_.dt0;
  return cfg_.scheme == Scheme::ImplicitEulerNewton ? implicit_step(s) : explicit_step(s);
}

namespace {

bool finite(const VectorXd& v) { return v.allFinite(); }

double mass_norm(const MatrixXd& M, const VectorXd& v) { return std::sqrt(v.dot(M * v)); }

// Step towards t_end; a remainder within rounding of dt is absorbed so that
// the run never ends on a sliver step.
double clamp_step(double dt, double t, double t_end) {
  const double rest = t_end - t;
  return rest <= dt * (1.0 + 1e-6) ? rest : dt;
}

}  // namespace

bool Stepper::implicit_step(State& s) {
  const MatrixXd& M = form_->space().mass();
  const double dt = clamp_step(s.dt, s.t, cfg_.t_end);
  const VectorXd& ck = s.c;
  auto G = [&](const VectorXd& c) -> VectorXd {
    return M * (c - ck) - dt * assemble_residual(*form_, c);
  };

  VectorXd c = ck;
  VectorXd g = G(c);
  bool converged = false;
  for (int it = 0; it < cfg_.newton_max_iter && finite(g); ++it) {
    const MatrixXd A = M - dt * assemble_jacobian(*form_, c);
    const VectorXd delta = -A.partialPivLu().solve(g);
    if (!finite(delta)) break;
    // damped update on the residual norm
    const double g0 = g.norm();
    double alpha = 1.0;
    VectorXd trial = c + delta;
    VectorXd gt = G(trial);
    while ((!finite(gt) || gt.norm() > (1.0 - 1e-4 * alpha) * g0) && alpha > 1.0 / 1024.0) {
      alpha *= 0.5;
      trial = c + alpha * delta;
      gt = G(trial);
    }
    c = trial;
    g = gt;
    const double step_size = alpha * delta.cwiseAbs().maxCoeff();
    if (!finite(c)) break;
    if (step_size <= cfg_.newton_tol * (1.0 + c.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }
  }
  if (!converged || !finite(c)) {
    s.dt = 0.5 * dt;
    return false;
  }
  const double base = mass_norm(M, ck);
  const double rho = base > 0.0 ? mass_norm(M, c - ck) / base : 0.0;
  if (cfg_.adaptive && rho > cfg_.max_rel_change && dt > cfg_.dt_min) {
    s.dt = dt * std::max(0.2, 0.9 * cfg_.max_rel_change / rho);
    return false;
  }
  s.c = std::move(c);
  s.t = dt == cfg_.t_end - s.t ? cfg_.t_end : s.t + dt;
  if (cfg_.adaptive) {
    const double grow = rho > 0.0 ? 0.9 * cfg_.max_rel_change / rho : 2.0;
    s.dt = std::min(cfg_.dt_max, dt * std::clamp(grow, 0.2, 2.0));
  } else {
    s.dt = cfg_.dt0;
  }
  return true;
}

bool Stepper::explicit_step(State& s) {
  // Bogacki-Shampine 3(2) with first-same-as-last and PI control
  const double dt = clamp_step(s.dt, s.t, cfg_.t_end);
  const VectorXd& c = s.c;
  if (!k1_valid_) {
    k1_ = rhs(c);
    k1_valid_ = true;
  }
  const VectorXd k2 = rhs(c + 0.5 * dt * k1_);
  const VectorXd k3 = rhs(c + 0.75 * dt * k2);
  VectorXd c3 = c + dt * (2.0 / 9.0 * k1_ + 1.0 / 3.0 * k2 + 4.0 / 9.0 * k3);
  VectorXd k4 = rhs(c3);
  const VectorXd c2 = c + dt * (7.0 / 24.0 * k1_ + 0.25 * k2 + 1.0 / 3.0 * k3 + 0.125 * k4);
  double err = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double sc = cfg_.atol + cfg_.rtol * std::max(std::abs(c[i]), std::abs(c3[i]));
    err = std::max(err, std::abs(c3[i] - c2[i]) / sc);
  }
  if (!finite(c3) || !std::isfinite(err)) {
    s.dt = 0.5 * dt;
    return false;
  }
  if (err > 1.0) {
    s.dt = dt * std::max(0.2, 0.9 * std::pow(err, -1.0 / 3.0));
    return false;
  }
  s.c = std::move(c3);
  s.t = dt == cfg_.t_end - s.t ? cfg_.t_end : s.t + dt;
  k1_ = std::move(k4);
  const double e = std::max(err, 1e-10);
  const double factor = 0.9 * std::pow(e, -0.7 / 3.0) * std::pow(err_prev_, 0.4 / 3.0);
  err_prev_ = e;
  s.dt = std::min(cfg_.dt_max, dt * std::clamp(factor, 0.2, 5.0));
  return true;
}

State step(const NonlocalForm& form, const State& s, const IntegratorConfig& cfg) {
  Stepper st(form, cfg);
  State out = s;
  if (out.dt <= 0.0) out.dt = cfg.dt0;
  while (!st.step(out))
    if (out.dt < cfg.dt_min) throw NumericError("step: step size collapsed below dt_min");
  return out;
}

// ---------------------------------------------------------------------------

namespace {

TrajectorySample sample(const NonlocalForm& form, const VectorXd& c, double t, bool semi) {
  const PointValues v = form.values(c);
  TrajectorySample s;
  s.t = t;
  s.l2_norm = std::sqrt(form.l2_norm_sq(c));
  const double J = form.modular(v);
  s.E = J - form.source_primitive(v);
  s.I = form.self_pairing(v) - form.source_moment(v);
  s.seminorm = semi && J > 0.0 ? form.seminorm(v) : 0.0;
  return s;
}

}  // namespace

TrajectoryRecord run(const NonlocalForm& form, const VectorXd& c0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!c0.allFinite()) throw DomainError("run: non-finite initial data");
  const MatrixXd& M = form.space().mass();
  TrajectoryRecord rec;
  TrajectorySample s0 = sample(form, c0, 0.0, cfg.record_seminorm);
  rec.E0 = s0.E;
  rec.samples.push_back(s0);
  const double norm0 = s0.l2_norm;
  rec.final_c = c0;
  if (norm0 == 0.0) {
    TrajectorySample end = s0;
    end.t = cfg.t_end;
    rec.samples.push_back(end);
    rec.status = RunStatus::GlobalHorizon;
    return rec;
  }

  Stepper stepper(form, cfg);
  State st{0.0, c0, cfg.dt0};
  double D = 0.0, int_l2 = 0.0, E_prev = s0.E;
  double l2_prev_sq = norm0 * norm0;
  bool last_recorded = true;
  while (rec.status == RunStatus::Running) {
    if (st.t >= cfg.t_end) {
      rec.status = RunStatus::GlobalHorizon;
      break;
    }
    if (rec.accepted >= cfg.max_steps) {
      rec.status = RunStatus::SolverFailure;
      rec.message = "step budget exhausted";
      break;
    }
    const VectorXd prev = st.c;
    const double t_prev = st.t;
    if (!stepper.step(st)) {
      ++rec.rejected;
      if (st.dt < cfg.dt_min) {
        const double n = std::sqrt(form.l2_norm_sq(st.c));
        if (n >= cfg.blowup_norm_threshold * norm0) {
          rec.status = RunStatus::BlownUp;
          rec.t_blow = st.t;
        } else {
          rec.status = RunStatus::SolverFailure;
          std::ostringstream os;
          os << "step size collapsed below dt_min at t=" << st.t << " with |u|=" << n;
          rec.message = os.str();
        }
      }
      continue;
    }
    ++rec.accepted;
    const double dt = st.t - t_prev;
    const VectorXd diff = st.c - prev;
    D += diff.dot(M * diff) / dt;
    const double l2_sq = form.l2_norm_sq(st.c);
    int_l2 += 0.5 * dt * (l2_prev_sq + l2_sq);
    l2_prev_sq = l2_sq;
    const double n = std::sqrt(l2_sq);

    const bool vanished = n <= cfg.vanish_norm_threshold * norm0;
    const bool runaway = !(n < 1e150 * norm0);
    const bool record_now = rec.accepted % cfg.output_stride == 0 || vanished || runaway ||
                            st.t >= cfg.t_end;
    // energy is needed every step for the monotonicity ledger
    TrajectorySample smp;
    if (record_now || !form.linear()) {
      smp = sample(form, st.c, st.t, cfg.record_seminorm && record_now);
    } else {
      smp.t = st.t;
      smp.E = 0.5 * st.c.dot(form.stiffness() * st.c) -
              form.source_primitive(form.line_values(st.c));
    }
    rec.max_energy_increase = std::max(rec.max_energy_increase, smp.E - E_prev);
    E_prev = smp.E;
    smp.D = D;
    smp.r = D + smp.E - rec.E0;
    smp.int_l2 = int_l2;
    if (record_now) rec.samples.push_back(smp);
    last_recorded = record_now;
    if (vanished) {
      rec.status = RunStatus::Vanished;
      rec.t_vanish = st.t;
    } else if (runaway) {
      // beyond any meaningful scale: treat as blow-up without waiting for dt collapse
      rec.status = RunStatus::BlownUp;
      rec.t_blow = st.t;
      rec.message = "norm exceeded 1e150 |u0|";
    }
  }
  if (!last_recorded) {
    TrajectorySample smp = sample(form, st.c, st.t, cfg.record_seminorm);
    smp.D = D;
    smp.r = D + smp.E - rec.E0;
    smp.int_l2 = int_l2;
    rec.samples.push_back(smp);
  }
  rec.final_c = st.c;
  return rec;
}

double energy_identity_residual(const TrajectoryRecord& rec) {
  double m = 0.0;
  for (const auto& s : rec.samples) m = std::max(m, std::abs(s.r));
  return m;
}

double nehari_identity_check(const TrajectoryRecord& rec) {
  const auto& S = rec.samples;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < S.size(); ++i) {
    const double h1 = S[i].t - S[i - 1].t, h2 = S[i + 1].t - S[i].t;
    if (!(h1 > 0.0 && h2 > 0.0)) continue;
    auto y = [&](std::size_t k) { return 0.5 * S[k].l2_norm * S[k].l2_norm; };
    const double dy = -h2 / (h1 * (h1 + h2)) * y(i - 1) + (h2 - h1) / (h1 * h2) * y(i) +
                      h1 / (h2 * (h1 + h2)) * y(i + 1);
    const double ref = std::abs(S[i].I);
    if (ref == 0.0 && dy == 0.0) continue;
    worst = std::max(worst, std::abs(dy + S[i].I) / std::max(ref, 1e-300));
  }
  return worst;
}

std::vector<Violation> well_invariance_monitor(const TrajectoryRecord& rec, double d_hat,
                                               WellSide side) {
  std::vector<Violation> out;
  for (const auto& s : rec.samples) {
    if (s.l2_norm == 0.0) continue;
    std::ostringstream os;
    if (side == WellSide::Stable && !(s.I > 0.0)) os << "I = " << s.I << " <= 0";
    if (side == WellSide::Unstable && !(s.I < 0.0)) os << "I = " << s.I << " >= 0";
    if (!(s.E < d_hat)) os << (os.tellp() > 0 ? "; " : "") << "E = " << s.E << " >= d";
    if (os.tellp() > 0) out.push_back({s.t, os.str()});
  }
  return out;
}

ConcavityMonitor concavity_monitor(const TrajectoryRecord& rec, double d_hat, double alpha,
                                   double tol_rel) {
  ConcavityMonitor m;
  if (rec.samples.empty()) return m;
  const double u0sq = rec.samples.front().l2_norm * rec.samples.front().l2_norm;
  const double gap = d_hat - rec.E0;
  m.beta = 1.0 / alpha;
  m.theta = (1.0 - 2.0 * m.beta) / (2.0 * m.beta);
  m.a = 2.0 * (alpha - 1.0) * u0sq / (alpha * (alpha - 2.0) * gap);
  m.b = alpha * gap / (alpha - 1.0);
  m.T = blowup_time_bounds(u0sq, d_hat, rec.E0, alpha).T_star;
  for (const auto& s : rec.samples) {
    if (s.t >= m.T) break;
    const double Mt = s.int_l2 + (m.T - s.t) * u0sq + m.b * (s.t + m.a) * (s.t + m.a);
    m.t.push_back(s.t);
    m.M.push_back(Mt);
    m.M_neg_theta.push_back(std::pow(Mt, -m.theta));
  }
  const auto& y = m.M_neg_theta;
  m.scale = y.empty() ? 0.0 : *std::max_element(y.begin(), y.end());
  m.max_second_difference = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double h1 = m.t[i] - m.t[i - 1], h2 = m.t[i + 1] - m.t[i];
    if (!(h1 > 0.0 && h2 > 0.0)) continue;
    const double d2 = ((y[i + 1] - y[i]) / h2 - (y[i] - y[i - 1]) / h1) * 0.5 * (h1 + h2);
    m.max_second_difference = std::max(m.max_second_difference, d2);
  }
  if (y.size() < 3) m.max_second_difference = 0.0;
  m.concave = m.max_second_difference <= tol_rel * m.scale;
  return m;
}

BlowupAnalysis blowup_analysis(const TrajectoryRecord& rec, double d_hat, double alpha,
                               double divergence_threshold) {
  BlowupAnalysis out;
  out.t_blow = rec.t_blow;
  const double u0sq = rec.samples.front().l2_norm * rec.samples.front().l2_norm;
  try {
    out.T_star = blowup_time_bounds(u0sq, d_hat, rec.E0, alpha).T_star;
  } catch (const DomainError& e) {
    out.note = std::string("T* undefined: ") + e.what();
    return out;
  }
  const double limit = 1.05 * *out.T_star;
  for (const auto& s : rec.samples) {
    if (s.t > limit) break;
    out.integral_at_bound = s.int_l2;
    if (s.int_l2 > divergence_threshold) {
      out.bound_respected = true;
      break;
    }
  }
  out.concavity = concavity_monitor(rec, d_hat, alpha);
  return out;
}

DecayAnalysis decay_analysis(const TrajectoryRecord& rec, double g, double C_star,
                             double delta_prime, double slack) {
  DecayAnalysis out;
  out.delta_prime = delta_prime;
  const auto& S = rec.samples;
  const double y0 = S.front().l2_norm * S.front().l2_norm;
  const double k = 2.0 * (1.0 - delta_prime) * g * std::pow(C_star, -g);
  if (g < 2.0) {
    out.regime = DecayRegime::FiniteTime;
    out.predicted = std::pow(S.front().l2_norm, 2.0 - g) / ((2.0 - g) * 0.5 * k);
    out.fitted = rec.t_vanish.value_or(std::numeric_limits<double>::quiet_NaN());
    out.bound_curve_respected =
        rec.status == RunStatus::Vanished && out.fitted <= (1.0 + slack) * out.predicted;
    out.note = "vanish time against the extinction bound";
  } else if (g == 2.0) {
    out.regime = DecayRegime::Exponential;
    out.predicted = -2.0 * (1.0 - delta_prime) * std::pow(C_star, -2.0);
    // least-squares slope of log |u|^2
    double st = 0, sy = 0, stt = 0, sty = 0;
    int n = 0;
    for (const auto& s : S) {
      if (!(s.l2_norm > 0.0)) continue;
      const double ly = std::log(s.l2_norm * s.l2_norm);
      st += s.t;
      sy += ly;
      stt += s.t * s.t;
      sty += s.t * ly;
      ++n;
    }
    out.fitted = n > 1 ? (n * sty - st * sy) / (n * stt - st * st) : 0.0;
    out.bound_curve_respected = n > 1 && out.fitted <= (1.0 - slack) * out.predicted;
    out.note = "fitted log-slope of |u|^2 against the exponential rate";
  } else {
    out.regime = DecayRegime::Algebraic;
    const double e = (2.0 - g) / 2.0;
    auto curve = [&](double t) {
      return std::pow(std::pow(y0, e) + (g - 2.0) * (1.0 - delta_prime) * g *
                                            std::pow(C_star, -g) * t,
                      -2.0 / (g - 2.0));
    };
    out.bound_curve_respected = true;
    for (const auto& s : S)
      if (s.l2_norm * s.l2_norm > curve(s.t) * (1.0 + 1e-12)) out.bound_curve_respected = false;
    out.predicted = -2.0 / (g - 2.0);
    // late-time exponent from the last half of the samples
    const std::size_t h = S.size() / 2;
    if (S.size() >= 4 && S[h].t > 0.0 && S.back().l2_norm > 0.0 && S[h].l2_norm > 0.0)
      out.fitted = std::log(S.back().l2_norm * S.back().l2_norm / (S[h].l2_norm * S[h].l2_norm)) /
                   std::log(S.back().t / S[h].t);
    out.note = "|u|^2 against the algebraic bound curve at every sample";
  }
  return out;
}

CriticalEnergyReport critical_energy_driver(const NonlocalForm& form, const VectorXd& c0,
                                            const IntegratorConfig& cfg, std::vector<int> ks) {
  CriticalEnergyReport r;
  r.E0 = energy(form, c0);
  r.energies_increasing = r.all_positive_I = r.none_blown_up = true;
  for (int k : ks) {
    const double lam = 1.0 - 1.0 / k;
    const VectorXd c = lam * c0;
    r.k.push_back(k);
    r.lambda.push_back(lam);
    r.E.push_back(energy(form, c));
    r.I.push_back(nehari(form, c));
    const TrajectoryRecord rec = run(form, c, cfg);
    r.status.push_back(rec.status);
    if (rec.status == RunStatus::BlownUp || rec.status == RunStatus::SolverFailure)
      r.none_blown_up = false;
    if (!(r.I.back() > 0.0)) r.all_positive_I = false;
    if (r.E.size() > 1 && !(r.E.back() > r.E[r.E.size() - 2])) r.energies_increasing = false;
    if (!(r.E.back() < r.E0)) r.energies_increasing = false;
  }
  return r;
}

HighEnergyReport high_energy_driver(const NonlocalForm& form, const VectorXd& c0,
                                    const IntegratorConfig& cfg, const DepthEstimator& est,
                                    const EmbeddingConstants& consts) {
  HighEnergyReport r;
  const PointValues v = form.values(c0);
  r.E0 = form.modular(v) - form.source_primitive(v);
  r.I0 = form.self_pairing(v) - form.source_moment(v);
  r.l2_norm = std::sqrt(form.l2_norm_sq(c0));
  try {
    const NehariExtrema ex = nehari_extrema(est, r.E0);
    r.lambda_hat = ex.lambda_zeta;
    r.Lambda_hat = ex.Lambda_zeta;
  } catch (const NumericError&) {
    r.lambda_hat = r.Lambda_hat = std::numeric_limits<double>::quiet_NaN();
  }
  const double gm = form.family().g_minus(), gp = form.family().g_plus();
  const double h1m = form.source().h1_minus();
  r.corollary_threshold = h1m * gp / (gm * consts.C_star_max(gm, gp) * (h1m - gp)) * r.E0;
  r.corollary_holds =
      std::min(std::pow(r.l2_norm, gm), std::pow(r.l2_norm, gp)) > r.corollary_threshold;
  if ((r.corollary_holds && r.I0 < 0.0) || (r.I0 < 0.0 && r.l2_norm >= r.Lambda_hat))
    r.prediction = "blow-up";
  else if (r.I0 > 0.0 && r.l2_norm <= r.lambda_hat)
    r.prediction = "decay";
  else
    r.prediction = "unclassified";
  r.record = run(form, c0, cfg);
  const auto& S = r.record.samples;
  bool dec = true, inc = true;
  for (std::size_t i = 1; i < S.size(); ++i) {
    if (!(S[i].l2_norm < S[i - 1].l2_norm)) dec = false;
    if (!(S[i].l2_norm > S[i - 1].l2_norm)) inc = false;
  }
  if (r.prediction == "decay") {
    r.l2_monotone = dec;
    r.outcome_matches = dec && (r.record.status == RunStatus::Vanished ||
                                r.record.status == RunStatus::GlobalHorizon);
  } else if (r.prediction == "blow-up") {
    r.l2_monotone = inc;
    r.outcome_matches = inc && r.record.status == RunStatus::BlownUp;
  }
  return r;
}

}  // namespace fracwell
