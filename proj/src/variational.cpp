#include "fracwell/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracwell/errors.hpp"
#include "fracwell/quadrature.hpp"

namespace fracwell {

using Eigen::VectorXd;

double energy(const NonlocalForm& form, const VectorXd& c) {
  const PointValues v = form.values(c);
  return form.modular(v) - form.source_primitive(v);
}

double nehari(const NonlocalForm& form, const VectorXd& c) { return nehari_delta(form, c, 1.0); }

double nehari_delta(const NonlocalForm& form, const VectorXd& c, double delta) {
  const PointValues v = form.values(c);
  return delta * form.self_pairing(v) - form.source_moment(v);
}

// ---------------------------------------------------------------------------

Fiber::Fiber(const NonlocalForm& form, VectorXd direction)
    : form_(&form), dir_(std::move(direction)), pv_(form.values(dir_)) {
  homogeneous_ = form.family().homogeneous();
  p_ = form.family().constant_p();
  J1_ = form.modular(pv_);
  P1_ = form.self_pairing(pv_);
  l2_ = std::sqrt(form.l2_norm_sq(dir_));
}

double Fiber::modular(double lambda) const {
  return homogeneous_ ? std::pow(std::abs(lambda), p_) * J1_ : form_->modular(pv_, lambda);
}

double Fiber::pairing(double lambda) const {
  return homogeneous_ ? std::pow(std::abs(lambda), p_) * P1_ : form_->self_pairing(pv_, lambda);
}

double Fiber::source_primitive(double lambda) const {
  return form_->source_primitive(pv_, lambda);
}

double Fiber::source_moment(double lambda) const { return form_->source_moment(pv_, lambda); }

double Fiber::eta(double lambda) const {
  const double P = pairing(lambda);
  if (!(P > 0.0)) throw DomainError("eta: zero pairing along the fiber");
  return source_moment(lambda) / P;
}

double Fiber::lambda_star(double delta) const {
  if (!(P1_ > 0.0)) throw DomainError("lambda_star: direction has zero seminorm");
  if (!(delta > 0.0)) throw DomainError("lambda_star: delta must be positive");
  // sign of I_delta(lambda v) equals the sign of 1 - eta(lambda)/delta
  auto f = [&](double mu) {
    const double lam = std::exp(mu);
    return 1.0 - source_moment(lam) / (delta * pairing(lam));
  };
  constexpr int cap = 400;
  double lo = 0.0, hi = 0.0;
  double flo = f(0.0), fhi = flo;
  if (flo == 0.0) return 1.0;
  int k = 0;
  if (flo > 0.0) {
    while (fhi > 0.0 && k++ < cap) {
      lo = hi;
      flo = fhi;
      hi += std::log(2.0);
      fhi = f(hi);
    }
  } else {
    while (flo <= 0.0 && k++ < cap) {
      hi = lo;
      fhi = flo;
      lo -= std::log(2.0);
      flo = f(lo);
    }
  }
  if (k >= cap || !std::isfinite(flo) || !std::isfinite(fhi)) {
    std::ostringstream os;
    os << "(g5) no sign change of I_delta along the fiber within 2^" << cap
       << " (delta=" << delta << ")";
    throw ConditionViolation("g5", os.str());
  }
  const double mu = bracketed_root(f, lo, hi, 1e-15);
  return std::exp(mu);
}

double lambda_star(const NonlocalForm& form, const VectorXd& c, double delta) {
  return Fiber(form, c).lambda_star(delta);
}

double eta(const NonlocalForm& form, const VectorXd& c, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("eta: lambda must be positive");
  return Fiber(form, c).eta(lambda);
}

std::vector<VectorXd> default_directions(const NonlocalForm& form, int n, std::uint64_t seed) {
  std::vector<VectorXd> out;
  for (const GridFunction& g : sample_directions(form.space().mesh(), n, seed))
    out.push_back(form.space().coefficients(g));
  return out;
}

// ---------------------------------------------------------------------------

DepthEstimator::DepthEstimator(const NonlocalForm& form, const std::vector<VectorXd>& directions) {
  fibers_.reserve(directions.size());
  for (const VectorXd& d : directions) fibers_.emplace_back(form, d);
  if (fibers_.empty()) throw ConfigError("depth estimate needs at least one direction");
}

DepthSample DepthEstimator::depth(double delta) const {
  DepthSample out;
  out.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    const Fiber& f = fibers_[i];
    const double e = f.energy(f.lambda_star(delta));
    if (e < out.value) {
      out.value = e;
      out.argmin = i;
    }
  }
  return out;
}

void DepthEstimator::add(const NonlocalForm& form, VectorXd direction) {
  fibers_.emplace_back(form, std::move(direction));
}

GroundState nehari_descent(const NonlocalForm& form, const VectorXd& start, int max_iter,
                           double tol_rel) {
  GroundState g;
  g.c = lambda_star(form, start) * start;
  g.value = energy(form, g.c);
  for (; g.iterations < max_iter; ++g.iterations) {
    const VectorXd grad = form.pairing_gradient(g.c) - form.source_vector(g.c);
    const Eigen::LDLT<Eigen::MatrixXd> H(form.pairing_hessian(g.c));
    if (H.info() != Eigen::Success) break;
    const VectorXd step = H.solve(grad);
    bool improved = false;
    double next_value = g.value;
    VectorXd next;
    for (double tau = 1.0; tau > 1e-6; tau *= 0.5) {
      const VectorXd w = g.c - tau * step;
      if (!(w.cwiseAbs().maxCoeff() > 0.0)) continue;
      try {
        next = lambda_star(form, w) * w;
      } catch (const std::exception&) {
        continue;
      }
      next_value = energy(form, next);
      if (next_value < g.value) {
        improved = true;
        break;
      }
    }
    if (!improved) {
      g.converged = true;
      break;
    }
    const double gain = g.value - next_value;
    g.c = next;
    g.value = next_value;
    if (gain <= tol_rel * std::abs(g.value)) {
      g.converged = true;
      ++g.iterations;
      break;
    }
  }
  return g;
}

std::vector<double> default_delta_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 10; ++k) g.push_back(0.1 * k);
  for (int k = 1; k <= 12; ++k) g.push_back(1.0 + 0.25 * k);
  return g;
}

DepthCurve depth_curve(const DepthEstimator& est, const std::vector<double>& grid) {
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()))
    throw ConfigError("depth curve: grid must be sorted and nonempty");
  DepthCurve c;
  c.delta = grid;
  for (double d : grid) c.value.push_back(est.depth(d).value);
  c.argmax = static_cast<int>(std::max_element(c.value.begin(), c.value.end()) - c.value.begin());
  c.increasing_left = c.decreasing_right = true;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (grid[i + 1] <= 1.0 && !(c.value[i + 1] > c.value[i])) c.increasing_left = false;
    if (grid[i] >= 1.0 && !(c.value[i + 1] < c.value[i])) c.decreasing_right = false;
  }
  return c;
}

// ---------------------------------------------------------------------------

BoundConstants bound_constants(const KernelFamily& family, const SourceFamily& src,
                               const EmbeddingConstants& consts, double delta, double d_hat) {
  const double gm = family.g_minus(), gp = family.g_plus();
  const double h1m = src.h1_minus(), h2m = src.h2_minus(), h2p = src.h2_plus();
  const double A = src.A();
  if (!(h2p > gm && h2m > gp && h1m > gp)) {
    std::ostringstream os;
    os << "(g5) exponent gaps must be positive: h2+ - g- = " << h2p - gm
       << ", h2- - g+ = " << h2m - gp << ", h1- - g+ = " << h1m - gp;
    throw ConditionViolation("g5", os.str());
  }
  if (!(A > 0.0) || !(consts.C_star_G > 0.0) || !(consts.C_max > 0.0))
    throw DomainError("bound constants need A > 0 and positive embedding constants");
  BoundConstants b;
  b.delta = delta;
  b.y = delta * gm / (h2p * A * consts.C_star_G);
  b.z = delta * gm / (h2p * A * consts.C_max);
  const double base = gm / (A * h2p * consts.C_star_G);
  b.delta_min = std::min(std::pow(base, 1.0 / (h2p - gm)), std::pow(base, 1.0 / (h2m - gp)));
  b.depth_lower_bound =
      (1.0 - gp / h1m) * std::min(std::pow(b.delta_min, gm), std::pow(b.delta_min, gp));
  const double cd = d_hat * h1m / (h1m - gp);
  b.C_d = std::max(std::pow(cd, 1.0 / gp), std::pow(cd, 1.0 / gm));
  b.notes = "embedding constants are sampled lower bounds; A from the piecewise growth bound";
  return b;
}

BlowupTimes blowup_time_bounds(double u0_norm_sq, double d_hat, double E0, double alpha) {
  if (!(alpha > 2.0)) throw DomainError("blow-up time bound needs alpha > 2");
  if (!(E0 < d_hat)) throw DomainError("blow-up time bound undefined for E0 >= d");
  BlowupTimes t;
  t.T_star = 4.0 * u0_norm_sq * (alpha - 1.0) /
             (alpha * (alpha - 2.0) * (alpha - 2.0) * (d_hat - E0));
  return t;
}

double blowup_time_shifted(double t0, double norm_sq_t0, double d_hat, double E_t0,
                           double alpha) {
  return t0 + blowup_time_bounds(norm_sq_t0, d_hat, E_t0, alpha).T_star;
}

// ---------------------------------------------------------------------------

namespace {

// Pool-adjacent-violators fit, non-decreasing.
std::vector<double> isotonic(std::vector<double> y) {
  std::vector<double> val, wt;
  std::vector<int> len;
  for (double v : y) {
    val.push_back(v);
    wt.push_back(1.0);
    len.push_back(1);
    while (val.size() > 1 && val[val.size() - 2] > val.back()) {
      const std::size_t n = val.size();
      const double w = wt[n - 2] + wt[n - 1];
      val[n - 2] = (val[n - 2] * wt[n - 2] + val[n - 1] * wt[n - 1]) / w;
      wt[n - 2] = w;
      len[n - 2] += len[n - 1];
      val.pop_back();
      wt.pop_back();
      len.pop_back();
    }
  }
  std::size_t k = 0;
  for (std::size_t b = 0; b < val.size(); ++b)
    for (int j = 0; j < len[b]; ++j) y[k++] = val[b];
  return y;
}

std::optional<double> solve_branch(const DepthEstimator& est, double lo, double hi, double E) {
  auto f = [&](double d) { return est.depth(d).value - E; };
  const double flo = f(lo), fhi = f(hi);
  if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
  return bracketed_root(f, lo, hi, 1e-10);
}

}  // namespace

std::pair<std::optional<double>, std::optional<double>> well_window(const DepthEstimator& est,
                                                                    const DepthCurve& curve,
                                                                    double E) {
  std::pair<std::optional<double>, std::optional<double>> out;
  std::vector<double> ld, lv, rd, rv;
  for (std::size_t i = 0; i < curve.delta.size(); ++i) {
    if (curve.delta[i] <= 1.0) {
      ld.push_back(curve.delta[i]);
      lv.push_back(curve.value[i]);
    }
    if (curve.delta[i] >= 1.0) {
      rd.push_back(curve.delta[i]);
      rv.push_back(-curve.value[i]);
    }
  }
  const double d1 = est.depth(1.0).value;
  if (!(E < d1)) return out;
  if (!ld.empty() && E > 0.0) {
    lv = isotonic(lv);
    double lo = ld.front(), hi = 1.0;
    if (E <= lv.front()) {
      for (int k = 0; k < 60 && est.depth(lo).value >= E; ++k) lo *= 0.5;
      hi = ld.front();
    } else {
      for (std::size_t i = 0; i + 1 < ld.size(); ++i)
        if (lv[i] <= E && E < lv[i + 1]) {
          lo = ld[i];
          hi = ld[i + 1];
          break;
        }
    }
    out.first = solve_branch(est, lo, hi, E);
  }
  if (!rd.empty()) {
    rv = isotonic(rv);  // negated values: non-decreasing
    double lo = 1.0, hi = rd.back();
    if (-E <= rv.back()) {
      for (std::size_t i = 0; i + 1 < rd.size(); ++i)
        if (rv[i] < -E && -E <= rv[i + 1]) {
          lo = rd[i];
          hi = rd[i + 1];
          break;
        }
    } else {
      lo = rd.back();
      for (int k = 0; k < 60 && est.depth(hi).value >= E; ++k) hi *= 2.0;
    }
    out.second = solve_branch(est, lo, hi, E);
  }
  return out;
}

VariationalReport classify(const NonlocalForm& form, const VectorXd& c,
                           const ClassifyOptions& opts) {
  DepthEstimator est(form, default_directions(form, opts.n_directions, opts.seed));
  return classify(form, c, est, depth_curve(est, opts.delta_grid), opts);
}

VariationalReport classify(const NonlocalForm& form, const VectorXd& c,
                           const DepthEstimator& est, const DepthCurve& curve,
                           const ClassifyOptions& opts) {
  VariationalReport r;
  const PointValues v = form.values(c);
  r.J = form.modular(v);
  r.pairing = form.self_pairing(v);
  r.moment = form.source_moment(v);
  r.E = r.J - form.source_primitive(v);
  r.I = r.pairing - r.moment;
  r.tol_I = opts.tol_I_rel * (std::abs(r.pairing) + std::abs(r.moment));
  r.l2_norm = std::sqrt(form.l2_norm_sq(c));
  r.seminorm = form.seminorm(v);
  if (!form.source().is_zero() && r.J > 0.0) {
    const auto& Ln = form.space().line();
    std::vector<double> expo(Ln.size());
    for (int k = 0; k < Ln.size(); ++k) expo[k] = form.source().h2(Ln.x[k]);
    auto Jphi = [&](double t) {
      double acc = 0.0;
      for (int k = 0; k < Ln.size(); ++k) acc += Ln.w[k] * std::pow(std::abs(t * v.ul[k]), expo[k]);
      return acc;
    };
    r.phi_norm = luxemburg_solve(Jphi, Jphi(1.0), form.source().h2_minus(), form.source().h2_plus());
  }
  r.curve = curve;
  r.d_hat = est.depth(1.0).value;
  r.is_zero = c.cwiseAbs().maxCoeff() == 0.0;

  if (r.is_zero) {
    r.region = "W";
  } else if (std::abs(r.I) <= r.tol_I) {
    r.region = "Nehari";
  } else if (std::abs(r.E - r.d_hat) <= 1e-12 * std::abs(r.d_hat)) {
    r.region = "boundary";
  } else if (r.E < r.d_hat) {
    r.region = r.I > 0.0 ? "W" : "V";
  } else {
    r.region = r.I > 0.0 ? "N+" : "N-";
  }
  const double band = opts.critical_band * std::abs(r.d_hat);
  if (std::abs(r.E - r.d_hat) <= band)
    r.energy_level = "critical";
  else
    r.energy_level = r.E < r.d_hat ? "low" : "high";
  if (r.E < r.d_hat && !r.is_zero) {
    auto w = well_window(est, curve, r.E);
    r.delta1 = w.first;
    r.delta2 = w.second;
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

VectorXd bump(const NonlocalForm& form, Interval iv, int k) {
  const double pi = std::numbers::pi;
  GridFunction g = GridFunction::from(form.space().mesh(), [&](double x) {
    if (x <= iv.a || x >= iv.b) return 0.0;
    return std::sin(k * pi * (x - iv.a) / (iv.b - iv.a));
  });
  return form.space().coefficients(g);
}

}  // namespace

HighEnergyData construct_high_energy_data(const NonlocalForm& form, double target,
                                          Interval first, Interval second,
                                          const EmbeddingConstants& consts) {
  if (!(first.a < first.b && second.a < second.b && (first.b <= second.a || second.b <= first.a)))
    throw ConfigError("high-energy constructor: intervals must be disjoint and nonempty");
  const double gm = form.family().g_minus(), gp = form.family().g_plus();
  const double h1m = form.source().h1_minus();
  HighEnergyData out;
  out.threshold = h1m * gp / (gm * consts.C_star_max(gm, gp) * (h1m - gp)) * target;

  const VectorXd v = bump(form, first, 1);
  const Fiber fv(form, v);
  double zeta = fv.lambda_star();
  auto crit = [&](double l2) { return std::min(std::pow(l2, gm), std::pow(l2, gp)); };
  int guard = 0;
  while ((fv.energy(zeta) > 0.0 || crit(fv.l2_norm(zeta)) <= out.threshold) && guard++ < 400)
    zeta *= 1.25;
  if (guard >= 400) throw NumericError("high-energy constructor: no admissible V-part scale");

  std::ostringstream diag;
  for (int attempt = 0; attempt < 20; ++attempt, zeta *= 1.5) {
    const VectorXd base = zeta * v;
    const int max_k = std::max(2, static_cast<int>(form.space().mesh().M * (second.b - second.a) /
                                                   form.space().mesh().L / 3.0));
    for (int k = 1; k <= max_k; ++k) {
      const VectorXd w = bump(form, second, k);
      auto E_of = [&](double A) { return energy(form, base + A * w); };
      // scan amplitudes for a crossing of the target level
      double prevA = 0.0, prevE = E_of(0.0), bestE = prevE;
      double lo = -1.0, hi = -1.0;
      for (int j = -40; j <= 60; ++j) {
        const double A = zeta * std::pow(10.0, 0.1 * j);
        const double e = E_of(A);
        bestE = std::max(bestE, e);
        if (prevE <= target && e > target) {
          lo = prevA;
          hi = A;
          break;
        }
        prevA = A;
        prevE = e;
      }
      if (lo < 0.0) {
        diag << " [zeta=" << zeta << ", k=" << k << ": max E=" << bestE << "]";
        continue;
      }
      const double A = bracketed_root([&](double a) { return E_of(a) - target; }, lo, hi, 1e-15);
      const VectorXd c = base + A * w;
      const double I = nehari(form, c);
      const double E = E_of(A);
      if (!(I < 0.0)) {
        diag << " [zeta=" << zeta << ", k=" << k << ": I=" << I << " >= 0]";
        continue;
      }
      out.c = c;
      out.E = E;
      out.I = I;
      out.l2_norm = std::sqrt(form.l2_norm_sq(c));
      out.zeta = zeta;
      out.amplitude = A;
      out.frequency = k;
      out.criterion_holds = crit(out.l2_norm) > out.threshold;
      return out;
    }
  }
  throw NumericError("high-energy constructor failed:" + diag.str());
}

NehariExtrema nehari_extrema(const DepthEstimator& est, double zeta) {
  NehariExtrema out;
  out.lambda_zeta = std::numeric_limits<double>::infinity();
  for (int i = 0; i < est.size(); ++i) {
    const Fiber& f = est.fiber(i);
    const double lam = f.lambda_star();
    if (!(f.energy(lam) < zeta)) continue;
    const double n = f.l2_norm(lam);
    out.lambda_zeta = std::min(out.lambda_zeta, n);
    out.Lambda_zeta = std::max(out.Lambda_zeta, n);
    ++out.count;
  }
  if (out.count == 0) throw NumericError("nehari_extrema: no sampled Nehari point below zeta");
  return out;
}

}  // namespace fracwell
