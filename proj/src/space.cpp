#include "fracwell/space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "fracwell/errors.hpp"
#include "fracwell/quadrature.hpp"

namespace fracwell {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double Basis::value(int j, double x) const {
  if (x <= 0.0 || x >= mesh_.L) return 0.0;
  if (kind_ == Kind::SineSpectral) return std::sin((j + 1) * std::numbers::pi * x / mesh_.L);
  const double h = mesh_.h();
  const double d = std::abs(x / h - (j + 1));
  return d < 1.0 ? 1.0 - d : 0.0;
}

// ---------------------------------------------------------------------------

DiscreteSpace::DiscreteSpace(const Mesh1D& mesh, Basis basis, double s, double growth_min,
                             QuadratureOptions opts)
    : mesh_(mesh), basis_(std::move(basis)), s_(s), opts_(opts) {
  mesh_.validate();
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional order must lie in (0,1)");
  build_pairs(growth_min);
  build_lines();
  const int n = dim();
  mass_ = MatrixXd::Zero(n, n);
  if (basis_.kind() == Basis::Kind::NodalHat) {
    const double h = mesh_.h();
    for (int i = 0; i < n; ++i) {
      mass_(i, i) = 2.0 * h / 3.0;
      if (i + 1 < n) mass_(i, i + 1) = mass_(i + 1, i) = h / 6.0;
    }
  } else {
    mass_.diagonal().setConstant(mesh_.L / 2.0);
    to_sine_basis();
  }
}

namespace {

struct Entry {
  int node;
  double c;
};

void push_row(SparseRows& rows, std::initializer_list<Entry> entries, int M) {
  for (const Entry& e : entries) {
    if (e.node < 1 || e.node > M || e.c == 0.0) continue;
    rows.idx.push_back(e.node - 1);
    rows.coef.push_back(e.c);
  }
  rows.off.push_back(static_cast<std::int32_t>(rows.idx.size()));
}

}  // namespace

void DiscreteSpace::build_pairs(double growth_min) {
  const int M = mesh_.M;
  const double h = mesh_.h();
  const double a = std::max(growth_min * (1.0 - s_), 0.05);
  grade_m_ = std::ceil(4.0 / a);
  const double m = grade_m_;
  auto& P = pairs_;

  auto add = [&](double x, double y, double r, double area, std::initializer_list<Entry> e) {
    const double ar = std::abs(r);
    P.x.push_back(x);
    P.y.push_back(y);
    P.W.push_back(area / ar);
    P.rs.push_back(std::pow(ar, -s_));
    push_row(P.diff, e, M);
  };

  // graded nodes for the singular direction: rho = w^m on geometric w-panels
  std::vector<double> rho, drho;
  {
    const GaussRule& g = gauss_legendre(opts_.singular_order);
    double hi = 1.0;
    for (int lev = 0; lev <= mesh_.near_diag_levels; ++lev) {
      const double lo = lev == mesh_.near_diag_levels ? 0.0 : 0.5 * hi;
      for (int i = 0; i < g.size(); ++i) {
        const double w = lo + (hi - lo) * g.nodes[i];
        rho.push_back(std::pow(w, m));
        drho.push_back(m * std::pow(w, m - 1.0) * (hi - lo) * g.weights[i]);
      }
      hi = lo;
    }
  }
  const GaussRule& gt = gauss_legendre(opts_.tau_order);

  for (int k = 0; k <= M; ++k) {
    // diagonal cell, triangle x > y, doubled
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double r = rho[i];
      for (int t = 0; t < gt.size(); ++t) {
        const double eta = (1.0 - r) * gt.nodes[t];
        const double area = 2.0 * h * h * (1.0 - r) * drho[i] * gt.weights[t];
        add((k + eta + r) * h, (k + eta) * h, r * h, area, {{k, -r}, {k + 1, r}});
      }
    }
    // adjacent pair (k, k+1), corner at node k+1, doubled for (k+1, k)
    if (k + 1 <= M) {
      for (std::size_t i = 0; i < rho.size(); ++i) {
        const double r = rho[i];
        for (int t = 0; t < gt.size(); ++t) {
          const double area = 2.0 * h * h * r * drho[i] * gt.weights[t];
          for (int tri = 0; tri < 2; ++tri) {
            const double xi = tri == 0 ? r : r * gt.nodes[t];
            const double eta = tri == 0 ? r * gt.nodes[t] : r;
            add((k + 1 - xi) * h, (k + 1 + eta) * h, -(xi + eta) * h, area,
                {{k, xi}, {k + 1, eta - xi}, {k + 2, -eta}});
          }
        }
      }
    }
    // regular pairs
    for (int l = k + 2; l <= M; ++l) {
      const int d = l - k;
      const int n = d <= 3 ? opts_.near_order : d <= 7 ? opts_.mid_order : opts_.far_order;
      const GaussRule& g = gauss_legendre(n);
      for (int i = 0; i < g.size(); ++i) {
        const double xi = g.nodes[i];
        for (int j = 0; j < g.size(); ++j) {
          const double eta = g.nodes[j];
          const double area = 2.0 * h * h * g.weights[i] * g.weights[j];
          add((k + xi) * h, (l + eta) * h, -(d + eta - xi) * h, area,
              {{k, 1.0 - xi}, {k + 1, xi}, {l, -(1.0 - eta)}, {l + 1, -eta}});
        }
      }
    }
  }
}

void DiscreteSpace::build_lines() {
  const int M = mesh_.M;
  const double h = mesh_.h();
  const double L = mesh_.L;
  const double R = mesh_.R;
  const double s = s_;

  auto push = [&](Line& line, double x, double dl, double dr, double w, int c, double xi) {
    line.x.push_back(x);
    line.w.push_back(w);
    line.dl_s.push_back(std::pow(dl, -s));
    line.dr_s.push_back(std::pow(dr, -s));
    line.tl_s.push_back(std::pow(dl + R, -s));
    line.tr_s.push_back(std::pow(dr + R, -s));
    push_row(line.vals, {{c, 1.0 - xi}, {c + 1, xi}}, M);
  };

  const GaussRule& g = gauss_legendre(opts_.line_order);
  for (int c = 0; c <= M; ++c)
    for (int i = 0; i < g.size(); ++i) {
      const double xi = g.nodes[i];
      push(line_, (c + xi) * h, (c + xi) * h, (M + 1 - c - xi) * h, h * g.weights[i], c, xi);
    }

  // exterior rule: boundary cells graded toward the boundary
  const GaussRule& gb = gauss_legendre(opts_.boundary_order);
  const double m = grade_m_;
  for (int hi_lev = 0; hi_lev < 4; ++hi_lev) {
    const double hi = std::pow(0.5, hi_lev);
    const double lo = hi_lev == 3 ? 0.0 : 0.5 * hi;
    for (int i = 0; i < gb.size(); ++i) {
      const double w = lo + (hi - lo) * gb.nodes[i];
      const double z = std::pow(w, m);  // distance to the boundary in units of h
      const double wt = h * m * std::pow(w, m - 1.0) * (hi - lo) * gb.weights[i];
      push(exterior_, z * h, z * h, L - z * h, wt, 0, z);
      push(exterior_, L - z * h, L - z * h, z * h, wt, M, 1.0 - z);
    }
  }
  for (int c = 1; c < M; ++c)
    for (int i = 0; i < g.size(); ++i) {
      const double xi = g.nodes[i];
      push(exterior_, (c + xi) * h, (c + xi) * h, (M + 1 - c - xi) * h, h * g.weights[i], c,
           xi);
    }
}

void DiscreteSpace::to_sine_basis() {
  const int n = dim();
  const double L = mesh_.L;
  const double pi = std::numbers::pi;
  SparseRows diff;
  for (int k = 0; k < pairs_.size(); ++k) {
    const double x = pairs_.x[k], y = pairs_.y[k];
    // signed x - y recovered without cancellation from |x-y|^{-s}
    const double ar = std::pow(pairs_.rs[k], -1.0 / s_);
    const double r = x >= y ? ar : -ar;
    for (int j = 0; j < n; ++j) {
      const double f = (j + 1) * pi / (2.0 * L);
      diff.idx.push_back(j);
      diff.coef.push_back(2.0 * std::cos(f * (x + y)) * std::sin(f * r));
    }
    diff.off.push_back(static_cast<std::int32_t>(diff.idx.size()));
  }
  pairs_.diff = std::move(diff);
  for (Line* line : {&exterior_, &line_}) {
    SparseRows vals;
    for (int k = 0; k < line->size(); ++k) {
      for (int j = 0; j < n; ++j) {
        vals.idx.push_back(j);
        vals.coef.push_back(std::sin((j + 1) * pi * line->x[k] / L));
      }
      vals.off.push_back(static_cast<std::int32_t>(vals.idx.size()));
    }
    line->vals = std::move(vals);
  }
}

VectorXd DiscreteSpace::coefficients(const GridFunction& u) const {
  if (!(u.mesh() == mesh_)) throw ConfigError("grid function lives on a different mesh");
  const int n = dim();
  VectorXd c(n);
  if (basis_.kind() == Basis::Kind::NodalHat) {
    for (int i = 0; i < n; ++i) c[i] = u[i];
    return c;
  }
  c.setZero();
  for (int k = 0; k < line_.size(); ++k) {
    const double uv = u(line_.x[k]);
    for (int e = line_.vals.off[k]; e < line_.vals.off[k + 1]; ++e)
      c[line_.vals.idx[e]] += line_.w[k] * uv * line_.vals.coef[e];
  }
  return c * (2.0 / mesh_.L);
}

GridFunction DiscreteSpace::to_grid(const VectorXd& c) const {
  std::vector<double> v(mesh_.M, 0.0);
  if (basis_.kind() == Basis::Kind::NodalHat) {
    for (int i = 0; i < mesh_.M; ++i) v[i] = c[i];
  } else {
    for (int i = 0; i < mesh_.M; ++i)
      for (int j = 0; j < dim(); ++j) v[i] += c[j] * basis_.value(j, mesh_.node(i + 1));
  }
  return GridFunction(mesh_, std::move(v));
}

// ---------------------------------------------------------------------------

NonlocalForm::NonlocalForm(std::shared_ptr<const DiscreteSpace> space, KernelFamily family,
                           SourceFamily source)
    : space_(std::move(space)), family_(std::move(family)), source_(std::move(source)) {
  if (std::abs(space_->s() - family_.s()) > 1e-15)
    throw ConfigError("discrete space and kernel use different fractional orders");
  if (std::abs(space_->mesh().L - family_.L()) > 1e-12)
    throw ConfigError("mesh and kernel use different domains");
  bind();
}

NonlocalForm::NonlocalForm(const Mesh1D& mesh, KernelFamily family, SourceFamily source,
                           QuadratureOptions opts)
    : NonlocalForm(std::make_shared<DiscreteSpace>(mesh, Basis::nodal_hat(mesh), family.s(),
                                                   family.g_minus(), opts),
                   std::move(family), std::move(source)) {}

void NonlocalForm::bind() {
  const auto& P = space_->pairs();
  pk_.resize(P.size());
  for (int k = 0; k < P.size(); ++k) pk_[k] = family_.local(P.x[k], P.y[k]);
  const auto& E = space_->exterior();
  const double L = space_->mesh().L;
  ekl_.resize(E.size());
  ekr_.resize(E.size());
  for (int k = 0; k < E.size(); ++k) {
    ekl_[k] = family_.local(E.x[k], 0.0);
    ekr_[k] = family_.local(E.x[k], L);
  }
  const auto& Ln = space_->line();
  ls_.resize(Ln.size());
  for (int k = 0; k < Ln.size(); ++k) ls_[k] = source_.local(Ln.x[k]);
  if (linear()) stiffness_ = assemble_hessian(PointValues{}, true, 0.0);
}

const MatrixXd& NonlocalForm::stiffness() const {
  if (!linear()) throw NumericError("stiffness matrix exists for quadratic kernels only");
  return stiffness_;
}

PointValues NonlocalForm::values(const VectorXd& c) const {
  if (c.size() != dim()) throw ConfigError("coefficient vector has the wrong length");
  const auto& P = space_->pairs();
  const auto& E = space_->exterior();
  const auto& Ln = space_->line();
  PointValues v;
  v.D.resize(P.size());
  for (int k = 0; k < P.size(); ++k) v.D[k] = P.diff.dot(k, c.data()) * P.rs[k];
  v.ue.resize(E.size());
  for (int k = 0; k < E.size(); ++k) v.ue[k] = E.vals.dot(k, c.data());
  v.ul.resize(Ln.size());
  for (int k = 0; k < Ln.size(); ++k) v.ul[k] = Ln.vals.dot(k, c.data());
  return v;
}

PointValues NonlocalForm::line_values(const VectorXd& c) const {
  const auto& Ln = space_->line();
  PointValues v;
  v.ul.resize(Ln.size());
  for (int k = 0; k < Ln.size(); ++k) v.ul[k] = Ln.vals.dot(k, c.data());
  return v;
}

ModularBreakdown NonlocalForm::modular_breakdown(const PointValues& v) const {
  const auto& P = space_->pairs();
  const auto& E = space_->exterior();
  const double s = space_->s();
  ModularBreakdown out;
  double acc = 0.0;
  for (int k = 0; k < P.size(); ++k) acc += P.W[k] * pk_[k].G(v.D[k]);
  out.interior = acc;
  double ext = 0.0, tail = 0.0;
  for (int k = 0; k < E.size(); ++k) {
    const double au = std::abs(v.ue[k]);
    if (au == 0.0) continue;
    ext += E.w[k] * (ekl_[k].exterior_primitive(au * E.dl_s[k]) +
                     ekr_[k].exterior_primitive(au * E.dr_s[k]));
    tail += E.w[k] * (ekl_[k].exterior_primitive(au * E.tl_s[k]) +
                      ekr_[k].exterior_primitive(au * E.tr_s[k]));
  }
  out.exterior = 2.0 / s * ext;
  out.tail = 2.0 / s * tail;
  return out;
}

double NonlocalForm::modular(const PointValues& v, double t) const {
  const auto& P = space_->pairs();
  const auto& E = space_->exterior();
  double acc = 0.0;
  for (int k = 0; k < P.size(); ++k) acc += P.W[k] * pk_[k].G(t * v.D[k]);
  double ext = 0.0;
  for (int k = 0; k < E.size(); ++k) {
    const double au = std::abs(t * v.ue[k]);
    if (au == 0.0) continue;
    ext += E.w[k] * (ekl_[k].exterior_primitive(au * E.dl_s[k]) +
                     ekr_[k].exterior_primitive(au * E.dr_s[k]));
  }
  return acc + 2.0 / space_->s() * ext;
}

double NonlocalForm::self_pairing(const PointValues& v, double t) const {
  const auto& P = space_->pairs();
  const auto& E = space_->exterior();
  double acc = 0.0;
  for (int k = 0; k < P.size(); ++k) {
    const double d = t * v.D[k];
    acc += P.W[k] * pk_[k].g(d) * d;
  }
  double ext = 0.0;
  for (int k = 0; k < E.size(); ++k) {
    const double au = std::abs(t * v.ue[k]);
    if (au == 0.0) continue;
    ext += E.w[k] * (ekl_[k].G(au * E.dl_s[k]) + ekr_[k].G(au * E.dr_s[k]));
  }
  return acc + 2.0 / space_->s() * ext;
}

double NonlocalForm::pairing(const PointValues& u, const PointValues& phi) const {
  const auto& P = space_->pairs();
  const auto& E = space_->exterior();
  double acc = 0.0;
  for (int k = 0; k < P.size(); ++k) acc += P.W[k] * pk_[k].g(u.D[k]) * phi.D[k];
  double ext = 0.0;
  for (int k = 0; k < E.size(); ++k) {
    const double uv = u.ue[k];
    if (uv == 0.0) continue;
    const double au = std::abs(uv);
    const double Gs = ekl_[k].G(au * E.dl_s[k]) + ekr_[k].G(au * E.dr_s[k]);
    ext += E.w[k] * phi.ue[k] * Gs / uv;
  }
  return acc + 2.0 / space_->s() * ext;
}

double NonlocalForm::source_primitive(const PointValues& v, double t) const {
  const auto& Ln = space_->line();
  double acc = 0.0;
  for (int k = 0; k < Ln.size(); ++k) acc += Ln.w[k] * ls_[k].F(t * v.ul[k]);
  return acc;
}

double NonlocalForm::source_moment(const PointValues& v, double t) const {
  const auto& Ln = space_->line();
  double acc = 0.0;
  for (int k = 0; k < Ln.size(); ++k) {
    const double u = t * v.ul[k];
    acc += Ln.w[k] * ls_[k].f(u) * u;
  }
  return acc;
}

double NonlocalForm::seminorm(const PointValues& v) const {
  const double J1 = modular(v);
  if (J1 == 0.0) return 0.0;
  if (family_.homogeneous()) return std::pow(J1, 1.0 / family_.constant_p());
  return luxemburg_solve([&](double t) { return modular(v, t); }, J1, family_.g_minus(),
                         family_.g_plus());
}

VectorXd NonlocalForm::pairing_gradient(const VectorXd& c) const {
  if (linear()) return stiffness_ * c;
  const PointValues v = values(c);
  const auto& P = space_->pairs();
  const auto& E = space_->exterior();
  VectorXd grad = VectorXd::Zero(dim());
  for (int k = 0; k < P.size(); ++k) {
    const double gk = P.W[k] * pk_[k].g(v.D[k]) * P.rs[k];
    for (int e = P.diff.off[k]; e < P.diff.off[k + 1]; ++e)
      grad[P.diff.idx[e]] += gk * P.diff.coef[e];
  }
  const double f = 2.0 / space_->s();
  for (int k = 0; k < E.size(); ++k) {
    const double uv = v.ue[k];
    if (uv == 0.0) continue;
    const double au = std::abs(uv);
    const double val = f * E.w[k] * (ekl_[k].G(au * E.dl_s[k]) + ekr_[k].G(au * E.dr_s[k])) / uv;
    for (int e = E.vals.off[k]; e < E.vals.off[k + 1]; ++e)
      grad[E.vals.idx[e]] += val * E.vals.coef[e];
  }
  return grad;
}

MatrixXd NonlocalForm::assemble_hessian(const PointValues& v, bool unit, double eps) const {
  const auto& P = space_->pairs();
  const auto& E = space_->exterior();
  const int n = dim();
  MatrixXd H = MatrixXd::Zero(n, n);
  const bool floor = family_.g_minus() < 2.0;
  for (int k = 0; k < P.size(); ++k) {
    double gp = 1.0;
    if (!unit) gp = floor ? pk_[k].g_prime_floored(v.D[k], eps) : pk_[k].g_prime(v.D[k]);
    const double wk = P.W[k] * gp * P.rs[k] * P.rs[k];
    if (wk == 0.0) continue;
    const int b = P.diff.off[k], e = P.diff.off[k + 1];
    for (int i = b; i < e; ++i) {
      const double ci = wk * P.diff.coef[i];
      const int ii = P.diff.idx[i];
      for (int j = b; j < e; ++j) H(ii, P.diff.idx[j]) += ci * P.diff.coef[j];
    }
  }
  const double f = 2.0 / space_->s();
  for (int k = 0; k < E.size(); ++k) {
    double val;
    if (unit) {
      val = 0.5 * (E.dl_s[k] * E.dl_s[k] + E.dr_s[k] * E.dr_s[k]);
    } else {
      const double au = std::max(std::abs(v.ue[k]), eps);
      val = 0.0;
      for (int side = 0; side < 2; ++side) {
        const LocalKernel& lk = side == 0 ? ekl_[k] : ekr_[k];
        const double T = au * (side == 0 ? E.dl_s[k] : E.dr_s[k]);
        double gv, Gv;
        lk.g_and_G(T, gv, Gv);
        val += (gv * T - Gv) / (au * au);
      }
    }
    val *= f * E.w[k];
    const int b = E.vals.off[k], e = E.vals.off[k + 1];
    for (int i = b; i < e; ++i)
      for (int j = b; j < e; ++j)
        H(E.vals.idx[i], E.vals.idx[j]) += val * E.vals.coef[i] * E.vals.coef[j];
  }
  return H;
}

MatrixXd NonlocalForm::pairing_hessian(const VectorXd& c, double eps) const {
  if (linear()) return stiffness_;
  return assemble_hessian(values(c), false, eps);
}

VectorXd NonlocalForm::source_vector(const VectorXd& c) const {
  VectorXd out = VectorXd::Zero(dim());
  if (source_.is_zero()) return out;
  const auto& Ln = space_->line();
  for (int k = 0; k < Ln.size(); ++k) {
    const double u = Ln.vals.dot(k, c.data());
    const double fv = Ln.w[k] * ls_[k].f(u);
    for (int e = Ln.vals.off[k]; e < Ln.vals.off[k + 1]; ++e)
      out[Ln.vals.idx[e]] += fv * Ln.vals.coef[e];
  }
  return out;
}

MatrixXd NonlocalForm::source_jacobian(const VectorXd& c) const {
  MatrixXd out = MatrixXd::Zero(dim(), dim());
  if (source_.is_zero()) return out;
  const auto& Ln = space_->line();
  for (int k = 0; k < Ln.size(); ++k) {
    const double u = Ln.vals.dot(k, c.data());
    const double fp = Ln.w[k] * ls_[k].f_prime(u);
    const int b = Ln.vals.off[k], e = Ln.vals.off[k + 1];
    for (int i = b; i < e; ++i)
      for (int j = b; j < e; ++j)
        out(Ln.vals.idx[i], Ln.vals.idx[j]) += fp * Ln.vals.coef[i] * Ln.vals.coef[j];
  }
  return out;
}

double NonlocalForm::l2_norm_sq(const VectorXd& c) const {
  return c.dot(space_->mass() * c);
}

// ---------------------------------------------------------------------------

double luxemburg_solve(const std::function<double(double)>& J, double J1, double e_minus,
                       double e_plus) {
  if (!std::isfinite(J1)) throw NumericError("luxemburg: non-finite modular");
  if (J1 <= 0.0) return 0.0;
  const double l1 = std::pow(J1, 1.0 / e_minus), l2 = std::pow(J1, 1.0 / e_plus);
  double a = std::log(std::min(l1, l2)) - 1e-12;
  double b = std::log(std::max(l1, l2)) + 1e-12;
  auto phi = [&](double mu) {
    const double v = J(std::exp(-mu));
    if (!std::isfinite(v)) throw NumericError("luxemburg: non-finite modular");
    return v;
  };
  double fa = phi(a) - 1.0, fb = phi(b) - 1.0;
  for (int i = 0; fa < 0.0 && i < 200; ++i) {
    a -= 1.0;
    fa = phi(a) - 1.0;
  }
  for (int i = 0; fb > 0.0 && i < 200; ++i) {
    b += 1.0;
    fb = phi(b) - 1.0;
  }
  if (std::abs(fa) <= 1e-10) return std::exp(a);
  if (std::abs(fb) <= 1e-10) return std::exp(b);
  // Illinois regula falsi on log J, which is close to linear in log lambda
  double la = std::log1p(fa), lb = std::log1p(fb);
  int side = 0;
  for (int it = 0; it < 300; ++it) {
    double mu = (a * lb - b * la) / (lb - la);
    if (!(mu > a && mu < b)) mu = 0.5 * (a + b);
    const double fm = phi(mu) - 1.0;
    if (std::abs(fm) <= 1e-10) return std::exp(mu);
    const double lm = std::log1p(fm);
    if (fm > 0.0) {
      a = mu;
      la = lm;
      if (side == 1) lb *= 0.5;
      side = 1;
    } else {
      b = mu;
      lb = lm;
      if (side == -1) la *= 0.5;
      side = -1;
    }
    if (std::exp(b) - std::exp(a) <= 1e-12 * std::exp(a)) return std::exp(0.5 * (a + b));
  }
  return std::exp(0.5 * (a + b));
}

namespace {

struct LineEval {
  double x, w, u;
};

template <class Fn>
void for_line_points(const GridFunction& u, int order, Fn&& fn) {
  const Mesh1D& m = u.mesh();
  const double h = m.h();
  const GaussRule& g = gauss_legendre(order);
  for (int c = 0; c <= m.M; ++c) {
    const double a = u.node_value(c), b = u.node_value(c + 1);
    for (int i = 0; i < g.size(); ++i) {
      const double xi = g.nodes[i];
      fn(LineEval{(c + xi) * h, h * g.weights[i], (1.0 - xi) * a + xi * b});
    }
  }
}

void exponents_for(ModularKind kind, const KernelFamily* fam, const SourceFamily* src,
                   double& em, double& ep) {
  switch (kind) {
    case ModularKind::L2: em = ep = 2.0; return;
    case ModularKind::Ghat:
      if (!fam) throw ConfigError("Ghat modular needs a kernel family");
      em = fam->g_minus();
      ep = fam->g_plus();
      return;
    case ModularKind::Phi:
      if (!src || src->is_zero()) throw ConfigError("Phi modular needs a nonzero source");
      em = src->h2_minus();
      ep = src->h2_plus();
      return;
  }
}

}  // namespace

double modular(const GridFunction& u, ModularKind kind, const KernelFamily* family,
               const SourceFamily* source) {
  double em, ep;
  exponents_for(kind, family, source, em, ep);
  double acc = 0.0;
  for_line_points(u, 6, [&](const LineEval& p) {
    const double au = std::abs(p.u);
    switch (kind) {
      case ModularKind::L2: acc += p.w * au * au; break;
      case ModularKind::Ghat: acc += p.w * family->G(p.x, p.x, au); break;
      case ModularKind::Phi: acc += p.w * std::pow(au, source->h2(p.x)); break;
    }
  });
  return acc;
}

double luxemburg_norm(const GridFunction& u, ModularKind kind, const KernelFamily* family,
                      const SourceFamily* source) {
  if (u.is_zero()) return 0.0;
  double em, ep;
  exponents_for(kind, family, source, em, ep);
  const double J1 = modular(u, kind, family, source);
  return luxemburg_solve([&](double t) { return modular(u * t, kind, family, source); }, J1, em,
                         ep);
}

double gagliardo_modular(const GridFunction& u, const KernelFamily& family,
                         QuadratureOptions opts) {
  if (u.is_zero()) return 0.0;
  NonlocalForm form(u.mesh(), family, SourceFamily::zero(family.L()), opts);
  return form.modular(form.space().coefficients(u));
}

double gagliardo_seminorm(const GridFunction& u, const KernelFamily& family,
                          QuadratureOptions opts) {
  if (u.is_zero()) return 0.0;
  NonlocalForm form(u.mesh(), family, SourceFamily::zero(family.L()), opts);
  return form.seminorm(form.space().coefficients(u));
}

double weak_pairing(const GridFunction& u, const GridFunction& phi, const KernelFamily& family,
                    QuadratureOptions opts) {
  NonlocalForm form(u.mesh(), family, SourceFamily::zero(family.L()), opts);
  return form.pairing(form.values(form.space().coefficients(u)),
                      form.values(form.space().coefficients(phi)));
}

// ---------------------------------------------------------------------------

std::vector<GridFunction> sample_directions(const Mesh1D& mesh, int n, std::uint64_t seed) {
  std::vector<GridFunction> out;
  const double L = mesh.L;
  const double pi = std::numbers::pi;
  auto normalized = [&](GridFunction g) {
    double acc = 0.0;
    for_line_points(g, 4, [&](const LineEval& p) { acc += p.w * p.u * p.u; });
    return acc > 0.0 ? g * (1.0 / std::sqrt(acc)) : g;
  };
  const int n_modes = std::min(6, n);
  for (int k = 1; k <= n_modes; ++k)
    out.push_back(normalized(GridFunction::from(mesh, [&](double x) { return std::sin(k * pi * x / L); })));
  const double centers[] = {0.5, 0.3, 0.7, 0.2, 0.8, 0.4, 0.6, 0.5};
  const double widths[] = {0.45, 0.25, 0.25, 0.18, 0.18, 0.3, 0.3, 0.2};
  for (int k = 0; k < 8 && static_cast<int>(out.size()) < n; ++k) {
    const double c = centers[k] * L, w = widths[k] * L;
    out.push_back(normalized(GridFunction::from(
        mesh, [&](double x) { return std::max(0.0, 1.0 - std::abs(x - c) / w); })));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  while (static_cast<int>(out.size()) < n) {
    double a[8];
    for (double& v : a) v = unif(rng);
    const double bump = 0.5 + 0.5 * unif(rng);
    auto fn = [&](double x) {
      double v = 0.0;
      for (int k = 0; k < 8; ++k) v += a[k] * std::sin((k + 1) * pi * x / L) / ((k + 1) * (k + 1));
      return v + bump * std::sin(pi * x / L);
    };
    GridFunction g = GridFunction::from(mesh, fn);
    if (!g.is_zero()) out.push_back(normalized(g));
  }
  return out;
}

double EmbeddingConstants::C_star_max(double g_minus, double g_plus) const {
  return std::max(std::pow(C_star, -g_minus), std::pow(C_star, -g_plus));
}

namespace {

// Luxemburg norm of the line modular int |u|^{e(x)} or int u^2 and its
// log-gradient in the coefficients.
struct LineNorm {
  const NonlocalForm& form;
  bool phi;  // true: exponent h2(x); false: L^2
  std::vector<double> expo;

  LineNorm(const NonlocalForm& f, bool use_phi) : form(f), phi(use_phi) {
    const auto& Ln = form.space().line();
    expo.resize(Ln.size(), 2.0);
    if (phi)
      for (int k = 0; k < Ln.size(); ++k) expo[k] = form.source().h2(Ln.x[k]);
  }

  double J(const std::vector<double>& ul, double t) const {
    const auto& Ln = form.space().line();
    double acc = 0.0;
    for (int k = 0; k < Ln.size(); ++k) acc += Ln.w[k] * std::pow(std::abs(t * ul[k]), expo[k]);
    return acc;
  }

  double norm(const Eigen::VectorXd& c, const std::vector<double>& ul) const {
    if (!phi) return std::sqrt(form.l2_norm_sq(c));
    const double J1 = J(ul, 1.0);
    return luxemburg_solve([&](double t) { return J(ul, t); }, J1, form.source().h2_minus(),
                           form.source().h2_plus());
  }

  Eigen::VectorXd log_gradient(const Eigen::VectorXd& c, const std::vector<double>& ul,
                               double nrm) const {
    if (!phi) return form.space().mass() * c / form.l2_norm_sq(c);
    const auto& Ln = form.space().line();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(c.size());
    double dot = 0.0;
    for (int k = 0; k < Ln.size(); ++k) {
      const double w = ul[k] / nrm;
      const double d = Ln.w[k] * expo[k] * std::pow(std::abs(w), expo[k] - 1.0) *
                       (w < 0 ? -1.0 : 1.0);
      dot += d * w;
      for (int e = Ln.vals.off[k]; e < Ln.vals.off[k + 1]; ++e)
        g[Ln.vals.idx[e]] += d * Ln.vals.coef[e];
    }
    return g / (dot * nrm);
  }
};

double ratio(const NonlocalForm& form, const LineNorm& ln, const Eigen::VectorXd& c) {
  const PointValues v = form.values(c);
  const double semi = form.seminorm(v);
  return semi > 0.0 ? ln.norm(c, v.ul) / semi : 0.0;
}

// Preconditioned ascent of ||v||_X / [v] from a starting direction.
double ascend(const NonlocalForm& form, const LineNorm& ln, Eigen::VectorXd c,
              const Eigen::LDLT<Eigen::MatrixXd>& pre, const Eigen::MatrixXd& K2) {
  double best = ratio(form, ln, c);
  for (int it = 0; it < 40; ++it) {
    const PointValues v = form.values(c);
    const double semi = form.seminorm(v);
    const double nrm = ln.norm(c, v.ul);
    const Eigen::VectorXd w = c / semi;
    const Eigen::VectorXd gJ = form.pairing_gradient(w);
    const Eigen::VectorXd glog = ln.log_gradient(c, v.ul, nrm) - gJ / (gJ.dot(w) * semi);
    Eigen::VectorXd d = pre.solve(glog);
    const double cn = std::sqrt(c.dot(K2 * c)), dn = std::sqrt(d.dot(K2 * d));
    if (!(dn > 0.0)) break;
    d *= cn / dn;
    double step = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Eigen::VectorXd trial = c + step * d;
      const double r = ratio(form, ln, trial);
      if (r > best) {
        const double gain = (r - best) / best;
        best = r;
        c = trial / std::sqrt(trial.dot(K2 * trial));
        improved = gain > 1e-13;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace

EmbeddingConstants estimate_embedding_constants(const NonlocalForm& form, int n_samples,
                                                std::uint64_t seed,
                                                const std::vector<Eigen::VectorXd>& extra) {
  if (n_samples < 32) throw ConfigError("embedding estimate needs at least 32 samples");
  const DiscreteSpace& sp = form.space();
  std::vector<Eigen::VectorXd> dirs;
  for (const GridFunction& g : sample_directions(sp.mesh(), n_samples, seed))
    dirs.push_back(sp.coefficients(g));
  dirs.insert(dirs.end(), extra.begin(), extra.end());

  const bool has_phi = !form.source().is_zero();
  LineNorm l2(form, false);
  std::optional<LineNorm> lphi;
  if (has_phi) lphi.emplace(form, true);

  EmbeddingConstants out;
  out.samples = static_cast<int>(dirs.size());
  int best2 = 0, bestphi = 0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const PointValues v = form.values(dirs[i]);
    const double semi = form.seminorm(v);
    if (!(semi > 0.0)) continue;
    const double r2 = l2.norm(dirs[i], v.ul) / semi;
    if (r2 > out.C_star) {
      out.C_star = r2;
      best2 = static_cast<int>(i);
    }
    if (has_phi) {
      const double rp = lphi->norm(dirs[i], v.ul) / semi;
      if (rp > out.C_1G) {
        out.C_1G = rp;
        bestphi = static_cast<int>(i);
      }
    }
  }
  // Ascent from the best samples, preconditioned by the quadratic stiffness.
  NonlocalForm quad(form.space_ptr(), KernelFamily::power(2.0, form.family().s(), form.family().L()),
                    SourceFamily::zero(form.family().L()));
  const Eigen::MatrixXd& K2 = quad.stiffness();
  Eigen::LDLT<Eigen::MatrixXd> pre(K2);
  out.C_star = std::max(out.C_star, ascend(form, l2, dirs[best2], pre, K2));
  if (has_phi) {
    out.C_1G = std::max(out.C_1G, ascend(form, *lphi, dirs[bestphi], pre, K2));
    const double h2m = form.source().h2_minus(), h2p = form.source().h2_plus();
    out.C_star_G = std::max(std::pow(out.C_1G, h2m), std::pow(out.C_1G, h2p));
    const double gm = form.family().g_minus(), gp = form.family().g_plus();
    out.C_max = std::max(std::pow(out.C_1G, gm), std::pow(out.C_1G, gp));
  }
  return out;
}

EmbeddingConstants estimate_embedding_constants(const Mesh1D& mesh, const KernelFamily& family,
                                                const SourceFamily& src, int n_samples) {
  NonlocalForm form(mesh, family, src);
  return estimate_embedding_constants(form, n_samples);
}

}  // namespace fracwell
