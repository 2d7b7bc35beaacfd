#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "fracwell/mesh.hpp"
#include "fracwell/nfunction.hpp"
#include "fracwell/source.hpp"

namespace fracwell {

struct QuadratureOptions {
  int far_order = 3;       // cell pairs at distance >= 8 cells
  int mid_order = 4;       // distance 4..7
  int near_order = 8;      // distance 2..3
  int singular_order = 6;  // per geometric panel along the singular direction
  int tau_order = 8;       // transverse direction of singular cells
  int line_order = 6;      // 1-D cells
  int boundary_order = 10; // graded boundary cells of the exterior integral
};

// Galerkin basis: nodal hats on the interior nodes or sin(j pi x / L).
class Basis {
 public:
  enum class Kind { NodalHat, SineSpectral };

  static Basis nodal_hat(const Mesh1D& mesh) { return Basis(Kind::NodalHat, mesh, mesh.M); }
  static Basis sine(const Mesh1D& mesh, int n_modes) {
    return Basis(Kind::SineSpectral, mesh, n_modes);
  }

  Kind kind() const { return kind_; }
  const Mesh1D& mesh() const { return mesh_; }
  int size() const { return n_; }
  double value(int j, double x) const;  // j = 0..size()-1

 private:
  Basis(Kind k, const Mesh1D& m, int n) : kind_(k), mesh_(m), n_(n) {}
  Kind kind_;
  Mesh1D mesh_;
  int n_;
};

// Sparse rows: for point k, entries off[k]..off[k+1] of (idx, coef).
struct SparseRows {
  std::vector<std::int32_t> off{0};
  std::vector<std::int32_t> idx;
  std::vector<double> coef;

  double dot(int k, const double* c) const {
    double v = 0.0;
    for (int e = off[k]; e < off[k + 1]; ++e) v += coef[e] * c[idx[e]];
    return v;
  }
};

// Quadrature of the Q-integral and of the 1-D integrals for one mesh, one
// basis and one fractional order.
class DiscreteSpace {
 public:
  DiscreteSpace(const Mesh1D& mesh, Basis basis, double s, double growth_min,
                QuadratureOptions opts = {});

  const Mesh1D& mesh() const { return mesh_; }
  const Basis& basis() const { return basis_; }
  double s() const { return s_; }
  int dim() const { return basis_.size(); }

  // Omega x Omega: weight W already divided by |x - y|; rs = |x - y|^{-s};
  // diff holds e_j(x) - e_j(y).
  struct Pairs {
    std::vector<double> x, y, W, rs;
    SparseRows diff;
    int size() const { return static_cast<int>(x.size()); }
  };
  // 1-D rule; vals holds e_j(x). For the exterior rule, dl_s = x^{-s} and
  // dr_s = (L - x)^{-s}, and tl_s/tr_s the same distances pushed out by R.
  struct Line {
    std::vector<double> x, w, dl_s, dr_s, tl_s, tr_s;
    SparseRows vals;
    int size() const { return static_cast<int>(x.size()); }
  };

  const Pairs& pairs() const { return pairs_; }
  const Line& exterior() const { return exterior_; }
  const Line& line() const { return line_; }
  const Eigen::MatrixXd& mass() const { return mass_; }
  double grading_exponent() const { return grade_m_; }

  Eigen::VectorXd coefficients(const GridFunction& u) const;
  GridFunction to_grid(const Eigen::VectorXd& c) const;

 private:
  void build_pairs(double growth_min);
  void build_lines();
  void to_sine_basis();

  Mesh1D mesh_;
  Basis basis_;
  double s_;
  QuadratureOptions opts_;
  double grade_m_ = 1.0;
  Pairs pairs_;
  Line exterior_;
  Line line_;
  Eigen::MatrixXd mass_;
};

// Values of a state at every quadrature point, reused along fibers t -> t u.
struct PointValues {
  std::vector<double> D;   // D^s u on the pair points
  std::vector<double> ue;  // u on the exterior points
  std::vector<double> ul;  // u on the line points
};

struct ModularBreakdown {
  double interior = 0.0;  // Omega x Omega
  double exterior = 0.0;  // twice Omega x complement, closed in y
  double tail = 0.0;      // part of `exterior` beyond distance R
  double total() const { return interior + exterior; }
};

// Kernel and source bound to a discrete space. All functionals act on
// coefficient vectors of the basis.
class NonlocalForm {
 public:
  NonlocalForm(std::shared_ptr<const DiscreteSpace> space, KernelFamily family,
               SourceFamily source);
  // Convenience: builds the space for the nodal hat basis.
  NonlocalForm(const Mesh1D& mesh, KernelFamily family, SourceFamily source,
               QuadratureOptions opts = {});

  const DiscreteSpace& space() const { return *space_; }
  std::shared_ptr<const DiscreteSpace> space_ptr() const { return space_; }
  const KernelFamily& family() const { return family_; }
  const SourceFamily& source() const { return source_; }
  int dim() const { return space_->dim(); }

  PointValues values(const Eigen::VectorXd& c) const;
  // Only the line-point values (enough for the source terms).
  PointValues line_values(const Eigen::VectorXd& c) const;

  // Gagliardo modular J_{s,G}(t u) and weak pairing (t u, t u).
  double modular(const PointValues& v, double t = 1.0) const;
  ModularBreakdown modular_breakdown(const PointValues& v) const;
  double self_pairing(const PointValues& v, double t = 1.0) const;
  double pairing(const PointValues& u, const PointValues& phi) const;
  // int F(x, t u), int f(x, t u) t u
  double source_primitive(const PointValues& v, double t = 1.0) const;
  double source_moment(const PointValues& v, double t = 1.0) const;

  double modular(const Eigen::VectorXd& c) const { return modular(values(c)); }
  double seminorm(const PointValues& v) const;
  double seminorm(const Eigen::VectorXd& c) const { return seminorm(values(c)); }

  // (u, e_j)_W for every j.
  Eigen::VectorXd pairing_gradient(const Eigen::VectorXd& c) const;
  // d/dc of pairing_gradient; g' floored at eps when g- < 2.
  Eigen::MatrixXd pairing_hessian(const Eigen::VectorXd& c, double eps = 1e-12) const;
  Eigen::VectorXd source_vector(const Eigen::VectorXd& c) const;
  Eigen::MatrixXd source_jacobian(const Eigen::VectorXd& c) const;

  double l2_norm_sq(const Eigen::VectorXd& c) const;

  // Quadratic kernels only: the constant stiffness matrix.
  bool linear() const { return family_.quadratic(); }
  const Eigen::MatrixXd& stiffness() const;

 private:
  void bind();
  Eigen::MatrixXd assemble_hessian(const PointValues& v, bool unit, double eps) const;

  std::shared_ptr<const DiscreteSpace> space_;
  KernelFamily family_;
  SourceFamily source_;
  std::vector<LocalKernel> pk_;  // per pair point
  std::vector<LocalKernel> ekl_, ekr_;  // exterior, left and right sides
  std::vector<LocalSource> ls_;  // per line point
  Eigen::MatrixXd stiffness_;
};

// ---- free functions on grid functions -------------------------------------

enum class ModularKind { Ghat, Phi, L2 };

// int Ghat_x(|u|), int |u|^{h2(x)}, or int u^2 over Omega.
double modular(const GridFunction& u, ModularKind kind, const KernelFamily* family = nullptr,
               const SourceFamily* source = nullptr);
double luxemburg_norm(const GridFunction& u, ModularKind kind,
                      const KernelFamily* family = nullptr,
                      const SourceFamily* source = nullptr);

double gagliardo_modular(const GridFunction& u, const KernelFamily& family,
                         QuadratureOptions opts = {});
double gagliardo_seminorm(const GridFunction& u, const KernelFamily& family,
                          QuadratureOptions opts = {});
double weak_pairing(const GridFunction& u, const GridFunction& phi, const KernelFamily& family,
                    QuadratureOptions opts = {});

// inf{lambda > 0 : J(1/lambda) <= 1} for a modular J(t) = modular(t u) with
// growth exponents in [e_minus, e_plus]; J1 = J(1).
double luxemburg_solve(const std::function<double(double)>& J, double J1, double e_minus,
                       double e_plus);

struct EmbeddingConstants {
  double C_star = 0.0;    // L^2 embedding
  double C_1G = 0.0;      // L^Phi embedding
  double C_star_G = 0.0;  // max{C_1G^{h2-}, C_1G^{h2+}}
  double C_max = 0.0;     // max{C_1G^{g-}, C_1G^{g+}}
  int samples = 0;
  // max{C_star^{-g-}, C_star^{-g+}}
  double C_star_max(double g_minus, double g_plus) const;
};

// Sampled lower bounds; `extra` directions join the sample set.
EmbeddingConstants estimate_embedding_constants(const NonlocalForm& form, int n_samples = 32,
                                                std::uint64_t seed = 7,
                                                const std::vector<Eigen::VectorXd>& extra = {});
EmbeddingConstants estimate_embedding_constants(const Mesh1D& mesh, const KernelFamily& family,
                                                const SourceFamily& src, int n_samples = 32);

// Standard direction sampler: low sine modes, tents, random smooth fields.
std::vector<GridFunction> sample_directions(const Mesh1D& mesh, int n, std::uint64_t seed);

}  // namespace fracwell
