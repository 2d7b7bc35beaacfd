#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracwell/space.hpp"

namespace fracwell {

// E, I and I_delta of a state given by basis coefficients.
double energy(const NonlocalForm& form, const Eigen::VectorXd& c);
double nehari(const NonlocalForm& form, const Eigen::VectorXd& c);
double nehari_delta(const NonlocalForm& form, const Eigen::VectorXd& c, double delta);

// The ray lambda -> lambda v through a fixed direction. Point values are
// computed once; p-homogeneous kernels reuse a single modular evaluation.
class Fiber {
 public:
  Fiber(const NonlocalForm& form, Eigen::VectorXd direction);

  const Eigen::VectorXd& direction() const { return dir_; }
  const PointValues& values() const { return pv_; }

  double modular(double lambda) const;       // J(lambda v)
  double pairing(double lambda) const;       // (lambda v, lambda v)_W
  double source_primitive(double lambda) const;
  double source_moment(double lambda) const;  // int f(x, lambda v) lambda v
  double energy(double lambda) const { return modular(lambda) - source_primitive(lambda); }
  double nehari(double lambda, double delta = 1.0) const {
    return delta * pairing(lambda) - source_moment(lambda);
  }
  double eta(double lambda) const;
  double l2_norm(double lambda) const { return std::abs(lambda) * l2_; }

  // Unique positive root of I_delta(lambda v) = 0. Throws ConditionViolation
  // naming (g5) if no sign change appears within the bracket cap.
  double lambda_star(double delta = 1.0) const;

 private:
  const NonlocalForm* form_;
  Eigen::VectorXd dir_;
  PointValues pv_;
  bool homogeneous_ = false;
  double p_ = 2.0, J1_ = 0.0, P1_ = 0.0, l2_ = 0.0;
};

double lambda_star(const NonlocalForm& form, const Eigen::VectorXd& c, double delta = 1.0);
double eta(const NonlocalForm& form, const Eigen::VectorXd& c, double lambda);

// Search directions for well-depth estimates: sine modes, tents and random
// smooth fields in basis coefficients.
std::vector<Eigen::VectorXd> default_directions(const NonlocalForm& form, int n,
                                                std::uint64_t seed = 7);

struct DepthSample {
  double value = 0.0;  // min over directions of E(lambda*(delta, v) v)
  int argmin = -1;     // index of the minimizing direction
};

// Sampled well depth d(delta), an upper bound of the true infimum.
class DepthEstimator {
 public:
  DepthEstimator(const NonlocalForm& form, const std::vector<Eigen::VectorXd>& directions);

  DepthSample depth(double delta) const;
  void add(const NonlocalForm& form, Eigen::VectorXd direction);
  int size() const { return static_cast<int>(fibers_.size()); }
  const Fiber& fiber(int i) const { return fibers_[i]; }

 private:
  std::vector<Fiber> fibers_;
};

// Descent of v -> max_lambda E(lambda v) = E(lambda*(v) v) along the Nehari
// manifold, preconditioned by the pairing Hessian. Tightens the sampled depth
// towards the discrete ground-state level.
struct GroundState {
  Eigen::VectorXd c;  // a point on the Nehari manifold
  double value = 0.0; // E(c)
  int iterations = 0;
  bool converged = false;
};

GroundState nehari_descent(const NonlocalForm& form, const Eigen::VectorXd& start,
                           int max_iter = 200, double tol_rel = 1e-12);

struct DepthCurve {
  std::vector<double> delta;
  std::vector<double> value;
  int argmax = -1;
  bool increasing_left = false;   // strictly increasing up to delta = 1
  bool decreasing_right = false;  // strictly decreasing from delta = 1
};

DepthCurve depth_curve(const DepthEstimator& est, const std::vector<double>& grid);
std::vector<double> default_delta_grid();  // 0.1 .. 4, contains 1

struct BoundConstants {
  double delta = 1.0;
  double delta_min = 0.0;  // [u] >= delta_min on the Nehari manifold
  double y = 0.0;          // y(delta)
  double z = 0.0;          // z(delta)
  double C_d = 0.0;        // a priori seminorm bound for data below the well
  double depth_lower_bound = 0.0;  // (1 - g+/h1-) min{delta_min^{g-}, delta_min^{g+}}
  std::optional<double> T_star;
  std::optional<double> T_star_star;
  std::string notes;
};

// Closed-form constants from growth exponents, A and embedding estimates.
// d_hat enters C_d only.
BoundConstants bound_constants(const KernelFamily& family, const SourceFamily& src,
                               const EmbeddingConstants& consts, double delta, double d_hat);

struct BlowupTimes {
  double T_star = 0.0;
  std::optional<double> T_star_star;
};

// T* = 4 |u0|^2 (alpha-1) / (alpha (alpha-2)^2 (d - E0)). With a shifted start
// (t0, |u(t0)|^2, E(u(t0))) the second bound is t0 plus the same formula.
BlowupTimes blowup_time_bounds(double u0_norm_sq, double d_hat, double E0, double alpha);
double blowup_time_shifted(double t0, double norm_sq_t0, double d_hat, double E_t0,
                           double alpha);

struct ClassifyOptions {
  int n_directions = 64;
  std::uint64_t seed = 7;
  double tol_I_rel = 1e-8;
  double critical_band = 0.01;  // relative band around d_hat
  std::vector<double> delta_grid = default_delta_grid();
};

struct VariationalReport {
  double E = 0.0, I = 0.0, J = 0.0, pairing = 0.0, moment = 0.0;
  double seminorm = 0.0, l2_norm = 0.0, phi_norm = 0.0;
  double tol_I = 0.0;
  std::string region;        // W, V, Nehari, boundary, N+, N-
  std::string energy_level;  // low, critical, high
  bool is_zero = false;
  double d_hat = 0.0;
  std::optional<double> delta1, delta2;
  DepthCurve curve;
};

VariationalReport classify(const NonlocalForm& form, const Eigen::VectorXd& c,
                           const ClassifyOptions& opts = {});
// Same, reusing an existing depth estimator and curve.
VariationalReport classify(const NonlocalForm& form, const Eigen::VectorXd& c,
                           const DepthEstimator& est, const DepthCurve& curve,
                           const ClassifyOptions& opts = {});

// delta_1 < 1 < delta_2 with d(delta_i) = E, found on the isotonic branches.
std::pair<std::optional<double>, std::optional<double>> well_window(const DepthEstimator& est,
                                                                    const DepthCurve& curve,
                                                                    double E);

struct Interval {
  double a = 0.0, b = 0.0;
};

struct HighEnergyData {
  Eigen::VectorXd c;
  double E = 0.0, I = 0.0, l2_norm = 0.0;
  double zeta = 0.0;       // scale of the V-part
  double amplitude = 0.0;  // amplitude of the oscillating part
  int frequency = 0;
  double threshold = 0.0;  // right side of the N_- criterion
  bool criterion_holds = false;
};

// u = zeta v + A w with v a bump on the first interval and w an oscillation
// on the second, tuned so that E(u) = target. Throws NumericError with
// diagnostics when the root solves fail.
HighEnergyData construct_high_energy_data(const NonlocalForm& form, double target,
                                          Interval first, Interval second,
                                          const EmbeddingConstants& consts);

struct NehariExtrema {
  double lambda_zeta = 0.0;  // smallest sampled L^2 norm on N with E < zeta
  double Lambda_zeta = 0.0;  // largest
  int count = 0;
};

NehariExtrema nehari_extrema(const DepthEstimator& est, double zeta);

}  // namespace fracwell
