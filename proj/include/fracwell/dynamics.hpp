#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fracwell/space.hpp"
#include "fracwell/variational.hpp"

namespace fracwell {

enum class Scheme { ImplicitEulerNewton, ExplicitAdaptive };

struct IntegratorConfig {
  Scheme scheme = Scheme::ImplicitEulerNewton;
  double dt0 = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 1e-1;
  double t_end = 1.0;
  double newton_tol = 1e-10;
  int newton_max_iter = 30;
  double blowup_norm_threshold = 1e6;   // relative to |u0|
  double vanish_norm_threshold = 1e-10; // relative to |u0|
  int output_stride = 1;                // record every n-th accepted step
  bool adaptive = true;        // implicit scheme: relative-change step control
  double max_rel_change = 0.1; // per accepted implicit step
  double rtol = 1e-8;          // explicit scheme error control
  double atol = 1e-12;
  long max_steps = 10'000'000;
  bool record_seminorm = true;

  void validate() const;
};

struct State {
  double t = 0.0;
  Eigen::VectorXd c;
  double dt = 0.0;
};

struct TrajectorySample {
  double t = 0.0, l2_norm = 0.0, seminorm = 0.0, E = 0.0, I = 0.0, D = 0.0, r = 0.0,
         int_l2 = 0.0;
};

enum class RunStatus { Running, GlobalHorizon, Vanished, BlownUp, SolverFailure };
std::string to_string(RunStatus s);

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  RunStatus status = RunStatus::Running;
  std::optional<double> t_blow;
  std::optional<double> t_vanish;
  std::string message;
  Eigen::VectorXd final_c;
  double E0 = 0.0;
  long accepted = 0, rejected = 0;
  double max_energy_increase = 0.0;  // largest E_{k+1} - E_k over accepted steps
};

// One step of the semi-discrete system M c' = F(c). Returns false when the
// step was rejected (dt in `state` is then reduced); `state` advances
// otherwise and dt holds the proposed next step.
class Stepper {
 public:
  Stepper(const NonlocalForm& form, IntegratorConfig cfg);
  bool step(State& state);
  const IntegratorConfig& config() const { return cfg_; }

 private:
  bool implicit_step(State& s);
  bool explicit_step(State& s);
  Eigen::VectorXd rhs(const Eigen::VectorXd& c) const;  // M^{-1} F(c)

  const NonlocalForm* form_;
  IntegratorConfig cfg_;
  Eigen::LDLT<Eigen::MatrixXd> mass_ldlt_;
  Eigen::VectorXd k1_;  // first stage reused by the explicit pair
  bool k1_valid_ = false;
  double err_prev_ = 1.0;
};

// Single step helper, mostly for tests.
State step(const NonlocalForm& form, const State& s, const IntegratorConfig& cfg);

TrajectoryRecord run(const NonlocalForm& form, const Eigen::VectorXd& c0,
                     const IntegratorConfig& cfg);

double energy_identity_residual(const TrajectoryRecord& rec);
// Max relative deviation between the centered difference of |u|^2/2 and -I.
double nehari_identity_check(const TrajectoryRecord& rec);

struct Violation {
  double t = 0.0;
  std::string what;
};

enum class WellSide { Stable, Unstable };
std::vector<Violation> well_invariance_monitor(const TrajectoryRecord& rec, double d_hat,
                                               WellSide side);

struct ConcavityMonitor {
  double a = 0.0, b = 0.0, beta = 0.0, theta = 0.0, T = 0.0;
  std::vector<double> t, M, M_neg_theta;
  double max_second_difference = 0.0;  // normalized, positive means convex kink
  double scale = 0.0;
  bool concave = false;
};

ConcavityMonitor concavity_monitor(const TrajectoryRecord& rec, double d_hat, double alpha,
                                   double tol_rel = 1e-8);

struct BlowupAnalysis {
  std::optional<double> t_blow;
  std::optional<double> T_star;
  double integral_at_bound = 0.0;  // int_0^t |u|^2 at the last sample before 1.05 T*
  bool bound_respected = false;
  ConcavityMonitor concavity;
  std::string note;
};

BlowupAnalysis blowup_analysis(const TrajectoryRecord& rec, double d_hat, double alpha,
                               double divergence_threshold = 1e6);

enum class DecayRegime { FiniteTime, Exponential, Algebraic };
std::string to_string(DecayRegime r);

struct DecayAnalysis {
  DecayRegime regime = DecayRegime::Exponential;
  double delta_prime = 0.0;
  double fitted = 0.0;       // log-slope of |u|^2, or vanish time
  double predicted = 0.0;    // bound rate, t*, or unused
  bool bound_curve_respected = false;
  std::string note;
};

// Growth exponent g selects the regime: g < 2 finite-time, g = 2 exponential,
// g > 2 algebraic. slack widens the bound by the given fraction.
DecayAnalysis decay_analysis(const TrajectoryRecord& rec, double g, double C_star,
                             double delta_prime, double slack = 0.1);

struct CriticalEnergyReport {
  std::vector<int> k;
  std::vector<double> lambda, E, I;
  std::vector<RunStatus> status;
  double E0 = 0.0;
  bool energies_increasing = false;
  bool all_positive_I = false;
  bool none_blown_up = false;
};

CriticalEnergyReport critical_energy_driver(const NonlocalForm& form, const Eigen::VectorXd& c0,
                                            const IntegratorConfig& cfg,
                                            std::vector<int> ks = {2, 4, 8, 16});

struct HighEnergyReport {
  double E0 = 0.0, I0 = 0.0, l2_norm = 0.0;
  double lambda_hat = 0.0, Lambda_hat = 0.0;
  double corollary_threshold = 0.0;
  bool corollary_holds = false;
  std::string prediction;  // decay, blow-up, unclassified
  TrajectoryRecord record;
  bool l2_monotone = false;  // in the predicted direction
  bool outcome_matches = false;
};

HighEnergyReport high_energy_driver(const NonlocalForm& form, const Eigen::VectorXd& c0,
                                    const IntegratorConfig& cfg, const DepthEstimator& est,
                                    const EmbeddingConstants& consts);

}  // namespace fracwell
