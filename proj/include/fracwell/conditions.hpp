#pragma once

#include <string>
#include <vector>

#include "fracwell/nfunction.hpp"
#include "fracwell/source.hpp"

namespace fracwell {

struct SamplingPlan {
  int n_x = 8;  // n_x * n_x point pairs on [0,L]^2
  double t_lo = 1e-6;
  double t_hi = 1e6;
  int per_decade = 10;

  std::string describe() const;
};

struct ConditionEntry {
  std::string name;
  bool pass = false;
  bool required = true;
  std::string witness;
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;
  std::vector<std::string> warnings;
  double delta2_K = 0.0;
  double alpha = 0.0;  // 0 when no admissible blow-up exponent
  std::string sampling;

  bool all_required_pass() const;
  const ConditionEntry* find(const std::string& name) const;
  // Names of required conditions that fail.
  std::vector<std::string> failures() const;
};

ConditionReport check_structural_conditions(const KernelFamily& family,
                                            const SourceFamily& src,
                                            const SamplingPlan& plan = {});

// Delta_2 constant sup G(2t)/G(t) over the sampling plan.
double delta2_constant(const KernelFamily& family, const SamplingPlan& plan = {});

// Outcome of the integrability test on the Sobolev conjugate of G(x,x,.).
struct IntegrabilityResult {
  bool near_zero_finite = false;
  bool at_infinity_divergent = false;
  double near_zero_value = 0.0;
  double tail_ratio_zero = 0.0;
  double tail_ratio_inf = 0.0;
};

IntegrabilityResult integrability_at(const KernelFamily& family, double x);

}  // namespace fracwell
