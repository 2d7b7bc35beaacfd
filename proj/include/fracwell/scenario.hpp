#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracwell/conditions.hpp"
#include "fracwell/dynamics.hpp"
#include "fracwell/mesh.hpp"
#include "fracwell/nfunction.hpp"
#include "fracwell/source.hpp"
#include "fracwell/space.hpp"
#include "fracwell/variational.hpp"

namespace fracwell {

inline constexpr int kSchemaVersion = 1;

struct KernelSpec {
  std::string type = "power";  // power | power_variable | double_phase | orlicz_power_log
  std::string p = "2";         // expression in x, y for power_variable
  std::string q = "4";         // double_phase upper exponent
  std::string a = "1";         // double_phase weight a(x, y)
  double s = 0.5;
};

struct SourceSpec {
  std::string type = "single_power";  // zero | single_power | two_power
  double q = 3.0;                      // single_power
  std::string coeff = "1";
  std::string a = "1", b = "1", q1 = "3", q2 = "4";  // two_power, expressions in x
};

struct InitialSpec {
  // expr: closed form; fiber: scale * lambda*(direction) * direction;
  // critical: scale * lambda*(v) * v for the sampled depth minimizer v;
  // high_energy: constructor output; file: grid-function CSV
  std::string type = "fiber";
  std::string expr = "sin(pi*x)";
  double scale = 0.5;
  double delta = 1.0;
  double target = 0.0;         // high_energy: absolute target, or
  double target_factor = 3.0;  // multiple of the sampled depth when target <= 0
  Interval first{0.05, 0.45}, second{0.55, 0.95};
  std::string path;
};

struct AnalysisSpec {
  int n_directions = 64;
  int embedding_samples = 32;
  std::vector<double> delta_grid = default_delta_grid();
  double safety = 0.9;  // theorem checks use safety * d_hat
  std::optional<double> delta_prime;  // decay rate parameter, default (delta1 + 1) / 2
  bool classify = true;
  bool refine_depth = true;  // add the Nehari-descent minimizer to the directions
};

struct SweepSpec {
  std::string parameter;  // initial.scale | initial.delta | kernel.s | mesh.M | seed
  std::vector<double> values;
};

struct ScenarioConfig {
  std::string name = "custom";
  std::string result;  // statement of the theorem a preset exercises
  KernelSpec kernel;
  SourceSpec source;
  Mesh1D mesh{1.0, 64};
  IntegratorConfig integrator;
  InitialSpec initial;
  AnalysisSpec analysis;
  std::optional<SweepSpec> sweep;
  std::uint64_t seed = 7;
};

ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& cfg);

std::vector<std::string> preset_names();
ScenarioConfig preset(const std::string& name);

KernelFamily build_kernel(const KernelSpec& spec, double L);
SourceFamily build_source(const SourceSpec& spec, double L);

// Everything a command needs, built once from a config.
struct ScenarioContext {
  ScenarioConfig cfg;
  std::shared_ptr<NonlocalForm> form;
  std::vector<Eigen::VectorXd> directions;
  std::unique_ptr<DepthEstimator> depth;
  DepthCurve curve;
  double d_hat = 0.0;

  explicit ScenarioContext(ScenarioConfig c);
  // Depth estimate on demand (the sampler is the expensive part).
  void ensure_depth();
  Eigen::VectorXd initial_data();
  EmbeddingConstants embedding();

 private:
  std::optional<EmbeddingConstants> embedding_;
};

// Command implementations behind the CLI. Return the process exit code:
// 0 ok, 1 condition failure, 2 config error, 3 numeric error.
int cmd_check_family(const ScenarioConfig& cfg, const std::filesystem::path& out,
                     std::ostream& log);
int cmd_classify(const ScenarioConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_depth_curve(const ScenarioConfig& cfg, const std::filesystem::path& out,
                    std::ostream& log);
int cmd_run(const ScenarioConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_sweep(const ScenarioConfig& cfg, const std::filesystem::path& out, std::ostream& log,
              int threads);
int cmd_report(const std::filesystem::path& out, std::ostream& log);

// Exception-to-exit-code mapping shared by the commands.
int guarded(const std::function<int()>& body, std::ostream& log);

}  // namespace fracwell
