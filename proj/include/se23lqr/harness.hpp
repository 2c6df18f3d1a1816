#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "se23lqr/controller.hpp"
#include "se23lqr/dynamics.hpp"
#include "se23lqr/linearize.hpp"
#include "se23lqr/lqr.hpp"

namespace se23lqr {

/// Additive / right-multiplicative Gaussian perturbation of the state the
/// controller sees. The plant is never touched.
struct NoiseConfig {
  bool enabled = false;
  double attitude = 0.01;  // rad
  double velocity = 0.02;  // m/s
  double position = 0.02;  // m
  double omega = 0.005;    // rad/s
};

struct ScenarioConfig {
  std::string trajectory = "helix";
  double duration = 10.0;
  double control_rate = 400.0;
  int plant_substeps = 5;

  Variant variant;
  LqrWeights weights = LqrWeights::defaults();
  double c1 = 1.0;
  bool integrator = true;
  TorqueGains torque;
  double xi_i_limit = 5.0;

  /// kRelative: C_ab(0) = C_ar(0) exp(-psi e3^x), so the initial attitude
  /// error is exactly psi about body z. kLevel: C_ab(0) = exp(psi e3^x).
  enum class InitialAttitude { kRelative, kLevel };

  Vec3 initial_position_offset = Vec3::Zero();  // relative to r_r(0)
  double initial_heading = 0.0;                 // rad
  InitialAttitude initial_attitude = InitialAttitude::kRelative;

  QuadParams truth;
  // kappa_1..4: mass, E, F, D
  std::array<double, 4> param_scale{1.0, 1.0, 1.0, 1.0};

  double actuator_tau = 0.0;
  bool saturation = true;
  SaturationLimits limits = SaturationLimits::for_params(QuadParams{});

  NoiseConfig noise;
  std::uint64_t seed = 1;

  double transient_window = 5.0;  // s, from the start
  double final_window = 2.0;      // s, before the end
  bool record_series = true;

  double step() const { return 1.0 / control_rate; }
  std::size_t ticks() const;
  EstimatedParams estimated() const;
  /// Throws kConfig on nonpositive rates/duration or invalid parameters.
  void validate() const;
};

/// One control tick as seen by the controller, plus the true error norms.
struct TickRecord {
  double t = 0.0;
  StateVec xi = StateVec::Zero();
  double thrust = 0.0;
  Vec3 omega_cmd = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  double err_phi = 0.0;
  double err_v = 0.0;
  double err_r = 0.0;
};

struct ErrorNorms {
  double phi = 0.0;
  double v = 0.0;
  double r = 0.0;
};

struct TrialResult {
  std::string label;
  std::string variant;
  double heading = 0.0;
  double rmse_phi = 0.0;
  double rmse_v = 0.0;
  double rmse_r = 0.0;
  double transient_rmse_r = 0.0;
  double final_position_error = 0.0;  // mean |dr| over the final window
  std::uint64_t seed = 0;
  std::array<double, 4> kappa{1.0, 1.0, 1.0, 1.0};
  std::vector<TickRecord> series;

  bool operator==(const TrialResult&) const;
};

/// Offline part of a scenario: reference, Jacobians and gains.
struct OfflineSolution {
  std::vector<ReferenceSample> reference;
  GainSchedule gains;
};

OfflineSolution solve_offline(const ScenarioConfig& cfg);
TrialResult run_scenario(const ScenarioConfig& cfg);
TrialResult run_scenario(const ScenarioConfig& cfg, const OfflineSolution& offline);

/// Root mean square of per-tick error norms. Throws kInvalidArgument when empty.
ErrorNorms compute_rmse(const std::vector<ErrorNorms>& series);

std::vector<double> default_heading_grid();
/// Every variant at every heading, perfect environment; rows ordered by
/// heading then variant.
std::vector<TrialResult> heading_sweep(const ScenarioConfig& base, const std::vector<double>& headings);

/// Drag-free (or base.variant.drag) SE2(3) / conventional controllers with and
/// without the integrator, estimated parameters scaled by `scale`.
std::vector<TrialResult> uncertainty_study(const ScenarioConfig& base, double scale);

struct MonteCarloConfig {
  int trials = 100;
  std::array<double, 4> sigma_kappa{0.03, 0.15, 0.15, 0.15};
  double sigma_position = 1.0;   // m, about the origin
  double sigma_heading = 3.141592653589793;
  std::array<double, 2> percentiles{2.5, 97.5};
  std::uint64_t master_seed = 2020;
  int workers = 0;  // 0: hardware concurrency
  ScenarioConfig base = monte_carlo_base();

  /// Noise and actuator lag on, drag-free linearisation.
  static ScenarioConfig monte_carlo_base();
  void validate() const;
};

struct ComponentStats {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double within_band = 0.0;  // fraction of trials inside [lower, upper]
};

struct ControllerAggregate {
  std::string variant;
  ComponentStats phi, v, r;
};

struct MonteCarloReport {
  std::vector<TrialResult> trials;  // ordered by trial index, then controller
  std::vector<ControllerAggregate> aggregate;
};

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);
/// Linear interpolation between order statistics; p in [0, 100].
double percentile(std::vector<double> values, double p);
MonteCarloReport monte_carlo(const MonteCarloConfig& cfg);

// ---- outputs ----

inline constexpr const char* kVersion = "0.3.0";

void write_tick_csv(const std::filesystem::path& path, const TrialResult& result);
void write_summary_csv(const std::filesystem::path& path, const std::vector<TrialResult>& results);
void write_aggregate_csv(const std::filesystem::path& path, const std::vector<ControllerAggregate>& agg);
/// JSON manifest: the config echo (already serialised), seed and code version.
void write_manifest(const std::filesystem::path& path, const std::string& experiment,
                    const std::string& config_json, std::uint64_t seed);

}  // namespace se23lqr
