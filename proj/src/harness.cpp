#include "se23lqr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "se23lqr/error.hpp"
#include "se23lqr/flatness.hpp"

namespace se23lqr {

std::size_t ScenarioConfig::ticks() const {
  return static_cast<std::size_t>(std::llround(duration * control_rate));
}

EstimatedParams ScenarioConfig::estimated() const {
  return EstimatedParams::scaled(truth, param_scale[0], param_scale[1], param_scale[2], param_scale[3]);
}

void ScenarioConfig::validate() const {
  if (!(duration > 0.0) || !(control_rate > 0.0) || plant_substeps < 1) {
    throw Error(ErrorCode::kConfig, "scenario: duration, control_rate and plant_substeps must be positive");
  }
  if (ticks() < 2) throw Error(ErrorCode::kConfig, "scenario: fewer than two control ticks");
  if (!(c1 > 0.0)) throw Error(ErrorCode::kConfig, "scenario: c1 must be positive");
  if (!(actuator_tau >= 0.0)) throw Error(ErrorCode::kConfig, "scenario: actuator_tau must be nonnegative");
  if (!(xi_i_limit > 0.0) || !(torque.integral_limit > 0.0)) {
    throw Error(ErrorCode::kConfig, "scenario: integrator limits must be positive");
  }
  if (!(limits.thrust_max > 0.0) || !(limits.omega_max > 0.0) || !(limits.moment_max > 0.0)) {
    throw Error(ErrorCode::kConfig, "scenario: saturation limits must be positive");
  }
  truth.validate();
  estimated().validate();
  weights.validate();
  if (weights.q.rows() != kStateDim || weights.r.rows() != kInputDim) {
    throw Error(ErrorCode::kConfig, "scenario: weights must be 12x12 (Q, S) and 4x4 (R)");
  }
}

bool TrialResult::operator==(const TrialResult& o) const {
  if (label != o.label || variant != o.variant || heading != o.heading || rmse_phi != o.rmse_phi ||
      rmse_v != o.rmse_v || rmse_r != o.rmse_r || transient_rmse_r != o.transient_rmse_r ||
      final_position_error != o.final_position_error || seed != o.seed || kappa != o.kappa ||
      series.size() != o.series.size()) {
    return false;
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& a = series[i];
    const auto& b = o.series[i];
    if (a.t != b.t || a.xi != b.xi || a.thrust != b.thrust || a.omega_cmd != b.omega_cmd ||
        a.moment != b.moment || a.err_phi != b.err_phi || a.err_v != b.err_v || a.err_r != b.err_r) {
      return false;
    }
  }
  return true;
}

namespace {

LqrWeights effective_weights(const ScenarioConfig& cfg) {
  LqrWeights w = cfg.weights;
  if (!cfg.integrator) {
    // Integrator states carry no cost, so their gain columns vanish.
    w.q.bottomRightCorner<3, 3>().setZero();
    w.s.bottomRightCorner<3, 3>().setZero();
  }
  return w;
}

PlantState initial_state(const ScenarioConfig& cfg, const ReferenceSample& ref0) {
  PlantState s;
  const Mat3 yaw = so3_exp(Vec3(0.0, 0.0, cfg.initial_heading));
  s.pose.rotation = cfg.initial_attitude == ScenarioConfig::InitialAttitude::kLevel
                        ? yaw
                        : Mat3(ref0.attitude * yaw.transpose());
  s.pose.velocity = ref0.velocity;
  s.pose.position = ref0.position + cfg.initial_position_offset;
  return s;
}

struct StateView {
  PoseSE23 pose;
  Vec3 omega;
};

StateView observe(const PlantState& truth, const NoiseConfig& noise, std::mt19937_64& rng) {
  StateView view{truth.pose, truth.omega};
  if (!noise.enabled) return view;
  std::normal_distribution<double> n01(0.0, 1.0);
  auto draw = [&](double sigma) { return Vec3(sigma * n01(rng), sigma * n01(rng), sigma * n01(rng)); };
  view.pose.rotation = truth.pose.rotation * so3_exp(draw(noise.attitude));
  view.pose.velocity += draw(noise.velocity);
  view.pose.position += draw(noise.position);
  view.omega += draw(noise.omega);
  return view;
}

ErrorNorms true_error(const PlantState& s, const ReferenceSample& ref) {
  return {so3_log(s.pose.rotation.transpose() * ref.attitude).norm(),
          (ref.velocity - s.pose.velocity).norm(), (ref.position - s.pose.position).norm()};
}

}  // namespace

OfflineSolution solve_offline(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto trajectory = make_trajectory(cfg.trajectory);
  const EstimatedParams est = cfg.estimated();
  const double step = cfg.step();
  const int n = static_cast<int>(cfg.ticks());

  OfflineSolution out;
  out.reference = build_reference_track(*trajectory, step, n, est);
  const double c1 = cfg.integrator ? cfg.c1 : 0.0;
  const auto jac = jacobian_sequence(out.reference, est, c1, cfg.variant, step);
  out.gains = riccati_sweep(jac, effective_weights(cfg));
  return out;
}

TrialResult run_scenario(const ScenarioConfig& cfg) { return run_scenario(cfg, solve_offline(cfg)); }

TrialResult run_scenario(const ScenarioConfig& cfg, const OfflineSolution& offline) {
  cfg.validate();
  const std::size_t n = cfg.ticks();
  if (offline.reference.size() != n + 1 || offline.gains.horizon() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "run_scenario: offline solution does not match the scenario horizon");
  }
  const double step = cfg.step();
  const double plant_dt = step / cfg.plant_substeps;
  const EstimatedParams est = cfg.estimated();
  const ErrorConvention convention = cfg.variant.convention;

  std::mt19937_64 rng(cfg.seed);
  PlantState plant = initial_state(cfg, offline.reference.front());
  ControllerState ctrl;
  ActuatorFilter actuator(cfg.actuator_tau);
  bool actuator_primed = false;

  TrialResult result;
  result.variant = cfg.variant.name();
  result.heading = cfg.initial_heading;
  result.seed = cfg.seed;
  result.kappa = cfg.param_scale;
  if (cfg.record_series) result.series.reserve(n);

  std::vector<ErrorNorms> norms;
  norms.reserve(n);
  const auto transient_ticks = static_cast<std::size_t>(std::llround(cfg.transient_window * cfg.control_rate));
  const auto final_ticks = static_cast<std::size_t>(std::llround(cfg.final_window * cfg.control_rate));

  for (std::size_t k = 0; k < n; ++k) {
    const ReferenceSample& ref = offline.reference[k];
    norms.push_back(true_error(plant, ref));

    const StateView view = observe(plant, cfg.noise, rng);
    const TrackingError err = tracking_error(convention, view.pose, ref.pose(), LogBranch::kPrincipal);
    StateVec aug;
    aug << err.xi, ctrl.xi_i;

    const ControlCommand cmd = control_step(aug, offline.gains.gain_at(k), ref, err.delta_c);
    ActuatorCommand act{cmd.thrust, cmd.omega_cmd, Vec3::Zero()};
    if (cfg.saturation) act = saturate(act, cfg.limits);
    act.moment = torque_pi(view.omega, act.omega_cmd, ctrl, est, view.pose.rotation, view.pose.velocity,
                           cfg.torque, step);
    if (cfg.saturation) act = saturate(act, cfg.limits);

    if (cfg.integrator) ctrl = integrator_update(ctrl, err.delta_v, err.delta_r, cfg.c1, step, cfg.xi_i_limit);
    ctrl.k = k + 1;

    const WrenchInput wrench{act.thrust, act.moment};
    if (!actuator_primed) {
      actuator.reset(wrench);
      actuator_primed = true;
    }
    for (int s = 0; s < cfg.plant_substeps; ++s) {
      plant = integrate_step(plant, actuator.apply(wrench, plant_dt), cfg.truth, plant_dt);
    }
    if (!plant.pose.position.allFinite() || !plant.omega.allFinite()) {
      std::ostringstream os;
      os << "run_scenario: plant state diverged at t = " << (k + 1) * step;
      throw Error(ErrorCode::kDiverged, os.str());
    }

    if (cfg.record_series) {
      TickRecord rec;
      rec.t = static_cast<double>(k) * step;
      rec.xi = aug;
      rec.thrust = act.thrust;
      rec.omega_cmd = act.omega_cmd;
      rec.moment = act.moment;
      rec.err_phi = norms.back().phi;
      rec.err_v = norms.back().v;
      rec.err_r = norms.back().r;
      result.series.push_back(rec);
    }
  }

  const ErrorNorms rmse = compute_rmse(norms);
  result.rmse_phi = rmse.phi;
  result.rmse_v = rmse.v;
  result.rmse_r = rmse.r;
  {
    const std::size_t m = std::clamp<std::size_t>(transient_ticks, 1, n);
    result.transient_rmse_r = compute_rmse({norms.begin(), norms.begin() + static_cast<std::ptrdiff_t>(m)}).r;
  }
  {
    const std::size_t m = std::clamp<std::size_t>(final_ticks, 1, n);
    double sum = 0.0;
    for (std::size_t i = n - m; i < n; ++i) sum += norms[i].r;
    result.final_position_error = sum / static_cast<double>(m);
  }
  return result;
}

ErrorNorms compute_rmse(const std::vector<ErrorNorms>& series) {
  if (series.empty()) throw Error(ErrorCode::kInvalidArgument, "compute_rmse: empty series");
  ErrorNorms acc;
  for (const auto& e : series) {
    acc.phi += e.phi * e.phi;
    acc.v += e.v * e.v;
    acc.r += e.r * e.r;
  }
  const double n = static_cast<double>(series.size());
  return {std::sqrt(acc.phi / n), std::sqrt(acc.v / n), std::sqrt(acc.r / n)};
}

std::vector<double> default_heading_grid() {
  std::vector<double> h;
  for (int deg = 0; deg <= 180; deg += 30) h.push_back(deg * std::numbers::pi / 180.0);
  return h;
}

std::vector<TrialResult> heading_sweep(const ScenarioConfig& base, const std::vector<double>& headings) {
  if (headings.empty()) throw Error(ErrorCode::kInvalidArgument, "heading_sweep: empty heading list");
  std::vector<TrialResult> rows;
  for (const Variant& variant : Variant::all()) {
    ScenarioConfig cfg = base;
    cfg.variant = variant;
    cfg.param_scale = {1.0, 1.0, 1.0, 1.0};
    cfg.noise.enabled = false;
    cfg.actuator_tau = 0.0;
    const OfflineSolution offline = solve_offline(cfg);
    for (double heading : headings) {
      cfg.initial_heading = heading;
      TrialResult r = run_scenario(cfg, offline);
      r.label = "heading";
      rows.push_back(std::move(r));
    }
  }
  // heading-major order
  std::stable_sort(rows.begin(), rows.end(),
                   [](const TrialResult& a, const TrialResult& b) { return a.heading < b.heading; });
  return rows;
}

std::vector<TrialResult> uncertainty_study(const ScenarioConfig& base, double scale) {
  std::vector<TrialResult> rows;
  for (ErrorConvention conv : {ErrorConvention::kSE23, ErrorConvention::kConventional}) {
    for (bool integrator : {true, false}) {
      ScenarioConfig cfg = base;
      cfg.variant = {conv, base.variant.drag};
      cfg.param_scale = {scale, scale, scale, scale};
      cfg.integrator = integrator;
      TrialResult r = run_scenario(cfg);
      r.label = integrator ? "integrator-on" : "integrator-off";
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

ScenarioConfig MonteCarloConfig::monte_carlo_base() {
  ScenarioConfig cfg;
  cfg.noise.enabled = true;
  cfg.actuator_tau = 0.02;
  cfg.variant = {ErrorConvention::kSE23, DragModel::kDragFree};
  cfg.record_series = false;
  cfg.initial_attitude = ScenarioConfig::InitialAttitude::kLevel;
  return cfg;
}

void MonteCarloConfig::validate() const {
  if (trials < 1) throw Error(ErrorCode::kConfig, "monte_carlo: trials must be >= 1");
  for (double s : sigma_kappa) {
    if (!(s >= 0.0)) throw Error(ErrorCode::kConfig, "monte_carlo: sigmas must be nonnegative");
  }
  if (!(sigma_position >= 0.0) || !(sigma_heading >= 0.0)) {
    throw Error(ErrorCode::kConfig, "monte_carlo: sigmas must be nonnegative");
  }
  if (!(percentiles[0] >= 0.0 && percentiles[0] <= percentiles[1] && percentiles[1] <= 100.0)) {
    throw Error(ErrorCode::kConfig, "monte_carlo: percentiles must satisfy 0 <= lo <= hi <= 100");
  }
  base.validate();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finaliser over a combination of both inputs
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "percentile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

ComponentStats stats(const std::vector<double>& x, const std::array<double, 2>& pct) {
  ComponentStats s;
  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / static_cast<double>(x.size());
  s.lower = percentile(x, pct[0]);
  s.upper = percentile(x, pct[1]);
  const auto inside = std::count_if(x.begin(), x.end(), [&](double v) { return v >= s.lower && v <= s.upper; });
  s.within_band = static_cast<double>(inside) / static_cast<double>(x.size());
  return s;
}

}  // namespace

MonteCarloReport monte_carlo(const MonteCarloConfig& cfg) {
  cfg.validate();
  const std::array<Variant, 2> controllers{Variant{ErrorConvention::kSE23, cfg.base.variant.drag},
                                           Variant{ErrorConvention::kConventional, cfg.base.variant.drag}};
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<TrialResult> results(trials * controllers.size());

  auto run_trial = [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, i);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::array<double, 4> kappa{};
    for (std::size_t j = 0; j < 4; ++j) kappa[j] = 1.0 + cfg.sigma_kappa[j] * n01(rng);
    Vec3 position;
    for (int j = 0; j < 3; ++j) position[j] = cfg.sigma_position * n01(rng);
    const double heading = cfg.sigma_heading * n01(rng);

    for (std::size_t c = 0; c < controllers.size(); ++c) {
      ScenarioConfig sc = cfg.base;
      sc.variant = controllers[c];
      sc.param_scale = kappa;
      sc.initial_heading = heading;
      sc.seed = seed;
      // The sampled position is absolute; the scenario wants an offset from r_r(0).
      sc.initial_position_offset = position - make_trajectory(sc.trajectory)->eval(0.0).position;
      TrialResult r = run_scenario(sc);
      r.label = "trial-" + std::to_string(i);
      results[i * controllers.size() + c] = std::move(r);
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(trials, cfg.workers > 0 ? static_cast<std::size_t>(cfg.workers) : hw);
  std::size_t next = 0;
  std::size_t failed_index = trials;
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = 0;
      {
        std::lock_guard lock(mu);
        if (failure || next >= trials) return;
        i = next++;
      }
      try {
        run_trial(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
        return;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const Error& e) {
      throw Error(e.code(), "monte_carlo: trial " + std::to_string(failed_index) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kInternal, "monte_carlo: trial " + std::to_string(failed_index) + ": " + e.what());
    }
  }

  MonteCarloReport report;
  report.trials = std::move(results);
  for (std::size_t c = 0; c < controllers.size(); ++c) {
    std::vector<double> phi, v, r;
    for (std::size_t i = 0; i < trials; ++i) {
      const auto& t = report.trials[i * controllers.size() + c];
      phi.push_back(t.rmse_phi);
      v.push_back(t.rmse_v);
      r.push_back(t.rmse_r);
    }
    report.aggregate.push_back(
        {controllers[c].name(), stats(phi, cfg.percentiles), stats(v, cfg.percentiles), stats(r, cfg.percentiles)});
  }
  return report;
}

}  // namespace se23lqr
