#include "se23lqr/se23lqr.h"

#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "se23lqr/config.hpp"
#include "se23lqr/error.hpp"
#include "se23lqr/harness.hpp"

struct se23_config {
  se23lqr::ExperimentConfig cfg;
  std::string json;
};

struct se23_result {
  se23lqr::TrialResult result;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
se23_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return SE23_OK;
  } catch (const se23lqr::Error& e) {
    g_last_error = e.what();
    return static_cast<se23_status>(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SE23_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return SE23_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw se23lqr::Error(se23lqr::ErrorCode::kInvalidArgument, what);
}

namespace fs = std::filesystem;

void run_experiment(const se23lqr::ExperimentConfig& cfg, const std::string& experiment, const fs::path& dir) {
  using namespace se23lqr;
  const std::string echo = to_json(cfg);
  if (experiment == "simulate") {
    TrialResult r = run_scenario(cfg.scenario);
    r.label = "simulate";
    write_tick_csv(dir / "ticks.csv", r);
    write_summary_csv(dir / "summary.csv", {r});
    write_manifest(dir / "manifest.json", experiment, echo, cfg.scenario.seed);
  } else if (experiment == "sweep-heading") {
    write_summary_csv(dir / "summary.csv", heading_sweep(cfg.scenario, cfg.headings));
    write_manifest(dir / "manifest.json", experiment, echo, cfg.scenario.seed);
  } else if (experiment == "uncertainty") {
    ScenarioConfig base = cfg.scenario;
    base.initial_heading = cfg.uncertainty_heading;
    const auto rows = uncertainty_study(base, cfg.uncertainty_scale);
    for (const auto& r : rows) write_tick_csv(dir / ("ticks_" + r.label + "_" + r.variant + ".csv"), r);
    write_summary_csv(dir / "summary.csv", rows);
    write_manifest(dir / "manifest.json", experiment, echo, cfg.scenario.seed);
  } else if (experiment == "monte-carlo") {
    const MonteCarloReport report = monte_carlo(cfg.monte_carlo);
    write_summary_csv(dir / "trials.csv", report.trials);
    write_aggregate_csv(dir / "aggregate.csv", report.aggregate);
    write_manifest(dir / "manifest.json", experiment, echo, cfg.monte_carlo.master_seed);
  } else if (experiment == "gains") {
    const OfflineSolution offline = solve_offline(cfg.scenario);
    GainKey key;
    key.trajectory = make_trajectory(cfg.scenario.trajectory)->id();
    key.horizon = offline.gains.horizon();
    key.step = cfg.scenario.step();
    key.variant = cfg.scenario.variant.name();
    key.weights_hash = hash_weights(cfg.scenario.weights, cfg.scenario.c1);
    fs::create_directories(dir);
    {
      std::ofstream os(dir / "gains.csv", std::ios::binary | std::ios::trunc);
      if (!os) throw Error(ErrorCode::kIo, (dir / "gains.csv").string() + ": cannot open for writing");
      write_gain_csv(os, offline.gains, key);
    }
    {
      std::ofstream os(dir / "reference.csv", std::ios::binary | std::ios::trunc);
      if (!os) throw Error(ErrorCode::kIo, (dir / "reference.csv").string() + ": cannot open for writing");
      write_reference_csv(os, offline.reference);
    }
    write_manifest(dir / "manifest.json", experiment, echo, cfg.scenario.seed);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown experiment '" + experiment + "'");
  }
}

}  // namespace

extern "C" {

const char* se23_version(void) { return se23lqr::kVersion; }

const char* se23_last_error(void) { return g_last_error.c_str(); }

se23_status se23_config_parse(const char* json, se23_config** out) {
  return guarded([&] {
    require(out != nullptr, "se23_config_parse: out is NULL");
    *out = nullptr;
    auto handle = std::make_unique<se23_config>();
    handle->cfg = se23lqr::parse_config(json && *json ? json : "null");
    handle->json = se23lqr::to_json(handle->cfg);
    *out = handle.release();
  });
}

void se23_config_free(se23_config* cfg) { delete cfg; }

se23_status se23_config_set_seed(se23_config* cfg, uint64_t seed) {
  return guarded([&] {
    require(cfg != nullptr, "se23_config_set_seed: cfg is NULL");
    cfg->cfg.scenario.seed = seed;
    cfg->cfg.monte_carlo.master_seed = seed;
    cfg->json = se23lqr::to_json(cfg->cfg);
  });
}

se23_status se23_config_set_variant(se23_config* cfg, const char* variant) {
  return guarded([&] {
    require(cfg != nullptr && variant != nullptr, "se23_config_set_variant: NULL argument");
    const auto v = se23lqr::Variant::parse(variant);
    cfg->cfg.scenario.variant = v;
    // Monte-Carlo runs both conventions; only the linearisation scheme carries over.
    cfg->cfg.monte_carlo.base.variant.drag = v.drag;
    cfg->json = se23lqr::to_json(cfg->cfg);
  });
}

const char* se23_config_json(const se23_config* cfg) { return cfg ? cfg->json.c_str() : ""; }

se23_status se23_simulate(const se23_config* cfg, se23_result** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "se23_simulate: NULL argument");
    *out = nullptr;
    auto handle = std::make_unique<se23_result>();
    handle->result = se23lqr::run_scenario(cfg->cfg.scenario);
    handle->result.label = "simulate";
    *out = handle.release();
  });
}

void se23_result_free(se23_result* result) { delete result; }

se23_status se23_result_rmse(const se23_result* result, double rmse[3]) {
  return guarded([&] {
    require(result != nullptr && rmse != nullptr, "se23_result_rmse: NULL argument");
    rmse[0] = result->result.rmse_phi;
    rmse[1] = result->result.rmse_v;
    rmse[2] = result->result.rmse_r;
  });
}

se23_status se23_result_final_position_error(const se23_result* result, double* out) {
  return guarded([&] {
    require(result != nullptr && out != nullptr, "se23_result_final_position_error: NULL argument");
    *out = result->result.final_position_error;
  });
}

size_t se23_result_tick_count(const se23_result* result) { return result ? result->result.series.size() : 0; }

se23_status se23_result_tick(const se23_result* result, size_t index, double row[20]) {
  return guarded([&] {
    require(result != nullptr && row != nullptr, "se23_result_tick: NULL argument");
    require(index < result->result.series.size(), "se23_result_tick: index out of range");
    const auto& rec = result->result.series[index];
    row[0] = rec.t;
    for (int i = 0; i < 12; ++i) row[1 + i] = rec.xi[i];
    row[13] = rec.thrust;
    for (int i = 0; i < 3; ++i) {
      row[14 + i] = rec.omega_cmd[i];
      row[17 + i] = rec.moment[i];
    }
  });
}

se23_status se23_run_experiment(const se23_config* cfg, const char* experiment, const char* out_dir) {
  return guarded([&] {
    require(cfg != nullptr && experiment != nullptr && out_dir != nullptr, "se23_run_experiment: NULL argument");
    run_experiment(cfg->cfg, experiment, out_dir);
  });
}

}  // extern "C"
