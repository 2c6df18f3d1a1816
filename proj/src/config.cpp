#include "se23lqr/config.hpp"

#include <numbers>
#include <set>

#include <json.hpp>

#include "se23lqr/error.hpp"

namespace se23lqr {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw Error(ErrorCode::kConfig, where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, where + "." + key + ": " + e.what());
  }
}

Vec3 to_vec3(const std::vector<double>& v, const std::string& where) {
  if (v.size() != 3) throw Error(ErrorCode::kConfig, where + ": expected 3 numbers");
  return {v[0], v[1], v[2]};
}

void read_vec3(const json& j, const char* key, Vec3& out, const std::string& where) {
  if (!j.contains(key)) return;
  std::vector<double> v;
  read(j, key, v, where);
  out = to_vec3(v, where + "." + key);
}

void read_diag3(const json& j, const char* key, Mat3& out, const std::string& where) {
  if (!j.contains(key)) return;
  Vec3 d;
  read_vec3(j, key, d, where);
  out = d.asDiagonal();
}

void read_diag(const json& j, const char* key, Eigen::MatrixXd& out, Eigen::Index n, const std::string& where) {
  if (!j.contains(key)) return;
  std::vector<double> v;
  read(j, key, v, where);
  if (static_cast<Eigen::Index>(v.size()) != n) {
    throw Error(ErrorCode::kConfig, where + "." + key + ": expected " + std::to_string(n) + " diagonal entries");
  }
  out = Eigen::Map<const Eigen::VectorXd>(v.data(), n).asDiagonal();
}

std::vector<double> diag(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd d = m.diagonal();
  return {d.data(), d.data() + d.size()};
}
std::vector<double> diag3(const Mat3& m) { return {m(0, 0), m(1, 1), m(2, 2)}; }
std::vector<double> vec3(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

void apply_scenario(const json& j, ScenarioConfig& c, const std::string& where) {
  check_keys(j,
             {"trajectory", "duration", "control_rate", "plant_substeps", "variant", "weights", "c1",
              "integrator", "torque", "xi_i_limit", "initial_position_offset", "initial_heading_deg", "initial_attitude",
              "true_params", "param_scale", "actuator_tau", "saturation", "noise", "seed",
              "transient_window", "final_window", "record_series"},
             where);
  read(j, "trajectory", c.trajectory, where);
  read(j, "duration", c.duration, where);
  read(j, "control_rate", c.control_rate, where);
  read(j, "plant_substeps", c.plant_substeps, where);
  if (j.contains("variant")) {
    std::string tag;
    read(j, "variant", tag, where);
    try {
      c.variant = Variant::parse(tag);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, where + ".variant: " + e.what());
    }
  }
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    const std::string ww = where + ".weights";
    check_keys(w, {"q", "r", "s"}, ww);
    read_diag(w, "q", c.weights.q, kStateDim, ww);
    read_diag(w, "r", c.weights.r, kInputDim, ww);
    read_diag(w, "s", c.weights.s, kStateDim, ww);
  }
  read(j, "c1", c.c1, where);
  read(j, "integrator", c.integrator, where);
  if (j.contains("torque")) {
    const json& t = j.at("torque");
    const std::string tw = where + ".torque";
    check_keys(t, {"k_omega", "k_i", "integral_limit"}, tw);
    read_diag3(t, "k_omega", c.torque.k_omega, tw);
    read_diag3(t, "k_i", c.torque.k_i, tw);
    read(t, "integral_limit", c.torque.integral_limit, tw);
  }
  read(j, "xi_i_limit", c.xi_i_limit, where);
  read_vec3(j, "initial_position_offset", c.initial_position_offset, where);
  if (j.contains("initial_heading_deg")) {
    double deg = 0.0;
    read(j, "initial_heading_deg", deg, where);
    c.initial_heading = deg * kDeg;
  }
  if (j.contains("initial_attitude")) {
    std::string mode;
    read(j, "initial_attitude", mode, where);
    if (mode == "relative") c.initial_attitude = ScenarioConfig::InitialAttitude::kRelative;
    else if (mode == "level") c.initial_attitude = ScenarioConfig::InitialAttitude::kLevel;
    else throw Error(ErrorCode::kConfig, where + ".initial_attitude: expected 'relative' or 'level'");
  }
  bool limits_from_mass = true;
  if (j.contains("true_params")) {
    const json& p = j.at("true_params");
    const std::string pw = where + ".true_params";
    check_keys(p, {"mass", "inertia", "drag_d", "drag_e", "drag_f", "gravity"}, pw);
    read(p, "mass", c.truth.mass, pw);
    read_diag3(p, "inertia", c.truth.inertia, pw);
    read_diag3(p, "drag_d", c.truth.drag_d, pw);
    read_diag3(p, "drag_e", c.truth.drag_e, pw);
    read_diag3(p, "drag_f", c.truth.drag_f, pw);
    read(p, "gravity", c.truth.gravity, pw);
  }
  if (j.contains("param_scale")) {
    std::vector<double> s;
    read(j, "param_scale", s, where);
    if (s.size() != 4) throw Error(ErrorCode::kConfig, where + ".param_scale: expected 4 numbers");
    std::copy(s.begin(), s.end(), c.param_scale.begin());
  }
  read(j, "actuator_tau", c.actuator_tau, where);
  if (j.contains("saturation")) {
    const json& s = j.at("saturation");
    const std::string sw = where + ".saturation";
    check_keys(s, {"enabled", "thrust_max", "omega_max", "moment_max"}, sw);
    read(s, "enabled", c.saturation, sw);
    if (s.contains("thrust_max")) limits_from_mass = false;
    read(s, "thrust_max", c.limits.thrust_max, sw);
    read(s, "omega_max", c.limits.omega_max, sw);
    read(s, "moment_max", c.limits.moment_max, sw);
  }
  if (limits_from_mass) c.limits.thrust_max = 4.0 * c.truth.mass * c.truth.gravity;
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    const std::string nw = where + ".noise";
    check_keys(n, {"enabled", "attitude", "velocity", "position", "omega"}, nw);
    read(n, "enabled", c.noise.enabled, nw);
    read(n, "attitude", c.noise.attitude, nw);
    read(n, "velocity", c.noise.velocity, nw);
    read(n, "position", c.noise.position, nw);
    read(n, "omega", c.noise.omega, nw);
  }
  read(j, "seed", c.seed, where);
  read(j, "transient_window", c.transient_window, where);
  read(j, "final_window", c.final_window, where);
  read(j, "record_series", c.record_series, where);
}

json scenario_json(const ScenarioConfig& c) {
  json j;
  j["trajectory"] = c.trajectory;
  j["duration"] = c.duration;
  j["control_rate"] = c.control_rate;
  j["plant_substeps"] = c.plant_substeps;
  j["variant"] = c.variant.name();
  j["weights"] = {{"q", diag(c.weights.q)}, {"r", diag(c.weights.r)}, {"s", diag(c.weights.s)}};
  j["c1"] = c.c1;
  j["integrator"] = c.integrator;
  j["torque"] = {{"k_omega", diag3(c.torque.k_omega)},
                 {"k_i", diag3(c.torque.k_i)},
                 {"integral_limit", c.torque.integral_limit}};
  j["xi_i_limit"] = c.xi_i_limit;
  j["initial_position_offset"] = vec3(c.initial_position_offset);
  j["initial_heading_deg"] = c.initial_heading / kDeg;
  j["initial_attitude"] = c.initial_attitude == ScenarioConfig::InitialAttitude::kLevel ? "level" : "relative";
  j["true_params"] = {{"mass", c.truth.mass},
                      {"inertia", diag3(c.truth.inertia)},
                      {"drag_d", diag3(c.truth.drag_d)},
                      {"drag_e", diag3(c.truth.drag_e)},
                      {"drag_f", diag3(c.truth.drag_f)},
                      {"gravity", c.truth.gravity}};
  j["param_scale"] = c.param_scale;
  j["actuator_tau"] = c.actuator_tau;
  j["saturation"] = {{"enabled", c.saturation},
                     {"thrust_max", c.limits.thrust_max},
                     {"omega_max", c.limits.omega_max},
                     {"moment_max", c.limits.moment_max}};
  j["noise"] = {{"enabled", c.noise.enabled},
                {"attitude", c.noise.attitude},
                {"velocity", c.noise.velocity},
                {"position", c.noise.position},
                {"omega", c.noise.omega}};
  j["seed"] = c.seed;
  j["transient_window"] = c.transient_window;
  j["final_window"] = c.final_window;
  j["record_series"] = c.record_series;
  return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  if (root.is_null()) return cfg;
  check_keys(root, {"scenario", "heading_sweep", "uncertainty", "monte_carlo"}, "config");

  if (root.contains("scenario")) apply_scenario(root.at("scenario"), cfg.scenario, "scenario");

  if (root.contains("heading_sweep")) {
    const json& h = root.at("heading_sweep");
    check_keys(h, {"headings_deg"}, "heading_sweep");
    std::vector<double> deg;
    read(h, "headings_deg", deg, "heading_sweep");
    if (h.contains("headings_deg")) {
      cfg.headings.clear();
      for (double d : deg) cfg.headings.push_back(d * kDeg);
    }
  }
  if (root.contains("uncertainty")) {
    const json& u = root.at("uncertainty");
    check_keys(u, {"scale", "heading_deg"}, "uncertainty");
    read(u, "scale", cfg.uncertainty_scale, "uncertainty");
    if (u.contains("heading_deg")) {
      double deg = 0.0;
      read(u, "heading_deg", deg, "uncertainty");
      cfg.uncertainty_heading = deg * kDeg;
    }
  }
  if (root.contains("monte_carlo")) {
    const json& m = root.at("monte_carlo");
    const std::string mw = "monte_carlo";
    check_keys(m, {"trials", "sigma_kappa", "sigma_position", "sigma_heading", "percentiles", "master_seed",
                   "workers", "scenario"},
               mw);
    read(m, "trials", cfg.monte_carlo.trials, mw);
    if (m.contains("sigma_kappa")) {
      std::vector<double> s;
      read(m, "sigma_kappa", s, mw);
      if (s.size() != 4) throw Error(ErrorCode::kConfig, "monte_carlo.sigma_kappa: expected 4 numbers");
      std::copy(s.begin(), s.end(), cfg.monte_carlo.sigma_kappa.begin());
    }
    read(m, "sigma_position", cfg.monte_carlo.sigma_position, mw);
    read(m, "sigma_heading", cfg.monte_carlo.sigma_heading, mw);
    if (m.contains("percentiles")) {
      std::vector<double> p;
      read(m, "percentiles", p, mw);
      if (p.size() != 2) throw Error(ErrorCode::kConfig, "monte_carlo.percentiles: expected 2 numbers");
      cfg.monte_carlo.percentiles = {p[0], p[1]};
    }
    read(m, "master_seed", cfg.monte_carlo.master_seed, mw);
    read(m, "workers", cfg.monte_carlo.workers, mw);
    if (m.contains("scenario")) apply_scenario(m.at("scenario"), cfg.monte_carlo.base, "monte_carlo.scenario");
  }
  return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) { return scenario_json(cfg).dump(); }

std::string to_json(const ExperimentConfig& cfg) {
  json j;
  j["scenario"] = scenario_json(cfg.scenario);
  std::vector<double> deg;
  for (double h : cfg.headings) deg.push_back(h / kDeg);
  j["heading_sweep"] = {{"headings_deg", deg}};
  j["uncertainty"] = {{"scale", cfg.uncertainty_scale}, {"heading_deg", cfg.uncertainty_heading / kDeg}};
  const auto& m = cfg.monte_carlo;
  j["monte_carlo"] = {{"trials", m.trials},
                      {"sigma_kappa", m.sigma_kappa},
                      {"sigma_position", m.sigma_position},
                      {"sigma_heading", m.sigma_heading},
                      {"percentiles", m.percentiles},
                      {"master_seed", m.master_seed},
                      {"workers", m.workers},
                      {"scenario", scenario_json(m.base)}};
  return j.dump();
}

}  // namespace se23lqr
