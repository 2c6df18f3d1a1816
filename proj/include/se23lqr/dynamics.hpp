#pragma once

#include "se23lqr/lie.hpp"

namespace se23lqr {

/// Rigid-body and drag parameters of the vehicle.
///
/// Defaults are the reference airframe: 1.1 kg, J = diag(0.0112, 0.01123, 0.02108),
/// rotor drag D = diag(0.605, 0.44, 0.275), E = 0.05 I, F = 0.1 I.
struct QuadParams {
  double mass = 1.1;
  Mat3 inertia = Vec3(0.0112, 0.01123, 0.02108).asDiagonal();
  Mat3 drag_d = Vec3(0.605, 0.44, 0.275).asDiagonal();
  Mat3 drag_e = Mat3::Identity() * 0.05;
  Mat3 drag_f = Mat3::Identity() * 0.1;
  double gravity = 9.81;

  /// Throws kInvalidArgument on nonpositive mass, non-SPD inertia or a
  /// non-diagonal / negative rotor-drag matrix.
  void validate() const;
  Vec3 gravity_vector() const { return {0.0, 0.0, -gravity}; }
};

/// The controller's belief about the vehicle: mass and drag estimates.
struct EstimatedParams {
  double mass = 1.1;
  Mat3 drag_d = Vec3(0.605, 0.44, 0.275).asDiagonal();
  Mat3 drag_e = Mat3::Identity() * 0.05;
  Mat3 drag_f = Mat3::Identity() * 0.1;
  double gravity = 9.81;

  /// m_hat = k_mass m, E_hat = k_e E, F_hat = k_f F, D_hat = k_d D.
  static EstimatedParams scaled(const QuadParams& truth, double k_mass, double k_e, double k_f,
                                double k_d);
  static EstimatedParams exact(const QuadParams& truth) { return scaled(truth, 1.0, 1.0, 1.0, 1.0); }
  void validate() const;
};

struct PlantState {
  PoseSE23 pose;
  Vec3 omega = Vec3::Zero();  // body rate, resolved in the body frame
};

/// Collective thrust along body z and body moment.
struct WrenchInput {
  double thrust = 0.0;
  Vec3 moment = Vec3::Zero();
};

struct PlantDerivative {
  Mat3 rotation_dot = Mat3::Zero();
  Vec3 velocity_dot = Vec3::Zero();
  Vec3 position_dot = Vec3::Zero();
  Vec3 omega_dot = Vec3::Zero();
};

/// Continuous-time equations of motion with linear rotor drag.
PlantDerivative eval_derivative(const PlantState& state, const WrenchInput& input,
                                const QuadParams& params);

/// One RK4 step with zero-order-held input; the attitude is projected back
/// onto SO(3) afterwards.
PlantState integrate_step(const PlantState& state, const WrenchInput& input,
                          const QuadParams& params, double dt);

/// Per-channel discrete first-order lag on the applied wrench. tau == 0 passes
/// the command through.
class ActuatorFilter {
 public:
  explicit ActuatorFilter(double tau = 0.0);

  void reset(const WrenchInput& value) { state_ = value; }
  const WrenchInput& state() const { return state_; }
  double tau() const { return tau_; }

  WrenchInput apply(const WrenchInput& command, double dt);

 private:
  double tau_;
  WrenchInput state_;
};

struct SaturationLimits {
  double thrust_max = 4.0 * 1.1 * 9.81;
  double omega_max = 8.0;
  double moment_max = 1.0;

  static SaturationLimits for_params(const QuadParams& params) {
    return {4.0 * params.mass * params.gravity, 8.0, 1.0};
  }
};

/// Everything the controller hands to the actuators in one tick.
struct ActuatorCommand {
  double thrust = 0.0;
  Vec3 omega_cmd = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
};

ActuatorCommand saturate(const ActuatorCommand& command, const SaturationLimits& limits);

}  // namespace se23lqr
