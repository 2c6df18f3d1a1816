#include "se23lqr/dynamics.hpp"

#include <algorithm>

#include "se23lqr/error.hpp"

namespace se23lqr {

void QuadParams::validate() const {
  if (!(mass > 0.0)) throw Error(ErrorCode::kInvalidArgument, "QuadParams: mass must be positive");
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
      inertia.llt().info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "QuadParams: inertia must be symmetric positive definite");
  }
  const Mat3 off = drag_d - Mat3(drag_d.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() > 0.0 || drag_d.diagonal().minCoeff() < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "QuadParams: drag_d must be diagonal and nonnegative");
  }
  if (!(gravity >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "QuadParams: gravity must be nonnegative");
}

EstimatedParams EstimatedParams::scaled(const QuadParams& truth, double k_mass, double k_e,
                                        double k_f, double k_d) {
  return {k_mass * truth.mass, k_d * truth.drag_d, k_e * truth.drag_e, k_f * truth.drag_f,
          truth.gravity};
}

void EstimatedParams::validate() const {
  if (!(mass > 0.0)) throw Error(ErrorCode::kInvalidArgument, "EstimatedParams: mass must be positive");
}

PlantDerivative eval_derivative(const PlantState& state, const WrenchInput& input,
                                const QuadParams& p) {
  const Mat3& c = state.pose.rotation;
  const Vec3& v = state.pose.velocity;
  const Vec3& w = state.omega;
  const Vec3 v_body = c.transpose() * v;

  PlantDerivative d;
  d.velocity_dot = p.gravity_vector() + c.col(2) * (input.thrust / p.mass) -
                   c * (p.drag_d * v_body) / p.mass;
  d.omega_dot = p.inertia.ldlt().solve(input.moment - w.cross(p.inertia * w) - p.drag_e * v_body -
                                       p.drag_f * w);
  d.position_dot = v;
  d.rotation_dot = c * skew(w);
  return d;
}

namespace {

PlantState advance(const PlantState& s, const PlantDerivative& d, double h) {
  PlantState out;
  out.pose.rotation = s.pose.rotation + h * d.rotation_dot;
  out.pose.velocity = s.pose.velocity + h * d.velocity_dot;
  out.pose.position = s.pose.position + h * d.position_dot;
  out.omega = s.omega + h * d.omega_dot;
  return out;
}

}  // namespace

PlantState integrate_step(const PlantState& state, const WrenchInput& input,
                          const QuadParams& params, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "integrate_step: dt must be positive");
  const PlantDerivative k1 = eval_derivative(state, input, params);
  const PlantDerivative k2 = eval_derivative(advance(state, k1, 0.5 * dt), input, params);
  const PlantDerivative k3 = eval_derivative(advance(state, k2, 0.5 * dt), input, params);
  const PlantDerivative k4 = eval_derivative(advance(state, k3, dt), input, params);

  PlantDerivative sum;
  sum.rotation_dot = k1.rotation_dot + 2.0 * k2.rotation_dot + 2.0 * k3.rotation_dot + k4.rotation_dot;
  sum.velocity_dot = k1.velocity_dot + 2.0 * k2.velocity_dot + 2.0 * k3.velocity_dot + k4.velocity_dot;
  sum.position_dot = k1.position_dot + 2.0 * k2.position_dot + 2.0 * k3.position_dot + k4.position_dot;
  sum.omega_dot = k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot;

  PlantState next = advance(state, sum, dt / 6.0);
  next.pose.rotation = orthonormalize(next.pose.rotation);
  return next;
}

ActuatorFilter::ActuatorFilter(double tau) : tau_(tau) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "ActuatorFilter: tau must be nonnegative");
}

WrenchInput ActuatorFilter::apply(const WrenchInput& command, double dt) {
  if (tau_ == 0.0) {
    state_ = command;
    return state_;
  }
  const double alpha = std::min(dt / tau_, 1.0);
  state_.thrust += alpha * (command.thrust - state_.thrust);
  state_.moment += alpha * (command.moment - state_.moment);
  return state_;
}

ActuatorCommand saturate(const ActuatorCommand& command, const SaturationLimits& limits) {
  ActuatorCommand out;
  out.thrust = std::clamp(command.thrust, 0.0, limits.thrust_max);
  out.omega_cmd = command.omega_cmd.cwiseMax(-limits.omega_max).cwiseMin(limits.omega_max);
  out.moment = command.moment.cwiseMax(-limits.moment_max).cwiseMin(limits.moment_max);
  return out;
}

}  // namespace se23lqr
