#include "se23lqr/controller.hpp"

#include "se23lqr/error.hpp"

namespace se23lqr {

TrackingError tracking_error_se23(const PoseSE23& x, const PoseSE23& xr, LogBranch branch) {
  const PoseSE23 dx = se23_compose(se23_inverse(x), xr);
  TrackingError e;
  e.xi = se23_log(dx, branch).vector();
  e.delta_c = dx.rotation;
  e.delta_v = dx.velocity;
  e.delta_r = dx.position;
  return e;
}

TrackingError tracking_error_conventional(const PoseSE23& x, const PoseSE23& xr) {
  TrackingError e;
  e.delta_c = x.rotation.transpose() * xr.rotation;
  e.delta_v = xr.velocity - x.velocity;
  e.delta_r = xr.position - x.position;
  e.xi << so3_log(e.delta_c), e.delta_v, e.delta_r;
  return e;
}

TrackingError tracking_error(ErrorConvention convention, const PoseSE23& x, const PoseSE23& xr,
                             LogBranch branch) {
  return convention == ErrorConvention::kSE23 ? tracking_error_se23(x, xr, branch)
                                              : tracking_error_conventional(x, xr);
}

ControlCommand control_step(const StateVec& error, const Eigen::MatrixXd& gain,
                            const ReferenceSample& ref, const Mat3& delta_c) {
  if (gain.rows() != kInputDim || gain.cols() != kStateDim) {
    throw Error(ErrorCode::kDimensionMismatch, "control_step: gain must be 4x12");
  }
  ControlCommand cmd;
  cmd.delta_u = -gain * error;
  cmd.thrust = ref.thrust - cmd.delta_u[0];
  cmd.omega_cmd = delta_c * ref.omega - cmd.delta_u.tail<3>();
  return cmd;
}

ControllerState integrator_update(const ControllerState& state, const Vec3& delta_v,
                                  const Vec3& delta_r, double c1, double step, double limit) {
  ControllerState next = state;
  next.xi_i = (state.xi_i + step * (c1 * delta_r + delta_v)).cwiseMax(-limit).cwiseMin(limit);
  return next;
}

Vec3 torque_pi(const Vec3& omega_meas, const Vec3& omega_cmd, ControllerState& state,
               const EstimatedParams& est, const Mat3& c_ab, const Vec3& v_a,
               const TorqueGains& gains, double step) {
  const Vec3 e = omega_meas - omega_cmd;
  const Vec3 moment = est.drag_e * (c_ab.transpose() * v_a) + est.drag_f * omega_meas -
                      gains.k_omega * e - gains.k_i * state.omega_err_integral;
  state.omega_err_integral = (state.omega_err_integral + step * e)
                                 .cwiseMax(-gains.integral_limit)
                                 .cwiseMin(gains.integral_limit);
  return moment;
}

}  // namespace se23lqr
