#pragma once

#include <cstddef>

#include "se23lqr/dynamics.hpp"
#include "se23lqr/flatness.hpp"
#include "se23lqr/linearize.hpp"
#include "se23lqr/lqr.hpp"

namespace se23lqr {

/// Error between the vehicle and the reference in one of the two conventions.
struct TrackingError {
  Vec9 xi = Vec9::Zero();               // (phi, v, r) error coordinates fed to the gain
  Mat3 delta_c = Mat3::Identity();      // C_ab^T C_ar
  Vec3 delta_v = Vec3::Zero();          // velocity error driving the integrator
  Vec3 delta_r = Vec3::Zero();          // position error driving the integrator
};

/// Left-invariant error dX = X^-1 X_r; xi = log(dX). delta_v / delta_r are
/// the raw body-frame blocks of dX.
TrackingError tracking_error_se23(const PoseSE23& x, const PoseSE23& xr,
                                  LogBranch branch = LogBranch::kStrict);
/// Attitude error log(C_ab^T C_ar), inertial velocity and position differences.
TrackingError tracking_error_conventional(const PoseSE23& x, const PoseSE23& xr);
TrackingError tracking_error(ErrorConvention convention, const PoseSE23& x, const PoseSE23& xr,
                             LogBranch branch = LogBranch::kStrict);

struct ControllerState {
  Vec3 xi_i = Vec3::Zero();
  Vec3 omega_err_integral = Vec3::Zero();
  std::size_t k = 0;
};

struct ControlCommand {
  double thrust = 0.0;
  Vec3 omega_cmd = Vec3::Zero();
  InputVec delta_u = InputVec::Zero();
};

/// du = -K [xi; xi_i]; thrust = thrust_r - du_0; omega = dC w_r - du_{1..3}.
ControlCommand control_step(const StateVec& error, const Eigen::MatrixXd& gain,
                            const ReferenceSample& ref, const Mat3& delta_c);

/// xi_i <- clamp(xi_i + T (c1 dr + dv), +-limit).
ControllerState integrator_update(const ControllerState& state, const Vec3& delta_v,
                                  const Vec3& delta_r, double c1, double step, double limit);

struct TorqueGains {
  Mat3 k_omega = Mat3::Identity() * 5.0;
  Mat3 k_i = Mat3::Identity() * 3.0;
  double integral_limit = 2.0;
};

/// Body moment from drag feedforward plus PI on the body-rate error
/// e = omega_meas - omega_cmd. The moment uses the integral accumulated so far;
/// afterwards the integral is advanced by T e and clamped.
Vec3 torque_pi(const Vec3& omega_meas, const Vec3& omega_cmd, ControllerState& state,
               const EstimatedParams& est, const Mat3& c_ab, const Vec3& v_a,
               const TorqueGains& gains, double step);

}  // namespace se23lqr
