#include "se23lqr/linearize.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "se23lqr/error.hpp"

namespace se23lqr {

namespace {

using Block = Eigen::Matrix<double, kStateDim + kInputDim, kStateDim + kInputDim>;

constexpr int kPhi = 0;
constexpr int kVel = 3;
constexpr int kPos = 6;
constexpr int kInt = 9;

void fill_common(ErrorJacobians& j, double c1) {
  // xi_i' = c1 dr + dv, identical for both conventions.
  j.a.block<3, 3>(kInt, kVel) = Mat3::Identity();
  j.a.block<3, 3>(kInt, kPos) = c1 * Mat3::Identity();
  // xi_phi' = delta omega
  j.b.block<3, 3>(kPhi, 1) = Mat3::Identity();
}

}  // namespace

std::string Variant::name() const {
  std::string s = convention == ErrorConvention::kSE23 ? "se23" : "conv";
  return s + (drag == DragModel::kWithDrag ? "-drag" : "-nodrag");
}

Variant Variant::parse(const std::string& tag) {
  for (const Variant& v : all()) {
    if (v.name() == tag) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown controller variant '" + tag + "'");
}

std::vector<Variant> Variant::all() {
  return {{ErrorConvention::kSE23, DragModel::kWithDrag},
          {ErrorConvention::kSE23, DragModel::kDragFree},
          {ErrorConvention::kConventional, DragModel::kWithDrag},
          {ErrorConvention::kConventional, DragModel::kDragFree}};
}

ErrorJacobians continuous_jacobians(const ReferenceSample& ref, const EstimatedParams& est,
                                    double c1, Variant variant) {
  ErrorJacobians j;
  j.variant = variant;
  fill_common(j, c1);

  const double m = est.mass;
  const Vec3 e3 = Vec3::UnitZ();
  const Mat3 w_x = skew(ref.omega);
  const Mat3& c = ref.attitude;
  const Mat3 thrust_x = skew(ref.thrust * e3);

  if (variant.convention == ErrorConvention::kSE23) {
    j.a.block<3, 3>(kPos, kVel) = Mat3::Identity();
    j.a.block<3, 3>(kPos, kPos) = -w_x;
    j.b.block<3, 1>(kVel, 0) = e3 / m;
    if (variant.drag == DragModel::kWithDrag) {
      const Mat3& d = est.drag_d;
      const Vec3 v_body = c.transpose() * ref.velocity;
      j.a.block<3, 3>(kVel, kPhi) = (skew(d * v_body) - d * skew(v_body) - thrust_x) / m;
      j.a.block<3, 3>(kVel, kVel) = -w_x - d / m;
    } else {
      j.a.block<3, 3>(kVel, kPhi) = -skew(ref.thrust * e3 / m);
      j.a.block<3, 3>(kVel, kVel) = -w_x;
    }
  } else {
    j.a.block<3, 3>(kPos, kVel) = Mat3::Identity();
    j.b.block<3, 1>(kVel, 0) = c * e3 / m;
    if (variant.drag == DragModel::kWithDrag) {
      const Mat3& d = est.drag_d;
      const Vec3 v_body = c.transpose() * ref.velocity;
      j.a.block<3, 3>(kVel, kPhi) = (c * skew(d * v_body) - c * d * skew(v_body) - c * thrust_x) / m;
      j.a.block<3, 3>(kVel, kVel) = -(c * d * c.transpose()) / m;
    } else {
      j.a.block<3, 3>(kVel, kPhi) = -(c * thrust_x) / m;
    }
  }
  return j;
}

DiscreteJacobians discretize_zoh(const StateMat& a, const InputMat& b, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "discretize_zoh: step must be positive");
  Block m = Block::Zero();
  m.topLeftCorner<kStateDim, kStateDim>() = a * step;
  m.topRightCorner<kStateDim, kInputDim>() = b * step;
  const Block e = m.exp();
  return {e.topLeftCorner<kStateDim, kStateDim>(), e.topRightCorner<kStateDim, kInputDim>(), step};
}

DiscreteJacobians discretize_zoh(const ErrorJacobians& jac, double step) {
  return discretize_zoh(jac.a, jac.b, step);
}

std::vector<DiscreteJacobians> jacobian_sequence(const std::vector<ReferenceSample>& track,
                                                 const EstimatedParams& est, double c1,
                                                 Variant variant, double step) {
  std::vector<DiscreteJacobians> seq;
  if (track.size() < 2) return seq;
  seq.reserve(track.size() - 1);
  for (std::size_t k = 0; k + 1 < track.size(); ++k) {
    seq.push_back(discretize_zoh(continuous_jacobians(track[k], est, c1, variant), step));
  }
  return seq;
}

StateVec nonlinear_error_rate(const ReferenceSample& ref, const EstimatedParams& model, double c1,
                              ErrorConvention convention, const StateVec& error,
                              const InputVec& input) {
  const double m = model.mass;
  const Mat3& d = model.drag_d;
  const Vec3 g = Vec3(0.0, 0.0, -model.gravity);
  const Vec3 e3 = Vec3::UnitZ();

  auto accel = [&](const Mat3& c, const Vec3& v, double thrust) -> Vec3 {
    return g + c * e3 * (thrust / m) - c * d * c.transpose() * v / m;
  };

  const Mat3& cr = ref.attitude;
  const Mat3 cr_dot = cr * skew(ref.omega);
  const Vec3 vr_dot = accel(cr, ref.velocity, ref.thrust);
  const double thrust = ref.thrust - input[0];

  StateVec rate = StateVec::Zero();
  if (convention == ErrorConvention::kSE23) {
    const TangentSE23 xi = TangentSE23::from_vector(error.head<9>());
    const PoseSE23 dx = se23_exp(xi);
    const PoseSE23 x = se23_compose(ref.pose(), se23_inverse(dx));
    const Vec3 omega = dx.rotation * ref.omega - input.tail<3>();

    Mat5 x_dot = Mat5::Zero();
    x_dot.block<3, 3>(0, 0) = x.rotation * skew(omega);
    x_dot.block<3, 1>(0, 3) = accel(x.rotation, x.velocity, thrust);
    x_dot.block<3, 1>(0, 4) = x.velocity;
    Mat5 xr_dot = Mat5::Zero();
    xr_dot.block<3, 3>(0, 0) = cr_dot;
    xr_dot.block<3, 1>(0, 3) = vr_dot;
    xr_dot.block<3, 1>(0, 4) = ref.velocity;

    const Mat5 x_inv = se23_inverse(x).matrix();
    const Mat5 dx_m = dx.matrix();
    const Mat5 dx_dot = -x_inv * x_dot * dx_m + x_inv * xr_dot;
    const Mat5 body = dx_dot * se23_inverse(dx).matrix();
    // Not se23_vee: the product is in se2(3) only up to rounding.
    rate.segment<3>(kPhi) = unskew(body.block<3, 3>(0, 0));
    rate.segment<3>(kVel) = body.block<3, 1>(0, 3);
    rate.segment<3>(kPos) = body.block<3, 1>(0, 4);
    rate.segment<3>(kInt) = c1 * dx.position + dx.velocity;
  } else {
    const Mat3 dc = so3_exp(error.segment<3>(kPhi));
    const Mat3 c = cr * dc.transpose();
    const Vec3 v = ref.velocity - error.segment<3>(kVel);
    const Vec3 omega = dc * ref.omega - input.tail<3>();

    const Mat3 c_dot = c * skew(omega);
    const Mat3 dc_dot = c_dot.transpose() * cr + c.transpose() * cr_dot;
    rate.segment<3>(kPhi) = unskew(dc_dot * dc.transpose());
    rate.segment<3>(kVel) = vr_dot - accel(c, v, thrust);
    rate.segment<3>(kPos) = ref.velocity - v;
    rate.segment<3>(kInt) = c1 * error.segment<3>(kPos) + error.segment<3>(kVel);
  }
  return rate;
}

double finite_difference_check(const ReferenceSample& ref, const EstimatedParams& model,
                               double c1, Variant variant, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "finite_difference_check: eps must be positive");
  EstimatedParams plant = model;
  if (variant.drag == DragModel::kDragFree) plant.drag_d.setZero();

  const ErrorJacobians jac = continuous_jacobians(ref, plant, c1, variant);
  Eigen::Matrix<double, kStateDim, kStateDim + kInputDim> analytic, numeric;
  analytic << jac.a, jac.b;

  for (int col = 0; col < kStateDim + kInputDim; ++col) {
    StateVec dx = StateVec::Zero();
    InputVec du = InputVec::Zero();
    if (col < kStateDim) dx[col] = eps; else du[col - kStateDim] = eps;
    const StateVec plus = nonlinear_error_rate(ref, plant, c1, variant.convention, dx, du);
    const StateVec minus = nonlinear_error_rate(ref, plant, c1, variant.convention, -dx, -du);
    numeric.col(col) = (plus - minus) / (2.0 * eps);
  }
  const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
  return (numeric - analytic).cwiseAbs().maxCoeff() / scale;
}

}  // namespace se23lqr
