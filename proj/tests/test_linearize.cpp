#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "se23lqr/error.hpp"
#include "se23lqr/linearize.hpp"

using namespace se23lqr;

namespace {

using Full = Eigen::Matrix<double, kStateDim, kStateDim + kInputDim>;

ReferenceSample hover_sample(const EstimatedParams& est) {
  ReferenceSample r;
  r.thrust = est.mass * est.gravity;
  return r;
}

ReferenceSample random_sample(std::mt19937_64& rng) {
  ReferenceSample r;
  r.attitude = so3_exp(oracle::random_ball(rng, 3.0));
  r.velocity = oracle::random_box(rng, 4.0);
  r.position = oracle::random_box(rng, 4.0);
  r.omega = oracle::random_box(rng, 2.0);
  r.thrust = 6.0 + 10.0 * std::uniform_real_distribution<double>(0, 1)(rng);
  return r;
}

// Error coordinates of a vehicle state against the reference, built from the
// lie module only.
StateVec error_of(ErrorConvention conv, const PoseSE23& x, const PoseSE23& xr, const Vec3& xi_i) {
  StateVec e;
  if (conv == ErrorConvention::kSE23) {
    e << se23_log(se23_compose(se23_inverse(x), xr)).vector(), xi_i;
  } else {
    e << so3_log(x.rotation.transpose() * xr.rotation), xr.velocity - x.velocity, xr.position - x.position, xi_i;
  }
  return e;
}

PoseSE23 vehicle_from_error(ErrorConvention conv, const PoseSE23& xr, const StateVec& e) {
  if (conv == ErrorConvention::kSE23) {
    return se23_compose(xr, se23_inverse(se23_exp(TangentSE23::from_vector(e.head<9>()))));
  }
  return {xr.rotation * so3_exp(e.head<3>()).transpose(), xr.velocity - e.segment<3>(3),
          xr.position - e.segment<3>(6)};
}

// d(error)/dt by a central time difference. Vehicle and reference are both
// advanced with the plant's translational equations (dynamics module) and
// the commanded rates; the integrator rate is c1 dr + dv of the raw error.
StateVec time_rate(const ReferenceSample& ref, const QuadParams& plant, double c1, ErrorConvention conv,
                   const StateVec& e, const InputVec& du) {
  const double h = 1e-5;
  const PoseSE23 xr = ref.pose();
  const PoseSE23 x = vehicle_from_error(conv, xr, e);
  const Mat3 dc = x.rotation.transpose() * xr.rotation;
  const double thrust = ref.thrust - du[0];
  const Vec3 omega = dc * ref.omega - du.tail<3>();

  const PlantDerivative dx = eval_derivative({x, omega}, {thrust, Vec3::Zero()}, plant);
  const PlantDerivative dr = eval_derivative({xr, ref.omega}, {ref.thrust, Vec3::Zero()}, plant);
  auto advance = [&](double s) {
    const PoseSE23 xs{x.rotation * so3_exp(s * omega), x.velocity + s * dx.velocity_dot, x.position + s * x.velocity};
    const PoseSE23 rs{xr.rotation * so3_exp(s * ref.omega), xr.velocity + s * dr.velocity_dot,
                      xr.position + s * xr.velocity};
    return error_of(conv, xs, rs, Vec3::Zero());
  };
  StateVec rate = (advance(h) - advance(-h)) / (2 * h);
  Vec3 dv, dp;
  if (conv == ErrorConvention::kSE23) {
    const PoseSE23 d = se23_compose(se23_inverse(x), xr);
    dv = d.velocity;
    dp = d.position;
  } else {
    dv = e.segment<3>(3);
    dp = e.segment<3>(6);
  }
  rate.tail<3>() = c1 * dp + dv;
  return rate;
}

Full oracle_jacobian(const ReferenceSample& ref, const EstimatedParams& est, double c1, Variant v) {
  QuadParams plant;
  plant.mass = est.mass;
  plant.gravity = est.gravity;
  plant.drag_d = v.drag == DragModel::kWithDrag ? est.drag_d : Mat3::Zero();
  const double eps = 1e-3;
  Full out;
  for (int col = 0; col < kStateDim + kInputDim; ++col) {
    StateVec e = StateVec::Zero();
    InputVec u = InputVec::Zero();
    if (col < kStateDim) e[col] = eps; else u[col - kStateDim] = eps;
    out.col(col) = (time_rate(ref, plant, c1, v.convention, e, u) - time_rate(ref, plant, c1, v.convention, -e, -u)) /
                   (2 * eps);
  }
  return out;
}

double relative_gap(const Full& numeric, const ErrorJacobians& j) {
  Full analytic;
  analytic << j.a, j.b;
  return (numeric - analytic).cwiseAbs().maxCoeff() / std::max(1.0, analytic.cwiseAbs().maxCoeff());
}

}  // namespace

TEST(Variant, NamesRoundTrip) {
  for (const Variant& v : Variant::all()) EXPECT_EQ(Variant::parse(v.name()), v);
  EXPECT_EQ(Variant::all().size(), 4u);
  EXPECT_THROW(Variant::parse("se3-drag"), Error);
}

TEST(Jacobians, Se23HoverDragFree) {
  const EstimatedParams est;
  const ErrorJacobians j = continuous_jacobians(hover_sample(est), est, 1.0, {ErrorConvention::kSE23, DragModel::kDragFree});
  EXPECT_LT((j.a.block<3, 3>(3, 0) + skew(Vec3(0, 0, 9.81))).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_TRUE((j.a.block<3, 3>(3, 3)) == (Mat3::Zero()));
  EXPECT_TRUE((j.a.block<3, 3>(6, 3)) == (Mat3::Identity()));
  EXPECT_TRUE((j.a.block<3, 3>(6, 0)) == (Mat3::Zero()));
  EXPECT_TRUE((j.a.block<3, 3>(6, 6)) == (Mat3::Zero()));
  EXPECT_TRUE((j.a.block<3, 3>(6, 9)) == (Mat3::Zero()));
  EXPECT_TRUE((j.a.block<3, 3>(9, 3)) == (Mat3::Identity()));
  EXPECT_TRUE((j.a.block<3, 3>(9, 6)) == (Mat3::Identity()));
  EXPECT_TRUE((j.b.block<3, 3>(0, 1)) == (Mat3::Identity()));
  EXPECT_NEAR(j.b(5, 0), 1.0 / 1.1, 1e-15);
}

TEST(Jacobians, ConventionalMatchesSe23InputAtIdentity) {
  const EstimatedParams est;
  ReferenceSample r = hover_sample(est);
  r.velocity = Vec3(1, -2, 0.5);
  const auto conv = continuous_jacobians(r, est, 1.0, {ErrorConvention::kConventional, DragModel::kDragFree});
  const auto se23 = continuous_jacobians(r, est, 1.0, {ErrorConvention::kSE23, DragModel::kDragFree});
  EXPECT_TRUE((conv.b.block<3, 1>(3, 0)) == (Vec3(0, 0, 1.0 / 1.1)));
  EXPECT_EQ(conv.b, se23.b);
}

TEST(Jacobians, IntegratorRowScalesWithC1) {
  const EstimatedParams est;
  const auto j = continuous_jacobians(hover_sample(est), est, 2.5, {ErrorConvention::kSE23, DragModel::kWithDrag});
  EXPECT_TRUE((j.a.block<3, 3>(9, 6)) == (2.5 * Mat3::Identity()));
}

TEST(Jacobians, Se23DragFreeIgnoresReferenceAttitude) {
  std::mt19937_64 rng(17);
  const EstimatedParams est;
  for (int i = 0; i < 10; ++i) {
    ReferenceSample a = random_sample(rng);
    ReferenceSample b = a;
    b.attitude = so3_exp(oracle::random_ball(rng, 3.0));
    const Variant v{ErrorConvention::kSE23, DragModel::kDragFree};
    const auto ja = continuous_jacobians(a, est, 1.0, v);
    const auto jb = continuous_jacobians(b, est, 1.0, v);
    EXPECT_TRUE(ja.a == jb.a);
    EXPECT_TRUE(ja.b == jb.b);
    const Variant c{ErrorConvention::kConventional, DragModel::kDragFree};
    EXPECT_GT((continuous_jacobians(a, est, 1.0, c).a - continuous_jacobians(b, est, 1.0, c).a).cwiseAbs().maxCoeff(),
              1e-3);
  }
}

TEST(Jacobians, AgreeWithTimeDifferenceOracle) {
  std::mt19937_64 rng(23);
  const EstimatedParams est;
  for (int i = 0; i < 8; ++i) {
    const ReferenceSample r = random_sample(rng);
    for (const Variant& v : Variant::all()) {
      EstimatedParams model = est;
      if (v.drag == DragModel::kDragFree) model.drag_d.setZero();
      const double gap = relative_gap(oracle_jacobian(r, est, 1.0, v), continuous_jacobians(r, model, 1.0, v));
      EXPECT_LT(gap, 1e-4) << v.name() << " sample " << i;
    }
  }
}

TEST(FiniteDifference, HoverAndHelix) {
  const EstimatedParams est;
  for (const Variant& v : Variant::all()) {
    EXPECT_LT(finite_difference_check(hover_sample(est), est, 1.0, v, 1e-6), 1e-4) << v.name();
  }
  const auto track = build_reference_track(HelixTrajectory(), 0.0025, 400, est);
  for (const Variant& v : Variant::all()) {
    EXPECT_LT(finite_difference_check(track[400], est, 1.0, v, 1e-6), 1e-4) << v.name();
  }
  EXPECT_THROW(finite_difference_check(track[0], est, 1.0, Variant{}, 0.0), Error);
}

TEST(FiniteDifference, ErrorRateVanishesAtZero) {
  const EstimatedParams est;
  const auto track = build_reference_track(HelixTrajectory(), 0.0025, 10, est);
  for (auto conv : {ErrorConvention::kSE23, ErrorConvention::kConventional}) {
    const StateVec rate = nonlinear_error_rate(track[5], est, 1.0, conv, StateVec::Zero(), InputVec::Zero());
    EXPECT_LT(rate.cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(FiniteDifference, DetectsWrongJacobian) {
  // the with-drag model evaluated against drag-free Jacobians must not pass
  const EstimatedParams est;
  ReferenceSample r = hover_sample(est);
  r.velocity = Vec3(3, 0, 0.5);
  const Variant v{ErrorConvention::kSE23, DragModel::kDragFree};
  const double gap = relative_gap(oracle_jacobian(r, est, 1.0, {ErrorConvention::kSE23, DragModel::kWithDrag}),
                                  continuous_jacobians(r, est, 1.0, v));
  EXPECT_GT(gap, 1e-2);
}

TEST(Discretize, NilpotentInputOnly) {
  InputMat b = InputMat::Zero();
  b.topLeftCorner<4, 4>().setIdentity();
  const double t = 0.01;
  const DiscreteJacobians d = discretize_zoh(StateMat::Zero(), b, t);
  EXPECT_LT((d.a - StateMat::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((d.b - t * b).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(d.step, t);
}

TEST(Discretize, ScalarDiagonal) {
  StateMat a = StateMat::Zero();
  a(4, 4) = -2.0;
  a(7, 7) = 0.5;
  const double t = 0.1;
  const DiscreteJacobians d = discretize_zoh(a, InputMat::Zero(), t);
  EXPECT_NEAR(d.a(4, 4), std::exp(-0.2), 1e-10);
  EXPECT_NEAR(d.a(7, 7), std::exp(0.05), 1e-10);
}

TEST(Discretize, DoubleIntegrator) {
  StateMat a = StateMat::Zero();
  a(0, 1) = 1.0;
  InputMat b = InputMat::Zero();
  b(1, 0) = 1.0;
  const double t = 0.05;
  const DiscreteJacobians d = discretize_zoh(a, b, t);
  EXPECT_NEAR(d.a(0, 0), 1.0, 1e-10);
  EXPECT_NEAR(d.a(0, 1), t, 1e-10);
  EXPECT_NEAR(d.a(1, 1), 1.0, 1e-10);
  EXPECT_NEAR(d.b(0, 0), t * t / 2, 1e-10);
  EXPECT_NEAR(d.b(1, 0), t, 1e-10);
}

TEST(Discretize, MatchesSeriesOnHelixJacobian) {
  const EstimatedParams est;
  const auto track = build_reference_track(HelixTrajectory(), 0.0025, 400, est);
  const auto j = continuous_jacobians(track[200], est, 1.0, {ErrorConvention::kConventional, DragModel::kWithDrag});
  const double t = 0.0025;
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(16, 16);
  block.topLeftCorner(12, 12) = j.a * t;
  block.topRightCorner(12, 4) = j.b * t;
  const Eigen::MatrixXd e = oracle::series_expm(block);
  const DiscreteJacobians d = discretize_zoh(j, t);
  EXPECT_LT((d.a - e.topLeftCorner(12, 12)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((d.b - e.topRightCorner(12, 4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Discretize, EulerGapIsSecondOrder) {
  const EstimatedParams est;
  const auto track = build_reference_track(HelixTrajectory(), 0.0025, 10, est);
  const auto j = continuous_jacobians(track[3], est, 1.0, {ErrorConvention::kSE23, DragModel::kWithDrag});
  auto gap = [&](double t) {
    const DiscreteJacobians d = discretize_zoh(j, t);
    return (d.a - (StateMat::Identity() + t * j.a)).cwiseAbs().maxCoeff();
  };
  const double ratio = gap(1e-3) / gap(1e-4);
  EXPECT_NEAR(ratio, 100.0, 1.0);
}

TEST(Discretize, Sequence) {
  const EstimatedParams est;
  const auto track = build_reference_track(HelixTrajectory(), 0.01, 20, est);
  const auto seq = jacobian_sequence(track, est, 1.0, Variant{}, 0.01);
  ASSERT_EQ(seq.size(), 20u);
  const auto d7 = discretize_zoh(continuous_jacobians(track[7], est, 1.0, Variant{}), 0.01);
  EXPECT_EQ(seq[7].a, d7.a);
  EXPECT_EQ(seq[7].b, d7.b);
  EXPECT_THROW(discretize_zoh(StateMat::Zero(), InputMat::Zero(), 0.0), Error);
}
