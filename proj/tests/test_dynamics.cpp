#include <cmath>

#include <gtest/gtest.h>

#include "se23lqr/dynamics.hpp"
#include "se23lqr/error.hpp"

using namespace se23lqr;

namespace {

QuadParams drag_free() {
  QuadParams p;
  p.drag_d.setZero();
  p.drag_e.setZero();
  p.drag_f.setZero();
  return p;
}

PlantState run(PlantState s, const WrenchInput& u, const QuadParams& p, double dt, double t_end) {
  const int n = static_cast<int>(std::llround(t_end / dt));
  for (int i = 0; i < n; ++i) s = integrate_step(s, u, p, dt);
  return s;
}

double distance(const PlantState& a, const PlantState& b) {
  return std::max({(a.pose.rotation - b.pose.rotation).cwiseAbs().maxCoeff(),
                   (a.pose.velocity - b.pose.velocity).cwiseAbs().maxCoeff(),
                   (a.pose.position - b.pose.position).cwiseAbs().maxCoeff(),
                   (a.omega - b.omega).cwiseAbs().maxCoeff()});
}

}  // namespace

TEST(Derivative, HoverIsEquilibrium) {
  const QuadParams p;
  const PlantDerivative d = eval_derivative({}, {p.mass * p.gravity, Vec3::Zero()}, p);
  EXPECT_LT(d.velocity_dot.norm(), 1e-15);
  EXPECT_EQ(d.position_dot, Vec3::Zero());
  EXPECT_EQ(d.omega_dot, Vec3::Zero());
  EXPECT_EQ(d.rotation_dot, Mat3::Zero());
}

TEST(Derivative, FreeFall) {
  const PlantDerivative d = eval_derivative({}, {}, QuadParams{});
  EXPECT_EQ(d.velocity_dot, Vec3(0, 0, -9.81));
}

TEST(Derivative, RotorDragDecelerates) {
  PlantState s;
  s.pose.velocity = Vec3(1, 0, 0);
  const PlantDerivative d = eval_derivative(s, {}, QuadParams{});
  EXPECT_NEAR(d.velocity_dot.x(), -0.55, 1e-12);
  EXPECT_NEAR(d.velocity_dot.z(), -9.81, 1e-12);
}

TEST(Derivative, DragTorqueFromBodyVelocity) {
  PlantState s;
  s.pose.velocity = Vec3(1, 0, 0);
  const QuadParams p;
  const PlantDerivative d = eval_derivative(s, {}, p);
  // -E v_b resolved through J^-1
  EXPECT_NEAR(d.omega_dot.x(), -0.05 / 0.0112, 1e-10);
}

TEST(Integrate, HoverUnchanged) {
  const QuadParams p;
  PlantState s;
  s.pose.position = Vec3(1, 2, 3);
  const PlantState out = run(s, {p.mass * p.gravity, Vec3::Zero()}, p, 0.0005, 0.5);
  EXPECT_LT(distance(out, s), 1e-12);
}

TEST(Integrate, BallisticClosedForm) {
  const PlantState out = integrate_step({}, {}, drag_free(), 0.1);
  EXPECT_NEAR(out.pose.velocity.z(), -0.981, 1e-6);
  EXPECT_NEAR(out.pose.position.z(), -0.04905, 1e-6);
}

TEST(Integrate, FourthOrderConvergence) {
  const QuadParams p;
  PlantState s;
  s.pose.velocity = Vec3(3, 0, 0.5);
  s.omega = Vec3(0.3, -0.2, 1.0);
  const WrenchInput u{12.0, Vec3(0.002, -0.001, 0.003)};
  const double t_end = 1.0;
  const double dt = 0.02;
  const PlantState ref = run(s, u, p, dt / 100, t_end);
  const double e1 = distance(run(s, u, p, dt, t_end), ref);
  const double e2 = distance(run(s, u, p, dt / 2, t_end), ref);
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Integrate, StaysOnSO3) {
  PlantState s;
  s.omega = Vec3(5, -3, 2);
  for (int i = 0; i < 2000; ++i) s = integrate_step(s, {5.0, Vec3::Zero()}, QuadParams{}, 0.0005);
  EXPECT_LT(rotation_defect(s.pose.rotation), 1e-12);
}

TEST(Integrate, RejectsNonpositiveStep) {
  EXPECT_THROW(integrate_step({}, {}, QuadParams{}, 0.0), Error);
  EXPECT_THROW(integrate_step({}, {}, QuadParams{}, -1e-3), Error);
}

TEST(Actuator, ZeroTauPassesThrough) {
  ActuatorFilter f(0.0);
  const WrenchInput u{3.5, Vec3(0.1, -0.2, 0.3)};
  const WrenchInput out = f.apply(u, 0.001);
  EXPECT_EQ(out.thrust, u.thrust);
  EXPECT_EQ(out.moment, u.moment);
}

TEST(Actuator, StepResponseAtOneTau) {
  const double tau = 0.05, dt = 1e-5;
  ActuatorFilter f(tau);
  WrenchInput out;
  for (int i = 0; i < static_cast<int>(std::llround(tau / dt)); ++i) out = f.apply({1.0, Vec3::Ones()}, dt);
  EXPECT_NEAR(out.thrust, 1.0 - std::exp(-1.0), 0.02 * 0.632);
  EXPECT_NEAR(out.moment.z(), 1.0 - std::exp(-1.0), 0.02 * 0.632);
}

TEST(Actuator, FreeDecay) {
  const double tau = 0.02, dt = 1e-6;
  ActuatorFilter f(tau);
  f.reset({2.0, Vec3(1, 0, 0)});
  WrenchInput out;
  const double t = 0.03;
  for (int i = 0; i < static_cast<int>(std::llround(t / dt)); ++i) out = f.apply({}, dt);
  EXPECT_NEAR(out.thrust, 2.0 * std::exp(-t / tau), 1e-4);
  EXPECT_NEAR(out.moment.x(), std::exp(-t / tau), 1e-4);
}

TEST(Actuator, RejectsNegativeTau) { EXPECT_THROW(ActuatorFilter(-0.1), Error); }

TEST(Saturation, Clamps) {
  const SaturationLimits lim = SaturationLimits::for_params(QuadParams{});
  EXPECT_NEAR(lim.thrust_max, 4 * 1.1 * 9.81, 1e-12);

  const ActuatorCommand ok{10.0, Vec3(1, -2, 3), Vec3(0.1, 0.2, -0.3)};
  const ActuatorCommand same = saturate(ok, lim);
  EXPECT_EQ(same.thrust, ok.thrust);
  EXPECT_EQ(same.omega_cmd, ok.omega_cmd);
  EXPECT_EQ(same.moment, ok.moment);

  const ActuatorCommand out = saturate({-1.0, Vec3(20, 0, -9), Vec3(2, -3, 0.5)}, lim);
  EXPECT_EQ(out.thrust, 0.0);
  EXPECT_EQ(out.omega_cmd, Vec3(8, 0, -8));
  EXPECT_EQ(out.moment, Vec3(1, -1, 0.5));
  EXPECT_EQ(saturate({1e3, Vec3::Zero(), Vec3::Zero()}, lim).thrust, lim.thrust_max);
}

TEST(Params, Validation) {
  QuadParams p;
  EXPECT_NO_THROW(p.validate());
  p.mass = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = QuadParams{};
  p.inertia(0, 0) = -1.0;
  EXPECT_THROW(p.validate(), Error);
  p = QuadParams{};
  p.drag_d(0, 1) = 0.1;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Params, Scaling) {
  const QuadParams truth;
  const EstimatedParams est = EstimatedParams::scaled(truth, 0.8, 0.5, 2.0, 1.5);
  EXPECT_DOUBLE_EQ(est.mass, 0.88);
  EXPECT_DOUBLE_EQ(est.drag_e(0, 0), 0.025);
  EXPECT_DOUBLE_EQ(est.drag_f(1, 1), 0.2);
  EXPECT_DOUBLE_EQ(est.drag_d(2, 2), 1.5 * 0.275);
}
