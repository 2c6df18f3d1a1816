#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "se23lqr/dynamics.hpp"
#include "se23lqr/lie.hpp"

namespace se23lqr {

/// Flat outputs (position, yaw) and their first two time derivatives at one instant.
struct FlatSample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double yaw_accel = 0.0;
};

class FlatTrajectory {
 public:
  virtual ~FlatTrajectory() = default;
  virtual FlatSample eval(double t) const = 0;
  /// Stable textual identity, used to key cached gain schedules.
  virtual std::string id() const = 0;
};

/// r(t) = [R sin(wt), R cos(wt), c t], constant yaw. Defaults give the
/// 3 m radius, 0.5 m/s climb helix.
class HelixTrajectory final : public FlatTrajectory {
 public:
  HelixTrajectory(double radius = 3.0, double rate = 1.0, double climb = 0.5, double yaw = 0.0);
  FlatSample eval(double t) const override;
  std::string id() const override;

 private:
  double radius_, rate_, climb_, yaw_;
};

class HoverTrajectory final : public FlatTrajectory {
 public:
  explicit HoverTrajectory(Vec3 position = Vec3::Zero(), double yaw = 0.0);
  FlatSample eval(double t) const override;
  std::string id() const override;

 private:
  Vec3 position_;
  double yaw_;
};

std::unique_ptr<FlatTrajectory> make_trajectory(const std::string& kind);

struct ReferenceSample {
  double t = 0.0;
  Mat3 attitude = Mat3::Identity();  // C_ar
  Vec3 velocity = Vec3::Zero();
  Vec3 position = Vec3::Zero();
  Vec3 omega = Vec3::Zero();  // resolved in the reference frame
  double thrust = 0.0;

  PoseSE23 pose() const { return {attitude, velocity, position}; }
};

struct FlatnessOptions {
  double force_tolerance = 1e-10;  // on the inf-norm change of the reference force
  int max_iterations = 50;
  double force_floor = 1e-6;
  double triad_floor = 1e-6;
};

struct AttitudeThrust {
  Mat3 attitude = Mat3::Identity();
  double thrust = 0.0;
  Vec3 force = Vec3::Zero();
  int iterations = 0;
  double residual = 0.0;  // last inf-norm force change
};

/// Solves the drag-coupled force / attitude fixed point for one flat sample.
/// Throws kDegenerateReference or kNotConverged.
AttitudeThrust reference_attitude_thrust(const FlatSample& flat, const EstimatedParams& est,
                                         const FlatnessOptions& options = {});

/// Inverts C_curr = C_prev exp(T w^x). Throws kAngleAmbiguity at a half turn.
Vec3 reference_angular_velocity(const Mat3& c_prev, const Mat3& c_curr, double step);

/// Samples k = 0..horizon at t_k = k * step.
std::vector<ReferenceSample> build_reference_track(const FlatTrajectory& trajectory, double step,
                                                   int horizon, const EstimatedParams& est,
                                                   const FlatnessOptions& options = {});

/// Columns: t, r_r, v_r, C_ar (row-major), w_r, thrust_r.
void write_reference_csv(std::ostream& os, const std::vector<ReferenceSample>& track);

}  // namespace se23lqr
