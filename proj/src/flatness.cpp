#include "se23lqr/flatness.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "se23lqr/error.hpp"

namespace se23lqr {

HelixTrajectory::HelixTrajectory(double radius, double rate, double climb, double yaw)
    : radius_(radius), rate_(rate), climb_(climb), yaw_(yaw) {}

FlatSample HelixTrajectory::eval(double t) const {
  const double s = std::sin(rate_ * t);
  const double c = std::cos(rate_ * t);
  FlatSample f;
  f.position = {radius_ * s, radius_ * c, climb_ * t};
  f.velocity = {radius_ * rate_ * c, -radius_ * rate_ * s, climb_};
  f.acceleration = {-radius_ * rate_ * rate_ * s, -radius_ * rate_ * rate_ * c, 0.0};
  f.yaw = yaw_;
  return f;
}

std::string HelixTrajectory::id() const {
  std::ostringstream os;
  os.precision(17);
  os << "helix(" << radius_ << "," << rate_ << "," << climb_ << "," << yaw_ << ")";
  return os.str();
}

HoverTrajectory::HoverTrajectory(Vec3 position, double yaw) : position_(position), yaw_(yaw) {}

FlatSample HoverTrajectory::eval(double /*t*/) const {
  FlatSample f;
  f.position = position_;
  f.yaw = yaw_;
  return f;
}

std::string HoverTrajectory::id() const {
  std::ostringstream os;
  os.precision(17);
  os << "hover(" << position_.x() << "," << position_.y() << "," << position_.z() << "," << yaw_ << ")";
  return os.str();
}

std::unique_ptr<FlatTrajectory> make_trajectory(const std::string& kind) {
  if (kind == "helix") return std::make_unique<HelixTrajectory>();
  if (kind == "hover") return std::make_unique<HoverTrajectory>();
  throw Error(ErrorCode::kConfig, "unknown trajectory '" + kind + "'");
}

AttitudeThrust reference_attitude_thrust(const FlatSample& flat, const EstimatedParams& est,
                                         const FlatnessOptions& options) {
  const Vec3 e3 = Vec3::UnitZ();
  const Vec3 heading(std::cos(flat.yaw), std::sin(flat.yaw), 0.0);
  const Vec3 base = est.mass * flat.acceleration + est.mass * est.gravity * e3;

  AttitudeThrust out;
  // The drag feedforward starts from C_bar = 0, so the first pass has no drag term.
  Mat3 c_bar = Mat3::Zero();
  Vec3 force_prev = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Vec3 force = base + c_bar * est.drag_d * c_bar.transpose() * flat.velocity;
    const double fn = force.norm();
    if (!(fn >= options.force_floor)) {
      throw Error(ErrorCode::kDegenerateReference, "reference force magnitude below floor");
    }
    const Vec3 r3 = force / fn;
    const Vec3 r2_raw = r3.cross(heading);
    const double r2n = r2_raw.norm();
    if (!(r2n >= options.triad_floor)) {
      throw Error(ErrorCode::kDegenerateReference, "thrust axis parallel to heading vector");
    }
    const Vec3 r2 = r2_raw / r2n;
    const Vec3 r1 = r2.cross(r3);
    Mat3 c;
    c << r1, r2, r3;

    out.attitude = c;
    out.force = force;
    out.iterations = it;
    if (it > 1) {
      out.residual = (force - force_prev).cwiseAbs().maxCoeff();
      if (out.residual < options.force_tolerance) {
        out.thrust = e3.dot(c.transpose() * force);
        return out;
      }
    }
    force_prev = force;
    c_bar = c;
  }
  std::ostringstream os;
  os << "reference force did not converge in " << options.max_iterations
     << " iterations (last change " << out.residual << ")";
  throw Error(ErrorCode::kNotConverged, os.str());
}

Vec3 reference_angular_velocity(const Mat3& c_prev, const Mat3& c_curr, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "reference_angular_velocity: step must be positive");
  const Vec3 phi = so3_log(c_prev.transpose() * c_curr);
  if (std::numbers::pi - phi.norm() < 1e-9) {
    throw Error(ErrorCode::kAngleAmbiguity, "reference_angular_velocity: relative rotation is a half turn");
  }
  return phi / step;
}

std::vector<ReferenceSample> build_reference_track(const FlatTrajectory& trajectory, double step,
                                                   int horizon, const EstimatedParams& est,
                                                   const FlatnessOptions& options) {
  if (horizon < 2) throw Error(ErrorCode::kInvalidArgument, "build_reference_track: horizon must be >= 2");
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "build_reference_track: step must be positive");

  std::vector<ReferenceSample> track(static_cast<std::size_t>(horizon) + 1);
  for (int k = 0; k <= horizon; ++k) {
    auto& s = track[k];
    s.t = k * step;
    try {
      const FlatSample flat = trajectory.eval(s.t);
      const AttitudeThrust at = reference_attitude_thrust(flat, est, options);
      s.attitude = at.attitude;
      s.thrust = at.thrust;
      s.velocity = flat.velocity;
      s.position = flat.position;
      if (k > 0) s.omega = reference_angular_velocity(track[k - 1].attitude, s.attitude, step);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "reference sample " << k << " (t = " << s.t << "): " << e.what();
      throw Error(e.code(), os.str());
    }
  }
  track[0].omega = track[1].omega;
  return track;
}

void write_reference_csv(std::ostream& os, const std::vector<ReferenceSample>& track) {
  os << "t,r_x,r_y,r_z,v_x,v_y,v_z,c_00,c_01,c_02,c_10,c_11,c_12,c_20,c_21,c_22,"
        "omega_x,omega_y,omega_z,thrust\n";
  os.precision(17);
  for (const auto& s : track) {
    os << s.t;
    for (int i = 0; i < 3; ++i) os << ',' << s.position[i];
    for (int i = 0; i < 3; ++i) os << ',' << s.velocity[i];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) os << ',' << s.attitude(i, j);
    for (int i = 0; i < 3; ++i) os << ',' << s.omega[i];
    os << ',' << s.thrust << '\n';
  }
  if (!os) throw Error(ErrorCode::kIo, "write_reference_csv: stream write failed");
}

}  // namespace se23lqr
