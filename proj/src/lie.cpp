#include "se23lqr/lie.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "se23lqr/error.hpp"

namespace se23lqr {

namespace {

constexpr double kSeriesThreshold = 1e-6;
constexpr double kOrthonormalTol = 1e-6;
constexpr double kPiAmbiguityTol = 1e-9;
// Above this angle the axis is read from the symmetric part of C.
constexpr double kNearPi = std::numbers::pi - 1e-4;

// sin(t)/t, (1 - cos t)/t^2 and (t - sin t)/t^3
struct RodriguesCoeffs {
  double a, b, c;
};

RodriguesCoeffs rodrigues_coeffs(double t) {
  if (t < kSeriesThreshold) {
    const double t2 = t * t;
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0,
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0};
  }
  const double s = std::sin(t);
  const double c = std::cos(t);
  return {s / t, (1.0 - c) / (t * t), (t - s) / (t * t * t)};
}

}  // namespace

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

Vec3 unskew(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

Vec9 TangentSE23::vector() const {
  Vec9 x;
  x << phi, v, r;
  return x;
}

TangentSE23 TangentSE23::from_vector(const Eigen::Ref<const Vec9>& x) {
  return {x.segment<3>(0), x.segment<3>(3), x.segment<3>(6)};
}

Mat5 PoseSE23::matrix() const {
  Mat5 m = Mat5::Identity();
  m.block<3, 3>(0, 0) = rotation;
  m.block<3, 1>(0, 3) = velocity;
  m.block<3, 1>(0, 4) = position;
  return m;
}

PoseSE23 PoseSE23::from_matrix(const Mat5& m) {
  return {m.block<3, 3>(0, 0), m.block<3, 1>(0, 3), m.block<3, 1>(0, 4)};
}

double rotation_defect(const Mat3& c) {
  const double ortho = (c.transpose() * c - Mat3::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, std::abs(c.determinant() - 1.0));
}

Mat3 orthonormalize(const Mat3& c) {
  Eigen::JacobiSVD<Mat3> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

Mat3 so3_exp(const Vec3& phi) {
  const auto [a, b, c] = rodrigues_coeffs(phi.norm());
  (void)c;
  const Mat3 k = skew(phi);
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 so3_log(const Mat3& c) {
  if (!c.allFinite() || rotation_defect(c) > kOrthonormalTol) {
    std::ostringstream os;
    os << "so3_log: matrix is not a rotation (defect " << rotation_defect(c) << ")";
    throw Error(ErrorCode::kNotOrthonormal, os.str());
  }
  const Vec3 w = unskew(c);  // sin(angle) * axis
  const double s = w.norm();
  const double cos_angle = std::clamp(0.5 * (c.trace() - 1.0), -1.0, 1.0);
  const double angle = std::atan2(s, cos_angle);

  if (angle < kSeriesThreshold) {
    // angle / sin(angle) ~ 1 + angle^2 / 6
    return (1.0 + angle * angle / 6.0) * w;
  }
  if (angle < kNearPi) return (angle / s) * w;

  // C + C^T = 2 cos I + 2 (1 - cos) a a^T
  const Mat3 aat = (0.5 * (c + c.transpose()) - cos_angle * Mat3::Identity()) / (1.0 - cos_angle);
  Eigen::Index i = 0;
  aat.diagonal().maxCoeff(&i);
  Vec3 axis = aat.col(i) / std::sqrt(std::max(aat(i, i), 0.0));
  axis.normalize();
  if (s > 1e-12) {
    if (axis.dot(w) < 0.0) axis = -axis;
  } else {
    // Exactly pi: first nonzero component nonnegative.
    for (int k = 0; k < 3; ++k) {
      if (std::abs(axis[k]) > 1e-12) {
        if (axis[k] < 0.0) axis = -axis;
        break;
      }
    }
  }
  return angle * axis;
}

Mat3 so3_left_jacobian(const Vec3& phi) {
  const auto [a, b, c] = rodrigues_coeffs(phi.norm());
  (void)a;
  // sin/phi I + (1 - sin/phi) aa^T + (1 - cos)/phi a^x, rewritten in phi^x
  // using aa^T = I + a^x a^x.
  const Mat3 k = skew(phi);
  return Mat3::Identity() + b * k + c * k * k;
}

Mat5 se23_wedge(const TangentSE23& xi) {
  Mat5 m = Mat5::Zero();
  m.block<3, 3>(0, 0) = skew(xi.phi);
  m.block<3, 1>(0, 3) = xi.v;
  m.block<3, 1>(0, 4) = xi.r;
  return m;
}

TangentSE23 se23_vee(const Mat5& m) {
  constexpr double tol = 1e-12;
  const Mat3 rot = m.block<3, 3>(0, 0);
  const double asym = (rot + rot.transpose()).cwiseAbs().maxCoeff();
  const double bottom = m.block<2, 5>(3, 0).cwiseAbs().maxCoeff();
  if (asym > tol || bottom > tol) {
    throw Error(ErrorCode::kInvalidArgument, "se23_vee: matrix is not in se2(3)");
  }
  return {unskew(rot), m.block<3, 1>(0, 3), m.block<3, 1>(0, 4)};
}

PoseSE23 se23_exp(const TangentSE23& xi) {
  const Mat3 j = so3_left_jacobian(xi.phi);
  return {so3_exp(xi.phi), j * xi.v, j * xi.r};
}

TangentSE23 se23_log(const PoseSE23& x, LogBranch branch) {
  const Vec3 phi = so3_log(x.rotation);
  if (branch == LogBranch::kStrict && std::numbers::pi - phi.norm() < kPiAmbiguityTol) {
    throw Error(ErrorCode::kAngleAmbiguity, "se23_log: rotation angle is pi, axis sign is ambiguous");
  }
  const auto lu = so3_left_jacobian(phi).partialPivLu();
  return {phi, lu.solve(x.velocity), lu.solve(x.position)};
}

PoseSE23 se23_compose(const PoseSE23& x, const PoseSE23& y) {
  return {x.rotation * y.rotation, x.rotation * y.velocity + x.velocity,
          x.rotation * y.position + x.position};
}

PoseSE23 se23_inverse(const PoseSE23& x) {
  const Mat3 ct = x.rotation.transpose();
  return {ct, -ct * x.velocity, -ct * x.position};
}

}  // namespace se23lqr
