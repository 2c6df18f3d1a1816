#pragma once

#include <Eigen/Dense>

namespace se23lqr {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

/// Cross-product matrix: skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& a);
/// Inverse of skew; reads the antisymmetric part.
Vec3 unskew(const Mat3& m);

/// Element of se2(3) in (phi, v, r) ordering.
struct TangentSE23 {
  Vec3 phi = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 r = Vec3::Zero();

  Vec9 vector() const;
  static TangentSE23 from_vector(const Eigen::Ref<const Vec9>& x);
};

/// Element of SE2(3): attitude, velocity and position bundled in a 5x5 matrix.
struct PoseSE23 {
  Mat3 rotation = Mat3::Identity();
  Vec3 velocity = Vec3::Zero();
  Vec3 position = Vec3::Zero();

  Mat5 matrix() const;
  static PoseSE23 from_matrix(const Mat5& m);
  static PoseSE23 identity() { return {}; }
};

/// Max-abs deviation of C from SO(3): max(|C^T C - I|_inf, |det C - 1|).
double rotation_defect(const Mat3& c);
/// Nearest rotation in the Frobenius sense (polar factor via SVD).
Mat3 orthonormalize(const Mat3& c);

Mat3 so3_exp(const Vec3& phi);
/// Principal-branch rotation vector, |result| <= pi. Throws kNotOrthonormal when
/// the input is further than 1e-6 from SO(3). At exactly a half turn the axis
/// is the column of (C + I) / 2 with the largest diagonal, signed so that its
/// first nonzero component is positive.
Vec3 so3_log(const Mat3& c);
Mat3 so3_left_jacobian(const Vec3& phi);

Mat5 se23_wedge(const TangentSE23& xi);
/// Throws kInvalidArgument if m does not have the se2(3) sparsity pattern.
TangentSE23 se23_vee(const Mat5& m);

PoseSE23 se23_exp(const TangentSE23& xi);
enum class LogBranch {
  kStrict,     // throw kAngleAmbiguity within 1e-9 of a half turn
  kPrincipal,  // resolve a half turn with the so3_log axis convention
};

TangentSE23 se23_log(const PoseSE23& x, LogBranch branch = LogBranch::kStrict);

PoseSE23 se23_compose(const PoseSE23& x, const PoseSE23& y);
PoseSE23 se23_inverse(const PoseSE23& x);

}  // namespace se23lqr
