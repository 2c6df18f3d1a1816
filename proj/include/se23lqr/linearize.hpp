#pragma once

#include <string>
#include <vector>

#include "se23lqr/dynamics.hpp"
#include "se23lqr/flatness.hpp"

namespace se23lqr {

// Error state (xi_phi, xi_v, xi_r, xi_i), input (delta thrust, delta body rate).
inline constexpr int kStateDim = 12;
inline constexpr int kInputDim = 4;

using StateVec = Eigen::Matrix<double, kStateDim, 1>;
using InputVec = Eigen::Matrix<double, kInputDim, 1>;
using StateMat = Eigen::Matrix<double, kStateDim, kStateDim>;
using InputMat = Eigen::Matrix<double, kStateDim, kInputDim>;

enum class ErrorConvention { kSE23, kConventional };
enum class DragModel { kWithDrag, kDragFree };

struct Variant {
  ErrorConvention convention = ErrorConvention::kSE23;
  DragModel drag = DragModel::kDragFree;

  /// One of "se23-drag", "se23-nodrag", "conv-drag", "conv-nodrag".
  std::string name() const;
  /// Throws kInvalidArgument on an unknown tag.
  static Variant parse(const std::string& tag);
  static std::vector<Variant> all();

  bool operator==(const Variant&) const = default;
};

struct ErrorJacobians {
  StateMat a = StateMat::Zero();
  InputMat b = InputMat::Zero();
  Variant variant;
};

struct DiscreteJacobians {
  StateMat a = StateMat::Identity();
  InputMat b = InputMat::Zero();
  double step = 0.0;
};

/// Continuous-time error Jacobians about one reference sample. The model
/// quantities (mass, rotor drag) come from `est`; drag-free variants ignore
/// est.drag_d entirely.
ErrorJacobians continuous_jacobians(const ReferenceSample& ref, const EstimatedParams& est,
                                    double c1, Variant variant);

/// Zero-order-hold discretisation through the exponential of the block
/// matrix [[A, B], [0, 0]] * T.
DiscreteJacobians discretize_zoh(const ErrorJacobians& jac, double step);
DiscreteJacobians discretize_zoh(const StateMat& a, const InputMat& b, double step);

std::vector<DiscreteJacobians> jacobian_sequence(const std::vector<ReferenceSample>& track,
                                                 const EstimatedParams& est, double c1,
                                                 Variant variant, double step);

/// Rate of the error state under the full nonlinear translational model,
/// expressed as the right-trivialised velocity of the error element. The
/// reference is propagated with the model-consistent acceleration, so the rate
/// vanishes at zero error and zero input perturbation.
StateVec nonlinear_error_rate(const ReferenceSample& ref, const EstimatedParams& model, double c1,
                              ErrorConvention convention, const StateVec& error,
                              const InputVec& input);

/// Central-difference Jacobian of nonlinear_error_rate compared to the
/// analytic pair. Returns max|[A B]_fd - [A B]| / max(1, max|[A B]|).
/// Drag-free variants are compared against a model with zero rotor drag.
double finite_difference_check(const ReferenceSample& ref, const EstimatedParams& model,
                               double c1, Variant variant, double eps);

}  // namespace se23lqr
