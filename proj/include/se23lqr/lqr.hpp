#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "se23lqr/linearize.hpp"

namespace se23lqr {

/// Quadratic cost weights. Dimensions are free; the flight controller uses
/// 12 states and 4 inputs.
struct LqrWeights {
  Eigen::MatrixXd q;  // running state weight
  Eigen::MatrixXd r;  // input weight
  Eigen::MatrixXd s;  // terminal state weight

  /// Q = diag(1,1,1, 1,1,1, 10,10,10, 0.1,0.1,0.1), R = I, S = Q.
  static LqrWeights defaults();
  /// Throws kInvalidArgument unless Q, S are symmetric PSD and R symmetric PD.
  void validate() const;
};

struct LinearSystem {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
};

struct GainSchedule {
  std::vector<Eigen::MatrixXd> gains;  // K_0 .. K_{N-1}
  std::vector<Eigen::MatrixXd> costs;  // P_0 .. P_N

  std::size_t horizon() const { return gains.size(); }
  /// K_k, holding K_{N-1} past the end of the schedule.
  const Eigen::MatrixXd& gain_at(std::size_t k) const;
};

/// Backward Riccati recursion from P_N = S. Throws kSingularMatrix (with the
/// step index) when R + B^T P B is not positive definite and
/// kDimensionMismatch on inconsistent shapes.
GainSchedule riccati_sweep(std::span<const LinearSystem> systems, const LqrWeights& weights);
GainSchedule riccati_sweep(const std::vector<DiscreteJacobians>& jacobians, const LqrWeights& weights);

/// Runs the recursion `iterations` times on a constant pair with S = weights.s
/// and returns max|P_0 - P_1|. Throws kDiverged if any |P| exceeds 1e12.
double infinite_horizon_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const LqrWeights& weights, int iterations);

/// Identity of an offline schedule.
struct GainKey {
  std::string trajectory;
  std::size_t horizon = 0;
  double step = 0.0;
  std::string variant;
  std::uint64_t weights_hash = 0;
};

std::uint64_t hash_weights(const LqrWeights& weights, double c1);

/// `# key: value` header lines, then one row per step: k, K row-major.
void write_gain_csv(std::ostream& os, const GainSchedule& schedule, const GainKey& key);
/// Reads back the gains written by write_gain_csv (costs are not stored).
GainSchedule read_gain_csv(std::istream& is, GainKey* key = nullptr);

}  // namespace se23lqr
