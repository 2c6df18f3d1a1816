#include "se23lqr/lqr.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "se23lqr/error.hpp"

namespace se23lqr {

namespace {

constexpr double kSymTol = 1e-10;
constexpr double kEigTol = 1e-8;

bool symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymTol * scale;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_shapes(const LinearSystem& sys, const LqrWeights& w, std::size_t k) {
  const auto n = w.q.rows();
  const auto m = w.r.rows();
  if (sys.a.rows() != n || sys.a.cols() != n || sys.b.rows() != n || sys.b.cols() != m) {
    std::ostringstream os;
    os << "riccati_sweep: step " << k << " has A " << sys.a.rows() << "x" << sys.a.cols() << ", B "
       << sys.b.rows() << "x" << sys.b.cols() << " for " << n << " states / " << m << " inputs";
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

// One backward step; returns K_k and overwrites p with P_k.
Eigen::MatrixXd riccati_step(const LinearSystem& sys, const LqrWeights& w, Eigen::MatrixXd& p,
                             std::size_t k) {
  const Eigen::MatrixXd pb = p * sys.b;
  const Eigen::MatrixXd r_bar = w.r + sys.b.transpose() * pb;
  const Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (r_bar + r_bar.transpose()));
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "riccati_sweep: R + B^T P B is not positive definite at step " << k;
    throw Error(ErrorCode::kSingularMatrix, os.str());
  }
  const Eigen::MatrixXd pa = p * sys.a;
  Eigen::MatrixXd gain = llt.solve(sys.b.transpose() * pa);
  // A^T (P - P B Rbar^-1 B^T P) A + Q, with P B Rbar^-1 B^T P A = PB K
  Eigen::MatrixXd next = sys.a.transpose() * (pa - pb * gain) + w.q;
  p = 0.5 * (next + next.transpose());
  return gain;
}

}  // namespace

LqrWeights LqrWeights::defaults() {
  Eigen::VectorXd q(kStateDim);
  q << 1, 1, 1, 1, 1, 1, 10, 10, 10, 0.1, 0.1, 0.1;
  LqrWeights w;
  w.q = q.asDiagonal();
  w.r = Eigen::MatrixXd::Identity(kInputDim, kInputDim);
  w.s = w.q;
  return w;
}

void LqrWeights::validate() const {
  if (q.rows() == 0 || r.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "LqrWeights: empty weight matrix");
  if (s.rows() != q.rows() || s.cols() != q.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "LqrWeights: S and Q differ in shape");
  }
  if (!symmetric(q) || !symmetric(s) || !symmetric(r)) {
    throw Error(ErrorCode::kInvalidArgument, "LqrWeights: Q, R and S must be symmetric");
  }
  if (min_eigenvalue(q) < -kEigTol || min_eigenvalue(s) < -kEigTol) {
    throw Error(ErrorCode::kInvalidArgument, "LqrWeights: Q and S must be positive semidefinite");
  }
  if (!(min_eigenvalue(r) > 0.0)) throw Error(ErrorCode::kInvalidArgument, "LqrWeights: R must be positive definite");
}

const Eigen::MatrixXd& GainSchedule::gain_at(std::size_t k) const {
  if (gains.empty()) throw Error(ErrorCode::kInvalidArgument, "GainSchedule: empty schedule");
  return gains[std::min(k, gains.size() - 1)];
}

GainSchedule riccati_sweep(std::span<const LinearSystem> systems, const LqrWeights& weights) {
  if (systems.empty()) throw Error(ErrorCode::kInvalidArgument, "riccati_sweep: empty Jacobian sequence");
  weights.validate();
  const std::size_t n = systems.size();
  GainSchedule out;
  out.gains.resize(n);
  out.costs.resize(n + 1);
  Eigen::MatrixXd p = 0.5 * (weights.s + weights.s.transpose());
  out.costs[n] = p;
  for (std::size_t i = n; i-- > 0;) {
    check_shapes(systems[i], weights, i);
    out.gains[i] = riccati_step(systems[i], weights, p, i);
    out.costs[i] = p;
  }
  return out;
}

GainSchedule riccati_sweep(const std::vector<DiscreteJacobians>& jacobians, const LqrWeights& weights) {
  std::vector<LinearSystem> systems;
  systems.reserve(jacobians.size());
  for (const auto& j : jacobians) systems.push_back({j.a, j.b});
  return riccati_sweep(std::span<const LinearSystem>(systems), weights);
}

double infinite_horizon_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const LqrWeights& weights, int iterations) {
  if (iterations < 1) throw Error(ErrorCode::kInvalidArgument, "infinite_horizon_check: iterations must be >= 1");
  weights.validate();
  const LinearSystem sys{a, b};
  check_shapes(sys, weights, 0);
  Eigen::MatrixXd p = weights.s;
  Eigen::MatrixXd p_prev = p;
  for (int i = 0; i < iterations; ++i) {
    p_prev = p;
    riccati_step(sys, weights, p, static_cast<std::size_t>(iterations - 1 - i));
    if (!p.allFinite() || p.cwiseAbs().maxCoeff() > 1e12) {
      std::ostringstream os;
      os << "infinite_horizon_check: cost-to-go diverged after " << i + 1 << " steps";
      throw Error(ErrorCode::kDiverged, os.str());
    }
  }
  return (p - p_prev).cwiseAbs().maxCoeff();
}

std::uint64_t hash_weights(const LqrWeights& weights, double c1) {
  // FNV-1a over the raw doubles
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double x) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char byte : bytes) {
      h ^= byte;
      h *= 1099511628211ULL;
    }
  };
  for (const auto* m : {&weights.q, &weights.r, &weights.s}) {
    mix(static_cast<double>(m->rows()));
    for (Eigen::Index i = 0; i < m->size(); ++i) mix(m->data()[i]);
  }
  mix(c1);
  return h;
}

void write_gain_csv(std::ostream& os, const GainSchedule& schedule, const GainKey& key) {
  os << "# trajectory: " << key.trajectory << '\n'
     << "# horizon: " << key.horizon << '\n';
  os.precision(17);
  os << "# step: " << key.step << '\n'
     << "# variant: " << key.variant << '\n'
     << "# weights_hash: " << std::hex << key.weights_hash << std::dec << '\n';
  const auto rows = schedule.gains.empty() ? 0 : schedule.gains.front().rows();
  const auto cols = schedule.gains.empty() ? 0 : schedule.gains.front().cols();
  os << "k";
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) os << ",K_" << i << '_' << j;
  os << '\n';
  for (std::size_t k = 0; k < schedule.gains.size(); ++k) {
    os << k;
    const auto& g = schedule.gains[k];
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j) os << ',' << g(i, j);
    os << '\n';
  }
  if (!os) throw Error(ErrorCode::kIo, "write_gain_csv: stream write failed");
}

GainSchedule read_gain_csv(std::istream& is, GainKey* key) {
  GainSchedule out;
  GainKey parsed;
  std::string line;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) continue;
      const std::string name = line.substr(2, colon - 2);
      const std::string value = line.substr(colon + 2);
      if (name == "trajectory") parsed.trajectory = value;
      else if (name == "horizon") parsed.horizon = std::stoul(value);
      else if (name == "step") parsed.step = std::stod(value);
      else if (name == "variant") parsed.variant = value;
      else if (name == "weights_hash") parsed.weights_hash = std::stoull(value, nullptr, 16);
      continue;
    }
    if (line.rfind("k", 0) == 0) {
      // header: K_i_j columns, last one carries the shape
      const auto last = line.rfind("K_");
      if (last == std::string::npos) continue;
      std::istringstream ls(line.substr(last + 2));
      char sep = 0;
      ls >> rows >> sep >> cols;
      ++rows;
      ++cols;
      continue;
    }
    if (line.empty()) continue;
    if (rows == 0) throw Error(ErrorCode::kIo, "read_gain_csv: data row before header");
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    Eigen::MatrixXd g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (!std::getline(ls, cell, ',')) throw Error(ErrorCode::kIo, "read_gain_csv: short row");
        g(i, j) = std::stod(cell);
      }
    }
    out.gains.push_back(std::move(g));
  }
  if (key) *key = parsed;
  return out;
}

}  // namespace se23lqr
