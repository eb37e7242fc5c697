#include "sswmr/ensemble.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace sswmr {

EnsembleWeights::EnsembleWeights(const Eigen::VectorXd& w_, long step_)
    : w(w_), step(step_) {
  if (w.size() < 1) {
    throw std::invalid_argument("EnsembleWeights: empty weight vector");
  }
  if (!w.allFinite() || w.minCoeff() < -1e-8 || w.maxCoeff() > 1.0 + 1e-8 ||
      std::abs(w.sum() - 1.0) > 1e-8) {
    throw std::invalid_argument("EnsembleWeights: not on the probability simplex");
  }
}

EnsembleWeights EnsembleWeights::uniform(int m) {
  if (m < 1) throw std::invalid_argument("EnsembleWeights::uniform: m must be >= 1");
  return EnsembleWeights(Eigen::VectorXd::Constant(m, 1.0 / m));
}

MotionHistory::MotionHistory(int capacity) : capacity_(capacity) {
  if (capacity < 1) {
    throw std::invalid_argument("MotionHistory: capacity must be >= 1");
  }
  buffer_.resize(capacity);
}

void MotionHistory::push(const MotionRecord& record) {
  buffer_[(head_ + size_) % capacity_] = record;
  if (size_ < size_t(capacity_)) {
    ++size_;
  } else {
    head_ = (head_ + 1) % capacity_;
  }
}

const MotionRecord& MotionHistory::at(size_t i) const {
  if (i >= size_) throw std::out_of_range("MotionHistory::at");
  return buffer_[(head_ + i) % capacity_];
}

int TerrainGpBank::index_of(const std::string& label) const {
  for (size_t i = 0; i < terrains.size(); ++i) {
    if (terrains[i].label == label) return int(i);
  }
  return -1;
}

Gaussian2 ensemble_predict(const TerrainGpBank& bank, const EnsembleWeights& weights,
                           const Eigen::Vector4d& z) {
  if (bank.size() != weights.size()) {
    throw std::invalid_argument("ensemble_predict: bank/weights size mismatch");
  }
  Vector2 mean = Vector2::Zero();
  Matrix2 cov = Matrix2::Zero();
  for (int i = 0; i < bank.size(); ++i) {
    const GpPrediction pv = predict(bank.terrains[i].gp_v, z);
    const GpPrediction pw = predict(bank.terrains[i].gp_omega, z);
    const double wi = weights.w(i);
    mean(0) += wi * pv.mean;
    mean(1) += wi * pw.mean;
    cov(0, 0) += wi * wi * pv.variance;
    cov(1, 1) += wi * wi * pw.variance;
  }
  return Gaussian2(mean, cov);
}

WeightProblem build_weight_problem(const TerrainGpBank& bank,
                                   const MotionHistory& history,
                                   const DynamicParams& params, double dt) {
  if (history.size() == 0) {
    throw std::invalid_argument("build_weight_problem: empty history");
  }
  const int k_eff = int(history.size());
  const int m = bank.size();
  WeightProblem problem;
  problem.f_v.resize(k_eff, m);
  problem.f_omega.resize(k_eff, m);
  problem.y_v.resize(k_eff);
  problem.y_omega.resize(k_eff);
  for (int r = 0; r < k_eff; ++r) {
    const MotionRecord& record = history.at(r);
    const Vector2 eta(record.z(0), record.z(1));
    const Control u(record.z(2), record.z(3));
    const Vector2 nominal = step_velocities_nominal(eta, u, params, dt);
    for (int i = 0; i < m; ++i) {
      problem.f_v(r, i) = nominal(0) + predict(bank.terrains[i].gp_v, record.z).mean;
      problem.f_omega(r, i) =
          nominal(1) + predict(bank.terrains[i].gp_omega, record.z).mean;
    }
    problem.y_v(r) = record.v_next;
    problem.y_omega(r) = record.omega_next;
  }
  return problem;
}

double weight_objective(const WeightProblem& problem, const Eigen::VectorXd& w,
                        const Eigen::VectorXd& w_prev, double alpha) {
  return (problem.y_v - problem.f_v * w).squaredNorm() +
         (problem.y_omega - problem.f_omega * w).squaredNorm() +
         alpha * (w - w_prev).lpNorm<1>();
}

WeightSolverError::WeightSolverError(std::string message, Eigen::VectorXd iterate,
                                     double residual)
    : std::runtime_error(std::move(message)),
      iterate_(std::move(iterate)),
      residual_(residual) {}

namespace {

// argmin_w 0.5||w - x||^2 + tau ||w - c||_1  s.t.  w in simplex.
// Coordinates are soft-thresholded around c and clipped to [0,1]; the sum
// constraint multiplier is found by bisection (the coordinate maps are
// monotone non-increasing in it).
Eigen::VectorXd simplex_l1_prox(const Eigen::VectorXd& x, double tau,
                                const Eigen::VectorXd& c) {
  const int m = int(x.size());
  auto coords = [&](double nu, Eigen::VectorXd& w) {
    for (int i = 0; i < m; ++i) {
      const double u = x(i) - nu;
      double wi;
      if (u - tau > c(i)) {
        wi = u - tau;
      } else if (u + tau < c(i)) {
        wi = u + tau;
      } else {
        wi = c(i);
      }
      w(i) = std::clamp(wi, 0.0, 1.0);
    }
  };
  double lo = x.minCoeff() - tau - 2.0;
  double hi = x.maxCoeff() + tau + 2.0;
  Eigen::VectorXd w(m);
  // bisect to machine precision; each halving is O(m)
  for (int iter = 0; iter < 120; ++iter) {
    const double nu = 0.5 * (lo + hi);
    coords(nu, w);
    if (w.sum() > 1.0) {
      lo = nu;
    } else {
      hi = nu;
    }
  }
  coords(hi, w);  // sum(w) <= 1 side, one ulp from the crossing
  return w;
}

}  // namespace

EnsembleWeights solve_weights(const WeightProblem& problem,
                              const EnsembleWeights& w_prev, double alpha,
                              const WeightSolverOptions& options) {
  const int m = w_prev.size();
  if (problem.f_v.cols() != m || problem.f_omega.cols() != m ||
      problem.f_v.rows() != problem.y_v.size() ||
      problem.f_omega.rows() != problem.y_omega.size()) {
    throw std::invalid_argument("solve_weights: problem dimension mismatch");
  }
  if (alpha < 0.0) {
    throw std::invalid_argument("solve_weights: alpha must be >= 0");
  }

  const Eigen::MatrixXd q = problem.f_v.transpose() * problem.f_v +
                            problem.f_omega.transpose() * problem.f_omega;
  const Eigen::VectorXd b = problem.f_v.transpose() * problem.y_v +
                            problem.f_omega.transpose() * problem.y_omega;

  // The prox is invariant to uniform shifts of its input (the simplex
  // multiplier absorbs them), so only the curvature tangent to the
  // sum-to-one constraint matters for the step size. With near-identical
  // prediction columns the raw lambda_max(Q) sits almost entirely on the
  // all-ones direction and would throttle the iteration.
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(m, m) - Eigen::MatrixXd::Constant(m, m, 1.0 / m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centering * q * centering,
                                                     Eigen::EigenvaluesOnly);
  const double lipschitz = std::max(2.0 * eig.eigenvalues().maxCoeff(), 1e-12);
  const double step = 1.0 / lipschitz;
  const Eigen::VectorXd& center = w_prev.w;

  auto smooth_value = [&](const Eigen::VectorXd& w) {
    return w.dot(q * w) - 2.0 * b.dot(w);
  };
  auto prox_step = [&](const Eigen::VectorXd& point) {
    const Eigen::VectorXd grad = 2.0 * (q * point - b);
    return simplex_l1_prox(point - step * grad, step * alpha, center);
  };

  Eigen::VectorXd x = simplex_l1_prox(center, 0.0, center);  // feasible start
  Eigen::VectorXd y = x;
  double t = 1.0;
  double prev_value = smooth_value(x) + alpha * (x - center).lpNorm<1>();
  double residual = std::numeric_limits<double>::infinity();

  bool plain_step = true;  // a step taken from y == x is always accepted
  for (int iter = 0; iter < options.max_iters; ++iter) {
    const Eigen::VectorXd x_new = prox_step(y);
    residual = (x_new - prox_step(x_new)).cwiseAbs().maxCoeff();
    if (residual <= options.tol) {
      return EnsembleWeights(x_new, w_prev.step + 1);
    }
    const double value = smooth_value(x_new) + alpha * (x_new - center).lpNorm<1>();
    if (!plain_step && value > prev_value) {  // momentum overshoot: restart
      y = x;
      t = 1.0;
      plain_step = true;
      continue;
    }
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_new + ((t - 1.0) / t_new) * (x_new - x);
    x = x_new;
    t = t_new;
    prev_value = value;
    plain_step = false;
  }
  throw WeightSolverError("solve_weights: no convergence within iteration cap (residual " +
                              std::to_string(residual) + ")",
                          x, residual);
}

EnsembleWeights update(const TerrainGpBank& bank, MotionHistory& history,
                       const EnsembleWeights& w_prev, double alpha,
                       const MotionRecord& new_record, const DynamicParams& params,
                       double dt, const WeightSolverOptions& options) {
  history.push(new_record);
  const WeightProblem problem = build_weight_problem(bank, history, params, dt);
  return solve_weights(problem, w_prev, alpha, options);
}

}  // namespace sswmr
