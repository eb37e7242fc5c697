#ifndef SSWMR_ENSEMBLE_HPP
#define SSWMR_ENSEMBLE_HPP

#include <string>
#include <vector>

#include "sswmr/dynamics.hpp"
#include "sswmr/gp.hpp"
#include "sswmr/types.hpp"

namespace sswmr {

/// Per-terrain mixing weights on the probability simplex.
struct EnsembleWeights {
  Eigen::VectorXd w;
  long step = 0;

  EnsembleWeights() = default;
  EnsembleWeights(const Eigen::VectorXd& w_, long step_ = 0);  // validates simplex
  static EnsembleWeights uniform(int m);

  int size() const { return int(w.size()); }
};

struct MotionRecord {
  Eigen::Vector4d z = Eigen::Vector4d::Zero();  // [v, omega, v_ref, omega_ref]
  double v_next = 0.0;
  double omega_next = 0.0;
};

/// Fixed-capacity ring buffer of the most recent motion records,
/// oldest-first iteration order.
class MotionHistory {
 public:
  explicit MotionHistory(int capacity);

  void push(const MotionRecord& record);
  size_t size() const { return size_; }
  int capacity() const { return capacity_; }
  const MotionRecord& at(size_t i) const;  // i = 0 is the oldest record

 private:
  std::vector<MotionRecord> buffer_;
  int capacity_;
  size_t head_ = 0;
  size_t size_ = 0;
};

struct TerrainGp {
  GpModel gp_v;
  GpModel gp_omega;
  std::string label;
};

struct TerrainGpBank {
  std::vector<TerrainGp> terrains;

  int size() const { return int(terrains.size()); }
  int index_of(const std::string& label) const;  // -1 when absent
};

/// Weighted ensemble output: mean is the convex combination of per-terrain
/// means, covariance the squared-weight combination of per-terrain output
/// variances (diagonal, the two GPs are independent).
Gaussian2 ensemble_predict(const TerrainGpBank& bank, const EnsembleWeights& weights,
                           const Eigen::Vector4d& z);

struct WeightProblem {
  Eigen::MatrixXd f_v;      // K_eff x M one-step velocity predictions
  Eigen::MatrixXd f_omega;  // K_eff x M
  Eigen::VectorXd y_v;      // K_eff measured next velocities
  Eigen::VectorXd y_omega;  // K_eff
};

WeightProblem build_weight_problem(const TerrainGpBank& bank,
                                   const MotionHistory& history,
                                   const DynamicParams& params, double dt);

struct WeightSolverOptions {
  double tol = 1e-10;    // fixed-point residual on the prox-gradient map
  int max_iters = 10000;
};

/// Thrown when the weight solver hits the iteration cap; carries the last
/// iterate and its residual.
class WeightSolverError : public std::runtime_error {
 public:
  WeightSolverError(std::string message, Eigen::VectorXd iterate, double residual);
  const Eigen::VectorXd& last_iterate() const { return iterate_; }
  double residual() const { return residual_; }

 private:
  Eigen::VectorXd iterate_;
  double residual_;
};

/// Global minimizer of
///   ||Y_v - F_v w||^2 + ||Y_omega - F_omega w||^2 + alpha ||w - w_prev||_1
/// over the probability simplex. Accelerated proximal gradient with an
/// exact prox (per-coordinate soft threshold + bisection on the simplex
/// multiplier), warm-started from w_prev.
EnsembleWeights solve_weights(const WeightProblem& problem,
                              const EnsembleWeights& w_prev, double alpha,
                              const WeightSolverOptions& options = {});

double weight_objective(const WeightProblem& problem, const Eigen::VectorXd& w,
                        const Eigen::VectorXd& w_prev, double alpha);

/// Pushes a record, rebuilds the problem over the window, and re-solves.
EnsembleWeights update(const TerrainGpBank& bank, MotionHistory& history,
                       const EnsembleWeights& w_prev, double alpha,
                       const MotionRecord& new_record, const DynamicParams& params,
                       double dt, const WeightSolverOptions& options = {});

}  // namespace sswmr

#endif  // SSWMR_ENSEMBLE_HPP
