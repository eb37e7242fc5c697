#ifndef SSWMR_GP_HPP
#define SSWMR_GP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace sswmr {

/// Squared-exponential kernel hyperparameters, stored as logs so the
/// marginal-likelihood optimization is unconstrained. The length scales
/// are per input dimension (ARD).
struct GpHyperparams {
  Eigen::VectorXd log_length_scale;
  double log_signal_var = 0.0;
  double log_noise_var = 0.0;

  GpHyperparams() = default;
  GpHyperparams(const Eigen::VectorXd& length_scales, double signal_var,
                double noise_var);

  static GpHyperparams defaults(int dim);

  int dim() const { return int(log_length_scale.size()); }
  Eigen::VectorXd length_scales() const { return log_length_scale.array().exp(); }
  double signal_var() const { return std::exp(log_signal_var); }
  double noise_var() const { return std::exp(log_noise_var); }

  /// Flat parameter vector [log ell_1..n, log sigma_f^2, log sigma_n^2].
  Eigen::VectorXd pack() const;
  static GpHyperparams unpack(const Eigen::VectorXd& packed);
};

/// Kernel value between two points; the noise term is added only on the
/// diagonal (z1 == z2 semantics), controlled by the caller.
double se_kernel(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2,
                 const GpHyperparams& hyper, bool include_noise);

/// Exact GP regressor. Inputs are standardized with statistics estimated
/// from the training set; the Cholesky factor and alpha are cached.
struct GpModel {
  GpHyperparams hyper;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_std;
  Eigen::MatrixXd train_inputs;   // p x n, standardized
  Eigen::VectorXd train_targets;  // p
  Eigen::MatrixXd chol;           // lower factor of K + sigma_n^2 I (+ jitter)
  Eigen::VectorXd alpha;          // (K + sigma_n^2 I)^-1 y
  double jitter = 0.0;

  int dim() const { return int(train_inputs.cols()); }
  int count() const { return int(train_inputs.rows()); }
};

GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
            const GpHyperparams& hyper);

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

GpPrediction predict(const GpModel& model, const Eigen::VectorXd& z);

struct NlmlResult {
  double value = 0.0;
  Eigen::VectorXd gradient;  // w.r.t. the packed log-hyperparameters
};

NlmlResult negative_log_marginal_likelihood(const Eigen::MatrixXd& inputs,
                                            const Eigen::VectorXd& targets,
                                            const GpHyperparams& hyper);

struct OptimizeOptions {
  int max_iters = 200;
  int restarts = 3;
  double grad_tol = 1e-6;
  std::uint64_t seed = 0;
};

/// L-BFGS minimization of the negative log marginal likelihood in
/// log-hyperparameter space, with random restarts drawn log-uniform
/// over [1e-2, 1e2]. Returns the best iterate seen.
GpHyperparams optimize_hyperparams(const Eigen::MatrixXd& inputs,
                                   const Eigen::VectorXd& targets,
                                   const GpHyperparams& init,
                                   const OptimizeOptions& options = {});

}  // namespace sswmr

#endif  // SSWMR_GP_HPP
