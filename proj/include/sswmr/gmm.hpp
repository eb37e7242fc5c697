#ifndef SSWMR_GMM_HPP
#define SSWMR_GMM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace sswmr {

struct GmmOptions {
  int max_iters = 100;
  double tol = 1e-6;  // on the mean log-likelihood
};

struct DiagonalGmm {
  Eigen::MatrixXd means;      // k x n
  Eigen::MatrixXd variances;  // k x n
  Eigen::VectorXd weights;    // k
};

/// EM fit of a diagonal-covariance Gaussian mixture, k-means++ initialized.
DiagonalGmm fit_gmm(const Eigen::MatrixXd& points, int k_components,
                    std::uint64_t seed, const GmmOptions& options = {});

struct SubsetResult {
  std::vector<int> indices;  // ascending, deduplicated
  std::string warning;
};

/// Picks the sample nearest each GMM component mean (Euclidean). Requesting
/// at least as many clusters as samples returns every distinct sample; a
/// request exceeding the sample count additionally sets a warning.
SubsetResult select_training_subset(const Eigen::MatrixXd& points, int k_clusters,
                                    std::uint64_t seed, const GmmOptions& options = {});

}  // namespace sswmr

#endif  // SSWMR_GMM_HPP
