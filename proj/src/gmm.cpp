#include "sswmr/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace sswmr {

namespace {

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k,
                              std::mt19937_64& rng) {
  const int p = int(points.rows());
  std::uniform_int_distribution<int> uniform(0, p - 1);
  Eigen::MatrixXd centers(k, points.cols());
  centers.row(0) = points.row(uniform(rng));

  Eigen::VectorXd dist2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    int chosen = 0;
    if (total <= 0.0) {
      chosen = uniform(rng);  // all remaining points coincide with a center
    } else {
      double target = unit(rng) * total;
      for (int i = 0; i < p; ++i) {
        target -= dist2(i);
        if (target <= 0.0) {
          chosen = i;
          break;
        }
      }
    }
    centers.row(c) = points.row(chosen);
    dist2 = dist2.cwiseMin(
        (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

}  // namespace

DiagonalGmm fit_gmm(const Eigen::MatrixXd& points, int k_components,
                    std::uint64_t seed, const GmmOptions& options) {
  const int p = int(points.rows());
  const int n = int(points.cols());
  if (k_components < 1 || p < k_components) {
    throw std::invalid_argument("fit_gmm: need at least k samples");
  }

  std::mt19937_64 rng(seed);
  DiagonalGmm gmm;
  gmm.means = kmeanspp_init(points, k_components, rng);
  const Eigen::RowVectorXd global_var =
      (points.rowwise() - points.colwise().mean()).array().square().colwise().mean();
  const double var_floor = 1e-9 + 1e-6 * std::max(global_var.maxCoeff(), 1e-12);
  gmm.variances = global_var.cwiseMax(var_floor).replicate(k_components, 1);
  gmm.weights = Eigen::VectorXd::Constant(k_components, 1.0 / k_components);

  Eigen::MatrixXd log_resp(p, k_components);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iters; ++iter) {
    // E step: log responsibilities via log-sum-exp
    for (int c = 0; c < k_components; ++c) {
      const Eigen::RowVectorXd mu = gmm.means.row(c);
      const Eigen::RowVectorXd var = gmm.variances.row(c);
      const double log_norm =
          -0.5 * (var.array().log().sum() + n * std::log(2.0 * M_PI));
      log_resp.col(c) =
          (((points.rowwise() - mu).array().square().rowwise() / var.array())
               .rowwise()
               .sum() *
           -0.5) +
          log_norm + std::log(gmm.weights(c));
    }
    const Eigen::VectorXd row_max = log_resp.rowwise().maxCoeff();
    const Eigen::VectorXd log_total =
        ((log_resp.colwise() - row_max).array().exp().rowwise().sum().log() +
         row_max.array())
            .matrix();
    const double ll = log_total.mean();
    log_resp.colwise() -= log_total;

    // M step
    const Eigen::MatrixXd resp = log_resp.array().exp();
    const Eigen::VectorXd nk = resp.colwise().sum();
    for (int c = 0; c < k_components; ++c) {
      if (nk(c) < 1e-10) continue;  // starved component keeps its parameters
      const Eigen::RowVectorXd mu = (resp.col(c).transpose() * points) / nk(c);
      gmm.means.row(c) = mu;
      const Eigen::MatrixXd centered = points.rowwise() - mu;
      gmm.variances.row(c) =
          ((centered.array().square().colwise() * resp.col(c).array()).colwise().sum() /
           nk(c))
              .cwiseMax(var_floor);
    }
    gmm.weights = nk / double(p);

    if (std::abs(ll - prev_ll) < options.tol) break;
    prev_ll = ll;
  }
  return gmm;
}

SubsetResult select_training_subset(const Eigen::MatrixXd& points, int k_clusters,
                                    std::uint64_t seed, const GmmOptions& options) {
  const int p = int(points.rows());
  if (k_clusters < 1) {
    throw std::invalid_argument("select_training_subset: k_clusters must be >= 1");
  }

  SubsetResult out;
  if (k_clusters >= p) {
    // every distinct sample
    std::set<int> chosen;
    std::vector<int> seen;
    for (int i = 0; i < p; ++i) {
      bool duplicate = false;
      for (int j : seen) {
        if ((points.row(i) - points.row(j)).norm() == 0.0) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) {
        seen.push_back(i);
        chosen.insert(i);
      }
    }
    out.indices.assign(chosen.begin(), chosen.end());
    if (k_clusters > p) {
      out.warning = "requested " + std::to_string(k_clusters) + " clusters but only " +
                    std::to_string(p) + " samples; returning all samples";
    }
    return out;
  }

  const DiagonalGmm gmm = fit_gmm(points, k_clusters, seed, options);
  std::set<int> chosen;
  for (int c = 0; c < k_clusters; ++c) {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p; ++i) {
      const double d2 = (points.row(i) - gmm.means.row(c)).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    chosen.insert(best);
  }
  out.indices.assign(chosen.begin(), chosen.end());
  return out;
}

}  // namespace sswmr
