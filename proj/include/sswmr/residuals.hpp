#ifndef SSWMR_RESIDUALS_HPP
#define SSWMR_RESIDUALS_HPP

#include <Eigen/Dense>
#include <vector>

#include "sswmr/dataset.hpp"
#include "sswmr/dynamics.hpp"

namespace sswmr {

/// GP training sample: regression input z and the velocity residuals left
/// over after the nominal one-step prediction.
struct ResidualSample {
  Eigen::Vector4d z = Eigen::Vector4d::Zero();  // [v, omega, v_ref, omega_ref]
  double g_v = 0.0;
  double g_omega = 0.0;
};

struct ResidualDataset {
  std::vector<ResidualSample> samples;
  int skipped = 0;  // consecutive pairs dropped for timestamp gaps

  Eigen::MatrixXd inputs() const;     // p x 4
  Eigen::VectorXd targets_v() const;  // p
  Eigen::VectorXd targets_omega() const;
};

/// Builds residual targets from consecutive dataset records: z(k) from the
/// measured state and command, residuals as measured next velocities minus
/// the nominal one-step prediction. Pairs with a timestamp gap above
/// 1.5*dt are skipped and counted.
ResidualDataset build_residual_dataset(const TerrainDataset& traj,
                                       const DynamicParams& params, double dt);

}  // namespace sswmr

#endif  // SSWMR_RESIDUALS_HPP
