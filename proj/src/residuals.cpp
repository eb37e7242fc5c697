#include "sswmr/residuals.hpp"

#include <stdexcept>

namespace sswmr {

Eigen::MatrixXd ResidualDataset::inputs() const {
  Eigen::MatrixXd z(samples.size(), 4);
  for (size_t i = 0; i < samples.size(); ++i) z.row(i) = samples[i].z.transpose();
  return z;
}

Eigen::VectorXd ResidualDataset::targets_v() const {
  Eigen::VectorXd y(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) y(i) = samples[i].g_v;
  return y;
}

Eigen::VectorXd ResidualDataset::targets_omega() const {
  Eigen::VectorXd y(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) y(i) = samples[i].g_omega;
  return y;
}

ResidualDataset build_residual_dataset(const TerrainDataset& traj,
                                       const DynamicParams& params, double dt) {
  if (!traj.has_velocities && !traj.records.empty()) {
    throw std::invalid_argument("build_residual_dataset: dataset has no velocities");
  }
  ResidualDataset out;
  if (traj.records.size() < 2) return out;

  out.samples.reserve(traj.records.size() - 1);
  for (size_t k = 0; k + 1 < traj.records.size(); ++k) {
    const auto& cur = traj.records[k];
    const auto& next = traj.records[k + 1];
    if (next.t - cur.t > 1.5 * dt) {
      ++out.skipped;
      continue;
    }
    const Vector2 eta(cur.v, cur.omega);
    const Control u(cur.v_ref, cur.omega_ref);
    const Vector2 predicted = step_velocities_nominal(eta, u, params, dt);
    ResidualSample s;
    s.z << cur.v, cur.omega, cur.v_ref, cur.omega_ref;
    s.g_v = next.v - predicted(0);
    s.g_omega = next.omega - predicted(1);
    out.samples.push_back(s);
  }
  return out;
}

}  // namespace sswmr
