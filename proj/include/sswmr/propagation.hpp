#ifndef SSWMR_PROPAGATION_HPP
#define SSWMR_PROPAGATION_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sswmr/dynamics.hpp"
#include "sswmr/ensemble.hpp"
#include "sswmr/gp.hpp"
#include "sswmr/types.hpp"

namespace sswmr {

/// Sigma-point configuration: 4n+1 points over the disturbance-augmented
/// state with weights lambda/(2n+lambda) for the center and
/// 0.5/(2n+lambda) for the rest.
struct SigmaConfig {
  double lambda = 1.0;
  int n = 5;
};

/// The 4n+1 sigma-point weights; they sum to one identically.
Eigen::VectorXd sigma_weights(const SigmaConfig& config);

/// Velocity-disturbance source queried at z = [v, omega, v_ref, omega_ref].
class DisturbanceModel {
 public:
  virtual ~DisturbanceModel() = default;
  virtual Gaussian2 eval(const Eigen::Vector4d& z) const = 0;
};

class ZeroDisturbance final : public DisturbanceModel {
 public:
  Gaussian2 eval(const Eigen::Vector4d&) const override { return {}; }
};

/// A single terrain's (g_v, g_omega) GP pair.
class GpPairDisturbance final : public DisturbanceModel {
 public:
  GpPairDisturbance(const GpModel& gp_v, const GpModel& gp_omega)
      : gp_v_(&gp_v), gp_omega_(&gp_omega) {}
  Gaussian2 eval(const Eigen::Vector4d& z) const override;

 private:
  const GpModel* gp_v_;
  const GpModel* gp_omega_;
};

/// Terrain bank blended with fixed weights.
class EnsembleDisturbance final : public DisturbanceModel {
 public:
  EnsembleDisturbance(const TerrainGpBank& bank, EnsembleWeights weights);
  Gaussian2 eval(const Eigen::Vector4d& z) const override;

 private:
  const TerrainGpBank* bank_;
  EnsembleWeights weights_;
};

struct BeliefTrajectory {
  std::vector<GaussianBelief> beliefs;  // N+1 entries, element 0 = initial
  std::vector<Control> controls;        // N entries
};

/// One sigma-point propagation step through the disturbed motion model:
/// the belief is augmented with the disturbance Gaussian, 4n+1 points are
/// pushed through the nominal step plus additive disturbance, and the
/// output moments are reassembled with heading treated circularly.
GaussianBelief propagate_step(const GaussianBelief& belief, const Control& u,
                              const Gaussian2& gp_out, const DynamicParams& params,
                              double dt, const SigmaConfig& config);

/// Iterates propagate_step over a control sequence; the disturbance model
/// is queried at the propagated mean velocities each step.
BeliefTrajectory propagate_horizon(const GaussianBelief& belief0,
                                   std::span<const Control> controls,
                                   const DisturbanceModel& model,
                                   const DynamicParams& params, double dt,
                                   const SigmaConfig& config);

/// First-order baseline: covariance propagated through the Jacobian of the
/// discrete map (central differences) plus the injected disturbance block.
BeliefTrajectory propagate_linear(const GaussianBelief& belief0,
                                  std::span<const Control> controls,
                                  const DisturbanceModel& model,
                                  const DynamicParams& params, double dt);

struct MonteCarloResult {
  /// states[k] is an n_samples x 5 matrix of sample states after k steps;
  /// states[0] holds the initial draws.
  std::vector<Eigen::MatrixXd> states;
};

/// Samples the same generative model the sigma-point transform
/// approximates: per step one disturbance Gaussian (queried at the sample
/// mean velocities) with independent draws per sample. Deterministic under
/// the seed.
MonteCarloResult monte_carlo_rollout(const GaussianBelief& belief0,
                                     std::span<const Control> controls,
                                     const DisturbanceModel& model,
                                     const DynamicParams& params, double dt,
                                     int n_samples, std::uint64_t seed);

/// Fraction of samples whose squared Mahalanobis distance in the (X, Y)
/// marginal is at most 9 (the 3-sigma ellipse).
double coverage_fraction(const GaussianBelief& belief, const Eigen::MatrixXd& samples);

/// Square root factor S with S*S^T = P for PSD P, exact on singular
/// matrices (no jitter), via pivoted LDLT with a small negative tolerance.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& p);

}  // namespace sswmr

#endif  // SSWMR_PROPAGATION_HPP
