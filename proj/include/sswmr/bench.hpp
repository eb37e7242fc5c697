#ifndef SSWMR_BENCH_HPP
#define SSWMR_BENCH_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sswmr/baselines.hpp"
#include "sswmr/dataset.hpp"
#include "sswmr/ensemble.hpp"
#include "sswmr/propagation.hpp"

namespace sswmr {

/// Deterministic mean-prediction rollout interface shared by all
/// benchmarked models.
class MotionModel {
 public:
  virtual ~MotionModel() = default;
  virtual std::vector<State5> rollout(const State5& x0, std::span<const Control> controls,
                                      double dt) const = 0;
  virtual std::string name() const = 0;
};

/// Dynamic unicycle rolled forward with the disturbance model's mean
/// added to the velocities each step (pass ZeroDisturbance for the
/// nominal model).
class DynamicMotionModel final : public MotionModel {
 public:
  DynamicMotionModel(const DynamicParams& params, const DisturbanceModel& disturbance,
                     std::string name);
  std::vector<State5> rollout(const State5& x0, std::span<const Control> controls,
                              double dt) const override;
  std::string name() const override { return name_; }

 private:
  DynamicParams params_;
  const DisturbanceModel* disturbance_;
  std::string name_;
};

class KinematicMotionModel final : public MotionModel {
 public:
  explicit KinematicMotionModel(const JacobianModel& model);
  std::vector<State5> rollout(const State5& x0, std::span<const Control> controls,
                              double dt) const override;
  std::string name() const override;

 private:
  JacobianModel model_;
};

/// Moving-horizon terminal errors: velocity MAEs plus position errors
/// normalized by the ground-truth displacement over the horizon.
/// Trajectories with negligible displacement (or heading change, for the
/// angular percentage) are excluded and counted.
struct ErrorReport {
  std::string model;
  std::string terrain;
  double angular_position_pct = 0.0;
  double linear_position_pct = 0.0;
  double angular_velocity_mae = 0.0;  // rad/s
  double linear_velocity_mae = 0.0;   // m/s
  int trajectory_count = 0;
  int angular_excluded = 0;
  int linear_excluded = 0;
};

ErrorReport sweep_errors(const MotionModel& model, const TerrainDataset& dataset,
                         double horizon_s, double dt);

struct WeightTrace {
  std::vector<long> steps;
  std::vector<Eigen::VectorXd> weights;
  std::vector<std::string> labels;
  /// N/A when the streamed terrain is not in the bank.
  std::optional<int> steps_to_correct_argmax;
  std::optional<double> steady_state_true_weight;
};

/// Streams a dataset through the online weight adaptation, starting from
/// uniform weights.
WeightTrace run_weight_trace(const TerrainGpBank& bank, const TerrainDataset& dataset,
                             const DynamicParams& params, int history_length,
                             double alpha, double dt,
                             const WeightSolverOptions& options = {});

struct CoverageScenario {
  GaussianBelief belief0;
  std::vector<Control> controls;
};

struct CoverageReport {
  /// Per step (0..N): 3-sigma (X, Y) coverage of the Monte-Carlo samples
  /// under each propagation method's belief.
  std::vector<double> sigma_point;
  std::vector<double> linear;
};

CoverageReport run_coverage(const DisturbanceModel& model, const DynamicParams& params,
                            const CoverageScenario& scenario, double dt,
                            const SigmaConfig& config, int n_mc, std::uint64_t seed);

/// Mean absolute one-step angular-velocity error binned over the
/// commanded-velocity plane. Empty bins keep count 0 and a NaN mean.
struct HeatmapGrid {
  Eigen::VectorXd v_edges;       // bins_v + 1
  Eigen::VectorXd omega_edges;   // bins_omega + 1
  Eigen::MatrixXd mean_abs_err;  // bins_v x bins_omega, NaN where empty
  Eigen::MatrixXi counts;
};

HeatmapGrid run_heatmap(const MotionModel& model, const TerrainDataset& dataset,
                        int bins_v, int bins_omega, double dt);

}  // namespace sswmr

#endif  // SSWMR_BENCH_HPP
