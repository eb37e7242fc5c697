#include "sswmr/bench.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sswmr {

DynamicMotionModel::DynamicMotionModel(const DynamicParams& params,
                                       const DisturbanceModel& disturbance,
                                       std::string name)
    : params_(params), disturbance_(&disturbance), name_(std::move(name)) {}

std::vector<State5> DynamicMotionModel::rollout(const State5& x0,
                                                std::span<const Control> controls,
                                                double dt) const {
  std::vector<State5> traj;
  traj.reserve(controls.size() + 1);
  traj.push_back(x0);
  for (const Control& u : controls) {
    const State5& x = traj.back();
    Vector5 next = step_nominal(x, u, params_, dt).vec();
    const Gaussian2 gp =
        disturbance_->eval(Eigen::Vector4d(x.v, x.omega, u.v_ref, u.omega_ref));
    next(3) += gp.mean(0);
    next(4) += gp.mean(1);
    traj.push_back(State5(next));
  }
  return traj;
}

KinematicMotionModel::KinematicMotionModel(const JacobianModel& model) : model_(model) {}

std::vector<State5> KinematicMotionModel::rollout(const State5& x0,
                                                  std::span<const Control> controls,
                                                  double dt) const {
  return rollout_kinematic(model_, x0, controls, dt);
}

std::string KinematicMotionModel::name() const { return to_string(model_.variant); }

ErrorReport sweep_errors(const MotionModel& model, const TerrainDataset& dataset,
                         double horizon_s, double dt) {
  if (!dataset.has_velocities) {
    throw std::invalid_argument("sweep_errors: dataset has no derived velocities");
  }
  const double steps_exact = horizon_s / dt;
  const int n_steps = int(std::llround(steps_exact));
  if (n_steps < 1 || std::abs(steps_exact - n_steps) > 1e-9) {
    throw std::invalid_argument("sweep_errors: horizon must be an integer multiple of dt");
  }
  if (int(dataset.size()) <= n_steps) {
    throw std::invalid_argument("sweep_errors: dataset shorter than one horizon");
  }

  constexpr double kMinDisplacement = 0.05;  // m
  constexpr double kMinHeadingChange = 0.05; // rad

  ErrorReport report;
  report.model = model.name();
  report.terrain = dataset.terrain_label;

  double sum_ang_pct = 0.0, sum_lin_pct = 0.0, sum_w_mae = 0.0, sum_v_mae = 0.0;
  int ang_count = 0, lin_count = 0;

  std::vector<Control> controls(n_steps);
  for (size_t start = 0; start + n_steps < dataset.size(); ++start) {
    const auto& first = dataset.records[start];
    const auto& last = dataset.records[start + n_steps];
    for (int i = 0; i < n_steps; ++i) {
      const auto& r = dataset.records[start + i];
      controls[i] = Control(r.v_ref, r.omega_ref);
    }
    const State5 x0(first.x, first.y, first.theta, first.v, first.omega);
    const std::vector<State5> predicted = model.rollout(x0, controls, dt);
    const State5& xp = predicted.back();

    sum_v_mae += std::abs(xp.v - last.v);
    sum_w_mae += std::abs(xp.omega - last.omega);
    ++report.trajectory_count;

    const double displacement = std::hypot(last.x - first.x, last.y - first.y);
    if (displacement >= kMinDisplacement) {
      sum_lin_pct += std::hypot(xp.x - last.x, xp.y - last.y) / displacement * 100.0;
      ++lin_count;
    } else {
      ++report.linear_excluded;
    }

    double heading_change = 0.0;
    for (int i = 0; i < n_steps; ++i) {
      heading_change += wrap_angle(dataset.records[start + i + 1].theta -
                                   dataset.records[start + i].theta);
    }
    if (std::abs(heading_change) >= kMinHeadingChange) {
      sum_ang_pct +=
          std::abs(wrap_angle(xp.theta - last.theta)) / std::abs(heading_change) * 100.0;
      ++ang_count;
    } else {
      ++report.angular_excluded;
    }
  }

  if (report.trajectory_count == 0) {
    throw std::invalid_argument("sweep_errors: no complete horizons in dataset");
  }
  report.linear_velocity_mae = sum_v_mae / report.trajectory_count;
  report.angular_velocity_mae = sum_w_mae / report.trajectory_count;
  report.linear_position_pct = lin_count > 0 ? sum_lin_pct / lin_count : 0.0;
  report.angular_position_pct = ang_count > 0 ? sum_ang_pct / ang_count : 0.0;
  return report;
}

WeightTrace run_weight_trace(const TerrainGpBank& bank, const TerrainDataset& dataset,
                             const DynamicParams& params, int history_length,
                             double alpha, double dt,
                             const WeightSolverOptions& options) {
  if (dataset.size() < 2) {
    throw std::invalid_argument("run_weight_trace: dataset too short");
  }
  if (!dataset.has_velocities) {
    throw std::invalid_argument("run_weight_trace: dataset has no velocities");
  }

  WeightTrace trace;
  for (const auto& terrain : bank.terrains) trace.labels.push_back(terrain.label);
  const int true_index = bank.index_of(dataset.terrain_label);

  MotionHistory history(history_length);
  EnsembleWeights weights = EnsembleWeights::uniform(bank.size());
  trace.steps.push_back(0);
  trace.weights.push_back(weights.w);

  int first_correct = -1;
  double steady_sum = 0.0;
  int steady_count = 0;
  const size_t n_updates = dataset.size() - 1;
  for (size_t k = 0; k + 1 < dataset.size(); ++k) {
    const auto& cur = dataset.records[k];
    const auto& next = dataset.records[k + 1];
    MotionRecord record;
    record.z << cur.v, cur.omega, cur.v_ref, cur.omega_ref;
    record.v_next = next.v;
    record.omega_next = next.omega;
    weights = update(bank, history, weights, alpha, record, params, dt, options);
    trace.steps.push_back(long(k + 1));
    trace.weights.push_back(weights.w);

    if (true_index >= 0) {
      int argmax = 0;
      weights.w.maxCoeff(&argmax);
      if (argmax == true_index && first_correct < 0) first_correct = int(k + 1);
      if (k + 1 > n_updates / 2) {
        steady_sum += weights.w(true_index);
        ++steady_count;
      }
    }
  }

  if (true_index >= 0) {
    if (first_correct >= 0) trace.steps_to_correct_argmax = first_correct;
    if (steady_count > 0) trace.steady_state_true_weight = steady_sum / steady_count;
  }
  return trace;
}

CoverageReport run_coverage(const DisturbanceModel& model, const DynamicParams& params,
                            const CoverageScenario& scenario, double dt,
                            const SigmaConfig& config, int n_mc, std::uint64_t seed) {
  const BeliefTrajectory sigma =
      propagate_horizon(scenario.belief0, scenario.controls, model, params, dt, config);
  const BeliefTrajectory linear =
      propagate_linear(scenario.belief0, scenario.controls, model, params, dt);
  const MonteCarloResult mc =
      monte_carlo_rollout(scenario.belief0, scenario.controls, model, params, dt, n_mc, seed);

  CoverageReport report;
  for (size_t k = 0; k < mc.states.size(); ++k) {
    // step 0 has a deterministic or matching belief by construction; skip
    // singular initial covariances gracefully
    auto fraction = [&](const GaussianBelief& belief) {
      const Matrix2 block = belief.cov.topLeftCorner<2, 2>();
      if (block.determinant() <= 1e-300) return 1.0;
      return coverage_fraction(belief, mc.states[k]);
    };
    report.sigma_point.push_back(fraction(sigma.beliefs[k]));
    report.linear.push_back(fraction(linear.beliefs[k]));
  }
  return report;
}

HeatmapGrid run_heatmap(const MotionModel& model, const TerrainDataset& dataset,
                        int bins_v, int bins_omega, double dt) {
  if (bins_v < 1 || bins_omega < 1) {
    throw std::invalid_argument("run_heatmap: need at least one bin per axis");
  }
  if (dataset.size() < 2 || !dataset.has_velocities) {
    throw std::invalid_argument("run_heatmap: dataset unusable");
  }

  double v_lo = std::numeric_limits<double>::infinity(), v_hi = -v_lo;
  double w_lo = v_lo, w_hi = -v_lo;
  for (const auto& r : dataset.records) {
    v_lo = std::min(v_lo, r.v_ref);
    v_hi = std::max(v_hi, r.v_ref);
    w_lo = std::min(w_lo, r.omega_ref);
    w_hi = std::max(w_hi, r.omega_ref);
  }
  if (v_hi - v_lo < 1e-9) { v_lo -= 0.5; v_hi += 0.5; }
  if (w_hi - w_lo < 1e-9) { w_lo -= 0.5; w_hi += 0.5; }

  HeatmapGrid grid;
  grid.v_edges = Eigen::VectorXd::LinSpaced(bins_v + 1, v_lo, v_hi);
  grid.omega_edges = Eigen::VectorXd::LinSpaced(bins_omega + 1, w_lo, w_hi);
  grid.counts = Eigen::MatrixXi::Zero(bins_v, bins_omega);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(bins_v, bins_omega);

  std::vector<Control> one(1);
  for (size_t k = 0; k + 1 < dataset.size(); ++k) {
    const auto& cur = dataset.records[k];
    const auto& next = dataset.records[k + 1];
    one[0] = Control(cur.v_ref, cur.omega_ref);
    const State5 x0(cur.x, cur.y, cur.theta, cur.v, cur.omega);
    const std::vector<State5> predicted = model.rollout(x0, one, dt);
    const double err = std::abs(predicted.back().omega - next.omega);

    auto bin_index = [](double value, const Eigen::VectorXd& edges) {
      const int n = int(edges.size()) - 1;
      if (value <= edges(0)) return 0;
      if (value >= edges(n)) return n - 1;
      return std::min(n - 1, int((value - edges(0)) / (edges(n) - edges(0)) * n));
    };
    const int bi = bin_index(cur.v_ref, grid.v_edges);
    const int bj = bin_index(cur.omega_ref, grid.omega_edges);
    sums(bi, bj) += err;
    grid.counts(bi, bj) += 1;
  }

  grid.mean_abs_err = Eigen::MatrixXd::Constant(bins_v, bins_omega,
                                                std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < bins_v; ++i) {
    for (int j = 0; j < bins_omega; ++j) {
      if (grid.counts(i, j) > 0) grid.mean_abs_err(i, j) = sums(i, j) / grid.counts(i, j);
    }
  }
  return grid;
}

}  // namespace sswmr
