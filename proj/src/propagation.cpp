#include "sswmr/propagation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sswmr {

Eigen::VectorXd sigma_weights(const SigmaConfig& config) {
  const double denom = 2.0 * config.n + config.lambda;
  if (!(denom > 0.0)) {
    throw std::invalid_argument("sigma_weights: 2n + lambda must be positive");
  }
  Eigen::VectorXd w(4 * config.n + 1);
  w(0) = config.lambda / denom;
  w.tail(4 * config.n).setConstant(0.5 / denom);
  return w;
}

Gaussian2 GpPairDisturbance::eval(const Eigen::Vector4d& z) const {
  const GpPrediction pv = predict(*gp_v_, z);
  const GpPrediction pw = predict(*gp_omega_, z);
  Matrix2 cov = Matrix2::Zero();
  cov(0, 0) = pv.variance;
  cov(1, 1) = pw.variance;
  return Gaussian2(Vector2(pv.mean, pw.mean), cov);
}

EnsembleDisturbance::EnsembleDisturbance(const TerrainGpBank& bank,
                                         EnsembleWeights weights)
    : bank_(&bank), weights_(std::move(weights)) {
  if (bank_->size() != weights_.size()) {
    throw std::invalid_argument("EnsembleDisturbance: bank/weights size mismatch");
  }
}

Gaussian2 EnsembleDisturbance::eval(const Eigen::Vector4d& z) const {
  return ensemble_predict(*bank_, weights_, z);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& p) {
  if (p.rows() != p.cols()) {
    throw std::invalid_argument("psd_sqrt: matrix must be square");
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(p);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("psd_sqrt: factorization failed");
  }
  Eigen::VectorXd d = ldlt.vectorD();
  const double scale = std::max(d.cwiseAbs().maxCoeff(), 1.0);
  if (d.minCoeff() < -1e-9 * scale) {
    throw std::runtime_error("psd_sqrt: matrix is not PSD (min pivot " +
                             std::to_string(d.minCoeff()) + ")");
  }
  d = d.cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd s = Eigen::MatrixXd(ldlt.matrixL()) * d.asDiagonal();
  return ldlt.transpositionsP().transpose() * s;
}

namespace {

constexpr int kStateDim = 5;

Eigen::Matrix<double, 10, 1> augmented_mean(const GaussianBelief& belief,
                                            const Gaussian2& gp_out) {
  Eigen::Matrix<double, 10, 1> a;
  a.head<5>() = belief.mean;
  a.tail<5>().setZero();
  a(8) = gp_out.mean(0);
  a(9) = gp_out.mean(1);
  return a;
}

Eigen::Matrix<double, 10, 10> augmented_cov(const GaussianBelief& belief,
                                            const Gaussian2& gp_out) {
  Eigen::Matrix<double, 10, 10> p = Eigen::Matrix<double, 10, 10>::Zero();
  p.topLeftCorner<5, 5>() = belief.cov;
  p(8, 8) = gp_out.cov(0, 0);
  p(9, 9) = gp_out.cov(1, 1);
  return p;
}

Vector5 disturbance_vector(const Eigen::Matrix<double, 10, 1>& point) {
  return point.tail<5>();
}

}  // namespace

GaussianBelief propagate_step(const GaussianBelief& belief, const Control& u,
                              const Gaussian2& gp_out, const DynamicParams& params,
                              double dt, const SigmaConfig& config) {
  if (config.n != kStateDim) {
    throw std::invalid_argument("propagate_step: state dimension must be 5");
  }
  const Eigen::VectorXd weights = sigma_weights(config);
  const int n_aug = 2 * config.n;
  const int n_points = 4 * config.n + 1;
  const double spread = std::sqrt(2.0 * config.n + config.lambda);

  const Eigen::Matrix<double, 10, 1> a = augmented_mean(belief, gp_out);
  const Eigen::MatrixXd s = psd_sqrt(augmented_cov(belief, gp_out));

  // center point, then +/- spread along each factor column
  Eigen::MatrixXd points(10, n_points);
  points.col(0) = a;
  for (int j = 0; j < n_aug; ++j) {
    points.col(1 + j) = a + spread * s.col(j);
    points.col(1 + n_aug + j) = a - spread * s.col(j);
  }

  Eigen::MatrixXd transformed(kStateDim, n_points);
  for (int j = 0; j < n_points; ++j) {
    const State5 x(Vector5(points.col(j).head<5>()));
    const Vector5 next = step_nominal(x, u, params, dt).vec();
    transformed.col(j) = next + disturbance_vector(points.col(j));
  }

  // weighted mean; the heading is averaged on the circle
  Vector5 mean = Vector5::Zero();
  double sin_sum = 0.0, cos_sum = 0.0;
  for (int j = 0; j < n_points; ++j) {
    mean += weights(j) * transformed.col(j);
    sin_sum += weights(j) * std::sin(transformed(2, j));
    cos_sum += weights(j) * std::cos(transformed(2, j));
  }
  mean(2) = std::atan2(sin_sum, cos_sum);

  Matrix5 cov = Matrix5::Zero();
  for (int j = 0; j < n_points; ++j) {
    Vector5 d = transformed.col(j) - mean;
    d(2) = wrap_angle(transformed(2, j) - mean(2));
    cov += weights(j) * d * d.transpose();
  }
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianBelief(mean, cov);
}

namespace {

Eigen::Vector4d query_point(const Vector5& mean, const Control& u) {
  return Eigen::Vector4d(mean(3), mean(4), u.v_ref, u.omega_ref);
}

}  // namespace

BeliefTrajectory propagate_horizon(const GaussianBelief& belief0,
                                   std::span<const Control> controls,
                                   const DisturbanceModel& model,
                                   const DynamicParams& params, double dt,
                                   const SigmaConfig& config) {
  if (controls.empty()) {
    throw std::invalid_argument("propagate_horizon: need at least one control");
  }
  BeliefTrajectory traj;
  traj.beliefs.reserve(controls.size() + 1);
  traj.controls.assign(controls.begin(), controls.end());
  traj.beliefs.push_back(belief0);
  for (const Control& u : controls) {
    const GaussianBelief& current = traj.beliefs.back();
    const Gaussian2 gp_out = model.eval(query_point(current.mean, u));
    traj.beliefs.push_back(propagate_step(current, u, gp_out, params, dt, config));
  }
  return traj;
}

BeliefTrajectory propagate_linear(const GaussianBelief& belief0,
                                  std::span<const Control> controls,
                                  const DisturbanceModel& model,
                                  const DynamicParams& params, double dt) {
  if (controls.empty()) {
    throw std::invalid_argument("propagate_linear: need at least one control");
  }
  BeliefTrajectory traj;
  traj.beliefs.reserve(controls.size() + 1);
  traj.controls.assign(controls.begin(), controls.end());
  traj.beliefs.push_back(belief0);

  const double h = 1e-6;
  for (const Control& u : controls) {
    const GaussianBelief& current = traj.beliefs.back();
    const Gaussian2 gp_out = model.eval(query_point(current.mean, u));

    // Jacobian of the discrete map at the mean, central differences with
    // wrapped heading rows.
    Matrix5 jac;
    for (int i = 0; i < kStateDim; ++i) {
      Vector5 plus = current.mean, minus = current.mean;
      plus(i) += h;
      minus(i) -= h;
      const Vector5 fp = step_nominal(State5(plus), u, params, dt).vec();
      const Vector5 fm = step_nominal(State5(minus), u, params, dt).vec();
      Vector5 diff = fp - fm;
      diff(2) = wrap_angle(fp(2) - fm(2));
      jac.col(i) = diff / (2.0 * h);
    }

    Vector5 mean = step_nominal(State5(current.mean), u, params, dt).vec();
    mean(3) += gp_out.mean(0);
    mean(4) += gp_out.mean(1);
    mean(2) = wrap_angle(mean(2));

    Matrix5 cov = jac * current.cov * jac.transpose();
    cov(3, 3) += gp_out.cov(0, 0);
    cov(4, 4) += gp_out.cov(1, 1);
    cov = 0.5 * (cov + cov.transpose()).eval();
    traj.beliefs.push_back(GaussianBelief(mean, cov));
  }
  return traj;
}

MonteCarloResult monte_carlo_rollout(const GaussianBelief& belief0,
                                     std::span<const Control> controls,
                                     const DisturbanceModel& model,
                                     const DynamicParams& params, double dt,
                                     int n_samples, std::uint64_t seed) {
  if (n_samples < 1) {
    throw std::invalid_argument("monte_carlo_rollout: n_samples must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  MonteCarloResult out;
  out.states.reserve(controls.size() + 1);

  const Eigen::MatrixXd s0 = psd_sqrt(belief0.cov);
  Eigen::MatrixXd states(n_samples, kStateDim);
  for (int i = 0; i < n_samples; ++i) {
    Vector5 xi;
    for (int d = 0; d < kStateDim; ++d) xi(d) = gauss(rng);
    states.row(i) = (belief0.mean + s0 * xi).transpose();
  }
  out.states.push_back(states);

  for (const Control& u : controls) {
    const Eigen::Vector4d z(states.col(3).mean(), states.col(4).mean(), u.v_ref,
                            u.omega_ref);
    const Gaussian2 gp_out = model.eval(z);
    const Eigen::MatrixXd s_gp = psd_sqrt(gp_out.cov);
    for (int i = 0; i < n_samples; ++i) {
      const State5 x(Vector5(states.row(i).transpose()));
      Vector5 next = step_nominal(x, u, params, dt).vec();
      Vector2 xi(gauss(rng), gauss(rng));
      const Vector2 disturbance = gp_out.mean + s_gp * xi;
      next(3) += disturbance(0);
      next(4) += disturbance(1);
      states.row(i) = next.transpose();
    }
    out.states.push_back(states);
  }
  return out;
}

double coverage_fraction(const GaussianBelief& belief, const Eigen::MatrixXd& samples) {
  if (samples.cols() < 2 || samples.rows() < 1) {
    throw std::invalid_argument("coverage_fraction: need samples with (X, Y) columns");
  }
  const Matrix2 cov = belief.cov.topLeftCorner<2, 2>();
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  if (!(det > 1e-300)) {
    throw std::runtime_error("coverage_fraction: singular (X, Y) covariance block");
  }
  Matrix2 inv;
  inv << cov(1, 1), -cov(0, 1), -cov(1, 0), cov(0, 0);
  inv /= det;

  int inside = 0;
  for (int i = 0; i < samples.rows(); ++i) {
    const Vector2 d = samples.row(i).head<2>().transpose() - belief.mean.head<2>();
    if (d.dot(inv * d) <= 9.0) ++inside;
  }
  return double(inside) / double(samples.rows());
}

}  // namespace sswmr
