#include "sswmr/baselines.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace sswmr {

std::string to_string(JacobianVariant variant) {
  switch (variant) {
    case JacobianVariant::idd: return "IDD";
    case JacobianVariant::edd2: return "EDD2";
    case JacobianVariant::edd5: return "EDD5";
    case JacobianVariant::fl: return "FL";
  }
  return "?";
}

JacobianVariant jacobian_variant_from_string(const std::string& name) {
  if (name == "IDD" || name == "idd") return JacobianVariant::idd;
  if (name == "EDD2" || name == "edd2") return JacobianVariant::edd2;
  if (name == "EDD5" || name == "edd5") return JacobianVariant::edd5;
  if (name == "FL" || name == "fl") return JacobianVariant::fl;
  throw std::invalid_argument("unknown Jacobian variant '" + name + "'");
}

Eigen::Matrix<double, 3, 2> idd_jacobian(double wheel_radius, double track_width) {
  Eigen::Matrix<double, 3, 2> j;
  j << 0.5 * wheel_radius, 0.5 * wheel_radius,
       0.0, 0.0,
       -wheel_radius / track_width, wheel_radius / track_width;
  return j;
}

std::pair<double, double> wheels_from_body(const Control& u, double wheel_radius,
                                           double track_width) {
  if (!(wheel_radius > 0.0) || !(track_width > 0.0)) {
    throw std::invalid_argument("wheels_from_body: geometry must be positive");
  }
  const double left = (u.v_ref - 0.5 * track_width * u.omega_ref) / wheel_radius;
  const double right = (u.v_ref + 0.5 * track_width * u.omega_ref) / wheel_radius;
  return {left, right};
}

Eigen::Vector3d predict_rates(const JacobianModel& model, double omega_l,
                              double omega_r) {
  return model.J * Eigen::Vector2d(omega_l, omega_r);
}

RateSamples rate_samples_from_dataset(const TerrainDataset& dataset,
                                      double wheel_radius, double track_width) {
  if (!dataset.has_velocities) {
    throw std::invalid_argument("rate_samples_from_dataset: dataset has no velocities");
  }
  RateSamples out;
  out.omega_l.reserve(dataset.size());
  for (const auto& r : dataset.records) {
    const auto [wl, wr] =
        wheels_from_body(Control(r.v_ref, r.omega_ref), wheel_radius, track_width);
    out.omega_l.push_back(wl);
    out.omega_r.push_back(wr);
    out.v_x.push_back(r.v);
    out.v_y.push_back(0.0);  // lateral velocity is not derived from pose logs
    out.omega.push_back(r.omega);
  }
  return out;
}

namespace {

// OLS of target against the two wheel-speed columns.
Eigen::Vector2d solve_row(const RateSamples& samples, const std::vector<double>& target) {
  const int m = int(samples.size());
  Eigen::MatrixXd w(m, 2);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    w(i, 0) = samples.omega_l[i];
    w(i, 1) = samples.omega_r[i];
    y(i) = target[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin > 1e10) {
    throw std::runtime_error("fit_jacobian: insufficient excitation in wheel speeds");
  }
  return svd.solve(y);
}

// Scalar projection coefficient <target, basis> / <basis, basis>.
double solve_scale(const std::vector<double>& basis, const std::vector<double>& target) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < basis.size(); ++i) {
    num += basis[i] * target[i];
    den += basis[i] * basis[i];
  }
  if (den < 1e-12) {
    throw std::runtime_error("fit_jacobian: insufficient excitation for scale factor");
  }
  return num / den;
}

}  // namespace

JacobianModel fit_jacobian(JacobianVariant variant, const RateSamples& samples,
                           double wheel_radius, double track_width) {
  if (samples.size() == 0) {
    throw std::invalid_argument("fit_jacobian: empty sample set");
  }
  if (variant != JacobianVariant::idd && samples.size() < 50) {
    throw std::invalid_argument("fit_jacobian: need at least 50 samples");
  }

  JacobianModel model;
  model.variant = variant;
  model.wheel_radius = wheel_radius;
  model.track_width = track_width;
  const Eigen::Matrix<double, 3, 2> nominal = idd_jacobian(wheel_radius, track_width);

  const int m = int(samples.size());
  switch (variant) {
    case JacobianVariant::idd:
      model.J = nominal;
      break;
    case JacobianVariant::edd2: {
      // per-axis slip scales on the nominal forward and turn maps
      std::vector<double> forward(m), turn(m);
      for (int i = 0; i < m; ++i) {
        forward[i] = nominal(0, 0) * samples.omega_l[i] + nominal(0, 1) * samples.omega_r[i];
        turn[i] = nominal(2, 0) * samples.omega_l[i] + nominal(2, 1) * samples.omega_r[i];
      }
      const double alpha_v = solve_scale(forward, samples.v_x);
      const double alpha_w = solve_scale(turn, samples.omega);
      model.J.row(0) = alpha_v * nominal.row(0);
      model.J.row(1).setZero();
      model.J.row(2) = alpha_w * nominal.row(2);
      break;
    }
    case JacobianVariant::edd5: {
      // free v_x and omega rows plus one lateral skew factor on the turn map
      model.J.row(0) = solve_row(samples, samples.v_x).transpose();
      model.J.row(2) = solve_row(samples, samples.omega).transpose();
      std::vector<double> turn(m);
      for (int i = 0; i < m; ++i) {
        turn[i] = nominal(2, 0) * samples.omega_l[i] + nominal(2, 1) * samples.omega_r[i];
      }
      const double gamma = solve_scale(turn, samples.v_y);
      model.J.row(1) = gamma * nominal.row(2);
      break;
    }
    case JacobianVariant::fl:
      model.J.row(0) = solve_row(samples, samples.v_x).transpose();
      model.J.row(1) = solve_row(samples, samples.v_y).transpose();
      model.J.row(2) = solve_row(samples, samples.omega).transpose();
      break;
  }
  return model;
}

JacobianModel fit_jacobian(JacobianVariant variant, const TerrainDataset& dataset,
                           double wheel_radius, double track_width) {
  return fit_jacobian(variant, rate_samples_from_dataset(dataset, wheel_radius, track_width),
                      wheel_radius, track_width);
}

double fit_residual(const JacobianModel& model, const RateSamples& samples) {
  double sse = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const Eigen::Vector3d rates = predict_rates(model, samples.omega_l[i], samples.omega_r[i]);
    const Eigen::Vector3d err(rates(0) - samples.v_x[i], rates(1) - samples.v_y[i],
                              rates(2) - samples.omega[i]);
    sse += err.squaredNorm();
  }
  return sse;
}

std::vector<State5> rollout_kinematic(const JacobianModel& model, const State5& x0,
                                      std::span<const Control> controls, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("rollout_kinematic: dt must be positive");
  }
  std::vector<State5> traj;
  traj.reserve(controls.size() + 1);
  traj.push_back(x0);
  Eigen::Vector3d pose(x0.x, x0.y, x0.theta);
  for (const Control& u : controls) {
    const auto [wl, wr] = wheels_from_body(u, model.wheel_radius, model.track_width);
    const Eigen::Vector3d rates = predict_rates(model, wl, wr);

    auto pose_rates = [&](const Eigen::Vector3d& p) {
      const double c = std::cos(p(2)), s = std::sin(p(2));
      return Eigen::Vector3d(rates(0) * c - rates(1) * s, rates(0) * s + rates(1) * c,
                             rates(2));
    };
    const Eigen::Vector3d k1 = pose_rates(pose);
    const Eigen::Vector3d k2 = pose_rates(pose + 0.5 * dt * k1);
    const Eigen::Vector3d k3 = pose_rates(pose + 0.5 * dt * k2);
    const Eigen::Vector3d k4 = pose_rates(pose + dt * k3);
    pose += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    pose(2) = wrap_angle(pose(2));
    traj.emplace_back(pose(0), pose(1), pose(2), rates(0), rates(2));
  }
  return traj;
}

}  // namespace sswmr
