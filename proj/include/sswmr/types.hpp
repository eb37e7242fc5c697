#ifndef SSWMR_TYPES_HPP
#define SSWMR_TYPES_HPP

#include <Eigen/Dense>

namespace sswmr {

using Vector2 = Eigen::Vector2d;
using Vector5 = Eigen::Matrix<double, 5, 1>;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix2 = Eigen::Matrix2d;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double theta);

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

/// Tests whether `m + jitter*I` admits a Cholesky factorization and reports
/// the minimum eigenvalue of the symmetrized input.
PsdCheck is_psd(const Eigen::MatrixXd& m, double jitter = 0.0);

/// Full planar robot state: global position/heading plus body-frame
/// linear and angular velocity.
struct State5 {
  double x = 0.0;      // m, global frame
  double y = 0.0;      // m, global frame
  double theta = 0.0;  // rad, wrapped to (-pi, pi]
  double v = 0.0;      // m/s, body frame
  double omega = 0.0;  // rad/s, body frame

  State5() = default;
  State5(double x_, double y_, double theta_, double v_, double omega_);
  explicit State5(const Vector5& vec);

  Vector5 vec() const;
  Vector2 eta() const { return Vector2(v, omega); }
};

/// Commanded body velocities.
struct Control {
  double v_ref = 0.0;      // m/s
  double omega_ref = 0.0;  // rad/s

  Control() = default;
  Control(double v, double w);

  Vector2 vec() const { return Vector2(v_ref, omega_ref); }

  static constexpr double kMaxVRef = 2.0;
  static constexpr double kMaxOmegaRef = 4.0;
};

/// Gaussian over State5. Construction re-symmetrizes the covariance and
/// rejects matrices that are not PSD up to a -1e-9 eigenvalue floor.
struct GaussianBelief {
  Vector5 mean = Vector5::Zero();
  Matrix5 cov = Matrix5::Zero();

  GaussianBelief() = default;
  GaussianBelief(const Vector5& mean_, const Matrix5& cov_);
};

/// Gaussian over the (v, omega) disturbance pair.
struct Gaussian2 {
  Vector2 mean = Vector2::Zero();
  Matrix2 cov = Matrix2::Zero();

  Gaussian2() = default;
  Gaussian2(const Vector2& mean_, const Matrix2& cov_);
};

}  // namespace sswmr

#endif  // SSWMR_TYPES_HPP
