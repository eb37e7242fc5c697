#include "sswmr/types.hpp"

#include <cmath>
#include <stdexcept>

namespace sswmr {

double wrap_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("wrap_angle: non-finite angle");
  }
  // remainder() lands in [-pi, pi]; fold -pi onto +pi for (-pi, pi].
  double w = std::remainder(theta, 2.0 * M_PI);
  if (w <= -M_PI) w = M_PI;
  return w;
}

PsdCheck is_psd(const Eigen::MatrixXd& m, double jitter) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("is_psd: matrix must be square");
  }
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  PsdCheck out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  Eigen::MatrixXd shifted = sym;
  shifted.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  // LLT can report success on an exactly singular PSD matrix; accept either
  // the factorization or a non-negative spectrum.
  out.psd = (llt.info() == Eigen::Success) || (out.min_eigenvalue + jitter >= 0.0);
  return out;
}

namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string("non-finite ") + what);
  }
}

}  // namespace

State5::State5(double x_, double y_, double theta_, double v_, double omega_)
    : x(x_), y(y_), theta(theta_), v(v_), omega(omega_) {
  require_finite(x, "x");
  require_finite(y, "y");
  require_finite(theta, "theta");
  require_finite(v, "v");
  require_finite(omega, "omega");
}

State5::State5(const Vector5& vec) : State5(vec(0), vec(1), vec(2), vec(3), vec(4)) {}

Vector5 State5::vec() const {
  Vector5 out;
  out << x, y, theta, v, omega;
  return out;
}

Control::Control(double v, double w) : v_ref(v), omega_ref(w) {
  require_finite(v_ref, "v_ref");
  require_finite(omega_ref, "omega_ref");
}

namespace {

// Shared validation for Gaussian types: re-symmetrize, then require the
// spectrum to clear the -1e-9 floor (checked with 1e-9 jitter).
Eigen::MatrixXd validate_cov(const Eigen::MatrixXd& cov, const char* what) {
  if (!cov.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite covariance");
  }
  Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  PsdCheck check = is_psd(sym, 1e-9);
  if (!check.psd) {
    throw std::invalid_argument(std::string(what) +
                                ": covariance not PSD (min eigenvalue " +
                                std::to_string(check.min_eigenvalue) + ")");
  }
  return sym;
}

}  // namespace

GaussianBelief::GaussianBelief(const Vector5& mean_, const Matrix5& cov_) : mean(mean_) {
  if (!mean.allFinite()) {
    throw std::invalid_argument("GaussianBelief: non-finite mean");
  }
  cov = validate_cov(cov_, "GaussianBelief");
}

Gaussian2::Gaussian2(const Vector2& mean_, const Matrix2& cov_) : mean(mean_) {
  if (!mean.allFinite()) {
    throw std::invalid_argument("Gaussian2: non-finite mean");
  }
  cov = validate_cov(cov_, "Gaussian2");
}

}  // namespace sswmr
