#include "sswmr/dynamics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "sswmr/lowpass.hpp"

namespace sswmr {

DynamicParams::DynamicParams(const Vector6& c_, double a_) : c(c_), a(a_) {
  if (!c.allFinite() || !std::isfinite(a)) {
    throw std::invalid_argument("DynamicParams: non-finite parameters");
  }
  if (c(0) <= 0.0 || c(1) <= 0.0) {
    throw std::invalid_argument("DynamicParams: c1 and c2 must be positive");
  }
  if (a < 0.0) {
    throw std::invalid_argument("DynamicParams: a must be non-negative");
  }
}

Eigen::Vector3d kinematic_rates(const Eigen::Vector3d& q, double v, double omega,
                                double a) {
  if (!q.allFinite() || !std::isfinite(v) || !std::isfinite(omega) ||
      !std::isfinite(a)) {
    throw std::invalid_argument("kinematic_rates: non-finite input");
  }
  const double c = std::cos(q(2));
  const double s = std::sin(q(2));
  return {v * c - a * omega * s, v * s + a * omega * c, omega};
}

Vector2 dynamic_rates_nominal(const Vector2& eta, const Control& u,
                              const DynamicParams& params) {
  if (!eta.allFinite()) {
    throw std::invalid_argument("dynamic_rates_nominal: non-finite velocities");
  }
  const Vector6& c = params.c;
  if (c(0) == 0.0 || c(1) == 0.0) {
    throw std::invalid_argument("dynamic_rates_nominal: c1/c2 must be nonzero");
  }
  const double v = eta(0);
  const double w = eta(1);
  const double v_dot = (c(2) * w * w - c(3) * v + u.v_ref) / c(0);
  const double w_dot = (-c(4) * v * w - c(5) * w + u.omega_ref) / c(1);
  return {v_dot, w_dot};
}

namespace {

Vector5 full_rates(const Vector5& x, const Control& u, const DynamicParams& params) {
  const Eigen::Vector3d q = x.head<3>();
  const Vector2 eta = x.tail<2>();
  Vector5 out;
  out.head<3>() = kinematic_rates(q, eta(0), eta(1), params.a);
  out.tail<2>() = dynamic_rates_nominal(eta, u, params);
  return out;
}

}  // namespace

State5 step_nominal(const State5& x, const Control& u, const DynamicParams& params,
                    double dt, Integrator method) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step_nominal: dt must be positive");
  }
  const Vector5 x0 = x.vec();
  Vector5 x1;
  if (method == Integrator::euler) {
    x1 = x0 + dt * full_rates(x0, u, params);
  } else {
    const Vector5 k1 = full_rates(x0, u, params);
    const Vector5 k2 = full_rates(x0 + 0.5 * dt * k1, u, params);
    const Vector5 k3 = full_rates(x0 + 0.5 * dt * k2, u, params);
    const Vector5 k4 = full_rates(x0 + dt * k3, u, params);
    x1 = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  x1(2) = wrap_angle(x1(2));
  return State5(x1);
}

Vector2 step_velocities_nominal(const Vector2& eta, const Control& u,
                                const DynamicParams& params, double dt,
                                Integrator method) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step_velocities_nominal: dt must be positive");
  }
  if (method == Integrator::euler) {
    return eta + dt * dynamic_rates_nominal(eta, u, params);
  }
  const Vector2 k1 = dynamic_rates_nominal(eta, u, params);
  const Vector2 k2 = dynamic_rates_nominal(eta + 0.5 * dt * k1, u, params);
  const Vector2 k3 = dynamic_rates_nominal(eta + 0.5 * dt * k2, u, params);
  const Vector2 k4 = dynamic_rates_nominal(eta + dt * k3, u, params);
  return eta + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<IdentSample> make_ident_log(std::span<const Vector2> eta,
                                        std::span<const Control> u, double dt) {
  if (eta.size() != u.size()) {
    throw std::invalid_argument("make_ident_log: eta/u length mismatch");
  }
  if (eta.size() < 2) {
    throw std::invalid_argument("make_ident_log: need at least 2 samples");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("make_ident_log: dt must be positive");
  }
  std::vector<IdentSample> log;
  log.reserve(eta.size() - 1);
  for (size_t k = 1; k < eta.size(); ++k) {
    IdentSample s;
    s.eta = 0.5 * (eta[k] + eta[k - 1]);
    s.eta_dot = (eta[k] - eta[k - 1]) / dt;
    s.u = u[k - 1];  // command held over [t_{k-1}, t_k]
    log.push_back(s);
  }
  return log;
}

IdentResult identify_params(std::span<const IdentSample> log, double filter_beta,
                            double a) {
  if (log.size() < 50) {
    throw std::invalid_argument("identify_params: need at least 50 samples");
  }

  const size_t m = log.size();

  // Regressor columns of the velocity dynamics, both channels:
  //   [vdot, 0, -w^2,  v,   0,  0] c = v_ref
  //   [0, wdot,    0,  0, v*w,  w] c = omega_ref
  std::vector<double> vdot(m), wdot(m), w2(m), v(m), vw(m), w(m), vref(m), wref(m);
  for (size_t k = 0; k < m; ++k) {
    const IdentSample& s = log[k];
    vdot[k] = s.eta_dot(0);
    wdot[k] = s.eta_dot(1);
    v[k] = s.eta(0);
    w[k] = s.eta(1);
    w2[k] = s.eta(1) * s.eta(1);
    vw[k] = s.eta(0) * s.eta(1);
    vref[k] = s.u.v_ref;
    wref[k] = s.u.omega_ref;
  }

  const double var_vref = [&] {
    double mean = 0.0, sq = 0.0;
    for (double x : vref) mean += x;
    mean /= double(m);
    for (double x : vref) sq += (x - mean) * (x - mean);
    return sq / double(m);
  }();
  const double var_wref = [&] {
    double mean = 0.0, sq = 0.0;
    for (double x : wref) mean += x;
    mean /= double(m);
    for (double x : wref) sq += (x - mean) * (x - mean);
    return sq / double(m);
  }();
  if (var_vref < 1e-12 || var_wref < 1e-12) {
    throw std::runtime_error(
        "identify_params: insufficient excitation (a command channel is constant)");
  }

  for (auto* seq : {&vdot, &wdot, &w2, &v, &vw, &w, &vref, &wref}) {
    *seq = lowpass_sequence(*seq, filter_beta);
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * m, 6);
  Eigen::VectorXd b(2 * m);
  for (size_t k = 0; k < m; ++k) {
    A(2 * k, 0) = vdot[k];
    A(2 * k, 2) = -w2[k];
    A(2 * k, 3) = v[k];
    b(2 * k) = vref[k];
    A(2 * k + 1, 1) = wdot[k];
    A(2 * k + 1, 4) = vw[k];
    A(2 * k + 1, 5) = w[k];
    b(2 * k + 1) = wref[k];
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double cond = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e10)) {
    throw std::runtime_error("identify_params: insufficient excitation (regressor "
                             "condition number " + std::to_string(cond) + ")");
  }

  const Eigen::VectorXd c = svd.solve(b);
  if (c(0) <= 0.0 || c(1) <= 0.0) {
    throw std::runtime_error("identify_params: identified c1/c2 not positive");
  }

  IdentResult out;
  out.params = DynamicParams(c, a);
  out.relative_residual = (A * c - b).norm() / b.norm();
  out.condition_number = cond;
  return out;
}

}  // namespace sswmr
