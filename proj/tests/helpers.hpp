#ifndef SSWMR_TESTS_HELPERS_HPP
#define SSWMR_TESTS_HELPERS_HPP

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "sswmr/dynamics.hpp"
#include "sswmr/ensemble.hpp"
#include "sswmr/synth.hpp"
#include "sswmr/types.hpp"

namespace sswmr::test {

inline std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng,
                                     double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  }
  return m;
}

inline Eigen::MatrixXd random_psd(int n, std::mt19937_64& rng, double scale = 1.0) {
  const Eigen::MatrixXd a = random_matrix(n, n, rng, scale);
  return a * a.transpose() / double(n);
}

/// Fine-step Euler integration of the nominal model, used as an
/// independent oracle for the RK4 step.
inline State5 euler_fine_oracle(const State5& x0, const Control& u,
                                const DynamicParams& params, double dt, int substeps) {
  const double h = dt / substeps;
  State5 x = x0;
  for (int s = 0; s < substeps; ++s) {
    const Eigen::Vector3d q(x.x, x.y, x.theta);
    const Eigen::Vector3d q_dot = kinematic_rates(q, x.v, x.omega, params.a);
    const Vector2 eta_dot = dynamic_rates_nominal(x.eta(), u, params);
    x = State5(x.x + h * q_dot(0), x.y + h * q_dot(1), x.theta + h * q_dot(2),
               x.v + h * eta_dot(0), x.omega + h * eta_dot(1));
  }
  return State5(x.x, x.y, wrap_angle(x.theta), x.v, x.omega);
}

/// Second-order midpoint integration, accurate enough for generating
/// identification fixtures at moderate substep counts.
inline State5 midpoint_fine_oracle(const State5& x0, const Control& u,
                                   const DynamicParams& params, double dt,
                                   int substeps) {
  const double h = dt / substeps;
  Vector5 x = x0.vec();
  auto rates = [&](const Vector5& s) {
    Vector5 r;
    r.head<3>() = kinematic_rates(s.head<3>(), s(3), s(4), params.a);
    r.tail<2>() = dynamic_rates_nominal(s.tail<2>(), Control(u.v_ref, u.omega_ref), params);
    return r;
  };
  for (int s = 0; s < substeps; ++s) {
    const Vector5 k1 = rates(x);
    const Vector5 k2 = rates(x + 0.5 * h * k1);
    x += h * k2;
  }
  x(2) = wrap_angle(x(2));
  return State5(x);
}

/// Piecewise-constant random commands over the full envelope; holds make
/// the acceleration content identifiable.
inline std::vector<Control> hold_script(int n, int hold, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Control> script;
  script.reserve(n);
  double v = 0.0, w = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k % hold == 0) {
      v = 2.0 * unit(rng);
      w = 4.0 * unit(rng);
    }
    script.emplace_back(v, w);
  }
  return script;
}

/// Exhaustive search over the simplex at the given resolution (M <= 3).
inline Eigen::VectorXd brute_force_simplex(const WeightProblem& problem,
                                           const Eigen::VectorXd& w_prev, double alpha,
                                           double resolution) {
  const int m = int(w_prev.size());
  const int steps = int(std::llround(1.0 / resolution));
  Eigen::VectorXd best;
  double best_value = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::VectorXd& w) {
    const double value = weight_objective(problem, w, w_prev, alpha);
    if (value < best_value) {
      best_value = value;
      best = w;
    }
  };
  if (m == 1) {
    consider(Eigen::VectorXd::Ones(1));
  } else if (m == 2) {
    for (int i = 0; i <= steps; ++i) {
      Eigen::VectorXd w(2);
      w << double(i) / steps, 1.0 - double(i) / steps;
      consider(w);
    }
  } else if (m == 3) {
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j <= steps - i; ++j) {
        Eigen::VectorXd w(3);
        w << double(i) / steps, double(j) / steps, double(steps - i - j) / steps;
        consider(w);
      }
    }
  } else {
    throw std::invalid_argument("brute_force_simplex: only M <= 3 supported");
  }
  return best;
}

/// Test parameters with unity DC gain on both channels.
inline DynamicParams test_params() {
  Vector6 c;
  c << 1.2, 0.5, 0.1, 1.0, 0.3, 1.0;
  return DynamicParams(c, 0.0);
}

/// The identification fixture parameters.
inline DynamicParams fixture_params() {
  Vector6 c;
  c << 5.0, 1.0, 0.2, 4.0, 0.5, 3.0;
  return DynamicParams(c, 0.0);
}

inline std::vector<Control> excitation_script(int n, double dt, std::uint64_t seed) {
  return command_script_library("pseudo_random", n * dt, dt, seed);
}

}  // namespace sswmr::test

#endif  // SSWMR_TESTS_HELPERS_HPP
