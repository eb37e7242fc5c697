#ifndef SSWMR_DYNAMICS_HPP
#define SSWMR_DYNAMICS_HPP

#include <span>
#include <vector>

#include "sswmr/types.hpp"

namespace sswmr {

/// Lumped physical parameters of the dynamic unicycle model. c1 and c2
/// scale the commanded velocities and must stay positive; `a` is the
/// COM-to-rear-axle offset.
struct DynamicParams {
  Vector6 c = Vector6::Ones();
  double a = 0.0;

  DynamicParams() = default;
  DynamicParams(const Vector6& c_, double a_);
};

enum class Integrator { rk4, euler };

/// Pose rates [Xdot, Ydot, thetadot] for body velocities (v, omega).
Eigen::Vector3d kinematic_rates(const Eigen::Vector3d& q, double v, double omega,
                                double a);

/// Velocity rates [vdot, omegadot] of the nominal (disturbance-free) model:
///   vdot     = (c3*omega^2 - c4*v + v_ref) / c1
///   omegadot = (-c5*v*omega - c6*omega + omega_ref) / c2
Vector2 dynamic_rates_nominal(const Vector2& eta, const Control& u,
                              const DynamicParams& params);

/// One discrete step of the nominal motion model; heading is wrapped.
State5 step_nominal(const State5& x, const Control& u, const DynamicParams& params,
                    double dt, Integrator method = Integrator::rk4);

/// Velocity components of the discrete nominal step. The velocity dynamics
/// do not depend on the pose, so this matches step_nominal exactly.
Vector2 step_velocities_nominal(const Vector2& eta, const Control& u,
                                const DynamicParams& params, double dt,
                                Integrator method = Integrator::rk4);

/// One identification record: body velocities, an acceleration proxy for
/// them, and the command active over the sampling interval.
struct IdentSample {
  Vector2 eta = Vector2::Zero();
  Vector2 eta_dot = Vector2::Zero();
  Control u;
};

struct IdentResult {
  DynamicParams params;
  double relative_residual = 0.0;  // ||A c - b|| / ||b||
  double condition_number = 0.0;
};

/// Builds an identification log from uniformly sampled velocities and
/// zero-order-hold commands. Rows are formed at interval midpoints so the
/// backward-difference acceleration proxy is second-order accurate:
/// eta row k holds the average of samples k-1 and k, eta_dot the finite
/// difference across them, u the command held during the interval.
std::vector<IdentSample> make_ident_log(std::span<const Vector2> eta,
                                        std::span<const Control> u, double dt);

/// Least-squares estimate of c1..c6 from the regressor form of the
/// velocity dynamics. Every regressor column and both right-hand sides
/// pass through the same low-pass filter, so the raw acceleration proxy
/// never enters the normal equations unfiltered.
IdentResult identify_params(std::span<const IdentSample> log, double filter_beta,
                            double a = 0.0);

}  // namespace sswmr

#endif  // SSWMR_DYNAMICS_HPP
