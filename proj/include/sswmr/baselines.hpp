#ifndef SSWMR_BASELINES_HPP
#define SSWMR_BASELINES_HPP

#include <span>
#include <string>
#include <vector>

#include "sswmr/dataset.hpp"
#include "sswmr/types.hpp"

namespace sswmr {

/// Kinematic Jacobian family mapping wheel speeds to body rates.
/// Free parameter counts: IDD 0, EDD2 2, EDD5 5, FL 6.
enum class JacobianVariant { idd, edd2, edd5, fl };

std::string to_string(JacobianVariant variant);
JacobianVariant jacobian_variant_from_string(const std::string& name);

struct JacobianModel {
  JacobianVariant variant = JacobianVariant::idd;
  Eigen::Matrix<double, 3, 2> J = Eigen::Matrix<double, 3, 2>::Zero();
  double wheel_radius = 0.098;
  double track_width = 0.37;
};

/// Nominal differential-drive Jacobian for the given geometry.
Eigen::Matrix<double, 3, 2> idd_jacobian(double wheel_radius, double track_width);

/// Inverse differential-drive map from body commands to wheel speeds.
std::pair<double, double> wheels_from_body(const Control& u, double wheel_radius,
                                           double track_width);

/// Body rates [v_x, v_y, omega] for the given wheel speeds.
Eigen::Vector3d predict_rates(const JacobianModel& model, double omega_l,
                              double omega_r);

/// Fitting data: wheel speeds and measured body rates, row-aligned.
struct RateSamples {
  std::vector<double> omega_l;
  std::vector<double> omega_r;
  std::vector<double> v_x;
  std::vector<double> v_y;
  std::vector<double> omega;

  size_t size() const { return omega_l.size(); }
};

RateSamples rate_samples_from_dataset(const TerrainDataset& dataset,
                                      double wheel_radius, double track_width);

/// Least squares over the variant's free parameters (IDD has none).
JacobianModel fit_jacobian(JacobianVariant variant, const RateSamples& samples,
                           double wheel_radius = 0.098, double track_width = 0.37);
JacobianModel fit_jacobian(JacobianVariant variant, const TerrainDataset& dataset,
                           double wheel_radius = 0.098, double track_width = 0.37);

/// Sum of squared rate-prediction errors over all three output rows.
double fit_residual(const JacobianModel& model, const RateSamples& samples);

/// Integrates the model's predicted body rates through the pose kinematics;
/// each returned state carries the step's predicted (v_x, omega).
std::vector<State5> rollout_kinematic(const JacobianModel& model, const State5& x0,
                                      std::span<const Control> controls, double dt);

}  // namespace sswmr

#endif  // SSWMR_BASELINES_HPP
