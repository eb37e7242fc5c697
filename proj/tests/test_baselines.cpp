#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sswmr/baselines.hpp"
#include "sswmr/synth.hpp"

using namespace sswmr;

namespace {

RateSamples samples_from_jacobian(const Eigen::Matrix<double, 3, 2>& j, int n,
                                  std::mt19937_64& rng, double noise = 0.0) {
  std::uniform_real_distribution<double> uniform(-8.0, 8.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RateSamples samples;
  for (int i = 0; i < n; ++i) {
    const double wl = uniform(rng);
    const double wr = uniform(rng);
    const Eigen::Vector3d rates = j * Eigen::Vector2d(wl, wr);
    samples.omega_l.push_back(wl);
    samples.omega_r.push_back(wr);
    samples.v_x.push_back(rates(0) + noise * gauss(rng));
    samples.v_y.push_back(rates(1) + noise * gauss(rng));
    samples.omega.push_back(rates(2) + noise * gauss(rng));
  }
  return samples;
}

}  // namespace

TEST_CASE("wheels_from_body inverse map") {
  auto [l0, r0] = wheels_from_body(Control(0, 0), 0.1, 0.4);
  CHECK(l0 == doctest::Approx(0.0));
  CHECK(r0 == doctest::Approx(0.0));

  auto [l1, r1] = wheels_from_body(Control(0.1, 0), 0.1, 0.4);
  CHECK(l1 == doctest::Approx(1.0));
  CHECK(r1 == doctest::Approx(1.0));

  auto [l2, r2] = wheels_from_body(Control(0, 1.5), 0.1, 0.4);
  CHECK(l2 == doctest::Approx(-r2));

  CHECK_THROWS_AS(wheels_from_body(Control(1, 0), 0.0, 0.4), std::invalid_argument);
}

TEST_CASE("predict_rates for the ideal differential drive") {
  JacobianModel idd;
  idd.variant = JacobianVariant::idd;
  idd.wheel_radius = 0.1;
  idd.track_width = 0.4;
  idd.J = idd_jacobian(0.1, 0.4);
  const Eigen::Vector3d rates = predict_rates(idd, 1.0, 1.0);
  CHECK(rates(0) == doctest::Approx(0.1));
  CHECK(rates(1) == doctest::Approx(0.0));
  CHECK(rates(2) == doctest::Approx(0.0));

  JacobianModel zero;
  zero.J.setZero();
  CHECK(predict_rates(zero, 3.0, -2.0).norm() == doctest::Approx(0.0));

  // linearity: doubling wheel speeds doubles rates
  CHECK((predict_rates(idd, 2.0, 3.0) - 2.0 * predict_rates(idd, 1.0, 1.5)).norm() ==
        doctest::Approx(0.0));
}

TEST_CASE("fit_jacobian FL recovers a random generating matrix") {
  auto rng = test::seeded_rng(70);
  const Eigen::Matrix<double, 3, 2> truth =
      test::random_matrix(3, 2, rng, 0.2);
  const RateSamples samples = samples_from_jacobian(truth, 100, rng);
  const JacobianModel fitted = fit_jacobian(JacobianVariant::fl, samples);
  CHECK((fitted.J - truth).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("nested variants degenerate on ideal data") {
  auto rng = test::seeded_rng(71);
  const Eigen::Matrix<double, 3, 2> nominal = idd_jacobian(0.098, 0.37);
  const RateSamples samples = samples_from_jacobian(nominal, 100, rng);

  const JacobianModel fl = fit_jacobian(JacobianVariant::fl, samples);
  CHECK((fl.J - nominal).cwiseAbs().maxCoeff() < 1e-10);

  const JacobianModel edd2 = fit_jacobian(JacobianVariant::edd2, samples);
  CHECK((edd2.J - nominal).cwiseAbs().maxCoeff() < 1e-10);  // slip factors -> 1
}

TEST_CASE("fit residuals respect the model nesting") {
  auto rng = test::seeded_rng(72);
  Eigen::Matrix<double, 3, 2> skewed = idd_jacobian(0.098, 0.37);
  skewed(0, 0) *= 0.85;
  skewed(1, 0) = 0.01;
  skewed(1, 1) = -0.02;
  skewed(2, 1) *= 1.2;
  const RateSamples samples = samples_from_jacobian(skewed, 200, rng, 0.05);

  const double r_idd = fit_residual(fit_jacobian(JacobianVariant::idd, samples), samples);
  const double r_edd2 = fit_residual(fit_jacobian(JacobianVariant::edd2, samples), samples);
  const double r_edd5 = fit_residual(fit_jacobian(JacobianVariant::edd5, samples), samples);
  const double r_fl = fit_residual(fit_jacobian(JacobianVariant::fl, samples), samples);
  CHECK(r_fl <= r_edd5 + 1e-12);
  CHECK(r_edd5 <= r_edd2 + 1e-12);
  CHECK(r_edd2 <= r_idd + 1e-12);
}

TEST_CASE("fit_jacobian input validation") {
  RateSamples empty;
  CHECK_THROWS_AS(fit_jacobian(JacobianVariant::fl, empty), std::invalid_argument);

  auto rng = test::seeded_rng(73);
  const RateSamples tiny =
      samples_from_jacobian(idd_jacobian(0.1, 0.4), 10, rng);
  CHECK_THROWS_AS(fit_jacobian(JacobianVariant::fl, tiny), std::invalid_argument);

  // all-equal wheel speeds leave the turn channel unexcited
  RateSamples degenerate;
  for (int i = 0; i < 60; ++i) {
    degenerate.omega_l.push_back(2.0);
    degenerate.omega_r.push_back(2.0);
    degenerate.v_x.push_back(0.2);
    degenerate.v_y.push_back(0.0);
    degenerate.omega.push_back(0.0);
  }
  CHECK_THROWS_AS(fit_jacobian(JacobianVariant::fl, degenerate), std::runtime_error);
}

TEST_CASE("rollout_kinematic basic trajectories") {
  JacobianModel idd;
  idd.variant = JacobianVariant::idd;
  idd.wheel_radius = 0.098;
  idd.track_width = 0.37;
  idd.J = idd_jacobian(idd.wheel_radius, idd.track_width);

  const std::vector<Control> still(10, Control(0, 0));
  const auto quiet = rollout_kinematic(idd, State5(), still, 0.1);
  REQUIRE(quiet.size() == 11);
  CHECK(quiet.back().x == doctest::Approx(0.0));
  CHECK(quiet.back().y == doctest::Approx(0.0));

  const std::vector<Control> forward(10, Control(0.8, 0));
  const auto line = rollout_kinematic(idd, State5(), forward, 0.1);
  CHECK(line.back().x == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(line.back().y == doctest::Approx(0.0));
  CHECK(line.back().v == doctest::Approx(0.8));
}

TEST_CASE("nesting holds on synthetic terrain data") {
  SyntheticTerrainSpec spec;
  spec.label = "slippy";
  spec.params = test::test_params();
  spec.delta_omega["v*omega"] = -0.5;
  spec.delta_v["v"] = -0.2;
  spec.seed = 3;
  const SynthResult synth =
      synth_generate(spec, test::excitation_script(300, 0.1, 74), 0.1);
  const RateSamples samples = rate_samples_from_dataset(synth.dataset, 0.098, 0.37);

  const double r_idd = fit_residual(fit_jacobian(JacobianVariant::idd, samples), samples);
  const double r_edd2 = fit_residual(fit_jacobian(JacobianVariant::edd2, samples), samples);
  const double r_edd5 = fit_residual(fit_jacobian(JacobianVariant::edd5, samples), samples);
  const double r_fl = fit_residual(fit_jacobian(JacobianVariant::fl, samples), samples);
  CHECK(r_fl <= r_edd5 + 1e-12);
  CHECK(r_edd5 <= r_edd2 + 1e-12);
  CHECK(r_edd2 <= r_idd + 1e-12);
}
