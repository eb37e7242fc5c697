#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sswmr/dynamics.hpp"
#include "sswmr/lowpass.hpp"
#include "sswmr/synth.hpp"

using namespace sswmr;

TEST_CASE("kinematic_rates matches the pose kinematics") {
  Eigen::Vector3d rates = kinematic_rates({0, 0, 0}, 1.0, 0.0, 0.1);
  CHECK(rates(0) == doctest::Approx(1.0));
  CHECK(rates(1) == doctest::Approx(0.0));
  CHECK(rates(2) == doctest::Approx(0.0));

  rates = kinematic_rates({0, 0, M_PI / 2}, 1.0, 0.0, 0.0);
  CHECK(rates(0) == doctest::Approx(0.0));
  CHECK(rates(1) == doctest::Approx(1.0));

  rates = kinematic_rates({0, 0, 0}, 0.0, 1.0, 0.1);
  CHECK(rates(0) == doctest::Approx(0.0));
  CHECK(rates(1) == doctest::Approx(0.1));
  CHECK(rates(2) == doctest::Approx(1.0));
}

TEST_CASE("dynamic_rates_nominal evaluates the velocity model") {
  const DynamicParams unit(Vector6::Ones(), 0.0);
  Vector2 rates = dynamic_rates_nominal(Vector2::Zero(), Control(0, 0), unit);
  CHECK(rates.norm() == doctest::Approx(0.0));

  Vector6 c = Vector6::Ones();
  c(0) = 2.0;
  rates = dynamic_rates_nominal(Vector2::Zero(), Control(1, 0), DynamicParams(c, 0.0));
  CHECK(rates(0) == doctest::Approx(0.5));
  CHECK(rates(1) == doctest::Approx(0.0));

  rates = dynamic_rates_nominal(Vector2(1, 1), Control(0, 0), unit);
  CHECK(rates(0) == doctest::Approx(0.0));   // omega^2 - v
  CHECK(rates(1) == doctest::Approx(-2.0));  // -v*omega - omega
}

TEST_CASE("dynamic_rates_nominal is linear in the command") {
  const DynamicParams params = test::test_params();
  auto rng = test::seeded_rng(3);
  std::uniform_real_distribution<double> range(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vector2 eta(range(rng), range(rng));
    const Control u1(range(rng), range(rng));
    const Control u2(range(rng), range(rng));
    const Vector2 base = dynamic_rates_nominal(eta, Control(0, 0), params);
    const Vector2 sum = dynamic_rates_nominal(
        eta, Control(u1.v_ref + u2.v_ref, u1.omega_ref + u2.omega_ref), params);
    const Vector2 parts = dynamic_rates_nominal(eta, u1, params) +
                          dynamic_rates_nominal(eta, u2, params) - base;
    CHECK((sum - parts).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("step_nominal keeps rest at rest and wraps the heading") {
  const DynamicParams params = test::test_params();
  const State5 next = step_nominal(State5(), Control(0, 0), params, 0.1);
  CHECK(next.vec().norm() == doctest::Approx(0.0));

  const State5 spun(0, 0, 3.1, 0, 2.0);
  const State5 wrapped = step_nominal(spun, Control(0, 2.0), params, 0.5);
  CHECK(wrapped.theta <= M_PI);
  CHECK(wrapped.theta > -M_PI);
}

TEST_CASE("step_nominal holds a constant-velocity solution") {
  // with a = 0 and v_ref = c4 * v the forward velocity is stationary
  const DynamicParams params = test::fixture_params();
  const double v = 1.0;
  const Control u(params.c(3) * v, 0.0);
  const State5 next = step_nominal(State5(0, 0, 0, v, 0), u, params, 0.1);
  CHECK(next.x == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(next.y == doctest::Approx(0.0));
  CHECK(next.v == doctest::Approx(v).epsilon(1e-10));
  CHECK(next.omega == doctest::Approx(0.0));
}

TEST_CASE("step_nominal matches the fine-step Euler oracle") {
  const DynamicParams params = test::test_params();
  auto rng = test::seeded_rng(9);
  std::uniform_real_distribution<double> range(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const State5 x0(range(rng), range(rng), 2.0 * range(rng), range(rng), range(rng));
    const Control u(range(rng), 2.0 * range(rng));
    const State5 rk4 = step_nominal(x0, u, params, 0.05);
    const State5 oracle = test::euler_fine_oracle(x0, u, params, 0.05, 200000);
    CHECK((rk4.vec() - oracle.vec()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("step_nominal halving the step changes little (order check)") {
  const DynamicParams params = test::test_params();
  auto rng = test::seeded_rng(21);
  std::uniform_real_distribution<double> range(-0.5, 0.5);
  for (int i = 0; i < 10; ++i) {
    const State5 x0(range(rng), range(rng), range(rng), range(rng), range(rng));
    const Control u(range(rng), range(rng));
    const double dt = 0.02;
    const State5 one = step_nominal(x0, u, params, dt);
    const State5 half =
        step_nominal(step_nominal(x0, u, params, dt / 2), u, params, dt / 2);
    CHECK((one.vec() - half.vec()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("step_velocities_nominal matches the full step") {
  const DynamicParams params = test::test_params();
  const State5 x0(0.3, -0.2, 0.7, 0.5, -0.8);
  const Control u(0.9, 1.1);
  const State5 full = step_nominal(x0, u, params, 0.1);
  const Vector2 eta = step_velocities_nominal(x0.eta(), u, params, 0.1);
  CHECK(eta(0) == doctest::Approx(full.v).epsilon(1e-14));
  CHECK(eta(1) == doctest::Approx(full.omega).epsilon(1e-14));
}

TEST_CASE("lowpass filter recursion") {
  LowPassFilter identity(1.0);
  CHECK(identity.step(3.0) == doctest::Approx(3.0));
  CHECK(identity.step(-2.0) == doctest::Approx(-2.0));

  LowPassFilter half(0.5);
  CHECK(half.step(0.0) == doctest::Approx(0.0));
  CHECK(half.step(1.0) == doctest::Approx(0.5));

  // constant input: error halves each step
  LowPassFilter converge(0.5);
  converge.step(0.0);
  double prev_err = 1.0;
  for (int i = 0; i < 20; ++i) {
    const double err = std::abs(converge.step(1.0) - 1.0);
    CHECK(err == doctest::Approx(0.5 * prev_err).epsilon(1e-12));
    prev_err = err;
  }
  CHECK(prev_err < 1e-5);

  CHECK_THROWS_AS(LowPassFilter(0.0), std::invalid_argument);
  CHECK_THROWS_AS(LowPassFilter(1.5), std::invalid_argument);
}

namespace {

// Simulates the nominal model and assembles the identification inputs the
// way a dataset consumer would: velocity samples plus held commands.
struct IdentFixture {
  std::vector<Vector2> eta;
  std::vector<Control> controls;
};

IdentFixture simulate_for_identification(const DynamicParams& params, int n_samples,
                                         double dt, std::uint64_t seed,
                                         double noise_std = 0.0, int hold = 4) {
  IdentFixture fixture;
  const auto script = test::hold_script(n_samples, hold, seed);

  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  State5 x;
  fixture.eta.push_back(x.eta());
  fixture.controls.push_back(script[0]);
  for (int k = 0; k < n_samples; ++k) {
    x = test::midpoint_fine_oracle(x, script[k], params, dt, 100);
    Vector2 eta = x.eta();
    if (noise_std > 0.0) {
      eta(0) += noise_std * gauss(rng);
      eta(1) += noise_std * gauss(rng);
    }
    fixture.eta.push_back(eta);
    fixture.controls.push_back(k + 1 < n_samples ? script[k + 1] : script[k]);
  }
  return fixture;
}

}  // namespace

TEST_CASE("identify_params recovers the generating parameters") {
  const DynamicParams truth = test::fixture_params();
  const auto fixture = simulate_for_identification(truth, 500, 0.1, 77);
  const auto log = make_ident_log(fixture.eta, fixture.controls, 0.1);
  const IdentResult result = identify_params(log, 0.2);
  for (int i = 0; i < 6; ++i) {
    CHECK(result.params.c(i) ==
          doctest::Approx(truth.c(i)).epsilon(0.01));  // 1% relative
  }
}

TEST_CASE("identify_params tolerates velocity noise") {
  const DynamicParams truth = test::fixture_params();
  const auto fixture = simulate_for_identification(truth, 500, 0.1, 78, 0.01, 8);
  const auto log = make_ident_log(fixture.eta, fixture.controls, 0.1);
  const IdentResult result = identify_params(log, 0.2);
  for (int i = 0; i < 6; ++i) {
    CHECK(result.params.c(i) == doctest::Approx(truth.c(i)).epsilon(0.10));
  }
}

TEST_CASE("identify_params achieves tiny residual on an exact-rate log") {
  // with exact continuous rates in the log the filtered relation is exact
  const DynamicParams truth = test::fixture_params();
  const auto fixture = simulate_for_identification(truth, 300, 0.1, 79);
  std::vector<IdentSample> log;
  for (size_t k = 0; k < fixture.eta.size(); ++k) {
    IdentSample s;
    s.eta = fixture.eta[k];
    s.eta_dot = dynamic_rates_nominal(fixture.eta[k], fixture.controls[k], truth);
    s.u = fixture.controls[k];
    log.push_back(s);
  }
  const IdentResult result = identify_params(log, 0.2);
  CHECK(result.relative_residual < 1e-6);
}

TEST_CASE("identify_params rejects unexcited commands") {
  const DynamicParams truth = test::fixture_params();
  auto fixture = simulate_for_identification(truth, 200, 0.1, 80);
  for (auto& u : fixture.controls) u = Control(0.0, u.omega_ref);
  // the simulated velocities no longer match these commands, but the check
  // fires before any solve happens
  const auto log = make_ident_log(fixture.eta, fixture.controls, 0.1);
  bool threw = false;
  try {
    identify_params(log, 0.2);
  } catch (const std::runtime_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("insufficient excitation") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("identify_params requires a minimum log length") {
  std::vector<IdentSample> log(10);
  CHECK_THROWS_AS(identify_params(log, 0.2), std::invalid_argument);
}
