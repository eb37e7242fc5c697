#include <doctest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "sswmr/gmm.hpp"
#include "sswmr/gp.hpp"

using namespace sswmr;

namespace {

GpHyperparams make_hyper(double ell, double sf2, double sn2) {
  return GpHyperparams(Eigen::VectorXd::Constant(4, ell), sf2, sn2);
}

Eigen::MatrixXd spread_inputs(int p, std::mt19937_64& rng, double range = 2.0) {
  std::uniform_real_distribution<double> uniform(-range, range);
  Eigen::MatrixXd z(p, 4);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < 4; ++j) z(i, j) = uniform(rng);
  }
  return z;
}

// standardization identical to the library's (guarded population std)
Eigen::MatrixXd standardize_like_fit(const Eigen::MatrixXd& z) {
  const Eigen::RowVectorXd mean = z.colwise().mean();
  Eigen::MatrixXd centered = z.rowwise() - mean;
  Eigen::RowVectorXd std = centered.array().square().colwise().mean().sqrt();
  for (int j = 0; j < std.size(); ++j) {
    if (std(j) < 1e-12) std(j) = 1.0;
  }
  return centered.array().rowwise() / std.array();
}

}  // namespace

TEST_CASE("se_kernel at zero distance and in the far limit") {
  const GpHyperparams hyper = make_hyper(1.0, 1.0, 0.01);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
  CHECK(se_kernel(z, z, hyper, false) == doctest::Approx(1.0));
  CHECK(se_kernel(z, z, hyper, true) == doctest::Approx(1.01));

  Eigen::VectorXd far = Eigen::VectorXd::Constant(4, 50.0);
  CHECK(se_kernel(z, far, hyper, false) == doctest::Approx(0.0));
  CHECK(se_kernel(z, far, hyper, true) == doctest::Approx(0.01));

  CHECK_THROWS_AS(se_kernel(z, Eigen::VectorXd::Zero(3), hyper, false),
                  std::invalid_argument);
}

TEST_CASE("hyperparameters must be strictly positive") {
  CHECK_THROWS_AS(make_hyper(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_hyper(0.0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_hyper(1.0, -1.0, 0.1), std::invalid_argument);
}

TEST_CASE("fit on a single point reduces to scalar algebra") {
  Eigen::MatrixXd z(1, 4);
  z.setZero();
  Eigen::VectorXd y(1);
  y << 2.0;
  const GpModel model = fit(z, y, make_hyper(1.0, 1.0, 1.0));
  CHECK(model.alpha(0) == doctest::Approx(1.0));  // (K + sn2)^-1 y = 2/2
}

TEST_CASE("fit factorization reconstructs the shifted gram matrix") {
  auto rng = test::seeded_rng(31);
  const Eigen::MatrixXd z = spread_inputs(50, rng);
  Eigen::VectorXd y = test::random_matrix(50, 1, rng).col(0);
  const GpHyperparams hyper = make_hyper(0.8, 1.3, 0.05);
  const GpModel model = fit(z, y, hyper);

  Eigen::MatrixXd expected(50, 50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      expected(i, j) = se_kernel(model.train_inputs.row(i), model.train_inputs.row(j),
                                 hyper, false);
    }
  }
  expected.diagonal().array() += hyper.noise_var() + model.jitter;
  const Eigen::MatrixXd reconstructed = model.chol * model.chol.transpose();
  CHECK((reconstructed - expected).norm() / expected.norm() < 1e-8);
}

TEST_CASE("predict interpolates training targets as noise vanishes") {
  auto rng = test::seeded_rng(32);
  const Eigen::MatrixXd z = spread_inputs(20, rng);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) y(i) = std::sin(z(i, 0)) + 0.5 * z(i, 1);
  const GpModel model = fit(z, y, make_hyper(1.0, 1.0, 1e-8));
  for (int i = 0; i < 20; ++i) {
    const GpPrediction p = predict(model, z.row(i).transpose());
    CHECK(std::abs(p.mean - y(i)) < 1e-4);
    CHECK(p.variance < 1e-6);
  }
}

TEST_CASE("predict recovers the prior far from data") {
  auto rng = test::seeded_rng(33);
  const Eigen::MatrixXd z = spread_inputs(15, rng);
  Eigen::VectorXd y = test::random_matrix(15, 1, rng).col(0);
  const GpHyperparams hyper = make_hyper(1.0, 1.7, 0.02);
  const GpModel model = fit(z, y, hyper);
  const GpPrediction p = predict(model, Eigen::Vector4d::Constant(1e3));
  CHECK(p.mean == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(p.variance == doctest::Approx(hyper.signal_var() + hyper.noise_var()));
}

TEST_CASE("predict matches the explicit 2x2 inversion oracle") {
  Eigen::MatrixXd z(2, 4);
  z << 0.0, 0.2, -0.5, 1.0,
       1.0, -0.3, 0.4, 0.2;
  Eigen::VectorXd y(2);
  y << 0.7, -1.1;
  const GpHyperparams hyper = make_hyper(1.2, 0.9, 0.05);
  const GpModel model = fit(z, y, hyper);

  const Eigen::Vector4d query(0.3, 0.0, 0.1, 0.5);
  const GpPrediction p = predict(model, query);

  // oracle in the standardized space the model works in
  const Eigen::MatrixXd zs = standardize_like_fit(z);
  Eigen::Vector4d qs;
  for (int j = 0; j < 4; ++j) {
    qs(j) = (query(j) - model.input_mean(j)) / model.input_std(j);
  }
  Eigen::Matrix2d gram;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      gram(i, j) = se_kernel(zs.row(i), zs.row(j), hyper, false);
    }
  }
  gram.diagonal().array() += hyper.noise_var();
  Eigen::Vector2d k;
  for (int i = 0; i < 2; ++i) k(i) = se_kernel(zs.row(i), qs, hyper, false);
  const double det = gram(0, 0) * gram(1, 1) - gram(0, 1) * gram(1, 0);
  Eigen::Matrix2d inv;
  inv << gram(1, 1), -gram(0, 1), -gram(1, 0), gram(0, 0);
  inv /= det;
  const double mean_oracle = k.dot(inv * y);
  const double var_oracle =
      se_kernel(qs, qs, hyper, true) - k.dot(inv * k);
  CHECK(p.mean == doctest::Approx(mean_oracle).epsilon(1e-10));
  CHECK(p.variance == doctest::Approx(var_oracle).epsilon(1e-10));
}

TEST_CASE("predict mean is linear in the targets") {
  auto rng = test::seeded_rng(34);
  const Eigen::MatrixXd z = spread_inputs(12, rng);
  const Eigen::VectorXd y1 = test::random_matrix(12, 1, rng).col(0);
  const Eigen::VectorXd y2 = test::random_matrix(12, 1, rng).col(0);
  const GpHyperparams hyper = make_hyper(1.0, 1.0, 0.1);
  const Eigen::Vector4d query(0.2, -0.4, 0.9, 0.0);

  const double m1 = predict(fit(z, y1, hyper), query).mean;
  const double m2 = predict(fit(z, y2, hyper), query).mean;
  const double m12 = predict(fit(z, y1 + 2.0 * y2, hyper), query).mean;
  CHECK(m12 == doctest::Approx(m1 + 2.0 * m2).epsilon(1e-10));
}

TEST_CASE("posterior variance is bounded by the prior") {
  auto rng = test::seeded_rng(35);
  const Eigen::MatrixXd z = spread_inputs(30, rng);
  Eigen::VectorXd y = test::random_matrix(30, 1, rng).col(0);
  const GpHyperparams hyper = make_hyper(0.7, 1.4, 0.03);
  const GpModel model = fit(z, y, hyper);
  const double prior = hyper.signal_var() + hyper.noise_var();
  std::uniform_real_distribution<double> uniform(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    Eigen::Vector4d q;
    for (int j = 0; j < 4; ++j) q(j) = uniform(rng);
    const GpPrediction p = predict(model, q);
    CHECK(p.variance >= 0.0);
    CHECK(p.variance <= prior * (1.0 + 1e-12));
  }
}

TEST_CASE("nlml gradient matches central finite differences") {
  auto rng = test::seeded_rng(36);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd z = spread_inputs(20, rng);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) {
      y(i) = std::sin(z(i, 0)) - 0.3 * z(i, 2) + 0.05 * z(i, 3) * z(i, 3);
    }
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    GpHyperparams hyper = make_hyper(1.0, 1.0, 0.05);
    for (int j = 0; j < 4; ++j) hyper.log_length_scale(j) += jitter(rng);
    hyper.log_signal_var += jitter(rng);
    hyper.log_noise_var += jitter(rng);

    const NlmlResult result = negative_log_marginal_likelihood(z, y, hyper);
    const Eigen::VectorXd theta = hyper.pack();
    const double h = 1e-5;
    for (int j = 0; j < theta.size(); ++j) {
      Eigen::VectorXd plus = theta, minus = theta;
      plus(j) += h;
      minus(j) -= h;
      const double fp =
          negative_log_marginal_likelihood(z, y, GpHyperparams::unpack(plus)).value;
      const double fm =
          negative_log_marginal_likelihood(z, y, GpHyperparams::unpack(minus)).value;
      const double fd = (fp - fm) / (2.0 * h);
      const double rel = std::abs(result.gradient(j) - fd) /
                         std::max(1.0, std::abs(fd));
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("nlml with zero targets reduces to the complexity term") {
  auto rng = test::seeded_rng(37);
  const Eigen::MatrixXd z = spread_inputs(15, rng);
  const GpHyperparams hyper = make_hyper(1.0, 1.2, 0.06);
  const GpModel model = fit(z, Eigen::VectorXd::Zero(15), hyper);
  const double complexity = model.chol.diagonal().array().log().sum() +
                            0.5 * 15.0 * std::log(2.0 * M_PI);
  const NlmlResult result =
      negative_log_marginal_likelihood(z, Eigen::VectorXd::Zero(15), hyper);
  CHECK(result.value == doctest::Approx(complexity).epsilon(1e-12));
}

TEST_CASE("nlml data-fit term is invariant under matched rescaling") {
  auto rng = test::seeded_rng(38);
  const Eigen::MatrixXd z = spread_inputs(18, rng);
  Eigen::VectorXd y = test::random_matrix(18, 1, rng).col(0);
  const GpHyperparams hyper = make_hyper(0.9, 1.1, 0.04);
  const GpModel a = fit(z, y, hyper);
  const GpModel b = fit(z, (2.0 * y).eval(),
                        make_hyper(0.9, 4.0 * 1.1, 4.0 * 0.04));
  CHECK(0.5 * y.dot(a.alpha) ==
        doctest::Approx(0.5 * (2.0 * y).dot(b.alpha)).epsilon(1e-10));
}

TEST_CASE("optimize_hyperparams improves on the initial point") {
  auto rng = test::seeded_rng(39);
  const int p = 120;
  const Eigen::MatrixXd z = spread_inputs(p, rng);

  // sample targets from a GP prior over the standardized inputs
  const GpHyperparams truth = make_hyper(1.0, 1.0, 0.01);
  const Eigen::MatrixXd zs = standardize_like_fit(z);
  Eigen::MatrixXd gram(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      gram(i, j) = se_kernel(zs.row(i), zs.row(j), truth, i == j);
    }
  }
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(gram).matrixL();
  const Eigen::VectorXd y = chol * test::random_matrix(p, 1, rng).col(0);

  OptimizeOptions options;
  options.max_iters = 120;
  options.restarts = 2;
  options.seed = 5;
  const GpHyperparams init = make_hyper(0.3, 0.5, 0.1);
  const GpHyperparams found = optimize_hyperparams(z, y, init, options);

  const double nlml_true = negative_log_marginal_likelihood(z, y, truth).value;
  const double nlml_found = negative_log_marginal_likelihood(z, y, found).value;
  CHECK(nlml_found <= nlml_true + 1e-3);
}

TEST_CASE("optimize_hyperparams at a stationary point stays put") {
  auto rng = test::seeded_rng(40);
  const Eigen::MatrixXd z = spread_inputs(40, rng);
  std::normal_distribution<double> gauss(0.0, 0.1);
  Eigen::VectorXd y(40);
  // noisy targets keep the noise-variance optimum in the interior
  for (int i = 0; i < 40; ++i) y(i) = std::sin(z(i, 0)) + 0.2 * z(i, 1) + gauss(rng);

  OptimizeOptions once;
  once.max_iters = 500;
  once.restarts = 0;
  once.grad_tol = 1e-6;
  const GpHyperparams stationary =
      optimize_hyperparams(z, y, make_hyper(1.0, 1.0, 0.05), once);
  const NlmlResult at_opt = negative_log_marginal_likelihood(z, y, stationary);
  CHECK(at_opt.gradient.cwiseAbs().maxCoeff() < 1e-5);

  OptimizeOptions zero;
  zero.max_iters = 0;
  const GpHyperparams unchanged = optimize_hyperparams(z, y, stationary, zero);
  CHECK((unchanged.pack() - stationary.pack()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("select_training_subset edge cases") {
  auto rng = test::seeded_rng(41);
  const Eigen::MatrixXd z = spread_inputs(25, rng);

  // k = 1: the single representative is nearest the global mixture mean
  const SubsetResult one = select_training_subset(z, 1, 3);
  REQUIRE(one.indices.size() == 1);
  const Eigen::RowVectorXd mean = z.colwise().mean();
  double best = std::numeric_limits<double>::infinity();
  int best_index = -1;
  for (int i = 0; i < 25; ++i) {
    const double d = (z.row(i) - mean).squaredNorm();
    if (d < best) {
      best = d;
      best_index = i;
    }
  }
  CHECK(one.indices[0] == best_index);

  // k = p: every distinct sample comes back
  const SubsetResult all = select_training_subset(z, 25, 3);
  CHECK(all.indices.size() == 25);
  CHECK(all.warning.empty());

  // k > p: all samples plus a warning
  const SubsetResult over = select_training_subset(z, 40, 3);
  CHECK(over.indices.size() == 25);
  CHECK_FALSE(over.warning.empty());
}

TEST_CASE("select_training_subset finds well-separated blobs") {
  auto rng = test::seeded_rng(42);
  std::normal_distribution<double> gauss(0.0, 0.05);
  const std::vector<Eigen::Vector4d> centers = {
      Eigen::Vector4d(0, 0, 0, 0), Eigen::Vector4d(10, 10, 0, 0),
      Eigen::Vector4d(-10, 5, 8, 0)};
  Eigen::MatrixXd z(60, 4);
  for (int i = 0; i < 60; ++i) {
    const Eigen::Vector4d& c = centers[i % 3];
    for (int j = 0; j < 4; ++j) z(i, j) = c(j) + gauss(rng);
  }
  const SubsetResult subset = select_training_subset(z, 3, 7);
  REQUIRE(subset.indices.size() == 3);
  std::set<int> blobs;
  for (int index : subset.indices) blobs.insert(index % 3);
  CHECK(blobs.size() == 3);  // one representative per blob
}
