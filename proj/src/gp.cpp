#include "sswmr/gp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace sswmr {

GpHyperparams::GpHyperparams(const Eigen::VectorXd& length_scales, double signal_var,
                             double noise_var) {
  if ((length_scales.array() <= 0.0).any() || signal_var <= 0.0 || noise_var <= 0.0) {
    throw std::invalid_argument("GpHyperparams: scales and variances must be positive");
  }
  log_length_scale = length_scales.array().log();
  log_signal_var = std::log(signal_var);
  log_noise_var = std::log(noise_var);
}

GpHyperparams GpHyperparams::defaults(int dim) {
  GpHyperparams h;
  h.log_length_scale = Eigen::VectorXd::Zero(dim);
  h.log_signal_var = 0.0;
  h.log_noise_var = std::log(1e-2);
  return h;
}

Eigen::VectorXd GpHyperparams::pack() const {
  Eigen::VectorXd out(dim() + 2);
  out.head(dim()) = log_length_scale;
  out(dim()) = log_signal_var;
  out(dim() + 1) = log_noise_var;
  return out;
}

GpHyperparams GpHyperparams::unpack(const Eigen::VectorXd& packed) {
  if (packed.size() < 3) {
    throw std::invalid_argument("GpHyperparams::unpack: vector too short");
  }
  GpHyperparams h;
  const int n = int(packed.size()) - 2;
  h.log_length_scale = packed.head(n);
  h.log_signal_var = packed(n);
  h.log_noise_var = packed(n + 1);
  return h;
}

double se_kernel(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2,
                 const GpHyperparams& hyper, bool include_noise) {
  if (z1.size() != z2.size() || z1.size() != hyper.dim()) {
    throw std::invalid_argument("se_kernel: dimension mismatch");
  }
  const Eigen::ArrayXd scaled =
      (z1 - z2).array() / hyper.log_length_scale.array().exp();
  double value = hyper.signal_var() * std::exp(-0.5 * scaled.square().sum());
  if (include_noise) value += hyper.noise_var();
  return value;
}

namespace {

struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

Standardization standardize_stats(const Eigen::MatrixXd& inputs) {
  Standardization s;
  s.mean = inputs.colwise().mean();
  Eigen::MatrixXd centered = inputs.rowwise() - s.mean.transpose();
  s.std = (centered.array().square().colwise().mean()).sqrt();
  for (int j = 0; j < s.std.size(); ++j) {
    if (s.std(j) < 1e-12) s.std(j) = 1.0;  // constant column
  }
  return s;
}

Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& inputs,
                                      const Standardization& s) {
  return (inputs.rowwise() - s.mean.transpose()).array().rowwise() /
         s.std.transpose().array();
}

// Noise-free gram matrix; upper triangle computed and mirrored so
// K == K^T holds exactly.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& z, const GpHyperparams& hyper) {
  const int p = int(z.rows());
  const Eigen::VectorXd ell = hyper.length_scales();
  const double sf2 = hyper.signal_var();
  Eigen::MatrixXd scaled = z.array().rowwise() / ell.transpose().array();
  Eigen::MatrixXd k(p, p);
  for (int i = 0; i < p; ++i) {
    k(i, i) = sf2;
    for (int j = i + 1; j < p; ++j) {
      const double d2 = (scaled.row(i) - scaled.row(j)).squaredNorm();
      const double value = sf2 * std::exp(-0.5 * d2);
      k(i, j) = value;
      k(j, i) = value;
    }
  }
  return k;
}

struct Factorization {
  Eigen::MatrixXd chol;  // lower
  double jitter = 0.0;
};

// Jitter escalation before giving up on the factorization.
Factorization factor_with_jitter(const Eigen::MatrixXd& ky) {
  for (double jitter : {0.0, 1e-10, 1e-8, 1e-6}) {
    Eigen::MatrixXd shifted = ky;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      return {Eigen::MatrixXd(llt.matrixL()), jitter};
    }
  }
  throw std::runtime_error("gp: kernel matrix not PSD after jitter escalation");
}

}  // namespace

GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
            const GpHyperparams& hyper) {
  if (inputs.rows() < 1) {
    throw std::invalid_argument("gp fit: need at least one training point");
  }
  if (inputs.rows() != targets.size()) {
    throw std::invalid_argument("gp fit: inputs/targets size mismatch");
  }
  if (inputs.cols() != hyper.dim()) {
    throw std::invalid_argument("gp fit: hyperparameter dimension mismatch");
  }
  if (!inputs.allFinite() || !targets.allFinite()) {
    throw std::invalid_argument("gp fit: non-finite training data");
  }

  GpModel model;
  model.hyper = hyper;
  const Standardization stats = standardize_stats(inputs);
  model.input_mean = stats.mean;
  model.input_std = stats.std;
  model.train_inputs = apply_standardization(inputs, stats);
  model.train_targets = targets;

  Eigen::MatrixXd ky = gram_matrix(model.train_inputs, hyper);
  ky.diagonal().array() += hyper.noise_var();
  Factorization fact = factor_with_jitter(ky);
  model.chol = std::move(fact.chol);
  model.jitter = fact.jitter;
  model.alpha = model.chol.transpose().triangularView<Eigen::Upper>().solve(
      model.chol.triangularView<Eigen::Lower>().solve(targets));
  return model;
}

GpPrediction predict(const GpModel& model, const Eigen::VectorXd& z) {
  if (z.size() != model.dim()) {
    throw std::invalid_argument("gp predict: dimension mismatch");
  }
  const Eigen::VectorXd zs =
      (z - model.input_mean).array() / model.input_std.array();
  const Eigen::VectorXd ell = model.hyper.length_scales();
  const double sf2 = model.hyper.signal_var();

  const int p = model.count();
  Eigen::VectorXd k(p);
  for (int i = 0; i < p; ++i) {
    const double d2 =
        ((model.train_inputs.row(i).transpose() - zs).array() / ell.array())
            .square()
            .sum();
    k(i) = sf2 * std::exp(-0.5 * d2);
  }

  GpPrediction out;
  out.mean = k.dot(model.alpha);
  const Eigen::VectorXd w = model.chol.triangularView<Eigen::Lower>().solve(k);
  const double k_tt = sf2 + model.hyper.noise_var();
  out.variance = std::max(0.0, k_tt - w.squaredNorm());
  return out;
}

NlmlResult negative_log_marginal_likelihood(const Eigen::MatrixXd& inputs,
                                            const Eigen::VectorXd& targets,
                                            const GpHyperparams& hyper) {
  if (inputs.rows() != targets.size() || inputs.rows() < 1) {
    throw std::invalid_argument("gp nlml: bad training set");
  }
  const int p = int(inputs.rows());
  const int n = int(inputs.cols());
  const Standardization stats = standardize_stats(inputs);
  const Eigen::MatrixXd z = apply_standardization(inputs, stats);

  const Eigen::MatrixXd kf = gram_matrix(z, hyper);
  Eigen::MatrixXd ky = kf;
  ky.diagonal().array() += hyper.noise_var();
  const Factorization fact = factor_with_jitter(ky);
  const auto lower = fact.chol.triangularView<Eigen::Lower>();
  const auto upper = fact.chol.transpose().triangularView<Eigen::Upper>();
  const Eigen::VectorXd alpha = upper.solve(lower.solve(targets));

  NlmlResult out;
  out.value = 0.5 * targets.dot(alpha) +
              fact.chol.diagonal().array().log().sum() +
              0.5 * double(p) * std::log(2.0 * M_PI);

  // W = Ky^-1 - alpha alpha^T;  dNLML/dtheta = 0.5 * sum_ij W_ij dK_ij/dtheta
  const Eigen::MatrixXd kinv =
      upper.solve(lower.solve(Eigen::MatrixXd::Identity(p, p)));
  const Eigen::MatrixXd w = kinv - alpha * alpha.transpose();

  const Eigen::VectorXd ell = hyper.length_scales();
  out.gradient.resize(n + 2);
  const Eigen::MatrixXd wk = w.cwiseProduct(kf);
  for (int d = 0; d < n; ++d) {
    double acc = 0.0;
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        const double diff = (z(i, d) - z(j, d)) / ell(d);
        acc += wk(i, j) * diff * diff;
      }
    }
    out.gradient(d) = 0.5 * acc;
  }
  out.gradient(n) = 0.5 * wk.sum();
  out.gradient(n + 1) = 0.5 * hyper.noise_var() * w.trace();
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// NLML as a function of the packed log-hyperparameters; PSD failures and
// runaway parameters evaluate to +inf so the line search backs off.
struct Objective {
  const Eigen::MatrixXd& inputs;
  const Eigen::VectorXd& targets;

  double eval(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
    if (theta.cwiseAbs().maxCoeff() > 23.0) return kInf;
    try {
      NlmlResult r = negative_log_marginal_likelihood(inputs, targets,
                                                      GpHyperparams::unpack(theta));
      if (!std::isfinite(r.value)) return kInf;
      if (grad) *grad = r.gradient;
      return r.value;
    } catch (const std::runtime_error&) {
      return kInf;
    }
  }
};

struct LbfgsOutcome {
  Eigen::VectorXd theta;
  double value = kInf;
};

LbfgsOutcome lbfgs_minimize(const Objective& objective, const Eigen::VectorXd& theta0,
                            int max_iters, double grad_tol) {
  const int dim = int(theta0.size());
  const int memory = 10;
  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho_hist;

  Eigen::VectorXd theta = theta0;
  Eigen::VectorXd grad(dim);
  double value = objective.eval(theta, &grad);
  if (!std::isfinite(value)) return {theta0, kInf};

  LbfgsOutcome best{theta, value};
  for (int iter = 0; iter < max_iters; ++iter) {
    if (grad.cwiseAbs().maxCoeff() < grad_tol) break;

    // two-loop recursion
    Eigen::VectorXd q = grad;
    const int m = int(s_hist.size());
    std::vector<double> a(m);
    for (int i = m - 1; i >= 0; --i) {
      a[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= a[i] * y_hist[i];
    }
    if (m > 0) {
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      const double b = rho_hist[i] * y_hist[i].dot(q);
      q += (a[i] - b) * s_hist[i];
    }
    Eigen::VectorXd direction = -q;
    if (direction.dot(grad) >= 0.0) {
      direction = -grad;  // memory unusable, fall back to steepest descent
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    // backtracking Armijo line search
    const double slope = direction.dot(grad);
    double step = 1.0;
    Eigen::VectorXd theta_new, grad_new(dim);
    double value_new = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      theta_new = theta + step * direction;
      value_new = objective.eval(theta_new, &grad_new);
      if (value_new <= value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = theta_new - theta;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (int(s_hist.size()) > memory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }
    theta = theta_new;
    grad = grad_new;
    value = value_new;
    if (value < best.value) best = {theta, value};
  }
  if (value < best.value) best = {theta, value};
  return best;
}

}  // namespace

GpHyperparams optimize_hyperparams(const Eigen::MatrixXd& inputs,
                                   const Eigen::VectorXd& targets,
                                   const GpHyperparams& init,
                                   const OptimizeOptions& options) {
  if (options.max_iters == 0) return init;

  const Objective objective{inputs, targets};
  const int dim = init.dim() + 2;

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(init.pack());
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> log_range(std::log(1e-2), std::log(1e2));
  for (int r = 0; r < options.restarts; ++r) {
    Eigen::VectorXd theta(dim);
    for (int i = 0; i < dim; ++i) theta(i) = log_range(rng);
    starts.push_back(theta);
  }

  LbfgsOutcome best;
  for (const Eigen::VectorXd& start : starts) {
    LbfgsOutcome outcome = lbfgs_minimize(objective, start, options.max_iters,
                                          options.grad_tol);
    if (outcome.value < best.value) best = outcome;
  }
  if (!std::isfinite(best.value)) {
    throw std::runtime_error("optimize_hyperparams: every start failed (kernel not PSD)");
  }
  return GpHyperparams::unpack(best.theta);
}

}  // namespace sswmr
