#include "sswmr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace sswmr {

double eval_monomial(const std::string& name, const Vector2& eta, const Control& u) {
  const double v = eta(0);
  const double w = eta(1);
  if (name == "1") return 1.0;
  if (name == "v") return v;
  if (name == "omega") return w;
  if (name == "v^2") return v * v;
  if (name == "omega^2") return w * w;
  if (name == "v*omega") return v * w;
  if (name == "v*omega^2") return v * w * w;
  if (name == "v^2*omega") return v * v * w;
  if (name == "v_ref") return u.v_ref;
  if (name == "omega_ref") return u.omega_ref;
  throw std::invalid_argument("eval_monomial: unknown monomial '" + name + "'");
}

Vector2 eval_disturbance(const SyntheticTerrainSpec& spec, const Vector2& eta,
                         const Control& u) {
  Vector2 delta = Vector2::Zero();
  for (const auto& [name, coeff] : spec.delta_v) {
    delta(0) += coeff * eval_monomial(name, eta, u);
  }
  for (const auto& [name, coeff] : spec.delta_omega) {
    delta(1) += coeff * eval_monomial(name, eta, u);
  }
  return delta;
}

namespace {

constexpr int kSubsteps = 100;

Vector5 disturbed_rates(const Vector5& x, const Control& u,
                        const SyntheticTerrainSpec& spec) {
  const Eigen::Vector3d q = x.head<3>();
  const Vector2 eta = x.tail<2>();
  Vector5 out;
  out.head<3>() = kinematic_rates(q, eta(0), eta(1), spec.params.a);
  out.tail<2>() =
      dynamic_rates_nominal(eta, u, spec.params) + eval_disturbance(spec, eta, u);
  return out;
}

Vector5 rk4_substep(const Vector5& x, const Control& u,
                    const SyntheticTerrainSpec& spec, double h) {
  const Vector5 k1 = disturbed_rates(x, u, spec);
  const Vector5 k2 = disturbed_rates(x + 0.5 * h * k1, u, spec);
  const Vector5 k3 = disturbed_rates(x + 0.5 * h * k2, u, spec);
  const Vector5 k4 = disturbed_rates(x + h * k3, u, spec);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector2 nominal_rates_only(const Vector2& eta, const Control& u,
                           const DynamicParams& params) {
  return dynamic_rates_nominal(eta, u, params);
}

// Fine-substep nominal velocity integration, used for the ground-truth
// residual log. Independent of step_velocities_nominal's coarse RK4.
Vector2 nominal_velocities_fine(const Vector2& eta0, const Control& u,
                                const DynamicParams& params, double dt) {
  const double h = dt / kSubsteps;
  Vector2 eta = eta0;
  for (int s = 0; s < kSubsteps; ++s) {
    const Vector2 k1 = nominal_rates_only(eta, u, params);
    const Vector2 k2 = nominal_rates_only(eta + 0.5 * h * k1, u, params);
    const Vector2 k3 = nominal_rates_only(eta + 0.5 * h * k2, u, params);
    const Vector2 k4 = nominal_rates_only(eta + h * k3, u, params);
    eta += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return eta;
}

}  // namespace

SynthResult synth_generate(const SyntheticTerrainSpec& spec,
                           std::span<const Control> script, double dt,
                           const State5& x0) {
  if (script.empty()) {
    throw std::invalid_argument("synth_generate: empty command script");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("synth_generate: dt must be positive");
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SynthResult out;
  out.dataset.terrain_label = spec.label;
  out.dataset.dt = dt;
  out.dataset.has_velocities = true;
  out.dataset.records.reserve(script.size() + 1);
  out.residuals.reserve(script.size());

  auto record_state = [&](double t, const Vector5& x, const Control& u) {
    TerrainDataset::Record r;
    r.t = t;
    r.x = x(0);
    r.y = x(1);
    r.theta = wrap_angle(x(2));
    r.v_ref = u.v_ref;
    r.omega_ref = u.omega_ref;
    r.v = x(3);
    r.omega = x(4);
    out.dataset.records.push_back(r);
  };

  Vector5 x = x0.vec();
  record_state(0.0, x, script[0]);
  const double h = dt / kSubsteps;
  for (size_t k = 0; k < script.size(); ++k) {
    const Control& u = script[k];
    const Vector2 eta_start = x.tail<2>();

    for (int s = 0; s < kSubsteps; ++s) {
      x = rk4_substep(x, u, spec, h);
    }
    if (spec.process_noise_v > 0.0) x(3) += spec.process_noise_v * gauss(rng);
    if (spec.process_noise_omega > 0.0) x(4) += spec.process_noise_omega * gauss(rng);

    const Vector2 eta_nominal = nominal_velocities_fine(eta_start, u, spec.params, dt);
    out.residuals.push_back(x.tail<2>() - eta_nominal);

    const Control next_u = (k + 1 < script.size()) ? script[k + 1] : u;
    record_state(double(k + 1) * dt, x, next_u);
  }
  return out;
}

std::vector<Control> command_script_library(const std::string& name, double duration,
                                            double dt, std::uint64_t seed) {
  if (!(duration > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("command_script_library: duration and dt must be positive");
  }
  const int n = std::max(1, int(std::llround(duration / dt)));
  const double v_max = 1.0;
  const double w_max = 2.0;
  std::vector<Control> script;
  script.reserve(n);

  if (name == "pseudo_random") {
    // random target levels held ~1 s, smoothed into realizable ramps
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int hold = std::max(1, int(std::llround(1.0 / dt)));
    const double beta = 0.35;
    double v = 0.0, w = 0.0;
    double v_target = 0.0, w_target = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k % hold == 0) {
        v_target = v_max * unit(rng);
        w_target = w_max * unit(rng);
      }
      v = beta * v_target + (1.0 - beta) * v;
      w = beta * w_target + (1.0 - beta) * w;
      script.emplace_back(v, w);
    }
  } else if (name == "lawnmower") {
    const int straight = std::max(1, int(std::llround(2.0 / dt)));
    const int turning = std::max(1, int(std::llround(1.5 / dt)));
    int k = 0;
    double turn_sign = 1.0;
    while (k < n) {
      for (int i = 0; i < straight && k < n; ++i, ++k) script.emplace_back(0.9, 0.0);
      for (int i = 0; i < turning && k < n; ++i, ++k) {
        script.emplace_back(0.3, turn_sign * 1.8);
      }
      turn_sign = -turn_sign;
    }
  } else if (name == "figure_eight") {
    const int quarter = std::max(1, n / 4);
    for (int k = 0; k < n; ++k) {
      const double sign = ((k / quarter) % 2 == 0) ? 1.0 : -1.0;
      script.emplace_back(0.8, sign * 1.6);
    }
  } else if (name == "speed_sweep") {
    const int block = std::max(2, int(std::llround(2.0 / dt)));
    const int blocks = std::max(1, (n + block - 1) / block);
    double turn_sign = 1.0;
    for (int k = 0; k < n; ++k) {
      const int b = k / block;
      const int in_block = k % block;
      const double v = v_max * double(b + 1) / double(blocks);
      const bool turn_phase = in_block >= (3 * block) / 4;
      script.emplace_back(v, turn_phase ? turn_sign * 1.5 : 0.0);
      if (in_block == block - 1) turn_sign = -turn_sign;
    }
  } else {
    throw std::invalid_argument("command_script_library: unknown script '" + name + "'");
  }
  return script;
}

namespace {

std::map<std::string, double> coeff_map_from_json(const nlohmann::json& j) {
  std::map<std::string, double> out;
  for (const auto& [key, value] : j.items()) {
    out[key] = value.get<double>();
  }
  return out;
}

}  // namespace

SyntheticTerrainSpec load_terrain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_terrain_spec: cannot open " + path);
  }
  nlohmann::json j;
  in >> j;
  SyntheticTerrainSpec spec;
  spec.label = j.at("label").get<std::string>();
  const auto c = j.at("params").at("c").get<std::vector<double>>();
  if (c.size() != 6) {
    throw std::runtime_error("load_terrain_spec: params.c must have 6 entries");
  }
  spec.params = DynamicParams(Vector6(c.data()), j.at("params").value("a", 0.0));
  spec.delta_v = coeff_map_from_json(j.value("delta_v", nlohmann::json::object()));
  spec.delta_omega = coeff_map_from_json(j.value("delta_omega", nlohmann::json::object()));
  spec.process_noise_v = j.value("process_noise_v", 0.0);
  spec.process_noise_omega = j.value("process_noise_omega", 0.0);
  spec.seed = j.value("seed", std::uint64_t(0));

  // reject unknown monomials at load time
  for (const auto& [name, coeff] : spec.delta_v) eval_monomial(name, Vector2::Zero(), Control());
  for (const auto& [name, coeff] : spec.delta_omega) eval_monomial(name, Vector2::Zero(), Control());
  return spec;
}

void save_terrain_spec(const SyntheticTerrainSpec& spec, const std::string& path) {
  nlohmann::json j;
  j["label"] = spec.label;
  j["params"]["c"] = std::vector<double>(spec.params.c.data(), spec.params.c.data() + 6);
  j["params"]["a"] = spec.params.a;
  j["delta_v"] = spec.delta_v;
  j["delta_omega"] = spec.delta_omega;
  j["process_noise_v"] = spec.process_noise_v;
  j["process_noise_omega"] = spec.process_noise_omega;
  j["seed"] = spec.seed;
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_terrain_spec: cannot open " + path);
  }
  out << j.dump(2) << "\n";
}

std::vector<SyntheticTerrainSpec> load_terrain_suite(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::invalid_argument("load_terrain_suite: not a directory: " + dir);
  }
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") {
      paths.push_back(entry.path().string());
    }
  }
  if (paths.empty()) {
    throw std::runtime_error("load_terrain_suite: no *.json specs in " + dir);
  }
  std::sort(paths.begin(), paths.end());
  std::vector<SyntheticTerrainSpec> suite;
  suite.reserve(paths.size());
  for (const auto& path : paths) {
    suite.push_back(load_terrain_spec(path));
  }
  return suite;
}

}  // namespace sswmr
