#include "sswmr/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "sswmr/bench.hpp"
#include "sswmr/gmm.hpp"
#include "sswmr/residuals.hpp"
#include "sswmr/serialization.hpp"
#include "sswmr/synth.hpp"

namespace sswmr {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct CliConfig {
  double dt = 0.1;
  double filter_beta = 0.2;
  int history_length = 10;  // K
  double alpha = 0.001;
  double lambda = 1.0;
  int clusters = 100;
  double wheel_radius = 0.098;
  double track_width = 0.37;
  double horizon_s = 1.0;
  int bins = 8;
  int n_mc = 250;
  double solver_tol = 1e-10;
  int solver_iter_cap = 10000;
  int gp_max_iters = 200;
  int gp_restarts = 3;
  std::string train_script = "pseudo_random";
  std::string test_script = "pseudo_random";
  double train_duration = 120.0;
  double test_duration = 60.0;

  json to_json() const {
    json j;
    j["dt"] = dt;
    j["filter_beta"] = filter_beta;
    j["history_length"] = history_length;
    j["alpha"] = alpha;
    j["lambda"] = lambda;
    j["clusters"] = clusters;
    j["wheel_radius"] = wheel_radius;
    j["track_width"] = track_width;
    j["horizon_s"] = horizon_s;
    j["bins"] = bins;
    j["n_mc"] = n_mc;
    j["solver_tol"] = solver_tol;
    j["solver_iter_cap"] = solver_iter_cap;
    j["gp_max_iters"] = gp_max_iters;
    j["gp_restarts"] = gp_restarts;
    j["train_script"] = train_script;
    j["test_script"] = test_script;
    j["train_duration"] = train_duration;
    j["test_duration"] = test_duration;
    return j;
  }

  void merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not found: " + path);
    json j;
    in >> j;
    dt = j.value("dt", dt);
    filter_beta = j.value("filter_beta", filter_beta);
    history_length = j.value("history_length", history_length);
    alpha = j.value("alpha", alpha);
    lambda = j.value("lambda", lambda);
    clusters = j.value("clusters", clusters);
    wheel_radius = j.value("wheel_radius", wheel_radius);
    track_width = j.value("track_width", track_width);
    horizon_s = j.value("horizon_s", horizon_s);
    bins = j.value("bins", bins);
    n_mc = j.value("n_mc", n_mc);
    solver_tol = j.value("solver_tol", solver_tol);
    solver_iter_cap = j.value("solver_iter_cap", solver_iter_cap);
    gp_max_iters = j.value("gp_max_iters", gp_max_iters);
    gp_restarts = j.value("gp_restarts", gp_restarts);
    train_script = j.value("train_script", train_script);
    test_script = j.value("test_script", test_script);
    train_duration = j.value("train_duration", train_duration);
    test_duration = j.value("test_duration", test_duration);
  }
};

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

void write_json_file(const json& j, const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void write_manifest(const std::string& subcommand, const std::vector<std::string>& inputs,
                    std::uint64_t seed, const CliConfig& config, const fs::path& out_dir) {
  json manifest;
  manifest["subcommand"] = subcommand;
  manifest["inputs"] = inputs;
  manifest["seed"] = seed;
  manifest["config"] = config.to_json();
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(fnv1a_hash(config.to_json().dump())));
  manifest["config_hash"] = hash_hex;
  manifest["version"] = kVersion;
  write_json_file(manifest, out_dir / "manifest.json");
}

std::string label_from_dataset_path(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  return parent.filename().string().empty() ? fs::path(path).stem().string()
                                            : parent.filename().string();
}

TerrainDataset load_labeled_dataset(const std::string& path, const std::string& label,
                                    double filter_beta) {
  const std::string resolved = label.empty() ? label_from_dataset_path(path) : label;
  TerrainDataset dataset = load_dataset(path, {}, resolved);
  if (!dataset.has_velocities) {
    dataset = derive_velocities(dataset, filter_beta);
  }
  return dataset;
}

json error_report_json(const ErrorReport& report) {
  json j;
  j["model"] = report.model;
  j["terrain"] = report.terrain;
  j["angular_position_pct"] = report.angular_position_pct;
  j["linear_position_pct"] = report.linear_position_pct;
  j["angular_velocity_mae"] = report.angular_velocity_mae;
  j["linear_velocity_mae"] = report.linear_velocity_mae;
  j["trajectory_count"] = report.trajectory_count;
  j["angular_excluded"] = report.angular_excluded;
  j["linear_excluded"] = report.linear_excluded;
  return j;
}

// ---- subcommand payloads -------------------------------------------------

struct SynthArgs {
  std::string suite_dir;
  std::string out_dir;
};

int run_synth(const SynthArgs& args, const CliConfig& config, std::uint64_t seed) {
  const auto suite = load_terrain_suite(args.suite_dir);
  const fs::path out(args.out_dir);
  char buf[64];
  for (size_t i = 0; i < suite.size(); ++i) {
    SyntheticTerrainSpec spec = suite[i];
    const fs::path terrain_dir = out / spec.label;
    fs::create_directories(terrain_dir);

    spec.seed = seed + 17 * i;
    const auto train_script = command_script_library(config.train_script,
                                                     config.train_duration, config.dt,
                                                     seed + 100 + i);
    const SynthResult train = synth_generate(spec, train_script, config.dt);
    save_dataset(train.dataset, (terrain_dir / "train.csv").string());

    std::ofstream residual_log(terrain_dir / "train_residuals.csv");
    residual_log << "step,g_v,g_omega\n";
    for (size_t k = 0; k < train.residuals.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", k, train.residuals[k](0),
                    train.residuals[k](1));
      residual_log << buf;
    }

    spec.seed = seed + 17 * i + 7;
    const auto test_script = command_script_library(config.test_script,
                                                    config.test_duration, config.dt,
                                                    seed + 200 + i);
    const SynthResult test = synth_generate(spec, test_script, config.dt);
    save_dataset(test.dataset, (terrain_dir / "test.csv").string());

    save_terrain_spec(suite[i], (terrain_dir / "spec.json").string());
  }
  write_manifest("synth", {args.suite_dir}, seed, config, out);
  std::cout << "synth: wrote " << suite.size() << " terrains to " << out << "\n";
  return 0;
}

struct IdentifyArgs {
  std::string dataset_path;
  std::string label;
  std::string out_dir;
};

int run_identify(const IdentifyArgs& args, const CliConfig& config, std::uint64_t seed) {
  const TerrainDataset dataset =
      load_labeled_dataset(args.dataset_path, args.label, config.filter_beta);
  std::vector<Vector2> eta;
  std::vector<Control> controls;
  eta.reserve(dataset.size());
  for (const auto& r : dataset.records) {
    eta.emplace_back(r.v, r.omega);
    controls.emplace_back(r.v_ref, r.omega_ref);
  }
  const auto log = make_ident_log(eta, controls, dataset.dt);
  const IdentResult result = identify_params(log, config.filter_beta);

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  ParamsFile file;
  file.params = result.params;
  file.dt = dataset.dt;
  file.filter_beta = config.filter_beta;
  save_params(file, (out / "params.json").string());

  json report;
  report["relative_residual"] = result.relative_residual;
  report["condition_number"] = result.condition_number;
  report["samples"] = log.size();
  write_json_file(report, out / "identify_report.json");
  write_manifest("identify", {args.dataset_path}, seed, config, out);
  std::cout << "identify: relative residual " << result.relative_residual << "\n";
  return 0;
}

struct TrainGpArgs {
  std::string dataset_path;
  std::string params_path;
  std::string label;
  std::string out_dir;
};

int run_train_gp(const TrainGpArgs& args, const CliConfig& config, std::uint64_t seed) {
  const TerrainDataset dataset =
      load_labeled_dataset(args.dataset_path, args.label, config.filter_beta);
  const ParamsFile params = load_params(args.params_path);
  const ResidualDataset residuals =
      build_residual_dataset(dataset, params.params, dataset.dt);
  if (residuals.samples.size() < 2) {
    throw std::invalid_argument("train-gp: not enough residual samples");
  }

  const Eigen::MatrixXd all_inputs = residuals.inputs();
  const SubsetResult subset =
      select_training_subset(all_inputs, config.clusters, seed);
  if (!subset.warning.empty()) std::cerr << "train-gp: " << subset.warning << "\n";

  const int p = int(subset.indices.size());
  Eigen::MatrixXd inputs(p, 4);
  Eigen::VectorXd y_v(p), y_w(p);
  for (int i = 0; i < p; ++i) {
    const ResidualSample& s = residuals.samples[subset.indices[i]];
    inputs.row(i) = s.z.transpose();
    y_v(i) = s.g_v;
    y_w(i) = s.g_omega;
  }

  OptimizeOptions options;
  options.max_iters = config.gp_max_iters;
  options.restarts = config.gp_restarts;
  options.seed = seed;

  // variance-matched starting point; residual targets are far below unit scale
  auto init_for = [](const Eigen::VectorXd& y) {
    const double var = std::max((y.array() - y.mean()).square().mean(), 1e-12);
    GpHyperparams init = GpHyperparams::defaults(4);
    init.log_signal_var = std::log(var);
    init.log_noise_var = std::log(0.1 * var);
    return init;
  };

  TerrainGp terrain;
  terrain.label = dataset.terrain_label;
  terrain.gp_v = fit(inputs, y_v, optimize_hyperparams(inputs, y_v, init_for(y_v), options));
  options.seed = seed + 1;
  terrain.gp_omega =
      fit(inputs, y_w, optimize_hyperparams(inputs, y_w, init_for(y_w), options));
  save_terrain_gp(terrain, args.out_dir);

  json report;
  report["terrain"] = terrain.label;
  report["training_points"] = p;
  report["residual_samples"] = residuals.samples.size();
  report["skipped_pairs"] = residuals.skipped;
  write_json_file(report, fs::path(args.out_dir) / ("train_report_" + terrain.label + ".json"));
  write_manifest("train-gp", {args.dataset_path, args.params_path}, seed, config,
                 args.out_dir);
  std::cout << "train-gp: " << terrain.label << " fitted on " << p << " points\n";
  return 0;
}

struct TrainBaselineArgs {
  std::string dataset_path;
  std::string label;
  std::string variant = "EDD5";
  std::string out_dir;
};

int run_train_baseline(const TrainBaselineArgs& args, const CliConfig& config,
                       std::uint64_t seed) {
  const TerrainDataset dataset =
      load_labeled_dataset(args.dataset_path, args.label, config.filter_beta);
  const JacobianVariant variant = jacobian_variant_from_string(args.variant);
  const JacobianModel model =
      fit_jacobian(variant, dataset, config.wheel_radius, config.track_width);
  const fs::path out(args.out_dir);
  fs::create_directories(out);
  const std::string name = "baseline_" + to_string(variant) + "_" +
                           dataset.terrain_label + ".json";
  save_jacobian_model(model, (out / name).string());

  const RateSamples samples =
      rate_samples_from_dataset(dataset, config.wheel_radius, config.track_width);
  json report;
  report["variant"] = to_string(variant);
  report["terrain"] = dataset.terrain_label;
  report["fit_sse"] = fit_residual(model, samples);
  write_json_file(report, out / ("baseline_report_" + to_string(variant) + "_" +
                                 dataset.terrain_label + ".json"));
  write_manifest("train-baseline", {args.dataset_path}, seed, config, out);
  std::cout << "train-baseline: " << to_string(variant) << " on "
            << dataset.terrain_label << "\n";
  return 0;
}

struct ModelArgs {
  std::string model = "gp";  // gp | baseline | nominal
  std::string params_path;
  std::string bank_dir;
  std::string terrain;
  std::string baseline_path;
};

struct LoadedModel {
  std::unique_ptr<MotionModel> motion;
  std::unique_ptr<DisturbanceModel> disturbance;  // kept alive for gp models
  TerrainGpBank bank;
};

LoadedModel load_model(const ModelArgs& args, const std::string& dataset_label) {
  LoadedModel loaded;
  if (args.model == "baseline") {
    if (args.baseline_path.empty()) {
      throw std::invalid_argument("baseline model requires --baseline-file");
    }
    loaded.motion =
        std::make_unique<KinematicMotionModel>(load_jacobian_model(args.baseline_path));
    return loaded;
  }
  if (args.params_path.empty()) {
    throw std::invalid_argument("dynamic models require --params");
  }
  const ParamsFile params = load_params(args.params_path);
  if (args.model == "nominal") {
    loaded.disturbance = std::make_unique<ZeroDisturbance>();
    loaded.motion = std::make_unique<DynamicMotionModel>(params.params,
                                                         *loaded.disturbance, "nominal");
    return loaded;
  }
  if (args.model == "gp") {
    if (args.bank_dir.empty()) {
      throw std::invalid_argument("gp model requires --bank");
    }
    loaded.bank = load_terrain_bank(args.bank_dir);
    const std::string terrain = args.terrain.empty() ? dataset_label : args.terrain;
    const int index = loaded.bank.index_of(terrain);
    if (index < 0) {
      throw std::invalid_argument("terrain '" + terrain + "' not in bank");
    }
    loaded.disturbance = std::make_unique<GpPairDisturbance>(
        loaded.bank.terrains[index].gp_v, loaded.bank.terrains[index].gp_omega);
    loaded.motion =
        std::make_unique<DynamicMotionModel>(params.params, *loaded.disturbance, "GP");
    return loaded;
  }
  throw std::invalid_argument("unknown model kind '" + args.model + "'");
}

struct SweepArgs {
  std::string dataset_path;
  std::string label;
  ModelArgs model;
  std::string out_dir;
};

int run_sweep(const SweepArgs& args, const CliConfig& config, std::uint64_t seed) {
  const TerrainDataset dataset =
      load_labeled_dataset(args.dataset_path, args.label, config.filter_beta);
  const LoadedModel loaded = load_model(args.model, dataset.terrain_label);
  const ErrorReport report =
      sweep_errors(*loaded.motion, dataset, config.horizon_s, config.dt);

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  const std::string name =
      "sweep_" + report.model + "_" + report.terrain + ".json";
  write_json_file(error_report_json(report), out / name);
  write_manifest("sweep", {args.dataset_path}, seed, config, out);
  std::cout << "sweep: " << report.model << " on " << report.terrain
            << " angular MAE " << report.angular_velocity_mae << " rad/s\n";
  return 0;
}

struct WeightsArgs {
  std::string dataset_path;
  std::string label;
  std::string bank_dir;
  std::string params_path;
  std::string out_dir;
};

int run_weights(const WeightsArgs& args, const CliConfig& config, std::uint64_t seed) {
  const TerrainDataset dataset =
      load_labeled_dataset(args.dataset_path, args.label, config.filter_beta);
  const TerrainGpBank bank = load_terrain_bank(args.bank_dir);
  const ParamsFile params = load_params(args.params_path);
  WeightSolverOptions options;
  options.tol = config.solver_tol;
  options.max_iters = config.solver_iter_cap;
  const WeightTrace trace = run_weight_trace(bank, dataset, params.params,
                                             config.history_length, config.alpha,
                                             dataset.dt, options);

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  std::ofstream csv(out / "weights.csv");
  csv << "step";
  for (const auto& label : trace.labels) csv << ",w_" << label;
  csv << "\n";
  char buf[64];
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    csv << trace.steps[i];
    for (int j = 0; j < trace.weights[i].size(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", trace.weights[i](j));
      csv << buf;
    }
    csv << "\n";
  }

  json report;
  report["terrain"] = dataset.terrain_label;
  report["labels"] = trace.labels;
  if (trace.steps_to_correct_argmax) {
    report["steps_to_correct_argmax"] = *trace.steps_to_correct_argmax;
  } else {
    report["steps_to_correct_argmax"] = nullptr;
  }
  if (trace.steady_state_true_weight) {
    report["steady_state_true_weight"] = *trace.steady_state_true_weight;
  } else {
    report["steady_state_true_weight"] = nullptr;
  }
  write_json_file(report, out / ("weights_report_" + dataset.terrain_label + ".json"));
  write_manifest("weights", {args.dataset_path, args.bank_dir}, seed, config, out);
  std::cout << "weights: trace of " << trace.steps.size() << " steps written\n";
  return 0;
}

struct CoverageArgs {
  ModelArgs model;
  std::string out_dir;
};

CoverageScenario make_seeded_scenario(std::uint64_t seed, double dt, double horizon_s) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector5 mean;
  mean << unit(rng), unit(rng), 0.5 * unit(rng), 0.5 + 0.3 * unit(rng), 0.5 * unit(rng);
  Matrix5 cov = Matrix5::Zero();
  cov.diagonal() << 2e-3, 2e-3, 1e-3, 4e-3, 4e-3;

  CoverageScenario scenario;
  scenario.belief0 = GaussianBelief(mean, cov);
  const int n = std::max(1, int(std::llround(horizon_s / dt)));
  const double v_cmd = 0.6 + 0.3 * unit(rng);
  const double w_cmd = 1.2 * unit(rng);
  for (int k = 0; k < n; ++k) {
    scenario.controls.emplace_back(v_cmd, w_cmd);
  }
  return scenario;
}

int run_coverage_cmd(const CoverageArgs& args, const CliConfig& config,
                     std::uint64_t seed) {
  const LoadedModel loaded = load_model(args.model, args.model.terrain);
  if (!loaded.disturbance) {
    throw std::invalid_argument("coverage requires a dynamic model (gp or nominal)");
  }
  const ParamsFile params = load_params(args.model.params_path);
  const CoverageScenario scenario = make_seeded_scenario(seed, config.dt, config.horizon_s);
  SigmaConfig sigma;
  sigma.lambda = config.lambda;
  const CoverageReport report = run_coverage(*loaded.disturbance, params.params, scenario,
                                             config.dt, sigma, config.n_mc, seed);

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  std::ofstream csv(out / "coverage.csv");
  csv << "step,sigma_point,linear\n";
  char buf[96];
  double min_sigma = 1.0;
  for (size_t k = 0; k < report.sigma_point.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", k, report.sigma_point[k],
                  report.linear[k]);
    csv << buf;
    min_sigma = std::min(min_sigma, report.sigma_point[k]);
  }
  json j;
  j["min_sigma_point_coverage"] = min_sigma;
  j["n_mc"] = config.n_mc;
  write_json_file(j, out / "coverage_report.json");
  write_manifest("coverage", {}, seed, config, out);
  std::cout << "coverage: min sigma-point 3-sigma coverage " << min_sigma << "\n";
  return 0;
}

struct HeatmapArgs {
  std::string dataset_path;
  std::string label;
  ModelArgs model;
  std::string out_dir;
};

int run_heatmap_cmd(const HeatmapArgs& args, const CliConfig& config,
                    std::uint64_t seed) {
  const TerrainDataset dataset =
      load_labeled_dataset(args.dataset_path, args.label, config.filter_beta);
  const LoadedModel loaded = load_model(args.model, dataset.terrain_label);
  const HeatmapGrid grid =
      run_heatmap(*loaded.motion, dataset, config.bins, config.bins, dataset.dt);

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  std::ofstream csv(out / "heatmap.csv");
  csv << "v_bin,omega_bin,v_lo,v_hi,omega_lo,omega_hi,count,mean_abs_omega_err\n";
  char buf[192];
  for (int i = 0; i < grid.counts.rows(); ++i) {
    for (int j = 0; j < grid.counts.cols(); ++j) {
      const int count = grid.counts(i, j);
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%d,", i, j,
                    grid.v_edges(i), grid.v_edges(i + 1), grid.omega_edges(j),
                    grid.omega_edges(j + 1), count);
      csv << buf;
      if (count > 0) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", grid.mean_abs_err(i, j));
        csv << buf;
      } else {
        csv << "\n";  // empty bins are flagged by count 0, not zero-filled
      }
    }
  }
  write_manifest("heatmap", {args.dataset_path}, seed, config, out);
  std::cout << "heatmap: " << grid.counts.rows() << "x" << grid.counts.cols()
            << " grid written\n";
  return 0;
}

struct ReportArgs {
  std::string run_dir;
  std::string out_dir;
};

json reference_targets() {
  // External multi-terrain benchmark reference values (EDD5 vs GP).
  json j;
  j["angular_position_pct"] = {
      {"EDD5", {{"asphalt", 17.6}, {"grass", 18.9}, {"tile", 21.1}}},
      {"GP", {{"asphalt", 5.7}, {"grass", 5.6}, {"tile", 10.9}}}};
  j["linear_position_pct"] = {
      {"EDD5", {{"asphalt", 14.2}, {"grass", 6.2}, {"tile", 11.6}}},
      {"GP", {{"asphalt", 5.8}, {"grass", 5.7}, {"tile", 5.0}}}};
  j["angular_velocity_mae"] = {
      {"EDD5", {{"asphalt", 0.19}, {"grass", 0.16}, {"tile", 0.30}}},
      {"GP", {{"asphalt", 0.02}, {"grass", 0.03}, {"tile", 0.06}}}};
  j["linear_velocity_mae"] = {
      {"EDD5", {{"asphalt", 0.23}, {"grass", 0.07}, {"tile", 0.22}}},
      {"GP", {{"asphalt", 0.12}, {"grass", 0.09}, {"tile", 0.13}}}};
  return j;
}

int run_report(const ReportArgs& args, const CliConfig& config, std::uint64_t seed) {
  std::vector<std::string> sweep_files;
  std::vector<std::string> weight_files;
  std::vector<std::string> coverage_files;
  for (const auto& entry : fs::recursive_directory_iterator(args.run_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("sweep_", 0) == 0 && entry.path().extension() == ".json") {
      sweep_files.push_back(entry.path().string());
    } else if (name.rfind("weights_report_", 0) == 0) {
      weight_files.push_back(entry.path().string());
    } else if (name == "coverage_report.json") {
      coverage_files.push_back(entry.path().string());
    }
  }
  std::sort(sweep_files.begin(), sweep_files.end());
  std::sort(weight_files.begin(), weight_files.end());
  std::sort(coverage_files.begin(), coverage_files.end());

  json report;
  report["results"] = json::array();
  for (const auto& path : sweep_files) {
    std::ifstream in(path);
    json j;
    in >> j;
    report["results"].push_back(j);
  }
  report["weight_adaptation"] = json::array();
  for (const auto& path : weight_files) {
    std::ifstream in(path);
    json j;
    in >> j;
    report["weight_adaptation"].push_back(j);
  }
  report["coverage"] = json::array();
  for (const auto& path : coverage_files) {
    std::ifstream in(path);
    json j;
    in >> j;
    report["coverage"].push_back(j);
  }
  report["reference_targets"] = reference_targets();

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  write_json_file(report, out / "report.json");

  std::ofstream table1(out / "table1.csv");
  table1 << "terrain,model,angular_position_pct,linear_position_pct\n";
  std::ofstream table2(out / "table2.csv");
  table2 << "terrain,model,angular_velocity_mae,linear_velocity_mae\n";
  char buf[192];
  for (const auto& entry : report["results"]) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%.6g\n",
                  entry["terrain"].get<std::string>().c_str(),
                  entry["model"].get<std::string>().c_str(),
                  entry["angular_position_pct"].get<double>(),
                  entry["linear_position_pct"].get<double>());
    table1 << buf;
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%.6g\n",
                  entry["terrain"].get<std::string>().c_str(),
                  entry["model"].get<std::string>().c_str(),
                  entry["angular_velocity_mae"].get<double>(),
                  entry["linear_velocity_mae"].get<double>());
    table2 << buf;
  }
  write_manifest("report", {args.run_dir}, seed, config, out);
  std::cout << "report: aggregated " << sweep_files.size() << " sweeps\n";
  return 0;
}

void add_model_options(CLI::App* cmd, ModelArgs& model) {
  cmd->add_option("--model", model.model, "Model kind: gp | baseline | nominal");
  cmd->add_option("--params", model.params_path, "Dynamic parameter file (JSON)");
  cmd->add_option("--bank", model.bank_dir, "Terrain GP bank directory");
  cmd->add_option("--terrain", model.terrain, "Terrain label inside the bank");
  cmd->add_option("--baseline-file", model.baseline_path, "Fitted Jacobian model (JSON)");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Probabilistic skid-steer motion model benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config file")->envname("SSWMR_CONFIG");
  app.add_option("--seed", seed, "Base RNG seed");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic terrain suite");
  synth_cmd->add_option("--suite", synth_args.suite_dir, "Terrain spec directory")
      ->required();
  synth_cmd->add_option("--out", synth_args.out_dir, "Output directory")->required();

  IdentifyArgs identify_args;
  auto* identify_cmd =
      app.add_subcommand("identify", "Identify dynamic parameters from a dataset");
  identify_cmd->add_option("--dataset", identify_args.dataset_path)->required();
  identify_cmd->add_option("--label", identify_args.label);
  identify_cmd->add_option("--out", identify_args.out_dir)->required();

  TrainGpArgs train_gp_args;
  auto* train_gp_cmd = app.add_subcommand("train-gp", "Train a terrain residual GP pair");
  train_gp_cmd->add_option("--dataset", train_gp_args.dataset_path)->required();
  train_gp_cmd->add_option("--params", train_gp_args.params_path)->required();
  train_gp_cmd->add_option("--label", train_gp_args.label);
  train_gp_cmd->add_option("--out", train_gp_args.out_dir)->required();

  TrainBaselineArgs train_baseline_args;
  auto* train_baseline_cmd =
      app.add_subcommand("train-baseline", "Fit a kinematic Jacobian baseline");
  train_baseline_cmd->add_option("--dataset", train_baseline_args.dataset_path)->required();
  train_baseline_cmd->add_option("--label", train_baseline_args.label);
  train_baseline_cmd->add_option("--variant", train_baseline_args.variant);
  train_baseline_cmd->add_option("--out", train_baseline_args.out_dir)->required();

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Moving-horizon prediction error sweep");
  sweep_cmd->add_option("--dataset", sweep_args.dataset_path)->required();
  sweep_cmd->add_option("--label", sweep_args.label);
  sweep_cmd->add_option("--out", sweep_args.out_dir)->required();
  add_model_options(sweep_cmd, sweep_args.model);

  WeightsArgs weights_args;
  auto* weights_cmd = app.add_subcommand("weights", "Online ensemble weight trace");
  weights_cmd->add_option("--dataset", weights_args.dataset_path)->required();
  weights_cmd->add_option("--label", weights_args.label);
  weights_cmd->add_option("--bank", weights_args.bank_dir)->required();
  weights_cmd->add_option("--params", weights_args.params_path)->required();
  weights_cmd->add_option("--out", weights_args.out_dir)->required();

  CoverageArgs coverage_args;
  auto* coverage_cmd =
      app.add_subcommand("coverage", "Monte-Carlo coverage of propagated beliefs");
  coverage_cmd->add_option("--out", coverage_args.out_dir)->required();
  add_model_options(coverage_cmd, coverage_args.model);

  HeatmapArgs heatmap_args;
  auto* heatmap_cmd =
      app.add_subcommand("heatmap", "One-step angular error over the command plane");
  heatmap_cmd->add_option("--dataset", heatmap_args.dataset_path)->required();
  heatmap_cmd->add_option("--label", heatmap_args.label);
  heatmap_cmd->add_option("--out", heatmap_args.out_dir)->required();
  add_model_options(heatmap_cmd, heatmap_args.model);

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Aggregate run outputs");
  report_cmd->add_option("--run", report_args.run_dir, "Run directory to scan")->required();
  report_cmd->add_option("--out", report_args.out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CliConfig config;
    if (!config_path.empty()) config.merge_file(config_path);
    if (synth_cmd->parsed()) return run_synth(synth_args, config, seed);
    if (identify_cmd->parsed()) return run_identify(identify_args, config, seed);
    if (train_gp_cmd->parsed()) return run_train_gp(train_gp_args, config, seed);
    if (train_baseline_cmd->parsed()) {
      return run_train_baseline(train_baseline_args, config, seed);
    }
    if (sweep_cmd->parsed()) return run_sweep(sweep_args, config, seed);
    if (weights_cmd->parsed()) return run_weights(weights_args, config, seed);
    if (coverage_cmd->parsed()) return run_coverage_cmd(coverage_args, config, seed);
    if (heatmap_cmd->parsed()) return run_heatmap_cmd(heatmap_args, config, seed);
    if (report_cmd->parsed()) return run_report(report_args, config, seed);
    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace sswmr
