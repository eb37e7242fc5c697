#include "sswmr/serialization.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

namespace sswmr {

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  json j;
  in >> j;
  return j;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << j.dump(2) << "\n";
}

json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), long(values.size()));
}

}  // namespace

void save_params(const ParamsFile& file, const std::string& path) {
  json j;
  j["c"] = std::vector<double>(file.params.c.data(), file.params.c.data() + 6);
  j["a"] = file.params.a;
  j["dt"] = file.dt;
  j["filter_beta"] = file.filter_beta;
  write_json(j, path);
}

ParamsFile load_params(const std::string& path) {
  const json j = read_json(path);
  const auto c = j.at("c").get<std::vector<double>>();
  if (c.size() != 6) {
    throw std::runtime_error("load_params: c must have 6 entries in " + path);
  }
  ParamsFile file;
  file.params = DynamicParams(Vector6(c.data()), j.value("a", 0.0));
  file.dt = j.value("dt", 0.1);
  file.filter_beta = j.value("filter_beta", 0.2);
  return file;
}

void save_gp_model(const GpModel& model, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["hyper"]["log_length_scale"] = vector_to_json(model.hyper.log_length_scale);
  j["hyper"]["log_signal_var"] = model.hyper.log_signal_var;
  j["hyper"]["log_noise_var"] = model.hyper.log_noise_var;
  j["input_mean"] = vector_to_json(model.input_mean);
  j["input_std"] = vector_to_json(model.input_std);
  std::vector<std::vector<double>> rows(model.count());
  for (int i = 0; i < model.count(); ++i) {
    // de-standardize so the file holds the raw training inputs
    const Eigen::VectorXd raw = model.train_inputs.row(i).transpose().cwiseProduct(
                                    model.input_std) + model.input_mean;
    rows[i].assign(raw.data(), raw.data() + raw.size());
  }
  j["train_inputs"] = rows;
  j["train_targets"] = vector_to_json(model.train_targets);
  write_json(j, path);
}

GpModel load_gp_model(const std::string& path) {
  const json j = read_json(path);
  if (j.value("format_version", 0) != 1) {
    throw std::runtime_error("load_gp_model: unsupported format version in " + path);
  }
  GpHyperparams hyper;
  hyper.log_length_scale = vector_from_json(j.at("hyper").at("log_length_scale"));
  hyper.log_signal_var = j.at("hyper").at("log_signal_var").get<double>();
  hyper.log_noise_var = j.at("hyper").at("log_noise_var").get<double>();

  const auto rows = j.at("train_inputs").get<std::vector<std::vector<double>>>();
  if (rows.empty()) {
    throw std::runtime_error("load_gp_model: empty training set in " + path);
  }
  Eigen::MatrixXd inputs(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    inputs.row(i) = Eigen::Map<const Eigen::VectorXd>(rows[i].data(), long(rows[i].size()));
  }
  const Eigen::VectorXd targets = vector_from_json(j.at("train_targets"));
  return fit(inputs, targets, hyper);
}

void save_terrain_gp(const TerrainGp& terrain, const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_gp_model(terrain.gp_v, dir + "/" + terrain.label + ".gpv.json");
  save_gp_model(terrain.gp_omega, dir + "/" + terrain.label + ".gpw.json");
}

TerrainGpBank load_terrain_bank(const std::string& dir) {
  std::set<std::string> labels;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const auto pos = name.find(".gpv.json");
    if (pos != std::string::npos && pos + 9 == name.size()) {
      labels.insert(name.substr(0, pos));
    }
  }
  if (labels.empty()) {
    throw std::runtime_error("load_terrain_bank: no *.gpv.json models in " + dir);
  }
  TerrainGpBank bank;
  for (const std::string& label : labels) {
    TerrainGp terrain;
    terrain.label = label;
    terrain.gp_v = load_gp_model(dir + "/" + label + ".gpv.json");
    terrain.gp_omega = load_gp_model(dir + "/" + label + ".gpw.json");
    bank.terrains.push_back(std::move(terrain));
  }
  return bank;
}

void save_jacobian_model(const JacobianModel& model, const std::string& path) {
  json j;
  j["variant"] = to_string(model.variant);
  std::vector<std::vector<double>> rows(3, std::vector<double>(2));
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 2; ++c) rows[r][c] = model.J(r, c);
  }
  j["J"] = rows;
  j["wheel_radius"] = model.wheel_radius;
  j["track_width"] = model.track_width;
  write_json(j, path);
}

JacobianModel load_jacobian_model(const std::string& path) {
  const json j = read_json(path);
  JacobianModel model;
  model.variant = jacobian_variant_from_string(j.at("variant").get<std::string>());
  const auto rows = j.at("J").get<std::vector<std::vector<double>>>();
  if (rows.size() != 3 || rows[0].size() != 2) {
    throw std::runtime_error("load_jacobian_model: J must be 3x2 in " + path);
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 2; ++c) model.J(r, c) = rows[r][c];
  }
  model.wheel_radius = j.value("wheel_radius", 0.098);
  model.track_width = j.value("track_width", 0.37);
  return model;
}

}  // namespace sswmr
