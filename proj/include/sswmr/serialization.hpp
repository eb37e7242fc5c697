#ifndef SSWMR_SERIALIZATION_HPP
#define SSWMR_SERIALIZATION_HPP

#include <string>

#include "sswmr/baselines.hpp"
#include "sswmr/dynamics.hpp"
#include "sswmr/ensemble.hpp"
#include "sswmr/gp.hpp"

namespace sswmr {

/// Dynamic-model parameter file (JSON): c1..c6, a, dt, filter_beta.
struct ParamsFile {
  DynamicParams params;
  double dt = 0.1;
  double filter_beta = 0.2;
};

void save_params(const ParamsFile& file, const std::string& path);
ParamsFile load_params(const std::string& path);

/// Versioned GP model file. Hyperparameters, standardization statistics,
/// and the training set are stored; the factorization is recomputed on load.
void save_gp_model(const GpModel& model, const std::string& path);
GpModel load_gp_model(const std::string& path);

/// Terrain bank directory: one "<label>.gpv.json" / "<label>.gpw.json"
/// model pair per terrain.
void save_terrain_gp(const TerrainGp& terrain, const std::string& dir);
TerrainGpBank load_terrain_bank(const std::string& dir);

void save_jacobian_model(const JacobianModel& model, const std::string& path);
JacobianModel load_jacobian_model(const std::string& path);

}  // namespace sswmr

#endif  // SSWMR_SERIALIZATION_HPP
