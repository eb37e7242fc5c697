#ifndef SSWMR_SYNTH_HPP
#define SSWMR_SYNTH_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sswmr/dataset.hpp"
#include "sswmr/dynamics.hpp"
#include "sswmr/types.hpp"

namespace sswmr {

/// Ground-truth description of one synthetic terrain. The velocity
/// disturbances are smooth polynomial maps over (v, omega, v_ref,
/// omega_ref), stored as coefficients per named monomial so terrain
/// definitions can live in fixture files.
struct SyntheticTerrainSpec {
  std::string label;
  DynamicParams params;
  std::map<std::string, double> delta_v;      // monomial -> coefficient
  std::map<std::string, double> delta_omega;  // monomial -> coefficient
  double process_noise_v = 0.0;
  double process_noise_omega = 0.0;
  std::uint64_t seed = 0;
};

/// Monomials accepted in disturbance coefficient maps:
/// "1", "v", "omega", "v^2", "omega^2", "v*omega", "v*omega^2",
/// "v^2*omega", "v_ref", "omega_ref".
double eval_monomial(const std::string& name, const Vector2& eta, const Control& u);

Vector2 eval_disturbance(const SyntheticTerrainSpec& spec, const Vector2& eta,
                         const Control& u);

struct SynthResult {
  TerrainDataset dataset;
  /// Per-step ground-truth residuals: measured next velocity minus the
  /// one-step nominal prediction, computed by fine-substep integration.
  std::vector<Vector2> residuals;
};

/// Integrates the disturbed dynamics at dt/100 substeps and records coarse
/// samples. Per-step Gaussian process noise (when configured) perturbs the
/// velocities; runs are deterministic under the spec seed.
SynthResult synth_generate(const SyntheticTerrainSpec& spec,
                           std::span<const Control> script, double dt,
                           const State5& x0 = State5());

/// Command scripts covering the (v_ref, omega_ref) envelope.
/// Names: pseudo_random | lawnmower | figure_eight | speed_sweep.
std::vector<Control> command_script_library(const std::string& name, double duration,
                                            double dt, std::uint64_t seed);

SyntheticTerrainSpec load_terrain_spec(const std::string& path);
void save_terrain_spec(const SyntheticTerrainSpec& spec, const std::string& path);

/// Loads every *.json spec in a directory, sorted by filename.
std::vector<SyntheticTerrainSpec> load_terrain_suite(const std::string& dir);

}  // namespace sswmr

#endif  // SSWMR_SYNTH_HPP
