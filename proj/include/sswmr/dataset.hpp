#ifndef SSWMR_DATASET_HPP
#define SSWMR_DATASET_HPP

#include <map>
#include <string>
#include <vector>

#include "sswmr/types.hpp"

namespace sswmr {

/// Time-indexed log of commands and poses for one terrain. Ground-truth
/// body velocities are filled in either by the synthetic generator or by
/// derive_velocities().
struct TerrainDataset {
  struct Record {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double v_ref = 0.0;
    double omega_ref = 0.0;
    double v = 0.0;
    double omega = 0.0;
  };

  std::string terrain_label;
  double dt = 0.0;
  bool has_velocities = false;
  std::vector<Record> records;

  size_t size() const { return records.size(); }
};

/// Maps dataset fields to CSV header names. Velocity columns are optional
/// on load; when absent the dataset is returned without derived velocities.
struct CsvFormat {
  std::string t = "t";
  std::string x = "x";
  std::string y = "y";
  std::string theta = "theta";
  std::string v_ref = "v_ref";
  std::string omega_ref = "omega_ref";
  std::string v = "v";
  std::string omega = "omega";
};

TerrainDataset load_dataset(const std::string& path, const CsvFormat& format = {},
                            const std::string& label = "");

/// Writes all numeric fields with round-trip precision.
void save_dataset(const TerrainDataset& dataset, const std::string& path);

/// Fills body-frame velocities from poses: channels are low-pass filtered
/// (theta unwrapped first), then each step's chord is projected onto the
/// midpoint heading, and omega is the wrapped heading difference per step.
/// The first record copies the second.
TerrainDataset derive_velocities(const TerrainDataset& dataset, double filter_beta);

}  // namespace sswmr

#endif  // SSWMR_DATASET_HPP
