#include "sswmr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sswmr/lowpass.hpp"

namespace sswmr {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    const auto begin = cell.find_first_not_of(" \t\r");
    const auto end = cell.find_last_not_of(" \t\r");
    cells.push_back(begin == std::string::npos ? "" : cell.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_double(const std::string& cell, size_t row, const std::string& column) {
  try {
    size_t pos = 0;
    const double value = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite");
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error("load_dataset: unparseable value '" + cell + "' in column '" +
                             column + "' at data row " + std::to_string(row));
  }
}

double median_gap(const std::vector<TerrainDataset::Record>& records) {
  std::vector<double> gaps;
  gaps.reserve(records.size() - 1);
  for (size_t i = 1; i < records.size(); ++i) {
    gaps.push_back(records[i].t - records[i - 1].t);
  }
  std::sort(gaps.begin(), gaps.end());
  return gaps[gaps.size() / 2];
}

}  // namespace

TerrainDataset load_dataset(const std::string& path, const CsvFormat& format,
                            const std::string& label) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_dataset: cannot open " + path);
  }
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw std::runtime_error("load_dataset: empty file " + path);
  }
  const std::vector<std::string> header = split_csv_line(header_line);
  auto column = [&](const std::string& name) -> int {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : int(it - header.begin());
  };
  const int ct = column(format.t), cx = column(format.x), cy = column(format.y),
            cth = column(format.theta), cvr = column(format.v_ref),
            cwr = column(format.omega_ref);
  for (auto [idx, name] : {std::pair{ct, format.t}, {cx, format.x}, {cy, format.y},
                           {cth, format.theta}, {cvr, format.v_ref}, {cwr, format.omega_ref}}) {
    if (idx < 0) {
      throw std::runtime_error("load_dataset: missing column '" + name + "' in " + path);
    }
  }
  const int cv = column(format.v), cw = column(format.omega);
  const bool with_velocities = cv >= 0 && cw >= 0;

  TerrainDataset dataset;
  dataset.terrain_label = label;
  dataset.has_velocities = with_velocities;

  std::string line;
  size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < header.size()) {
      throw std::runtime_error("load_dataset: short row " + std::to_string(row) + " in " + path);
    }
    TerrainDataset::Record r;
    r.t = parse_double(cells[ct], row, format.t);
    r.x = parse_double(cells[cx], row, format.x);
    r.y = parse_double(cells[cy], row, format.y);
    r.theta = parse_double(cells[cth], row, format.theta);
    r.v_ref = parse_double(cells[cvr], row, format.v_ref);
    r.omega_ref = parse_double(cells[cwr], row, format.omega_ref);
    if (with_velocities) {
      r.v = parse_double(cells[cv], row, format.v);
      r.omega = parse_double(cells[cw], row, format.omega);
    }
    dataset.records.push_back(r);
  }
  if (dataset.records.empty()) {
    throw std::runtime_error("load_dataset: no data rows in " + path);
  }

  std::stable_sort(dataset.records.begin(), dataset.records.end(),
                   [](const auto& a, const auto& b) { return a.t < b.t; });
  for (size_t i = 1; i < dataset.records.size(); ++i) {
    if (!(dataset.records[i].t > dataset.records[i - 1].t)) {
      throw std::runtime_error("load_dataset: non-increasing timestamp at sorted row " +
                               std::to_string(i + 1) + " (t = " +
                               std::to_string(dataset.records[i].t) + ")");
    }
  }
  dataset.dt = dataset.records.size() > 1 ? median_gap(dataset.records) : 0.0;
  return dataset;
}

void save_dataset(const TerrainDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_dataset: cannot open " + path);
  }
  out << "t,x,y,theta,v_ref,omega_ref";
  if (dataset.has_velocities) out << ",v,omega";
  out << "\n";
  char buf[64];
  auto fmt = [&](double value) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf);
  };
  for (const auto& r : dataset.records) {
    out << fmt(r.t) << ',' << fmt(r.x) << ',' << fmt(r.y) << ',' << fmt(r.theta) << ','
        << fmt(r.v_ref) << ',' << fmt(r.omega_ref);
    if (dataset.has_velocities) out << ',' << fmt(r.v) << ',' << fmt(r.omega);
    out << "\n";
  }
}

TerrainDataset derive_velocities(const TerrainDataset& dataset, double filter_beta) {
  if (dataset.records.size() < 2) {
    throw std::invalid_argument("derive_velocities: need at least 2 records");
  }
  const size_t n = dataset.records.size();
  const double dt = dataset.dt;
  for (size_t i = 1; i < n; ++i) {
    const double gap = dataset.records[i].t - dataset.records[i - 1].t;
    if (std::abs(gap - dt) > 0.1 * dt) {
      throw std::invalid_argument("derive_velocities: non-uniform sampling at row " +
                                  std::to_string(i + 1));
    }
  }

  std::vector<double> xs(n), ys(n), th(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = dataset.records[i].x;
    ys[i] = dataset.records[i].y;
    th[i] = dataset.records[i].theta;
  }
  // unwrap heading before filtering so wrap jumps do not smear
  for (size_t i = 1; i < n; ++i) {
    th[i] = th[i - 1] + wrap_angle(th[i] - th[i - 1]);
  }
  xs = lowpass_sequence(xs, filter_beta);
  ys = lowpass_sequence(ys, filter_beta);
  th = lowpass_sequence(th, filter_beta);

  TerrainDataset out = dataset;
  out.has_velocities = true;
  for (size_t i = 1; i < n; ++i) {
    const double dx = xs[i] - xs[i - 1];
    const double dy = ys[i] - ys[i - 1];
    const double mid = 0.5 * (th[i] + th[i - 1]);
    out.records[i].v = (dx * std::cos(mid) + dy * std::sin(mid)) / dt;
    out.records[i].omega = (th[i] - th[i - 1]) / dt;
  }
  out.records[0].v = out.records[1].v;
  out.records[0].omega = out.records[1].omega;
  return out;
}

}  // namespace sswmr
