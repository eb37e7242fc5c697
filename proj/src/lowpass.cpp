#include "sswmr/lowpass.hpp"

namespace sswmr {

std::vector<double> lowpass_sequence(const std::vector<double>& samples, double beta) {
  LowPassFilter filter(beta);
  std::vector<double> out;
  out.reserve(samples.size());
  for (double s : samples) out.push_back(filter.step(s));
  return out;
}

}  // namespace sswmr
