#ifndef SSWMR_LOWPASS_HPP
#define SSWMR_LOWPASS_HPP

#include <stdexcept>
#include <vector>

namespace sswmr {

/// First-order exponential smoother y_k = beta*x_k + (1-beta)*y_{k-1}.
/// The first sample passes through unchanged.
class LowPassFilter {
 public:
  explicit LowPassFilter(double beta) : beta_(beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
      throw std::invalid_argument("LowPassFilter: beta must be in (0, 1]");
    }
  }

  double step(double sample) {
    if (!primed_) {
      state_ = sample;
      primed_ = true;
    } else {
      state_ = beta_ * sample + (1.0 - beta_) * state_;
    }
    return state_;
  }

  double beta() const { return beta_; }

  void reset() { primed_ = false; }

 private:
  double beta_;
  double state_ = 0.0;
  bool primed_ = false;
};

/// Filters a whole sequence with a fresh filter.
std::vector<double> lowpass_sequence(const std::vector<double>& samples, double beta);

}  // namespace sswmr

#endif  // SSWMR_LOWPASS_HPP
