#pragma once

#include <vector>

namespace ecgsym {

inline constexpr double kDefaultSampleRate = 360.0;

// Uniformly sampled real-valued waveform.
struct Signal {
  std::vector<double> samples;
  double sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

}  // namespace ecgsym
