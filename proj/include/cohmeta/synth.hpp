#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cohmeta/data.hpp"

namespace cohmeta {

struct SynthConfig {
  std::size_t n_systems = 17;
  std::size_t n_docs = 100;
  std::vector<double> system_means;  // one per system
  /// Correlation between human and predicted within-system deviations, in [0, 1].
  double intra_signal = 0.0;
  double noise_sd = 0.75;
  ScoreRange score_range{};
  std::uint64_t seed = 0;
};

struct SynthData {
  ScoreDataset dataset;
  PredictionSet pred;
};

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Human score h = clamp(m_s + delta), prediction p = m_s + a * delta +
/// sqrt(1 - a^2) * eps with delta, eps ~ N(0, noise_sd) and a = intra_signal.
/// Every (document, system) cell draws from its own seed-derived substream.
/// Records carry placeholder summary text and a single annotator score.
SynthData generate_synthetic(const SynthConfig& config);

}  // namespace cohmeta
