#include "cohmeta/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "cohmeta/random.hpp"

namespace cohmeta {

namespace {

std::string padded(char prefix, std::size_t i, std::size_t n) {
  const int width = static_cast<int>(std::max<std::size_t>(2, std::to_string(n - 1).size()));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
  return buf;
}

void validate(const SynthConfig& c) {
  if (c.n_systems < 2) throw std::invalid_argument("n_systems must be at least 2");
  if (c.n_docs < 2) throw std::invalid_argument("n_docs must be at least 2");
  if (c.system_means.size() != c.n_systems) {
    throw std::invalid_argument("system_means has " + std::to_string(c.system_means.size()) +
                                " entries for " + std::to_string(c.n_systems) + " systems");
  }
  if (!(c.intra_signal >= 0.0 && c.intra_signal <= 1.0)) {
    throw std::invalid_argument("intra_signal must lie in [0, 1]");
  }
  if (!(c.noise_sd > 0.0) || !std::isfinite(c.noise_sd)) throw std::invalid_argument("noise_sd must be positive");
  if (!(c.score_range.lo < c.score_range.hi)) throw std::invalid_argument("empty score range");
  for (double m : c.system_means) {
    if (!std::isfinite(m)) throw std::invalid_argument("system means must be finite");
  }
}

}  // namespace

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n, lo);
  for (std::size_t i = 1; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

SynthData generate_synthetic(const SynthConfig& config) {
  validate(config);
  const double a = config.intra_signal;
  const double b = std::sqrt(1.0 - a * a);
  std::vector<SummaryRecord> records;
  PredictionSet pred{"synthetic", {}};
  for (std::size_t d = 0; d < config.n_docs; ++d) {
    const std::string doc = padded('d', d, config.n_docs);
    for (std::size_t s = 0; s < config.n_systems; ++s) {
      const std::string sys = padded('s', s, config.n_systems);
      Engine engine = make_engine(config.seed, "synth", s * config.n_docs + d);
      std::normal_distribution<double> normal(0.0, config.noise_sd);
      const double delta = normal(engine);
      const double eps = normal(engine);
      const double m = config.system_means[s];
      const double h = std::clamp(m + delta, config.score_range.lo, config.score_range.hi);
      records.push_back({doc, sys, "Summary of " + doc + " by " + sys + ".", {h}});
      pred.scores.emplace(SummaryKey{doc, sys}, m + a * delta + b * eps);
    }
  }
  return {ScoreDataset(std::move(records), config.score_range), std::move(pred)};
}

}  // namespace cohmeta
