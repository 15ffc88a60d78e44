#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohmeta/data.hpp"

namespace cohmeta {

/// Which set of pairwise comparisons an evaluation metric considers.
///   system   - pairs of systems, compared by mean score
///   summary  - all pairs of summaries
///   pairwise - pairs of summaries of the same document from different systems
///   intra    - pairs of summaries of the same system on different documents
enum class ComparisonLevel { system, summary, pairwise, intra };
enum class Statistic { tau, accuracy };

/// How per-group results combine when some groups are undefined.
///   propagate             - a group whose predictions are constant makes the
///                           aggregate undefined; groups undefined only because
///                           the human scores are fully tied are skipped
///   skip_undefined_groups - every undefined group is skipped
enum class UndefinedPolicy { propagate, skip_undefined_groups };

/// Bootstrap resampling unit. `by_level` picks systems for the system level,
/// documents within each system for intra, and documents otherwise.
enum class ResampleStrategy { by_level, systems, documents, documents_within_system };

/// Tie handling for pairwise accuracy: pairs with tied human scores are
/// excluded, tied predictions on the remaining pairs count as incorrect.
struct TiePolicy {};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct MetricResult {
  ComparisonLevel level = ComparisonLevel::system;
  Statistic statistic = Statistic::tau;
  std::optional<double> value;  // nullopt: undefined
  std::optional<Interval> ci;
  std::size_t n_units = 0;  // systems, summaries, documents or systems, per level

  bool defined() const { return value.has_value(); }
};

std::string_view to_string(ComparisonLevel level);
std::string_view to_string(Statistic statistic);
std::string_view to_string(UndefinedPolicy policy);
std::string_view to_string(ResampleStrategy strategy);
ComparisonLevel parse_level(std::string_view name);
Statistic parse_statistic(std::string_view name);
UndefinedPolicy parse_policy(std::string_view name);
ResampleStrategy parse_strategy(std::string_view name);

/// Kendall tau-b in O(n log n). Undefined when either input is fully tied.
/// Throws std::invalid_argument on length mismatch or fewer than 2 elements.
std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// Fraction of human-distinct pairs ordered the same way by the predictions.
/// Undefined when every human pair is tied.
std::optional<double> pairwise_accuracy(std::span<const double> human, std::span<const double> pred,
                                        TiePolicy policy = {});

/// Agreement of `pred` with `human` at the given comparison level. Both sets
/// must cover the same keys. Accuracy is only defined for the pairwise level.
MetricResult evaluate(const PredictionSet& human, const PredictionSet& pred, ComparisonLevel level,
                      Statistic statistic = Statistic::tau,
                      UndefinedPolicy policy = UndefinedPolicy::propagate);

struct BootstrapOptions {
  std::size_t n_resamples = 1000;
  std::uint64_t seed = 0;
  ResampleStrategy strategy = ResampleStrategy::by_level;
  UndefinedPolicy policy = UndefinedPolicy::propagate;
  double confidence = 0.95;
};

struct BootstrapResult {
  Interval interval;
  std::size_t n_valid = 0;
  std::size_t n_undefined = 0;
};

/// Percentile bootstrap interval. Resample i draws from an engine seeded by
/// derive_seed(seed, "bootstrap", i). Undefined resample statistics are
/// discarded and counted; throws std::runtime_error if all are undefined.
BootstrapResult bootstrap_ci(const PredictionSet& human, const PredictionSet& pred,
                             ComparisonLevel level, Statistic statistic,
                             const BootstrapOptions& options = {});

/// evaluate() plus a bootstrap interval when the point value is defined.
MetricResult evaluate_with_ci(const PredictionSet& human, const PredictionSet& pred,
                              ComparisonLevel level, Statistic statistic,
                              const BootstrapOptions& options);

struct SystemCorrelation {
  std::string system_id;
  std::optional<double> tau;
  std::optional<Interval> ci;
  std::size_t n_docs = 0;
};

/// Per-system tau-b across documents (the terms averaged by the intra level).
/// When `bootstrap` is set, each system also gets a document-resampled interval.
std::vector<SystemCorrelation> per_system_correlation(
    const PredictionSet& human, const PredictionSet& pred,
    const std::optional<BootstrapOptions>& bootstrap = std::nullopt);

}  // namespace cohmeta
