#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cohmeta/data.hpp"
#include "cohmeta/rank_stats.hpp"
#include "cohmeta/report.hpp"

namespace cohmeta {

/// Named component score sets over identical keys, in display order.
class ComponentSet {
 public:
  /// Throws std::invalid_argument when empty or names repeat, CoverageError
  /// when key sets differ.
  explicit ComponentSet(std::vector<std::pair<std::string, PredictionSet>> components);

  std::size_t size() const { return components_.size(); }
  const std::string& name(std::size_t i) const { return components_[i].first; }
  const PredictionSet& scores(std::size_t i) const { return components_[i].second; }

  /// Per-key sum of components i and j.
  PredictionSet combined(std::size_t i, std::size_t j) const;

 private:
  std::vector<std::pair<std::string, PredictionSet>> components_;
};

/// Upper-triangular table: cell (i, i) evaluates component i alone, cell
/// (i, j) with i < j evaluates the per-key sum of components i and j. Cells
/// below the diagonal are nullopt.
struct AblationReport {
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> values;
  bool below_diagonal(std::size_t i, std::size_t j) const { return j < i; }
  report::Table to_table(int precision) const;
};

AblationReport ablation_report(const PredictionSet& human, const ComponentSet& components,
                               ComparisonLevel level = ComparisonLevel::system,
                               Statistic statistic = Statistic::tau,
                               UndefinedPolicy policy = UndefinedPolicy::propagate);

}  // namespace cohmeta
