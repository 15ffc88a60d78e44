#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cohmeta/data.hpp"
#include "cohmeta/rank_stats.hpp"

namespace cohmeta::detail {

struct PairedEntry {
  std::size_t doc;
  std::size_t sys;
  double human;
  double pred;
};

/// Human and predicted scores joined on (document, system), with documents and
/// systems replaced by dense indices. Resampling produces new tables whose
/// indices no longer correspond to the original labels.
struct PairedTable {
  std::size_t n_docs = 0;
  std::size_t n_systems = 0;
  std::vector<PairedEntry> entries;
  std::vector<std::string> doc_labels;
  std::vector<std::string> system_labels;
};

PairedTable make_paired_table(const PredictionSet& human, const PredictionSet& pred);

MetricResult evaluate_table(const PairedTable& table, ComparisonLevel level, Statistic statistic,
                            UndefinedPolicy policy);

/// Entry indices grouped by system (by_system = true) or by document.
std::vector<std::vector<std::size_t>> group_entries(const PairedTable& table, bool by_system);

}  // namespace cohmeta::detail
