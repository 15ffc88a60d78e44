#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cohmeta/data.hpp"
#include "cohmeta/rank_stats.hpp"
#include "cohmeta/report.hpp"

namespace cohmeta {

/// Number of uppercase (Unicode Lu) letters in the summary.
struct Capitalization {};
/// 1 for summaries of the listed systems, 0 otherwise.
struct Indicator {
  std::set<std::string> systems;
};
/// Mean human score of the producing system.
struct UpperBound {};
/// Seeded i.i.d. uniform(0, 1).
struct RandomUniform {};

using ConfounderKind = std::variant<Capitalization, Indicator, UpperBound, RandomUniform>;

inline constexpr double kDefaultEpsilon = 1e-6;

/// SummEval model ids of the five summarizers built on pretrained
/// transformers: T5 (M17), GPT-2 zero-shot (M20), BART (M22), Pegasus (M23)
/// and Pegasus dynamic mix (M23_dynamicmix).
const std::set<std::string>& summeval_transformer_systems();

PredictionSet confounder_scores(const ScoreDataset& dataset, const ConfounderKind& kind,
                                std::uint64_t seed = 0);

/// Adds i.i.d. uniform(0, epsilon) noise (open interval) to every score.
PredictionSet randomize(const PredictionSet& pred, double epsilon, std::uint64_t seed);

struct ConfounderReportOptions {
  std::size_t n_runs = 100;
  std::uint64_t seed = 0;
  double epsilon = kDefaultEpsilon;
  std::set<std::string> architecture_systems = summeval_transformer_systems();
  UndefinedPolicy policy = UndefinedPolicy::propagate;
};

/// Rows tau_sys, tau_sum, tau_pair, Acc_pair, tau_intra; columns Cap, Cap (r),
/// Arch, Arch (r), UB, UB (r). The (r) columns average over n_runs noise seeds.
struct ConfounderReport {
  std::vector<std::string> columns;
  std::vector<std::string> rows;
  std::vector<std::vector<std::optional<double>>> values;  // [row][column]

  std::optional<double> at(std::string_view row, std::string_view column) const;
  report::Table to_table(int precision) const;
};

ConfounderReport confounder_report(const ScoreDataset& dataset,
                                   const ConfounderReportOptions& options = {});

/// Worst annotator against the mean of the remaining annotators.
struct HumanBaseline {
  PredictionSet pred;
  PredictionSet target;
  std::size_t selected_annotator = 0;
  std::vector<std::optional<double>> annotator_tau;  // summary-level tau per annotator
};

HumanBaseline human_baseline(const ScoreDataset& dataset);

/// The five metric rows used by the confounder report and the evaluate command.
struct MetricDef {
  std::string name;
  ComparisonLevel level;
  Statistic statistic;
};
const std::vector<MetricDef>& standard_metrics();

}  // namespace cohmeta
