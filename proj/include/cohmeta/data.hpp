#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cohmeta {

struct SummaryKey {
  std::string doc_id;
  std::string system_id;

  auto operator<=>(const SummaryKey&) const = default;
};

std::string to_string(const SummaryKey& key);

/// One system summary of one document with its coherence annotations.
struct SummaryRecord {
  std::string doc_id;
  std::string system_id;
  std::string summary_text;  // NFC-normalized at load
  std::vector<double> annotator_scores;

  SummaryKey key() const { return {doc_id, system_id}; }
  double mean_score() const;
};

/// Closed interval of admissible human scores.
struct ScoreRange {
  double lo = 1.0;
  double hi = 5.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Summaries keyed by (document, system) with per-annotator human scores.
///
/// Systems and documents are kept in order of first appearance. The
/// constructor validates every invariant and throws DataError otherwise.
class ScoreDataset {
 public:
  explicit ScoreDataset(std::vector<SummaryRecord> records, ScoreRange range = {},
                        bool require_aligned = false);

  const std::vector<SummaryRecord>& records() const { return records_; }
  const std::vector<std::string>& systems() const { return systems_; }
  const std::vector<std::string>& documents() const { return documents_; }
  const ScoreRange& score_range() const { return range_; }
  std::size_t size() const { return records_.size(); }

  const SummaryRecord* find(const SummaryKey& key) const;

  /// True when every record carries the same number of annotator scores.
  bool aligned_annotators() const { return aligned_; }
  /// Annotator count when aligned, otherwise nullopt.
  std::optional<std::size_t> n_annotators() const;

 private:
  std::vector<SummaryRecord> records_;
  std::vector<std::string> systems_;
  std::vector<std::string> documents_;
  std::map<SummaryKey, std::size_t> index_;
  ScoreRange range_;
  bool aligned_ = true;
};

/// One real score per (document, system) for a named measure.
struct PredictionSet {
  std::string measure_name;
  std::map<SummaryKey, double> scores;

  std::size_t size() const { return scores.size(); }
  /// Throws CoverageError naming the key when absent.
  double at(const SummaryKey& key) const;
};

enum class DatasetFormat { canonical_jsonl, summeval_expert };

DatasetFormat parse_dataset_format(std::string_view name);
std::string_view to_string(DatasetFormat format);

struct LoadOptions {
  ScoreRange range{};
  bool require_aligned = false;
};

ScoreDataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                          const LoadOptions& options = {});
ScoreDataset parse_dataset(std::istream& in, DatasetFormat format, const LoadOptions& options = {},
                           std::string_view source = "<stream>");
/// Canonical JSONL, one record per line in dataset order.
void write_dataset(std::ostream& out, const ScoreDataset& dataset);

/// Prediction files are JSONL: {"doc_id": ..., "system_id": ..., "score": ...}.
PredictionSet load_predictions(const std::filesystem::path& path, std::string measure_name);
PredictionSet parse_predictions(std::istream& in, std::string measure_name,
                                std::string_view source = "<stream>");
void write_predictions(std::ostream& out, const PredictionSet& predictions);

struct HumanAggregation {
  std::optional<std::size_t> exclude_annotator;
};

/// Per-summary mean over annotators, optionally leaving one annotator out.
PredictionSet human_scores(const ScoreDataset& dataset, HumanAggregation aggregation = {});

/// Mean that depends only on the multiset of values and returns x exactly
/// for a constant input.
double stable_mean(std::vector<double> values);

/// Unweighted mean per system over its documents.
std::map<std::string, double> system_means(const PredictionSet& scores, const ScoreDataset& dataset);

/// Throws CoverageError unless `scores` has exactly the dataset's keys.
void require_coverage(const PredictionSet& scores, const ScoreDataset& dataset);
/// Throws CoverageError unless both sets have exactly the same keys.
void require_same_keys(const PredictionSet& a, const PredictionSet& b);

}  // namespace cohmeta
