#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cohmeta {

struct Document {
  std::string id;
  std::vector<std::string> sentences;
};

/// Corpus JSONL: {"doc_id": ..., "sentences": [...]} or {"doc_id": ..., "text": ...};
/// plain text is split with text::split_sentences.
std::vector<Document> load_corpus(const std::filesystem::path& path);
std::vector<Document> parse_corpus(std::istream& in, std::string_view source = "<stream>");

/// True when at least two distinct sentence orders exist.
bool shuffleable(const std::vector<std::string>& sentences);

/// Uniform random permutation, redrawn until it differs from the input order.
/// Throws std::invalid_argument when no distinct order exists.
std::vector<std::string> shuffle_sentences(const std::vector<std::string>& sentences,
                                           std::uint64_t seed);

/// An original document paired with a shuffled one. length_delta is the
/// character length of the positive minus that of the negative, both
/// measured on the space-joined sentences.
struct ShufflePair {
  std::string positive_id;
  std::string negative_id;
  std::vector<std::string> positive_text;
  std::vector<std::string> negative_text;
  std::int64_t length_delta = 0;
};

enum class ShuffleMode { same_doc, cross_doc };
ShuffleMode parse_shuffle_mode(std::string_view name);

struct ShuffleOptions {
  ShuffleMode mode = ShuffleMode::same_doc;
  std::size_t k_per_doc = 1;
  std::size_t n_pairs = 10000;
  /// same-doc: number of originals drawn without replacement from the
  /// shuffleable documents; all of them when unset.
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;
};

/// same-doc: k_per_doc shuffles of each sampled original.
/// cross-doc: n_pairs pairs (original A, shuffle of B), A != B, drawn uniformly
/// with replacement.
std::vector<ShufflePair> make_shuffle_pairs(const std::vector<Document>& corpus,
                                            const ShuffleOptions& options);

struct Bucketing {
  std::int64_t bucket_width = 20;
  std::int64_t clamp = 200;
};

struct BucketAccuracy {
  std::int64_t lower = 0;  // inclusive; the top bucket holds only the clamp value
  std::int64_t upper = 0;  // exclusive
  std::size_t n_pairs = 0;
  std::size_t n_correct = 0;
  std::optional<double> accuracy;
};

struct PairAccuracy {
  double accuracy = 0.0;
  std::size_t n_pairs = 0;
  std::size_t n_correct = 0;
  std::vector<BucketAccuracy> buckets;  // empty unless bucketing was requested
};

/// Bucket index of a length difference: floor(clamp(delta) / width), offset so
/// the lowest bucket is 0.
std::size_t bucket_index(std::int64_t length_delta, const Bucketing& bucketing);

/// A pair is correct iff score(positive) > score(negative); ties are incorrect.
/// Throws CoverageError naming the first variant without a score.
PairAccuracy pair_accuracy(const std::vector<ShufflePair>& pairs,
                           const std::map<std::string, double>& scores,
                           const std::optional<Bucketing>& bucketing = std::nullopt);

/// Pair file: one {"positive_id", "negative_id", "length_delta"} per line.
void write_pairs(std::ostream& out, const std::vector<ShufflePair>& pairs);
/// Variant file: one {"variant_id", "text", "sentences"} per distinct variant,
/// in order of first appearance. External scorers read this file.
void export_variants(std::ostream& out, const std::vector<ShufflePair>& pairs);
/// Reads a pair file and its variant file back into pairs with texts.
std::vector<ShufflePair> read_pairs(std::istream& pairs_in, std::istream& variants_in);

/// Distinct variant ids in first-appearance order.
std::vector<std::string> variant_ids(const std::vector<ShufflePair>& pairs);

struct VariantScores {
  std::vector<std::string> order;  // as listed in the score file
  std::map<std::string, double> scores;
};

/// Score file: one {"variant_id", "score"} per line. Throws DataError for ids
/// not in `expected_ids` and CoverageError naming any expected id left unscored.
VariantScores ingest_pair_scores(std::istream& in, const std::vector<std::string>& expected_ids,
                                 std::string_view source = "<stream>");
VariantScores ingest_pair_scores(const std::filesystem::path& path,
                                 const std::vector<std::string>& expected_ids);
void write_pair_scores(std::ostream& out, const VariantScores& scores);

}  // namespace cohmeta
