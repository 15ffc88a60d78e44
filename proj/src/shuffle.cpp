#include "cohmeta/shuffle.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cohmeta/errors.hpp"
#include "cohmeta/random.hpp"
#include "cohmeta/text.hpp"

namespace cohmeta {

using nlohmann::json;

namespace {

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

json parse_line(const std::string& raw, std::string_view source, std::size_t line) {
  try {
    json obj = json::parse(raw);
    if (!obj.is_object()) throw DataError(std::string(source) + ":" + std::to_string(line) + ": record must be an object", line);
    return obj;
  } catch (const json::parse_error& e) {
    throw DataError(std::string(source) + ":" + std::to_string(line) + ": malformed JSON: " + e.what(), line);
  }
}

std::string string_field(const json& obj, const char* name, std::string_view source, std::size_t line) {
  const auto it = obj.find(name);
  if (it == obj.end() || !it->is_string()) {
    throw DataError(std::string(source) + ":" + std::to_string(line) + ": missing string field '" + name + "'", line);
  }
  return it->get<std::string>();
}

}  // namespace

std::vector<Document> parse_corpus(std::istream& in, std::string_view source) {
  std::vector<Document> corpus;
  std::set<std::string> ids;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (blank(raw)) continue;
    const json obj = parse_line(raw, source, line);
    Document doc;
    doc.id = string_field(obj, "doc_id", source, line);
    if (const auto it = obj.find("sentences"); it != obj.end()) {
      if (!it->is_array()) {
        throw DataError(std::string(source) + ":" + std::to_string(line) + ": 'sentences' must be an array", line);
      }
      for (const auto& s : *it) {
        if (!s.is_string()) {
          throw DataError(std::string(source) + ":" + std::to_string(line) + ": sentence must be a string", line);
        }
        doc.sentences.push_back(text::normalize_nfc(s.get<std::string>()));
      }
    } else {
      doc.sentences = text::split_sentences(text::normalize_nfc(string_field(obj, "text", source, line)));
    }
    if (doc.sentences.empty()) {
      throw DataError(std::string(source) + ":" + std::to_string(line) + ": document has no sentences", line);
    }
    if (!ids.insert(doc.id).second) {
      throw DataError(std::string(source) + ":" + std::to_string(line) + ": duplicate doc_id '" + doc.id + "'", line);
    }
    corpus.push_back(std::move(doc));
  }
  if (corpus.empty()) throw DataError(std::string(source) + ": empty corpus");
  return corpus;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus '" + path.string() + "'");
  return parse_corpus(in, path.string());
}

bool shuffleable(const std::vector<std::string>& sentences) {
  return std::adjacent_find(sentences.begin(), sentences.end(), std::not_equal_to<>()) != sentences.end();
}

std::vector<std::string> shuffle_sentences(const std::vector<std::string>& sentences,
                                           std::uint64_t seed) {
  if (!shuffleable(sentences)) {
    throw std::invalid_argument("no distinct sentence order exists for this document");
  }
  Engine engine = make_engine(seed, "shuffle");
  std::vector<std::string> out = sentences;
  do {
    std::shuffle(out.begin(), out.end(), engine);
  } while (out == sentences);
  return out;
}

ShuffleMode parse_shuffle_mode(std::string_view name) {
  if (name == "same-doc") return ShuffleMode::same_doc;
  if (name == "cross-doc") return ShuffleMode::cross_doc;
  throw std::invalid_argument("unknown shuffle mode '" + std::string(name) + "'");
}

namespace {

std::int64_t text_length(const std::vector<std::string>& sentences) {
  return static_cast<std::int64_t>(text::char_length(text::join_sentences(sentences)));
}

ShufflePair make_pair(const Document& positive, const Document& source, std::string negative_id,
                      std::uint64_t seed) {
  ShufflePair p;
  p.positive_id = "orig:" + positive.id;
  p.negative_id = std::move(negative_id);
  p.positive_text = positive.sentences;
  p.negative_text = shuffle_sentences(source.sentences, seed);
  p.length_delta = text_length(p.positive_text) - text_length(p.negative_text);
  return p;
}

std::size_t draw(Engine& engine, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine);
}

}  // namespace

std::vector<ShufflePair> make_shuffle_pairs(const std::vector<Document>& corpus,
                                            const ShuffleOptions& options) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (shuffleable(corpus[i].sentences)) pool.push_back(i);
  }
  if (pool.empty()) throw std::invalid_argument("insufficient corpus: no shuffleable documents");

  std::vector<ShufflePair> pairs;
  if (options.mode == ShuffleMode::same_doc) {
    if (options.k_per_doc == 0) throw std::invalid_argument("k_per_doc must be positive");
    std::vector<std::size_t> chosen = pool;
    if (options.sample_size) {
      if (*options.sample_size > pool.size()) {
        throw std::invalid_argument("insufficient corpus: " + std::to_string(pool.size()) +
                                    " shuffleable documents, " + std::to_string(*options.sample_size) +
                                    " requested");
      }
      Engine engine = make_engine(options.seed, "sample");
      std::shuffle(chosen.begin(), chosen.end(), engine);
      chosen.resize(*options.sample_size);
    }
    for (std::size_t idx : chosen) {
      const Document& doc = corpus[idx];
      for (std::size_t k = 0; k < options.k_per_doc; ++k) {
        pairs.push_back(make_pair(doc, doc, "shuf:" + doc.id + ":" + std::to_string(k),
                                  derive_seed(options.seed, "shuffle:" + doc.id, k)));
      }
    }
    return pairs;
  }

  if (corpus.size() < 2) throw std::invalid_argument("insufficient corpus: cross-doc needs 2 documents");
  if (pool.size() == 1 && corpus.size() == 1) throw std::invalid_argument("insufficient corpus");
  Engine engine = make_engine(options.seed, "cross-doc");
  for (std::size_t i = 0; i < options.n_pairs; ++i) {
    std::size_t a = 0;
    std::size_t b = 0;
    do {
      a = draw(engine, corpus.size());
      b = pool[draw(engine, pool.size())];
    } while (a == b);
    pairs.push_back(make_pair(corpus[a], corpus[b],
                              "xshuf:" + std::to_string(i) + ":" + corpus[b].id,
                              derive_seed(options.seed, "cross-shuffle", i)));
  }
  return pairs;
}

std::size_t bucket_index(std::int64_t length_delta, const Bucketing& b) {
  if (b.bucket_width <= 0 || b.clamp <= 0) throw std::invalid_argument("bucket width and clamp must be positive");
  auto floor_div = [](std::int64_t x, std::int64_t w) {
    return x >= 0 ? x / w : -((-x + w - 1) / w);
  };
  const std::int64_t c = std::clamp(length_delta, -b.clamp, b.clamp);
  return static_cast<std::size_t>(floor_div(c, b.bucket_width) - floor_div(-b.clamp, b.bucket_width));
}

PairAccuracy pair_accuracy(const std::vector<ShufflePair>& pairs,
                           const std::map<std::string, double>& scores,
                           const std::optional<Bucketing>& bucketing) {
  if (pairs.empty()) throw std::invalid_argument("no pairs to score");
  auto score_of = [&](const std::string& id) {
    const auto it = scores.find(id);
    if (it == scores.end()) throw CoverageError("no score for variant '" + id + "'");
    return it->second;
  };

  PairAccuracy out;
  if (bucketing) {
    const std::int64_t w = bucketing->bucket_width;
    const std::size_t n_buckets = bucket_index(bucketing->clamp, *bucketing) + 1;
    // Lower bound of bucket 0 is floor(-clamp / w) * w.
    const std::int64_t lowest = -((bucketing->clamp + w - 1) / w) * w;
    for (std::size_t k = 0; k < n_buckets; ++k) {
      BucketAccuracy bucket;
      bucket.lower = lowest + static_cast<std::int64_t>(k) * w;
      bucket.upper = bucket.lower + w;
      out.buckets.push_back(bucket);
    }
  }
  for (const auto& p : pairs) {
    const bool correct = score_of(p.positive_id) > score_of(p.negative_id);
    ++out.n_pairs;
    if (correct) ++out.n_correct;
    if (bucketing) {
      auto& bucket = out.buckets[bucket_index(p.length_delta, *bucketing)];
      ++bucket.n_pairs;
      if (correct) ++bucket.n_correct;
    }
  }
  out.accuracy = static_cast<double>(out.n_correct) / static_cast<double>(out.n_pairs);
  for (auto& bucket : out.buckets) {
    if (bucket.n_pairs > 0) {
      bucket.accuracy = static_cast<double>(bucket.n_correct) / static_cast<double>(bucket.n_pairs);
    }
  }
  return out;
}

void write_pairs(std::ostream& out, const std::vector<ShufflePair>& pairs) {
  for (const auto& p : pairs) {
    json obj = json::object();
    obj["positive_id"] = p.positive_id;
    obj["negative_id"] = p.negative_id;
    obj["length_delta"] = p.length_delta;
    out << obj.dump() << '\n';
  }
}

void export_variants(std::ostream& out, const std::vector<ShufflePair>& pairs) {
  std::set<std::string> seen;
  auto emit = [&](const std::string& id, const std::vector<std::string>& sentences) {
    if (!seen.insert(id).second) return;
    json obj = json::object();
    obj["variant_id"] = id;
    obj["text"] = text::join_sentences(sentences);
    obj["sentences"] = sentences;
    out << obj.dump() << '\n';
  };
  for (const auto& p : pairs) {
    emit(p.positive_id, p.positive_text);
    emit(p.negative_id, p.negative_text);
  }
}

std::vector<ShufflePair> read_pairs(std::istream& pairs_in, std::istream& variants_in) {
  std::map<std::string, std::vector<std::string>> variants;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(variants_in, raw)) {
    ++line;
    if (blank(raw)) continue;
    const json obj = parse_line(raw, "variants", line);
    const std::string id = string_field(obj, "variant_id", "variants", line);
    std::vector<std::string> sentences;
    if (const auto it = obj.find("sentences"); it != obj.end() && it->is_array()) {
      sentences = it->get<std::vector<std::string>>();
    } else {
      sentences = text::split_sentences(string_field(obj, "text", "variants", line));
    }
    variants[id] = std::move(sentences);
  }

  std::vector<ShufflePair> pairs;
  line = 0;
  while (std::getline(pairs_in, raw)) {
    ++line;
    if (blank(raw)) continue;
    const json obj = parse_line(raw, "pairs", line);
    ShufflePair p;
    p.positive_id = string_field(obj, "positive_id", "pairs", line);
    p.negative_id = string_field(obj, "negative_id", "pairs", line);
    const auto delta = obj.find("length_delta");
    if (delta == obj.end() || !delta->is_number_integer()) {
      throw DataError("pairs:" + std::to_string(line) + ": missing integer 'length_delta'", line);
    }
    p.length_delta = delta->get<std::int64_t>();
    for (const auto* id : {&p.positive_id, &p.negative_id}) {
      const auto it = variants.find(*id);
      if (it == variants.end()) {
        throw DataError("pairs:" + std::to_string(line) + ": variant '" + *id + "' not in variant file", line);
      }
      (id == &p.positive_id ? p.positive_text : p.negative_text) = it->second;
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<std::string> variant_ids(const std::vector<ShufflePair>& pairs) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& p : pairs) {
    if (seen.insert(p.positive_id).second) ids.push_back(p.positive_id);
    if (seen.insert(p.negative_id).second) ids.push_back(p.negative_id);
  }
  return ids;
}

VariantScores ingest_pair_scores(std::istream& in, const std::vector<std::string>& expected_ids,
                                 std::string_view source) {
  const std::set<std::string> expected(expected_ids.begin(), expected_ids.end());
  VariantScores out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (blank(raw)) continue;
    const json obj = parse_line(raw, source, line);
    const std::string id = string_field(obj, "variant_id", source, line);
    const auto score = obj.find("score");
    if (score == obj.end() || !score->is_number()) {
      throw DataError(std::string(source) + ":" + std::to_string(line) + ": missing numeric 'score'", line);
    }
    if (!expected.contains(id)) {
      throw DataError(std::string(source) + ":" + std::to_string(line) + ": unknown variant_id '" + id + "'", line);
    }
    if (!out.scores.emplace(id, score->get<double>()).second) {
      throw DataError(std::string(source) + ":" + std::to_string(line) + ": duplicate variant_id '" + id + "'", line);
    }
    out.order.push_back(id);
  }
  for (const auto& id : expected_ids) {
    if (!out.scores.contains(id)) throw CoverageError("no score for variant '" + id + "'");
  }
  return out;
}

VariantScores ingest_pair_scores(const std::filesystem::path& path,
                                 const std::vector<std::string>& expected_ids) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open score file '" + path.string() + "'");
  return ingest_pair_scores(in, expected_ids, path.string());
}

void write_pair_scores(std::ostream& out, const VariantScores& scores) {
  for (const auto& id : scores.order) {
    json obj = json::object();
    obj["variant_id"] = id;
    obj["score"] = scores.scores.at(id);
    out << obj.dump() << '\n';
  }
}

}  // namespace cohmeta
