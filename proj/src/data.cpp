#include "cohmeta/data.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "cohmeta/errors.hpp"
#include "cohmeta/text.hpp"

namespace cohmeta {

using nlohmann::json;

std::string to_string(const SummaryKey& key) { return "(" + key.doc_id + ", " + key.system_id + ")"; }

double SummaryRecord::mean_score() const {
  return std::accumulate(annotator_scores.begin(), annotator_scores.end(), 0.0) /
         static_cast<double>(annotator_scores.size());
}

ScoreDataset::ScoreDataset(std::vector<SummaryRecord> records, ScoreRange range,
                           bool require_aligned)
    : records_(std::move(records)), range_(range) {
  if (records_.empty()) throw DataError("empty dataset");
  if (!(range_.lo <= range_.hi)) throw DataError("invalid score range");

  std::set<std::string> seen_systems;
  std::set<std::string> seen_documents;
  const std::size_t first_count = records_.front().annotator_scores.size();
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.annotator_scores.empty()) {
      throw DataError("record " + to_string(r.key()) + " has no annotator scores");
    }
    for (double s : r.annotator_scores) {
      if (!range_.contains(s)) {
        throw DataError("record " + to_string(r.key()) + " has score " + std::to_string(s) +
                        " outside [" + std::to_string(range_.lo) + ", " +
                        std::to_string(range_.hi) + "]");
      }
    }
    if (!index_.emplace(r.key(), i).second) {
      throw DataError("duplicate (doc, system) key " + to_string(r.key()));
    }
    if (seen_systems.insert(r.system_id).second) systems_.push_back(r.system_id);
    if (seen_documents.insert(r.doc_id).second) documents_.push_back(r.doc_id);
    if (r.annotator_scores.size() != first_count) aligned_ = false;
  }
  if (require_aligned && !aligned_) {
    throw DataError("dataset declared aligned-annotators but annotator counts differ");
  }
}

const SummaryRecord* ScoreDataset::find(const SummaryKey& key) const {
  const auto it = index_.find(key);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::optional<std::size_t> ScoreDataset::n_annotators() const {
  if (!aligned_) return std::nullopt;
  return records_.front().annotator_scores.size();
}

double PredictionSet::at(const SummaryKey& key) const {
  const auto it = scores.find(key);
  if (it == scores.end()) {
    throw CoverageError("measure '" + measure_name + "' has no score for " + to_string(key));
  }
  return it->second;
}

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "canonical-jsonl" || name == "canonical") return DatasetFormat::canonical_jsonl;
  if (name == "summeval-expert" || name == "summeval") return DatasetFormat::summeval_expert;
  throw std::invalid_argument("unknown dataset format '" + std::string(name) + "'");
}

std::string_view to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::canonical_jsonl: return "canonical-jsonl";
    case DatasetFormat::summeval_expert: return "summeval-expert";
  }
  return "?";
}

namespace {

std::string located(std::string_view source, std::size_t line, const std::string& what) {
  return std::string(source) + ":" + std::to_string(line) + ": " + what;
}

const json& require_field(const json& obj, const char* name, std::string_view source,
                          std::size_t line) {
  const auto it = obj.find(name);
  if (it == obj.end()) {
    throw DataError(located(source, line, std::string("missing field '") + name + "'"), line);
  }
  return *it;
}

std::string require_string(const json& obj, const char* name, std::string_view source,
                           std::size_t line) {
  const auto& v = require_field(obj, name, source, line);
  if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
    throw DataError(
        located(source, line, std::string("field '") + name + "' must be a nonempty string"),
        line);
  }
  return v.get<std::string>();
}

double require_number(const json& v, const std::string& what, std::string_view source,
                      std::size_t line) {
  if (!v.is_number()) throw DataError(located(source, line, what + " must be a number"), line);
  return v.get<double>();
}

SummaryRecord parse_canonical(const json& obj, std::string_view source, std::size_t line) {
  SummaryRecord r;
  r.doc_id = require_string(obj, "doc_id", source, line);
  r.system_id = require_string(obj, "system_id", source, line);
  if (const auto it = obj.find("summary_text"); it != obj.end()) {
    if (!it->is_string()) {
      throw DataError(located(source, line, "field 'summary_text' must be a string"), line);
    }
    r.summary_text = it->get<std::string>();
  }
  const auto& scores = require_field(obj, "coherence", source, line);
  if (!scores.is_array() || scores.empty()) {
    throw DataError(located(source, line, "field 'coherence' must be a nonempty array"), line);
  }
  for (const auto& s : scores) {
    r.annotator_scores.push_back(require_number(s, "coherence score", source, line));
  }
  return r;
}

SummaryRecord parse_summeval(const json& obj, std::string_view source, std::size_t line) {
  SummaryRecord r;
  r.doc_id = require_string(obj, "id", source, line);
  r.system_id = require_string(obj, "model_id", source, line);
  const auto& decoded = require_field(obj, "decoded", source, line);
  if (!decoded.is_string()) {
    throw DataError(located(source, line, "field 'decoded' must be a string"), line);
  }
  r.summary_text = decoded.get<std::string>();
  const auto& experts = require_field(obj, "expert_annotations", source, line);
  if (!experts.is_array() || experts.empty()) {
    throw DataError(
        located(source, line, "field 'expert_annotations' must be a nonempty array"), line);
  }
  for (const auto& e : experts) {
    if (!e.is_object()) {
      throw DataError(located(source, line, "expert annotation must be an object"), line);
    }
    r.annotator_scores.push_back(
        require_number(require_field(e, "coherence", source, line), "coherence", source, line));
  }
  return r;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

ScoreDataset parse_dataset(std::istream& in, DatasetFormat format, const LoadOptions& options,
                           std::string_view source) {
  std::vector<SummaryRecord> records;
  std::map<SummaryKey, std::size_t> first_line;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (blank(raw)) continue;
    json obj;
    try {
      obj = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw DataError(located(source, line, std::string("malformed JSON: ") + e.what()), line);
    }
    if (!obj.is_object()) throw DataError(located(source, line, "record must be an object"), line);

    SummaryRecord r = format == DatasetFormat::canonical_jsonl ? parse_canonical(obj, source, line)
                                                               : parse_summeval(obj, source, line);
    try {
      r.summary_text = text::normalize_nfc(r.summary_text);
    } catch (const DataError& e) {
      throw DataError(located(source, line, e.what()), line);
    }
    for (double s : r.annotator_scores) {
      if (!options.range.contains(s)) {
        throw DataError(located(source, line, "score " + std::to_string(s) + " outside range"),
                        line);
      }
    }
    const auto [it, inserted] = first_line.emplace(r.key(), line);
    if (!inserted) {
      throw DataError(located(source, line,
                              "duplicate (doc, system) key " + to_string(r.key()) +
                                  " (first seen on line " + std::to_string(it->second) + ")"),
                      line);
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw DataError(std::string(source) + ": empty dataset");
  return ScoreDataset(std::move(records), options.range, options.require_aligned);
}

ScoreDataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                          const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, format, options, path.string());
}

void write_dataset(std::ostream& out, const ScoreDataset& dataset) {
  for (const auto& r : dataset.records()) {
    json obj = json::object();
    obj["doc_id"] = r.doc_id;
    obj["system_id"] = r.system_id;
    obj["summary_text"] = r.summary_text;
    obj["coherence"] = r.annotator_scores;
    out << obj.dump() << '\n';
  }
}

PredictionSet parse_predictions(std::istream& in, std::string measure_name,
                                std::string_view source) {
  PredictionSet p{std::move(measure_name), {}};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (blank(raw)) continue;
    json obj;
    try {
      obj = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw DataError(located(source, line, std::string("malformed JSON: ") + e.what()), line);
    }
    if (!obj.is_object()) throw DataError(located(source, line, "record must be an object"), line);
    SummaryKey key{require_string(obj, "doc_id", source, line),
                   require_string(obj, "system_id", source, line)};
    const double score = require_number(require_field(obj, "score", source, line), "score",
                                        source, line);
    if (!p.scores.emplace(key, score).second) {
      throw DataError(located(source, line, "duplicate prediction for " + to_string(key)), line);
    }
  }
  if (p.scores.empty()) throw DataError(std::string(source) + ": empty prediction file");
  return p;
}

PredictionSet load_predictions(const std::filesystem::path& path, std::string measure_name) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open prediction file '" + path.string() + "'");
  return parse_predictions(in, std::move(measure_name), path.string());
}

void write_predictions(std::ostream& out, const PredictionSet& predictions) {
  for (const auto& [key, score] : predictions.scores) {
    json obj = json::object();
    obj["doc_id"] = key.doc_id;
    obj["system_id"] = key.system_id;
    obj["score"] = score;
    out << obj.dump() << '\n';
  }
}

PredictionSet human_scores(const ScoreDataset& dataset, HumanAggregation aggregation) {
  PredictionSet out;
  if (!aggregation.exclude_annotator) {
    out.measure_name = "human";
    for (const auto& r : dataset.records()) out.scores.emplace(r.key(), r.mean_score());
    return out;
  }
  const std::size_t excluded = *aggregation.exclude_annotator;
  const auto n = dataset.n_annotators();
  if (!n) throw std::invalid_argument("annotator exclusion requires an aligned-annotators dataset");
  if (excluded >= *n) {
    throw std::out_of_range("annotator index " + std::to_string(excluded) + " out of range (" +
                            std::to_string(*n) + " annotators)");
  }
  if (*n < 2) throw std::invalid_argument("cannot exclude the only annotator");
  out.measure_name = "human-without-" + std::to_string(excluded);
  for (const auto& r : dataset.records()) {
    double sum = 0.0;
    for (std::size_t a = 0; a < r.annotator_scores.size(); ++a) {
      if (a != excluded) sum += r.annotator_scores[a];
    }
    out.scores.emplace(r.key(), sum / static_cast<double>(*n - 1));
  }
  return out;
}

double stable_mean(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("mean of no values");
  std::sort(values.begin(), values.end());
  const double base = values.front();
  double offset = 0.0;
  for (double v : values) offset += v - base;
  return base + offset / static_cast<double>(values.size());
}

std::map<std::string, double> system_means(const PredictionSet& scores,
                                           const ScoreDataset& dataset) {
  std::map<std::string, std::vector<double>> by_system;
  for (const auto& r : dataset.records()) by_system[r.system_id].push_back(scores.at(r.key()));
  std::map<std::string, double> means;
  for (auto& [system, values] : by_system) means.emplace(system, stable_mean(std::move(values)));
  return means;
}

void require_coverage(const PredictionSet& scores, const ScoreDataset& dataset) {
  for (const auto& r : dataset.records()) {
    if (!scores.scores.contains(r.key())) {
      throw CoverageError("measure '" + scores.measure_name + "' has no score for " +
                          to_string(r.key()));
    }
  }
  for (const auto& [key, value] : scores.scores) {
    if (dataset.find(key) == nullptr) {
      throw CoverageError("measure '" + scores.measure_name + "' scores unknown summary " +
                          to_string(key));
    }
  }
}

void require_same_keys(const PredictionSet& a, const PredictionSet& b) {
  for (const auto& [key, value] : a.scores) {
    if (!b.scores.contains(key)) {
      throw CoverageError("measure '" + b.measure_name + "' has no score for " + to_string(key));
    }
  }
  for (const auto& [key, value] : b.scores) {
    if (!a.scores.contains(key)) {
      throw CoverageError("measure '" + a.measure_name + "' has no score for " + to_string(key));
    }
  }
}

}  // namespace cohmeta
