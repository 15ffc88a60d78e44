#include "cohmeta/entity.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "cohmeta/confounders.hpp"
#include "cohmeta/errors.hpp"
#include "cohmeta/text.hpp"

namespace cohmeta {

EntityGrid::EntityGrid(std::vector<std::string> entities, std::vector<std::vector<Role>> roles,
                       std::size_t n_sentences)
    : entities_(std::move(entities)), roles_(std::move(roles)), n_sentences_(n_sentences) {
  if (n_sentences_ == 0) throw DataError("entity grid needs at least one sentence");
  if (entities_.size() != roles_.size()) throw DataError("entity labels and role rows differ in count");
  for (std::size_t e = 0; e < roles_.size(); ++e) {
    if (roles_[e].size() != n_sentences_) {
      throw DataError("entity '" + entities_[e] + "' has " + std::to_string(roles_[e].size()) +
                      " roles, expected " + std::to_string(n_sentences_));
    }
    if (std::all_of(roles_[e].begin(), roles_[e].end(), [](Role r) { return r == Role::absent; })) {
      throw DataError("entity '" + entities_[e] + "' is never mentioned");
    }
  }
}

namespace {

Role parse_role(std::string_view s, std::size_t line) {
  if (s == "S") return Role::subject;
  if (s == "O") return Role::object;
  if (s == "X") return Role::other;
  if (s == "-") return Role::absent;
  throw DataError("line " + std::to_string(line) + ": unknown role symbol '" + std::string(s) + "'",
                  line);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

EntityGrid parse_entity_grid(std::string_view tsv) {
  std::vector<std::string> entities;
  std::vector<std::vector<Role>> roles;
  std::optional<std::size_t> declared;
  std::optional<std::size_t> width;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= tsv.size()) {
    const std::size_t nl = tsv.find('\n', pos);
    std::string_view line = tsv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? tsv.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "# sentences=";
      if (line.starts_with(key)) {
        try {
          declared = std::stoul(std::string(line.substr(key.size())));
        } catch (const std::exception&) {
          throw DataError("line " + std::to_string(line_no) + ": bad sentence count", line_no);
        }
      }
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.front().empty()) {
      throw DataError("line " + std::to_string(line_no) + ": expected label and role columns", line_no);
    }
    if (width && fields.size() - 1 != *width) {
      throw DataError("line " + std::to_string(line_no) + ": ragged row (" +
                          std::to_string(fields.size() - 1) + " roles, expected " +
                          std::to_string(*width) + ")",
                      line_no);
    }
    width = fields.size() - 1;
    std::vector<Role> row;
    for (std::size_t k = 1; k < fields.size(); ++k) row.push_back(parse_role(fields[k], line_no));
    if (std::all_of(row.begin(), row.end(), [](Role r) { return r == Role::absent; })) {
      throw DataError("line " + std::to_string(line_no) + ": entity '" + std::string(fields.front()) +
                          "' is never mentioned",
                      line_no);
    }
    entities.emplace_back(fields.front());
    roles.push_back(std::move(row));
  }
  if (declared && width && *declared != *width) {
    throw DataError("declared sentence count " + std::to_string(*declared) +
                    " does not match row width " + std::to_string(*width));
  }
  if (!declared && !width) throw DataError("empty entity grid without a sentence count");
  return EntityGrid(std::move(entities), std::move(roles), declared ? *declared : *width);
}

std::string serialize_entity_grid(const EntityGrid& grid) {
  std::string out = "# sentences=" + std::to_string(grid.n_sentences()) + "\n";
  for (std::size_t e = 0; e < grid.n_entities(); ++e) {
    out += grid.entities()[e];
    for (Role r : grid.roles()[e]) {
      out += '\t';
      out += static_cast<char>(r);
    }
    out += '\n';
  }
  return out;
}

namespace {

constexpr std::string_view kStopwords[] = {
    "a",         "about",   "above",   "after",   "again",    "against", "all",     "also",
    "am",        "an",      "and",     "any",     "are",      "as",      "at",      "be",
    "because",   "been",    "before",  "being",   "below",    "between", "both",    "but",
    "by",        "can",     "could",   "did",     "do",       "does",    "doing",   "down",
    "during",    "each",    "either",  "even",    "ever",     "every",   "few",     "for",
    "from",      "further", "had",     "has",     "have",     "having",  "he",      "her",
    "here",      "hers",    "herself", "him",     "himself",  "his",     "how",     "however",
    "i",         "if",      "in",      "into",    "is",       "it",      "its",     "itself",
    "just",      "last",    "least",   "less",    "like",     "many",    "may",     "me",
    "might",     "more",    "most",    "much",    "must",     "my",      "myself",  "neither",
    "no",        "nor",     "not",     "now",     "of",       "off",     "on",      "once",
    "one",       "only",    "or",      "other",   "our",      "ours",    "ourselves", "out",
    "over",      "own",     "per",     "said",    "same",     "say",     "says",    "she",
    "should",    "since",   "so",      "some",    "still",    "such",    "than",    "that",
    "the",       "their",   "theirs",  "them",    "themselves", "then",  "there",   "these",
    "they",      "this",    "those",   "though",  "through",  "to",      "too",     "under",
    "until",     "up",      "upon",    "us",      "very",     "was",     "we",      "were",
    "what",      "when",    "where",   "whether", "which",    "while",   "who",     "whom",
    "whose",     "why",     "will",    "with",    "within",   "without", "would",   "yet",
    "you",       "your",    "yours",   "yourself", "yourselves", "'s",   "s",       "n't",
    "would've"};

struct Mention {
  std::set<std::size_t> sentences;
  std::pair<std::size_t, std::size_t> first{SIZE_MAX, SIZE_MAX};
  bool capitalized = false;

  void add(std::size_t sentence, std::size_t position, bool cap) {
    sentences.insert(sentence);
    first = std::min(first, std::make_pair(sentence, position));
    capitalized = capitalized || cap;
  }
};

}  // namespace

bool is_stopword(std::string_view lowercase_token) {
  return std::find(std::begin(kStopwords), std::end(kStopwords), lowercase_token) != std::end(kStopwords);
}

EntityGrid detect_entities(const std::vector<std::vector<std::string>>& sentences) {
  if (sentences.empty()) throw std::invalid_argument("entity detection needs at least one sentence");

  std::map<std::string, Mention> mentions;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    std::vector<std::string> run;
    std::size_t run_start = 0;
    std::size_t content_index = 0;

    auto close_run = [&] {
      if (run.empty()) return;
      if (run.size() == 1 && run_start == 0) {
        const std::string lower = text::to_lower(run.front());
        mentions[lower].add(s, run_start, false);
      } else {
        std::string label;
        for (const auto& t : run) {
          if (!label.empty()) label += ' ';
          label += text::to_lower(t);
        }
        mentions[label].add(s, run_start, true);
      }
      run.clear();
    };

    for (const auto& raw : sentences[s]) {
      const std::string token = text::strip_punct(raw);
      if (token.empty() || !text::has_alnum(token)) {
        close_run();
        continue;
      }
      const std::size_t position = content_index++;
      const std::string lower = text::to_lower(token);
      const bool stop = is_stopword(lower);
      if (text::starts_uppercase(token) && !stop) {
        if (run.empty()) run_start = position;
        run.push_back(token);
        // Trailing punctuation ("York,") ends the run.
        if (!std::string_view(raw).ends_with(token)) close_run();
        continue;
      }
      close_run();
      if (!stop) mentions[lower].add(s, position, false);
    }
    close_run();
  }

  std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::string>> order;
  for (const auto& [label, m] : mentions) {
    if (m.capitalized || m.sentences.size() >= 2) order.emplace_back(m.first, label);
  }
  std::sort(order.begin(), order.end());

  std::vector<std::string> entities;
  std::vector<std::vector<Role>> roles;
  for (const auto& [first, label] : order) {
    std::vector<Role> row(sentences.size(), Role::absent);
    for (std::size_t s : mentions.at(label).sentences) row[s] = Role::other;
    entities.push_back(label);
    roles.push_back(std::move(row));
  }
  return EntityGrid(std::move(entities), std::move(roles), sentences.size());
}

EntityGrid detect_entities_in_text(std::string_view text) {
  std::vector<std::vector<std::string>> tokenized;
  for (const auto& sentence : text::split_sentences(text)) tokenized.push_back(text::tokenize(sentence));
  return detect_entities(tokenized);
}

EdgeWeighting parse_weighting(std::string_view name) {
  if (name == "unweighted") return EdgeWeighting::unweighted;
  if (name == "shared-count") return EdgeWeighting::shared_count;
  if (name == "role-product" || name == "pacc") return EdgeWeighting::role_product;
  throw std::invalid_argument("unknown edge weighting '" + std::string(name) + "'");
}

namespace {

double role_weight(Role r, const EntityGraphConfig& c) {
  switch (r) {
    case Role::subject: return c.subject_weight;
    case Role::object: return c.object_weight;
    case Role::other: return c.other_weight;
    case Role::absent: return 0.0;
  }
  return 0.0;
}

bool linked(const EntityGrid& grid, std::size_t i, std::size_t j) {
  for (std::size_t e = 0; e < grid.n_entities(); ++e) {
    if (grid.role(e, i) != Role::absent && grid.role(e, j) != Role::absent) return true;
  }
  return false;
}

}  // namespace

double entity_graph_edge(const EntityGrid& grid, std::size_t i, std::size_t j,
                         const EntityGraphConfig& config) {
  if (!(config.subject_weight > 0 && config.object_weight > 0 && config.other_weight > 0)) {
    throw std::invalid_argument("role weights must be positive");
  }
  if (!(i < j && j < grid.n_sentences())) throw std::out_of_range("edge needs i < j < n_sentences");
  double weight = 0.0;
  for (std::size_t e = 0; e < grid.n_entities(); ++e) {
    const Role a = grid.role(e, i);
    const Role b = grid.role(e, j);
    if (a == Role::absent || b == Role::absent) continue;
    switch (config.weighting) {
      case EdgeWeighting::unweighted: weight = 1.0; break;
      case EdgeWeighting::shared_count: weight += 1.0; break;
      case EdgeWeighting::role_product: weight += role_weight(a, config) * role_weight(b, config); break;
    }
  }
  if (config.distance_penalty) weight /= static_cast<double>(j - i);
  return weight;
}

double entity_graph_score(const EntityGrid& grid, const EntityGraphConfig& config) {
  double total = 0.0;
  for (std::size_t i = 0; i < grid.n_sentences(); ++i) {
    for (std::size_t j = i + 1; j < grid.n_sentences(); ++j) total += entity_graph_edge(grid, i, j, config);
  }
  return total / static_cast<double>(grid.n_sentences());
}

EntityOverlapStats entity_overlap_stats(const std::vector<EntityGrid>& grids) {
  if (grids.empty()) throw std::invalid_argument("empty corpus");
  EntityOverlapStats out;
  out.n_documents = grids.size();
  std::size_t no_overlap = 0;
  double ratio_sum = 0.0;
  for (const auto& grid : grids) {
    const std::size_t n = grid.n_sentences();
    std::vector<bool> touched(n, false);
    bool any_edge = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (linked(grid, i, j)) {
          any_edge = true;
          touched[i] = touched[j] = true;
        }
      }
    }
    if (!any_edge) ++no_overlap;
    ratio_sum += static_cast<double>(std::count(touched.begin(), touched.end(), false)) /
                 static_cast<double>(n);
  }
  out.prop_docs_no_overlap = static_cast<double>(no_overlap) / static_cast<double>(grids.size());
  out.avg_ratio_unlinked_sentences = ratio_sum / static_cast<double>(grids.size());
  return out;
}

PredictionSet random_cm(const ScoreDataset& dataset, std::uint64_t seed) {
  PredictionSet out = confounder_scores(dataset, RandomUniform{}, seed);
  out.measure_name = "RND";
  return out;
}

PredictionSet entity_graph_predictions(const ScoreDataset& dataset, const EntityGraphConfig& config) {
  PredictionSet out{"EGR", {}};
  for (const auto& r : dataset.records()) {
    if (r.summary_text.empty()) {
      throw std::invalid_argument("entity graph needs summary text; missing for " + to_string(r.key()));
    }
    out.scores.emplace(r.key(), entity_graph_score(detect_entities_in_text(r.summary_text), config));
  }
  return out;
}

}  // namespace cohmeta
