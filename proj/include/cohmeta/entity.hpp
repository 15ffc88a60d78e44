#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cohmeta/data.hpp"

namespace cohmeta {

/// Syntactic role of an entity mention in a sentence.
enum class Role : char { subject = 'S', object = 'O', other = 'X', absent = '-' };

/// Entities x sentences role matrix.
class EntityGrid {
 public:
  EntityGrid() = default;
  /// Throws DataError unless every row has n_sentences entries with at least
  /// one mention, and n_sentences >= 1.
  EntityGrid(std::vector<std::string> entities, std::vector<std::vector<Role>> roles,
             std::size_t n_sentences);

  const std::vector<std::string>& entities() const { return entities_; }
  const std::vector<std::vector<Role>>& roles() const { return roles_; }
  std::size_t n_entities() const { return entities_.size(); }
  std::size_t n_sentences() const { return n_sentences_; }
  Role role(std::size_t entity, std::size_t sentence) const { return roles_[entity][sentence]; }

  bool operator==(const EntityGrid&) const = default;

 private:
  std::vector<std::string> entities_;
  std::vector<std::vector<Role>> roles_;
  std::size_t n_sentences_ = 1;
};

/// Grid TSV: optional "# sentences=N" line, then one row per entity with the
/// label followed by one role symbol (S, O, X, -) per sentence. Blank lines and
/// other '#' lines are ignored.
EntityGrid parse_entity_grid(std::string_view tsv);
std::string serialize_entity_grid(const EntityGrid& grid);

/// Version of the embedded stopword list used by detect_entities.
inline constexpr std::string_view kStopwordListVersion = "en-1";
bool is_stopword(std::string_view lowercase_token);

/// Heuristic entity detection without a parser. Candidates are maximal runs of
/// capitalized tokens (a lone sentence-initial capitalized word is treated as an
/// ordinary token) and lowercased non-stopword tokens that occur in at least two
/// sentences. Labels are lowercased; every mention gets role X. Entities are
/// ordered by first mention.
EntityGrid detect_entities(const std::vector<std::vector<std::string>>& sentences);

/// Sentence splitting, tokenization and detection in one step.
EntityGrid detect_entities_in_text(std::string_view text);

enum class EdgeWeighting { unweighted, shared_count, role_product };

struct EntityGraphConfig {
  EdgeWeighting weighting = EdgeWeighting::role_product;
  bool distance_penalty = true;
  double subject_weight = 3.0;
  double object_weight = 2.0;
  double other_weight = 1.0;
};

/// Weight of the forward edge i -> j (i < j), 0 when the sentences share no entity.
double entity_graph_edge(const EntityGrid& grid, std::size_t i, std::size_t j,
                         const EntityGraphConfig& config = {});

/// Average outdegree of the forward sentence projection.
double entity_graph_score(const EntityGrid& grid, const EntityGraphConfig& config = {});

struct EntityOverlapStats {
  double prop_docs_no_overlap = 0.0;
  double avg_ratio_unlinked_sentences = 0.0;
  std::size_t n_documents = 0;
};

EntityOverlapStats entity_overlap_stats(const std::vector<EntityGrid>& grids);

/// Uniform(0, 1) scores; the RND coherence measure.
PredictionSet random_cm(const ScoreDataset& dataset, std::uint64_t seed);

/// Entity graph scores for every summary of a dataset, grids detected from text.
PredictionSet entity_graph_predictions(const ScoreDataset& dataset,
                                       const EntityGraphConfig& config = {});

EdgeWeighting parse_weighting(std::string_view name);

}  // namespace cohmeta
