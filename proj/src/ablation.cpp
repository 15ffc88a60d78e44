#include "cohmeta/ablation.hpp"

#include <set>
#include <stdexcept>

namespace cohmeta {

ComponentSet::ComponentSet(std::vector<std::pair<std::string, PredictionSet>> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("component set is empty");
  std::set<std::string> names;
  for (const auto& [name, scores] : components_) {
    if (!names.insert(name).second) throw std::invalid_argument("duplicate component '" + name + "'");
    require_same_keys(components_.front().second, scores);
  }
}

PredictionSet ComponentSet::combined(std::size_t i, std::size_t j) const {
  PredictionSet out{name(i) + "+" + name(j), scores(i).scores};
  for (auto& [key, value] : out.scores) value += scores(j).scores.at(key);
  return out;
}

report::Table AblationReport::to_table(int precision) const {
  report::Table t;
  t.header.push_back("");
  t.header.insert(t.header.end(), names.begin(), names.end());
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::vector<std::string> row{names[i]};
    for (std::size_t j = 0; j < names.size(); ++j) {
      row.push_back(below_diagonal(i, j) ? "" : report::format_number(values[i][j], precision, "-"));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

AblationReport ablation_report(const PredictionSet& human, const ComponentSet& components,
                               ComparisonLevel level, Statistic statistic, UndefinedPolicy policy) {
  require_same_keys(human, components.scores(0));
  const std::size_t n = components.size();
  AblationReport out;
  out.values.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    out.names.push_back(components.name(i));
    out.values[i][i] = evaluate(human, components.scores(i), level, statistic, policy).value;
    for (std::size_t j = i + 1; j < n; ++j) {
      out.values[i][j] = evaluate(human, components.combined(i, j), level, statistic, policy).value;
    }
  }
  return out;
}

}  // namespace cohmeta
