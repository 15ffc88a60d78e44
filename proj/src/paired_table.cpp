#include "paired_table.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace cohmeta::detail {

PairedTable make_paired_table(const PredictionSet& human, const PredictionSet& pred) {
  require_same_keys(human, pred);
  PairedTable t;
  std::map<std::string, std::size_t> docs;
  std::map<std::string, std::size_t> systems;
  for (const auto& [key, h] : human.scores) {
    auto [d, new_doc] = docs.emplace(key.doc_id, t.doc_labels.size());
    if (new_doc) t.doc_labels.push_back(key.doc_id);
    auto [s, new_sys] = systems.emplace(key.system_id, t.system_labels.size());
    if (new_sys) t.system_labels.push_back(key.system_id);
    t.entries.push_back({d->second, s->second, h, pred.scores.at(key)});
  }
  t.n_docs = t.doc_labels.size();
  t.n_systems = t.system_labels.size();
  return t;
}

std::vector<std::vector<std::size_t>> group_entries(const PairedTable& table, bool by_system) {
  std::vector<std::vector<std::size_t>> groups(by_system ? table.n_systems : table.n_docs);
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& e = table.entries[i];
    groups[by_system ? e.sys : e.doc].push_back(i);
  }
  return groups;
}

namespace {

bool all_equal(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

MetricResult grouped(const PairedTable& table, ComparisonLevel level, Statistic statistic,
                     UndefinedPolicy policy) {
  const bool by_system = level == ComparisonLevel::intra;
  MetricResult result{level, statistic, std::nullopt, std::nullopt, 0};
  double sum = 0.0;
  std::size_t n_defined = 0;
  bool poisoned = false;
  std::vector<double> h;
  std::vector<double> p;
  for (const auto& group : group_entries(table, by_system)) {
    if (group.size() < 2) continue;
    h.clear();
    p.clear();
    for (std::size_t i : group) {
      h.push_back(table.entries[i].human);
      p.push_back(table.entries[i].pred);
    }
    const auto value = statistic == Statistic::tau ? kendall_tau_b(h, p) : pairwise_accuracy(h, p);
    if (value) {
      sum += *value;
      ++n_defined;
    } else if (policy == UndefinedPolicy::propagate && statistic == Statistic::tau &&
               all_equal(p)) {
      poisoned = true;
    }
  }
  result.n_units = n_defined;
  if (!poisoned && n_defined > 0) result.value = sum / static_cast<double>(n_defined);
  return result;
}

}  // namespace

MetricResult evaluate_table(const PairedTable& table, ComparisonLevel level, Statistic statistic,
                            UndefinedPolicy policy) {
  if (statistic == Statistic::accuracy && level != ComparisonLevel::pairwise) {
    throw std::invalid_argument("accuracy is only defined for the pairwise level");
  }
  switch (level) {
    case ComparisonLevel::system: {
      if (table.n_systems < 2) throw std::invalid_argument("fewer than 2 systems");
      std::vector<std::vector<double>> hv(table.n_systems);
      std::vector<std::vector<double>> pv(table.n_systems);
      for (const auto& e : table.entries) {
        hv[e.sys].push_back(e.human);
        pv[e.sys].push_back(e.pred);
      }
      std::vector<double> h(table.n_systems);
      std::vector<double> p(table.n_systems);
      for (std::size_t s = 0; s < table.n_systems; ++s) {
        h[s] = stable_mean(std::move(hv[s]));
        p[s] = stable_mean(std::move(pv[s]));
      }
      return {level, statistic, kendall_tau_b(h, p), std::nullopt, table.n_systems};
    }
    case ComparisonLevel::summary: {
      if (table.entries.size() < 2) throw std::invalid_argument("fewer than 2 summaries");
      std::vector<double> h;
      std::vector<double> p;
      for (const auto& e : table.entries) {
        h.push_back(e.human);
        p.push_back(e.pred);
      }
      return {level, statistic, kendall_tau_b(h, p), std::nullopt, table.entries.size()};
    }
    case ComparisonLevel::pairwise:
      if (table.n_systems < 2) throw std::invalid_argument("fewer than 2 systems");
      return grouped(table, level, statistic, policy);
    case ComparisonLevel::intra:
      if (table.n_docs < 2) throw std::invalid_argument("fewer than 2 documents");
      return grouped(table, level, statistic, policy);
  }
  throw std::invalid_argument("unknown comparison level");
}

}  // namespace cohmeta::detail
