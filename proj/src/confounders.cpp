#include "cohmeta/confounders.hpp"

#include <algorithm>
#include <stdexcept>

#include "cohmeta/random.hpp"
#include "cohmeta/text.hpp"

namespace cohmeta {

const std::set<std::string>& summeval_transformer_systems() {
  static const std::set<std::string> systems{"M17", "M20", "M22", "M23", "M23_dynamicmix"};
  return systems;
}

const std::vector<MetricDef>& standard_metrics() {
  static const std::vector<MetricDef> metrics{
      {"tau_sys", ComparisonLevel::system, Statistic::tau},
      {"tau_sum", ComparisonLevel::summary, Statistic::tau},
      {"tau_pair", ComparisonLevel::pairwise, Statistic::tau},
      {"Acc_pair", ComparisonLevel::pairwise, Statistic::accuracy},
      {"tau_intra", ComparisonLevel::intra, Statistic::tau},
  };
  return metrics;
}

namespace {

struct ScoreVisitor {
  const ScoreDataset& dataset;
  std::uint64_t seed;

  PredictionSet operator()(const Capitalization&) const {
    PredictionSet out{"capitalization", {}};
    for (const auto& r : dataset.records()) {
      if (r.summary_text.empty()) {
        throw std::invalid_argument("capitalization needs summary text; missing for " +
                                    to_string(r.key()));
      }
      out.scores.emplace(r.key(), static_cast<double>(text::count_uppercase(r.summary_text)));
    }
    return out;
  }

  PredictionSet operator()(const Indicator& kind) const {
    if (kind.systems.empty()) throw std::invalid_argument("indicator system subset is empty");
    for (const auto& s : kind.systems) {
      if (std::find(dataset.systems().begin(), dataset.systems().end(), s) ==
          dataset.systems().end()) {
        throw std::invalid_argument("indicator system '" + s + "' is not in the dataset");
      }
    }
    PredictionSet out{"indicator", {}};
    for (const auto& r : dataset.records()) {
      out.scores.emplace(r.key(), kind.systems.contains(r.system_id) ? 1.0 : 0.0);
    }
    return out;
  }

  PredictionSet operator()(const UpperBound&) const {
    const auto means = system_means(human_scores(dataset), dataset);
    PredictionSet out{"upper-bound", {}};
    for (const auto& r : dataset.records()) out.scores.emplace(r.key(), means.at(r.system_id));
    return out;
  }

  PredictionSet operator()(const RandomUniform&) const {
    PredictionSet out{"random", {}};
    for (const auto& r : dataset.records()) out.scores.emplace(r.key(), 0.0);
    Engine engine = make_engine(seed, "random-uniform");
    for (auto& [key, value] : out.scores) value = unit(engine);
    return out;
  }
};

}  // namespace

PredictionSet confounder_scores(const ScoreDataset& dataset, const ConfounderKind& kind,
                                std::uint64_t seed) {
  return std::visit(ScoreVisitor{dataset, seed}, kind);
}

PredictionSet randomize(const PredictionSet& pred, double epsilon, std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  PredictionSet out = pred;
  out.measure_name = pred.measure_name + " (r)";
  Engine engine = make_engine(seed, "randomize");
  for (auto& [key, value] : out.scores) value += epsilon * open_unit(engine);
  return out;
}

std::optional<double> ConfounderReport::at(std::string_view row, std::string_view column) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] != row) continue;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] == column) return values[i][j];
    }
  }
  throw std::out_of_range("no cell (" + std::string(row) + ", " + std::string(column) + ")");
}

report::Table ConfounderReport::to_table(int precision) const {
  report::Table t;
  t.header.push_back("");
  t.header.insert(t.header.end(), columns.begin(), columns.end());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> row{rows[i]};
    for (const auto& v : values[i]) row.push_back(report::format_number(v, precision, "-"));
    t.rows.push_back(std::move(row));
  }
  return t;
}

ConfounderReport confounder_report(const ScoreDataset& dataset,
                                   const ConfounderReportOptions& options) {
  if (options.n_runs == 0) throw std::invalid_argument("n_runs must be positive");
  if (dataset.systems().size() < 2) throw std::invalid_argument("fewer than 2 systems");

  const PredictionSet human = human_scores(dataset);
  const std::vector<std::pair<std::string, PredictionSet>> confounders{
      {"Cap", confounder_scores(dataset, Capitalization{})},
      {"Arch", confounder_scores(dataset, Indicator{options.architecture_systems})},
      {"UB", confounder_scores(dataset, UpperBound{})},
  };
  const auto& metrics = standard_metrics();

  ConfounderReport out;
  for (const auto& m : metrics) out.rows.push_back(m.name);
  out.values.assign(metrics.size(), {});
  for (const auto& [name, scores] : confounders) {
    out.columns.push_back(name);
    out.columns.push_back(name + " (r)");
    std::vector<double> sums(metrics.size(), 0.0);
    std::vector<std::size_t> counts(metrics.size(), 0);
    for (std::size_t run = 0; run < options.n_runs; ++run) {
      const PredictionSet noisy =
          randomize(scores, options.epsilon, derive_seed(options.seed, "confounder:" + name, run));
      for (std::size_t k = 0; k < metrics.size(); ++k) {
        const auto r = evaluate(human, noisy, metrics[k].level, metrics[k].statistic, options.policy);
        if (r.value) {
          sums[k] += *r.value;
          ++counts[k];
        }
      }
    }
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      out.values[k].push_back(
          evaluate(human, scores, metrics[k].level, metrics[k].statistic, options.policy).value);
      out.values[k].push_back(counts[k] > 0 ? std::optional<double>(sums[k] / static_cast<double>(counts[k]))
                                            : std::nullopt);
    }
  }
  return out;
}

HumanBaseline human_baseline(const ScoreDataset& dataset) {
  const auto n = dataset.n_annotators();
  if (!n) throw std::invalid_argument("human baseline requires an aligned-annotators dataset");
  if (*n < 2) throw std::invalid_argument("human baseline requires at least 2 annotators");

  HumanBaseline out;
  std::optional<double> best;
  for (std::size_t a = 0; a < *n; ++a) {
    std::vector<double> own;
    std::vector<double> rest;
    for (const auto& r : dataset.records()) {
      double sum = 0.0;
      for (std::size_t b = 0; b < *n; ++b) {
        if (b != a) sum += r.annotator_scores[b];
      }
      own.push_back(r.annotator_scores[a]);
      rest.push_back(sum / static_cast<double>(*n - 1));
    }
    const auto tau = dataset.size() >= 2 ? kendall_tau_b(own, rest) : std::nullopt;
    out.annotator_tau.push_back(tau);
    if (tau && (!best || *tau < *best)) {
      best = tau;
      out.selected_annotator = a;
    }
  }
  if (!best) throw std::runtime_error("no annotator has a defined correlation with the others");

  const std::size_t a = out.selected_annotator;
  out.pred.measure_name = "HUM";
  for (const auto& r : dataset.records()) out.pred.scores.emplace(r.key(), r.annotator_scores[a]);
  out.target = human_scores(dataset, HumanAggregation{a});
  return out;
}

}  // namespace cohmeta
