#include "cohmeta/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "cohmeta/random.hpp"
#include "paired_table.hpp"

namespace cohmeta {

std::string_view to_string(ComparisonLevel level) {
  switch (level) {
    case ComparisonLevel::system: return "system";
    case ComparisonLevel::summary: return "summary";
    case ComparisonLevel::pairwise: return "pairwise";
    case ComparisonLevel::intra: return "intra";
  }
  return "?";
}

std::string_view to_string(Statistic statistic) {
  return statistic == Statistic::tau ? "tau" : "accuracy";
}

std::string_view to_string(UndefinedPolicy policy) {
  return policy == UndefinedPolicy::propagate ? "propagate" : "skip-undefined-groups";
}

std::string_view to_string(ResampleStrategy strategy) {
  switch (strategy) {
    case ResampleStrategy::by_level: return "by-level";
    case ResampleStrategy::systems: return "systems";
    case ResampleStrategy::documents: return "documents";
    case ResampleStrategy::documents_within_system: return "documents-within-system";
  }
  return "?";
}

ComparisonLevel parse_level(std::string_view name) {
  if (name == "system" || name == "sys") return ComparisonLevel::system;
  if (name == "summary" || name == "sum") return ComparisonLevel::summary;
  if (name == "pairwise" || name == "pair") return ComparisonLevel::pairwise;
  if (name == "intra") return ComparisonLevel::intra;
  throw std::invalid_argument("unknown comparison level '" + std::string(name) + "'");
}

Statistic parse_statistic(std::string_view name) {
  if (name == "tau") return Statistic::tau;
  if (name == "accuracy" || name == "acc") return Statistic::accuracy;
  throw std::invalid_argument("unknown statistic '" + std::string(name) + "'");
}

UndefinedPolicy parse_policy(std::string_view name) {
  if (name == "propagate") return UndefinedPolicy::propagate;
  if (name == "skip-undefined-groups" || name == "skip") return UndefinedPolicy::skip_undefined_groups;
  throw std::invalid_argument("unknown undefined-policy '" + std::string(name) + "'");
}

ResampleStrategy parse_strategy(std::string_view name) {
  if (name == "by-level") return ResampleStrategy::by_level;
  if (name == "systems") return ResampleStrategy::systems;
  if (name == "documents") return ResampleStrategy::documents;
  if (name == "documents-within-system") return ResampleStrategy::documents_within_system;
  throw std::invalid_argument("unknown resample strategy '" + std::string(name) + "'");
}

namespace {

void check_pair_input(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("length mismatch: " + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
  }
  if (x.size() < 2) throw std::invalid_argument("need at least 2 observations");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) throw std::invalid_argument("NaN in input");
  }
}

// Sum of t(t-1)/2 over runs of equal adjacent values.
template <typename Eq>
std::int64_t tied_pairs(std::size_t n, Eq&& equal) {
  std::int64_t total = 0;
  std::int64_t run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (equal(i - 1, i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total + run * (run - 1) / 2;
}

// Sorts v ascending and returns the number of strict inversions.
std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch,
                              std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_pair_input(x, y);
  const std::size_t n = x.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t x_ties = tied_pairs(n, [&](std::size_t i, std::size_t j) {
    return x[order[i]] == x[order[j]];
  });
  const std::int64_t joint_ties = tied_pairs(n, [&](std::size_t i, std::size_t j) {
    return x[order[i]] == x[order[j]] && y[order[i]] == y[order[j]];
  });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> scratch(n);
  const std::int64_t discordant = count_inversions(ys, scratch, 0, n);
  const std::int64_t y_ties = tied_pairs(n, [&](std::size_t i, std::size_t j) { return ys[i] == ys[j]; });

  if (x_ties == n0 || y_ties == n0) return std::nullopt;
  const std::int64_t concordant = n0 - x_ties - y_ties + joint_ties - discordant;
  const double tau = static_cast<double>(concordant - discordant) /
                     std::sqrt(static_cast<double>(n0 - x_ties) * static_cast<double>(n0 - y_ties));
  return std::clamp(tau, -1.0, 1.0);
}

std::optional<double> pairwise_accuracy(std::span<const double> human, std::span<const double> pred,
                                        TiePolicy) {
  check_pair_input(human, pred);
  std::size_t considered = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < human.size(); ++i) {
    for (std::size_t j = i + 1; j < human.size(); ++j) {
      if (human[i] == human[j]) continue;
      ++considered;
      const bool human_gt = human[i] > human[j];
      if ((human_gt && pred[i] > pred[j]) || (!human_gt && pred[i] < pred[j])) ++correct;
    }
  }
  if (considered == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(considered);
}

MetricResult evaluate(const PredictionSet& human, const PredictionSet& pred, ComparisonLevel level,
                      Statistic statistic, UndefinedPolicy policy) {
  return detail::evaluate_table(detail::make_paired_table(human, pred), level, statistic, policy);
}

namespace {

using detail::PairedEntry;
using detail::PairedTable;

ResampleStrategy resolve(ResampleStrategy strategy, ComparisonLevel level) {
  if (strategy != ResampleStrategy::by_level) return strategy;
  switch (level) {
    case ComparisonLevel::system: return ResampleStrategy::systems;
    case ComparisonLevel::intra: return ResampleStrategy::documents_within_system;
    default: return ResampleStrategy::documents;
  }
}

std::size_t draw(Engine& engine, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine);
}

class Resampler {
 public:
  Resampler(const PairedTable& table, ResampleStrategy strategy)
      : table_(table),
        strategy_(strategy),
        by_system_(detail::group_entries(table, true)),
        by_doc_(detail::group_entries(table, false)) {}

  PairedTable operator()(Engine& engine) const {
    PairedTable out;
    out.n_docs = table_.n_docs;
    out.n_systems = table_.n_systems;
    out.entries.reserve(table_.entries.size());
    switch (strategy_) {
      case ResampleStrategy::systems:
        for (std::size_t k = 0; k < table_.n_systems; ++k) {
          for (std::size_t i : by_system_[draw(engine, table_.n_systems)]) {
            const auto& e = table_.entries[i];
            out.entries.push_back({e.doc, k, e.human, e.pred});
          }
        }
        break;
      case ResampleStrategy::documents:
        for (std::size_t k = 0; k < table_.n_docs; ++k) {
          for (std::size_t i : by_doc_[draw(engine, table_.n_docs)]) {
            const auto& e = table_.entries[i];
            out.entries.push_back({k, e.sys, e.human, e.pred});
          }
        }
        break;
      default: {
        std::size_t max_docs = 0;
        for (std::size_t s = 0; s < table_.n_systems; ++s) {
          const auto& group = by_system_[s];
          for (std::size_t k = 0; k < group.size(); ++k) {
            const auto& e = table_.entries[group[draw(engine, group.size())]];
            out.entries.push_back({k, s, e.human, e.pred});
          }
          max_docs = std::max(max_docs, group.size());
        }
        out.n_docs = max_docs;
        break;
      }
    }
    return out;
  }

 private:
  const PairedTable& table_;
  ResampleStrategy strategy_;
  std::vector<std::vector<std::size_t>> by_system_;
  std::vector<std::vector<std::size_t>> by_doc_;
};

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval percentile_interval(std::vector<double> values, double confidence) {
  std::sort(values.begin(), values.end());
  const double alpha = (1.0 - confidence) / 2.0;
  return {quantile(values, alpha), quantile(values, 1.0 - alpha)};
}

void check_options(const BootstrapOptions& options) {
  if (options.n_resamples == 0) throw std::invalid_argument("n_resamples must be positive");
  if (!(options.confidence > 0.0 && options.confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
}

}  // namespace

BootstrapResult bootstrap_ci(const PredictionSet& human, const PredictionSet& pred,
                             ComparisonLevel level, Statistic statistic,
                             const BootstrapOptions& options) {
  check_options(options);
  const PairedTable table = detail::make_paired_table(human, pred);
  // Surfaces precondition errors (level/statistic mismatch, too few units).
  detail::evaluate_table(table, level, statistic, options.policy);

  const Resampler resample(table, resolve(options.strategy, level));
  BootstrapResult result;
  std::vector<double> values;
  values.reserve(options.n_resamples);
  for (std::size_t i = 0; i < options.n_resamples; ++i) {
    Engine engine = make_engine(options.seed, "bootstrap", i);
    const auto r = detail::evaluate_table(resample(engine), level, statistic, options.policy);
    if (r.value) {
      values.push_back(*r.value);
    } else {
      ++result.n_undefined;
    }
  }
  if (values.empty()) throw std::runtime_error("all bootstrap resamples were undefined");
  result.n_valid = values.size();
  result.interval = percentile_interval(std::move(values), options.confidence);
  return result;
}

MetricResult evaluate_with_ci(const PredictionSet& human, const PredictionSet& pred,
                              ComparisonLevel level, Statistic statistic,
                              const BootstrapOptions& options) {
  MetricResult r = evaluate(human, pred, level, statistic, options.policy);
  if (r.value) r.ci = bootstrap_ci(human, pred, level, statistic, options).interval;
  return r;
}

std::vector<SystemCorrelation> per_system_correlation(
    const PredictionSet& human, const PredictionSet& pred,
    const std::optional<BootstrapOptions>& bootstrap) {
  if (bootstrap) check_options(*bootstrap);
  const PairedTable table = detail::make_paired_table(human, pred);
  const auto groups = detail::group_entries(table, true);
  std::vector<SystemCorrelation> out;
  for (std::size_t s = 0; s < table.n_systems; ++s) {
    const auto& group = groups[s];
    SystemCorrelation row{table.system_labels[s], std::nullopt, std::nullopt, group.size()};
    if (group.size() >= 2) {
      std::vector<double> h;
      std::vector<double> p;
      for (std::size_t i : group) {
        h.push_back(table.entries[i].human);
        p.push_back(table.entries[i].pred);
      }
      row.tau = kendall_tau_b(h, p);
      if (row.tau && bootstrap) {
        std::vector<double> values;
        std::vector<double> hs(group.size());
        std::vector<double> ps(group.size());
        for (std::size_t i = 0; i < bootstrap->n_resamples; ++i) {
          Engine engine = make_engine(bootstrap->seed, "bootstrap:" + row.system_id, i);
          for (std::size_t k = 0; k < group.size(); ++k) {
            const std::size_t pick = draw(engine, group.size());
            hs[k] = h[pick];
            ps[k] = p[pick];
          }
          if (const auto t = kendall_tau_b(hs, ps)) values.push_back(*t);
        }
        if (!values.empty()) row.ci = percentile_interval(std::move(values), bootstrap->confidence);
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace cohmeta
