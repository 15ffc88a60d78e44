// Acceptance checks that need the SummEval expert annotations
// (model_annotations.aligned.paired.jsonl, 17 systems x 100 documents).
// The file is read from $COHMETA_SUMMEVAL or the default data path. Without
// it, every check reports NOT RUN and the process exits with 77 so ctest
// marks the test as skipped.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "cohmeta/confounders.hpp"
#include "cohmeta/entity.hpp"
#include "cohmeta/random.hpp"
#include "cohmeta/rank_stats.hpp"

using namespace cohmeta;

namespace {

constexpr double kDeterministicTol = 0.01;
constexpr double kCapAccuracyTol = 0.02;
constexpr double kRandomizedTol = 0.03;
constexpr double kRandomTauTol = 0.05;
constexpr double kRandomAccTol = 0.02;
constexpr double kRuntimeSeconds = 120.0;

struct Expected {
  const char* row;
  const char* column;
  std::optional<double> value;
  double tol;
};

// Deterministic and randomized confounder columns on SummEval.
const std::vector<Expected> kConfounderTable{
    {"tau_sys", "Cap", 0.42, kDeterministicTol},
    {"tau_sys", "Arch", 0.58, kDeterministicTol},
    {"tau_sys", "UB", 1.00, kDeterministicTol},
    {"tau_sum", "UB", 0.39, kDeterministicTol},
    {"tau_pair", "UB", 0.44, kDeterministicTol},
    {"Acc_pair", "UB", 0.73, kDeterministicTol},
    {"Acc_pair", "Cap", 0.23, kCapAccuracyTol},
    {"tau_intra", "Cap", std::nullopt, 0},
    {"tau_intra", "Arch", std::nullopt, 0},
    {"tau_intra", "UB", std::nullopt, 0},
    {"tau_sys", "Cap (r)", 0.23, kRandomizedTol},
    {"tau_sum", "Cap (r)", 0.11, kRandomizedTol},
    {"tau_pair", "Cap (r)", 0.14, kRandomizedTol},
    {"Acc_pair", "Cap (r)", 0.57, kRandomizedTol},
    {"tau_intra", "Cap (r)", -0.03, kRandomizedTol},
    {"tau_sys", "Arch (r)", 0.37, kRandomizedTol},
    {"tau_sum", "Arch (r)", 0.20, kRandomizedTol},
    {"tau_pair", "Arch (r)", 0.22, kRandomizedTol},
    {"Acc_pair", "Arch (r)", 0.62, kRandomizedTol},
    {"tau_intra", "Arch (r)", 0.01, kRandomizedTol},
    {"tau_sys", "UB (r)", 1.00, kRandomizedTol},
    {"tau_sum", "UB (r)", 0.39, kRandomizedTol},
    {"tau_pair", "UB (r)", 0.44, kRandomizedTol},
    {"Acc_pair", "UB (r)", 0.73, kRandomizedTol},
    {"tau_intra", "UB (r)", 0.00, kRandomizedTol},
};

std::string show(std::optional<double> v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

}  // namespace

int main() {
  const char* env = std::getenv("COHMETA_SUMMEVAL");
  const std::filesystem::path path = env && *env ? env : COHMETA_SUMMEVAL_DEFAULT;
  if (!std::filesystem::exists(path)) {
    std::printf("[NOT RUN] criterion 4: confounder table on SummEval -- annotations not found at %s\n",
                path.string().c_str());
    std::printf("[NOT RUN] criterion 5: random baseline on SummEval -- annotations not found at %s\n",
                path.string().c_str());
    std::printf("set COHMETA_SUMMEVAL to the expert annotation JSONL to run these checks\n");
    return 77;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int failed = 0;
  try {
    LoadOptions options;
    options.require_aligned = true;
    const ScoreDataset dataset = load_dataset(path, DatasetFormat::summeval_expert, options);
    std::printf("loaded %zu summaries, %zu systems, %zu documents\n", dataset.size(), dataset.systems().size(),
                dataset.documents().size());

    // Criterion 4.
    ConfounderReportOptions ro;
    ro.n_runs = 100;
    ro.seed = 0;
    const ConfounderReport rep = confounder_report(dataset, ro);
    std::size_t bad = 0;
    std::string misses;
    for (const auto& e : kConfounderTable) {
      const auto got = rep.at(e.row, e.column);
      const bool ok = e.value ? got && std::abs(*got - *e.value) <= e.tol + 1e-12 : !got.has_value();
      if (!ok) {
        ++bad;
        misses += std::string(" ") + e.column + "/" + e.row + "=" + show(got) + "(want " + show(e.value) + ")";
      }
    }
    const bool shape = dataset.systems().size() == 17 && dataset.documents().size() == 100;
    const bool pass4 = bad == 0 && shape;
    if (!pass4) ++failed;
    std::printf("[%s] criterion 4: confounder table on SummEval -- %zu/%zu cells within tolerance%s\n",
                pass4 ? "PASS" : "FAIL", kConfounderTable.size() - bad, kConfounderTable.size(),
                misses.empty() ? "" : (";" + misses).c_str());
    std::printf("%s", rep.to_table(2).to_markdown().c_str());

    // Criterion 5.
    const PredictionSet human = human_scores(dataset);
    std::vector<double> sums(standard_metrics().size(), 0.0);
    const int n_seeds = 100;
    for (int seed = 0; seed < n_seeds; ++seed) {
      const PredictionSet rnd = random_cm(dataset, derive_seed(0, "rnd", static_cast<std::uint64_t>(seed)));
      for (std::size_t k = 0; k < standard_metrics().size(); ++k) {
        const auto& m = standard_metrics()[k];
        sums[k] += evaluate(human, rnd, m.level, m.statistic).value.value_or(NAN);
      }
    }
    bool pass5 = true;
    std::string detail;
    for (std::size_t k = 0; k < sums.size(); ++k) {
      const auto& m = standard_metrics()[k];
      const double mean = sums[k] / n_seeds;
      const double target = m.statistic == Statistic::accuracy ? 0.5 : 0.0;
      const double tol = m.statistic == Statistic::accuracy ? kRandomAccTol : kRandomTauTol;
      if (!(std::abs(mean - target) <= tol)) pass5 = false;
      char buf[96];
      std::snprintf(buf, sizeof buf, " %s=%+.4f", m.name.c_str(), mean);
      detail += buf;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    pass5 = pass5 && elapsed < kRuntimeSeconds;
    if (!pass5) ++failed;
    std::printf("[%s] criterion 5: random baseline on SummEval, 100 seeds --%s; total runtime %.1f s\n",
                pass5 ? "PASS" : "FAIL", detail.c_str(), elapsed);
  } catch (const std::exception& e) {
    std::printf("[FAIL] SummEval checks raised: %s\n", e.what());
    return 1;
  }
  return failed == 0 ? 0 : 1;
}
