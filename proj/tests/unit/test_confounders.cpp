#include <doctest.h>

#include <cmath>

#include "builders.hpp"
#include "cohmeta/confounders.hpp"
#include "cohmeta/synth.hpp"
#include "oracles.hpp"

using namespace cohmeta;

namespace {

ScoreDataset texts() {
  std::vector<SummaryRecord> r{
      {"d1", "A", "The CAT ran", {3}},       {"d2", "A", "a dog", {4}},
      {"d1", "B", "NASA and ESA", {2}},      {"d2", "B", "\xC3\x89t\xC3\xA9 \xC3\xA0 Paris", {1}},
      {"d1", "C", "Hello World", {5}},       {"d2", "C", "x", {5}},
  };
  return ScoreDataset(std::move(r));
}

}  // namespace

TEST_CASE("capitalization counts uppercase letters") {
  const auto p = confounder_scores(texts(), Capitalization{});
  CHECK(p.at({"d1", "A"}) == 4);
  CHECK(p.at({"d2", "A"}) == 0);
  CHECK(p.at({"d1", "B"}) == 7);
  CHECK(p.at({"d2", "B"}) == 2);
}

TEST_CASE("capitalization requires text") {
  const auto ds = build::dataset({{"d1", "A", 1}, {"d2", "A", 2}});
  std::vector<SummaryRecord> r{{"d1", "A", "", {3}}};
  CHECK_THROWS_AS(confounder_scores(ScoreDataset(r), Capitalization{}), std::invalid_argument);
}

TEST_CASE("indicator") {
  const auto p = confounder_scores(texts(), Indicator{{"B"}});
  CHECK(p.at({"d1", "B"}) == 1);
  CHECK(p.at({"d1", "A"}) == 0);
  CHECK_THROWS(confounder_scores(texts(), Indicator{}));
  CHECK_THROWS(confounder_scores(texts(), Indicator{{"Z"}}));
  CHECK(summeval_transformer_systems().size() == 5);
}

TEST_CASE("upper bound assigns system means") {
  const auto ds = texts();
  const auto ub = confounder_scores(ds, UpperBound{});
  CHECK(ub.at({"d1", "A"}) == 3.5);
  CHECK(ub.at({"d2", "B"}) == 1.5);
  CHECK(system_means(ub, ds) == system_means(human_scores(ds), ds));
  const auto h = human_scores(ds);
  CHECK(*evaluate(h, ub, ComparisonLevel::system).value == 1.0);
  CHECK_FALSE(evaluate(h, ub, ComparisonLevel::intra).defined());
}

TEST_CASE("random uniform") {
  const auto a = confounder_scores(texts(), RandomUniform{}, 7);
  const auto b = confounder_scores(texts(), RandomUniform{}, 7);
  const auto c = confounder_scores(texts(), RandomUniform{}, 8);
  CHECK(a.scores == b.scores);
  CHECK(a.scores != c.scores);
  for (const auto& [k, v] : a.scores) CHECK((v >= 0 && v < 1));
}

TEST_CASE("randomize adds bounded noise") {
  const auto p = build::scores({{"d1", "A", 2}, {"d2", "A", 1}, {"d3", "A", 2}});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = randomize(p, 1e-6, seed);
    CHECK(r.at({"d1", "A"}) > 2);
    CHECK(r.at({"d1", "A"}) < 2.000001);
    CHECK(r.at({"d2", "A"}) < r.at({"d1", "A"}));
    CHECK(r.at({"d1", "A"}) != r.at({"d3", "A"}));
  }
  CHECK(randomize(p, 1e-6, 3).scores == randomize(p, 1e-6, 3).scores);
  CHECK_THROWS(randomize(p, 0.0, 1));
}

TEST_CASE("confounder report layout") {
  SynthConfig cfg;
  cfg.n_systems = 4;
  cfg.n_docs = 6;
  cfg.system_means = {2, 3, 4, 1.5};
  cfg.seed = 1;
  const auto data = generate_synthetic(cfg);
  ConfounderReportOptions o;
  o.n_runs = 5;
  o.architecture_systems = {"s00", "s02"};
  const auto rep = confounder_report(data.dataset, o);
  CHECK(rep.columns == std::vector<std::string>{"Cap", "Cap (r)", "Arch", "Arch (r)", "UB", "UB (r)"});
  CHECK(rep.rows == std::vector<std::string>{"tau_sys", "tau_sum", "tau_pair", "Acc_pair", "tau_intra"});
  CHECK(*rep.at("tau_sys", "UB") == 1.0);
  CHECK_FALSE(rep.at("tau_intra", "UB").has_value());
  CHECK(rep.at("tau_intra", "UB (r)").has_value());
  CHECK(rep.to_table(2).rows[4][5] == "-");

  const auto one = build::dataset({{"d1", "A", 1}, {"d2", "A", 2}});
  CHECK_THROWS(confounder_report(one));
}

TEST_CASE("human baseline picks the dissenting annotator") {
  std::vector<SummaryRecord> r{
      {"d1", "A", "t", {1, 2, 5}}, {"d2", "A", "t", {2, 1, 4}}, {"d3", "A", "t", {4, 5, 2}}, {"d4", "A", "t", {5, 4, 1}}};
  const auto hb = human_baseline(ScoreDataset(r));
  CHECK(hb.selected_annotator == 2);
  CHECK(hb.pred.at({"d1", "A"}) == 5);
  CHECK(hb.target.at({"d1", "A"}) == 1.5);
  CHECK(*hb.annotator_tau[2] < 0);
}

TEST_CASE("human baseline picks the noisy annotator") {
  Engine e = make_engine(3, "hum-noise");
  std::vector<SummaryRecord> r;
  for (int d = 0; d < 30; ++d) {
    const double base = std::uniform_int_distribution<int>(1, 5)(e);
    const double noisy = std::uniform_int_distribution<int>(1, 5)(e);
    r.push_back({"d" + std::to_string(d), "A", "t", {base, noisy, base}});
  }
  CHECK(human_baseline(ScoreDataset(r)).selected_annotator == 1);
}

TEST_CASE("two annotators tie and the lower index wins") {
  std::vector<SummaryRecord> r{{"d1", "A", "t", {1, 2}}, {"d2", "A", "t", {3, 3}}, {"d3", "A", "t", {2, 5}}};
  CHECK(human_baseline(ScoreDataset(r)).selected_annotator == 0);
  std::vector<SummaryRecord> single{{"d1", "A", "t", {1}}, {"d2", "A", "t", {3}}};
  CHECK_THROWS(human_baseline(ScoreDataset(single)));
}
