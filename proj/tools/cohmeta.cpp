#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cohmeta/ablation.hpp"
#include "cohmeta/bias.hpp"
#include "cohmeta/confounders.hpp"
#include "cohmeta/data.hpp"
#include "cohmeta/entity.hpp"
#include "cohmeta/errors.hpp"
#include "cohmeta/random.hpp"
#include "cohmeta/rank_stats.hpp"
#include "cohmeta/report.hpp"
#include "cohmeta/shuffle.hpp"
#include "cohmeta/synth.hpp"
#include "cohmeta/text.hpp"

namespace fs = std::filesystem;
using namespace cohmeta;
using report::Config;
using report::OutputBundle;
using report::Table;

namespace {

struct DatasetArgs {
  std::string path;
  std::string format = "canonical";
  double score_lo = 1.0;
  double score_hi = 5.0;

  void add_to(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--dataset", path, "Dataset JSONL file");
    if (required) opt->required();
    cmd->add_option("--format", format, "Dataset format: canonical or summeval")
        ->capture_default_str();
    cmd->add_option("--score-min", score_lo, "Lowest admissible human score")->capture_default_str();
    cmd->add_option("--score-max", score_hi, "Highest admissible human score")->capture_default_str();
  }

  ScoreDataset load() const {
    LoadOptions options;
    options.range = {score_lo, score_hi};
    return load_dataset(path, parse_dataset_format(format), options);
  }

  void describe(Config& c) const {
    c.emplace_back("dataset", path);
    c.emplace_back("format", format);
    c.emplace_back("score_range", fmt::format("{}..{}", score_lo, score_hi));
  }
};

std::pair<std::string, std::string> split_named(const std::string& arg, const char* flag) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
    throw std::invalid_argument(fmt::format("{} expects NAME=PATH, got '{}'", flag, arg));
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::set<std::string> parse_system_list(const std::string& csv) {
  std::set<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

std::string join(const std::set<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

/// Filesystem-friendly form of a measure name.
std::string slug(const std::string& name) {
  std::string out;
  for (unsigned char c : name) out += std::isalnum(c) || c == '-' || c == '_' ? static_cast<char>(c) : '_';
  return out;
}

struct PredictionContext {
  std::uint64_t seed = 0;
  std::set<std::string> architecture_systems = summeval_transformer_systems();
};

PredictionSet load_named_prediction(const std::string& name, const std::string& source,
                                    const ScoreDataset& dataset, const PredictionContext& ctx) {
  PredictionSet pred;
  if (source.starts_with("builtin:")) {
    const std::string kind = source.substr(8);
    if (kind == "upper-bound") {
      pred = confounder_scores(dataset, UpperBound{});
    } else if (kind == "random") {
      pred = random_cm(dataset, derive_seed(ctx.seed, "pred:" + name));
    } else if (kind == "human") {
      pred = human_scores(dataset);
    } else if (kind == "capitalization") {
      pred = confounder_scores(dataset, Capitalization{});
    } else if (kind == "architecture") {
      pred = confounder_scores(dataset, Indicator{ctx.architecture_systems});
    } else if (kind == "egr") {
      pred = entity_graph_predictions(dataset);
    } else {
      throw std::invalid_argument("unknown builtin predictor '" + kind + "'");
    }
  } else {
    pred = load_predictions(source, name);
  }
  pred.measure_name = name;
  require_coverage(pred, dataset);
  return pred;
}

std::vector<PredictionSet> load_predictions_for(const std::vector<std::string>& args,
                                                const ScoreDataset& dataset,
                                                const PredictionContext& ctx, const char* flag) {
  std::vector<PredictionSet> out;
  std::set<std::string> names;
  for (const auto& arg : args) {
    const auto [name, source] = split_named(arg, flag);
    if (!names.insert(name).second) throw std::invalid_argument("duplicate prediction name '" + name + "'");
    out.push_back(load_named_prediction(name, source, dataset, ctx));
  }
  return out;
}

std::string csv_report(const std::string& provenance, const Table& t) {
  return provenance + "\n" + t.to_csv();
}

std::string md_report(const std::string& provenance, const Table& t) {
  return "<!-- " + provenance + " -->\n\n" + t.to_markdown();
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  DatasetArgs data;
  std::vector<std::string> preds;
  bool with_hum = false;
  std::vector<std::string> levels;
  std::size_t n_resamples = 1000;
  std::uint64_t seed = 0;
  std::string policy = "propagate";
  std::string arch_systems = join(summeval_transformer_systems());
  std::string out = ".";
  int precision = 2;
};

int run_evaluate(const EvaluateArgs& a) {
  const ScoreDataset dataset = a.data.load();
  const PredictionContext ctx{a.seed, parse_system_list(a.arch_systems)};
  const UndefinedPolicy policy = parse_policy(a.policy);

  std::set<ComparisonLevel> levels;
  for (const auto& l : a.levels) levels.insert(parse_level(l));
  std::vector<MetricDef> metrics;
  // Table layout: intra first, then pair, summary, system and pairwise accuracy.
  for (const char* name : {"tau_intra", "tau_pair", "tau_sum", "tau_sys", "Acc_pair"}) {
    for (const auto& m : standard_metrics()) {
      if (m.name == name && (levels.empty() || levels.contains(m.level))) metrics.push_back(m);
    }
  }

  struct Row {
    std::string name;
    PredictionSet human;
    PredictionSet pred;
  };
  std::vector<Row> rows;
  const PredictionSet human = human_scores(dataset);
  for (auto& p : load_predictions_for(a.preds, dataset, ctx, "--pred")) {
    rows.push_back({p.measure_name, human, std::move(p)});
  }
  if (a.with_hum) {
    HumanBaseline hum = human_baseline(dataset);
    rows.push_back({"HUM", std::move(hum.target), std::move(hum.pred)});
  }
  if (rows.empty()) throw std::invalid_argument("nothing to evaluate: pass --pred or --with-hum");

  Table md;
  Table csv;
  md.header.push_back("measure");
  csv.header.push_back("measure");
  for (const auto& m : metrics) {
    md.header.push_back(m.name);
    csv.header.insert(csv.header.end(), {m.name, m.name + "_lo", m.name + "_hi"});
  }
  for (const auto& row : rows) {
    std::vector<std::string> md_row{row.name};
    std::vector<std::string> csv_row{row.name};
    for (const auto& m : metrics) {
      BootstrapOptions boot;
      boot.n_resamples = a.n_resamples;
      boot.seed = derive_seed(a.seed, "bootstrap:" + row.name + ":" + m.name);
      boot.policy = policy;
      MetricResult r = evaluate(row.human, row.pred, m.level, m.statistic, policy);
      if (r.value && a.n_resamples > 0) {
        try {
          r.ci = bootstrap_ci(row.human, row.pred, m.level, m.statistic, boot).interval;
        } catch (const std::runtime_error&) {
          // every resample undefined: leave the interval empty
        }
      }
      std::string cell = report::format_number(r.value, a.precision, "-");
      if (r.ci) {
        cell += fmt::format(" [{}, {}]", report::format_number(r.ci->lo, a.precision),
                            report::format_number(r.ci->hi, a.precision));
      }
      md_row.push_back(cell);
      csv_row.push_back(report::format_number(r.value, 6));
      csv_row.push_back(r.ci ? report::format_number(r.ci->lo, 6) : "");
      csv_row.push_back(r.ci ? report::format_number(r.ci->hi, 6) : "");
    }
    md.rows.push_back(std::move(md_row));
    csv.rows.push_back(std::move(csv_row));
  }

  Config c;
  a.data.describe(c);
  for (const auto& arg : a.preds) c.emplace_back("pred", arg);
  c.emplace_back("with_hum", a.with_hum ? "true" : "false");
  c.emplace_back("n_resamples", std::to_string(a.n_resamples));
  c.emplace_back("seed", std::to_string(a.seed));
  c.emplace_back("policy", a.policy);
  c.emplace_back("confidence", "0.95");

  OutputBundle out;
  out.add(fs::path(a.out) / "evaluate.md", md_report(report::provenance_line("evaluate", c, ""), md));
  out.add(fs::path(a.out) / "evaluate.csv", csv_report(report::provenance_line("evaluate", c, "# "), csv));
  out.commit();
  std::cout << md.to_markdown();
  return 0;
}

// -------------------------------------------------------------------- bias

struct BiasArgs {
  DatasetArgs data;
  std::vector<std::string> preds;
  std::uint64_t seed = 0;
  std::string arch_systems = join(summeval_transformer_systems());
  double cell_size = 40.0;
  std::string out = ".";
};

int run_bias(const BiasArgs& a) {
  const ScoreDataset dataset = a.data.load();
  const PredictionContext ctx{a.seed, parse_system_list(a.arch_systems)};
  const PredictionSet human = human_scores(dataset);
  const auto preds = load_predictions_for(a.preds, dataset, ctx, "--pred");

  SvgOptions svg;
  svg.cell_size = a.cell_size;
  OutputBundle out;
  for (const auto& pred : preds) {
    Config c;
    a.data.describe(c);
    c.emplace_back("pred", pred.measure_name);
    c.emplace_back("seed", std::to_string(a.seed));
    c.emplace_back("cell_size", fmt::format("{}", a.cell_size));
    const std::string stem = "bias_" + slug(pred.measure_name);
    const BiasMatrix m = bias_matrix(human, pred);

    std::ostringstream values;
    write_bias_csv(values, m);
    std::ostringstream counts;
    write_bias_counts_csv(counts, m);
    std::ostringstream image;
    write_bias_svg(image, m, svg);

    out.add(fs::path(a.out) / (stem + ".csv"), report::provenance_line("bias", c, "# ") + "\n" + values.str());
    out.add(fs::path(a.out) / (stem + "_counts.csv"),
            report::provenance_line("bias", c, "# ") + "\n" + counts.str());
    std::string doc = image.str();
    const auto close = doc.find('>');
    doc.insert(close + 1, "\n<!-- " + report::provenance_line("bias", c, "") + " -->");
    out.add(fs::path(a.out) / (stem + ".svg"), doc);
  }
  out.commit();
  for (const auto& [path, content] : out.files()) std::cout << "wrote " << path.string() << '\n';
  return 0;
}

// ------------------------------------------------------------- confounders

struct ConfounderArgs {
  DatasetArgs data;
  std::size_t n_runs = 100;
  std::uint64_t seed = 0;
  double epsilon = kDefaultEpsilon;
  std::string arch_systems = join(summeval_transformer_systems());
  std::string policy = "propagate";
  std::string out = ".";
  int precision = 2;
};

int run_confounders(const ConfounderArgs& a) {
  const ScoreDataset dataset = a.data.load();
  ConfounderReportOptions options;
  options.n_runs = a.n_runs;
  options.seed = a.seed;
  options.epsilon = a.epsilon;
  options.architecture_systems = parse_system_list(a.arch_systems);
  options.policy = parse_policy(a.policy);
  const ConfounderReport rep = confounder_report(dataset, options);

  Config c;
  a.data.describe(c);
  c.emplace_back("n_runs", std::to_string(a.n_runs));
  c.emplace_back("seed", std::to_string(a.seed));
  c.emplace_back("epsilon", fmt::format("{}", a.epsilon));
  c.emplace_back("arch_systems", join(options.architecture_systems));
  c.emplace_back("policy", a.policy);

  OutputBundle out;
  out.add(fs::path(a.out) / "confounders.md",
          md_report(report::provenance_line("confounders", c, ""), rep.to_table(a.precision)));
  out.add(fs::path(a.out) / "confounders.csv",
          csv_report(report::provenance_line("confounders", c, "# "), rep.to_table(6)));
  out.commit();
  std::cout << rep.to_table(a.precision).to_markdown();
  return 0;
}

// ----------------------------------------------------------------- shuffle

struct ShuffleMakeArgs {
  std::string corpus;
  std::string mode = "same-doc";
  std::size_t k_per_doc = 1;
  std::optional<std::size_t> sample;
  std::size_t n_pairs = 10000;
  std::uint64_t seed = 0;
  std::string out = ".";
};

int run_shuffle_make(const ShuffleMakeArgs& a) {
  const auto corpus = load_corpus(a.corpus);
  ShuffleOptions options;
  options.mode = parse_shuffle_mode(a.mode);
  options.k_per_doc = a.k_per_doc;
  options.sample_size = a.sample;
  options.n_pairs = a.n_pairs;
  options.seed = a.seed;
  const auto pairs = make_shuffle_pairs(corpus, options);

  Config c{{"corpus", a.corpus}, {"mode", a.mode}, {"seed", std::to_string(a.seed)}};
  if (options.mode == ShuffleMode::same_doc) {
    c.emplace_back("k_per_doc", std::to_string(a.k_per_doc));
    c.emplace_back("sample", a.sample ? std::to_string(*a.sample) : "all");
  } else {
    c.emplace_back("pairs", std::to_string(a.n_pairs));
  }

  std::ostringstream pair_file;
  write_pairs(pair_file, pairs);
  std::ostringstream variant_file;
  export_variants(variant_file, pairs);
  OutputBundle out;
  out.add(fs::path(a.out) / "pairs.jsonl", pair_file.str());
  out.add(fs::path(a.out) / "variants.jsonl", variant_file.str());
  out.add(fs::path(a.out) / "provenance.txt", report::provenance_line("shuffle make", c, "") + "\n");
  out.commit();
  std::cout << "wrote " << pairs.size() << " pairs to " << a.out << '\n';
  return 0;
}

struct ShuffleScoreArgs {
  std::string pairs_file;
  std::string variants_file;
  std::string scores;
  std::string scorer;
  std::int64_t bucket_width = 20;
  std::int64_t clamp = 200;
  bool no_buckets = false;
  std::uint64_t seed = 0;
  std::string out = ".";
};

double egr_score(const std::vector<std::string>& sentences) {
  std::vector<std::vector<std::string>> tokens;
  for (const auto& s : sentences) tokens.push_back(text::tokenize(s));
  const EntityGrid grid = detect_entities(tokens);
  return entity_graph_score(grid);
}

int run_shuffle_score(const ShuffleScoreArgs& a) {
  std::ifstream pin(a.pairs_file);
  if (!pin) throw DataError("cannot open pair file '" + a.pairs_file + "'");
  std::ifstream vin(a.variants_file);
  if (!vin) throw DataError("cannot open variant file '" + a.variants_file + "'");
  const auto pairs = read_pairs(pin, vin);
  if (a.scores.empty() == a.scorer.empty()) {
    throw std::invalid_argument("pass exactly one of --scores or --scorer");
  }

  std::map<std::string, double> scores;
  if (!a.scores.empty()) {
    scores = ingest_pair_scores(fs::path(a.scores), variant_ids(pairs)).scores;
  } else if (a.scorer == "egr") {
    for (const auto& p : pairs) {
      scores.emplace(p.positive_id, egr_score(p.positive_text));
      scores.emplace(p.negative_id, egr_score(p.negative_text));
    }
  } else if (a.scorer == "random") {
    Engine engine = make_engine(a.seed, "shuffle-random-scorer");
    for (const auto& id : variant_ids(pairs)) scores.emplace(id, unit(engine));
  } else {
    throw std::invalid_argument("unknown scorer '" + a.scorer + "' (expected egr or random)");
  }

  std::optional<Bucketing> bucketing;
  if (!a.no_buckets) bucketing = Bucketing{a.bucket_width, a.clamp};
  const PairAccuracy acc = pair_accuracy(pairs, scores, bucketing);

  Config c{{"pairs", a.pairs_file}, {"variants", a.variants_file}};
  c.emplace_back(a.scores.empty() ? "scorer" : "scores", a.scores.empty() ? a.scorer : a.scores);
  c.emplace_back("seed", std::to_string(a.seed));
  if (bucketing) {
    c.emplace_back("bucket_width", std::to_string(a.bucket_width));
    c.emplace_back("clamp", std::to_string(a.clamp));
  }

  Table summary{{"n_pairs", "n_correct", "accuracy"},
                {{std::to_string(acc.n_pairs), std::to_string(acc.n_correct),
                  report::format_number(acc.accuracy, 6)}}};
  OutputBundle out;
  out.add(fs::path(a.out) / "shuffle_accuracy.md",
          md_report(report::provenance_line("shuffle score", c, ""), summary));
  out.add(fs::path(a.out) / "shuffle_accuracy.csv",
          csv_report(report::provenance_line("shuffle score", c, "# "), summary));
  if (bucketing) {
    Table buckets{{"bucket_lo", "bucket_hi", "n_pairs", "n_correct", "accuracy"}, {}};
    for (const auto& b : acc.buckets) {
      buckets.rows.push_back({std::to_string(b.lower), std::to_string(b.upper),
                              std::to_string(b.n_pairs), std::to_string(b.n_correct),
                              report::format_number(b.accuracy, 6)});
    }
    out.add(fs::path(a.out) / "shuffle_buckets.csv",
            csv_report(report::provenance_line("shuffle score", c, "# "), buckets));
  }
  out.commit();
  std::cout << summary.to_markdown();
  return 0;
}

// ------------------------------------------------------------ entity stats

struct EntityInput {
  DatasetArgs data;
  std::string corpus;
  std::vector<std::string> grids;

  void add_to(CLI::App* cmd) {
    data.add_to(cmd, false);
    cmd->add_option("--corpus", corpus, "Document JSONL ({doc_id, text} or {doc_id, sentences})");
    cmd->add_option("--grid", grids, "Entity grid TSV file (repeatable)");
  }

  void describe(Config& c) const {
    if (!data.path.empty()) data.describe(c);
    if (!corpus.empty()) c.emplace_back("corpus", corpus);
    for (const auto& g : grids) c.emplace_back("grid", g);
  }

  /// (label, grid) for every input document.
  std::vector<std::pair<std::string, EntityGrid>> load() const {
    const int sources = !data.path.empty() + !corpus.empty() + !grids.empty();
    if (sources != 1) throw std::invalid_argument("pass exactly one of --dataset, --corpus or --grid");
    std::vector<std::pair<std::string, EntityGrid>> out;
    if (!data.path.empty()) {
      for (const auto& r : data.load().records()) {
        out.emplace_back(to_string(r.key()), detect_entities_in_text(r.summary_text));
      }
    } else if (!corpus.empty()) {
      for (const auto& doc : load_corpus(corpus)) {
        std::vector<std::vector<std::string>> tokens;
        for (const auto& s : doc.sentences) tokens.push_back(text::tokenize(s));
        out.emplace_back(doc.id, detect_entities(tokens));
      }
    } else {
      for (const auto& path : grids) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open grid file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        try {
          out.emplace_back(path, parse_entity_grid(ss.str()));
        } catch (const DataError& e) {
          throw DataError(path + ": " + e.what(), e.line());
        }
      }
    }
    return out;
  }
};

int run_entity_stats(const EntityInput& in, const std::string& out_dir) {
  std::vector<EntityGrid> grids;
  for (auto& [label, grid] : in.load()) grids.push_back(std::move(grid));
  const EntityOverlapStats stats = entity_overlap_stats(grids);
  Config c;
  in.describe(c);
  c.emplace_back("stopwords", std::string(kStopwordListVersion));
  Table t{{"n_documents", "prop_docs_no_overlap", "avg_ratio_unlinked_sentences"},
          {{std::to_string(stats.n_documents), report::format_number(stats.prop_docs_no_overlap, 6),
            report::format_number(stats.avg_ratio_unlinked_sentences, 6)}}};
  OutputBundle out;
  out.add(fs::path(out_dir) / "entity_stats.md", md_report(report::provenance_line("entity-stats", c, ""), t));
  out.add(fs::path(out_dir) / "entity_stats.csv", csv_report(report::provenance_line("entity-stats", c, "# "), t));
  out.commit();
  std::cout << t.to_markdown();
  return 0;
}

struct EgrArgs {
  EntityInput input;
  std::string weighting = "role-product";
  bool no_distance_penalty = false;
  std::string out = ".";
};

int run_egr(const EgrArgs& a) {
  EntityGraphConfig config;
  config.weighting = parse_weighting(a.weighting);
  config.distance_penalty = !a.no_distance_penalty;
  Config c;
  a.input.describe(c);
  c.emplace_back("weighting", a.weighting);
  c.emplace_back("distance_penalty", config.distance_penalty ? "true" : "false");
  c.emplace_back("stopwords", std::string(kStopwordListVersion));

  OutputBundle out;
  if (!a.input.data.path.empty() && a.input.corpus.empty() && a.input.grids.empty()) {
    const PredictionSet pred = entity_graph_predictions(a.input.data.load(), config);
    std::ostringstream ss;
    write_predictions(ss, pred);
    out.add(fs::path(a.out) / "egr_predictions.jsonl", ss.str());
    out.add(fs::path(a.out) / "provenance.txt", report::provenance_line("egr", c, "") + "\n");
  } else {
    Table t{{"document", "n_sentences", "n_entities", "score"}, {}};
    for (const auto& [label, grid] : a.input.load()) {
      t.rows.push_back({label, std::to_string(grid.n_sentences()), std::to_string(grid.n_entities()),
                        report::format_number(entity_graph_score(grid, config), 6)});
    }
    out.add(fs::path(a.out) / "egr.csv", csv_report(report::provenance_line("egr", c, "# "), t));
  }
  out.commit();
  for (const auto& [path, content] : out.files()) std::cout << "wrote " << path.string() << '\n';
  return 0;
}

// ------------------------------------------------------------------ ablate

struct AblateArgs {
  DatasetArgs data;
  std::vector<std::string> components;
  std::string level = "system";
  std::string statistic = "tau";
  std::string policy = "propagate";
  std::string out = ".";
  int precision = 2;
};

int run_ablate(const AblateArgs& a) {
  const ScoreDataset dataset = a.data.load();
  std::vector<std::pair<std::string, PredictionSet>> parts;
  for (auto& p : load_predictions_for(a.components, dataset, PredictionContext{}, "--component")) {
    std::string name = p.measure_name;
    parts.emplace_back(std::move(name), std::move(p));
  }
  const AblationReport rep = ablation_report(human_scores(dataset), ComponentSet(std::move(parts)),
                                             parse_level(a.level), parse_statistic(a.statistic),
                                             parse_policy(a.policy));
  Config c;
  a.data.describe(c);
  for (const auto& arg : a.components) c.emplace_back("component", arg);
  c.emplace_back("level", a.level);
  c.emplace_back("statistic", a.statistic);
  c.emplace_back("policy", a.policy);
  OutputBundle out;
  out.add(fs::path(a.out) / "ablation.md",
          md_report(report::provenance_line("ablate", c, ""), rep.to_table(a.precision)));
  out.add(fs::path(a.out) / "ablation.csv", csv_report(report::provenance_line("ablate", c, "# "), rep.to_table(6)));
  out.commit();
  std::cout << rep.to_table(a.precision).to_markdown();
  return 0;
}

// ------------------------------------------------------------------- synth

struct SynthArgs {
  SynthConfig config;
  double means_lo = 1.5;
  double means_hi = 4.5;
  std::vector<double> means;
  std::string out = ".";
};

int run_synth(SynthArgs a) {
  a.config.system_means = a.means.empty() ? linspace(a.means_lo, a.means_hi, a.config.n_systems) : a.means;
  const SynthData data = generate_synthetic(a.config);
  std::string means;
  for (double m : a.config.system_means) means += (means.empty() ? "" : ",") + fmt::format("{}", m);
  Config c{{"n_systems", std::to_string(a.config.n_systems)},
           {"n_docs", std::to_string(a.config.n_docs)},
           {"system_means", means},
           {"intra_signal", fmt::format("{}", a.config.intra_signal)},
           {"noise_sd", fmt::format("{}", a.config.noise_sd)},
           {"score_range", fmt::format("{}..{}", a.config.score_range.lo, a.config.score_range.hi)},
           {"seed", std::to_string(a.config.seed)}};
  std::ostringstream ds;
  write_dataset(ds, data.dataset);
  std::ostringstream pred;
  write_predictions(pred, data.pred);
  OutputBundle out;
  out.add(fs::path(a.out) / "dataset.jsonl", ds.str());
  out.add(fs::path(a.out) / "predictions.jsonl", pred.str());
  out.add(fs::path(a.out) / "provenance.txt", report::provenance_line("synth", c, "") + "\n");
  out.commit();
  std::cout << "wrote " << data.dataset.size() << " records to " << a.out << '\n';
  return 0;
}

// ------------------------------------------------------------------- stats

struct StatsArgs {
  DatasetArgs data;
  std::vector<std::string> preds;
  std::size_t bin_width = 10;
  std::size_t n_resamples = 1000;
  std::uint64_t seed = 0;
  std::string arch_systems = join(summeval_transformer_systems());
  std::string out = ".";
};

int run_stats(const StatsArgs& a) {
  if (a.bin_width == 0) throw std::invalid_argument("--bin-width must be positive");
  const ScoreDataset dataset = a.data.load();
  const PredictionContext ctx{a.seed, parse_system_list(a.arch_systems)};
  Config c;
  a.data.describe(c);
  for (const auto& arg : a.preds) c.emplace_back("pred", arg);
  c.emplace_back("bin_width", std::to_string(a.bin_width));
  c.emplace_back("n_resamples", std::to_string(a.n_resamples));
  c.emplace_back("seed", std::to_string(a.seed));

  // Summary length in whitespace tokens, per system.
  std::map<std::string, std::map<std::size_t, std::size_t>> hist;
  for (const auto& r : dataset.records()) ++hist[r.system_id][text::tokenize(r.summary_text).size() / a.bin_width];
  Table lengths{{"system", "bin_lo", "bin_hi", "count"}, {}};
  for (const auto& sys : dataset.systems()) {
    for (const auto& [bin, count] : hist[sys]) {
      lengths.rows.push_back({sys, std::to_string(bin * a.bin_width), std::to_string((bin + 1) * a.bin_width),
                              std::to_string(count)});
    }
  }

  OutputBundle out;
  out.add(fs::path(a.out) / "length_histogram.csv",
          csv_report(report::provenance_line("stats", c, "# "), lengths));
  const PredictionSet human = human_scores(dataset);
  for (const auto& pred : load_predictions_for(a.preds, dataset, ctx, "--pred")) {
    std::optional<BootstrapOptions> boot;
    if (a.n_resamples > 0) {
      boot = BootstrapOptions{};
      boot->n_resamples = a.n_resamples;
      boot->seed = derive_seed(a.seed, "intra:" + pred.measure_name);
    }
    Table t{{"system", "tau", "lo", "hi", "n_docs"}, {}};
    for (const auto& row : per_system_correlation(human, pred, boot)) {
      t.rows.push_back({row.system_id, report::format_number(row.tau, 6),
                        row.ci ? report::format_number(row.ci->lo, 6) : "",
                        row.ci ? report::format_number(row.ci->hi, 6) : "", std::to_string(row.n_docs)});
    }
    out.add(fs::path(a.out) / ("intra_" + slug(pred.measure_name) + ".csv"),
            csv_report(report::provenance_line("stats", c, "# "), t));
  }
  out.commit();
  for (const auto& [path, content] : out.files()) std::cout << "wrote " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meta-evaluation of summary coherence measures"};
  app.set_version_flag("--version", std::string(report::kVersion));
  app.require_subcommand(1);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score prediction sets against human judgements");
  ev.data.add_to(evaluate);
  evaluate->add_option("--pred", ev.preds, "NAME=PATH or NAME=builtin:KIND (repeatable)");
  evaluate->add_flag("--with-hum", ev.with_hum, "Add the worst-annotator human baseline row");
  evaluate->add_option("--level", ev.levels, "Restrict to levels: system, summary, pairwise, intra");
  evaluate->add_option("--n-resamples", ev.n_resamples, "Bootstrap resamples (0 disables intervals)")
      ->capture_default_str();
  evaluate->add_option("--seed", ev.seed)->capture_default_str();
  evaluate->add_option("--policy", ev.policy, "propagate or skip")->capture_default_str();
  evaluate->add_option("--arch-systems", ev.arch_systems, "Systems flagged by builtin:architecture")
      ->capture_default_str();
  evaluate->add_option("--precision", ev.precision)->capture_default_str();
  evaluate->add_option("--out", ev.out, "Output directory")->capture_default_str();

  BiasArgs bi;
  auto* bias = app.add_subcommand("bias", "Bias matrices as CSV and SVG");
  bi.data.add_to(bias);
  bias->add_option("--pred", bi.preds, "NAME=PATH or NAME=builtin:KIND (repeatable)")->required();
  bias->add_option("--seed", bi.seed)->capture_default_str();
  bias->add_option("--arch-systems", bi.arch_systems)->capture_default_str();
  bias->add_option("--cell-size", bi.cell_size, "SVG cell size in pixels")->capture_default_str();
  bias->add_option("--out", bi.out, "Output directory")->capture_default_str();

  ConfounderArgs co;
  auto* confounders = app.add_subcommand("confounders", "Capitalization, architecture and upper-bound table");
  co.data.add_to(confounders);
  confounders->add_option("--n-runs", co.n_runs, "Noise runs for the randomized columns")->capture_default_str();
  confounders->add_option("--seed", co.seed)->capture_default_str();
  confounders->add_option("--epsilon", co.epsilon, "Noise amplitude")->capture_default_str();
  confounders->add_option("--arch-systems", co.arch_systems)->capture_default_str();
  confounders->add_option("--policy", co.policy)->capture_default_str();
  confounders->add_option("--precision", co.precision)->capture_default_str();
  confounders->add_option("--out", co.out, "Output directory")->capture_default_str();

  auto* shuffle = app.add_subcommand("shuffle", "Sentence-shuffle test harness");
  shuffle->require_subcommand(1);
  ShuffleMakeArgs sm;
  auto* make = shuffle->add_subcommand("make", "Generate original/shuffled pairs");
  make->add_option("--corpus", sm.corpus, "Document JSONL")->required();
  make->add_option("--mode", sm.mode, "same-doc or cross-doc")->capture_default_str();
  make->add_option("--k", sm.k_per_doc, "Shuffles per document (same-doc)")->capture_default_str();
  make->add_option("--sample", sm.sample, "Number of documents to sample (same-doc)");
  make->add_option("--pairs", sm.n_pairs, "Number of pairs (cross-doc)")->capture_default_str();
  make->add_option("--seed", sm.seed)->capture_default_str();
  make->add_option("--out", sm.out, "Output directory")->capture_default_str();
  ShuffleScoreArgs ss;
  auto* score = shuffle->add_subcommand("score", "Pair accuracy, overall and by length difference");
  score->add_option("--pairs-file", ss.pairs_file)->required();
  score->add_option("--variants-file", ss.variants_file)->required();
  score->add_option("--scores", ss.scores, "Score JSONL {variant_id, score}");
  score->add_option("--scorer", ss.scorer, "Builtin scorer: egr or random");
  score->add_option("--bucket-width", ss.bucket_width)->capture_default_str();
  score->add_option("--clamp", ss.clamp)->capture_default_str();
  score->add_flag("--no-buckets", ss.no_buckets);
  score->add_option("--seed", ss.seed)->capture_default_str();
  score->add_option("--out", ss.out, "Output directory")->capture_default_str();

  EntityInput es;
  std::string es_out = ".";
  auto* entity_stats = app.add_subcommand("entity-stats", "Entity overlap statistics");
  es.add_to(entity_stats);
  entity_stats->add_option("--out", es_out, "Output directory")->capture_default_str();

  EgrArgs eg;
  auto* egr = app.add_subcommand("egr", "Entity graph coherence scores");
  eg.input.add_to(egr);
  egr->add_option("--weighting", eg.weighting, "unweighted, shared-count or role-product")->capture_default_str();
  egr->add_flag("--no-distance-penalty", eg.no_distance_penalty);
  egr->add_option("--out", eg.out, "Output directory")->capture_default_str();

  AblateArgs ab;
  auto* ablate = app.add_subcommand("ablate", "Pairwise component-sum ablation table");
  ab.data.add_to(ablate);
  ablate->add_option("--component", ab.components, "NAME=PATH (repeatable)")->required();
  ablate->add_option("--level", ab.level)->capture_default_str();
  ablate->add_option("--statistic", ab.statistic, "tau or accuracy")->capture_default_str();
  ablate->add_option("--policy", ab.policy)->capture_default_str();
  ablate->add_option("--precision", ab.precision)->capture_default_str();
  ablate->add_option("--out", ab.out, "Output directory")->capture_default_str();

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset and prediction set");
  synth->add_option("--n-systems", sy.config.n_systems)->capture_default_str();
  synth->add_option("--n-docs", sy.config.n_docs)->capture_default_str();
  synth->add_option("--means", sy.means, "Explicit system means (overrides --means-lo/--means-hi)")
      ->delimiter(',');
  synth->add_option("--means-lo", sy.means_lo)->capture_default_str();
  synth->add_option("--means-hi", sy.means_hi)->capture_default_str();
  synth->add_option("--intra-signal", sy.config.intra_signal)->capture_default_str();
  synth->add_option("--noise-sd", sy.config.noise_sd)->capture_default_str();
  synth->add_option("--score-min", sy.config.score_range.lo)->capture_default_str();
  synth->add_option("--score-max", sy.config.score_range.hi)->capture_default_str();
  synth->add_option("--seed", sy.config.seed)->capture_default_str();
  synth->add_option("--out", sy.out, "Output directory")->capture_default_str();

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Per-system length histograms and intra-system correlations");
  st.data.add_to(stats);
  stats->add_option("--pred", st.preds, "NAME=PATH or NAME=builtin:KIND (repeatable)");
  stats->add_option("--bin-width", st.bin_width, "Histogram bin width in tokens")->capture_default_str();
  stats->add_option("--n-resamples", st.n_resamples)->capture_default_str();
  stats->add_option("--seed", st.seed)->capture_default_str();
  stats->add_option("--arch-systems", st.arch_systems)->capture_default_str();
  stats->add_option("--out", st.out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evaluate) return run_evaluate(ev);
    if (*bias) return run_bias(bi);
    if (*confounders) return run_confounders(co);
    if (*make) return run_shuffle_make(sm);
    if (*score) return run_shuffle_score(ss);
    if (*entity_stats) return run_entity_stats(es, es_out);
    if (*egr) return run_egr(eg);
    if (*ablate) return run_ablate(ab);
    if (*synth) return run_synth(sy);
    if (*stats) return run_stats(st);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const CoverageError& e) {
    std::cerr << "coverage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
