#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cohmeta/bias.hpp"
#include "cohmeta/confounders.hpp"
#include "cohmeta/data.hpp"
#include "cohmeta/entity.hpp"
#include "cohmeta/errors.hpp"
#include "cohmeta/rank_stats.hpp"
#include "cohmeta/report.hpp"
#include "cohmeta/shuffle.hpp"
#include "cohmeta/synth.hpp"

namespace py = pybind11;
using namespace cohmeta;

namespace {

using ScoreMap = std::map<std::pair<std::string, std::string>, double>;

// Prediction sets cross the boundary as {(doc_id, system_id): score}.
ScoreMap to_python(const PredictionSet& p) {
  ScoreMap out;
  for (const auto& [key, value] : p.scores) out.emplace(std::pair{key.doc_id, key.system_id}, value);
  return out;
}

PredictionSet from_python(const ScoreMap& scores, std::string name = "") {
  PredictionSet p{std::move(name), {}};
  for (const auto& [key, value] : scores) p.scores.emplace(SummaryKey{key.first, key.second}, value);
  return p;
}

py::dict metric_dict(const MetricResult& r) {
  py::dict d;
  d["level"] = std::string(to_string(r.level));
  d["statistic"] = std::string(to_string(r.statistic));
  d["value"] = r.value;
  if (r.ci) {
    d["ci"] = py::make_tuple(r.ci->lo, r.ci->hi);
  } else {
    d["ci"] = py::none();
  }
  d["n_units"] = r.n_units;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cohmeta, m) {
  m.doc() = "Meta-evaluation of summary coherence measures";
  m.attr("__version__") = std::string(report::kVersion);

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<CoverageError>(m, "CoverageError", PyExc_KeyError);

  m.def("kendall_tau_b",
        [](const std::vector<double>& x, const std::vector<double>& y) { return kendall_tau_b(x, y); },
        py::arg("x"), py::arg("y"), "Kendall tau-b; None when either input is constant.");
  m.def("pairwise_accuracy",
        [](const std::vector<double>& h, const std::vector<double>& p) { return pairwise_accuracy(h, p); },
        py::arg("human"), py::arg("pred"));

  py::class_<ScoreDataset>(m, "ScoreDataset")
      .def_property_readonly("systems", &ScoreDataset::systems)
      .def_property_readonly("documents", &ScoreDataset::documents)
      .def_property_readonly("n_annotators", &ScoreDataset::n_annotators)
      .def("__len__", &ScoreDataset::size)
      .def("records", [](const ScoreDataset& d) {
        py::list out;
        for (const auto& r : d.records()) {
          py::dict row;
          row["doc_id"] = r.doc_id;
          row["system_id"] = r.system_id;
          row["summary_text"] = r.summary_text;
          row["scores"] = r.annotator_scores;
          out.append(row);
        }
        return out;
      });

  m.def("load_dataset",
        [](const std::filesystem::path& path, const std::string& format, double lo, double hi) {
          LoadOptions options;
          options.range = {lo, hi};
          return load_dataset(path, parse_dataset_format(format), options);
        },
        py::arg("path"), py::arg("format") = "canonical", py::arg("score_min") = 1.0,
        py::arg("score_max") = 5.0);
  m.def("load_predictions",
        [](const std::filesystem::path& path) { return to_python(load_predictions(path, path.stem().string())); },
        py::arg("path"));
  m.def("human_scores", [](const ScoreDataset& d) { return to_python(human_scores(d)); }, py::arg("dataset"));

  m.def("evaluate",
        [](const ScoreMap& human, const ScoreMap& pred, const std::string& level, const std::string& statistic,
           const std::string& policy, std::size_t n_resamples, std::uint64_t seed) {
          const auto h = from_python(human);
          const auto p = from_python(pred);
          if (n_resamples == 0) {
            return metric_dict(evaluate(h, p, parse_level(level), parse_statistic(statistic), parse_policy(policy)));
          }
          BootstrapOptions boot;
          boot.n_resamples = n_resamples;
          boot.seed = seed;
          boot.policy = parse_policy(policy);
          return metric_dict(evaluate_with_ci(h, p, parse_level(level), parse_statistic(statistic), boot));
        },
        py::arg("human"), py::arg("pred"), py::arg("level"), py::arg("statistic") = "tau",
        py::arg("policy") = "propagate", py::arg("n_resamples") = 0, py::arg("seed") = 0);

  m.def("confounder_scores",
        [](const ScoreDataset& d, const std::string& kind, const std::set<std::string>& systems,
           std::uint64_t seed) {
          ConfounderKind k;
          if (kind == "capitalization") {
            k = Capitalization{};
          } else if (kind == "architecture") {
            k = Indicator{systems.empty() ? summeval_transformer_systems() : systems};
          } else if (kind == "upper-bound") {
            k = UpperBound{};
          } else if (kind == "random") {
            k = RandomUniform{};
          } else {
            throw py::value_error("unknown confounder '" + kind + "'");
          }
          return to_python(confounder_scores(d, k, seed));
        },
        py::arg("dataset"), py::arg("kind"), py::arg("systems") = std::set<std::string>{}, py::arg("seed") = 0);

  m.def("confounder_report",
        [](const ScoreDataset& d, std::size_t n_runs, std::uint64_t seed, double epsilon) {
          ConfounderReportOptions o;
          o.n_runs = n_runs;
          o.seed = seed;
          o.epsilon = epsilon;
          const auto rep = confounder_report(d, o);
          py::dict out;
          for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            py::dict row;
            for (std::size_t j = 0; j < rep.columns.size(); ++j) row[py::str(rep.columns[j])] = rep.values[i][j];
            out[py::str(rep.rows[i])] = row;
          }
          return out;
        },
        py::arg("dataset"), py::arg("n_runs") = 100, py::arg("seed") = 0, py::arg("epsilon") = kDefaultEpsilon);

  m.def("bias_matrix",
        [](const ScoreMap& human, const ScoreMap& pred) {
          const BiasMatrix b = bias_matrix(from_python(human), from_python(pred));
          return py::make_tuple(b.system_order, b.values, b.pair_counts);
        },
        py::arg("human"), py::arg("pred"), "Returns (system_order, values, pair_counts).");

  m.def("entity_graph_score",
        [](const std::string& grid_tsv, bool distance_penalty) {
          EntityGraphConfig c;
          c.distance_penalty = distance_penalty;
          return entity_graph_score(parse_entity_grid(grid_tsv), c);
        },
        py::arg("grid_tsv"), py::arg("distance_penalty") = true);
  m.def("detect_entities",
        [](const std::string& text) { return serialize_entity_grid(detect_entities_in_text(text)); },
        py::arg("text"), "Entity grid TSV detected from raw text.");

  m.def("shuffle_sentences", &shuffle_sentences, py::arg("sentences"), py::arg("seed"));

  m.def("generate_synthetic",
        [](std::size_t n_systems, std::size_t n_docs, std::vector<double> means, double intra_signal,
           double noise_sd, std::uint64_t seed) {
          SynthConfig c;
          c.n_systems = n_systems;
          c.n_docs = n_docs;
          c.system_means = means.empty() ? linspace(1.5, 4.5, n_systems) : std::move(means);
          c.intra_signal = intra_signal;
          c.noise_sd = noise_sd;
          c.seed = seed;
          SynthData data = generate_synthetic(c);
          return py::make_tuple(std::move(data.dataset), to_python(data.pred));
        },
        py::arg("n_systems") = 17, py::arg("n_docs") = 100, py::arg("system_means") = std::vector<double>{},
        py::arg("intra_signal") = 0.0, py::arg("noise_sd") = 0.75, py::arg("seed") = 0);
}
