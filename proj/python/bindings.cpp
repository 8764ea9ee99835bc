#include "decgan/cli.hpp"
#include "decgan/decoupler.hpp"
#include "decgan/errors.hpp"
#include "decgan/hypergraph.hpp"
#include "decgan/metrics.hpp"
#include "decgan/network.hpp"
#include "decgan/trainer.hpp"

#include <json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace decgan;

namespace {

// JSON crosses the boundary as text; the Python side parses it.
py::object parse_json(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict dataset_dict(const SyntheticData& data) {
  py::list adjacency, features, labels, ids;
  for (const BrainNetwork& s : data.dataset.subjects()) {
    adjacency.append(s.adjacency());
    features.append(s.features());
    labels.append(s.label());
    ids.append(s.id());
  }
  py::dict truth;
  for (const auto& [label, circuits] : data.truth) truth[py::int_(label)] = circuits;
  py::dict out;
  out["ids"] = ids;
  out["adjacency"] = adjacency;
  out["features"] = features;
  out["labels"] = labels;
  out["truth"] = truth;
  return out;
}

SyntheticSpec make_spec(Index n_nodes, Index n_features, int samples_per_class,
                        const CircuitCollection& circuits, double sc_boost, double bold_rho,
                        std::uint64_t seed) {
  SyntheticSpec s;
  s.n_nodes = n_nodes;
  s.n_features = n_features;
  s.samples_per_class = samples_per_class;
  s.planted_circuits = circuits;
  s.sc_boost = sc_boost;
  s.bold_rho = bold_rho;
  s.seed = seed;
  return s;
}

}  // namespace

PYBIND11_MODULE(_decgan, m) {
  m.doc() = "Circuit decoupling and hypergraph analysis of brain networks";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.attr("__version__") = kArtifactVersion;

  m.def(
      "generate_synthetic",
      [](Index n_nodes, Index n_features, int samples_per_class, const CircuitCollection& circuits,
         double sc_boost, double bold_rho, std::uint64_t seed) {
        return dataset_dict(generate_synthetic(make_spec(n_nodes, n_features, samples_per_class,
                                                         circuits, sc_boost, bold_rho, seed)));
      },
      py::arg("n_nodes") = 20, py::arg("n_features") = 64, py::arg("samples_per_class") = 100,
      py::arg("circuits") = CircuitCollection{{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}},
      py::arg("sc_boost") = 0.5, py::arg("bold_rho") = 0.6, py::arg("seed") = 7);

  m.def(
      "decouple",
      [](const Matrix& features, const Matrix& adjacency, int t, int k, std::uint64_t seed) {
        DecouplerConfig cfg;
        cfg.t = t;
        cfg.k = k;
        Rng rng(seed);
        Decoupler dec(cfg, features.cols(), rng);
        const DecouplingOutput out = dec.decouple(features, adjacency);
        py::dict d;
        d["circuits"] = out.circuits;
        d["supplement"] = out.supplement;
        d["sparse_adjacencies"] = out.sparse_adjacencies;
        d["residual_adjacency"] = out.residual_adjacency;
        d["soft_membership"] = out.soft_membership;
        return d;
      },
      py::arg("features"), py::arg("adjacency"), py::arg("t") = 2, py::arg("k") = 5,
      py::arg("seed") = 0, "Decouple one network with freshly initialised parameters.");

  m.def(
      "laplacian",
      [](const CircuitCollection& circuits, Index n) {
        return Matrix(laplacian(embed_circuits(circuits, n)));
      },
      py::arg("circuits"), py::arg("n_vertices"));
  m.def(
      "spectral_similarity",
      [](const CircuitCollection& a, const CircuitCollection& b, Index n) {
        return spectral_similarity(embed_circuits(a, n), embed_circuits(b, n));
      },
      py::arg("a"), py::arg("b"), py::arg("n_vertices"));
  m.def("spatial_similarity", &spatial_similarity, py::arg("a"), py::arg("b"));
  m.def(
      "circuit_recovery",
      [](const CircuitCollection& predicted, const CircuitCollection& truth) {
        return circuit_recovery(predicted, truth).score;
      },
      py::arg("predicted"), py::arg("truth"));

  m.def(
      "binary_metrics",
      [](const std::vector<int>& predictions, const std::vector<int>& labels, int positive) {
        const BinaryMetrics b = compute_metrics(predictions, labels, positive);
        py::dict d;
        d["acc"] = b.acc;
        d["sen"] = b.sen;
        d["spe"] = b.spe;
        d["f1"] = b.f1;
        d["undefined"] = b.undefined;
        return d;
      },
      py::arg("predictions"), py::arg("labels"), py::arg("positive") = 1);
  m.def("auc", &auc, py::arg("scores"), py::arg("positive"));

  m.def(
      "cross_validate",
      [](const std::string& config_json, Index n_nodes, Index n_features, int samples_per_class,
         const CircuitCollection& circuits, std::uint64_t data_seed) {
        TrainConfig config;
        from_json(nlohmann::json::parse(config_json), config);
        const SyntheticData data = generate_synthetic(make_spec(
            n_nodes, n_features, samples_per_class, circuits, 0.5, 0.6, data_seed));
        RunOptions opt;
        opt.truth = &data.truth;
        MetricsReport report;
        {
          py::gil_scoped_release release;
          report = run_cv(data.dataset, config, opt);
        }
        return parse_json(report_to_json(report));
      },
      py::arg("config_json") = "{}", py::arg("n_nodes") = 20, py::arg("n_features") = 64,
      py::arg("samples_per_class") = 100,
      py::arg("circuits") = CircuitCollection{{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}},
      py::arg("data_seed") = 7,
      "Generate a synthetic dataset and cross-validate on it; returns the metrics report.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        py::gil_scoped_release release;
        return run_cli(args);
      },
      py::arg("args"), "Run a command-line invocation in process; returns the exit code.");
}
