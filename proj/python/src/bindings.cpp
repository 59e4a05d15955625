// Python bindings for the numeric core and the file-level pipeline.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uekit/cli.hpp"
#include "uekit/config.hpp"
#include "uekit/consistency_scorers.hpp"
#include "uekit/ensemble.hpp"
#include "uekit/errors.hpp"
#include "uekit/internal_scorers.hpp"
#include "uekit/metrics.hpp"
#include "uekit/trace.hpp"
#include "uekit/transforms.hpp"

#include <sstream>

namespace py = pybind11;
using namespace uekit;

namespace {

ScoredDataset make_ds(std::vector<double> scores, std::vector<int> labels) {
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  return {std::move(scores), std::move(labels)};
}

SemanticGraph graph(const Eigen::MatrixXd& w) { return build_graph_from_weights(w); }

}  // namespace

PYBIND11_MODULE(_uekit, m) {
  m.doc() = "uncertainty scores and evaluation for LLM generations";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<MetricError>(m, "MetricError", PyExc_ValueError);

  m.attr("SENTINEL") = kSentinel;

  m.def("auroc", [](std::vector<double> s, std::vector<int> l) { return auroc(make_ds(std::move(s), std::move(l))); },
        py::arg("scores"), py::arg("labels"));
  m.def("prr", [](std::vector<double> s, std::vector<int> l) { return prr(make_ds(std::move(s), std::move(l))); },
        py::arg("scores"), py::arg("labels"));
  m.def("rejection_curve",
        [](std::vector<double> s, std::vector<int> l) { return rejection_curve(make_ds(std::move(s), std::move(l))); },
        py::arg("scores"), py::arg("labels"));
  m.def("threshold_at_recall",
        [](std::vector<double> s, std::vector<int> l, double r) {
          return threshold_at_recall(make_ds(std::move(s), std::move(l)), r);
        },
        py::arg("scores"), py::arg("labels"), py::arg("recall"));
  m.def("recall_at",
        [](std::vector<double> s, std::vector<int> l, double t) { return recall_at(make_ds(std::move(s), std::move(l)), t); },
        py::arg("scores"), py::arg("labels"), py::arg("threshold"));
  m.def("are",
        [](std::vector<double> cs, std::vector<int> cl, std::vector<double> ts, std::vector<int> tl, double step) {
          return are(make_ds(std::move(cs), std::move(cl)), make_ds(std::move(ts), std::move(tl)), recall_targets(step));
        },
        py::arg("cal_scores"), py::arg("cal_labels"), py::arg("test_scores"), py::arg("test_labels"),
        py::arg("step") = 0.001);

  // Graph scorers over a symmetric similarity (weight) matrix.
  m.def("degmat", [](const Eigen::MatrixXd& w) { return degmat(graph(w)); }, py::arg("weights"));
  m.def("sum_eigv", [](const Eigen::MatrixXd& w) { return sum_eigv(graph(w)); }, py::arg("weights"));
  m.def("kle", [](const Eigen::MatrixXd& w, double t) { return kle(graph(w), t); }, py::arg("weights"),
        py::arg("t") = 0.3);
  m.def("eccentricity",
        [](const Eigen::MatrixXd& w, int k, double thr) { return eccentricity(graph(w), {k, thr}); },
        py::arg("weights"), py::arg("k") = -1, py::arg("eigen_threshold") = 0.9);
  m.def("eccentricity_c",
        [](const Eigen::MatrixXd& w, std::size_t j, int k, double thr) {
          return eccentricity_c(graph(w), j, {k, thr});
        },
        py::arg("weights"), py::arg("j") = 0, py::arg("k") = -1, py::arg("eigen_threshold") = 0.9);
  m.def("degmat_c", [](const Eigen::MatrixXd& w, std::size_t j) { return degmat_c(graph(w), j); }, py::arg("weights"),
        py::arg("j") = 0);
  m.def("inside_eigenscore", py::overload_cast<const Eigen::MatrixXd&, double>(&inside_eigenscore), py::arg("z"),
        py::arg("alpha") = 1e-3);
  m.def("cluster_size_entropy", &cluster_size_entropy, py::arg("sizes"));

  m.def("typo", [](const std::string& s, int count, std::uint64_t seed) { return typo(s, count, seed); },
        py::arg("text"), py::arg("count") = 1, py::arg("seed") = 0);

  // Runs the command-line tool in-process; returns (exit_code, stdout, stderr).
  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int rc;
          {
            py::gil_scoped_release nogil;
            rc = cli_main(args, out, err);
          }
          return py::make_tuple(rc, out.str(), err.str());
        },
        py::arg("args"));
}
