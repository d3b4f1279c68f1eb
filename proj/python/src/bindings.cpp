#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "treelimit/clt.hpp"
#include "treelimit/experiment.hpp"
#include "treelimit/growth.hpp"
#include "treelimit/increments.hpp"
#include "treelimit/io.hpp"
#include "treelimit/measures.hpp"

namespace py = pybind11;
using namespace treelimit;

namespace {

// Words cross the boundary as strings of '0'/'1'.
std::vector<std::string> to_strings(const std::vector<Word>& ws) {
  std::vector<std::string> out;
  out.reserve(ws.size());
  for (const auto& w : ws) out.push_back(w.to_string());
  return out;
}

std::vector<Word> to_words(const std::vector<std::string>& ss) {
  std::vector<Word> out;
  out.reserve(ss.size());
  for (const auto& s : ss) out.push_back(Word::parse(s));
  return out;
}

using PyMeasure = std::shared_ptr<DyadicMeasure>;

PyMeasure expose(const Measure& mu) { return std::const_pointer_cast<DyadicMeasure>(mu); }

py::dict report_dict(const CovarianceReport& r) {
  py::dict d;
  d["nodes"] = to_strings(r.nodes);
  d["n"] = r.n;
  d["reps"] = r.reps;
  d["theoretical"] = r.theoretical;
  d["empirical"] = r.empirical;
  d["se"] = r.se;
  d["pass_fraction"] = r.pass_fraction;
  d["low_power"] = r.low_power;
  d["passed"] = r.passed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Subtree-size limits of random binary trees";

  py::class_<BinaryTree>(m, "Tree")
      .def(py::init([](const std::vector<std::string>& words) {
             return BinaryTree::from_words(to_words(words));
           }),
           py::arg("words"))
      .def("__len__", &BinaryTree::size)
      .def_property_readonly("height", &BinaryTree::height)
      .def("words", [](const BinaryTree& x) { return to_strings(x.words()); })
      .def("boundary", [](const BinaryTree& x) { return to_strings(x.boundary()); })
      .def("subtree_size", [](const BinaryTree& x, const std::string& u) { return x.subtree_size(Word::parse(u)); })
      .def("t", [](const BinaryTree& x, const std::string& u) { return x.t(Word::parse(u)); })
      .def("__contains__", [](const BinaryTree& x, const std::string& u) { return x.contains(Word::parse(u)); })
      .def("__eq__", [](const BinaryTree& a, const BinaryTree& b) { return a == b; });

  py::class_<DyadicMeasure, PyMeasure>(m, "Measure")
      .def("mass", [](const DyadicMeasure& mu, const std::string& u) { return mu.mass(Word::parse(u)); })
      .def("describe", &DyadicMeasure::describe)
      .def("__repr__", [](const DyadicMeasure& mu) { return "<Measure " + mu.describe() + ">"; });

  m.def("parse_measure", [](const std::string& spec) { return expose(io::parse_measure(spec)); }, py::arg("spec"));
  m.def("boundary_measure", [](const BinaryTree& x) { return expose(boundary_measure(x)); }, py::arg("tree"));

  m.def(
      "grow",
      [](const std::string& model, std::size_t n, std::uint64_t seed, const std::string& measure) {
        Rng rng(seed);
        if (model == "dst") return dst_grow(io::parse_measure(measure), n, rng).tree();
        if (model == "bst") return bst_grow(n, rng).tree();
        if (model == "remy") return remy_grow(n, rng).tree();
        if (model == "catalan") return uniform_tree(n, rng);
        throw std::invalid_argument("unknown model '" + model + "'");
      },
      py::arg("model"), py::arg("n"), py::arg("seed") = 0, py::arg("measure") = "uniform");

  m.def(
      "increments",
      [](const std::string& measure, std::size_t n, const std::string& node, std::uint64_t seed) {
        Rng rng(seed);
        const Trajectory tr = dst_grow(io::parse_measure(measure), n, rng);
        const auto y = extract_increments(tr, Word::parse(node));
        return std::vector<int>(y.values.begin(), y.values.end());
      },
      py::arg("measure"), py::arg("n"), py::arg("node"), py::arg("seed") = 0);
  m.def("increment_pmf", [](const PyMeasure& mu, const std::string& u) { return increment_pmf(*mu, Word::parse(u)); });

  m.def("theoretical_cov", [](const PyMeasure& mu, const std::vector<std::string>& nodes) {
    return theoretical_cov_matrix(*mu, to_words(nodes));
  });
  m.def(
      "clt_experiment",
      [](const std::string& measure, const std::vector<std::string>& nodes, std::size_t n, std::size_t reps,
         std::uint64_t seed, unsigned workers) {
        const Measure mu = io::parse_measure(measure);
        const auto words = to_words(nodes);
        py::gil_scoped_release release;
        return clt_experiment(mu, words, {n, reps, seed, workers});
      },
      py::arg("measure"), py::arg("nodes"), py::arg("n"), py::arg("reps"), py::arg("seed") = 0,
      py::arg("workers") = 1);
  py::class_<CovarianceReport>(m, "CovarianceReport").def("as_dict", &report_dict);

  m.def("selftest", [](std::uint64_t seed) { return experiment::selftest(seed).passed; }, py::arg("seed") = 0);
}
