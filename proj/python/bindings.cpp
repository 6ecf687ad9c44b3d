#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dialeval/demo.hpp"
#include "dialeval/errors.hpp"
#include "dialeval/promptkit.hpp"
#include "dialeval/ranker.hpp"
#include "dialeval/scorer.hpp"
#include "dialeval/stats.hpp"

namespace py = pybind11;
using namespace dialeval;

namespace {

const ScoreScale& scale_named(const std::string& name) { return builtin_banks().scale(name); }

py::dict correlation_dict(const Correlation& c) {
  py::dict d;
  d["coefficient"] = c.coefficient;
  d["p_value"] = c.p_value;
  d["n"] = c.n;
  return d;
}

py::list ranking_list(const std::vector<RankedSystem>& ranked) {
  py::list out;
  for (const auto& r : ranked) {
    py::dict d;
    d["system"] = r.rating.key.label();
    d["mean"] = r.rating.mean;
    d["n"] = r.rating.n;
    d["rank"] = r.rank;
    d["tied"] = r.tied;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_dialeval, m) {
  m.doc() = "Dialog evaluation via prompting: statistics, label parsing and the offline demo.";
  m.attr("__version__") = "0.1.0";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (e.kind() + ": " + e.what()).c_str());
    }
  });

  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) {
    return correlation_dict(pearson(x, y));
  }, py::arg("x"), py::arg("y"));
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) {
    return correlation_dict(spearman(x, y));
  }, py::arg("x"), py::arg("y"));
  m.def("correlation_p_value", &correlation_p_value, py::arg("r"), py::arg("n"));
  m.def("average_ranks", [](const std::vector<double>& x) { return average_ranks(x); }, py::arg("x"));
  m.def("format_p", &format_p, py::arg("p"));

  m.def("scale_labels", [](const std::string& name) { return scale_named(name).labels(); },
        py::arg("scale") = "ieval-3");
  m.def("parse_label", [](const std::string& completion, const std::string& scale) {
    return parse_label(completion, scale_named(scale));
  }, py::arg("completion"), py::arg("scale") = "ieval-3");
  m.def("verbalize", [](const std::string& label, const std::string& scale) {
    return Verbalizer(scale_named(scale))(label);
  }, py::arg("label"), py::arg("scale") = "ieval-3");
  m.def("all_designs", &all_designs);

  m.def("run_demo", [](const std::filesystem::path& out_dir) {
    DemoResult r;
    {
      py::gil_scoped_release release;
      r = run_demo(out_dir);
    }
    py::dict out;
    out["dialogs"] = r.corpus.dialogs.size();
    out["files"] = r.files;
    py::dict rankings;
    py::dict correlations;
    for (const auto& [design, agg] : r.ratings) rankings[py::str(design)] = ranking_list(rank(agg.ratings));
    for (const auto& [design, c] : r.correlations) correlations[py::str(design)] = correlation_dict(c.report.result);
    out["rankings"] = rankings;
    out["correlations"] = correlations;
    return out;
  }, py::arg("out_dir"));
}
