#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "rsclf/config.hpp"
#include "rsclf/error.hpp"
#include "rsclf/eval.hpp"
#include "rsclf/pipeline.hpp"

namespace py = pybind11;
using namespace rsclf;

namespace {

Corpus make_corpus(const std::vector<std::string>& texts, const std::vector<Label>& labels) {
  if (texts.size() != labels.size()) throw UsageError("texts and labels differ in length");
  Corpus c;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("labels must be 0 or 1");
    c.docs.push_back({texts[i], labels[i]});
  }
  return c;
}

RunConfig parse_config(const std::string& json) { return RunConfig::parse(json); }

py::dict prediction_dict(const Prediction& p) {
  py::dict d;
  d["label"] = p.label;
  d["label_name"] = p.label_name;
  d["score"] = p.score;
  d["oov"] = p.oov;
  return d;
}

py::object json_to_py(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

}  // namespace

PYBIND11_MODULE(_rsclf, m) {
  m.doc() = "Depression-screening classifiers for Romanized Sinhala text";

  static py::exception<UsageError> usage_error(m, "UsageError", PyExc_ValueError);
  static py::exception<DataError> data_error(m, "DataError", PyExc_ValueError);
  static py::exception<NumericError> numeric_error(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const UsageError& e) {
      PyErr_SetString(usage_error.ptr(), e.what());
    } catch (const DataError& e) {
      PyErr_SetString(data_error.ptr(), e.what());
    } catch (const NumericError& e) {
      PyErr_SetString(numeric_error.ptr(), e.what());
    }
  });

  m.attr("MODELS") = [] {
    std::vector<std::string> ids;
    for (ModelKind k : all_model_kinds()) ids.emplace_back(model_id(k));
    return ids;
  }();
  m.attr("FORMAT_VERSION") = kArtifactFormatVersion;

  m.def("default_config", [] { return RunConfig{}.dump(); }, "Default run configuration as JSON text.");
  m.def("clean", [](const std::string& text) { return clean(text, CleanConfig{}); }, py::arg("text"));
  m.def("preprocess", [](const std::string& text) { return TextPreprocessor{}(text); }, py::arg("text"),
        "Clean, tokenize, drop stopwords and stem with the default tables.");

  m.def(
      "load_csv",
      [](const std::string& path) {
        std::vector<std::pair<std::string, Label>> rows;
        for (const auto& d : load_csv(path).docs) rows.emplace_back(d.text, d.label);
        return rows;
      },
      py::arg("path"), "Read a text,label CSV into (text, label) pairs.");

  m.def(
      "benchmark",
      [](const std::vector<std::string>& texts, const std::vector<Label>& labels,
         const std::vector<std::string>& models, const std::string& config) {
        std::vector<ModelKind> kinds;
        for (const auto& id : models) kinds.push_back(parse_model_kind(id));
        if (kinds.empty()) kinds = all_model_kinds();
        BenchmarkResult r;
        {
          py::gil_scoped_release release;
          r = benchmark(make_corpus(texts, labels), parse_config(config), kinds);
        }
        return json_to_py(benchmark_json(r));
      },
      py::arg("texts"), py::arg("labels"), py::arg("models") = std::vector<std::string>{},
      py::arg("config") = "{}");

  py::class_<PipelineArtifact>(m, "Pipeline")
      .def_static(
          "fit",
          [](const std::vector<std::string>& texts, const std::vector<Label>& labels, const std::string& model,
             const std::string& config) {
            const ModelKind kind = parse_model_kind(model);
            const RunConfig cfg = parse_config(config);
            const Corpus corpus = make_corpus(texts, labels);
            py::gil_scoped_release release;
            return fit_pipeline(corpus, cfg, kind);
          },
          py::arg("texts"), py::arg("labels"), py::arg("model") = "nn", py::arg("config") = "{}")
      .def_static("load", [](const std::string& path) { return load(path); }, py::arg("path"))
      .def_static("from_json", [](const std::string& text) { return deserialize(text); }, py::arg("text"))
      .def("save", [](const PipelineArtifact& a, const std::string& path) { save(a, path); }, py::arg("path"))
      .def("to_json", [](const PipelineArtifact& a) { return serialize(a); })
      .def_property_readonly("model", [](const PipelineArtifact& a) { return std::string(model_id(a.model.kind)); })
      .def_property_readonly("n_features", [](const PipelineArtifact& a) { return a.chain.output_dim(); })
      .def_readonly("threshold", &PipelineArtifact::threshold)
      .def("predict", [](const PipelineArtifact& a, const std::string& text) { return prediction_dict(predict_one(a, text)); },
           py::arg("text"))
      .def(
          "predict_many",
          [](const PipelineArtifact& a, const std::vector<std::string>& texts) {
            py::list out;
            for (const auto& p : predict_many(a, texts)) out.append(prediction_dict(p));
            return out;
          },
          py::arg("texts"))
      .def(
          "evaluate",
          [](const PipelineArtifact& a, const std::vector<std::string>& texts, const std::vector<Label>& labels,
             std::optional<double> threshold) {
            return json_to_py(report_json(evaluate(a, make_corpus(texts, labels), threshold.value_or(a.threshold))));
          },
          py::arg("texts"), py::arg("labels"), py::arg("threshold") = py::none());
}
