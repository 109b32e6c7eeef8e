#include "rsclf/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "rsclf/error.hpp"

namespace rsclf {

ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size())
    throw UsageError("confusion: " + std::to_string(y_true.size()) + " true labels vs " +
                     std::to_string(y_pred.size()) + " predictions");
  if (y_true.empty()) throw UsageError("confusion: no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if ((y_true[i] != 0 && y_true[i] != 1) || (y_pred[i] != 0 && y_pred[i] != 1))
      throw DataError("confusion: label out of range at index " + std::to_string(i));
    ++cm.cell[static_cast<std::size_t>(y_true[i])][static_cast<std::size_t>(y_pred[i])];
  }
  return cm;
}

EvalReport metrics(const ConfusionMatrix& cm, std::string model) {
  if (cm.total() == 0) throw UsageError("metrics: empty confusion matrix");
  EvalReport r;
  r.model = std::move(model);
  r.confusion = cm;
  r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
  for (std::size_t c = 0; c < 2; ++c) {
    auto& m = r.per_label[c];
    m.label = static_cast<Label>(c);
    const auto hit = cm.cell[c][c];
    const auto predicted = cm.cell[0][c] + cm.cell[1][c];
    const auto actual = cm.cell[c][0] + cm.cell[c][1];
    m.support = actual;
    m.zero_division = predicted == 0 || actual == 0;
    m.precision = predicted ? static_cast<double>(hit) / static_cast<double>(predicted) : 0.0;
    m.recall = actual ? static_cast<double>(hit) / static_cast<double>(actual) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  }
  return r;
}

double micro_precision(const ConfusionMatrix& cm) {
  // Pooled TP over pooled predicted positives, across both labels.
  const double tp = static_cast<double>(cm.cell[0][0] + cm.cell[1][1]);
  const double predicted = static_cast<double>(cm.cell[0][0] + cm.cell[1][0] + cm.cell[0][1] + cm.cell[1][1]);
  return tp / predicted;
}

double micro_recall(const ConfusionMatrix& cm) {
  const double tp = static_cast<double>(cm.cell[0][0] + cm.cell[1][1]);
  const double actual = static_cast<double>(cm.cell[0][0] + cm.cell[0][1] + cm.cell[1][0] + cm.cell[1][1]);
  return tp / actual;
}

EvalReport evaluate(const PipelineArtifact& artifact, const Corpus& test, double threshold) {
  if (test.empty()) throw DataError("evaluate: empty test corpus");
  artifact.check_consistency();
  const SparseMatrix x = artifact.chain.transform(test.texts(), artifact.input);
  const auto pred = artifact.model.predict(x, threshold);
  return metrics(confusion(test.labels(), pred), std::string(model_display_name(artifact.model.kind)));
}

BenchmarkResult benchmark(const Corpus& corpus, const RunConfig& config, const std::vector<ModelKind>& kinds) {
  if (kinds.empty()) throw UsageError("benchmark: no models requested");
  const Corpus input = config.deduplicate ? deduplicate(corpus) : corpus;
  const DataSplit parts = split(input, config.split_spec());
  if (class_counts(parts.train).size() < 2) throw DataError("benchmark: training split lacks a class");

  const FeatureChain chain = fit_features(parts.train, config);
  const auto train_docs = chain.preprocessor(parts.train.texts());
  const auto test_docs = chain.preprocessor(parts.test.texts());
  const auto y_train = parts.train.labels();
  const auto y_test = parts.test.labels();

  BenchmarkResult out;
  for (const auto kind : kinds) {
    const std::string name(model_display_name(kind));
    try {
      const FeatureInput input = resolve_input(config.features.input, kind);
      const SparseMatrix x_train = chain.transform_tokens(train_docs, input);
      const SparseMatrix x_test = chain.transform_tokens(test_docs, input);
      const ModelArtifact model = fit_model(x_train, y_train, kind, config);
      const auto pred = model.predict(x_test, config.threshold);
      out.reports.push_back(metrics(confusion(y_test, pred), name));
    } catch (const Error& e) {
      out.failures.push_back({name, e.what()});
    }
  }
  std::stable_sort(out.reports.begin(), out.reports.end(),
                   [](const EvalReport& a, const EvalReport& b) { return a.accuracy > b.accuracy; });
  return out;
}

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8f", v);
  std::string s(buf);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string format_table(const std::vector<EvalReport>& reports, const std::vector<ModelFailure>& failures) {
  std::size_t name_w = 5;
  for (const auto& r : reports) name_w = std::max(name_w, r.model.size());
  for (const auto& f : failures) name_w = std::max(name_w, f.model.size());

  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %-8s  %-5s  %-10s  %-10s  %-10s  %s\n", static_cast<int>(name_w), "Model",
                "Accuracy", "Label", "Precision", "Recall", "F1-Score", "Support");
  os << line;
  for (const auto& r : reports) {
    char acc[16];
    std::snprintf(acc, sizeof acc, "%.4f", r.accuracy);
    for (std::size_t c = 0; c < 2; ++c) {
      const auto& m = r.per_label[c];
      std::snprintf(line, sizeof line, "%-*s  %-8s  %-5d  %-10s  %-10s  %-10s  %llu%s\n", static_cast<int>(name_w),
                    c == 0 ? r.model.c_str() : "", c == 0 ? acc : "", m.label, format_metric(m.precision).c_str(),
                    format_metric(m.recall).c_str(), format_metric(m.f1).c_str(),
                    static_cast<unsigned long long>(m.support), m.zero_division ? "  (zero division)" : "");
      os << line;
    }
  }
  for (const auto& f : failures) {
    std::snprintf(line, sizeof line, "%-*s  FAILED: %s\n", static_cast<int>(name_w), f.model.c_str(),
                  f.error.c_str());
    os << line;
  }
  return os.str();
}

namespace {

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json per_label = nlohmann::json::array();
  for (const auto& m : r.per_label)
    per_label.push_back({{"label", m.label},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support},
                         {"zero_division", m.zero_division}});
  const auto& c = r.confusion.cell;
  return {{"model", r.model},
          {"accuracy", r.accuracy},
          {"per_label", std::move(per_label)},
          {"confusion", {{c[0][0], c[0][1]}, {c[1][0], c[1][1]}}}};
}

}  // namespace

std::string report_json(const EvalReport& report, int indent) { return report_to_json(report).dump(indent); }

std::string benchmark_json(const BenchmarkResult& result, int indent) {
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : result.reports) reports.push_back(report_to_json(r));
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : result.failures) failures.push_back({{"model", f.model}, {"error", f.error}});
  return nlohmann::json{{"reports", std::move(reports)}, {"failures", std::move(failures)}}.dump(indent);
}

}  // namespace rsclf
