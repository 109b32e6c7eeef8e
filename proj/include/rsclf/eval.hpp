#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsclf/config.hpp"
#include "rsclf/corpus.hpp"
#include "rsclf/model.hpp"
#include "rsclf/pipeline.hpp"

namespace rsclf {

// cell[true][predicted].
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 2>, 2> cell{};

  std::uint64_t tn() const { return cell[0][0]; }
  std::uint64_t fp() const { return cell[0][1]; }
  std::uint64_t fn() const { return cell[1][0]; }
  std::uint64_t tp() const { return cell[1][1]; }
  std::uint64_t total() const { return tn() + fp() + fn() + tp(); }
  std::uint64_t trace() const { return tn() + tp(); }

  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred);

struct ClassMetrics {
  Label label = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  // A precision or recall denominator was zero and the value was set to 0.
  bool zero_division = false;

  bool operator==(const ClassMetrics&) const = default;
};

struct EvalReport {
  std::string model;
  double accuracy = 0.0;
  std::array<ClassMetrics, 2> per_label{};
  ConfusionMatrix confusion;

  bool operator==(const EvalReport&) const = default;
};

EvalReport metrics(const ConfusionMatrix& cm, std::string model = {});

// Pooled over both labels. For single-label binary data both equal accuracy.
double micro_precision(const ConfusionMatrix& cm);
double micro_recall(const ConfusionMatrix& cm);

// Transforms `test` through the artifact's frozen feature chain and scores it.
EvalReport evaluate(const PipelineArtifact& artifact, const Corpus& test, double threshold);
inline EvalReport evaluate(const PipelineArtifact& artifact, const Corpus& test) {
  return evaluate(artifact, test, artifact.threshold);
}

struct ModelFailure {
  std::string model;
  std::string error;
};

struct BenchmarkResult {
  std::vector<EvalReport> reports;  // by accuracy, descending
  std::vector<ModelFailure> failures;
};

// One split and one fitted feature chain shared by every model. A model that
// fails to fit is recorded in `failures` and the rest still run.
BenchmarkResult benchmark(const Corpus& corpus, const RunConfig& config, const std::vector<ModelKind>& kinds);

// Eight decimals with trailing zeros dropped: 0.928, 0.94542254.
std::string format_metric(double v);

// Fixed-width comparison table, two rows per model.
std::string format_table(const std::vector<EvalReport>& reports, const std::vector<ModelFailure>& failures = {});

std::string report_json(const EvalReport& report, int indent = 2);
std::string benchmark_json(const BenchmarkResult& result, int indent = 2);

}  // namespace rsclf
