#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rsclf/config.hpp"
#include "rsclf/corpus.hpp"
#include "rsclf/model.hpp"
#include "rsclf/textprep.hpp"
#include "rsclf/vectorize.hpp"

namespace rsclf {

inline constexpr int kArtifactFormatVersion = 1;

// The fitted text -> feature transformation: preprocessing, n-gram
// vocabulary, idf weights and the chi-square column selection.
struct FeatureChain {
  TextPreprocessor preprocessor;
  Vocabulary vocab;
  TfidfWeights tfidf;
  Chi2Selector selector;

  std::size_t output_dim() const { return selector.n_output(); }

  // Selected columns of either the count or the TF-IDF matrix.
  SparseMatrix transform(const std::vector<std::string>& texts, FeatureInput input) const;
  SparseMatrix transform_tokens(const std::vector<TokenSeq>& docs, FeatureInput input) const;
};

// Fits the feature chain on training texts. The chi-square scores are taken
// on the TF-IDF matrix.
FeatureChain fit_features(const Corpus& train, const RunConfig& config);

// Builds the text preprocessor from config, reading word-list files when set.
TextPreprocessor make_preprocessor(const RunConfig& config);

// Resolves FeatureInput::automatic for a model kind.
FeatureInput resolve_input(FeatureInput requested, ModelKind kind);

// Fits one classifier on an already transformed training matrix.
ModelArtifact fit_model(const SparseMatrix& x, std::span<const Label> y, ModelKind kind, const RunConfig& config);

struct PipelineArtifact {
  int format_version = kArtifactFormatVersion;
  FeatureChain chain;
  FeatureInput input = FeatureInput::tfidf;  // never automatic once fitted
  ModelArtifact model;
  double threshold = 0.5;
  std::array<std::string, 2> label_names{"non-depressive", "depressive"};

  // Checks vocabulary -> idf -> selector -> model widths.
  void check_consistency() const;
};

// preprocess -> vocabulary -> counts -> idf -> chi2 -> select -> classifier.
// Stage failures are rethrown with the stage name prefixed.
PipelineArtifact fit_pipeline(const Corpus& train, const RunConfig& config, ModelKind kind);

struct Prediction {
  Label label = 0;
  double score = 0.0;
  std::string label_name;
  bool oov = false;  // no feature of the text reached the model

  bool operator==(const Prediction&) const = default;
};

Prediction predict_one(const PipelineArtifact& artifact, std::string_view text);
std::vector<Prediction> predict_many(const PipelineArtifact& artifact, const std::vector<std::string>& texts);

// Versioned JSON. Doubles are written in shortest round-trip form, so a
// loaded artifact predicts bit-identically.
std::string serialize(const PipelineArtifact& artifact);
PipelineArtifact deserialize(std::string_view json_text);
void save(const PipelineArtifact& artifact, const std::filesystem::path& path);
PipelineArtifact load(const std::filesystem::path& path);

}  // namespace rsclf
