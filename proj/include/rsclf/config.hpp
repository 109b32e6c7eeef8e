#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "rsclf/classifiers.hpp"
#include "rsclf/corpus.hpp"
#include "rsclf/neural.hpp"
#include "rsclf/textprep.hpp"
#include "rsclf/vectorize.hpp"

namespace rsclf {

// Which matrix a classifier consumes. `automatic` means raw counts for
// multinomial naive Bayes and TF-IDF for everything else.
enum class FeatureInput { automatic, tfidf, counts };

struct FeatureConfig {
  NgramSpec ngram;
  std::size_t k = 5000;  // chi-square top-k, clamped to the vocabulary size
  bool l2_normalize = true;
  FeatureInput input = FeatureInput::automatic;
};

// Every tunable of a run. Parsed strictly from JSON: unknown keys are errors.
struct RunConfig {
  std::uint64_t seed = 42;
  double train_ratio = 0.8;
  bool stratified = true;
  bool deduplicate = false;

  PreprocessConfig preprocess;
  std::optional<std::string> stopwords_file;
  std::optional<std::string> suffix_file;

  FeatureConfig features;
  double threshold = 0.5;

  MultinomialNbConfig mnb;
  GaussianNbConfig gnb;
  LogisticConfig logreg;
  SvmConfig svm;
  TreeConfig tree;
  ForestConfig forest;
  MlpTrainConfig nn;

  SplitSpec split_spec() const { return {train_ratio, seed, stratified}; }

  static RunConfig parse(std::string_view json_text);
  static RunConfig load(const std::filesystem::path& path);
  // Full config with every default spelled out.
  std::string dump() const;
};

}  // namespace rsclf
