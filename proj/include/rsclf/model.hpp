#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rsclf/classifiers.hpp"
#include "rsclf/neural.hpp"

namespace rsclf {

enum class ModelKind { mnb, gnb, logreg, svm, tree, forest, nn };

// Short CLI identifier: "mnb", "gnb", ...
std::string_view model_id(ModelKind kind);
ModelKind parse_model_kind(std::string_view id);
// Name used in comparison tables.
std::string_view model_display_name(ModelKind kind);
const std::vector<ModelKind>& all_model_kinds();

using ModelVariant = std::variant<MultinomialNb, GaussianNb, LinearModel, DecisionTree, RandomForest, MlpModel>;

// A fitted classifier of any kind. Immutable after fit.
struct ModelArtifact {
  ModelKind kind = ModelKind::mnb;
  ModelVariant model;
  std::vector<EpochStats> history;  // nn only

  std::size_t n_features() const;
  // Probability-valued scores (thresholded); others decide by sign or vote.
  bool probabilistic() const;
  std::vector<double> scores(const SparseMatrix& x) const;
  std::vector<Label> predict(const SparseMatrix& x, double threshold = 0.5) const;
};

}  // namespace rsclf
