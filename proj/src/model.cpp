#include "rsclf/model.hpp"

#include <array>

#include "rsclf/error.hpp"

namespace rsclf {

namespace {

struct KindInfo {
  ModelKind kind;
  std::string_view id;
  std::string_view display;
};

constexpr std::array<KindInfo, 7> kKinds{{
    {ModelKind::nn, "nn", "Neural Network"},
    {ModelKind::svm, "svm", "Support Vector Machines (SVM)"},
    {ModelKind::tree, "tree", "Decision Trees"},
    {ModelKind::forest, "forest", "Random Forest Classifier"},
    {ModelKind::gnb, "gnb", "Gaussian Naive Bayes Classifier"},
    {ModelKind::logreg, "logreg", "Logistic Regression"},
    {ModelKind::mnb, "mnb", "Multinomial Naive Bayes"},
}};

const KindInfo& info(ModelKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k;
  throw UsageError("unknown model kind");
}

}  // namespace

std::string_view model_id(ModelKind kind) { return info(kind).id; }
std::string_view model_display_name(ModelKind kind) { return info(kind).display; }

ModelKind parse_model_kind(std::string_view id) {
  for (const auto& k : kKinds)
    if (k.id == id) return k.kind;
  throw UsageError("unknown model '" + std::string(id) + "' (expected mnb|gnb|logreg|svm|tree|forest|nn)");
}

const std::vector<ModelKind>& all_model_kinds() {
  static const std::vector<ModelKind> kinds = [] {
    std::vector<ModelKind> v;
    for (const auto& k : kKinds) v.push_back(k.kind);
    return v;
  }();
  return kinds;
}

std::size_t ModelArtifact::n_features() const {
  return std::visit(
      [](const auto& m) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DecisionTree>)
          return m.n_features;
        else
          return m.n_features();
      },
      model);
}

bool ModelArtifact::probabilistic() const {
  return kind == ModelKind::mnb || kind == ModelKind::gnb || kind == ModelKind::logreg || kind == ModelKind::nn;
}

std::vector<double> ModelArtifact::scores(const SparseMatrix& x) const {
  return std::visit([&](const auto& m) { return m.scores(x); }, model);
}

std::vector<Label> ModelArtifact::predict(const SparseMatrix& x, double threshold) const {
  return std::visit([&](const auto& m) { return m.predict(x, threshold); }, model);
}

}  // namespace rsclf
