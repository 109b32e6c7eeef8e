#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsclf/corpus.hpp"
#include "rsclf/sparse.hpp"

namespace rsclf {

// All classifiers are binary over labels {0, 1}. `scores` returns either the
// probability of label 1 (naive Bayes, logistic regression), the raw margin
// (SVM), or the label-1 vote/leaf fraction (tree, forest). `predict` is the
// hard decision; models without calibrated probabilities ignore the
// threshold.

// ---------------------------------------------------------------- naive Bayes

struct MultinomialNbConfig {
  double alpha = 1.0;
};

struct MultinomialNb {
  double alpha = 1.0;
  double log_prior[2] = {0.0, 0.0};
  std::vector<double> log_likelihood[2];  // per class, per term

  std::size_t n_features() const { return log_likelihood[0].size(); }
  std::vector<double> scores(const SparseMatrix& x) const;
  std::vector<Label> predict(const SparseMatrix& x, double threshold = 0.5) const;
};

MultinomialNb fit_multinomial_nb(const SparseMatrix& x, std::span<const Label> y, const MultinomialNbConfig& cfg = {});

struct GaussianNbConfig {
  // Fraction of the largest feature variance added to every variance.
  double var_smoothing = 1e-9;
};

struct GaussianNb {
  double prior[2] = {0.0, 0.0};
  std::vector<double> mean[2];
  std::vector<double> var[2];
  double var_floor = 0.0;

  std::size_t n_features() const { return mean[0].size(); }
  std::vector<double> scores(const SparseMatrix& x) const;
  std::vector<Label> predict(const SparseMatrix& x, double threshold = 0.5) const;
};

// Statistics are accumulated from the sparse rows exactly as if the matrix
// were dense; implicit zeros count as observations.
GaussianNb fit_gaussian_nb(const SparseMatrix& x, std::span<const Label> y, const GaussianNbConfig& cfg = {});

// ------------------------------------------------------------- linear models

enum class LinearKind { logistic, svm };

struct LinearModel {
  LinearKind kind = LinearKind::logistic;
  std::vector<double> weights;
  double bias = 0.0;

  std::size_t n_features() const { return weights.size(); }
  double decision(const SparseMatrix::RowView& row) const { return row.dot(weights) + bias; }
  std::vector<double> scores(const SparseMatrix& x) const;
  std::vector<Label> predict(const SparseMatrix& x, double threshold = 0.5) const;
};

struct LogisticConfig {
  double lr = 0.1;
  double l2 = 1e-4;
  int epochs = 50;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

// Mini-batch gradient descent on L2-regularized binary cross-entropy.
LinearModel fit_logistic(const SparseMatrix& x, std::span<const Label> y, const LogisticConfig& cfg = {});

struct SvmConfig {
  double lambda = 1e-4;
  int epochs = 50;
  std::uint64_t seed = 0;
};

// Pegasos: stochastic subgradient descent on lambda/2 |w|^2 + mean hinge loss
// with step 1/(lambda t). The bias is the weight of an implicit constant
// feature and is regularized with the rest.
LinearModel fit_linear_svm(const SparseMatrix& x, std::span<const Label> y, const SvmConfig& cfg = {});

// -------------------------------------------------------------------- trees

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  std::uint64_t count0 = 0;  // training samples of each class reaching the node
  std::uint64_t count1 = 0;

  bool is_leaf() const { return feature < 0; }
  Label label() const { return count1 > count0 ? 1 : 0; }
  double fraction1() const {
    const auto n = count0 + count1;
    return n == 0 ? 0.0 : static_cast<double>(count1) / static_cast<double>(n);
  }
};

struct TreeConfig {
  int max_depth = 32;
  int min_leaf = 1;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t n_features = 0;

  const TreeNode& leaf_for(std::span<const double> dense_row) const;
  int depth() const;
  std::vector<double> scores(const SparseMatrix& x) const;
  std::vector<Label> predict(const SparseMatrix& x, double threshold = 0.5) const;
};

// CART with Gini impurity. Candidate thresholds are midpoints between sorted
// distinct values; ties go to the lower feature, then the lower threshold.
DecisionTree fit_tree(const SparseMatrix& x, std::span<const Label> y, const TreeConfig& cfg = {});

enum class FeatureSubset { sqrt, all };

struct ForestConfig {
  int n_trees = 100;
  FeatureSubset features_per_split = FeatureSubset::sqrt;
  bool bootstrap = true;
  int max_depth = 32;
  int min_leaf = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  FeatureSubset features_per_split = FeatureSubset::sqrt;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  std::size_t n_features() const { return trees.empty() ? 0 : trees.front().n_features; }
  // Fraction of trees voting for label 1.
  std::vector<double> scores(const SparseMatrix& x) const;
  // Majority vote; a tied vote goes to label 0.
  std::vector<Label> predict(const SparseMatrix& x, double threshold = 0.5) const;
};

// Tree t is grown from an Rng seeded with seed + t, so results do not depend
// on the number of threads.
RandomForest fit_forest(const SparseMatrix& x, std::span<const Label> y, const ForestConfig& cfg = {});

}  // namespace rsclf
