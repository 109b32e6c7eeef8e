#include <cmath>
#include <map>

#include "doctest.h"
#include "rsclf/classifiers.hpp"
#include "rsclf/error.hpp"
#include "rsclf/random.hpp"

using namespace rsclf;
using doctest::Approx;

namespace {

SparseMatrix dense(std::vector<std::vector<double>> rows) {
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  return SparseMatrix::from_dense(rows, cols);
}

// P(class1 | doc) by direct products over the vocabulary, no logs.
double brute_force_bayes(const SparseMatrix& x, const std::vector<Label>& y, const std::vector<double>& doc,
                         double alpha) {
  const std::size_t v = x.cols();
  double n[2] = {0, 0}, mass[2] = {0, 0};
  std::vector<double> count[2] = {std::vector<double>(v), std::vector<double>(v)};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    n[y[i]] += 1;
    for (std::size_t j = 0; j < v; ++j) {
      count[y[i]][j] += x.at(i, j);
      mass[y[i]] += x.at(i, j);
    }
  }
  double joint[2];
  for (int c = 0; c < 2; ++c) {
    joint[c] = n[c] / (n[0] + n[1]);
    for (std::size_t j = 0; j < v; ++j)
      for (int r = 0; r < static_cast<int>(doc[j]); ++r) joint[c] *= (count[c][j] + alpha) / (mass[c] + alpha * v);
  }
  return joint[1] / (joint[0] + joint[1]);
}

struct Dataset {
  SparseMatrix x;
  std::vector<Label> y;
};

Dataset random_dataset(Rng& rng, std::size_t max_rows, std::size_t max_cols, int value_range) {
  const std::size_t n = 2 + uniform_index(rng, max_rows - 1);
  const std::size_t d = 1 + uniform_index(rng, max_cols);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  std::vector<Label> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : rows[i]) v = static_cast<double>(uniform_index(rng, value_range));
    y[i] = static_cast<Label>(uniform_index(rng, 2));
  }
  y[0] = 0;
  y[1] = 1;
  return {SparseMatrix::from_dense(rows, d), y};
}

}  // namespace

TEST_CASE("multinomial NB: hand Bayes fixture") {
  // vocabulary (a, b, c); class0 "a a b", class1 "b b c"
  const SparseMatrix x = dense({{2, 1, 0}, {0, 2, 1}});
  const std::vector<Label> y{0, 1};
  const MultinomialNb nb = fit_multinomial_nb(x, y, {1.0});
  const SparseMatrix test = dense({{1, 1, 0}});
  const double p0 = 1.0 - nb.scores(test)[0];
  const double hand = (0.5 * 0.5 * (1.0 / 3)) / ((0.5 * 0.5 * (1.0 / 3)) + (0.5 * (1.0 / 6) * 0.5));
  CHECK(std::abs(p0 - 2.0 / 3.0) <= 1e-9);
  CHECK(p0 == Approx(hand).epsilon(1e-12));
  CHECK(nb.predict(test)[0] == 0);
}

TEST_CASE("multinomial NB: symmetry and unseen terms") {
  const SparseMatrix x = dense({{1, 1, 0}, {1, 1, 0}});
  const MultinomialNb nb = fit_multinomial_nb(x, std::vector<Label>{0, 1});
  CHECK(nb.scores(dense({{3, 1, 0}}))[0] == Approx(0.5).epsilon(1e-12));
  CHECK(nb.scores(dense({{0, 0, 2}}))[0] == Approx(0.5).epsilon(1e-12));
  for (int c = 0; c < 2; ++c) {
    double s = 0;
    for (double l : nb.log_likelihood[c]) s += std::exp(l);
    CHECK(s == Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(fit_multinomial_nb(dense({{-1.0}, {1.0}}), std::vector<Label>{0, 1}), DataError);
}

TEST_CASE("property: multinomial NB equals brute-force Bayes on small corpora") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const Dataset d = random_dataset(rng, 8, 5, 4);
    const double alpha = 0.1 + 2.0 * uniform01(rng);
    const MultinomialNb nb = fit_multinomial_nb(d.x, d.y, {alpha});
    std::vector<double> doc(d.x.cols());
    for (auto& v : doc) v = static_cast<double>(uniform_index(rng, 3));
    const double got = nb.scores(SparseMatrix::from_dense({doc}, doc.size()))[0];
    CHECK(got == Approx(brute_force_bayes(d.x, d.y, doc, alpha)).epsilon(1e-9));
  }
}

TEST_CASE("gaussian NB examples") {
  const GaussianNb a = fit_gaussian_nb(dense({{1.0}, {1.0}, {5.0}, {5.0}}), std::vector<Label>{0, 0, 1, 1});
  CHECK(a.predict(dense({{1.0}}))[0] == 0);
  CHECK(a.scores(dense({{3.0}}))[0] == Approx(0.5).epsilon(1e-9));

  // class0 mean 0 var 1, class1 mean 4 var 1 (population variance)
  const GaussianNb b = fit_gaussian_nb(dense({{-1.0}, {1.0}, {3.0}, {5.0}}), std::vector<Label>{0, 0, 1, 1});
  CHECK(b.mean[0][0] == 0.0);
  CHECK(b.mean[1][0] == 4.0);
  const double l0 = -0.5 * std::pow(1.0 - 0.0, 2), l1 = -0.5 * std::pow(1.0 - 4.0, 2);
  CHECK(l0 > l1);
  CHECK(b.predict(dense({{1.0}}))[0] == 0);
  CHECK(b.var_floor > 0.0);
  for (int c = 0; c < 2; ++c)
    for (double v : b.var[c]) CHECK(v >= b.var_floor);
}

TEST_CASE("logistic regression separates the 1-D fixture") {
  const SparseMatrix x = dense({{-1.0}, {1.0}});
  const std::vector<Label> y{0, 1};
  // Oracle: a coarse grid over (w, b) contains a perfect separator.
  bool exists = false;
  for (double w = -2; w <= 2; w += 0.5)
    for (double b = -1; b <= 1; b += 0.5) exists |= (w * -1 + b < 0) && (w * 1 + b >= 0);
  REQUIRE(exists);
  LogisticConfig cfg;
  cfg.batch_size = 2;
  const LinearModel m = fit_logistic(x, y, cfg);
  CHECK(m.predict(x) == y);
  for (double s : m.scores(dense({{-1e6}, {0.0}, {1e6}}))) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
  LinearModel zero{LinearKind::logistic, {0.0}, 0.0};
  CHECK(zero.scores(dense({{7.0}}))[0] == 0.5);
}

TEST_CASE("linear SVM fixture, symmetry and single-class rejection") {
  const SparseMatrix x = dense({{-1.0}, {1.0}});
  const LinearModel m = fit_linear_svm(x, std::vector<Label>{0, 1}, {1e-2, 50, 3});
  CHECK(m.predict(x) == std::vector<Label>{0, 1});
  const LinearModel flipped = fit_linear_svm(x, std::vector<Label>{1, 0}, {1e-2, 50, 3});
  CHECK(flipped.predict(x) == std::vector<Label>{1, 0});
  CHECK_THROWS_AS(fit_linear_svm(x, std::vector<Label>{1, 1}), DataError);
  for (std::size_t i = 0; i < 2; ++i) CHECK((m.scores(x)[i] >= 0.0) == (m.predict(x)[i] == 1));
}

TEST_CASE("decision tree examples") {
  const DecisionTree pure = fit_tree(dense({{1.0}, {2.0}}), std::vector<Label>{1, 1});
  CHECK(pure.nodes.size() == 1);
  CHECK(pure.predict(dense({{9.0}}))[0] == 1);

  const SparseMatrix x = dense({{1.0}, {2.0}, {3.0}, {4.0}});
  const std::vector<Label> y{0, 0, 1, 1};
  const DecisionTree t = fit_tree(x, y);
  CHECK(t.nodes[0].feature == 0);
  CHECK(t.nodes[0].threshold == 2.5);
  CHECK(t.predict(x) == y);

  const DecisionTree flat = fit_tree(dense({{1.0}, {1.0}, {1.0}}), std::vector<Label>{1, 0, 1});
  CHECK(flat.nodes.size() == 1);
  CHECK(flat.predict(dense({{1.0}}))[0] == 1);
  CHECK_THROWS_AS(fit_tree(x, y, {0, 1}), UsageError);
}

TEST_CASE("property: tree structure respects limits") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset d = random_dataset(rng, 40, 6, 5);
    const TreeConfig cfg{1 + static_cast<int>(uniform_index(rng, 5)), 1 + static_cast<int>(uniform_index(rng, 3))};
    const DecisionTree t = fit_tree(d.x, d.y, cfg);
    CHECK(t.depth() <= cfg.max_depth);
    std::vector<int> reached(t.nodes.size(), 0);
    reached[0] = 1;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
      const auto& n = t.nodes[i];
      if (n.is_leaf()) {
        if (i > 0) CHECK(n.count0 + n.count1 >= static_cast<std::uint64_t>(cfg.min_leaf));
        continue;
      }
      CHECK(std::isfinite(n.threshold));
      reached[n.left]++;
      reached[n.right]++;
    }
    for (int r : reached) CHECK(r == 1);
  }
}

TEST_CASE("property: one-tree forest without bagging equals the tree") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = random_dataset(rng, 50, 10, 4);
    ForestConfig fc;
    fc.n_trees = 1;
    fc.bootstrap = false;
    fc.features_per_split = FeatureSubset::all;
    fc.seed = rng();
    const RandomForest f = fit_forest(d.x, d.y, fc);
    const DecisionTree t = fit_tree(d.x, d.y, {fc.max_depth, fc.min_leaf});
    const Dataset probe = random_dataset(rng, 30, 10, 5);
    std::vector<std::vector<double>> rows = probe.x.to_dense();
    for (auto& r : rows) r.resize(d.x.cols(), 0.0);
    const SparseMatrix px = SparseMatrix::from_dense(rows, d.x.cols());
    CHECK(f.predict(d.x) == t.predict(d.x));
    CHECK(f.predict(px) == t.predict(px));
  }
}

TEST_CASE("forest determinism, pure input, tie vote") {
  Rng rng(4);
  const Dataset d = random_dataset(rng, 40, 6, 5);
  ForestConfig fc;
  fc.n_trees = 15;
  fc.seed = 9;
  const RandomForest a = fit_forest(d.x, d.y, fc);
  fc.threads = 1;
  const RandomForest b = fit_forest(d.x, d.y, fc);
  CHECK(a.trees.size() == 15);
  CHECK(a.scores(d.x) == b.scores(d.x));
  for (std::size_t t = 0; t < a.trees.size(); ++t) CHECK(a.trees[t].nodes.size() == b.trees[t].nodes.size());

  const RandomForest pure = fit_forest(dense({{1.0}, {2.0}}), std::vector<Label>{0, 0}, fc);
  for (const auto& t : pure.trees) CHECK(t.nodes.size() == 1);

  RandomForest tie;
  DecisionTree zero, one;
  zero.n_features = one.n_features = 1;
  zero.nodes = {TreeNode{-1, 0.0, -1, -1, 1, 0}};
  one.nodes = {TreeNode{-1, 0.0, -1, -1, 0, 1}};
  tie.trees = {zero, one};
  CHECK(tie.predict(dense({{0.0}}))[0] == 0);
}

TEST_CASE("property: probabilistic scores lie in [0,1] and threshold rule holds") {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const Dataset d = random_dataset(rng, 30, 5, 4);
    const auto nb = fit_multinomial_nb(d.x, d.y);
    const auto gnb = fit_gaussian_nb(d.x, d.y);
    LogisticConfig lc;
    lc.epochs = 5;
    lc.batch_size = 4;
    const auto lr = fit_logistic(d.x, d.y, lc);
    for (const auto& s : {nb.scores(d.x), gnb.scores(d.x), lr.scores(d.x)}) {
      for (double v : s) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
    const auto s = nb.scores(d.x);
    const auto p = nb.predict(d.x, 0.5);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(p[i] == (s[i] >= 0.5 ? 1 : 0));
    for (Label l : nb.predict(d.x, 0.0)) CHECK(l == 1);
  }
}

TEST_CASE("fits are reproducible for a fixed seed") {
  Rng rng(6);
  const Dataset d = random_dataset(rng, 40, 6, 5);
  LogisticConfig lc;
  lc.seed = 5;
  CHECK(fit_logistic(d.x, d.y, lc).weights == fit_logistic(d.x, d.y, lc).weights);
  SvmConfig sc;
  sc.seed = 5;
  CHECK(fit_linear_svm(d.x, d.y, sc).weights == fit_linear_svm(d.x, d.y, sc).weights);
}
