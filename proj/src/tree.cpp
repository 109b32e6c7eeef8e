#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "fit_util.hpp"
#include "rsclf/classifiers.hpp"
#include "rsclf/random.hpp"

namespace rsclf {

namespace {

struct Split {
  double impurity;  // weighted child impurity times node size
  std::uint32_t feature;
  double threshold;

  bool better_than(const Split& o) const {
    if (impurity != o.impurity) return impurity < o.impurity;
    if (feature != o.feature) return feature < o.feature;
    return threshold < o.threshold;
  }
};

double weighted_gini(double c0, double c1) {
  const double m = c0 + c1;
  return m - (c0 * c0 + c1 * c1) / m;
}

// A distinct feature value within a node and the class counts at it.
struct Bucket {
  double value;
  double c0, c1;
};

struct Entry {
  std::uint32_t feature;
  double value;
  Label label;
};

class TreeGrower {
 public:
  TreeGrower(const SparseMatrix& x, std::span<const Label> y, const TreeConfig& cfg, std::size_t features_per_split,
             Rng* rng)
      : x_(x), y_(y), cfg_(cfg), per_split_(features_per_split), rng_(rng), group_of_(x.cols(), -1) {
    if (rng_) {
      perm_.resize(x.cols());
      for (std::size_t j = 0; j < perm_.size(); ++j) perm_[j] = static_cast<std::uint32_t>(j);
    }
  }

  DecisionTree grow(std::vector<std::size_t> rows) {
    tree_.n_features = x_.cols();
    tree_.nodes.clear();
    build(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  struct Group {
    std::size_t begin, end;  // range in entries_
  };

  int build(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::uint64_t c[2] = {0, 0};
    for (auto r : rows) ++c[y_[r]];
    tree_.nodes[id].count0 = c[0];
    tree_.nodes[id].count1 = c[1];

    const auto min_leaf = static_cast<std::size_t>(cfg_.min_leaf);
    if (c[0] == 0 || c[1] == 0 || depth >= cfg_.max_depth || rows.size() < 2 * min_leaf) return id;

    const auto best = find_split(rows, c);
    if (!best) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (x_.at(r, best->feature) <= best->threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree_.nodes[id].feature = static_cast<int>(best->feature);
    tree_.nodes[id].threshold = best->threshold;
    const int l = build(std::move(left), depth + 1);
    tree_.nodes[id].left = l;
    const int r = build(std::move(right), depth + 1);
    tree_.nodes[id].right = r;
    return id;
  }

  std::optional<Split> find_split(const std::vector<std::size_t>& rows, const std::uint64_t counts[2]) {
    entries_.clear();
    for (auto r : rows) {
      const auto row = x_.row(r);
      for (std::size_t k = 0; k < row.nnz(); ++k) entries_.push_back({row.cols[k], row.vals[k], y_[r]});
    }
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return a.feature != b.feature ? a.feature < b.feature : a.value < b.value;
    });
    groups_.clear();
    for (std::size_t i = 0; i < entries_.size();) {
      std::size_t j = i;
      while (j < entries_.size() && entries_[j].feature == entries_[i].feature) ++j;
      groups_.push_back({i, j});
      i = j;
    }

    std::optional<Split> best;
    if (!rng_) {
      for (const auto& g : groups_) evaluate(g, rows.size(), counts, best);
      return best;
    }

    for (const auto& g : groups_) group_of_[entries_[g.begin].feature] = static_cast<long>(&g - groups_.data());
    std::size_t informative = 0;
    for (std::size_t t = 0; t < perm_.size(); ++t) {
      const auto j = t + static_cast<std::size_t>(uniform_index(*rng_, perm_.size() - t));
      std::swap(perm_[t], perm_[j]);
      const long gi = group_of_[perm_[t]];
      if (gi < 0) continue;  // all zero in this node
      if (evaluate(groups_[static_cast<std::size_t>(gi)], rows.size(), counts, best)) ++informative;
      if (informative >= per_split_ && best) break;
    }
    for (const auto& g : groups_) group_of_[entries_[g.begin].feature] = -1;
    return best;
  }

  // Scans every threshold of one feature. Returns false when the feature is
  // constant within the node.
  bool evaluate(const Group& g, std::size_t n, const std::uint64_t counts[2], std::optional<Split>& best) {
    // Implicit zeros form one bucket, placed in sorted position.
    buckets_.clear();
    double nz[2] = {0.0, 0.0};
    for (std::size_t i = g.begin; i < g.end; ++i) nz[entries_[i].label] += 1.0;
    const double z0 = static_cast<double>(counts[0]) - nz[0];
    const double z1 = static_cast<double>(counts[1]) - nz[1];
    bool zero_pending = z0 + z1 > 0.0;
    for (std::size_t i = g.begin; i < g.end;) {
      const double v = entries_[i].value;
      if (zero_pending && 0.0 < v) {
        buckets_.push_back({0.0, z0, z1});
        zero_pending = false;
      }
      Bucket b{v, 0.0, 0.0};
      for (; i < g.end && entries_[i].value == v; ++i) (entries_[i].label == 0 ? b.c0 : b.c1) += 1.0;
      if (!buckets_.empty() && buckets_.back().value == v) {
        buckets_.back().c0 += b.c0;
        buckets_.back().c1 += b.c1;
      } else {
        buckets_.push_back(b);
      }
    }
    if (zero_pending) buckets_.push_back({0.0, z0, z1});
    if (buckets_.size() < 2) return false;

    const double t0 = static_cast<double>(counts[0]), t1 = static_cast<double>(counts[1]);
    const auto min_leaf = static_cast<double>(cfg_.min_leaf);
    double l0 = 0.0, l1 = 0.0;
    const auto feature = entries_[g.begin].feature;
    for (std::size_t b = 0; b + 1 < buckets_.size(); ++b) {
      l0 += buckets_[b].c0;
      l1 += buckets_[b].c1;
      const double nl = l0 + l1, nr = static_cast<double>(n) - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double lo = buckets_[b].value, hi = buckets_[b + 1].value;
      double thr = lo + (hi - lo) / 2.0;
      if (!(thr < hi)) thr = lo;
      const Split s{weighted_gini(l0, l1) + weighted_gini(t0 - l0, t1 - l1), feature, thr};
      if (!best || s.better_than(*best)) best = s;
    }
    return true;
  }

  const SparseMatrix& x_;
  std::span<const Label> y_;
  TreeConfig cfg_;
  std::size_t per_split_;
  Rng* rng_;
  DecisionTree tree_;
  std::vector<Entry> entries_;
  std::vector<Group> groups_;
  std::vector<long> group_of_;
  std::vector<std::uint32_t> perm_;
  std::vector<Bucket> buckets_;
};

std::size_t subset_size(FeatureSubset subset, std::size_t d) {
  if (subset == FeatureSubset::all) return d;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
}

void check_tree_config(const TreeConfig& cfg) {
  if (cfg.max_depth < 1) throw UsageError("tree: max_depth must be >= 1");
  if (cfg.min_leaf < 1) throw UsageError("tree: min_leaf must be >= 1");
}

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> dense_row) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf())
    node = &nodes[static_cast<std::size_t>(dense_row[static_cast<std::size_t>(node->feature)] <= node->threshold
                                                ? node->left
                                                : node->right)];
  return *node;
}

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  // Children always have larger indices than their parent.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

std::vector<double> DecisionTree::scores(const SparseMatrix& x) const {
  detail::check_width(x, n_features);
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = leaf_for(x.dense_row(i)).fraction1();
  return out;
}

std::vector<Label> DecisionTree::predict(const SparseMatrix& x, double) const {
  detail::check_width(x, n_features);
  std::vector<Label> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = leaf_for(x.dense_row(i)).label();
  return out;
}

DecisionTree fit_tree(const SparseMatrix& x, std::span<const Label> y, const TreeConfig& cfg) {
  check_tree_config(cfg);
  std::size_t counts[2];
  detail::count_labels(x, y, counts, "decision tree", false);
  std::vector<std::size_t> rows(x.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return TreeGrower(x, y, cfg, x.cols(), nullptr).grow(std::move(rows));
}

std::vector<double> RandomForest::scores(const SparseMatrix& x) const {
  detail::check_width(x, n_features());
  std::vector<double> out(x.rows(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.dense_row(i);
    std::size_t votes = 0;
    for (const auto& t : trees) votes += static_cast<std::size_t>(t.leaf_for(row).label());
    out[i] = static_cast<double>(votes) / static_cast<double>(trees.size());
  }
  return out;
}

std::vector<Label> RandomForest::predict(const SparseMatrix& x, double) const {
  const auto s = scores(x);
  std::vector<Label> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] > 0.5 ? 1 : 0;
  return out;
}

RandomForest fit_forest(const SparseMatrix& x, std::span<const Label> y, const ForestConfig& cfg) {
  if (cfg.n_trees < 1) throw UsageError("forest: n_trees must be >= 1");
  const TreeConfig tree_cfg{cfg.max_depth, cfg.min_leaf};
  check_tree_config(tree_cfg);
  std::size_t counts[2];
  detail::count_labels(x, y, counts, "random forest", false);

  RandomForest forest;
  forest.features_per_split = cfg.features_per_split;
  forest.bootstrap = cfg.bootstrap;
  forest.seed = cfg.seed;
  forest.trees.resize(static_cast<std::size_t>(cfg.n_trees));
  const std::size_t per_split = subset_size(cfg.features_per_split, x.cols());

  auto grow_one = [&](std::size_t t) {
    Rng rng(cfg.seed + t);
    const std::size_t n = x.rows();
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = cfg.bootstrap ? static_cast<std::size_t>(uniform_index(rng, n)) : i;
    // Subsampling all features in random order finds the same split as the
    // exhaustive scan, so skip the RNG there to keep single-tree forests
    // identical to fit_tree.
    Rng* feature_rng = per_split < x.cols() ? &rng : nullptr;
    forest.trees[t] = TreeGrower(x, y, tree_cfg, per_split, feature_rng).grow(std::move(rows));
  };

  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cfg.n_trees));
  if (workers <= 1) {
    for (std::size_t t = 0; t < forest.trees.size(); ++t) grow_one(t);
    return forest;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t t; (t = next.fetch_add(1)) < forest.trees.size();) grow_one(t);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return forest;
}

}  // namespace rsclf
