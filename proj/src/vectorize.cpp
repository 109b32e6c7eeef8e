#include "rsclf/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "rsclf/error.hpp"

namespace rsclf {

void NgramSpec::validate() const {
  if (min_n < 1 || max_n > 3 || min_n > max_n)
    throw UsageError("n-gram range must satisfy 1 <= min_n <= max_n <= 3");
  if (min_df < 1) throw UsageError("min_df must be >= 1");
}

std::vector<std::string> ngrams(const TokenSeq& tokens, int min_n, int max_n) {
  std::vector<std::string> out;
  for (int n = min_n; n <= max_n; ++n) {
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + un <= tokens.size(); ++i) {
      std::string g = tokens[i];
      for (std::size_t k = 1; k < un; ++k) {
        g.push_back(' ');
        g += tokens[i + k];
      }
      out.push_back(std::move(g));
    }
  }
  return out;
}

Vocabulary::Vocabulary(NgramSpec spec, std::vector<std::string> terms, std::vector<std::size_t> df)
    : spec_(spec), terms_(std::move(terms)), df_(std::move(df)) {
  if (terms_.size() != df_.size()) throw DataError("vocabulary: terms and df differ in length");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) throw DataError("vocabulary terms must be sorted and unique");
    index_.emplace(terms_[i], i);
  }
}

long Vocabulary::find(const std::string& term) const {
  const auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

Vocabulary build_vocab(const std::vector<TokenSeq>& docs, const NgramSpec& spec) {
  spec.validate();
  if (docs.empty()) throw DataError("cannot build a vocabulary from zero documents");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    auto grams = ngrams(doc, spec.min_n, spec.max_n);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[std::move(g)];
  }
  std::vector<std::string> terms;
  std::vector<std::size_t> counts;
  for (auto& [term, n] : df) {
    if (n < static_cast<std::size_t>(spec.min_df)) continue;
    terms.push_back(term);
    counts.push_back(n);
  }
  if (terms.empty()) throw DataError("empty vocabulary after min_df filtering");
  return Vocabulary(spec, std::move(terms), std::move(counts));
}

SparseMatrix count_transform(const std::vector<TokenSeq>& docs, const Vocabulary& vocab) {
  SparseMatrix m(vocab.size());
  for (const auto& doc : docs) {
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (const auto& g : ngrams(doc, vocab.spec().min_n, vocab.spec().max_n)) {
      const long col = vocab.find(g);
      if (col >= 0) entries.emplace_back(static_cast<std::uint32_t>(col), 1.0);
    }
    m.push_row(std::move(entries));
  }
  return m;
}

TfidfWeights fit_idf(const SparseMatrix& counts, bool l2_normalize) {
  if (counts.rows() == 0) throw DataError("fit_idf needs at least one document");
  std::vector<std::size_t> df(counts.cols(), 0);
  for (std::size_t i = 0; i < counts.rows(); ++i)
    for (auto c : counts.row(i).cols) ++df[c];
  const double n = static_cast<double>(counts.rows());
  TfidfWeights w;
  w.l2_normalize = l2_normalize;
  w.idf.resize(df.size());
  for (std::size_t j = 0; j < df.size(); ++j) w.idf[j] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[j]))) + 1.0;
  return w;
}

SparseMatrix tfidf_transform(const SparseMatrix& counts, const TfidfWeights& weights) {
  if (counts.cols() != weights.idf.size())
    throw DataError("tfidf_transform: matrix has " + std::to_string(counts.cols()) + " columns but idf has " +
                    std::to_string(weights.idf.size()));
  std::vector<std::size_t> offsets = counts.offsets();
  std::vector<std::uint32_t> cols = counts.col_indices();
  std::vector<double> vals = counts.values();
  for (std::size_t i = 0; i < counts.rows(); ++i) {
    double norm2 = 0.0;
    for (auto k = offsets[i]; k < offsets[i + 1]; ++k) {
      vals[k] *= weights.idf[cols[k]];
      norm2 += vals[k] * vals[k];
    }
    if (weights.l2_normalize && norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto k = offsets[i]; k < offsets[i + 1]; ++k) vals[k] *= inv;
    }
  }
  return SparseMatrix(counts.rows(), counts.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

std::vector<double> chi2_scores(const SparseMatrix& x, std::span<const Label> y) {
  if (y.size() != x.rows()) throw UsageError("chi2_scores: label count does not match row count");
  double class_n[2] = {0.0, 0.0};
  for (auto label : y) {
    if (label != 0 && label != 1) throw DataError("chi2_scores: labels must be 0 or 1");
    class_n[label] += 1.0;
  }
  if (class_n[0] == 0.0 || class_n[1] == 0.0) throw DataError("chi2_scores: both classes must be present");

  std::vector<double> observed[2] = {std::vector<double>(x.cols(), 0.0), std::vector<double>(x.cols(), 0.0)};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      if (r.vals[k] < 0.0) throw DataError("chi2_scores: negative feature value");
      observed[y[i]][r.cols[k]] += r.vals[k];
    }
  }
  const double n = class_n[0] + class_n[1];
  std::vector<double> scores(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double total = observed[0][j] + observed[1][j];
    if (total == 0.0) continue;
    double s = 0.0;
    for (int c = 0; c < 2; ++c) {
      const double expected = total * class_n[c] / n;
      const double d = observed[c][j] - expected;
      s += d * d / expected;
    }
    scores[j] = s;
  }
  return scores;
}

Chi2Selector select_k_best(std::vector<double> scores, std::size_t k) {
  if (k == 0) throw UsageError("select_k_best: k must be >= 1");
  Chi2Selector sel;
  sel.k = std::min(k, scores.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  sel.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sel.k));
  std::sort(sel.selected.begin(), sel.selected.end());
  sel.scores = std::move(scores);
  return sel;
}

SparseMatrix project(const SparseMatrix& x, const Chi2Selector& selector) {
  if (x.cols() != selector.n_input())
    throw DataError("project: matrix has " + std::to_string(x.cols()) + " columns but selector expects " +
                    std::to_string(selector.n_input()));
  std::vector<long> remap(x.cols(), -1);
  for (std::size_t j = 0; j < selector.selected.size(); ++j) remap[selector.selected[j]] = static_cast<long>(j);
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      const long to = remap[r.cols[k]];
      if (to < 0) continue;
      cols.push_back(static_cast<std::uint32_t>(to));
      vals.push_back(r.vals[k]);
    }
    offsets.push_back(cols.size());
  }
  return SparseMatrix(x.rows(), selector.n_output(), std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace rsclf
