#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rsclf/corpus.hpp"
#include "rsclf/sparse.hpp"
#include "rsclf/textprep.hpp"

namespace rsclf {

struct NgramSpec {
  int min_n = 1;
  int max_n = 3;
  int min_df = 1;

  void validate() const;
};

// All contiguous n-grams of the token sequence, space-joined, n in [min_n, max_n].
std::vector<std::string> ngrams(const TokenSeq& tokens, int min_n, int max_n);

class Vocabulary {
 public:
  Vocabulary() = default;
  // `terms` must be strictly increasing; `df` parallel to it.
  Vocabulary(NgramSpec spec, std::vector<std::string> terms, std::vector<std::size_t> df);

  const NgramSpec& spec() const { return spec_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& df() const { return df_; }
  std::size_t size() const { return terms_.size(); }

  // Column of `term`, or -1 when absent.
  long find(const std::string& term) const;

  bool operator==(const Vocabulary& o) const { return spec_.min_n == o.spec_.min_n && spec_.max_n == o.spec_.max_n &&
                                                      spec_.min_df == o.spec_.min_df && terms_ == o.terms_ && df_ == o.df_; }

 private:
  NgramSpec spec_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Throws DataError when nothing survives min_df filtering.
Vocabulary build_vocab(const std::vector<TokenSeq>& docs, const NgramSpec& spec);

SparseMatrix count_transform(const std::vector<TokenSeq>& docs, const Vocabulary& vocab);

struct TfidfWeights {
  std::vector<double> idf;
  bool l2_normalize = true;
};

// Smoothed idf: ln((1 + N) / (1 + df)) + 1.
TfidfWeights fit_idf(const SparseMatrix& counts, bool l2_normalize = true);

SparseMatrix tfidf_transform(const SparseMatrix& counts, const TfidfWeights& weights);

// Chi-square statistic of each column against the binary labels, computed
// from per-class feature mass. Columns with zero total score 0.
std::vector<double> chi2_scores(const SparseMatrix& x, std::span<const Label> y);

struct Chi2Selector {
  std::vector<double> scores;
  std::vector<std::size_t> selected;  // ascending
  std::size_t k = 0;

  std::size_t n_input() const { return scores.size(); }
  std::size_t n_output() const { return selected.size(); }
};

// Keeps the k best scores; ties go to the lower column. k is clamped to the
// number of columns.
Chi2Selector select_k_best(std::vector<double> scores, std::size_t k);

// Column projection preserving the original order of surviving columns.
SparseMatrix project(const SparseMatrix& x, const Chi2Selector& selector);

}  // namespace rsclf
