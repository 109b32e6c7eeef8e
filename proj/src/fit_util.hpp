#pragma once

#include <span>
#include <string>
#include <vector>

#include "rsclf/corpus.hpp"
#include "rsclf/error.hpp"
#include "rsclf/sparse.hpp"

namespace rsclf::detail {

// Validates labels and returns per-class counts.
inline void count_labels(const SparseMatrix& x, std::span<const Label> y, std::size_t counts[2], const char* who,
                         bool both_required) {
  if (y.size() != x.rows()) throw UsageError(std::string(who) + ": label count does not match row count");
  if (y.empty()) throw DataError(std::string(who) + ": no training rows");
  counts[0] = counts[1] = 0;
  for (auto label : y) {
    if (label != 0 && label != 1) throw DataError(std::string(who) + ": labels must be 0 or 1");
    ++counts[label];
  }
  if (both_required && (counts[0] == 0 || counts[1] == 0))
    throw DataError(std::string(who) + ": both classes are required");
}

inline void check_width(const SparseMatrix& x, std::size_t expected) {
  if (x.cols() != expected)
    throw DataError("feature dimension mismatch: model expects " + std::to_string(expected) + ", got " +
                    std::to_string(x.cols()));
}

inline std::vector<Label> threshold_scores(const std::vector<double>& s, double threshold) {
  std::vector<Label> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] >= threshold ? 1 : 0;
  return out;
}

}  // namespace rsclf::detail
