#include "rsclf/sparse.hpp"

#include <algorithm>
#include <stdexcept>

#include "rsclf/error.hpp"

namespace rsclf {

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> offsets,
                           std::vector<std::uint32_t> cols, std::vector<double> vals)
    : n_cols_(n_cols), offsets_(std::move(offsets)), col_idx_(std::move(cols)), values_(std::move(vals)) {
  if (offsets_.size() != n_rows + 1 || !well_formed()) throw DataError("malformed CSR arrays");
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<double>>& rows, std::size_t n_cols) {
  SparseMatrix m(n_cols);
  for (const auto& r : rows) {
    if (r.size() != n_cols) throw UsageError("from_dense: ragged rows");
    std::vector<std::pair<std::uint32_t, double>> e;
    for (std::size_t j = 0; j < r.size(); ++j)
      if (r[j] != 0.0) e.emplace_back(static_cast<std::uint32_t>(j), r[j]);
    m.push_row(std::move(e));
  }
  return m;
}

void SparseMatrix::push_row(std::vector<std::pair<std::uint32_t, double>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t start = col_idx_.size();
  for (const auto& [c, v] : entries) {
    if (c >= n_cols_) throw UsageError("push_row: column out of range");
    if (col_idx_.size() > start && col_idx_.back() == c) {
      values_.back() += v;
    } else {
      col_idx_.push_back(c);
      values_.push_back(v);
    }
  }
  // Drop entries that summed to zero.
  std::size_t w = start;
  for (std::size_t r = start; r < col_idx_.size(); ++r) {
    if (values_[r] == 0.0) continue;
    col_idx_[w] = col_idx_[r];
    values_[w] = values_[r];
    ++w;
  }
  col_idx_.resize(w);
  values_.resize(w);
  offsets_.push_back(w);
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto r = row(i);
  const auto it = std::lower_bound(r.cols.begin(), r.cols.end(), j);
  if (it == r.cols.end() || *it != j) return 0.0;
  return r.vals[static_cast<std::size_t>(it - r.cols.begin())];
}

std::vector<double> SparseMatrix::dense_row(std::size_t i) const {
  std::vector<double> out(n_cols_, 0.0);
  const auto r = row(i);
  for (std::size_t k = 0; k < r.nnz(); ++k) out[r.cols[k]] = r.vals[k];
  return out;
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows());
  for (std::size_t i = 0; i < rows(); ++i) out.push_back(dense_row(i));
  return out;
}

bool SparseMatrix::well_formed() const {
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != col_idx_.size()) return false;
  if (col_idx_.size() != values_.size()) return false;
  for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) {
    if (offsets_[i] > offsets_[i + 1]) return false;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      if (col_idx_[k] >= n_cols_) return false;
      if (k > offsets_[i] && col_idx_[k] <= col_idx_[k - 1]) return false;
    }
  }
  return true;
}

SparseMatrix SparseMatrix::take_rows(std::span<const std::size_t> idx) const {
  SparseMatrix out(n_cols_);
  out.offsets_.reserve(idx.size() + 1);
  for (auto i : idx) {
    if (i >= rows()) throw UsageError("take_rows: row index out of range");
    const auto r = row(i);
    out.col_idx_.insert(out.col_idx_.end(), r.cols.begin(), r.cols.end());
    out.values_.insert(out.values_.end(), r.vals.begin(), r.vals.end());
    out.offsets_.push_back(out.col_idx_.size());
  }
  return out;
}

}  // namespace rsclf
