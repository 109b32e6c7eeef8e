#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace rsclf {

// Compressed sparse row matrix of doubles. Column indices are strictly
// increasing within each row; explicit zeros are never stored by the
// builders in this library.
class SparseMatrix {
 public:
  struct RowView {
    std::span<const std::uint32_t> cols;
    std::span<const double> vals;

    std::size_t nnz() const { return cols.size(); }
    double dot(std::span<const double> dense) const {
      double s = 0.0;
      for (std::size_t k = 0; k < cols.size(); ++k) s += vals[k] * dense[cols[k]];
      return s;
    }
  };

  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t n_cols) : n_cols_(n_cols) {}

  // Takes ownership of raw CSR arrays; throws if they are malformed.
  SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> offsets,
               std::vector<std::uint32_t> cols, std::vector<double> vals);

  static SparseMatrix from_dense(const std::vector<std::vector<double>>& rows, std::size_t n_cols);

  // Appends a row given as (column, value) pairs in any order; duplicate
  // columns are summed and zeros dropped.
  void push_row(std::vector<std::pair<std::uint32_t, double>> entries);

  std::size_t rows() const { return offsets_.size() - 1; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return col_idx_.size(); }

  RowView row(std::size_t i) const {
    const auto b = offsets_[i], e = offsets_[i + 1];
    return {std::span<const std::uint32_t>(col_idx_).subspan(b, e - b),
            std::span<const double>(values_).subspan(b, e - b)};
  }

  double at(std::size_t i, std::size_t j) const;
  std::vector<double> dense_row(std::size_t i) const;
  std::vector<std::vector<double>> to_dense() const;

  const std::vector<std::size_t>& offsets() const { return offsets_; }
  const std::vector<std::uint32_t>& col_indices() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  bool well_formed() const;

  // Rows selected by index, in the given order (repeats allowed).
  SparseMatrix take_rows(std::span<const std::size_t> idx) const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace rsclf
