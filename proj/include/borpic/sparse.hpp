#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "borpic/geometry.hpp"

namespace borpic {

template <class T>
struct Triplet {
  Index row;
  Index col;
  T value;
};

// Compressed sparse row storage. Columns are sorted within each row.
template <class T>
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  // Duplicates are summed in the order they appear in `triplets`, so the result
  // only depends on the input order.
  static CsrMatrix from_triplets(Index rows, Index cols, std::vector<Triplet<T>> triplets);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }

  // 0 when absent
  T at(Index r, Index c) const;
  CsrMatrix transpose() const;

  template <class U>
  CsrMatrix<U> cast() const {
    CsrMatrix<U> out(rows_, cols_);
    out.set_raw(row_ptr_, col_idx_, std::vector<U>(values_.begin(), values_.end()));
    return out;
  }

  void set_raw(std::vector<Index> row_ptr, std::vector<Index> col_idx, std::vector<T> values) {
    row_ptr_ = std::move(row_ptr);
    col_idx_ = std::move(col_idx);
    values_ = std::move(values);
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<T> values_;
};

using SparseMatrix = CsrMatrix<double>;
using IntMatrix = CsrMatrix<int>;

// Gustavson product, used for checks rather than in time stepping.
template <class T>
CsrMatrix<T> multiply(const CsrMatrix<T>& a, const CsrMatrix<T>& b);

SparseMatrix scaled(const SparseMatrix& a, double s);

void write_matrix_market(const SparseMatrix& a, const std::string& path);

extern template class CsrMatrix<double>;
extern template class CsrMatrix<int>;

}  // namespace borpic
