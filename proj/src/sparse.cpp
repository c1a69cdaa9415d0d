#include "borpic/sparse.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <numeric>

#include "borpic/error.hpp"

namespace borpic {

template <class T>
CsrMatrix<T> CsrMatrix<T>::from_triplets(Index rows, Index cols, std::vector<Triplet<T>> triplets) {
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = triplets[a];
    const auto& tb = triplets[b];
    return ta.row != tb.row ? ta.row < tb.row : ta.col < tb.col;
  });

  CsrMatrix m(rows, cols);
  std::vector<Index> row_ptr(rows + 1, 0);
  std::vector<Index> col_idx;
  std::vector<T> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  Index last_row = -1;
  Index last_col = -1;
  for (std::size_t k : order) {
    const auto& t = triplets[k];
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw Error("triplet index out of range");
    if (t.row == last_row && t.col == last_col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  for (Index r = 0; r < rows; ++r) row_ptr[r + 1] += row_ptr[r];
  m.set_raw(std::move(row_ptr), std::move(col_idx), std::move(values));
  return m;
}

template <class T>
T CsrMatrix<T>::at(Index r, Index c) const {
  auto begin = col_idx_.begin() + row_ptr_[r];
  auto end = col_idx_.begin() + row_ptr_[r + 1];
  auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return T{};
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

template <class T>
CsrMatrix<T> CsrMatrix<T>::transpose() const {
  std::vector<Index> count(cols_ + 1, 0);
  for (Index c : col_idx_) ++count[c + 1];
  for (Index c = 0; c < cols_; ++c) count[c + 1] += count[c];
  std::vector<Index> row_ptr = count;
  std::vector<Index> col_idx(values_.size());
  std::vector<T> values(values_.size());
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      Index dst = count[col_idx_[k]]++;
      col_idx[dst] = r;
      values[dst] = values_[k];
    }
  }
  CsrMatrix t(cols_, rows_);
  t.set_raw(std::move(row_ptr), std::move(col_idx), std::move(values));
  return t;
}

template <class T>
CsrMatrix<T> multiply(const CsrMatrix<T>& a, const CsrMatrix<T>& b) {
  if (a.cols() != b.rows()) throw Error("multiply: shape mismatch");
  std::vector<Index> row_ptr(a.rows() + 1, 0);
  std::vector<Index> col_idx;
  std::vector<T> values;
  std::vector<T> acc(b.cols(), T{});
  std::vector<Index> marker(b.cols(), -1);
  std::vector<Index> touched;
  auto arp = a.row_ptr();
  auto aci = a.col_idx();
  auto av = a.values();
  auto brp = b.row_ptr();
  auto bci = b.col_idx();
  auto bv = b.values();
  for (Index r = 0; r < a.rows(); ++r) {
    touched.clear();
    for (Index k = arp[r]; k < arp[r + 1]; ++k) {
      Index mid = aci[k];
      for (Index l = brp[mid]; l < brp[mid + 1]; ++l) {
        Index c = bci[l];
        if (marker[c] != r) {
          marker[c] = r;
          acc[c] = T{};
          touched.push_back(c);
        }
        acc[c] += av[k] * bv[l];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Index c : touched) {
      col_idx.push_back(c);
      values.push_back(acc[c]);
    }
    row_ptr[r + 1] = static_cast<Index>(col_idx.size());
  }
  CsrMatrix<T> out(a.rows(), b.cols());
  out.set_raw(std::move(row_ptr), std::move(col_idx), std::move(values));
  return out;
}

SparseMatrix scaled(const SparseMatrix& a, double s) {
  SparseMatrix out = a;
  for (double& v : out.values()) v *= s;
  return out;
}

void write_matrix_market(const SparseMatrix& a, const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error("cannot open " + path + " for writing");
  std::fprintf(f.get(), "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(f.get(), "%d %d %zu\n", a.rows(), a.cols(), a.nnz());
  auto rp = a.row_ptr();
  auto ci = a.col_idx();
  auto v = a.values();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = rp[r]; k < rp[r + 1]; ++k)
      std::fprintf(f.get(), "%d %d %.17g\n", r + 1, ci[k] + 1, v[k]);
}

template class CsrMatrix<double>;
template class CsrMatrix<int>;
template CsrMatrix<double> multiply(const CsrMatrix<double>&, const CsrMatrix<double>&);
template CsrMatrix<int> multiply(const CsrMatrix<int>&, const CsrMatrix<int>&);

}  // namespace borpic
