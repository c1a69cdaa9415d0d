#pragma once

#include <cstddef>
#include <span>

#include "borpic/sparse.hpp"

namespace borpic::kernels {

struct CsrView {
  Index rows;
  const Index* row_ptr;
  const Index* col_idx;
  const double* values;
};

inline CsrView view(const SparseMatrix& a) {
  return {a.rows(), a.row_ptr().data(), a.col_idx().data(), a.values().data()};
}

// Every variant except dot is bitwise identical to the scalar reference.
struct KernelTable {
  const char* name;
  void (*spmv)(CsrView a, const double* x, double* y);                    // y = A x
  void (*spmv_add)(CsrView a, double alpha, const double* x, double* y);  // y += alpha A x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  void (*mul)(std::size_t n, const double* d, const double* x, double* y);  // y = d .* x
  double (*dot)(std::size_t n, const double* x, const double* y);
};

const KernelTable& scalar_table();
// nullptr when the CPU or the build lacks AVX2
const KernelTable* avx2_table();

// AVX2 when available unless BORPIC_ISA=scalar
const KernelTable& active();
void set_active(const KernelTable& table);

inline void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  active().spmv(view(a), x.data(), y.data());
}
inline void spmv_add(const SparseMatrix& a, double alpha, std::span<const double> x,
                     std::span<double> y) {
  active().spmv_add(view(a), alpha, x.data(), y.data());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(y.size(), alpha, x.data(), y.data());
}
inline void mul(std::span<const double> d, std::span<const double> x, std::span<double> y) {
  active().mul(y.size(), d.data(), x.data(), y.data());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.size(), x.data(), y.data());
}

}  // namespace borpic::kernels
