#include "borpic/kernels.hpp"

namespace borpic::kernels {
namespace {

void spmv(CsrView a, const double* x, double* y) {
  for (Index r = 0; r < a.rows; ++r) {
    double acc = 0.0;
    for (Index k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.values[k] * x[a.col_idx[k]];
    y[r] = acc;
  }
}

void spmv_add(CsrView a, double alpha, const double* x, double* y) {
  for (Index r = 0; r < a.rows; ++r) {
    double acc = 0.0;
    for (Index k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.values[k] * x[a.col_idx[k]];
    y[r] += alpha * acc;
  }
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul(std::size_t n, const double* d, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", spmv, spmv_add, axpy, mul, dot};
  return table;
}

}  // namespace borpic::kernels
