#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "borpic/constitutive.hpp"
#include "borpic/error.hpp"
#include "borpic/kernels.hpp"
#include "borpic/workers.hpp"

namespace borpic {

namespace {

// columns reachable from j within `level` hops of the (symmetric) pattern of A
void pattern_column(const SparseMatrix& a, Index j, int level, std::vector<Index>& out,
                    std::vector<Index>& mark, Index stamp) {
  auto rp = a.row_ptr();
  auto ci = a.col_idx();
  out.clear();
  out.push_back(j);
  mark[j] = stamp;
  std::size_t frontier_begin = 0;
  for (int l = 0; l < level; ++l) {
    std::size_t frontier_end = out.size();
    for (std::size_t f = frontier_begin; f < frontier_end; ++f) {
      Index r = out[f];
      for (Index k = rp[r]; k < rp[r + 1]; ++k)
        if (mark[ci[k]] != stamp) {
          mark[ci[k]] = stamp;
          out.push_back(ci[k]);
        }
    }
    frontier_begin = frontier_end;
  }
  std::sort(out.begin(), out.end());
}

struct ColumnResult {
  std::vector<Index> rows;
  std::vector<double> values;
};

void spai_columns(const SparseMatrix& a, int level, double drop_tol, Index begin, Index end,
                  std::vector<ColumnResult>& cols) {
  const Index n = a.rows();
  std::vector<Index> mark_j(n, -1), mark_i(n, -1), local_i(n, -1);
  std::vector<Index> J, I;
  auto rp = a.row_ptr();
  auto ci = a.col_idx();
  auto av = a.values();
  for (Index j = begin; j < end; ++j) {
    pattern_column(a, j, level, J, mark_j, j);
    I.clear();
    for (Index c : J)
      for (Index k = rp[c]; k < rp[c + 1]; ++k)
        if (mark_i[ci[k]] != j) {
          mark_i[ci[k]] = j;
          I.push_back(ci[k]);
        }
    std::sort(I.begin(), I.end());
    for (std::size_t r = 0; r < I.size(); ++r) local_i[I[r]] = static_cast<Index>(r);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(I.size()),
                                                  static_cast<Eigen::Index>(J.size()));
    // A symmetric: column c equals row c
    for (std::size_t cj = 0; cj < J.size(); ++cj)
      for (Index k = rp[J[cj]]; k < rp[J[cj] + 1]; ++k)
        block(local_i[ci[k]], static_cast<Eigen::Index>(cj)) = av[k];
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(I.size()));
    rhs(local_i[j]) = 1.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(block);
    if (qr.rank() < static_cast<Eigen::Index>(J.size()))
      throw SolverError("singular least-squares block in SPAI column " + std::to_string(j));
    Eigen::VectorXd m = qr.solve(rhs);
    double cmax = m.cwiseAbs().maxCoeff();
    auto& out = cols[j];
    for (std::size_t cj = 0; cj < J.size(); ++cj) {
      double v = m(static_cast<Eigen::Index>(cj));
      if (std::abs(v) < drop_tol * cmax) continue;
      out.rows.push_back(J[cj]);
      out.values.push_back(v);
    }
  }
}

}  // namespace

SparseMatrix spai_inverse(const SparseMatrix& a, int pattern_level, double drop_tol, int workers) {
  if (a.rows() != a.cols()) throw SolverError("SPAI needs a square matrix");
  if (pattern_level < 1) throw SolverError("SPAI pattern level must be >= 1");
  const Index n = a.rows();
  std::vector<ColumnResult> cols(n);
  int nw = workers > 0 ? workers : worker_count();
  nw = std::max(1, std::min<int>(nw, n / 64 + 1));
  if (nw == 1) {
    spai_columns(a, pattern_level, drop_tol, 0, n, cols);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nw);
    for (int w = 0; w < nw; ++w) {
      Index b = static_cast<Index>(static_cast<long>(n) * w / nw);
      Index e = static_cast<Index>(static_cast<long>(n) * (w + 1) / nw);
      pool.emplace_back([&, w, b, e] {
        try {
          spai_columns(a, pattern_level, drop_tol, b, e, cols);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::vector<Triplet<double>> t;
  for (Index j = 0; j < n; ++j)
    for (std::size_t r = 0; r < cols[j].rows.size(); ++r)
      t.push_back({cols[j].rows[r], j, cols[j].values[r]});
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

double inverse_residual(const SparseMatrix& m, const SparseMatrix& a) {
  SparseMatrix p = multiply(m, a);
  double sum = 0.0;
  auto rp = p.row_ptr();
  auto ci = p.col_idx();
  auto v = p.values();
  for (Index r = 0; r < p.rows(); ++r) {
    bool diag_seen = false;
    for (Index k = rp[r]; k < rp[r + 1]; ++k) {
      double x = v[k];
      if (ci[k] == r) {
        x -= 1.0;
        diag_seen = true;
      }
      sum += x * x;
    }
    if (!diag_seen) sum += 1.0;
  }
  return std::sqrt(sum / static_cast<double>(p.rows()));
}

struct MassSolver::Factor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseMatrix& a) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nnz());
  auto rp = a.row_ptr();
  auto ci = a.col_idx();
  auto v = a.values();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = rp[r]; k < rp[r + 1]; ++k) t.emplace_back(r, ci[k], v[k]);
  Eigen::SparseMatrix<double> m(a.rows(), a.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

MassSolver::MassSolver(const SparseMatrix& a, const MassSolverOptions& options)
    : kind_(options.kind), size_(a.rows()) {
  if (kind_ == MassSolverKind::spai) {
    SparseMatrix m = spai_inverse(a, options.spai_level, options.spai_drop_tol);
    SparseMatrix mt = m.transpose();
    std::vector<Triplet<double>> t;
    auto add = [&](const SparseMatrix& x) {
      auto rp = x.row_ptr();
      auto ci = x.col_idx();
      auto v = x.values();
      for (Index r = 0; r < x.rows(); ++r)
        for (Index k = rp[r]; k < rp[r + 1]; ++k) t.push_back({r, ci[k], 0.5 * v[k]});
    };
    add(m);
    add(mt);
    approx_ = SparseMatrix::from_triplets(size_, size_, std::move(t));
    spai_residual_ = inverse_residual(approx_, a);
    if (spai_residual_ <= options.fallback_residual) return;
    std::fprintf(stderr, "warning: SPAI residual %.3g above %.3g, using exact factorization\n",
                 spai_residual_, options.fallback_residual);
    kind_ = MassSolverKind::exact;
    approx_ = SparseMatrix();
  }
  factor_ = std::make_unique<Factor>();
  factor_->ldlt.compute(to_eigen(a));
  if (factor_->ldlt.info() != Eigen::Success) throw SolverError("mass matrix factorization failed");
  if ((factor_->ldlt.vectorD().array() <= 0.0).any())
    throw SolverError("mass matrix is not positive definite");
}

MassSolver::~MassSolver() = default;
MassSolver::MassSolver(MassSolver&&) noexcept = default;
MassSolver& MassSolver::operator=(MassSolver&&) noexcept = default;

void MassSolver::solve(std::span<const double> rhs, std::span<double> x) const {
  if (kind_ == MassSolverKind::spai) {
    kernels::spmv(approx_, rhs, x);
    return;
  }
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::Map<Eigen::VectorXd> out(x.data(), static_cast<Eigen::Index>(x.size()));
  out = factor_->ldlt.solve(b);
}

}  // namespace borpic
