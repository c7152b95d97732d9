#include "roadnet/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roadnet/errors.hpp"

namespace roadnet {

SparseMatrix SparseMatrix::from_triplets(int n, const std::vector<Triplet>& triplets) {
  SparseMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  for (const auto& t : triplets) m.row_ptr[t.row + 1]++;
  for (int i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  std::vector<int> cursor(m.row_ptr.begin(), m.row_ptr.end() - 1);
  m.col.resize(triplets.size());
  m.val.resize(triplets.size());
  for (const auto& t : triplets) {
    int at = cursor[t.row]++;
    m.col[at] = t.col;
    m.val[at] = t.value;
  }
  // Sort each row by column and merge duplicates.
  std::vector<int> new_ptr(n + 1, 0);
  std::vector<int> new_col;
  std::vector<double> new_val;
  new_col.reserve(m.col.size());
  new_val.reserve(m.val.size());
  std::vector<std::pair<int, double>> row;
  for (int i = 0; i < n; ++i) {
    row.clear();
    for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) row.push_back({m.col[k], m.val[k]});
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t k = 0; k < row.size(); ++k) {
      if (!new_col.empty() && (int)new_col.size() > new_ptr[i] && new_col.back() == row[k].first)
        new_val.back() += row[k].second;
      else {
        new_col.push_back(row[k].first);
        new_val.push_back(row[k].second);
      }
    }
    new_ptr[i + 1] = (int)new_col.size();
  }
  m.row_ptr = std::move(new_ptr);
  m.col = std::move(new_col);
  m.val = std::move(new_val);
  return m;
}

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (col[k] == i) d[i] += val[k];
  return d;
}

namespace {

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void project_out(const std::vector<std::vector<double>>& basis, std::vector<double>& v) {
  for (const auto& q : basis) axpy(-dot_vec(q, v), q, v);
}

}  // namespace

std::vector<double> pcg_solve(const SparseMatrix& A, const std::vector<double>& b,
                              const std::vector<std::vector<double>>& kernel,
                              const SolveOptions& options, SolveStats* stats) {
  int n = A.n;
  if ((int)b.size() != n) throw SolverError("pcg_solve: size mismatch");

  // Orthonormalize the kernel vectors (modified Gram-Schmidt).
  std::vector<std::vector<double>> basis;
  for (auto q : kernel) {
    project_out(basis, q);
    double nq = norm_vec(q);
    if (nq > 1e-14) {
      for (auto& v : q) v /= nq;
      basis.push_back(std::move(q));
    }
  }

  std::vector<double> inv_diag = A.diagonal();
  for (auto& d : inv_diag) d = (d > 0.0) ? 1.0 / d : 1.0;

  std::vector<double> r = b;
  project_out(basis, r);
  double bnorm = norm_vec(r);
  std::vector<double> x(n, 0.0);
  if (stats) {
    stats->iterations = 0;
    stats->relative_residual = 0.0;
  }
  if (bnorm == 0.0) return x;

  int max_iter = options.max_iter > 0
                     ? options.max_iter
                     : (int)(10.0 * std::sqrt((double)n)) + 1000;

  std::vector<double> z(n), p(n), q(n);
  double rho_prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    project_out(basis, z);
    double rho = dot_vec(r, z);
    if (it == 1)
      p = z;
    else {
      double beta = rho / rho_prev;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    rho_prev = rho;
    A.multiply(p, q);
    double pq = dot_vec(p, q);
    if (pq <= 0.0) throw SolverError("pcg_solve: matrix is not positive definite on the subspace");
    double alpha = rho / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    project_out(basis, r);
    double rnorm = norm_vec(r);
    if (stats) {
      stats->iterations = it;
      stats->relative_residual = rnorm / bnorm;
    }
    if (rnorm <= options.rtol * bnorm) {
      project_out(basis, x);
      return x;
    }
  }
  std::ostringstream os;
  os << "pcg_solve: no convergence after " << max_iter << " iterations (relative residual "
     << (stats ? stats->relative_residual : -1.0) << ", rtol " << options.rtol << ")";
  throw SolverError(os.str());
}

}  // namespace roadnet
