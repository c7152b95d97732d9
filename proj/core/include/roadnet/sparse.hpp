#pragma once

#include <cmath>
#include <vector>

namespace roadnet {

struct Triplet {
  int row;
  int col;
  double value;
};

// Square symmetric sparse matrix in compressed-row form. Duplicate triplets
// are summed.
struct SparseMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  static SparseMatrix from_triplets(int n, const std::vector<Triplet>& triplets);

  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> diagonal() const;
};

struct SolveOptions {
  double rtol = 1e-10;
  int max_iter = 0;  // 0 means 10*sqrt(n) + 1000
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

// Jacobi-preconditioned conjugate gradients for symmetric positive
// semidefinite systems. The kernel vectors are orthonormalized and projected
// out of the right-hand side and of the residual every iteration, so the
// returned solution is orthogonal to the kernel. Throws SolverError when the
// iteration does not reach rtol * |b|.
std::vector<double> pcg_solve(const SparseMatrix& A, const std::vector<double>& b,
                              const std::vector<std::vector<double>>& kernel,
                              const SolveOptions& options = {}, SolveStats* stats = nullptr);

inline double dot_vec(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_vec(const std::vector<double>& a) { return std::sqrt(dot_vec(a, a)); }

}  // namespace roadnet
