#ifndef ROADNET_FEM_HPP
#define ROADNET_FEM_HPP

#include <array>
#include <vector>

#include "roadnet/mesh.hpp"
#include "roadnet/sparse.hpp"

namespace roadnet {

// Periodic degrees of freedom: boundary slaves share their master's index,
// so unknowns live on the torus.
struct DofMap {
  std::vector<int> vertex_to_dof;
  int n_dofs = 0;
};

DofMap build_dof_map(const PeriodicMesh& mesh);

// P1 shape-function gradients and the signed area of triangle t.
struct TriangleGradients {
  Vec2 grad[3];
  double area = 0.0;
};

TriangleGradients triangle_gradients(const PeriodicMesh& mesh, int t);

// Symmetric positive semidefinite system (kernel = constants on a connected
// mesh) with one load per coordinate direction and the lumped vertex
// measures used for mean-zero normalization.
struct AssembledSystem {
  SparseMatrix matrix;
  std::array<std::vector<double>, 2> load;
  std::vector<double> mass;
  DofMap dofs;
  double a = 0.0;
};

// Bulk Laplacian plus road terms a/L (u_b - u_a)(v_b - v_a) on the pattern
// edges; the loads are the corrector right-hand sides for directions e1, e2.
AssembledSystem assemble_effective(const PeriodicMesh& mesh, double a);

// Classical cell problem with scalar coefficient 1 in the bulk and a/delta
// on road-tagged triangles; loads are -int sigma e_k . grad v.
AssembledSystem assemble_delta(const PeriodicMesh& mesh, double a);

struct CorrectorField {
  std::vector<double> values;  // per mesh vertex, slaves copy masters
  int iterations = 0;
  double relative_residual = 0.0;
};

// Solve for the direction-k corrector (k = 1 or 2), mean-zero with respect
// to the lumped measure.
CorrectorField solve_corrector(const AssembledSystem& system, int k,
                               const SolveOptions& options = {});

// Max norm of the assembled direction-k load; balanced patterns produce an
// identically zero load.
double load_linf(const AssembledSystem& system, int k);

// Strong-form check of the interface condition for the effective corrector:
// at every chain-interior pattern vertex the bulk flux jump across the road
// must balance a times the second tangential derivative of w + x_k. Returns
// the largest pointwise defect; it shrinks with h on smooth patterns.
double road_condition_residual(const PeriodicMesh& mesh, double a, int k,
                               const std::vector<double>& values);

// Node check: at every pattern vertex with three or more incident pattern
// edges the outgoing tangential slopes of w + x_k must sum to zero. Returns
// the largest |a * sum|; zero for balanced patterns, O(h) otherwise.
double kirchhoff_residual(const PeriodicMesh& mesh, double a, int k,
                          const std::vector<double>& values);

}  // namespace roadnet

#endif
