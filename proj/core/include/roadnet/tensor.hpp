#ifndef ROADNET_TENSOR_HPP
#define ROADNET_TENSOR_HPP

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roadnet/fem.hpp"
#include "roadnet/mesh.hpp"
#include "roadnet/pattern.hpp"

namespace roadnet {

// Symmetric 2x2 diffusion tensor; the raw asymmetry of the assembled entries
// is recorded before symmetrization.
struct EffectiveTensor {
  double s11 = 1.0;
  double s12 = 0.0;
  double s22 = 1.0;
  double symmetry_defect = 0.0;

  double trace() const { return s11 + s22; }
  std::pair<double, double> eigenvalues() const;  // (min, max)
};

double frobenius_norm(const EffectiveTensor& t);
double frobenius_gap(const EffectiveTensor& x, const EffectiveTensor& y);

struct TensorResult {
  EffectiveTensor sigma;         // flux formula
  EffectiveTensor sigma_energy;  // energy formula; equals sigma up to solver residual
  double energy1 = 0.0;          // corrector energies |grad w|^2 (+ road term)
  double energy2 = 0.0;
  double pattern_length = 0.0;   // discretized pattern length l
  double trace_identity_defect = 0.0;  // |trace - (2 + a l - energy1 - energy2)|
  int iterations = 0;
  double residual = 0.0;
};

// Solve both direction correctors of the effective problem on the mesh and
// evaluate the tensor by the flux and energy formulas.
TensorResult effective_tensor(const PeriodicMesh& mesh, double a,
                              const SolveOptions& options = {},
                              std::array<CorrectorField, 2>* fields = nullptr);

// Finite-width tensor on a strip-carrying mesh with bulk 1 and a/delta in
// the strips.
TensorResult delta_tensor(const PeriodicMesh& mesh, double a, const SolveOptions& options = {},
                          std::array<CorrectorField, 2>* fields = nullptr);

// Nested solve at h and h/2 over pinned chord geometry with entrywise
// second-order Richardson extrapolation.
struct RichardsonResult {
  TensorResult coarse, fine;
  EffectiveTensor extrapolated;
  double energy1 = 0.0, energy2 = 0.0;  // extrapolated corrector energies
};

RichardsonResult effective_richardson(const TorusPattern& pattern, Vec2 offset, double a,
                                      double h, const SolveOptions& options = {});

struct SweepRow {
  double a = 0.0;
  std::optional<double> delta;
  double h = 0.0;
  TensorResult result;
  std::string error;  // nonempty if this entry failed
};

// Finite-width tensors for a decreasing delta list against the extrapolated
// effective tensor; per-delta failures are recorded, not fatal.
struct CommutationReport {
  RichardsonResult reference;
  std::vector<SweepRow> rows;
  std::vector<double> gaps;  // Frobenius distance per successful row, -1 on failure
  double empirical_order = 0.0;
};

CommutationReport commutation_sweep(const TorusPattern& pattern, double a,
                                    const std::vector<double>& deltas, double h,
                                    const SolveOptions& options = {});

// (2 + a l - trace)/a^2 per a, from extrapolated corrector energies.
struct SmallAReport {
  std::vector<double> a_values;
  std::vector<double> ratios;
};

SmallAReport small_a_sweep(const TorusPattern& pattern, const std::vector<double>& a_values,
                           double h, const SolveOptions& options = {});

// Checks 2 + a d^2 - eps_h <= trace <= 2 + a l + tol with the discretization
// slack eps_h taken from one refinement step.
struct LargeABoundRow {
  double a = 0.0;
  double trace = 0.0;  // extrapolated
  double eps_h = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
};

struct LargeABoundReport {
  double d_squared = 0.0;
  double pattern_length = 0.0;
  std::vector<LargeABoundRow> rows;
};

LargeABoundReport large_a_bound_check(const TorusPattern& pattern,
                                      const std::vector<double>& a_values, double d_squared,
                                      double h, const SolveOptions& options = {});

// CSV schema shared by solve and sweep outputs. The header includes comment
// lines recording the run defaults.
std::string tensor_csv_header();
std::string tensor_csv_row(const std::string& pattern_name, const std::string& kind, double a,
                           std::optional<double> delta, double h, const TensorResult& result);

}  // namespace roadnet

#endif
