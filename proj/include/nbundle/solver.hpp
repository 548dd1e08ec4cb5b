#pragma once

#include <vector>

#include "nbundle/liouvillian.hpp"
#include "nbundle/observables.hpp"

namespace nbundle {

struct SteadyStateResult {
  DensityMatrix rho_ss;
  Real residual = 0;  // max |L vec(ρ_ss)|
  int n_max_used = 0;
  bool converged = false;
};

enum class LinearSolverKind { automatic, dense, sparse };

struct SteadyStateOptions {
  Eigen::Index replaced_row = 0;  // row of L overwritten by the trace functional
  LinearSolverKind solver = LinearSolverKind::automatic;
  Real residual_tol = 1e-9;
  Real positivity_tol = 1e-8;
  Real trace_tol = 1e-8;
  Eigen::Index dense_limit = 400;  // automatic: dense LU when dim² ≤ this
};

/// Unique steady state: one row of L is replaced by the trace functional and
/// the linear system L'·vec(ρ) = e_row is solved, then ρ ← (ρ+ρ†)/2.
/// Throws NonUniqueSteadyState for a singular system and NoConvergence if the
/// residual, trace or positivity checks fail.
SteadyStateResult steady_state(const Liouvillian& L, const SteadyStateOptions& options = {});

struct AutotruncateOptions {
  int n_max_ceiling = 120;
  Real tail_tol = 1e-8;  // P(n_max) threshold
  Real ratio_tol = 1e-3;  // allowed change of r between truncations
  SteadyStateOptions steady{};
};

/// Doubles n_max from `n_max_start` until P(n_max) < tail_tol and r changes by
/// less than ratio_tol. Throws TruncationFailure past the ceiling.
SteadyStateResult steady_state_autotruncate(const SystemParams& params, int n_max_start,
                                            const AutotruncateOptions& options = {});

struct TimeSeries {
  std::vector<Real> times;
  std::vector<Real> exciton;      // <|X><X|>
  std::vector<Real> mean_n;       // <a†a>
  std::vector<RealVector> probs;  // P(n) at each time
  ComplexMatrix final_state;
  Real max_trace_drift = 0;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

struct EvolveOptions {
  Real rtol = 1e-8;
  Real atol = 1e-10;
  Real min_step_fraction = 1e-13;  // of the total span; below this → StiffnessError
  long max_steps = 200'000'000;
};

/// Dormand–Prince 5(4) integration of vec(ρ̇) = L vec(ρ). Observables are
/// recorded at the (strictly increasing) grid times; the first grid time is
/// the time of `rho0`.
TimeSeries evolve(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<Real>& t_grid,
                  const EvolveOptions& options = {});

/// Fixed-step BDF2 (first step implicit Euler): one sparse LU per distinct
/// step, no stability limit on fast oscillations. Every interval of the grid
/// is split into equal steps no longer than `max_step`. Its fixed point is
/// exactly the kernel of L, so it is the tool for long relaxation runs;
/// use evolve() when transient accuracy matters.
TimeSeries evolve_implicit(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<Real>& t_grid,
                           Real max_step);

/// n evenly spaced times in [t0, t1].
std::vector<Real> linear_grid(Real t0, Real t1, int n);

}  // namespace nbundle
