#include "nbundle/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

namespace nbundle {

namespace {

SparseComplexMatrix with_trace_row(const SparseComplexMatrix& m, Eigen::Index row, Eigen::Index dim) {
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(m.nonZeros() + dim));
  for (int j = 0; j < m.outerSize(); ++j) {
    for (SparseComplexMatrix::InnerIterator it(m, j); it; ++it) {
      if (it.row() != row) t.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index i = 0; i < dim; ++i) t.emplace_back(row, i * dim + i, Complex(1.0));
  SparseComplexMatrix out(m.rows(), m.cols());
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

ComplexVector solve_dense(const SparseComplexMatrix& a, const ComplexVector& b) {
  const ComplexMatrix dense(a);
  Eigen::FullPivLU<ComplexMatrix> lu(dense);
  if (!lu.isInvertible()) {
    throw NonUniqueSteadyState("steady-state system is singular (rank " + std::to_string(lu.rank()) +
                               " of " + std::to_string(dense.rows()) + "): steady state not unique");
  }
  ComplexVector x = lu.solve(b);
  x += lu.solve(b - dense * x);
  return x;
}

ComplexVector solve_sparse(const SparseComplexMatrix& a, const ComplexVector& b) {
  Eigen::SparseLU<SparseComplexMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    throw NonUniqueSteadyState("sparse LU failed (" + lu.lastErrorMessage() + "): steady state not unique");
  }
  ComplexVector x = lu.solve(b);
  x += lu.solve(b - a * x);
  if (!x.allFinite()) throw NonUniqueSteadyState("steady-state solution is not finite");
  return x;
}

}  // namespace

SteadyStateResult steady_state(const Liouvillian& L, const SteadyStateOptions& options) {
  const Eigen::Index d = L.dim();
  const Eigen::Index n = d * d;
  if (options.replaced_row < 0 || options.replaced_row >= n) {
    throw InvalidArgument("replaced row outside the Liouvillian");
  }
  const SparseComplexMatrix a = with_trace_row(L.matrix, options.replaced_row, d);
  ComplexVector b = ComplexVector::Zero(n);
  b(options.replaced_row) = 1.0;

  const bool dense = options.solver == LinearSolverKind::dense ||
                     (options.solver == LinearSolverKind::automatic && n <= options.dense_limit);
  const ComplexVector x = dense ? solve_dense(a, b) : solve_sparse(a, b);

  ComplexMatrix rho = hermitian_part(unvectorize(x, d));
  SteadyStateResult res{DensityMatrix(L.space, rho), 0.0, L.space.n_max(), false};
  res.residual = nbundle::apply(L, rho).cwiseAbs().maxCoeff();

  const DensityReport rep = check_density(rho);
  std::ostringstream why;
  if (!(res.residual < options.residual_tol)) why << "residual " << res.residual << " above " << options.residual_tol << "; ";
  if (!(rep.trace_error < options.trace_tol)) why << "trace error " << rep.trace_error << "; ";
  if (!(rep.min_eigenvalue >= -options.positivity_tol)) why << "min eigenvalue " << rep.min_eigenvalue << "; ";
  if (!why.str().empty()) throw NoConvergence("steady state rejected: " + why.str());
  res.converged = true;
  return res;
}

SteadyStateResult steady_state_autotruncate(const SystemParams& params, int n_max_start,
                                            const AutotruncateOptions& options) {
  if (n_max_start < 4) throw InvalidArgument("n_max_start must be >= 4");
  if (n_max_start > options.n_max_ceiling) throw InvalidArgument("n_max_start above the ceiling");

  std::optional<PhotonDistribution> previous;
  int n_max = n_max_start;
  for (;;) {
    const HilbertSpace space(n_max);
    SteadyStateResult res = steady_state(build_liouvillian(params, space), options.steady);
    const PhotonDistribution dist = photon_distribution(res.rho_ss);

    const bool tail_ok = dist.at(n_max) < options.tail_tol;
    bool ratio_ok = true;
    if (previous) {
      if (previous->r.has_value() != dist.r.has_value()) {
        ratio_ok = false;
      } else if (dist.r) {
        ratio_ok = std::abs(*dist.r - *previous->r) < options.ratio_tol;
      }
    }
    if (tail_ok && ratio_ok) {
      res.n_max_used = n_max;
      return res;
    }
    if (n_max >= options.n_max_ceiling) {
      throw TruncationFailure("Fock truncation not converged at the n_max ceiling " +
                              std::to_string(options.n_max_ceiling) + " (P(n_max) = " +
                              std::to_string(dist.at(n_max)) + ")");
    }
    previous = dist;
    n_max = std::min(2 * n_max, options.n_max_ceiling);
  }
}

namespace {

// Dormand–Prince 5(4) tableau.
constexpr Real c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr Real a21 = 1.0 / 5;
constexpr Real a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr Real a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr Real a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr Real a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
               a65 = -5103.0 / 18656;
constexpr Real b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr Real e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
               e6 = 22.0 / 525, e7 = -1.0 / 40;

void record(TimeSeries& ts, Real t, const ComplexVector& y, const HilbertSpace& space) {
  const ComplexMatrix rho = unvectorize(y, space.dim());
  const DensityMatrix dm(space, rho);
  const PhotonDistribution p = photon_distribution(dm);
  Real exc = 0;
  for (int n = 0; n <= space.n_max(); ++n) {
    exc += std::real(rho(space.index(Emitter::X, n), space.index(Emitter::X, n)));
  }
  ts.times.push_back(t);
  ts.exciton.push_back(exc);
  ts.mean_n.push_back(p.mean_n);
  ts.probs.push_back(p.probs);
  ts.max_trace_drift = std::max(ts.max_trace_drift, std::abs(rho.trace() - Complex(1.0)));
}

}  // namespace

TimeSeries evolve(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<Real>& t_grid,
                  const EvolveOptions& options) {
  if (!(rho0.space == L.space)) throw DimensionMismatch("initial state does not match Liouvillian");
  if (t_grid.empty()) throw InvalidArgument("empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("time grid must be strictly increasing");
  }

  const SparseComplexMatrix& m = L.matrix;
  TimeSeries ts;
  ComplexVector y = vectorize(rho0.matrix);
  record(ts, t_grid.front(), y, L.space);

  const Real span = t_grid.back() - t_grid.front();
  Real stiffness = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) stiffness = std::max(stiffness, std::abs(m.coeff(i, i)));
  Real h = span > 0 ? std::min(span, 0.01 / std::max(stiffness, 1e-300)) : 0;

  const Eigen::Index n = y.size();
  ComplexVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  k1 = m * y;
  Real t = t_grid.front();

  for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
    const Real target = t_grid[gi];
    while (t < target) {
      if (ts.steps_accepted + ts.steps_rejected > options.max_steps) {
        throw StiffnessError("step budget exhausted; largest |L_ii| = " + std::to_string(stiffness));
      }
      bool last = false;
      Real step = h;
      if (t + step >= target) {
        step = target - t;
        last = true;
      }
      ytmp = y + step * a21 * k1;
      k2 = m * ytmp;
      ytmp = y + step * (a31 * k1 + a32 * k2);
      k3 = m * ytmp;
      ytmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
      k4 = m * ytmp;
      ytmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      k5 = m * ytmp;
      ytmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      k6 = m * ytmp;
      ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = m * ynew;
      err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      Real enorm = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Real scale = options.atol + options.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
        enorm = std::max(enorm, std::abs(err(i)) / scale);
      }
      if (!std::isfinite(enorm)) enorm = 1e10;

      if (enorm <= 1.0) {
        t = last ? target : t + step;
        y = ynew;
        k1 = k7;
        ++ts.steps_accepted;
        const Real grow = enorm == 0 ? 5.0 : std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0);
        if (!last) h = step * grow;
      } else {
        ++ts.steps_rejected;
        h = step * std::clamp(0.9 * std::pow(enorm, -0.25), 0.1, 0.9);
      }
      if (h < options.min_step_fraction * span) {
        std::ostringstream msg;
        msg << "step size underflow at t = " << t << " (h = " << h << "); stiff generator, largest |L_ii| = "
            << stiffness;
        throw StiffnessError(msg.str());
      }
    }
    record(ts, target, y, L.space);
  }
  ts.final_state = unvectorize(y, L.dim());
  return ts;
}

TimeSeries evolve_implicit(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<Real>& t_grid,
                           Real max_step) {
  if (!(rho0.space == L.space)) throw DimensionMismatch("initial state does not match Liouvillian");
  if (t_grid.empty()) throw InvalidArgument("empty time grid");
  if (!(max_step > 0)) throw InvalidArgument("max_step must be > 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("time grid must be strictly increasing");
  }

  using LU = Eigen::SparseLU<SparseComplexMatrix, Eigen::COLAMDOrdering<int>>;
  SparseComplexMatrix eye(L.matrix.rows(), L.matrix.cols());
  eye.setIdentity();
  // (c·I − d·h·L) factorizations, keyed on the step.
  auto factor = [&](LU& lu, Real c, Real dh) {
    const SparseComplexMatrix a = c * eye - dh * L.matrix;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) throw IntegratorFailure("implicit step matrix is singular: " + lu.lastErrorMessage());
  };

  TimeSeries ts;
  ComplexVector y = vectorize(rho0.matrix);
  ComplexVector y_prev;
  record(ts, t_grid.front(), y, L.space);
  LU euler, bdf2;
  Real h_euler = 0, h_bdf2 = 0;
  Real h_hist = 0;  // step between y_prev and y, 0 without history
  for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
    const Real span = t_grid[gi] - t_grid[gi - 1];
    const long n = std::max(1L, static_cast<long>(std::ceil(span / max_step * (1 - 1e-12))));
    const Real h = span / static_cast<Real>(n);
    for (long k = 0; k < n; ++k) {
      ComplexVector next;
      if (h_hist > 0 && std::abs(h - h_hist) <= 1e-12 * h) {
        if (h_bdf2 != h) factor(bdf2, 3.0, 2.0 * h);
        h_bdf2 = h;
        next = bdf2.solve(4.0 * y - y_prev);
      } else {
        if (h_euler != h) factor(euler, 1.0, h);
        h_euler = h;
        next = euler.solve(y);
      }
      y_prev = std::move(y);
      y = std::move(next);
      h_hist = h;
      ++ts.steps_accepted;
    }
    record(ts, t_grid[gi], y, L.space);
  }
  ts.final_state = unvectorize(y, L.dim());
  return ts;
}

std::vector<Real> linear_grid(Real t0, Real t1, int n) {
  if (n < 2) throw InvalidArgument("grid needs at least two points");
  std::vector<Real> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (n - 1);
  return g;
}

}  // namespace nbundle
