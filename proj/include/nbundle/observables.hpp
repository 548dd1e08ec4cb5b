#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nbundle/fock_algebra.hpp"

namespace nbundle {

/// Cavity photon-number distribution P(0..n_max) with derived scalars.
/// `r` = P(2)/P(1) and `ratio31` = P(3)/P(1) are empty when P(1) < 1e-12
/// (or the truncation does not reach n = 2, 3).
struct PhotonDistribution {
  RealVector probs;
  Real mean_n = 0;
  std::optional<Real> r;
  std::optional<Real> ratio31;

  static PhotonDistribution from_probs(RealVector p);
  Real at(int n) const { return n < probs.size() ? probs(n) : 0.0; }
};

inline constexpr Real kRatioUndefinedBelow = 1e-12;

/// P(n) = <G,n|ρ|G,n> + <X,n|ρ|X,n>.
PhotonDistribution photon_distribution(const DensityMatrix& rho);

/// Partial trace over the emitter; (n_max+1)×(n_max+1).
ComplexMatrix reduce_cavity(const DensityMatrix& rho);

struct WignerMap {
  std::vector<Real> re_axis;
  std::vector<Real> im_axis;
  Eigen::MatrixXd values;  // values(i, j) = W(re_axis[i] + i·im_axis[j])
  bool truncation_warning = false;

  /// Riemann sum over the grid.
  Real integral() const;
};

struct WignerGrid {
  Real half_width = 2.0;
  int points = 101;

  /// max(2, 2√⟨n⟩) half width, 101×101 points.
  static WignerGrid default_for(Real mean_n);
};

/// W(α) = (2/π) Σ_n (−1)ⁿ <n|D(−α) ρ D(α)|n> on a square grid.
WignerMap wigner(const ComplexMatrix& rho_cav, const WignerGrid& grid);

/// Single-point evaluation of the displaced-parity expectation.
Real wigner_at(const ComplexMatrix& rho_cav, Complex alpha);

struct CoherentFit {
  Complex alpha;
  Real fidelity;
};

/// α = Tr(ρ a), fidelity <α|ρ|α> with the normalized truncated coherent state.
/// Throws TruncationFailure if |α|² > n_max/2.
CoherentFit coherent_fidelity(const ComplexMatrix& rho_cav);

/// Normalized coherent state in a Fock space of dimension `dim`.
ComplexVector coherent_state(Complex alpha, int dim);

/// Poisson(λ) on n = 0..n_max.
RealVector poisson_probs(Real lambda, int n_max);

/// ½ Σ|p − q| (shorter vector zero-padded).
Real total_variation(const RealVector& p, const RealVector& q);

}  // namespace nbundle
