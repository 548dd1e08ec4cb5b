#pragma once

#include "nbundle/observables.hpp"

namespace nbundle {

/// Energies of the laser-dressed emitter states |±> (cavity neglected), in the
/// rotating frame and in the same angular-frequency unit as the inputs.
struct DressedStatePair {
  Real e_plus;
  Real e_minus;

  Real gap() const { return e_plus - e_minus; }
};

/// Ideal N-bundle statistics:
///   P(0) = 1 − (⟨n⟩/N) Σ_{j≤N} 1/j,  P(n) = ⟨n⟩/(N n) for 1 ≤ n ≤ N,  0 above.
/// The returned vector has length N+1. Throws InvalidArgument when P(0) < 0.
PhotonDistribution ideal_bundle_distribution(int n_bundle, Real mean_n);

/// Eigenvalues of [[0, f], [f, −Δω_LX]].
DressedStatePair dressed_energies(Real delta_LX, Real f);

/// Laser–exciton detuning of the N-photon bundle resonance (N ≥ 2):
///   Δω_LX = [√(4(N²−1)f² + N²Δω_CX²) + Δω_CX]/(N²−1) + Δω_CX.
Real bundle_resonance_detuning(int n_bundle, Real f, Real delta_CX);

/// One-photon analog, from e₊ − e₋ = Δω_LX − Δω_CX:
///   Δω_LX = (Δω_CX² − 4f²)/(2Δω_CX).
/// Throws InvalidArgument for Δω_CX = 0 or f ≤ 0.
Real one_photon_resonance_detuning(Real f, Real delta_CX);

/// |(e₊ − e₋) + N·Δω_CL| at the N-photon resonance; vanishes when N rotating-frame
/// photons fit exactly between the dressed states.
Real resonance_identity_residual(int n_bundle, Real f, Real delta_CX);

}  // namespace nbundle
