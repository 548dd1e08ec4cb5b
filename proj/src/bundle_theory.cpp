#include "nbundle/bundle_theory.hpp"

#include <cmath>
#include <string>

namespace nbundle {

PhotonDistribution ideal_bundle_distribution(int n_bundle, Real mean_n) {
  if (n_bundle < 1) throw InvalidArgument("bundle size must be >= 1");
  if (mean_n < 0) throw InvalidArgument("mean photon number must be >= 0");
  const Real weight = mean_n / n_bundle;
  Real harmonic = 0;
  for (int j = 1; j <= n_bundle; ++j) harmonic += 1.0 / j;
  Real p0 = 1.0 - weight * harmonic;
  if (p0 < -1e-12) {
    throw InvalidArgument("mean photon number " + std::to_string(mean_n) +
                          " too large for an N=" + std::to_string(n_bundle) + " bundle distribution");
  }
  RealVector p(n_bundle + 1);
  p(0) = std::max(p0, 0.0);  // rounding at the saturation point
  for (int n = 1; n <= n_bundle; ++n) p(n) = weight / n;
  return PhotonDistribution::from_probs(std::move(p));
}

DressedStatePair dressed_energies(Real delta_LX, Real f) {
  if (f < 0) throw InvalidArgument("drive strength must be >= 0");
  const Real centre = -delta_LX / 2;
  const Real half_gap = std::sqrt(f * f + delta_LX * delta_LX / 4);
  return {centre + half_gap, centre - half_gap};
}

Real bundle_resonance_detuning(int n_bundle, Real f, Real delta_CX) {
  if (n_bundle < 2) {
    throw InvalidArgument("bundle resonance is singular for N < 2; use one_photon_resonance_detuning");
  }
  if (f <= 0) throw InvalidArgument("bundle resonance requires f > 0");
  const Real n2 = static_cast<Real>(n_bundle) * n_bundle;
  const Real root = std::sqrt(4 * (n2 - 1) * f * f + n2 * delta_CX * delta_CX);
  return (root + delta_CX) / (n2 - 1) + delta_CX;
}

Real one_photon_resonance_detuning(Real f, Real delta_CX) {
  if (f <= 0) throw InvalidArgument("one-photon resonance requires f > 0");
  if (delta_CX == 0) throw InvalidArgument("one-photon resonance is degenerate for delta_CX = 0");
  const Real delta_LX = (delta_CX * delta_CX - 4 * f * f) / (2 * delta_CX);
  // The dressed gap is positive, so the photon energy Δω_CL must be negative.
  if (delta_LX - delta_CX <= 0) {
    throw InvalidArgument("no one-photon resonance with delta_CL < 0 for these parameters");
  }
  return delta_LX;
}

Real resonance_identity_residual(int n_bundle, Real f, Real delta_CX) {
  const Real delta_LX = bundle_resonance_detuning(n_bundle, f, delta_CX);
  const DressedStatePair d = dressed_energies(delta_LX, f);
  return std::abs(d.gap() + n_bundle * (delta_CX - delta_LX));
}

}  // namespace nbundle
