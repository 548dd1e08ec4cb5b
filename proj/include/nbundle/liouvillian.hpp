#pragma once

#include <vector>

#include "nbundle/model.hpp"

namespace nbundle {

/// Vectorized Lindblad generator, ρ̇ = −i[H, ρ] + Σ Γ(OρO† − ½{O†O, ρ}),
/// acting on column-stacked density matrices: vec(AρB) = (Bᵀ⊗A) vec(ρ).
struct Liouvillian {
  HilbertSpace space;
  SparseComplexMatrix matrix;  // dim² × dim²
  Operator hamiltonian;
  std::vector<Channel> channels;

  Eigen::Index dim() const { return space.dim(); }
  ComplexMatrix dense() const { return ComplexMatrix(matrix); }
};

Liouvillian build_liouvillian(const Operator& hamiltonian, std::vector<Channel> channels);

/// Convenience: Hamiltonian and channels from `params` on `space`.
Liouvillian build_liouvillian(const SystemParams& params, const HilbertSpace& space);

/// ρ̇ for the given ρ.
ComplexMatrix apply(const Liouvillian& L, const ComplexMatrix& rho);
inline ComplexMatrix apply(const Liouvillian& L, const DensityMatrix& rho) {
  return apply(L, rho.matrix);
}

/// Row vector t with t·vec(ρ) = Tr ρ.
Eigen::RowVectorXcd trace_functional(Eigen::Index dim);

}  // namespace nbundle
