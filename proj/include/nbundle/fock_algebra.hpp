#pragma once

#include <Eigen/Eigenvalues>

#include "nbundle/types.hpp"

namespace nbundle {

/// Emitter (two-level system) basis label.
enum class Emitter : int { G = 0, X = 1 };

/// Truncated product space 2LS ⊗ Fock(0..n_max).
///
/// Basis ordering is emitter-major and is used everywhere, including the
/// vectorization of density matrices:
///   index(χ, n) = χ·(n_max+1) + n,   χ ∈ {G=0, X=1}.
class HilbertSpace {
 public:
  explicit HilbertSpace(int n_max);

  int n_max() const { return n_max_; }
  int fock_dim() const { return n_max_ + 1; }
  int dim() const { return 2 * (n_max_ + 1); }
  static constexpr int emitter_dim() { return 2; }

  Eigen::Index index(Emitter chi, int n) const;

  friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

 private:
  int n_max_;
};

/// Throws InvalidArgument for n_max < 1.
HilbertSpace build_space(int n_max);

/// Complex matrix bound to the space it acts on.
struct Operator {
  HilbertSpace space;
  ComplexMatrix matrix;

  Operator(HilbertSpace s, ComplexMatrix m);
  static Operator zero(const HilbertSpace& s);
  static Operator identity(const HilbertSpace& s);

  Operator adjoint() const { return {space, matrix.adjoint()}; }
};

Operator operator+(const Operator& lhs, const Operator& rhs);
Operator operator-(const Operator& lhs, const Operator& rhs);
Operator operator*(const Operator& lhs, const Operator& rhs);
Operator operator*(Complex scale, const Operator& op);

struct OperatorSet {
  Operator a;
  Operator a_dag;
  Operator sigma_minus;  // |G><X| ⊗ 1
  Operator sigma_plus;   // |X><G| ⊗ 1
  Operator proj_x;       // |X><X| ⊗ 1
  Operator number;       // a†a
  Operator identity;
};

/// Truncated algebra: a† maps |χ, n_max> to zero.
OperatorSet build_operators(const HilbertSpace& space);

/// Density matrix on the full space. Construction only checks the shape;
/// physical validity is reported by `check_density`.
struct DensityMatrix {
  HilbertSpace space;
  ComplexMatrix matrix;

  DensityMatrix(HilbertSpace s, ComplexMatrix m);
  static DensityMatrix basis_state(const HilbertSpace& s, Emitter chi, int n);
  static DensityMatrix pure(const HilbertSpace& s, const ComplexVector& psi);
};

ComplexVector basis_ket(const HilbertSpace& space, Emitter chi, int n);

struct DensityReport {
  Real trace_error = 0;        // |Tr ρ − 1|
  Real hermiticity_error = 0;  // max |ρ − ρ†|
  Real min_eigenvalue = 0;

  bool valid(Real trace_tol = 1e-8, Real herm_tol = 1e-10, Real pos_tol = 1e-8) const {
    return trace_error < trace_tol && hermiticity_error < herm_tol && min_eigenvalue >= -pos_tol;
  }
};

DensityReport check_density(const ComplexMatrix& rho);
inline DensityReport check_density(const DensityMatrix& rho) { return check_density(rho.matrix); }

/// Tr(ρ·op).
Complex expectation(const DensityMatrix& rho, const Operator& op);

// Expression-level helpers usable on any Eigen matrix expression.

template <typename A, typename B>
ComplexMatrix commutator(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  return x * y - y * x;
}

template <typename A, typename B>
ComplexMatrix anticommutator(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  return x * y + y * x;
}

template <typename Derived>
Real hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
ComplexMatrix hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / Real(2);
}

/// ½‖ρ − σ‖₁ for Hermitian arguments.
template <typename A, typename B>
Real trace_distance(const Eigen::MatrixBase<A>& rho, const Eigen::MatrixBase<B>& sigma) {
  const ComplexMatrix diff = hermitian_part(rho - sigma);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum() / Real(2);
}

/// Dense Kronecker product A⊗B.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-stacking vectorization and its inverse.
ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexVector& v, Eigen::Index dim);

}  // namespace nbundle
