#include "nbundle/fock_algebra.hpp"

#include <cmath>
#include <string>

namespace nbundle {

HilbertSpace::HilbertSpace(int n_max) : n_max_(n_max) {
  if (n_max < 1) {
    throw InvalidArgument("n_max must be >= 1, got " + std::to_string(n_max));
  }
}

Eigen::Index HilbertSpace::index(Emitter chi, int n) const {
  return static_cast<Eigen::Index>(static_cast<int>(chi) * fock_dim() + n);
}

HilbertSpace build_space(int n_max) { return HilbertSpace(n_max); }

namespace {

void require_shape(const HilbertSpace& s, const ComplexMatrix& m, const char* what) {
  if (m.rows() != s.dim() || m.cols() != s.dim()) {
    throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", space dimension is " +
                            std::to_string(s.dim()));
  }
}

void require_same_space(const HilbertSpace& a, const HilbertSpace& b) {
  if (!(a == b)) throw DimensionMismatch("operators act on different spaces");
}

}  // namespace

Operator::Operator(HilbertSpace s, ComplexMatrix m) : space(s), matrix(std::move(m)) {
  require_shape(space, matrix, "Operator");
}

Operator Operator::zero(const HilbertSpace& s) { return {s, ComplexMatrix::Zero(s.dim(), s.dim())}; }

Operator Operator::identity(const HilbertSpace& s) {
  return {s, ComplexMatrix::Identity(s.dim(), s.dim())};
}

Operator operator+(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space, rhs.space);
  return {lhs.space, lhs.matrix + rhs.matrix};
}

Operator operator-(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space, rhs.space);
  return {lhs.space, lhs.matrix - rhs.matrix};
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space, rhs.space);
  return {lhs.space, lhs.matrix * rhs.matrix};
}

Operator operator*(Complex scale, const Operator& op) { return {op.space, scale * op.matrix}; }

OperatorSet build_operators(const HilbertSpace& space) {
  const int d = space.dim();
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  ComplexMatrix sm = ComplexMatrix::Zero(d, d);
  ComplexMatrix px = ComplexMatrix::Zero(d, d);
  for (int chi = 0; chi < 2; ++chi) {
    const auto e = static_cast<Emitter>(chi);
    for (int n = 1; n <= space.n_max(); ++n) {
      a(space.index(e, n - 1), space.index(e, n)) = std::sqrt(static_cast<Real>(n));
    }
  }
  for (int n = 0; n <= space.n_max(); ++n) {
    sm(space.index(Emitter::G, n), space.index(Emitter::X, n)) = 1.0;
    px(space.index(Emitter::X, n), space.index(Emitter::X, n)) = 1.0;
  }
  Operator a_op(space, a);
  Operator sm_op(space, sm);
  return OperatorSet{
      a_op,
      a_op.adjoint(),
      sm_op,
      sm_op.adjoint(),
      Operator(space, px),
      Operator(space, a.adjoint() * a),
      Operator::identity(space),
  };
}

DensityMatrix::DensityMatrix(HilbertSpace s, ComplexMatrix m) : space(s), matrix(std::move(m)) {
  require_shape(space, matrix, "DensityMatrix");
}

ComplexVector basis_ket(const HilbertSpace& space, Emitter chi, int n) {
  if (n < 0 || n > space.n_max()) {
    throw InvalidArgument("Fock index " + std::to_string(n) + " outside truncated space");
  }
  ComplexVector v = ComplexVector::Zero(space.dim());
  v(space.index(chi, n)) = 1.0;
  return v;
}

DensityMatrix DensityMatrix::basis_state(const HilbertSpace& s, Emitter chi, int n) {
  const ComplexVector k = basis_ket(s, chi, n);
  return {s, k * k.adjoint()};
}

DensityMatrix DensityMatrix::pure(const HilbertSpace& s, const ComplexVector& psi) {
  if (psi.size() != s.dim()) throw DimensionMismatch("state vector does not match space");
  const ComplexVector n = psi / psi.norm();
  return {s, n * n.adjoint()};
}

DensityReport check_density(const ComplexMatrix& rho) {
  DensityReport r;
  r.trace_error = std::abs(rho.trace() - Complex(1.0));
  r.hermiticity_error = hermiticity_error(rho);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(rho), Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

Complex expectation(const DensityMatrix& rho, const Operator& op) {
  require_same_space(rho.space, op.space);
  // Tr(ρ·O) = Σ_ij ρ_ij O_ji
  return (rho.matrix.transpose().cwiseProduct(op.matrix)).sum();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) throw DimensionMismatch("vector length is not dim^2");
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

}  // namespace nbundle
