#include "nbundle/liouvillian.hpp"

#include <string>

namespace nbundle {

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;

// Appends scale·(A⊗B) for square D×D factors.
void add_kron(Triplets& out, const SparseComplexMatrix& a, const SparseComplexMatrix& b, Complex scale) {
  const Eigen::Index d = b.rows();
  for (int ja = 0; ja < a.outerSize(); ++ja) {
    for (SparseComplexMatrix::InnerIterator ia(a, ja); ia; ++ia) {
      for (int jb = 0; jb < b.outerSize(); ++jb) {
        for (SparseComplexMatrix::InnerIterator ib(b, jb); ib; ++ib) {
          out.emplace_back(ia.row() * d + ib.row(), ia.col() * d + ib.col(), scale * ia.value() * ib.value());
        }
      }
    }
  }
}

SparseComplexMatrix sparse(const ComplexMatrix& m) { return m.sparseView(Complex(1.0), 0.0); }

}  // namespace

Liouvillian build_liouvillian(const Operator& hamiltonian, std::vector<Channel> channels) {
  const HilbertSpace& space = hamiltonian.space;
  const Eigen::Index d = space.dim();
  for (const Channel& c : channels) {
    if (!(c.op.space == space)) throw DimensionMismatch("channel operator acts on a different space");
    if (!(c.rate >= 0)) throw InvalidArgument("negative channel rate " + std::to_string(c.rate));
  }

  SparseComplexMatrix id(d, d);
  id.setIdentity();
  const Complex i_unit(0.0, 1.0);

  Triplets t;
  const SparseComplexMatrix h = sparse(hamiltonian.matrix);
  const SparseComplexMatrix ht = sparse(hamiltonian.matrix.transpose());
  add_kron(t, id, h, -i_unit);
  add_kron(t, ht, id, i_unit);

  for (const Channel& c : channels) {
    if (c.rate == 0) continue;
    const ComplexMatrix odo = c.op.matrix.adjoint() * c.op.matrix;
    add_kron(t, sparse(c.op.matrix.conjugate()), sparse(c.op.matrix), c.rate);
    add_kron(t, id, sparse(odo), -0.5 * c.rate);
    add_kron(t, sparse(odo.transpose()), id, -0.5 * c.rate);
  }

  SparseComplexMatrix m(d * d, d * d);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(Complex(0.0), 0.0);
  m.makeCompressed();
  return Liouvillian{space, std::move(m), hamiltonian, std::move(channels)};
}

Liouvillian build_liouvillian(const SystemParams& params, const HilbertSpace& space) {
  params.validate();
  return build_liouvillian(build_hamiltonian(params, space), lindblad_channels(params, space));
}

ComplexMatrix apply(const Liouvillian& L, const ComplexMatrix& rho) {
  if (rho.rows() != L.dim() || rho.cols() != L.dim()) {
    throw DimensionMismatch("density matrix does not match Liouvillian space");
  }
  const ComplexVector v = L.matrix * vectorize(rho);
  return unvectorize(v, L.dim());
}

Eigen::RowVectorXcd trace_functional(Eigen::Index dim) {
  Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(dim * dim);
  for (Eigen::Index i = 0; i < dim; ++i) t(i * dim + i) = 1.0;
  return t;
}

}  // namespace nbundle
