#include <doctest.h>

#include <random>

#include "nbundle/liouvillian.hpp"
#include "test_util.hpp"

using namespace nbundle;

namespace {

// −i[H,ρ] + Σ Γ(OρO† − ½{O†O, ρ}) with plain matrix products.
ComplexMatrix brute_force(const Operator& h, const std::vector<Channel>& channels, const ComplexMatrix& rho) {
  const Complex i(0, 1);
  ComplexMatrix out = -i * (h.matrix * rho - rho * h.matrix);
  for (const Channel& c : channels) {
    const ComplexMatrix& o = c.op.matrix;
    const ComplexMatrix odo = o.adjoint() * o;
    out += c.rate * (o * rho * o.adjoint() - 0.5 * (odo * rho + rho * odo));
  }
  return out;
}

SystemParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SystemParams p;
  p.g = 0.1 + u(rng);
  p.f = 2 * u(rng);
  p.gamma = u(rng);
  p.kappa = u(rng);
  p.gamma_phi = u(rng) < 0.5 ? 0.0 : u(rng);
  p.delta_LX = 4 * u(rng) - 2;
  p.delta_CX = 4 * u(rng) - 2;
  return p;
}

}  // namespace

TEST_CASE("single-photon decay") {
  const HilbertSpace s(3);
  const OperatorSet ops = build_operators(s);
  const Real kappa = 0.8;
  const Liouvillian L = build_liouvillian(Operator::zero(s), {{ops.a, kappa, ChannelKind::cavity}});
  const ComplexMatrix d = nbundle::apply(L, DensityMatrix::basis_state(s, Emitter::G, 1));
  CHECK(std::abs(d(s.index(Emitter::G, 0), s.index(Emitter::G, 0)) - kappa) < 1e-15);
  CHECK(std::abs(d(s.index(Emitter::G, 1), s.index(Emitter::G, 1)) + kappa) < 1e-15);

  // |n> population decays at rate nκ.
  for (int n = 1; n <= 3; ++n) {
    const ComplexMatrix dn = nbundle::apply(L, DensityMatrix::basis_state(s, Emitter::X, n));
    CHECK(std::abs(dn(s.index(Emitter::X, n), s.index(Emitter::X, n)) + n * kappa) < 1e-14);
  }
}

TEST_CASE("pure dephasing damps coherences only") {
  const HilbertSpace s(2);
  const OperatorSet ops = build_operators(s);
  const Real gp = 0.3;
  const Liouvillian L = build_liouvillian(Operator::zero(s), {{ops.proj_x, gp, ChannelKind::dephasing}});
  ComplexMatrix coh = ComplexMatrix::Zero(s.dim(), s.dim());
  coh(s.index(Emitter::X, 0), s.index(Emitter::G, 0)) = 1.0;
  CHECK((nbundle::apply(L, coh) + 0.5 * gp * coh).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(nbundle::apply(L, DensityMatrix::basis_state(s, Emitter::X, 1)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("undriven vacuum is stationary") {
  SystemParams p = preset("qd");
  p.f = 0;
  const HilbertSpace s(4);
  const Liouvillian L = build_liouvillian(p, s);
  CHECK(nbundle::apply(L, DensityMatrix::basis_state(s, Emitter::G, 0)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("brute-force oracle equivalence") {
  std::mt19937_64 rng(11);
  for (int n_max = 1; n_max <= 3; ++n_max) {
    const HilbertSpace s(n_max);
    for (int trial = 0; trial < 10; ++trial) {
      const SystemParams p = random_params(rng);
      const Liouvillian L = build_liouvillian(p, s);
      const ComplexMatrix rho = testutil::random_density(s.dim(), rng);
      const ComplexMatrix want = brute_force(L.hamiltonian, L.channels, rho);
      CHECK((nbundle::apply(L, rho) - want).cwiseAbs().maxCoeff() < 1e-12);
      // Also on a non-Hermitian operator, which exercises every Kronecker block.
      const ComplexMatrix x = testutil::random_matrix(s.dim(), rng);
      CHECK((nbundle::apply(L, x) - brute_force(L.hamiltonian, L.channels, x)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("trace and Hermiticity preservation on random inputs") {
  std::mt19937_64 rng(5);
  const HilbertSpace s(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Liouvillian L = build_liouvillian(random_params(rng), s);
    const ComplexMatrix rho = testutil::random_density(s.dim(), rng);
    const ComplexMatrix d = nbundle::apply(L, rho);
    CHECK(std::abs(d.trace()) < 1e-10);
    CHECK(hermiticity_error(d) < 1e-10);
    // The trace functional is a left null vector.
    const Eigen::RowVectorXcd t = trace_functional(s.dim());
    CHECK((t * L.matrix).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("spectrum lies in the closed left half-plane") {
  std::mt19937_64 rng(9);
  for (int n_max : {1, 2, 4}) {
    const HilbertSpace s(n_max);
    for (int trial = 0; trial < 3; ++trial) {
      const Liouvillian L = build_liouvillian(random_params(rng), s);
      Eigen::ComplexEigenSolver<ComplexMatrix> es(L.dense(), false);
      CHECK(es.eigenvalues().real().maxCoeff() <= 1e-10);
    }
  }
  // With κ, γ > 0 the zero eigenvalue is simple.
  const HilbertSpace s(3);
  Eigen::ComplexEigenSolver<ComplexMatrix> es(build_liouvillian(preset("qd"), s).dense(), false);
  int zeros = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) zeros += std::abs(es.eigenvalues()(k)) < 1e-12;
  CHECK(zeros == 1);
}

TEST_CASE("argument checks") {
  const HilbertSpace s(2), t(3);
  const OperatorSet ops = build_operators(s);
  CHECK_THROWS_AS(build_liouvillian(Operator::zero(s), {{ops.a, -1.0, ChannelKind::cavity}}), InvalidArgument);
  CHECK_THROWS_AS(build_liouvillian(Operator::zero(t), {{ops.a, 1.0, ChannelKind::cavity}}), DimensionMismatch);
  const Liouvillian L = build_liouvillian(Operator::zero(s), {});
  CHECK_THROWS_AS(nbundle::apply(L, ComplexMatrix::Identity(3, 3)), DimensionMismatch);
}
