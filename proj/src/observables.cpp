#include "nbundle/observables.hpp"

#include <cmath>
#include <numbers>

namespace nbundle {

PhotonDistribution PhotonDistribution::from_probs(RealVector p) {
  PhotonDistribution d;
  d.probs = std::move(p);
  for (Eigen::Index n = 0; n < d.probs.size(); ++n) d.mean_n += static_cast<Real>(n) * d.probs(n);
  const Real p1 = d.at(1);
  if (p1 >= kRatioUndefinedBelow) {
    if (d.probs.size() > 2) d.r = d.probs(2) / p1;
    if (d.probs.size() > 3) d.ratio31 = d.probs(3) / p1;
  }
  return d;
}

PhotonDistribution photon_distribution(const DensityMatrix& rho) {
  const HilbertSpace& s = rho.space;
  RealVector p(s.fock_dim());
  for (int n = 0; n <= s.n_max(); ++n) {
    p(n) = std::real(rho.matrix(s.index(Emitter::G, n), s.index(Emitter::G, n))) +
           std::real(rho.matrix(s.index(Emitter::X, n), s.index(Emitter::X, n)));
  }
  return PhotonDistribution::from_probs(std::move(p));
}

ComplexMatrix reduce_cavity(const DensityMatrix& rho) {
  const int fd = rho.space.fock_dim();
  return rho.matrix.topLeftCorner(fd, fd) + rho.matrix.bottomRightCorner(fd, fd);
}

WignerGrid WignerGrid::default_for(Real mean_n) {
  return {std::max(2.0, 2.0 * std::sqrt(std::max(mean_n, 0.0))), 101};
}

Real WignerMap::integral() const {
  if (re_axis.size() < 2 || im_axis.size() < 2) return 0;
  const Real dx = re_axis[1] - re_axis[0];
  const Real dy = im_axis[1] - im_axis[0];
  return values.sum() * dx * dy;
}

namespace {

// <m|D(α) Π D†(α)|n> for m ≥ n:
//   (−1)ⁿ √(n!/m!) (2α)^(m−n) e^{−2|α|²} L_n^{(m−n)}(4|α|²).
// The element for m < n follows from Hermiticity.
ComplexMatrix displaced_parity(Complex alpha, int dim) {
  const Real x = 4.0 * std::norm(alpha);
  const Real gauss = std::exp(-2.0 * std::norm(alpha));
  ComplexMatrix k(dim, dim);
  for (int n = 0; n < dim; ++n) {
    Complex power = 1.0;  // (2α)^(m−n)/√(m!/n!)
    for (int m = n; m < dim; ++m) {
      if (m > n) power *= 2.0 * alpha / std::sqrt(static_cast<Real>(m));
      const Real sign = (n % 2 == 0) ? 1.0 : -1.0;
      const Real lag = std::assoc_laguerre(static_cast<unsigned>(n), static_cast<unsigned>(m - n), x);
      k(m, n) = sign * power * gauss * lag;
      if (m != n) k(n, m) = std::conj(k(m, n));
    }
  }
  return k;
}

}  // namespace

Real wigner_at(const ComplexMatrix& rho_cav, Complex alpha) {
  const ComplexMatrix k = displaced_parity(alpha, static_cast<int>(rho_cav.rows()));
  // Tr(ρ K)
  const Complex tr = (rho_cav.transpose().cwiseProduct(k)).sum();
  return 2.0 / std::numbers::pi * std::real(tr);
}

WignerMap wigner(const ComplexMatrix& rho_cav, const WignerGrid& grid) {
  if (grid.points < 2 || grid.half_width <= 0) throw InvalidArgument("Wigner grid needs >= 2 points and a positive width");
  const Real mean_n = std::real((rho_cav.diagonal().array() *
                                 Eigen::ArrayXd::LinSpaced(rho_cav.rows(), 0, rho_cav.rows() - 1).cast<Complex>()).sum());
  if (grid.half_width * grid.half_width < 4.0 * mean_n - 1e-12) {
    throw InvalidArgument("Wigner grid half width must satisfy alpha_max^2 >= 4 <n>");
  }
  WignerMap map;
  const int np = grid.points;
  const Real step = 2.0 * grid.half_width / (np - 1);
  for (int i = 0; i < np; ++i) {
    map.re_axis.push_back(-grid.half_width + i * step);
    map.im_axis.push_back(-grid.half_width + i * step);
  }
  const Eigen::Index top = rho_cav.rows() - 1;
  map.truncation_warning = std::real(rho_cav(top, top)) > 1e-6;
  map.values.resize(np, np);
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < np; ++j) {
      map.values(i, j) = wigner_at(rho_cav, Complex(map.re_axis[i], map.im_axis[j]));
    }
  }
  return map;
}

ComplexVector coherent_state(Complex alpha, int dim) {
  ComplexVector c(dim);
  c(0) = 1.0;
  for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<Real>(n));
  return c / c.norm();
}

CoherentFit coherent_fidelity(const ComplexMatrix& rho_cav) {
  const int dim = static_cast<int>(rho_cav.rows());
  const int n_max = dim - 1;
  Complex alpha = 0;
  // Tr(ρ a) = Σ_n √n ρ_{n, n−1}
  for (int n = 1; n < dim; ++n) alpha += std::sqrt(static_cast<Real>(n)) * rho_cav(n, n - 1);
  if (std::norm(alpha) > 0.5 * n_max) {
    throw TruncationFailure("coherent amplitude |alpha|^2 = " + std::to_string(std::norm(alpha)) +
                            " exceeds n_max/2; truncation unreliable");
  }
  const ComplexVector c = coherent_state(alpha, dim);
  const Real fid = std::real(c.dot(rho_cav * c));
  return {alpha, fid};
}

RealVector poisson_probs(Real lambda, int n_max) {
  RealVector p(n_max + 1);
  p(0) = std::exp(-lambda);
  for (int n = 1; n <= n_max; ++n) p(n) = p(n - 1) * lambda / n;
  return p;
}

Real total_variation(const RealVector& p, const RealVector& q) {
  const Eigen::Index len = std::max(p.size(), q.size());
  Real tv = 0;
  for (Eigen::Index i = 0; i < len; ++i) {
    const Real a = i < p.size() ? p(i) : 0.0;
    const Real b = i < q.size() ? q(i) : 0.0;
    tv += std::abs(a - b);
  }
  return tv / 2;
}

}  // namespace nbundle
