#include "npdisks/source.hpp"

#include <cmath>
#include <numbers>

#include "npdisks/errors.hpp"

namespace npdisks {

namespace {
constexpr double pi = std::numbers::pi;
}

DipoleSource DipoleSource::make(const Geometry& g, PlanePoint z, PlanePoint a) {
  const double na = norm(a);
  if (!(na > 0.0) || !std::isfinite(na)) throw DomainError("dipole polarization must be a nonzero vector");
  if (!is_exterior(g, z)) throw DomainError("dipole position must lie outside the closed domain");
  return {z, (1.0 / na) * a};
}

SourceCheck check_source(const Geometry& g, const DipoleSource& src, double tol) {
  SourceCheck c;
  c.psi2 = psi(g, src.z).theta;
  const PlanePoint g1 = grad_psi1(g, src.z), g2 = grad_psi2(g, src.z);
  c.a_grad_psi1 = dot(src.a, g1);
  c.a_grad_psi2 = dot(src.a, g2);
  const double scale = norm(g1);
  c.ok = std::abs(c.psi2) > tol && std::abs(c.a_grad_psi1) > tol * scale && std::abs(c.a_grad_psi2) > tol * scale;
  return c;
}

DipoleSource dipole_at_ratio(const Geometry& g, double xi, double ratio) {
  if (!(std::abs(ratio) < 1.0)) throw DomainError("dipole_at_ratio: |ratio| must be below 1");
  const PlanePoint z = phi(g, BipolarCoord(xi, ratio * g.theta0()));
  const PlanePoint g1 = grad_psi1(g, z), g2 = grad_psi2(g, z);
  return DipoleSource::make(g, z, (1.0 / norm(g1)) * g1 + (1.0 / norm(g2)) * g2);
}

double dipole_potential(const DipoleSource& src, PlanePoint x) {
  const PlanePoint d = x - src.z;
  const double r2 = dot(d, d);
  if (r2 == 0.0) throw SingularityError("dipole_potential: x coincides with the source");
  return dot(src.a, d) / (2.0 * pi * r2);
}

PlanePoint dipole_gradient(const DipoleSource& src, PlanePoint x) {
  const PlanePoint d = x - src.z;
  const double r2 = dot(d, d);
  if (r2 == 0.0) throw SingularityError("dipole_gradient: x coincides with the source");
  return (1.0 / (2.0 * pi * r2)) * (src.a - (2.0 * dot(src.a, d) / r2) * d);
}

BoundaryDensity dipole_normal_derivative(const Transform& T, const DipoleSource& src) {
  const auto& g = T.geometry();
  return T.sample([&](PlanePoint x, Arc arc) { return complex(dot(dipole_gradient(src, x), outward_normal(g, x, arc))); });
}

std::complex<double> lambda_from_permittivity(double eps_c, double delta) {
  const complex num(eps_c + 1.0, delta), den(2.0 * (eps_c - 1.0), 2.0 * delta);
  if (den == 0.0) throw SingularityError("lambda: eps_c = 1 with delta = 0");
  return num / den;
}

std::complex<double> ResonanceQuery::lambda(double delta) const {
  if (eps_c) return lambda_from_permittivity(*eps_c, delta);
  return {lambda0, delta};
}

void ResonanceQuery::validate() const {
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw DomainError("deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw DomainError("deltas must be strictly decreasing");
  }
}

}  // namespace npdisks
