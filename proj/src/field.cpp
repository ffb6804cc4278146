#include "npdisks/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "npdisks/errors.hpp"
#include "hyperbolic.hpp"

namespace npdisks {

namespace {

constexpr double pi = std::numbers::pi;
const double inv_two_sqrt_pi = 0.5 / std::sqrt(pi);
constexpr complex I(0.0, 1.0);

using detail::Kind;
using detail::quotient;
using detail::scaled;
using detail::swap;

// fA(x) fB(y) / (s sinh(s pi)) for |x| + |y| <= |s| pi.
double strip_ratio(Kind ka, double x, Kind kb, double y, double s) {
  const double as = std::abs(s);
  return std::exp(std::abs(x) + std::abs(y) - as * pi) * scaled(ka, x) * scaled(kb, y) /
         (0.5 * as * -std::expm1(-2.0 * pi * as));
}

void require_grid(const SpectralGrid& a, const SpectralGrid& b, const char* what) {
  if (a != b) throw GridMismatchError(std::string(what) + ": grids differ");
}

void require_j(int j) {
  if (j != 1 && j != 2) throw DomainError("generalized eigenfunction index j must be 1 or 2");
}

}  // namespace

BipolarCoord strip_coords(const Geometry& g, PlanePoint z) {
  const double alpha = g.alpha();
  if (z.x2 == 0.0 && std::abs(z.x1) < alpha &&
      std::abs(std::abs(z.x1) - alpha) > 1e-15 * alpha) {
    return BipolarCoord(std::log((alpha + z.x1) / (alpha - z.x1)), pi);
  }
  return psi(g, z);
}

// ---------------------------------------------------------- StripSolution

StripSolution::StripSolution(const Transform& T, const SpectralPair& f) : T_(&T) {
  require_grid(f.grid, T.grid(), "StripSolution");
  const int n = T.grid().size();
  Fo_.resize(n);
  Fe_.resize(n);
  for (int k = 0; k < n; ++k) {
    Fo_[k] = 0.5 * f.f1[k];
    Fe_[k] = 0.5 * f.f2[k];
  }
  // u~(0, 0) = 0; the odd part vanishes on theta = 0.
  c0_ = -T.fourier().inverse_at(profile(0.0), 0.0);
}

std::vector<complex> StripSolution::profile(double theta, bool d) const {
  const double t0 = T_->geometry().theta0();
  const int n = T_->grid().size();
  std::vector<complex> v(n);
  // Each piece is c * fA(s A) fB(s B(theta)) / (s sinh s pi); the theta
  // derivative swaps fB and brings down a factor s.
  auto piece = [d](Kind ka, double x, Kind kb, double y, double s) {
    return d ? s * strip_ratio(ka, x, swap(kb), y, s) : strip_ratio(ka, x, kb, y, s);
  };
  for (int k = 0; k < n; ++k) {
    const double s = T_->grid().s(k);
    double odd, even;
    if (theta > t0) {
      odd = piece(Kind::sinh, s * t0, Kind::sinh, s * (theta - pi), s);
      even = -piece(Kind::cosh, s * t0, Kind::cosh, s * (theta - pi), s);
    } else if (theta < -t0) {
      odd = piece(Kind::sinh, s * t0, Kind::sinh, s * (theta + pi), s);
      even = -piece(Kind::cosh, s * t0, Kind::cosh, s * (theta + pi), s);
    } else {
      odd = -piece(Kind::sinh, s * (pi - t0), Kind::sinh, s * theta, s);
      even = -piece(Kind::cosh, s * (pi - t0), Kind::cosh, s * theta, s);
    }
    v[k] = odd * Fo_[k] + even * Fe_[k];
  }
  return v;
}

complex StripSolution::at(double xi, double theta) const {
  const BipolarCoord c(xi, theta);
  return T_->fourier().inverse_at(profile(c.theta), xi) + c0_;
}

std::array<complex, 2> StripSolution::strip_gradient(double xi, double theta) const {
  const BipolarCoord c(xi, theta);
  auto v = profile(c.theta);
  for (int k = 0; k < T_->grid().size(); ++k) v[k] *= I * T_->grid().s(k);
  return {T_->fourier().inverse_at(v, xi), T_->fourier().inverse_at(profile(c.theta, true), xi)};
}

complex StripSolution::operator()(PlanePoint z) const {
  const auto c = strip_coords(T_->geometry(), z);
  return at(c.xi, c.theta);
}

std::array<complex, 2> StripSolution::gradient(PlanePoint z) const {
  const auto& g = T_->geometry();
  const auto c = strip_coords(g, z);
  const auto d = strip_gradient(c.xi, c.theta);
  const PlanePoint g1 = grad_psi1(g, z), g2 = grad_psi2(g, z);
  return {d[0] * g1.x1 + d[1] * g2.x1, d[0] * g1.x2 + d[1] * g2.x2};
}

StripSolution solve_transmission(const Transform& T, const BoundaryDensity& phi, double tol) {
  require_grid(phi.grid, T.grid(), "solve_transmission");
  double mass = 0.0;
  for (int n = 0; n < T.grid().size(); ++n)
    mass += (std::abs(phi.plus[n]) + std::abs(phi.minus[n])) / T.scale()[n];
  mass *= T.grid().dxi();
  const double mean = std::abs(T.integral(phi));
  if (mean > tol * mass) {
    throw DomainError("solve_transmission: density is not mean-zero (|int phi| = " + std::to_string(mean) +
                      "); the single layer potential would grow like log|x|");
  }
  return StripSolution(T, T.forward(phi));
}

BoundaryDensity single_layer_boundary(const Transform& T, const BoundaryDensity& phi) {
  const StripSolution u(T, T.forward(phi));
  const double t0 = T.geometry().theta0();
  auto out = BoundaryDensity::zeros(T.grid());
  out.plus = T.fourier().inverse(u.profile(t0));
  out.minus = T.fourier().inverse(u.profile(-t0));
  for (int n = 0; n < T.grid().size(); ++n) {
    out.plus[n] += u.c0();
    out.minus[n] += u.c0();
  }
  return out;
}

BoundaryDensity np_apply_boundary(const Transform& T, const BoundaryDensity& phi) {
  return T.inverse(apply_K_multiplier(T.multipliers(), T.forward(phi)));
}

// ------------------------------------------------ generalized eigenfunctions

complex eigenfunction_boundary(const Geometry& g, GenEigenfunction e, double xi, Arc arc) {
  require_j(e.j);
  const Multipliers m(g);
  const double h = scale_factor(g, xi, g.theta0());
  const complex wave = std::polar(1.0, e.s * xi);
  if (e.j == 1) return arc_sign(arc) * inv_two_sqrt_pi / std::sqrt(m.p1(e.s)) * h * wave;
  return inv_two_sqrt_pi / std::sqrt(m.p2(e.s)) * h * (wave - 1.0);
}

complex eigenfunction_trace(const Geometry& g, GenEigenfunction e, double xi, Arc arc) {
  require_j(e.j);
  const Multipliers m(g);
  if (e.j == 1) return arc_sign(arc) * inv_two_sqrt_pi * std::sqrt(m.p1(e.s)) * std::polar(1.0, e.s * xi);
  if (e.s == 0.0) return I * xi / (2.0 * pi);
  return inv_two_sqrt_pi * std::sqrt(m.p2(e.s)) * (std::polar(1.0, e.s * xi) - 1.0);
}

namespace {

struct Exterior {
  BipolarCoord c;
  PlanePoint g1, g2;
};

Exterior exterior_point(const Geometry& g, PlanePoint z, const char* what) {
  if (!is_exterior(g, z)) throw DomainError(std::string(what) + ": z must lie outside the closed domain");
  return {psi(g, z), grad_psi1(g, z), grad_psi2(g, z)};
}

}  // namespace

complex eigenfunction_single_layer(const Geometry& g, GenEigenfunction e, PlanePoint z) {
  require_j(e.j);
  const auto x = exterior_point(g, z, "eigenfunction_single_layer");
  const Multipliers m(g);
  const double s = e.s, t0 = g.theta0(), p2 = x.c.theta;
  const complex wave = std::polar(1.0, s * x.c.xi);
  if (e.j == 1) {
    const double r = s == 0.0 ? p2 / t0 : quotient(Kind::sinh, s * p2, Kind::sinh, s * t0);
    return inv_two_sqrt_pi * std::sqrt(m.p1(s)) * r * wave;
  }
  if (s == 0.0) return I * x.c.xi / (2.0 * pi);
  return inv_two_sqrt_pi * std::sqrt(m.p2(s)) * (quotient(Kind::cosh, s * p2, Kind::cosh, s * t0) * wave - 1.0);
}

std::array<complex, 2> eigenfunction_single_layer_gradient(const Geometry& g, GenEigenfunction e, PlanePoint z) {
  require_j(e.j);
  const auto x = exterior_point(g, z, "eigenfunction_single_layer_gradient");
  const Multipliers m(g);
  const double s = e.s, t0 = g.theta0(), p2 = x.c.theta;
  // grad = A grad Psi2 + i B grad Psi1, times e^{i s Psi1}.
  double A, B;
  if (e.j == 1) {
    if (s == 0.0) {
      A = inv_two_sqrt_pi * std::sqrt(m.p1(0.0)) / t0;
      B = 0.0;
    } else {
      const double c = inv_two_sqrt_pi * std::sqrt(m.p1(s)) * s;
      A = c * quotient(Kind::cosh, s * p2, Kind::sinh, s * t0);
      B = c * quotient(Kind::sinh, s * p2, Kind::sinh, s * t0);
    }
  } else {
    if (s == 0.0) {
      A = 0.0;
      B = 1.0 / (2.0 * pi);
    } else {
      const double c = inv_two_sqrt_pi * std::sqrt(m.p2(s)) * s;
      A = c * quotient(Kind::sinh, s * p2, Kind::cosh, s * t0);
      B = c * quotient(Kind::cosh, s * p2, Kind::cosh, s * t0);
    }
  }
  const complex wave = std::polar(1.0, s * x.c.xi);
  return {wave * (A * x.g2.x1 + I * B * x.g1.x1), wave * (A * x.g2.x2 + I * B * x.g1.x2)};
}

complex eigenfunction_potential(const Geometry& g, GenEigenfunction e, PlanePoint z) {
  require_j(e.j);
  if (e.j == 1) return -eigenfunction_single_layer(g, e, z);
  const auto x = exterior_point(g, z, "eigenfunction_potential");
  if (e.s == 0.0) return -I * x.c.xi / (2.0 * pi);
  const Multipliers m(g);
  const double s = e.s, t0 = g.theta0();
  const complex wave = std::polar(1.0, s * x.c.xi);
  return -inv_two_sqrt_pi * std::sqrt(m.p2(s)) *
         (quotient(Kind::cosh, s * x.c.theta, Kind::cosh, s * t0) * wave - quotient(Kind::cosh, 0.0, Kind::cosh, s * t0));
}

EigenrelationReport eigenrelation_check(const Transform& T, GenEigenfunction e, const BoundaryDensity& phi) {
  require_j(e.j);
  require_grid(phi.grid, T.grid(), "eigenrelation_check");
  const auto& g = T.geometry();
  if (e.j == 2) {
    double mass = 0.0;
    for (int n = 0; n < T.grid().size(); ++n)
      mass += (std::abs(phi.plus[n]) + std::abs(phi.minus[n])) / T.scale()[n];
    if (std::abs(T.integral(phi)) > 1e-9 * mass * T.grid().dxi())
      throw DomainError("eigenrelation_check: j = 2 needs a mean-zero density");
  }
  const auto kphi = np_apply_boundary(T, phi);
  // <u, psi>_{H*} = -int u conj(S[psi]) dsigma on the xi-grid.
  auto pair = [&](const BoundaryDensity& u) {
    complex acc = 0.0;
    for (Arc arc : {Arc::plus, Arc::minus})
      for (int n = 0; n < T.grid().size(); ++n)
        acc += u.on(arc)[n] * std::conj(eigenfunction_trace(g, e, T.grid().xi(n), arc)) / T.scale()[n];
    return -acc * T.grid().dxi();
  };
  EigenrelationReport r;
  r.lhs = pair(kphi);
  r.pairing = pair(phi);
  r.eigenvalue = (e.j == 1 ? 1.0 : -1.0) * T.multipliers().eta(e.s);
  r.residual = std::abs(r.lhs - r.eigenvalue * r.pairing);
  r.rayleigh = r.lhs / r.pairing;
  return r;
}

// ------------------------------------------------------------ induced field

SpectralPair resolvent_pair(const Transform& T, const DipoleSource& src, complex lambda) {
  const auto& m = T.multipliers();
  if (lambda.imag() == 0.0 && std::abs(lambda.real()) <= m.bound()) {
    throw DomainError("resolvent: lambda lies on the spectrum [-b, b] with zero dissipation");
  }
  auto f = T.forward(dipole_normal_derivative(T, src));
  for (int k = 0; k < T.grid().size(); ++k) {
    const double eta = m.eta(T.grid().s(k));
    f.f1[k] /= lambda - eta;
    f.f2[k] /= lambda + eta;
  }
  return f;
}

InducedField::InducedField(const Transform& T, const DipoleSource& src, complex lambda)
    : src_(src), scattered_(T, resolvent_pair(T, src, lambda)) {}

complex InducedField::value(PlanePoint z) const { return dipole_potential(src_, z) + scattered_(z); }

std::array<complex, 2> InducedField::gradient(PlanePoint z) const {
  auto d = scattered_.gradient(z);
  const PlanePoint q = dipole_gradient(src_, z);
  d[0] += q.x1;
  d[1] += q.x2;
  return d;
}

complex induced_field(const Transform& T, const ResonanceQuery& query, double delta, PlanePoint z) {
  if (!(delta >= 0.0)) throw DomainError("induced_field: delta must be nonnegative");
  return InducedField(T, query.source, query.lambda(delta)).value(z);
}

}  // namespace npdisks
