#include "npdisks/geometry.hpp"

#include <cmath>
#include <numbers>

#include "npdisks/config.hpp"
#include "npdisks/errors.hpp"

namespace npdisks {

namespace {

constexpr double pi = std::numbers::pi;

double normalize_angle(double theta) {
  double t = std::remainder(theta, 2.0 * pi);  // [-pi, pi]
  if (t <= -pi) t += 2.0 * pi;
  return t;
}

}  // namespace

double norm(PlanePoint a) { return std::hypot(a.x1, a.x2); }

BipolarCoord::BipolarCoord(double xi_, double theta_) : xi(xi_), theta(normalize_angle(theta_)) {}

Geometry::Geometry(double radius, double theta0)
    : radius_(radius), theta0_(theta0), alpha_(radius * std::sin(theta0)) {}

Geometry Geometry::make(double radius, double theta0) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("radius must be positive and finite");
  }
  if (!(theta0 > 0.0 && theta0 < pi / 2.0)) {
    throw DomainError("theta0 must lie in the open interval (0, pi/2)");
  }
  return Geometry(radius, theta0);
}

Geometry Geometry::from_config(const std::map<std::string, std::string>& kv) {
  const double radius = config::get_double(kv, "radius", 1.0);
  if (kv.find("theta0") == kv.end()) throw ConfigError("missing key 'theta0'");
  return make(radius, config::get_double(kv, "theta0", 0.0));
}

std::map<std::string, std::string> Geometry::to_config() const {
  return {{"radius", config::format_double(radius_)}, {"theta0", config::format_double(theta0_)}};
}

PlanePoint Geometry::center(Arc arc) const {
  const double c = radius_ * std::cos(theta0_);
  return arc == Arc::plus ? PlanePoint{0.0, -c} : PlanePoint{0.0, c};
}

double Geometry::arc_length() const { return 2.0 * radius_ * (pi - theta0_); }

PlanePoint phi(const Geometry& g, BipolarCoord zeta) {
  if (zeta.xi == 0.0 && zeta.theta == 0.0) {
    throw SingularityError("phi: (0, 0) is the image of the point at infinity");
  }
  // (e^z + 1)/(e^z - 1) evaluated with the decaying exponential.
  const complex zz = zeta.as_complex();
  complex z;
  if (zeta.xi > 0.0) {
    const complex w = std::exp(-zz);
    z = g.alpha() * (1.0 + w) / (1.0 - w);
  } else {
    const complex w = std::exp(zz);
    z = g.alpha() * (w + 1.0) / (w - 1.0);
  }
  return PlanePoint::from_complex(z);
}

BipolarCoord psi(const Geometry& g, PlanePoint z) {
  const double alpha = g.alpha();
  if (z.x2 == 0.0 && std::abs(std::abs(z.x1) - alpha) <= 1e-15 * alpha) {
    throw CornerError("psi: the corners (+-alpha, 0) have no bipolar image");
  }
  if (z.x2 == 0.0 && std::abs(z.x1) < alpha) {
    throw BranchCutError("psi: point on the segment (-alpha, alpha) of the x1-axis");
  }
  const complex zc = z.as_complex();
  const complex p = zc + alpha;
  const complex m = zc - alpha;
  const double xi = std::log(std::abs(p)) - std::log(std::abs(m));
  const double theta = std::arg(p * std::conj(m));
  return {xi, theta};
}

complex psi_derivative(const Geometry& g, PlanePoint z) {
  const complex zc = z.as_complex();
  const double alpha = g.alpha();
  return -2.0 * alpha / (zc * zc - alpha * alpha);
}

PlanePoint grad_psi1(const Geometry& g, PlanePoint z) {
  const complex d = psi_derivative(g, z);
  return {d.real(), -d.imag()};
}

PlanePoint grad_psi2(const Geometry& g, PlanePoint z) {
  const complex d = psi_derivative(g, z);
  return {d.imag(), d.real()};
}

double scale_factor(const Geometry& g, double xi, double theta) {
  if (xi == 0.0 && normalize_angle(theta) == 0.0) {
    throw SingularityError("scale_factor: h vanishes at (0, 0)");
  }
  // cosh(xi) - cos(theta) = 2 sinh^2(xi/2) + 2 sin^2(theta/2), no cancellation.
  const double sx = std::sinh(0.5 * xi);
  const double st = std::sin(0.5 * theta);
  return 2.0 * (sx * sx + st * st) / g.alpha();
}

PlanePoint boundary_point(const Geometry& g, double xi, Arc arc) {
  if (std::isinf(xi)) return {xi > 0 ? g.alpha() : -g.alpha(), 0.0};
  return phi(g, {xi, arc_sign(arc) * g.theta0()});
}

PlanePoint outward_normal(const Geometry& g, PlanePoint x, Arc arc) {
  const PlanePoint r = x - g.center(arc);
  const double len = norm(r);
  if (std::abs(len - g.radius()) > 1e-9 * g.radius()) {
    throw OffBoundaryError("outward_normal: point is not on the requested arc");
  }
  return (1.0 / len) * r;
}

double arc_element(const Geometry& g, double xi) {
  return 1.0 / scale_factor(g, xi, g.theta0());
}

bool is_exterior(const Geometry& g, PlanePoint z) {
  return norm(z - g.center(Arc::plus)) > g.radius() && norm(z - g.center(Arc::minus)) > g.radius();
}

}  // namespace npdisks
