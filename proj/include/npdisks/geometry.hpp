#pragma once

// Bipolar coordinates for the union of two equal disks that intersect at
// the points (+-alpha, 0).  The map zeta = Log((z + alpha) / (z - alpha))
// sends the exterior of the domain onto the strip |theta| < theta0, the
// lower boundary arc onto theta = +theta0 and the upper arc onto
// theta = -theta0.

#include <complex>
#include <map>
#include <string>

namespace npdisks {

using complex = std::complex<double>;

/// Boundary arc.  `plus` is the lower arc (image of theta = +theta0),
/// `minus` the upper arc (image of theta = -theta0).
enum class Arc { plus, minus };

inline double arc_sign(Arc arc) { return arc == Arc::plus ? 1.0 : -1.0; }

struct PlanePoint {
  double x1 = 0.0;
  double x2 = 0.0;

  complex as_complex() const { return {x1, x2}; }
  static PlanePoint from_complex(complex z) { return {z.real(), z.imag()}; }
};

inline PlanePoint operator+(PlanePoint a, PlanePoint b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline PlanePoint operator-(PlanePoint a, PlanePoint b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline PlanePoint operator*(double s, PlanePoint a) { return {s * a.x1, s * a.x2}; }
inline double dot(PlanePoint a, PlanePoint b) { return a.x1 * b.x1 + a.x2 * b.x2; }
double norm(PlanePoint a);

struct BipolarCoord {
  double xi = 0.0;
  double theta = 0.0;  // normalized to (-pi, pi]

  BipolarCoord() = default;
  BipolarCoord(double xi_, double theta_);
  complex as_complex() const { return {xi, theta}; }
};

/// Two disks of radius `a` centred at (0, +-a cos(theta0)).  Immutable.
class Geometry {
 public:
  static Geometry make(double radius, double theta0);
  /// Reads the keys `radius` (default 1) and `theta0` (required).
  static Geometry from_config(const std::map<std::string, std::string>& kv);
  std::map<std::string, std::string> to_config() const;

  double radius() const { return radius_; }
  double theta0() const { return theta0_; }
  double alpha() const { return alpha_; }
  /// Center of the circle that carries `arc`.
  PlanePoint center(Arc arc) const;
  /// Length of one arc: 2a(pi - theta0).
  double arc_length() const;
  double perimeter() const { return 2.0 * arc_length(); }

 private:
  Geometry(double radius, double theta0);

  double radius_;
  double theta0_;
  double alpha_;
};

/// Inverse bipolar map z = alpha (e^zeta + 1) / (e^zeta - 1).
PlanePoint phi(const Geometry& g, BipolarCoord zeta);

/// Forward bipolar map (Psi1, Psi2) with Psi2 in (-pi, pi).
/// Throws BranchCutError on the open segment (-alpha, alpha) of the x1-axis
/// and CornerError at (+-alpha, 0).
BipolarCoord psi(const Geometry& g, PlanePoint z);

/// Complex derivative of Log((z + alpha)/(z - alpha)): -2 alpha / (z^2 - alpha^2).
complex psi_derivative(const Geometry& g, PlanePoint z);

/// Gradients of Psi1 and Psi2 at z (Cauchy-Riemann from psi_derivative).
PlanePoint grad_psi1(const Geometry& g, PlanePoint z);
PlanePoint grad_psi2(const Geometry& g, PlanePoint z);

/// h = (cosh xi - cos theta) / alpha = 1 / |Phi'|.
double scale_factor(const Geometry& g, double xi, double theta);

/// Phi(xi, +theta0) on the lower arc or Phi(xi, -theta0) on the upper arc.
PlanePoint boundary_point(const Geometry& g, double xi, Arc arc);

/// Outward unit normal at a point of the given arc.
PlanePoint outward_normal(const Geometry& g, PlanePoint x, Arc arc);

/// d(sigma)/d(xi) = 1 / h(xi, theta0) on either arc.
double arc_element(const Geometry& g, double xi);

/// True when z lies strictly outside the closed union of the two disks.
bool is_exterior(const Geometry& g, PlanePoint z);

}  // namespace npdisks
