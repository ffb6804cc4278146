#pragma once

// Dipole sources f = a . grad delta_z placed outside the domain, and the
// parameters of a resonance run.

#include <complex>
#include <optional>
#include <vector>

#include "npdisks/geometry.hpp"
#include "npdisks/spectral.hpp"

namespace npdisks {

/// Dipole at z (strictly exterior) with unit polarization a.
struct DipoleSource {
  PlanePoint z;
  PlanePoint a;

  /// Normalizes a; throws DomainError for a = 0 or z not in the exterior.
  static DipoleSource make(const Geometry& g, PlanePoint z, PlanePoint a);
};

/// Non-degeneracy of a dipole: Psi2(z) != 0, a . grad Psi1(z) != 0 and
/// a . grad Psi2(z) != 0.  Without these some g_j may vanish.
struct SourceCheck {
  double psi2 = 0.0;
  double a_grad_psi1 = 0.0;
  double a_grad_psi2 = 0.0;
  bool ok = false;
};
SourceCheck check_source(const Geometry& g, const DipoleSource& src, double tol = 1e-10);

/// Dipole placed at bipolar coordinates (xi, ratio * theta0), polarized along
/// (grad Psi1 / |grad Psi1| + grad Psi2 / |grad Psi2|) / sqrt 2.  Both
/// projections are then nonzero.
DipoleSource dipole_at_ratio(const Geometry& g, double xi, double ratio);

/// q(x) = a . (x - z) / (2 pi |x - z|^2).
double dipole_potential(const DipoleSource& src, PlanePoint x);
PlanePoint dipole_gradient(const DipoleSource& src, PlanePoint x);

/// Normal derivative of q on both arcs of the transform grid.
BoundaryDensity dipole_normal_derivative(const Transform& T, const DipoleSource& src);

/// lambda = (eps_c + 1 + i delta) / (2 (eps_c - 1) + 2 i delta).
std::complex<double> lambda_from_permittivity(double eps_c, double delta);

/// A resonance run.  With eps_c unset lambda = lambda0 + i delta; with eps_c
/// set lambda follows from the permittivity and lambda0 is its delta = 0 limit.
struct ResonanceQuery {
  DipoleSource source;
  double lambda0 = 0.0;
  std::vector<double> deltas;
  std::optional<double> eps_c;

  std::complex<double> lambda(double delta) const;
  /// Deltas positive and strictly decreasing.
  void validate() const;
};

}  // namespace npdisks
