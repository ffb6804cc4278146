#pragma once

// Spectral calculus on the bipolar strip.  A boundary density is sampled on
// a uniform xi-grid on each arc; U = Lambda F C maps it to a pair (f1, f2)
// sampled on the reciprocal s-grid, where the single layer potential and the
// Neumann-Poincare operator act as multipliers.

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "npdisks/geometry.hpp"
#include "npdisks/multipliers.hpp"

namespace npdisks {

/// xi_n = -L + n dxi (n = 0..N-1, dxi = 2L/N) and the half-shifted
/// frequencies s_k = (k - N/2 + 1/2) ds with ds = pi/L.  The s-grid is
/// symmetric about 0 and never contains s = 0.
class SpectralGrid {
 public:
  static SpectralGrid make(double half_width, int size);

  double half_width() const { return L_; }
  int size() const { return N_; }
  double dxi() const { return 2.0 * L_ / N_; }
  double ds() const;
  double xi(int n) const { return -L_ + n * dxi(); }
  double s(int k) const { return (k - N_ / 2 + 0.5) * ds(); }
  /// Index of the grid point -s_k.
  int mirror(int k) const { return N_ - 1 - k; }

  bool operator==(const SpectralGrid& o) const { return L_ == o.L_ && N_ == o.N_; }
  bool operator!=(const SpectralGrid& o) const { return !(*this == o); }

 private:
  SpectralGrid(double L, int N) : L_(L), N_(N) {}
  double L_;
  int N_;
};

/// Samples of phi on the lower arc (plus) and the upper arc (minus).
struct BoundaryDensity {
  SpectralGrid grid;
  std::vector<complex> plus;
  std::vector<complex> minus;

  static BoundaryDensity zeros(const SpectralGrid& grid);
  const std::vector<complex>& on(Arc arc) const { return arc == Arc::plus ? plus : minus; }
  std::vector<complex>& on(Arc arc) { return arc == Arc::plus ? plus : minus; }
};

/// Samples of (f1, f2) on the s-grid.
struct SpectralPair {
  SpectralGrid grid;
  std::vector<complex> f1;
  std::vector<complex> f2;

  static SpectralPair zeros(const SpectralGrid& grid);
  const std::vector<complex>& component(int j) const { return j == 1 ? f1 : f2; }
  std::vector<complex>& component(int j) { return j == 1 ? f1 : f2; }
};

/// Symmetric discrete Fourier pair
///   F(s_k) = dxi / sqrt(2 pi) sum_n g(xi_n) e^{-i s_k xi_n},
///   g(xi_n) = ds / sqrt(2 pi) sum_k F(s_k) e^{i s_k xi_n},
/// exact inverses of each other on the grid.  Backed by FFTW.
class Fourier {
 public:
  explicit Fourier(const SpectralGrid& grid);

  const SpectralGrid& grid() const { return grid_; }
  std::vector<complex> forward(const std::vector<complex>& g) const;
  std::vector<complex> inverse(const std::vector<complex>& F) const;
  /// Forward sum evaluated at an arbitrary frequency.
  complex forward_at(const std::vector<complex>& g, double s) const;
  /// Inverse sum evaluated at an arbitrary xi.
  complex inverse_at(const std::vector<complex>& F, double xi) const;

 private:
  struct Plans;
  SpectralGrid grid_;
  std::shared_ptr<const Plans> plans_;
};

/// The pipeline U = Lambda F C on a fixed geometry and grid.
class Transform {
 public:
  Transform(const Geometry& g, const SpectralGrid& grid);

  const Geometry& geometry() const { return geometry_; }
  const SpectralGrid& grid() const { return fourier_.grid(); }
  const Fourier& fourier() const { return fourier_; }
  const Multipliers& multipliers() const { return multipliers_; }
  /// h(xi_n, theta0) on the grid.
  const std::vector<double>& scale() const { return scale_; }

  /// Samples f(x, arc) at the boundary points of the grid.
  BoundaryDensity sample(const std::function<complex(PlanePoint, Arc)>& f) const;
  /// Contour integral of phi over both arcs.
  complex integral(const BoundaryDensity& phi) const;
  /// Subtracts the mean so that the contour integral vanishes.
  BoundaryDensity project_mean_zero(const BoundaryDensity& phi) const;
  /// Largest |phi / h| at the two ends of the xi-grid.
  double truncation_tail(const BoundaryDensity& phi) const;

  SpectralPair forward(const BoundaryDensity& phi) const;
  /// Exact inverse of forward on the grid.
  BoundaryDensity inverse(const SpectralPair& f) const;

 private:
  Geometry geometry_;
  Fourier fourier_;
  Multipliers multipliers_;
  std::vector<double> scale_;
};

/// Evaluates (f1(s), f2(s)) of a pair at arbitrary s by trigonometric
/// interpolation through the xi-domain samples.
class SpectralInterpolant {
 public:
  SpectralInterpolant(const Fourier& fourier, const SpectralPair& f);
  complex operator()(int j, double s) const;

 private:
  const Fourier* fourier_;
  std::vector<complex> g1_, g2_;
};

/// (1/2) sum_k [p1 f1 conj(g1) + p2 f2 conj(g2)] ds.
complex wstar_inner(const Multipliers& m, const SpectralPair& f, const SpectralPair& g);
double wstar_norm_sq(const Multipliers& m, const SpectralPair& f);

/// (eta f1, -eta f2).
SpectralPair apply_K_multiplier(const Multipliers& m, const SpectralPair& f);
/// (-p1 f1, -p2 f2).
SpectralPair apply_S_multiplier(const Multipliers& m, const SpectralPair& f);

/// E_t f for |t| <= b.
SpectralPair resolution_projector(const Multipliers& m, double t, const SpectralPair& f);

/// d mu_f / dt at t in [-b, b] \ {0}.
double spectral_density(const Multipliers& m, const SpectralInterpolant& f, double t);

/// Integral of weight(t) d mu_f(t) over [-b, b], computed in t with the
/// substitution t = +-(b - u^2) that absorbs the edge singularities.
double integrate_measure(const Multipliers& m, const SpectralInterpolant& f,
                         const std::function<double(double)>& weight, double rel_tol = 1e-11);

/// Compares increments of <f, E_t f> over a uniform t-grid on [-b, b] with
/// the integral of the spectral density over each step.  A point mass would
/// show up as an excess well above `tolerance`, the largest single-cell mass.
struct ContinuityReport {
  double max_excess = 0.0;
  double tolerance = 0.0;
  int points = 0;
};
ContinuityReport resolution_continuity(const Multipliers& m, const Fourier& fourier, const SpectralPair& f,
                                       int points);

/// CSV with columns xi,plus_re,plus_im,minus_re,minus_im (and s,f1_re,... for pairs).
void write_csv(std::ostream& out, const BoundaryDensity& phi);
void write_csv(std::ostream& out, const SpectralPair& f);
BoundaryDensity read_density_csv(std::istream& in);
SpectralPair read_pair_csv(std::istream& in);

}  // namespace npdisks
