#pragma once

// Checks shared by `npdisks validate` and the acceptance runner.  Each one
// returns a single pass/fail record with the measured statistic and the
// threshold it was held to.

#include <string>
#include <vector>

#include "npdisks/geometry.hpp"
#include "npdisks/nystrom.hpp"
#include "npdisks/resonance.hpp"
#include "npdisks/spectral.hpp"

namespace npdisks {

struct CheckResult {
  std::string id;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

/// "<id> PASS|FAIL <name>: value=... threshold=... (detail)"
std::string format_line(const CheckResult& r);

/// Oracle spectra of one geometry at several mesh sizes.
struct SpectrumSweep {
  double theta0 = 0.0;
  double bound = 0.0;
  std::vector<int> meshes;
  std::vector<std::vector<double>> eigenvalues;
};
SpectrumSweep spectrum_sweep(const Geometry& g, const std::vector<int>& meshes, double grading = 3.0);

/// Extreme Ritz values within `tol` (relative) of +-b on the finest mesh,
/// and none beyond +-b by more than the change over the last doubling.
CheckResult check_spectral_bound(const std::vector<SpectrumSweep>& sweeps, double tol = 0.02);

/// M times the largest eigenvalue gap inside (-b + margin, b - margin) must not grow.
CheckResult check_gap_scaling(const SpectrumSweep& sweep, double margin = 0.02);

/// Smooth test densities: the pullback phi / h on each arc is a Gaussian
/// packet exp(-(xi - c)^2 / (2 w^2)) cos(k xi + p), shifted to zero mean.
struct Packet {
  double center, width, wavenumber, phase;
  double weight_plus, weight_minus;
};
std::vector<Packet> random_packets(int count, unsigned seed);
BoundaryDensity packet_density(const Transform& T, const Packet& p);
Eigen::VectorXcd packet_density(const NystromSystem& sys, const Packet& p);

/// Multiplier S and K* against the oracle on nodes with |xi| < xi_max.
CheckResult check_pipeline(const Transform& T, const NystromSystem& sys, const std::vector<Packet>& packets,
                           double tol = 1e-3, double xi_max = 6.0);

/// H* pairings on the oracle against W* pairings of the transforms.
CheckResult check_unitarity(const Transform& T, const NystromSystem& sys, const std::vector<Packet>& packets,
                            double tol = 1e-4);

CheckResult check_calderon(const NystromSystem& sys, double tol = 1e-6);

/// Interior law at lambda0 = b/2.
CheckResult check_interior_rate(const Geometry& g, const DipoleSource& src, const std::vector<double>& deltas,
                                double slope_tol = 0.05, double limit_tol = 0.02);

/// Endpoint law at lambda0 = b for two dipoles; C / g1(b) must agree.
CheckResult check_endpoint_rate(const Geometry& g, const DipoleSource& a, const DipoleSource& b,
                                const std::vector<double>& deltas, double slope_tol = 0.05, double ratio_tol = 0.05);

/// Log-corrected law at lambda0 = 0 for each dipole.
CheckResult check_zero_rate(const Geometry& g, const std::vector<DipoleSource>& sources,
                            const std::vector<double>& deltas, double slope_tol = 0.05);

/// delta ||phi_delta|| decreasing and below `fraction` of its first value.
struct RateRun {
  DipoleSource source;
  double lambda0;
};
CheckResult check_never_order(const Geometry& g, const std::vector<RateRun>& runs, const std::vector<double>& deltas,
                              double fraction = 0.1);

CheckResult check_eigenrelation(const Transform& T, const BoundaryDensity& phi, const std::vector<double>& freqs,
                                double tol = 1e-6);

/// Total mass of mu_f against ||f||^2_{W*} and continuity of E_t on a t-grid.
CheckResult check_resolution(const Transform& T, const SpectralPair& f, int points = 200, double tol = 1e-6);

/// phi(psi(z)) = z over a fixed cloud of exterior and interior points.
CheckResult check_geometry_round_trip(const Geometry& g, double tol = 1e-12);

/// C^{-1} C on the pullback (everywhere) and on the density for |xi| <= 10.
CheckResult check_transform_round_trip(const Transform& T, const BoundaryDensity& phi, double tol = 1e-10);

/// Oracle jump relation for one density.
CheckResult check_jump(const NystromSystem& sys, const Eigen::VectorXcd& phi, double tol = 1e-3);

}  // namespace npdisks
