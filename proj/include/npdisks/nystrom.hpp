#pragma once

// Nystrom discretization of the single layer potential S and the
// Neumann-Poincare operator K* on a corner-graded composite Gauss mesh.
// Serves as an independent oracle for the multiplier calculus.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "npdisks/geometry.hpp"

namespace npdisks {

/// Position on an arc stored as corner + offset, so that differences of
/// nearby points close to a corner keep full relative precision.
struct ArcPoint {
  complex corner;    // +-alpha
  complex rel;       // x - corner
  PlanePoint normal;  // outward unit normal
  double speed = 0;  // d(sigma)/d(tau)
  double xi = 0;     // bipolar coordinate Psi1

  complex z() const { return corner + rel; }
  PlanePoint point() const { return PlanePoint::from_complex(z()); }
};

inline complex difference(const ArcPoint& x, const ArcPoint& y) {
  return (x.corner - y.corner) + (x.rel - y.rel);
}

struct Panel {
  Arc arc;
  double t0, t1;  // parameter range in [0, 1]
  int first;      // index of the first node
};

class NystromMesh {
 public:
  /// M panels per arc in a parameter tau in [0, 1] graded as
  /// tau^beta / (tau^beta + (1 - tau)^beta) towards both corners,
  /// with `order` Gauss-Legendre nodes per panel.
  static NystromMesh build(const Geometry& g, int panels_per_arc, double grading = 3.0, int order = 4);

  const Geometry& geometry() const { return geometry_; }
  int panels_per_arc() const { return panels_per_arc_; }
  double grading() const { return grading_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(points_.size()); }

  const std::vector<Panel>& panels() const { return panels_; }
  const ArcPoint& node(int i) const { return points_[i]; }
  Arc arc_of(int i) const { return arcs_[i]; }
  double tau(int i) const { return taus_[i]; }
  /// Arc length quadrature weights.
  const Eigen::VectorXd& weights() const { return weights_; }
  /// Gauss-Legendre rule on [-1, 1] used inside panels.
  const std::vector<double>& rule_nodes() const { return rule_x_; }
  const std::vector<double>& rule_weights() const { return rule_w_; }

  /// Geometry at an arbitrary parameter value.
  ArcPoint at(Arc arc, double tau) const;
  /// Samples f(x, arc) at the nodes.
  Eigen::VectorXcd sample(const std::function<complex(PlanePoint, Arc)>& f) const;

 private:
  NystromMesh(const Geometry& g) : geometry_(g) {}

  Geometry geometry_;
  int panels_per_arc_ = 0;
  double grading_ = 0;
  int order_ = 0;
  std::vector<Panel> panels_;
  std::vector<ArcPoint> points_;
  std::vector<Arc> arcs_;
  std::vector<double> taus_;
  Eigen::VectorXd weights_;
  std::vector<double> rule_x_, rule_w_;
};

class NystromSystem {
 public:
  /// Refuses theta0 below `theta_floor`: as the disks approach tangency K*
  /// stops being bounded on the energy space.
  static NystromSystem assemble(const NystromMesh& mesh, double theta_floor = 0.05);

  const NystromMesh& mesh() const { return mesh_; }
  /// (S phi)_i = sum_j S_ij phi_j approximates S[phi](x_i).
  const Eigen::MatrixXd& S() const { return S_; }
  /// (K phi)_i approximates K*[phi](x_i).
  const Eigen::MatrixXd& Kstar() const { return K_; }
  /// Symmetric Gram matrix of the H* inner product: -(W S + (W S)^T) / 2.
  const Eigen::MatrixXd& gram() const { return gram_; }

  Eigen::VectorXcd apply_S(const Eigen::VectorXcd& phi) const;
  Eigen::VectorXcd apply_Kstar(const Eigen::VectorXcd& phi) const;
  /// <phi, psi>_{H*} = -int phi conj(S psi) d sigma.
  complex hstar_inner(const Eigen::VectorXcd& phi, const Eigen::VectorXcd& psi) const;
  /// Contour integral of the node density.
  complex integral(const Eigen::VectorXcd& phi) const;
  Eigen::VectorXcd project_mean_zero(const Eigen::VectorXcd& phi) const;

  /// S[phi](z) at a point off the boundary, with adaptive near-field quadrature.
  complex single_layer_at(PlanePoint z, const Eigen::VectorXcd& phi) const;

 private:
  explicit NystromSystem(const NystromMesh& mesh) : mesh_(mesh) {}
  NystromMesh mesh_;
  Eigen::MatrixXd S_, K_, gram_;
};

/// Sorted Ritz values of K* on mean-zero densities in the -S inner product.
/// Gram directions with eigenvalue below gram_cutoff times the largest are
/// discarded (the Gram matrix is numerically singular on a graded mesh).
/// Nodes on the corner_trim panels next to each corner are left out of the
/// trial space; their matrix entries are the least accurate.
std::vector<double> oracle_spectrum(const NystromSystem& sys, int corner_trim = 1, double gram_cutoff = 1e-12);

/// ||S K* - K S||_F / ||S||_F with K = W^{-1} (K*)^T W the L2(d sigma) adjoint.
double calderon_residual(const NystromSystem& sys);

struct JumpReport {
  double exterior = 0;  // max |d_nu S phi|_+ - (1/2 + K*) phi| / max |phi|
  double interior = 0;  // same for the inner trace and (-1/2 + K*)
  int nodes = 0;        // number of nodes checked
};
/// Compares the Nystrom (+-1/2 + K*) phi with one-sided finite differences of
/// S[phi] at distances eps, 2 eps, 3 eps along the normal, at nodes with |xi| < xi_max.
JumpReport jump_check(const NystromSystem& sys, const Eigen::VectorXcd& phi, double eps, double xi_max = 3.0);

/// Largest and mean gap between consecutive eigenvalues inside (lo, hi).
struct GapStatistic {
  double max_gap = 0;
  double mean_gap = 0;
  int count = 0;
};
GapStatistic gap_statistic(const std::vector<double>& eigenvalues, double lo, double hi);

}  // namespace npdisks
