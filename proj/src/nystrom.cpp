#include "npdisks/nystrom.hpp"


#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "npdisks/errors.hpp"
#include "symmetric_eigen.hpp"

namespace npdisks {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inv_2pi = 0.5 / pi;
// A panel counts as near when the target is closer than this many panel
// lengths to its midpoint.
constexpr double near_factor = 3.0;

template <int N>
void gauss_rule(std::vector<double>& x, std::vector<double>& w) {
  // Boost stores the nonnegative abscissae only.
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& a = rule::abscissa();
  const auto& b = rule::weights();
  std::vector<std::pair<double, double>> nodes;
  for (size_t i = 0; i < a.size(); ++i) {
    nodes.emplace_back(a[i], b[i]);
    if (a[i] != 0.0) nodes.emplace_back(-a[i], b[i]);
  }
  std::sort(nodes.begin(), nodes.end());
  x.clear();
  w.clear();
  for (const auto& [xi, wi] : nodes) {
    x.push_back(xi);
    w.push_back(wi);
  }
}

void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  switch (n) {
    case 4: gauss_rule<4>(x, w); break;
    case 6: gauss_rule<6>(x, w); break;
    case 8: gauss_rule<8>(x, w); break;
    case 10: gauss_rule<10>(x, w); break;
    case 16: gauss_rule<16>(x, w); break;
    default: throw DomainError("Gauss order must be one of 4, 6, 8, 10, 16");
  }
}

const std::vector<double>& leaf_nodes() {
  static const auto r = [] {
    std::vector<double> x, w;
    legendre_rule(16, x, w);
    return std::make_pair(x, w);
  }();
  return r.first;
}

const std::vector<double>& leaf_weights() {
  static const auto r = [] {
    std::vector<double> x, w;
    legendre_rule(16, x, w);
    return w;
  }();
  return r;
}

// Lagrange basis on the rule nodes, evaluated at v in [-1, 1].
void lagrange(const std::vector<double>& nodes, double v, double* out) {
  const int p = static_cast<int>(nodes.size());
  for (int q = 0; q < p; ++q) {
    double l = 1.0;
    for (int r = 0; r < p; ++r) {
      if (r != q) l *= (v - nodes[r]) / (nodes[q] - nodes[r]);
    }
    out[q] = l;
  }
}

struct ArcFrame {
  complex center;
  double omega_start;
  complex start_corner, end_corner;
};

}  // namespace

// ------------------------------------------------------------------- mesh

namespace {

ArcFrame frame(const Geometry& g, Arc arc) {
  const double t0 = g.theta0();
  const complex c = g.center(arc).as_complex();
  if (arc == Arc::plus) return {c, pi / 2 + t0, complex(-g.alpha(), 0.0), complex(g.alpha(), 0.0)};
  return {c, -pi / 2 + t0, complex(g.alpha(), 0.0), complex(-g.alpha(), 0.0)};
}

}  // namespace

ArcPoint NystromMesh::at(Arc arc, double tau) const {
  const auto& g = geometry_;
  const double a = g.radius();
  const double span = 2.0 * (pi - g.theta0());
  const double b = grading_;
  const double tb = std::pow(tau, b), ub = std::pow(1.0 - tau, b);
  const double sigma = tb / (tb + ub);
  const double sigma_c = ub / (tb + ub);
  const double dsigma = b * std::pow(tau, b - 1) * std::pow(1.0 - tau, b - 1) / ((tb + ub) * (tb + ub));
  const ArcFrame f = frame(g, arc);

  ArcPoint p;
  double d;
  complex base;
  if (sigma <= 0.5) {
    p.corner = f.start_corner;
    d = sigma * span;
    base = p.corner - f.center;
  } else {
    p.corner = f.end_corner;
    d = -sigma_c * span;
    base = p.corner - f.center;
  }
  const double sh = std::sin(0.5 * d);
  p.rel = base * complex(-2.0 * sh * sh, std::sin(d));
  const double omega = f.omega_start + sigma * span;
  p.normal = {std::cos(omega), std::sin(omega)};
  p.speed = a * span * dsigma;
  const double ratio = std::log(std::sin(0.5 * sigma * span) / std::sin(0.5 * sigma_c * span));
  p.xi = arc == Arc::plus ? ratio : -ratio;
  return p;
}

NystromMesh NystromMesh::build(const Geometry& g, int panels_per_arc, double grading, int order) {
  if (panels_per_arc < 16) throw DomainError("build_mesh: at least 16 panels per arc are required");
  if (!(grading >= 1.0)) throw DomainError("build_mesh: grading exponent must be at least 1");
  NystromMesh mesh(g);
  mesh.panels_per_arc_ = panels_per_arc;
  mesh.grading_ = grading;
  mesh.order_ = order;
  legendre_rule(order, mesh.rule_x_, mesh.rule_w_);
  const int n = 2 * panels_per_arc * order;
  mesh.points_.reserve(n);
  mesh.weights_.resize(n);
  for (Arc arc : {Arc::plus, Arc::minus}) {
    for (int k = 0; k < panels_per_arc; ++k) {
      const double t0 = static_cast<double>(k) / panels_per_arc;
      const double t1 = static_cast<double>(k + 1) / panels_per_arc;
      const int first = mesh.size();
      mesh.panels_.push_back({arc, t0, t1, first});
      const double half = 0.5 * (t1 - t0);
      for (int q = 0; q < order; ++q) {
        const double tau = t0 + half * (1.0 + mesh.rule_x_[q]);
        const ArcPoint pt = mesh.at(arc, tau);
        mesh.weights_[mesh.size()] = pt.speed * half * mesh.rule_w_[q];
        mesh.points_.push_back(pt);
        mesh.arcs_.push_back(arc);
        mesh.taus_.push_back(tau);
      }
    }
  }
  return mesh;
}

Eigen::VectorXcd NystromMesh::sample(const std::function<complex(PlanePoint, Arc)>& f) const {
  Eigen::VectorXcd v(size());
  for (int i = 0; i < size(); ++i) v[i] = f(points_[i].point(), arcs_[i]);
  return v;
}

// --------------------------------------------------------------- assembly

namespace {

// Adds to out[0..p) the weights w_q with sum_q w_q phi_q ~ int_P k(x - y) phi(y) d sigma(y),
// where phi is the degree p-1 interpolant of the panel values.
template <class Kernel>
void near_weights(const NystromMesh& mesh, const ArcPoint& x, const Panel& panel, Kernel kernel, double* out) {
  const auto& vx = leaf_nodes();
  const auto& vw = leaf_weights();
  const int p = mesh.order();
  std::vector<double> basis(p);
  struct Range {
    double a, b;
    int depth;
  };
  std::vector<Range> stack{{panel.t0, panel.t1, 0}};
  const double half_panel = 0.5 * (panel.t1 - panel.t0);
  const double mid_panel = 0.5 * (panel.t0 + panel.t1);
  while (!stack.empty()) {
    const Range r = stack.back();
    stack.pop_back();
    const ArcPoint ya = mesh.at(panel.arc, r.a);
    const ArcPoint yb = mesh.at(panel.arc, r.b);
    const ArcPoint ym = mesh.at(panel.arc, 0.5 * (r.a + r.b));
    const double len = std::abs(difference(yb, ya));
    const double dist = std::abs(difference(x, ym));
    if (dist < 1.0 * len && r.depth < 60) {
      const double m = 0.5 * (r.a + r.b);
      stack.push_back({r.a, m, r.depth + 1});
      stack.push_back({m, r.b, r.depth + 1});
      continue;
    }
    const double h = 0.5 * (r.b - r.a);
    for (size_t q = 0; q < vx.size(); ++q) {
      const double tau = 0.5 * (r.a + r.b) + h * vx[q];
      const ArcPoint y = mesh.at(panel.arc, tau);
      const double kv = kernel(x, y) * y.speed * h * vw[q];
      lagrange(mesh.rule_nodes(), (tau - mid_panel) / half_panel, basis.data());
      for (int j = 0; j < p; ++j) out[j] += kv * basis[j];
    }
  }
}

double log_kernel(const ArcPoint& x, const ArcPoint& y) { return inv_2pi * std::log(std::abs(difference(x, y))); }

struct DoubleLayerKernel {
  PlanePoint normal;
  double operator()(const ArcPoint& x, const ArcPoint& y) const {
    const complex d = difference(x, y);
    return inv_2pi * (d.real() * normal.x1 + d.imag() * normal.x2) / std::norm(d);
  }
};

// Product integration weights for the log kernel when the target is node
// `self` of the panel: log|x - y(tau)| = log|tau_i - tau| + R(tau).
void self_weights(const NystromMesh& mesh, const Panel& panel, int self, double* out) {
  const int p = mesh.order();
  const double h = 0.5 * (panel.t1 - panel.t0);
  const double ti = mesh.tau(panel.first + self);
  const double A = (panel.t0 - ti) / h, B = (panel.t1 - ti) / h;
  // Moments of log|u| u^m over [A h, B h] in the scaled variable v = u / h.
  Eigen::VectorXd mom(p);
  for (int m = 0; m < p; ++m) {
    const double k = m + 1.0;
    auto F = [&](double v) {
      if (v == 0.0) return 0.0;
      return std::pow(v, k) * (std::log(std::abs(v)) / k - 1.0 / (k * k));
    };
    const double log_part = (F(B) - F(A));
    const double scale_part = std::log(h) * (std::pow(B, k) - std::pow(A, k)) / k;
    mom[m] = h * (log_part + scale_part);  // integral in u of log|u| (u/h)^m
  }
  Eigen::MatrixXd V(p, p);
  for (int m = 0; m < p; ++m) {
    for (int q = 0; q < p; ++q) V(m, q) = std::pow((mesh.tau(panel.first + q) - ti) / h, m);
  }
  const Eigen::VectorXd w = V.fullPivLu().solve(mom);
  const ArcPoint& x = mesh.node(panel.first + self);
  for (int q = 0; q < p; ++q) {
    const ArcPoint& y = mesh.node(panel.first + q);
    double R;
    if (q == self) {
      R = std::log(y.speed);
    } else {
      R = std::log(std::abs(difference(x, y)) / std::abs(mesh.tau(panel.first + q) - ti));
    }
    out[q] = inv_2pi * (w[q] + h * mesh.rule_weights()[q] * R) * y.speed;
  }
}

double panel_length(const NystromMesh& mesh, const Panel& panel) {
  double len = 0.0;
  for (int q = 0; q < mesh.order(); ++q) len += mesh.weights()[panel.first + q];
  return len;
}

}  // namespace

NystromSystem NystromSystem::assemble(const NystromMesh& mesh, double theta_floor) {
  const auto& g = mesh.geometry();
  if (g.theta0() < theta_floor) {
    throw DomainError("nystrom: theta0 below the floor; near tangency the NP operator is not "
                      "well defined on the energy space (touching-disk limit)");
  }
  NystromSystem sys(mesh);
  const int n = mesh.size();
  const int p = mesh.order();
  const auto& w = mesh.weights();
  const double a = g.radius();
  const auto& panels = mesh.panels();
  const int np = static_cast<int>(panels.size());
  std::vector<double> plen(np);
  std::vector<ArcPoint> pmid(np);
  for (int k = 0; k < np; ++k) {
    plen[k] = panel_length(mesh, panels[k]);
    pmid[k] = mesh.at(panels[k].arc, 0.5 * (panels[k].t0 + panels[k].t1));
  }
  sys.S_.setZero(n, n);
  sys.K_.setZero(n, n);

#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    const ArcPoint& x = mesh.node(i);
    const Arc ax = mesh.arc_of(i);
    const int own = i / p;
    const DoubleLayerKernel dl{x.normal};
    std::vector<double> tmp(p);
    for (int k = 0; k < np; ++k) {
      const Panel& P = panels[k];
      const bool same_arc = P.arc == ax;
      if (k == own) {
        self_weights(mesh, P, i - P.first, tmp.data());
        for (int q = 0; q < p; ++q) sys.S_(i, P.first + q) = tmp[q];
      } else if (std::abs(difference(x, pmid[k])) < near_factor * plen[k]) {
        std::fill(tmp.begin(), tmp.end(), 0.0);
        near_weights(mesh, x, P, log_kernel, tmp.data());
        for (int q = 0; q < p; ++q) sys.S_(i, P.first + q) = tmp[q];
        if (!same_arc) {
          std::fill(tmp.begin(), tmp.end(), 0.0);
          near_weights(mesh, x, P, dl, tmp.data());
          for (int q = 0; q < p; ++q) sys.K_(i, P.first + q) = tmp[q];
        }
      } else {
        for (int q = 0; q < p; ++q) {
          const int j = P.first + q;
          sys.S_(i, j) = log_kernel(x, mesh.node(j)) * w[j];
          if (!same_arc) sys.K_(i, j) = dl(x, mesh.node(j)) * w[j];
        }
      }
      if (same_arc) {
        // On one circle (x - y).nu_x / |x - y|^2 = 1 / (2a), diagonal included.
        for (int q = 0; q < p; ++q) sys.K_(i, P.first + q) = w[P.first + q] / (4.0 * pi * a);
      }
    }
  }
  const Eigen::MatrixXd WS = w.asDiagonal() * sys.S_;
  sys.gram_ = -0.5 * (WS + WS.transpose());
  return sys;
}

Eigen::VectorXcd NystromSystem::apply_S(const Eigen::VectorXcd& phi) const { return S_.cast<complex>() * phi; }

Eigen::VectorXcd NystromSystem::apply_Kstar(const Eigen::VectorXcd& phi) const { return K_.cast<complex>() * phi; }

complex NystromSystem::hstar_inner(const Eigen::VectorXcd& phi, const Eigen::VectorXcd& psi) const {
  return (phi.transpose() * (gram_.cast<complex>() * psi.conjugate()))(0, 0);
}

complex NystromSystem::integral(const Eigen::VectorXcd& phi) const {
  return (mesh_.weights().cast<complex>().array() * phi.array()).sum();
}

Eigen::VectorXcd NystromSystem::project_mean_zero(const Eigen::VectorXcd& phi) const {
  const complex mean = integral(phi) / mesh_.weights().sum();
  return phi.array() - mean;
}

complex NystromSystem::single_layer_at(PlanePoint z, const Eigen::VectorXcd& phi) const {
  const auto& mesh = mesh_;
  const int p = mesh.order();
  ArcPoint x;
  x.corner = 0.0;
  x.rel = z.as_complex();
  complex acc = 0.0;
  std::vector<double> tmp(p);
  for (const Panel& P : mesh.panels()) {
    const ArcPoint mid = mesh.at(P.arc, 0.5 * (P.t0 + P.t1));
    if (std::abs(difference(x, mid)) < near_factor * panel_length(mesh, P)) {
      std::fill(tmp.begin(), tmp.end(), 0.0);
      near_weights(mesh, x, P, log_kernel, tmp.data());
      for (int q = 0; q < p; ++q) acc += tmp[q] * phi[P.first + q];
    } else {
      for (int q = 0; q < p; ++q) {
        const int j = P.first + q;
        acc += log_kernel(x, mesh.node(j)) * mesh.weights()[j] * phi[j];
      }
    }
  }
  return acc;
}

// ---------------------------------------------------------------- checks

namespace {

// Householder reflector Q with Q e1 parallel to w; returns Z^T M Z where
// Z spans the orthogonal complement of w (columns 2..n of Q).
Eigen::MatrixXd deflate(const Eigen::MatrixXd& M, const Eigen::VectorXd& w) {
  const int n = static_cast<int>(w.size());
  Eigen::VectorXd v = w / w.norm();
  v[0] += v[0] >= 0.0 ? 1.0 : -1.0;
  v /= v.norm();
  const Eigen::VectorXd Mv = M * v;
  const Eigen::RowVectorXd vM = v.transpose() * M;
  const double vMv = v.dot(Mv);
  Eigen::MatrixXd R = M - 2.0 * v * vM - 2.0 * Mv * v.transpose() + 4.0 * vMv * v * v.transpose();
  return R.bottomRightCorner(n - 1, n - 1);
}

}  // namespace

std::vector<double> oracle_spectrum(const NystromSystem& sys, int corner_trim, double gram_cutoff) {
  // Rayleigh-Ritz in the -S inner product.  Plain eigenvalues of the K* matrix
  // follow the L2 corner spectrum once grading resolves the corner, which
  // overshoots [-b, b]; Ritz values cannot leave the energy numerical range.
  // Work in u = W^{1/2} phi, where the mean-zero constraint is sqrt(w) . u = 0.
  const auto& mesh = sys.mesh();
  const int P = mesh.panels_per_arc(), q = mesh.order();
  std::vector<int> idx;
  for (int i = 0; i < mesh.size(); ++i) {
    const int panel = (i / q) % P;
    if (panel >= corner_trim && panel < P - corner_trim) idx.push_back(i);
  }
  if (idx.size() < 2) throw DomainError("oracle_spectrum: corner_trim leaves no trial space");
  Eigen::MatrixXd GK = sys.gram() * sys.Kstar();
  const Eigen::MatrixXd G = sys.gram()(idx, idx);
  Eigen::MatrixXd A = GK(idx, idx);
  A = 0.5 * (A + A.transpose()).eval();
  const Eigen::VectorXd r = mesh.weights()(idx).cwiseSqrt();
  const Eigen::VectorXd ri = r.cwiseInverse();
  const Eigen::MatrixXd Gb = deflate(ri.asDiagonal() * G * ri.asDiagonal(), r);
  const Eigen::MatrixXd Ab = deflate(ri.asDiagonal() * A * ri.asDiagonal(), r);

  // Canonical orthogonalization: drop Gram directions below the cutoff.
  Eigen::VectorXd lam;
  Eigen::MatrixXd vecs;
  detail::symmetric_eigen(Gb, lam, &vecs);
  const double top = lam.maxCoeff();
  if (!(top > 0.0)) throw DomainError("oracle_spectrum: the -S Gram matrix has no positive part");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    if (lam[k] > gram_cutoff * top) keep.push_back(k);
  Eigen::MatrixXd X(Gb.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c) X.col(c) = vecs.col(keep[c]) / std::sqrt(lam[keep[c]]);
  const Eigen::MatrixXd R = X.transpose() * Ab * X;
  Eigen::VectorXd vals;
  detail::symmetric_eigen(0.5 * (R + R.transpose()), vals, nullptr);
  std::vector<double> ev(vals.data(), vals.data() + vals.size());
  std::sort(ev.begin(), ev.end());
  return ev;
}

double calderon_residual(const NystromSystem& sys) {
  const auto& w = sys.mesh().weights();
  const Eigen::MatrixXd& S = sys.S();
  const Eigen::MatrixXd& Ks = sys.Kstar();
  const Eigen::MatrixXd K = w.cwiseInverse().asDiagonal() * Ks.transpose() * w.asDiagonal();
  const Eigen::MatrixXd R = S * Ks - K * S;
  return R.norm() / S.norm();
}

JumpReport jump_check(const NystromSystem& sys, const Eigen::VectorXcd& phi, double eps, double xi_max) {
  const auto& mesh = sys.mesh();
  const Eigen::VectorXcd kphi = sys.apply_Kstar(phi);
  const double scale = phi.cwiseAbs().maxCoeff();
  JumpReport rep;
  for (int i = 0; i < mesh.size(); ++i) {
    const ArcPoint& x = mesh.node(i);
    if (std::abs(x.xi) >= xi_max) continue;
    ++rep.nodes;
    const PlanePoint z = x.point();
    complex up[3], dn[3];
    for (int k = 0; k < 3; ++k) {
      up[k] = sys.single_layer_at(z + ((k + 1) * eps) * x.normal, phi);
      dn[k] = sys.single_layer_at(z - ((k + 1) * eps) * x.normal, phi);
    }
    // Derivative at 0 of the quadratic through the values at eps, 2 eps, 3 eps.
    const complex d_out = (-2.5 * up[0] + 4.0 * up[1] - 1.5 * up[2]) / eps;
    const complex d_in = -(-2.5 * dn[0] + 4.0 * dn[1] - 1.5 * dn[2]) / eps;
    rep.exterior = std::max(rep.exterior, std::abs(d_out - (0.5 * phi[i] + kphi[i])) / scale);
    rep.interior = std::max(rep.interior, std::abs(d_in - (-0.5 * phi[i] + kphi[i])) / scale);
  }
  return rep;
}

GapStatistic gap_statistic(const std::vector<double>& eigenvalues, double lo, double hi) {
  std::vector<double> inside;
  for (double e : eigenvalues) {
    if (e > lo && e < hi) inside.push_back(e);
  }
  std::sort(inside.begin(), inside.end());
  GapStatistic st;
  st.count = static_cast<int>(inside.size());
  if (inside.size() < 2) return st;
  for (size_t i = 1; i < inside.size(); ++i) st.max_gap = std::max(st.max_gap, inside[i] - inside[i - 1]);
  st.mean_gap = (inside.back() - inside.front()) / (inside.size() - 1);
  return st;
}

}  // namespace npdisks
