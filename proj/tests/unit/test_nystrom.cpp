#include <doctest.h>

#include <cmath>
#include <numbers>

#include "npdisks/errors.hpp"
#include "npdisks/nystrom.hpp"

using namespace npdisks;
using std::numbers::pi;

namespace {

// Index of the node closest to z.
int nearest(const NystromMesh& mesh, complex z) {
  int best = 0;
  double d = INFINITY;
  for (int i = 0; i < mesh.size(); ++i) {
    const double e = std::abs(mesh.node(i).z() - z);
    if (e < d) d = e, best = i;
  }
  return best;
}

}  // namespace

TEST_CASE("mesh weights, symmetry and refinement") {
  const auto g = Geometry::make(1.0, pi / 4);
  CHECK_THROWS_AS(NystromMesh::build(g, 8), DomainError);
  CHECK_THROWS_AS(NystromMesh::build(g, 32, 0.5), DomainError);
  const auto mesh = NystromMesh::build(g, 64);
  CHECK(std::abs(mesh.weights().sum() / (4.0 * (pi - g.theta0())) - 1.0) < 1e-8);
  CHECK(mesh.weights().minCoeff() > 0.0);

  double worst = 0.0;
  for (int i = 0; i < mesh.size(); ++i) {
    const complex z = mesh.node(i).z();
    worst = std::max(worst, std::abs(mesh.node(nearest(mesh, std::conj(z))).z() - std::conj(z)));
    worst = std::max(worst, std::abs(mesh.node(nearest(mesh, -std::conj(z))).z() + std::conj(z)));
  }
  CHECK(worst < 1e-14);

  // Oracle for the contour integral of x1^2 over both arcs: per arc,
  // int (c + a e^{iw})_1^2 a dw with centre on the x2-axis is a^3 (w/2 + sin 2w / 4).
  const double w0 = pi / 2 + g.theta0(), w1 = w0 + 2 * (pi - g.theta0());
  const double exact = 2.0 * (0.5 * (w1 - w0) + 0.25 * (std::sin(2 * w1) - std::sin(2 * w0)));
  double prev = INFINITY;
  for (int M : {16, 32, 64}) {
    const auto m = NystromMesh::build(g, M);
    double sum = 0.0;
    for (int i = 0; i < m.size(); ++i) sum += m.weights()[i] * std::pow(m.node(i).point().x1, 2);
    const double err = std::abs(sum - exact);
    CHECK(err <= prev);
    prev = err;
  }
  CHECK(prev < 1e-12);
}

TEST_CASE("arc points are accurate near the corners") {
  const auto g = Geometry::make(1.3, 0.6);
  const auto mesh = NystromMesh::build(g, 32);
  for (int i = 0; i < mesh.size(); ++i) {
    const auto& p = mesh.node(i);
    const Arc arc = mesh.arc_of(i);
    CHECK(std::abs(norm(p.point() - g.center(arc)) - g.radius()) < 1e-14);
    const auto b = boundary_point(g, p.xi, arc);
    CHECK(std::abs(b.as_complex() - p.z()) < 1e-12);
    const auto n = outward_normal(g, p.point(), arc);
    CHECK(std::abs(n.x1 - p.normal.x1) < 1e-14);
    CHECK(std::abs(n.x2 - p.normal.x2) < 1e-14);
  }
}

TEST_CASE("assembled operators") {
  const auto g = Geometry::make(1.0, pi / 3);
  CHECK_THROWS_WITH_AS(NystromSystem::assemble(NystromMesh::build(Geometry::make(1.0, 0.04), 16)),
                       doctest::Contains("touching"), DomainError);
  const auto mesh = NystromMesh::build(g, 32);
  const auto sys = NystromSystem::assemble(mesh);
  const auto& K = sys.Kstar();
  const auto& w = mesh.weights();
  const int half = mesh.size() / 2;

  // Same-circle kernel is 1/(4 pi a), diagonal included.
  for (int i : {0, 7, 100, half - 1})
    for (int j : {0, 3, i, half - 1}) CHECK(K(i, j) == doctest::Approx(w[j] / (4 * pi)).epsilon(1e-14));

  // Gauss: int K[1] over the adjoint variable gives 1/2 at smooth points.
  const Eigen::VectorXd col = (w.transpose() * K).transpose().cwiseQuotient(w);
  for (int j = 0; j < mesh.size(); ++j)
    if (std::abs(mesh.node(j).xi) < 5.0) CHECK(std::abs(col[j] - 0.5) < 1e-6);

  // Reflection x2 -> -x2 permutes nodes and commutes with both operators.
  std::vector<int> perm(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) perm[i] = nearest(mesh, std::conj(mesh.node(i).z()));
  double dk = 0.0, ds = 0.0;
  for (int i = 0; i < mesh.size(); ++i)
    for (int j = 0; j < mesh.size(); ++j) {
      dk = std::max(dk, std::abs(K(perm[i], perm[j]) - K(i, j)));
      ds = std::max(ds, std::abs(sys.S()(perm[i], perm[j]) - sys.S()(i, j)));
    }
  CHECK(dk < 1e-12 * K.cwiseAbs().maxCoeff());
  CHECK(ds < 1e-12 * sys.S().cwiseAbs().maxCoeff());

  // W S is symmetric up to the local quadrature corrections.
  const Eigen::VectorXd r = w.cwiseSqrt();
  const Eigen::MatrixXd B = r.asDiagonal() * sys.S() * r.cwiseInverse().asDiagonal();
  CHECK((B - B.transpose()).norm() / B.norm() < 5e-3);
}

TEST_CASE("single layer parity and decay") {
  // +1 on the lower arc, -1 on the upper: odd, so S[phi] is odd too.
  const auto g = Geometry::make(1.0, pi / 4);
  const auto mesh = NystromMesh::build(g, 32);
  const auto sys = NystromSystem::assemble(mesh);
  const auto phi = mesh.sample([](PlanePoint, Arc arc) { return complex(arc == Arc::plus ? 1.0 : -1.0); });
  CHECK(std::abs(sys.integral(phi)) < 1e-13);
  const auto u = sys.apply_S(phi);
  const int half = mesh.size() / 2;
  double worst = 0.0;
  for (int i = 0; i < half; ++i) {
    const int j = nearest(mesh, std::conj(mesh.node(i).z()));
    worst = std::max(worst, std::abs(u[i] + u[j]));
  }
  CHECK(worst < 1e-12);
  CHECK(sys.hstar_inner(phi, phi).real() > 0.0);
  const auto p0 = sys.project_mean_zero(mesh.sample([](PlanePoint x, Arc) { return complex(1.0 + x.x1, 0.0); }));
  CHECK(std::abs(sys.integral(p0)) < 1e-13);
  // Far away S[phi] of a mean-zero density decays like 1/|z|.
  const complex far1 = sys.single_layer_at({100.0, 0.0}, p0);
  const complex far2 = sys.single_layer_at({200.0, 0.0}, p0);
  CHECK(std::abs(far2 / far1) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("spectrum lies inside (-1/2, 1/2) and near [-b, b]") {
  const auto g = Geometry::make(1.0, pi / 4);
  const auto sys = NystromSystem::assemble(NystromMesh::build(g, 32));
  const auto ev = oracle_spectrum(sys);
  CHECK(ev.front() > -0.5);
  CHECK(ev.back() < 0.5);
  CHECK(ev.front() > -0.25 * 1.02);
  CHECK(ev.back() < 0.25 * 1.02);
  CHECK(ev.back() > 0.25 * 0.95);
  CHECK(std::is_sorted(ev.begin(), ev.end()));
  CHECK(calderon_residual(sys) < 1e-2);
  const auto gs = gap_statistic({-1.0, -0.1, 0.0, 0.3, 2.0}, -0.5, 0.5);
  CHECK(gs.count == 3);
  CHECK(gs.max_gap == doctest::Approx(0.3));
  CHECK(gs.mean_gap == doctest::Approx(0.2));
}

TEST_CASE("jump relation") {
  const auto g = Geometry::make(1.0, pi / 4);
  const auto sys = NystromSystem::assemble(NystromMesh::build(g, 128));
  const auto phi = sys.mesh().sample([](PlanePoint x, Arc) { return complex(x.x2 * (1.0 + 0.5 * x.x1), 0.0); });
  const auto rep = jump_check(sys, phi, 1e-4);
  CHECK(rep.nodes > 100);
  CHECK(rep.exterior < 1e-3);
  CHECK(rep.interior < 1e-3);
}
