#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "npdisks/errors.hpp"
#include "npdisks/field.hpp"
#include "npdisks/nystrom.hpp"
#include "npdisks/resonance.hpp"
#include "npdisks/source.hpp"
#include "npdisks/spectral.hpp"

namespace py = pybind11;
using namespace npdisks;

namespace {

PlanePoint point(complex z) { return PlanePoint::from_complex(z); }

py::array_t<complex> to_array(const std::vector<complex>& v) { return py::array_t<complex>(v.size(), v.data()); }

std::vector<complex> from_array(const py::array_t<complex, py::array::c_style | py::array::forcecast>& a,
                                const SpectralGrid& grid, const char* what) {
  if (a.ndim() != 1 || a.shape(0) != grid.size())
    throw GridMismatchError(std::string(what) + " must be a 1-d array of the grid size");
  return {a.data(), a.data() + a.shape(0)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Neumann-Poincare spectral analysis on two intersecting disks";

  auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SingularityError>(m, "SingularityError", domain.ptr());
  py::register_exception<BranchCutError>(m, "BranchCutError", domain.ptr());
  py::register_exception<CornerError>(m, "CornerError", domain.ptr());
  py::register_exception<OffBoundaryError>(m, "OffBoundaryError", domain.ptr());
  py::register_exception<GridMismatchError>(m, "GridMismatchError", PyExc_ValueError);
  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Geometry>(m, "Geometry")
      .def(py::init(&Geometry::make), py::arg("radius"), py::arg("theta0"))
      .def_property_readonly("radius", &Geometry::radius)
      .def_property_readonly("theta0", &Geometry::theta0)
      .def_property_readonly("alpha", &Geometry::alpha)
      .def_property_readonly("arc_length", &Geometry::arc_length)
      .def_property_readonly("perimeter", &Geometry::perimeter)
      .def("__repr__", [](const Geometry& g) {
        return "Geometry(radius=" + std::to_string(g.radius()) + ", theta0=" + std::to_string(g.theta0()) + ")";
      });

  m.def(
      "phi", [](const Geometry& g, double xi, double theta) { return phi(g, {xi, theta}).as_complex(); },
      py::arg("geometry"), py::arg("xi"), py::arg("theta"), "Inverse bipolar map; returns z as a complex number.");
  m.def(
      "psi",
      [](const Geometry& g, complex z) {
        const auto c = psi(g, point(z));
        return py::make_tuple(c.xi, c.theta);
      },
      py::arg("geometry"), py::arg("z"), "Bipolar coordinates (xi, theta) of z.");
  m.def(
      "is_exterior", [](const Geometry& g, complex z) { return is_exterior(g, point(z)); }, py::arg("geometry"),
      py::arg("z"));

  py::class_<Multipliers>(m, "Multipliers")
      .def(py::init<const Geometry&>(), py::arg("geometry"))
      .def(py::init<double>(), py::arg("theta0"))
      .def_property_readonly("bound", &Multipliers::bound)
      .def_property_readonly("theta0", &Multipliers::theta0)
      .def("p1", py::vectorize(&Multipliers::p1))
      .def("p2", py::vectorize(&Multipliers::p2))
      .def("eta", py::vectorize(&Multipliers::eta))
      .def("eta_prime", py::vectorize(&Multipliers::eta_prime))
      .def("eta_inverse", py::vectorize(&Multipliers::eta_inverse));

  py::class_<SpectralGrid>(m, "SpectralGrid")
      .def(py::init(&SpectralGrid::make), py::arg("half_width"), py::arg("size"))
      .def_property_readonly("half_width", &SpectralGrid::half_width)
      .def_property_readonly("size", &SpectralGrid::size)
      .def_property_readonly("dxi", &SpectralGrid::dxi)
      .def_property_readonly("ds", &SpectralGrid::ds)
      .def_property_readonly("xi", [](const SpectralGrid& g) {
        py::array_t<double> a(g.size());
        for (int n = 0; n < g.size(); ++n) a.mutable_at(n) = g.xi(n);
        return a;
      })
      .def_property_readonly("s", [](const SpectralGrid& g) {
        py::array_t<double> a(g.size());
        for (int k = 0; k < g.size(); ++k) a.mutable_at(k) = g.s(k);
        return a;
      });

  py::class_<BoundaryDensity>(m, "BoundaryDensity")
      .def(py::init([](const SpectralGrid& grid, py::array_t<complex> plus, py::array_t<complex> minus) {
             return BoundaryDensity{grid, from_array(plus, grid, "plus"), from_array(minus, grid, "minus")};
           }),
           py::arg("grid"), py::arg("plus"), py::arg("minus"))
      .def_readonly("grid", &BoundaryDensity::grid)
      .def_property_readonly("plus", [](const BoundaryDensity& d) { return to_array(d.plus); })
      .def_property_readonly("minus", [](const BoundaryDensity& d) { return to_array(d.minus); });

  py::class_<SpectralPair>(m, "SpectralPair")
      .def(py::init([](const SpectralGrid& grid, py::array_t<complex> f1, py::array_t<complex> f2) {
             return SpectralPair{grid, from_array(f1, grid, "f1"), from_array(f2, grid, "f2")};
           }),
           py::arg("grid"), py::arg("f1"), py::arg("f2"))
      .def_readonly("grid", &SpectralPair::grid)
      .def_property_readonly("f1", [](const SpectralPair& f) { return to_array(f.f1); })
      .def_property_readonly("f2", [](const SpectralPair& f) { return to_array(f.f2); });

  py::class_<Transform>(m, "Transform")
      .def(py::init<const Geometry&, const SpectralGrid&>(), py::arg("geometry"), py::arg("grid"))
      .def_property_readonly("grid", &Transform::grid)
      .def("forward", &Transform::forward, py::arg("phi"), "U: boundary density to spectral pair.")
      .def("inverse", &Transform::inverse, py::arg("f"))
      .def("integral", &Transform::integral, py::arg("phi"))
      .def("project_mean_zero", &Transform::project_mean_zero, py::arg("phi"));

  m.def("wstar_norm_sq", &wstar_norm_sq, py::arg("multipliers"), py::arg("f"));
  m.def("wstar_inner", &wstar_inner, py::arg("multipliers"), py::arg("f"), py::arg("g"));
  m.def("apply_K_multiplier", &apply_K_multiplier, py::arg("multipliers"), py::arg("f"));
  m.def("apply_S_multiplier", &apply_S_multiplier, py::arg("multipliers"), py::arg("f"));
  m.def("np_apply_boundary", &np_apply_boundary, py::arg("transform"), py::arg("phi"));
  m.def("single_layer_boundary", &single_layer_boundary, py::arg("transform"), py::arg("phi"));

  py::class_<DipoleSource>(m, "DipoleSource")
      .def(py::init([](const Geometry& g, complex z, complex a) { return DipoleSource::make(g, point(z), point(a)); }),
           py::arg("geometry"), py::arg("z"), py::arg("a"))
      .def_property_readonly("z", [](const DipoleSource& d) { return d.z.as_complex(); })
      .def_property_readonly("a", [](const DipoleSource& d) { return d.a.as_complex(); });
  m.def("dipole_at_ratio", &dipole_at_ratio, py::arg("geometry"), py::arg("xi"), py::arg("ratio"),
        "Dipole at bipolar (xi, ratio * theta0) with the default polarization.");
  m.def("dipole_normal_derivative", &dipole_normal_derivative, py::arg("transform"), py::arg("source"));

  m.def("g_j", &g_j, py::arg("geometry"), py::arg("source"), py::arg("s"), py::arg("j"));
  m.def("mu_prime", &mu_prime, py::arg("geometry"), py::arg("source"), py::arg("t"));
  m.def(
      "phi_norm_sq",
      [](const Geometry& g, const DipoleSource& src, complex lambda, double rel_tol) {
        const auto r = phi_norm_sq(g, src, lambda, rel_tol);
        return py::make_tuple(r.value, r.error);
      },
      py::arg("geometry"), py::arg("source"), py::arg("lam"), py::arg("rel_tol") = 1e-6,
      "||phi||^2 in H* for (lam - K*) phi = d_nu q; returns (value, error estimate).");
  m.def(
      "classify", [](const Multipliers& mu, double lambda0) { return to_string(classify(mu, lambda0)); },
      py::arg("multipliers"), py::arg("lambda0"));
  m.def(
      "rate_fit",
      [](const Geometry& g, const DipoleSource& src, double lambda0, const std::vector<double>& deltas) {
        const auto f = rate_fit(g, src, lambda0, deltas);
        py::dict d;
        d["regime"] = to_string(f.regime);
        d["deltas"] = f.deltas;
        d["norms"] = f.norms;
        d["local_slopes"] = f.local_slopes;
        d["slope"] = f.slope;
        d["log_corrected_slope"] = f.log_corrected_slope;
        d["exponent"] = f.exponent;
        d["limit_constant"] = f.limit_constant;
        d["predicted_limit"] = f.predicted_limit;
        return d;
      },
      py::arg("geometry"), py::arg("source"), py::arg("lambda0"), py::arg("deltas"));
  m.def("never_order_check", &never_order_check, py::arg("geometry"), py::arg("source"), py::arg("lambda0"),
        py::arg("deltas"));
  m.def("geometric_deltas", &geometric_deltas, py::arg("hi"), py::arg("lo"), py::arg("n"));
  m.def(
      "induced_field",
      [](const Transform& T, const DipoleSource& src, complex lambda, complex z) {
        return InducedField(T, src, lambda).value(point(z));
      },
      py::arg("transform"), py::arg("source"), py::arg("lam"), py::arg("z"));

  m.def(
      "oracle_spectrum",
      [](const Geometry& g, int panels_per_arc, double grading) {
        return oracle_spectrum(NystromSystem::assemble(NystromMesh::build(g, panels_per_arc, grading)));
      },
      py::arg("geometry"), py::arg("panels_per_arc"), py::arg("grading") = 3.0,
      "Ritz values of K* in the energy inner product from the Nystrom discretisation.");
  m.def(
      "calderon_residual",
      [](const Geometry& g, int panels_per_arc) {
        return calderon_residual(NystromSystem::assemble(NystromMesh::build(g, panels_per_arc)));
      },
      py::arg("geometry"), py::arg("panels_per_arc"));
}
