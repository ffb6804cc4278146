// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <CLI11.hpp>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include "npdisks/field.hpp"
#include "npdisks/validation.hpp"

using namespace npdisks;
using std::numbers::pi;

namespace {

const Geometry& geometry() {
  static const Geometry g = Geometry::make(1.0, pi / 4);
  return g;
}

const Transform& transform() {
  static const Transform T(geometry(), SpectralGrid::make(30.0, 4096));
  return T;
}

const NystromSystem& oracle() {
  static const NystromSystem sys = NystromSystem::assemble(NystromMesh::build(geometry(), 256));
  return sys;
}

std::vector<double> deltas() { return geometric_deltas(1e-2, 1e-6, 12); }

DipoleSource dipole(double ratio) { return dipole_at_ratio(geometry(), 0.4, ratio); }

const std::vector<int> meshes{64, 128, 256};

CheckResult ac1() {
  std::vector<SpectrumSweep> sweeps;
  for (double t0 : {pi / 6, pi / 4, pi / 3}) sweeps.push_back(spectrum_sweep(Geometry::make(1.0, t0), meshes));
  return check_spectral_bound(sweeps, 0.02);
}

CheckResult ac2() { return check_gap_scaling(spectrum_sweep(geometry(), meshes), 0.02); }

CheckResult ac3() { return check_pipeline(transform(), oracle(), random_packets(5, 1), 1e-3); }

CheckResult ac4() { return check_unitarity(transform(), oracle(), random_packets(20, 2), 1e-4); }

CheckResult ac5() { return check_calderon(oracle(), 1e-6); }

CheckResult ac6() { return check_interior_rate(geometry(), dipole(0.5), deltas(), 0.05, 0.02); }

CheckResult ac7() { return check_endpoint_rate(geometry(), dipole(0.3), dipole(0.6), deltas(), 0.05, 0.05); }

CheckResult ac8() { return check_zero_rate(geometry(), {dipole(0.3), dipole(0.6), dipole(0.9)}, deltas(), 0.05); }

CheckResult ac9() {
  const double b = Multipliers(geometry()).bound();
  return check_never_order(geometry(),
                           {{dipole(0.5), b / 2},
                            {dipole(0.3), b},
                            {dipole(0.6), b},
                            {dipole(0.3), 0.0},
                            {dipole(0.6), 0.0},
                            {dipole(0.9), 0.0}},
                           deltas(), 0.1);
}

CheckResult ac10() {
  const auto q = dipole_normal_derivative(transform(), dipole(0.5));
  return check_eigenrelation(transform(), q, {0.5, 1.0, 3.0}, 1e-6);
}

CheckResult ac11() {
  const auto& T = transform();
  return check_resolution(T, T.forward(packet_density(T, random_packets(1, 3).front())), 200, 1e-6);
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::map<std::string, std::function<CheckResult()>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},   {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}};

  CLI::App app{"npdisks acceptance criteria"};
  std::vector<std::string> only;
  app.add_option("--only", only, "Run only these criteria (AC1 ... AC11)");
  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> order;
  for (int i = 1; i <= 11; ++i) order.push_back("AC" + std::to_string(i));
  const std::set<std::string> selected(only.begin(), only.end());
  for (const auto& id : selected) {
    if (!criteria.count(id)) {
      std::fprintf(stderr, "unknown criterion %s\n", id.c_str());
      return 2;
    }
  }

  bool ok = true;
  for (const auto& id : order) {
    if (!selected.empty() && !selected.count(id)) continue;
    try {
      const auto r = criteria.at(id)();
      ok = ok && r.pass;
      std::printf("%s\n", format_line(r).c_str());
    } catch (const std::exception& e) {
      ok = false;
      std::printf("%s FAIL error: %s\n", id.c_str(), e.what());
    }
  }
  return ok ? 0 : 1;
}
