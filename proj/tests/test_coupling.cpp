#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "levimag/constants.hpp"
#include "levimag/coupling.hpp"
#include "levimag/magnetostatics.hpp"
#include "oracles.hpp"

using namespace levimag;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

CouplingGeometry probe(double theta = constants::pi / 4.0) {
  return {Sphere(100e-9), materials::neodymium(), 100e-9, theta, 0.1};
}

// Total field (x, z) at the NV with the bias along z, for magnet angle phi.
std::array<double, 2> total_field(const CouplingGeometry& g, double phi) {
  const auto b = dipole_field(g, phi);
  const double s = std::sin(g.theta), c = std::cos(g.theta);
  return {b.radial * s + b.polar * c, g.bias_field + b.radial * c - b.polar * s};
}

// Component of dB/dφ along the equilibrium total field (the aligned NV axis).
double axial_derivative(const CouplingGeometry& g) {
  const auto b0 = total_field(g, 0.0);
  const double norm = std::hypot(b0[0], b0[1]);
  const double h = 1e-6;
  const auto bp = total_field(g, h);
  const auto bm = total_field(g, -h);
  return ((bp[0] - bm[0]) * b0[0] + (bp[1] - bm[1]) * b0[1]) / (2.0 * h * norm);
}

}  // namespace

TEST_CASE("hand-chain oracle at R = d = 100 nm") {
  const double radius = 100e-9;
  const double mass = 7400.0 * 4.0 / 3.0 * constants::pi * radius * radius * radius;
  const double inertia = 0.4 * mass * radius * radius;
  const double omega = 2.0 * constants::pi * 200e3;
  const double d = 1.6 * std::pow(radius / (2.0 * radius), 3);
  const double phi0 = std::sqrt(constants::hbar / (2.0 * inertia * omega));
  CHECK(d == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(phi0 == doctest::Approx(1.84e-5).epsilon(0.005));

  const auto rep = coupling_rate_scheme1(probe(), omega, inertia);
  CHECK(rep.d_phi == doctest::Approx(d).epsilon(1e-12));
  CHECK(rep.zero_point == doctest::Approx(phi0).epsilon(1e-12));
  CHECK(rep.rate == doctest::Approx(constants::gamma_nv * d * phi0).epsilon(1e-14));
  CHECK(rel(to_hz(rep.rate), 103e3) < 0.05);
}

TEST_CASE("dipole field geometry") {
  const auto g = probe(0.6);
  const auto on_axis = dipole_field(g, 0.6);
  const auto equator = dipole_field(g, 0.6 - constants::pi / 2.0);
  CHECK(std::hypot(on_axis.radial, on_axis.polar) ==
        doctest::Approx(2.0 * std::hypot(equator.radial, equator.polar)).epsilon(1e-14));
  // Point dipole m along the magnet axis: B = μ₀/(4π r³)(3(m·r̂)r̂ − m).
  const double r = 200e-9;
  const double m = 1.6 / constants::mu0 * 4.0 / 3.0 * constants::pi * std::pow(100e-9, 3);
  const double psi = 0.6 - 0.25;
  const double pre = constants::mu0 * m / (4.0 * constants::pi * r * r * r);
  const auto b = dipole_field(g, 0.25);
  CHECK(b.radial == doctest::Approx(pre * 2.0 * std::cos(psi)).epsilon(1e-12));
  CHECK(b.polar == doctest::Approx(pre * std::sin(psi)).epsilon(1e-12));
}

TEST_CASE("operating angle maximizes the axial field derivative") {
  for (double ratio : {1e-3, 0.5, 2.0, 2.9}) {
    const double bias = 0.1;
    CouplingGeometry g = probe();
    g.bias_field = bias;
    g.material.polarization = ratio * bias * 8.0;  // R = d, so D_φ = M_T/8
    const double dphi = d_phi(g);
    REQUIRE(dphi == doctest::Approx(ratio * bias));
    const double expected = theta_op(dphi, bias);

    double best = 0.0, best_theta = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      g.theta = constants::pi / 2.0 * i / 20000.0;
      const double a = axial_derivative(g);
      if (a > best) {
        best = a;
        best_theta = g.theta;
      }
    }
    CAPTURE(ratio);
    CHECK(std::abs(best_theta - expected) < 2e-4);
  }
  CHECK(theta_op(0.2, 0.1) == doctest::Approx(0.5 * std::acos(-0.75)).epsilon(1e-14));
  CHECK(theta_op(1e-12, 1.0) == doctest::Approx(constants::pi / 4.0).epsilon(1e-9));
  CHECK_THROWS_AS(theta_op(0.31, 0.1), std::domain_error);
  CHECK_THROWS_AS(theta_op(0.1, 0.0), std::domain_error);
}

TEST_CASE("coupling rate invariant under rescaling that keeps D_phi * phi0 fixed") {
  const auto g = probe();
  const double inertia = inertia_phi(Sphere(100e-9), 7400.0);
  const double omega = 2.0 * constants::pi * 200e3;
  const double base = coupling_rate_scheme1(g, omega, inertia).rate;
  auto g2 = g;
  g2.material.polarization *= 2.0;
  g2.bias_field = 1.0;
  CHECK(coupling_rate_scheme1(g2, 4.0 * omega, inertia).rate == doctest::Approx(base).epsilon(1e-13));
  CHECK(coupling_rate_scheme1(g2, omega, 4.0 * inertia).rate == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("geometry validation") {
  auto g = probe();
  g.gap = -1e-9;
  CHECK_THROWS_AS(coupling_rate_scheme1(g, 1e6, 1e-31), std::invalid_argument);
  g = probe(4.0);
  CHECK_THROWS_AS(coupling_rate_scheme1(g, 1e6, 1e-31), std::invalid_argument);
  g = probe();
  g.bias_field = 0.0;
  CHECK_THROWS_AS(coupling_rate_scheme1(g, 1e6, 1e-31), std::invalid_argument);
  g = probe();
  g.bias_field = 0.05;  // D_φ = 0.2 > 3·0.05
  CHECK_THROWS_AS(coupling_rate_scheme1(g, 1e6, 1e-31), std::domain_error);
  CHECK_THROWS_AS(zero_point_angle(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(coupling_rate_scheme2(-1.0, 1e-31, 1e6), std::invalid_argument);
}

TEST_CASE("composite inertia") {
  const ProlateEllipsoid e(40e-9, 20e-9);
  const double m = 7860.0 * volume(e);
  CHECK(composite_inertia(e, 7860.0, e, 7860.0) ==
        doctest::Approx(2.0 * (inertia_phi(e, 7860.0) + m * 40e-9 * 40e-9)).epsilon(1e-12));
  CHECK(composite_inertia(e, 7860.0, ProlateEllipsoid(4e-9, 2e-9), 1e-20) ==
        doctest::Approx(inertia_phi(e, 7860.0)).epsilon(1e-9));

  // Diamond and iron 80 x 40 nm rods tip to tip, sampled directly.
  const auto diamond = oracle::sample_spheroid(40e-9, 20e-9, -40e-9, 3500.0, 1'000'000, 11);
  const auto iron = oracle::sample_spheroid(40e-9, 20e-9, 40e-9, 7860.0, 1'000'000, 12);
  const double mass = diamond.mass + iron.mass;
  const double zc = (diamond.mass * diamond.centroid_z + iron.mass * iron.centroid_z) / mass;
  const double sampled = diamond.second_x + iron.second_x + diamond.second_z + iron.second_z - mass * zc * zc;
  const double value = composite_inertia(e, 3500.0, e, 7860.0);
  CHECK(rel(value, sampled) < 0.01);
  CHECK(value == doctest::Approx(1.3433e-33).epsilon(1e-3));
  CHECK(value > 1e-34);

  // Scheme 2 with that rotor at 30 mT and 3 MHz lands within a factor 3 of 100 kHz.
  const double lam = to_hz(coupling_rate_scheme2(0.03, value, 2.0 * constants::pi * 3e6));
  CHECK(lam > 100e3 / 3.0);
  CHECK(lam < 3.0 * 100e3);
}

TEST_CASE("coupling map is a pure fan-out of the pointwise rate") {
  CouplingMapRequest req;
  for (int i = 0; i < 12; ++i) req.radii.push_back(10e-9 + 190e-9 * i / 11.0);
  for (int j = 0; j < 15; ++j) req.gaps.push_back(10e-9 * std::pow(200.0, j / 14.0));
  req.material = materials::neodymium();
  req.omega = 2.0 * constants::pi * 200e3;
  req.threads = 3;
  const auto map = coupling_map(req);
  REQUIRE(map.rate_hz.size() == 12 * 15);
  CHECK(map.threshold_hz == doctest::Approx(2000.0));

  for (std::size_t i = 0; i < req.radii.size(); ++i)
    for (std::size_t j = 0; j < req.gaps.size(); ++j) {
      CouplingGeometry g{Sphere(req.radii[i]), req.material, req.gaps[j], constants::pi / 4.0, req.bias_field};
      if (!map.aligned[i * req.gaps.size() + j]) {
        CHECK_THROWS_AS(coupling_rate_scheme1(g, *req.omega, 1.0), std::domain_error);
        continue;
      }
      const auto rep = coupling_rate_scheme1(g, *req.omega, inertia_phi(g.magnet, req.material.density));
      CHECK(map.at(i, j) == doctest::Approx(to_hz(rep.rate)).epsilon(1e-13));
    }

  req.threads = 1;
  const auto serial = coupling_map(req);
  CHECK(serial.rate_hz == map.rate_hz);
  CHECK(serial.aligned == map.aligned);
}

TEST_CASE("coupling map contour sits on the threshold") {
  CouplingMapRequest req;
  for (int i = 0; i < 20; ++i) req.radii.push_back(10e-9 + 190e-9 * i / 19.0);
  for (int j = 0; j < 40; ++j) req.gaps.push_back(10e-9 * std::pow(200.0, j / 39.0));
  req.material = materials::neodymium();
  req.omega = 2.0 * constants::pi * 200e3;
  const auto map = coupling_map(req);
  REQUIRE_FALSE(map.contour.empty());
  const double inertia_rho = req.material.density;
  for (const auto& p : map.contour) {
    CouplingGeometry g{Sphere(p.radius), req.material, p.gap, constants::pi / 4.0, 10.0};
    const auto rep = coupling_rate_scheme1(g, *req.omega, inertia_phi(g.magnet, inertia_rho));
    CHECK(to_hz(rep.rate) == doctest::Approx(map.threshold_hz).epsilon(1e-6));
  }

  // ω from the hard-magnet law needs a hard material.
  req.omega.reset();
  CHECK_NOTHROW(coupling_map(req));
  req.material = materials::iron();
  CHECK_THROWS_AS(coupling_map(req), std::invalid_argument);
  req.material = materials::neodymium();
  req.radii.clear();
  CHECK_THROWS_AS(coupling_map(req), std::invalid_argument);
}
