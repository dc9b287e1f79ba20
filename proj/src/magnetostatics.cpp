#include "levimag/magnetostatics.hpp"

#include <cmath>
#include <stdexcept>

#include "levimag/constants.hpp"

namespace levimag {

namespace {

constexpr double kSeriesWindow = 1e-6;

void require_class(const Material& m, MaterialClass expected) {
  m.validate();
  if (m.kind != expected)
    throw std::invalid_argument("material '" + m.name + "' is " +
                                (m.kind == MaterialClass::soft ? "soft" : "hard") +
                                "; this operation needs a " +
                                (expected == MaterialClass::soft ? "soft" : "hard") + " material");
}

// V(n_r − n_a)/(μ₀ n_a n_r): the soft stiffness per unit B².
double soft_coefficient(const Shape& shape) {
  const auto n = demag_factors(shape);
  return volume(shape) * (n.radial - n.axial) / (constants::mu0 * n.axial * n.radial);
}

}  // namespace

DemagFactors demag_factors(double aspect_ratio) {
  const double r = aspect_ratio;
  if (!(r > 1.0)) throw std::domain_error("demag_factors: prolate only (aspect ratio must be > 1)");
  double axial;
  if (r - 1.0 < kSeriesWindow) {
    axial = 1.0 / 3.0 - (4.0 / 15.0) * (r - 1.0);
  } else {
    // Eccentricity form (1−e²)/e³·(artanh e − e); below e² = 1/4 the power
    // series avoids the cancellation in artanh e − e.
    const double e2 = (r - 1.0) * (r + 1.0) / (r * r);
    if (e2 < 0.25) {
      double sum = 0.0, term = 1.0;
      for (int k = 1; k < 40; ++k, term *= e2) sum += term / (2.0 * k + 1.0);
      axial = (1.0 - e2) * sum;
    } else {
      const double s = std::sqrt(r * r - 1.0);
      axial = (r / s * std::log(r + s) - 1.0) / (r * r - 1.0);
    }
  }
  return {axial, 0.5 * (1.0 - axial)};
}

DemagFactors demag_factors(const Shape& shape) {
  if (const auto* e = std::get_if<ProlateEllipsoid>(&shape)) return demag_factors(e->aspect_ratio());
  return {1.0 / 3.0, 1.0 / 3.0};
}

double torque_soft(const Shape& shape, double phi, double field) {
  return 0.5 * soft_coefficient(shape) * field * field * std::sin(2.0 * phi);
}

double torque_hard(double volume, double polarization, double phi, double field) {
  return volume * (polarization / constants::mu0) * field * std::sin(phi);
}

double stiffness(const MagnetBody& body, double field) {
  if (body.material.kind == MaterialClass::soft) return soft_coefficient(body.shape) * field * field;
  return volume(body.shape) * body.material.magnetization() * field;
}

double max_field_soft(const Shape& shape, const Material& material) {
  require_class(material, MaterialClass::soft);
  const auto n = demag_factors(shape);
  return material.polarization * n.axial * n.radial * std::sqrt(2.0) /
         std::hypot(n.axial, n.radial);
}

SoftFrequency libration_frequency_soft(const Shape& shape, const Material& material, double field) {
  require_class(material, MaterialClass::soft);
  if (field < 0.0) throw std::invalid_argument("field must be >= 0");
  const double omega = std::sqrt(soft_coefficient(shape) / inertia_phi(shape, material.density)) * field;
  return {omega, field <= max_field_soft(shape, material)};
}

double libration_frequency_hard(const Shape& shape, const Material& material, double field) {
  require_class(material, MaterialClass::hard);
  if (field < 0.0) throw std::invalid_argument("field must be >= 0");
  return std::sqrt(volume(shape) * material.magnetization() * field /
                   inertia_phi(shape, material.density));
}

ConfinementReport confinement(const MagnetBody& body, double field) {
  ConfinementReport report{};
  report.stiffness = stiffness(body, field);
  if (body.material.kind == MaterialClass::soft) {
    const auto f = libration_frequency_soft(body.shape, body.material, field);
    report.omega = f.omega;
    report.within_validity = f.within_validity;
    report.max_field = max_field_soft(body.shape, body.material);
    report.regime = Regime::soft;
  } else {
    report.omega = libration_frequency_hard(body.shape, body.material, field);
    report.regime = Regime::hard;
  }
  return report;
}

AspectOptimum optimal_aspect_ratio(double semi_minor, const Material& material, double field,
                                   double tolerance) {
  require_class(material, MaterialClass::soft);
  if (!(semi_minor > 0.0) || !(field > 0.0))
    throw std::invalid_argument("optimal_aspect_ratio: semi-minor axis and field must be > 0");

  const auto omega_at = [&](double r) {
    const ProlateEllipsoid e(r * semi_minor, semi_minor);
    return libration_frequency_soft(e, material, field).omega;
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 1.0 + 1e-9;
  double hi = 20.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = omega_at(x1);
  double f2 = omega_at(x2);
  while (hi - lo > tolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = omega_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = omega_at(x1);
    }
  }
  const double best = 0.5 * (lo + hi);
  return {best, omega_at(best)};
}

}  // namespace levimag
