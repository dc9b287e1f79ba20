#include "levimag/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "levimag/constants.hpp"
#include "levimag/magnetostatics.hpp"

namespace levimag {

void CouplingGeometry::validate() const {
  material.validate();
  if (!(gap >= 0.0)) throw std::invalid_argument("coupling geometry: gap must be >= 0");
  if (!(theta >= 0.0 && theta <= constants::pi))
    throw std::invalid_argument("coupling geometry: theta must lie in [0, pi]");
  if (!(bias_field > 0.0)) throw std::invalid_argument("coupling geometry: bias field must be > 0");
}

double d_phi(const CouplingGeometry& g) {
  const double r = g.magnet.radius();
  const double ratio = r / (g.gap + r);
  return g.material.polarization * ratio * ratio * ratio;
}

PolarField dipole_field(const CouplingGeometry& g, double phi) {
  const double prefactor = d_phi(g) / 3.0;
  return {2.0 * prefactor * std::cos(g.theta - phi), prefactor * std::sin(g.theta - phi)};
}

double theta_op(double d_phi, double bias_field) {
  if (!(bias_field > 0.0)) throw std::domain_error("theta_op: bias field must be > 0");
  if (d_phi > 3.0 * bias_field)
    throw std::domain_error("bias field too weak for aligned-NV configuration (D_phi > 3 B0)");
  const double arg = -3.0 * d_phi / (6.0 * bias_field + d_phi);
  return 0.5 * std::acos(std::clamp(arg, -1.0, 1.0));
}

double zero_point_angle(double inertia, double omega) {
  if (!(inertia > 0.0) || !(omega > 0.0))
    throw std::invalid_argument("zero_point_angle: inertia and omega must be > 0");
  return std::sqrt(constants::hbar / (2.0 * inertia * omega));
}

CouplingReport coupling_rate_scheme1(const CouplingGeometry& g, double omega, double inertia) {
  g.validate();
  CouplingReport r{};
  r.d_phi = d_phi(g);
  r.theta_op = theta_op(r.d_phi, g.bias_field);
  r.zero_point = zero_point_angle(inertia, omega);
  r.rate = constants::gamma_nv * r.d_phi * r.zero_point;
  r.omega = omega;
  return r;
}

double coupling_rate_scheme2(double field, double inertia, double omega) {
  if (field < 0.0) throw std::invalid_argument("coupling_rate_scheme2: field must be >= 0");
  return constants::gamma_nv * field * zero_point_angle(inertia, omega);
}

double composite_inertia(const ProlateEllipsoid& first, double first_density,
                         const ProlateEllipsoid& second, double second_density) {
  const double m1 = first_density * volume(first);
  const double m2 = second_density * volume(second);
  // Long axes on a common line, touching at the origin.
  const double z1 = -first.semi_major();
  const double z2 = second.semi_major();
  const double zc = (m1 * z1 + m2 * z2) / (m1 + m2);
  return inertia_phi(first, first_density) + m1 * (z1 - zc) * (z1 - zc) +
         inertia_phi(second, second_density) + m2 * (z2 - zc) * (z2 - zc);
}

CouplingMap coupling_map(const CouplingMapRequest& req) {
  if (req.radii.empty() || req.gaps.empty()) throw std::invalid_argument("coupling_map: empty range");
  for (double r : req.radii)
    if (!(r > 0.0)) throw std::invalid_argument("coupling_map: radii must be > 0");
  for (double d : req.gaps)
    if (!(d >= 0.0)) throw std::invalid_argument("coupling_map: gaps must be >= 0");
  if (req.omega && !(*req.omega > 0.0)) throw std::invalid_argument("coupling_map: omega must be > 0");
  if (!req.omega && req.material.kind != MaterialClass::hard)
    throw std::invalid_argument("coupling_map: computing omega from the bias field needs a hard magnet");
  if (!(req.bias_field > 0.0)) throw std::invalid_argument("coupling_map: bias field must be > 0");
  if (!(req.t2_star > 0.0)) throw std::invalid_argument("coupling_map: T2* must be > 0");
  req.material.validate();

  CouplingMap map;
  map.radii = req.radii;
  map.gaps = req.gaps;
  map.threshold_hz = 1.0 / req.t2_star;
  map.rate_hz.assign(req.radii.size() * req.gaps.size(), 0.0);
  map.aligned.assign(map.rate_hz.size(), 0);

  const auto geometry = [&](double radius, double gap) {
    return CouplingGeometry{Sphere(radius), req.material, gap, constants::pi / 4.0, req.bias_field};
  };
  // Same chain as coupling_rate_scheme1 without the θ_op domain check, so the
  // map also covers points where the aligned configuration does not exist.
  const auto rate_hz = [&](double radius, double gap) {
    const Sphere s(radius);
    const double inertia = inertia_phi(s, req.material.density);
    const double omega =
        req.omega ? *req.omega : libration_frequency_hard(s, req.material, req.bias_field);
    return to_hz(constants::gamma_nv * d_phi(geometry(radius, gap)) * zero_point_angle(inertia, omega));
  };

  // Rows are independent; each worker owns a strided set of radius rows.
  unsigned workers = req.threads ? req.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(req.radii.size()));
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < req.radii.size(); i += workers)
        for (std::size_t j = 0; j < req.gaps.size(); ++j) {
          const std::size_t k = i * req.gaps.size() + j;
          map.rate_hz[k] = rate_hz(req.radii[i], req.gaps[j]);
          map.aligned[k] = d_phi(geometry(req.radii[i], req.gaps[j])) <= 3.0 * req.bias_field;
        }
    });
  }
  pool.clear();

  // λ is monotone decreasing in d at fixed R, so bisection finds the crossing.
  const auto [gmin, gmax] = std::minmax_element(req.gaps.begin(), req.gaps.end());
  for (double radius : req.radii) {
    double lo = *gmin;
    double hi = *gmax;
    if (rate_hz(radius, lo) < map.threshold_hz || rate_hz(radius, hi) > map.threshold_hz) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (hi + radius); ++it) {
      const double mid = 0.5 * (lo + hi);
      (rate_hz(radius, mid) > map.threshold_hz ? lo : hi) = mid;
    }
    map.contour.push_back({radius, 0.5 * (lo + hi)});
  }
  return map;
}

}  // namespace levimag
