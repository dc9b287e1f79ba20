#pragma once

#include <optional>
#include <vector>

#include "levimag/body.hpp"

namespace levimag {

/// Spherical hard magnet of radius R with an NV centre at gap d from its
/// surface and polar angle θ measured from the bias field B₀.
struct CouplingGeometry {
  Sphere magnet;
  Material material;
  double gap;         // m
  double theta;       // rad
  double bias_field;  // T

  void validate() const;
};

/// Field components in the local (e_r, e_θ) frame, tesla.
struct PolarField {
  double radial;
  double polar;
};

/// Dipole field of the sphere at the NV for magnet angle φ, with the
/// polarization in tesla: M_T R³/(3(d+R)³)·(2cos(θ−φ), sin(θ−φ)).
PolarField dipole_field(const CouplingGeometry& g, double phi);

/// First-order field change per radian of libration: M_T R³/(d+R)³.
double d_phi(const CouplingGeometry& g);

/// ½·arccos(−3D_φ/(6B₀+D_φ)). Throws std::domain_error if D_φ > 3B₀.
double theta_op(double d_phi, double bias_field);

/// Zero-point angle √(ħ/(2Iω)).
double zero_point_angle(double inertia, double omega);

struct CouplingReport {
  double d_phi;       // T/rad
  double theta_op;    // rad
  double zero_point;  // rad
  double rate;        // λ_φ, rad/s
  double omega;       // rad/s
};

/// Scheme 1: λ_φ = γ_NV·D_φ·φ₀.
CouplingReport coupling_rate_scheme1(const CouplingGeometry& g, double omega, double inertia);

/// Scheme 2: λ̃_φ = γ_NV·B·φ₀ for an NV rigidly attached to the rotor.
double coupling_rate_scheme2(double field, double inertia, double omega);

/// Coaxial tip-to-tip pair, inertia about the transverse axis through the
/// joint centre of mass.
double composite_inertia(const ProlateEllipsoid& first, double first_density,
                         const ProlateEllipsoid& second, double second_density);

struct CouplingMapRequest {
  std::vector<double> radii;  // m
  std::vector<double> gaps;   // m
  Material material;
  double bias_field = 0.1;
  /// Fixed libration frequency; when empty ω is computed per radius from the
  /// hard-magnet law at `bias_field`.
  std::optional<double> omega;
  double t2_star = 500e-6;  // threshold contour sits at λ/2π = 1/T₂*
  unsigned threads = 0;     // 0 → hardware concurrency
};

struct ContourPoint {
  double radius;
  double gap;
};

struct CouplingMap {
  std::vector<double> radii;
  std::vector<double> gaps;
  std::vector<double> rate_hz;  // radius-major: rate_hz[i * gaps.size() + j]
  /// Same layout; false where D_φ > 3B₀ and no aligned-NV angle exists.
  std::vector<char> aligned;
  double threshold_hz;
  /// Gap where λ/2π crosses the threshold for each radius that crosses it
  /// inside the gap range.
  std::vector<ContourPoint> contour;

  double at(std::size_t radius_index, std::size_t gap_index) const {
    return rate_hz[radius_index * gaps.size() + gap_index];
  }
};

CouplingMap coupling_map(const CouplingMapRequest& request);

}  // namespace levimag
