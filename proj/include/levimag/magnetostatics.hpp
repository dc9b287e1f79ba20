#pragma once

#include <optional>

#include "levimag/body.hpp"

namespace levimag {

/// Demagnetization factors of a spheroid. Invariant: axial + 2·radial = 1.
struct DemagFactors {
  double axial;
  double radial;
};

/// Closed-form prolate-spheroid factors for aspect ratio R = a/b > 1.
/// Within 1e-6 of the sphere the first-order series about R = 1 is used.
/// Throws std::domain_error for R <= 1 (prolate only).
DemagFactors demag_factors(double aspect_ratio);

/// Sphere → (1/3, 1/3).
DemagFactors demag_factors(const Shape& shape);

/// Shape-anisotropy torque on a soft body in a weak field B at angle φ
/// between field and symmetry axis. Restoring sign convention is left to the
/// caller: the returned value is V(n_r−n_a)B²sin(2φ)/(2μ₀n_a n_r).
double torque_soft(const Shape& shape, double phi, double field);

/// Torque on a hard magnet with fixed magnetization: V·M·B·sin(φ),
/// M = polarization/μ₀.
double torque_hard(double volume, double polarization, double phi, double field);

/// dT/dφ at φ = 0 for either regime.
double stiffness(const MagnetBody& body, double field);

/// Field at which the soft-magnet torque law stops being valid:
/// polarization·n_a·n_r·√2/√(n_a²+n_r²).
double max_field_soft(const Shape& shape, const Material& material);

struct SoftFrequency {
  double omega;       // rad/s
  bool within_validity;
};

SoftFrequency libration_frequency_soft(const Shape& shape, const Material& material, double field);
double libration_frequency_hard(const Shape& shape, const Material& material, double field);

enum class Regime { soft, hard };

struct ConfinementReport {
  double omega;                       // rad/s
  double stiffness;                   // N·m/rad
  std::optional<double> max_field;    // soft only
  bool within_validity = true;
  Regime regime;
};

ConfinementReport confinement(const MagnetBody& body, double field);

struct AspectOptimum {
  double aspect_ratio;
  double omega;
};

/// Golden-section maximization of the soft libration frequency over
/// R ∈ (1, 20] at fixed semi-minor axis.
AspectOptimum optimal_aspect_ratio(double semi_minor, const Material& material, double field,
                                   double tolerance = 1e-4);

}  // namespace levimag
