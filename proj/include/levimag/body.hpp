#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace levimag {

enum class MaterialClass { soft, hard };

/// Bulk magnetic material. `polarization` is μ₀·M in tesla: the saturation
/// value for soft materials, the remanent value for hard ones.
struct Material {
  std::string name;
  double density = 0.0;       // kg/m³
  double polarization = 0.0;  // T
  MaterialClass kind = MaterialClass::soft;

  /// Magnetization in A/m.
  double magnetization() const;
  void validate() const;
};

namespace materials {
Material iron();       // 7860 kg/m³, 2.2 T saturation
Material neodymium();  // 7400 kg/m³, 1.6 T remanence

/// Looks up a built-in preset by name; throws std::invalid_argument.
Material preset(const std::string& name);

/// Reads presets from a YAML file:
///
///     materials:
///       - name: iron
///         density: 7860        # kg/m^3
///         polarization: 2.2    # tesla
///         class: soft          # soft | hard
///
/// Errors carry the file line of the offending entry.
std::vector<Material> load(const std::filesystem::path& file);
}  // namespace materials

/// Prolate spheroid with semi-axes a (symmetry axis) > b.
class ProlateEllipsoid {
 public:
  ProlateEllipsoid(double semi_major, double semi_minor);

  double semi_major() const { return a_; }
  double semi_minor() const { return b_; }
  double aspect_ratio() const { return a_ / b_; }

 private:
  double a_;
  double b_;
};

class Sphere {
 public:
  explicit Sphere(double radius);
  double radius() const { return r_; }

 private:
  double r_;
};

using Shape = std::variant<ProlateEllipsoid, Sphere>;

struct MagnetBody {
  Shape shape;
  Material material;
};

double volume(const Shape& shape);

/// Moment of inertia about a transverse axis through the centre.
double inertia_phi(const Shape& shape, double density);

/// V / I_φ evaluated directly from volume() and inertia_phi().
double volume_inertia_ratio(const ProlateEllipsoid& shape, double density);

/// The same ratio written as V^{-2/3}·(5/ρ)·(4π/3)^{2/3}·R^{2/3}/(R²+1).
double volume_inertia_ratio_scaling(const ProlateEllipsoid& shape, double density);

}  // namespace levimag
