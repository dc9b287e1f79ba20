#include "levimag/body.hpp"

#include <cmath>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "levimag/constants.hpp"

namespace levimag {

double Material::magnetization() const { return polarization / constants::mu0; }

void Material::validate() const {
  if (!(density > 0.0)) throw std::invalid_argument("material '" + name + "': density must be > 0");
  if (!(polarization > 0.0))
    throw std::invalid_argument("material '" + name + "': polarization must be > 0");
}

namespace materials {

Material iron() { return {"iron", 7860.0, 2.2, MaterialClass::soft}; }
Material neodymium() { return {"neodymium", 7400.0, 1.6, MaterialClass::hard}; }

Material preset(const std::string& name) {
  if (name == "iron") return iron();
  if (name == "neodymium") return neodymium();
  throw std::invalid_argument("unknown material preset '" + name + "'");
}

std::vector<Material> load(const std::filesystem::path& file) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(file.string());
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(file.string() + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  const auto list = root["materials"];
  if (!list || !list.IsSequence())
    throw std::invalid_argument(file.string() + ": expected a 'materials' list");

  std::vector<Material> out;
  for (const auto& entry : list) {
    const auto where = file.string() + ":" + std::to_string(entry.Mark().line + 1) + ": ";
    try {
      Material m;
      m.name = entry["name"].as<std::string>();
      m.density = entry["density"].as<double>();
      m.polarization = entry["polarization"].as<double>();
      const auto cls = entry["class"].as<std::string>();
      if (cls == "soft") {
        m.kind = MaterialClass::soft;
      } else if (cls == "hard") {
        m.kind = MaterialClass::hard;
      } else {
        throw std::invalid_argument("class must be 'soft' or 'hard', got '" + cls + "'");
      }
      m.validate();
      out.push_back(std::move(m));
    } catch (const YAML::Exception& e) {
      throw std::invalid_argument(where + "missing or malformed field (" + e.msg + ")");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
  return out;
}

}  // namespace materials

ProlateEllipsoid::ProlateEllipsoid(double semi_major, double semi_minor)
    : a_(semi_major), b_(semi_minor) {
  if (!(b_ > 0.0 && a_ > b_))
    throw std::invalid_argument("prolate ellipsoid requires a > b > 0");
}

Sphere::Sphere(double radius) : r_(radius) {
  if (!(r_ > 0.0)) throw std::invalid_argument("sphere radius must be > 0");
}

double volume(const Shape& shape) {
  constexpr double k = 4.0 * constants::pi / 3.0;
  if (const auto* e = std::get_if<ProlateEllipsoid>(&shape))
    return k * e->semi_major() * e->semi_minor() * e->semi_minor();
  const double r = std::get<Sphere>(shape).radius();
  return k * r * r * r;
}

double inertia_phi(const Shape& shape, double density) {
  if (!(density > 0.0)) throw std::invalid_argument("density must be > 0");
  const double mass = density * volume(shape);
  if (const auto* e = std::get_if<ProlateEllipsoid>(&shape)) {
    const double a = e->semi_major();
    const double b = e->semi_minor();
    return mass * (a * a + b * b) / 5.0;
  }
  const double r = std::get<Sphere>(shape).radius();
  return 0.4 * mass * r * r;
}

double volume_inertia_ratio(const ProlateEllipsoid& shape, double density) {
  return volume(shape) / inertia_phi(shape, density);
}

double volume_inertia_ratio_scaling(const ProlateEllipsoid& shape, double density) {
  const double v = volume(shape);
  const double r = shape.aspect_ratio();
  return std::pow(v, -2.0 / 3.0) * (5.0 / density) *
         std::pow(4.0 * constants::pi / 3.0, 2.0 / 3.0) * std::pow(r, 2.0 / 3.0) / (r * r + 1.0);
}

}  // namespace levimag
