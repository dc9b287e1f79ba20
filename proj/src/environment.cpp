#include "levimag/environment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "levimag/constants.hpp"

namespace levimag {

void GasConditions::validate() const {
  if (!(pressure >= 0.0)) throw std::invalid_argument("gas: pressure must be >= 0");
  if (!(temperature > 0.0)) throw std::invalid_argument("gas: temperature must be > 0");
  if (!(molar_mass > 0.0)) throw std::invalid_argument("gas: molar mass must be > 0");
  if (!(accommodation > 0.0)) throw std::invalid_argument("gas: accommodation must be > 0");
  if (!(molecular_diameter > 0.0)) throw std::invalid_argument("gas: molecular diameter must be > 0");
}

double mean_molecular_speed(double temperature, double molar_mass) {
  if (!(temperature > 0.0) || !(molar_mass > 0.0))
    throw std::invalid_argument("mean_molecular_speed: temperature and molar mass must be > 0");
  return std::sqrt(8.0 * constants::gas_constant * temperature / (constants::pi * molar_mass));
}

KnudsenCheck knudsen_check(double radius, const GasConditions& gas) {
  gas.validate();
  if (!(radius >= 0.0)) throw std::invalid_argument("knudsen_check: radius must be >= 0");
  const double d = gas.molecular_diameter;
  const double mfp =
      gas.pressure > 0.0
          ? constants::k_boltzmann * gas.temperature / (std::sqrt(2.0) * constants::pi * d * d * gas.pressure)
          : std::numeric_limits<double>::infinity();
  return {mfp > radius, mfp};
}

DampingEstimate gas_damping(double radius, double density, const GasConditions& gas) {
  if (!(radius > 0.0) || !(density > 0.0))
    throw std::invalid_argument("gas_damping: radius and density must be > 0");
  const auto regime = knudsen_check(radius, gas);
  const double cbar = mean_molecular_speed(gas.temperature, gas.molar_mass);
  const double rate = gas.accommodation * (10.0 * constants::pi / (radius * density)) * (gas.pressure / cbar);
  return {rate, regime.knudsen, regime.mean_free_path};
}

double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) throw std::invalid_argument("thermal_occupation: omega must be > 0");
  if (temperature < 0.0) throw std::invalid_argument("thermal_occupation: temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(constants::hbar * omega / (constants::k_boltzmann * temperature));
}

}  // namespace levimag
