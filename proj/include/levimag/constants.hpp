#pragma once

#include <numbers>

namespace levimag {

// SI throughout. Angles in radians, frequencies angular unless a name says _hz.
namespace constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double mu0 = 1.25663706212e-6;         // T·m/A
inline constexpr double hbar = 1.054571817e-34;          // J·s
inline constexpr double k_boltzmann = 1.380649e-23;      // J/K
inline constexpr double gas_constant = 8.314462618;      // J/(mol·K)
inline constexpr double gamma_nv = 1.76086e11;           // rad·s⁻¹·T⁻¹ (28.025 GHz/T)
inline constexpr double zero_field_splitting_hz = 2.87e9;

}  // namespace constants

constexpr double to_hz(double angular) { return angular / (2.0 * constants::pi); }
constexpr double to_angular(double hz) { return hz * 2.0 * constants::pi; }

}  // namespace levimag
