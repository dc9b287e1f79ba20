#pragma once

namespace levimag {

struct GasConditions {
  double pressure = 0.1;                 // Pa
  double temperature = 293.0;            // K
  double molar_mass = 0.02897;           // kg/mol (air)
  double accommodation = 1.1;            // σ_eff
  double molecular_diameter = 3.7e-10;   // m, hard-sphere diameter of air

  void validate() const;
};

/// Kinetic-theory mean speed √(8RT/(πM)).
double mean_molecular_speed(double temperature, double molar_mass);

struct KnudsenCheck {
  bool knudsen;
  double mean_free_path;  // m
};

/// Hard-sphere mean free path k_B T/(√2 π d² P) compared with the radius.
KnudsenCheck knudsen_check(double radius, const GasConditions& gas);

/// Free-molecular damping estimate σ_eff·10π/(Rρ)·P/c̄ (1/s). The formula is a
/// translational-drag estimate reused for libration; `knudsen` is false when
/// the input is outside the regime where it applies.
struct DampingEstimate {
  double rate;
  bool knudsen;
  double mean_free_path;
};

DampingEstimate gas_damping(double radius, double density, const GasConditions& gas);

/// Bose–Einstein occupation 1/(exp(ħω/k_BT) − 1); zero at T = 0.
double thermal_occupation(double omega, double temperature);

}  // namespace levimag
