#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "levimag/body.hpp"

namespace levimag {

/// Transverse coil field switched ON/OFF `n_pulses` times with a 50 % duty
/// cycle at `pulse_frequency`, linear ramps of `switch_time` at each edge.
struct ExcitationSequence {
  int n_pulses = 3;
  double pulse_frequency = 0.0;  // rad/s
  double transverse_field = 0.0; // T
  double switch_time = 2e-6;     // s
  double start_time = 0.0;       // s

  void validate() const;
  /// Coil field at time t (tesla).
  double field_at(double t) const;
  double end_time() const;
};

struct SimulationConfig {
  double field = 0.1;              // static confining field, T
  double damping = 0.0;            // energy damping rate Γ, 1/s
  double bath_temperature = 0.0;   // K; 0 disables thermal torque noise
  std::optional<ExcitationSequence> excitation;
  double duration = 0.0;           // s
  double dt = 0.0;                 // integration step, s
  int output_stride = 1;           // record every n-th step
  bool record_rate = true;         // false leaves `rate` empty
  double initial_angle = 0.0;      // rad
  double initial_rate = 0.0;       // rad/s
  std::uint64_t seed = 0;
};

/// Uniformly sampled angle and angular velocity.
struct LibrationTrajectory {
  double dt = 0.0;
  std::vector<double> angle;
  std::vector<double> rate;
  std::uint64_t seed = 0;

  std::size_t size() const { return angle.size(); }
  double time(std::size_t i) const { return dt * static_cast<double>(i); }
};

/// Integrates I φ̈ = −T(φ − α(t), |B(t)|) − IΓφ̇ + ξ(t) with the full
/// nonlinear torque law of the body's material class, α and |B| from the
/// static field plus the transverse coil field. ξ has one-sided PSD
/// 4k_B T I Γ. Stepping is BAOAB (half kick, half drift, exact
/// Ornstein–Uhlenbeck velocity update, half drift, half kick).
/// Throws std::invalid_argument when dt > 2π/(20 ω_φ).
LibrationTrajectory simulate(const MagnetBody& body, const SimulationConfig& config);

enum class DetectorKind { direct_optical, spin_pl };

struct ReadoutModel {
  DetectorKind kind = DetectorKind::direct_optical;
  double gain = 1.0;
  double nonlinearity = 0.0;  // quadratic term, stands in for speckle non-linearity
  double noise_std = 0.0;     // additive white detector noise

  // spin_pl
  int detuning_sign = +1;
  double esr_sensitivity = 1e6;  // ESR shift per radian, Hz/rad
  double esr_linewidth = 5e6;    // Lorentzian half width, Hz
  double response_time = 32e-6;  // first-order spin population lag, s
  double contrast = 0.1;
  double baseline = 1.0;
  double illumination_gain = 0.0;  // spin-independent PL modulation per radian

  void validate() const;
};

/// Detector signal sampled on the trajectory time base.
///
/// direct_optical: gain·φ + nonlinearity·φ².
/// spin_pl: baseline·(1 + illumination_gain·φ) − contrast·p(t), where p relaxes
/// towards a Lorentzian of the microwave detuning (parked at the max-slope
/// point on the side set by detuning_sign) with time constant response_time.
/// Detector noise draws from a stream derived from the trajectory seed.
std::vector<double> detect(const LibrationTrajectory& trajectory, const ReadoutModel& model);

/// Effective first-order constant of the spin population when excitation
/// (τ_exc) and optical polarization (τ_pol) act a fraction `duty` and
/// 1 − duty of the time: the duty-weighted harmonic mean.
double spin_response_time(double tau_excitation, double tau_polarization, double duty = 0.5);

}  // namespace levimag
