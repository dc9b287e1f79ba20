#include "levimag/classical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "levimag/constants.hpp"
#include "levimag/magnetostatics.hpp"

namespace levimag {

void ExcitationSequence::validate() const {
  if (n_pulses < 0) throw std::invalid_argument("excitation: n_pulses must be >= 0");
  if (n_pulses > 0 && !(pulse_frequency > 0.0))
    throw std::invalid_argument("excitation: pulse frequency must be > 0");
  if (!(switch_time >= 0.0)) throw std::invalid_argument("excitation: switch time must be >= 0");
}

double ExcitationSequence::field_at(double t) const {
  if (n_pulses == 0 || t < start_time) return 0.0;
  const double period = 2.0 * constants::pi / pulse_frequency;
  const auto ramp = [this](double x) {
    if (switch_time <= 0.0) return x >= 0.0 ? 1.0 : 0.0;
    return std::clamp(x / switch_time, 0.0, 1.0);
  };
  double level = 0.0;
  for (int k = 0; k < n_pulses; ++k) {
    const double on = start_time + k * period;
    const double off = on + 0.5 * period;
    if (t < on) break;
    level += ramp(t - on) - ramp(t - off);
  }
  return level * transverse_field;
}

double ExcitationSequence::end_time() const {
  if (n_pulses == 0) return start_time;
  const double period = 2.0 * constants::pi / pulse_frequency;
  return start_time + (n_pulses - 0.5) * period + switch_time;
}

LibrationTrajectory simulate(const MagnetBody& body, const SimulationConfig& cfg) {
  body.material.validate();
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");
  if (!(cfg.duration >= 0.0)) throw std::invalid_argument("simulate: duration must be >= 0");
  if (!(cfg.damping >= 0.0)) throw std::invalid_argument("simulate: damping must be >= 0");
  if (!(cfg.bath_temperature >= 0.0)) throw std::invalid_argument("simulate: bath temperature must be >= 0");
  if (cfg.output_stride < 1) throw std::invalid_argument("simulate: output stride must be >= 1");
  if (cfg.excitation) cfg.excitation->validate();

  const bool soft = body.material.kind == MaterialClass::soft;
  const double inertia = inertia_phi(body.shape, body.material.density);
  // Per-unit-field stiffness; torque laws below reuse it.
  const double coeff = stiffness(body, 1.0);

  const double peak_field =
      std::hypot(cfg.field, cfg.excitation ? cfg.excitation->transverse_field : 0.0);
  const double omega_max =
      std::sqrt((soft ? coeff * peak_field * peak_field : coeff * peak_field) / inertia);
  if (omega_max > 0.0 && cfg.dt > 2.0 * constants::pi / (20.0 * omega_max))
    throw std::invalid_argument("simulate: dt exceeds resolution guard 2*pi/(20*omega_phi)");

  const auto torque = [&](double phi, double t) {
    double bz = cfg.field;
    double bx = cfg.excitation ? cfg.excitation->field_at(t) : 0.0;
    const double alpha = std::atan2(bx, bz);
    const double b2 = bx * bx + bz * bz;
    if (soft) return -0.5 * coeff * b2 * std::sin(2.0 * (phi - alpha));
    return -coeff * std::sqrt(b2) * std::sin(phi - alpha);
  };

  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  const auto stride = static_cast<std::size_t>(cfg.output_stride);

  LibrationTrajectory traj;
  traj.dt = cfg.dt * static_cast<double>(stride);
  traj.seed = cfg.seed;
  traj.angle.reserve(steps / stride + 1);
  if (cfg.record_rate) traj.rate.reserve(steps / stride + 1);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double h = cfg.dt;
  const double decay = std::exp(-cfg.damping * h);
  const double kick_sigma =
      std::sqrt((1.0 - decay * decay) * constants::k_boltzmann * cfg.bath_temperature / inertia);
  const bool noisy = kick_sigma > 0.0;

  double phi = cfg.initial_angle;
  double v = cfg.initial_rate;
  double acc = torque(phi, 0.0) / inertia;
  traj.angle.push_back(phi);
  if (cfg.record_rate) traj.rate.push_back(v);

  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * h;
    v += 0.5 * h * acc;
    phi += 0.5 * h * v;
    v *= decay;
    if (noisy) v += kick_sigma * normal(rng);
    phi += 0.5 * h * v;
    acc = torque(phi, t + h) / inertia;
    v += 0.5 * h * acc;
    if ((n + 1) % stride == 0) {
      traj.angle.push_back(phi);
      if (cfg.record_rate) traj.rate.push_back(v);
    }
  }
  return traj;
}

void ReadoutModel::validate() const {
  if (noise_std < 0.0) throw std::invalid_argument("readout: noise_std must be >= 0");
  if (kind == DetectorKind::spin_pl) {
    if (!(response_time > 0.0)) throw std::invalid_argument("readout: response time must be > 0");
    if (!(esr_linewidth > 0.0)) throw std::invalid_argument("readout: ESR linewidth must be > 0");
    if (detuning_sign != 1 && detuning_sign != -1)
      throw std::invalid_argument("readout: detuning sign must be +1 or -1");
  }
}

std::vector<double> detect(const LibrationTrajectory& traj, const ReadoutModel& model) {
  model.validate();
  const std::size_t n = traj.size();
  std::vector<double> out(n);

  if (model.kind == DetectorKind::direct_optical) {
    for (std::size_t i = 0; i < n; ++i) {
      const double phi = traj.angle[i];
      out[i] = model.gain * phi + model.nonlinearity * phi * phi;
    }
  } else if (n > 0) {
    const double hw = model.esr_linewidth;
    const double detuning = model.detuning_sign * hw / std::sqrt(3.0);
    const auto target = [&](double phi) {
      const double x = (detuning - model.esr_sensitivity * phi) / hw;
      return 1.0 / (1.0 + x * x);
    };
    const double tau = model.response_time;
    const double h = traj.dt;
    const double e = std::exp(-h / tau);
    const double ramp = h > 0.0 ? (tau / h) * (1.0 - e) : 0.0;

    // Exact update for a target that varies linearly between samples.
    double p = target(traj.angle[0]);
    double u_prev = p;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = target(traj.angle[i]);
      if (i > 0) p = u + (p - u_prev) * e - (u - u_prev) * ramp;
      u_prev = u;
      out[i] = model.baseline * (1.0 + model.illumination_gain * traj.angle[i]) - model.contrast * p;
    }
  }

  if (model.noise_std > 0.0) {
    std::mt19937_64 rng(traj.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, model.noise_std);
    for (auto& x : out) x += normal(rng);
  }
  return out;
}

double spin_response_time(double tau_excitation, double tau_polarization, double duty) {
  if (!(tau_excitation > 0.0) || !(tau_polarization > 0.0))
    throw std::invalid_argument("spin_response_time: time constants must be > 0");
  if (!(duty >= 0.0 && duty <= 1.0)) throw std::invalid_argument("spin_response_time: duty must lie in [0, 1]");
  return 1.0 / (duty / tau_excitation + (1.0 - duty) / tau_polarization);
}

}  // namespace levimag
