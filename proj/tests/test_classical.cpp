#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "levimag/analysis.hpp"
#include "levimag/classical.hpp"
#include "levimag/constants.hpp"
#include "levimag/magnetostatics.hpp"
#include "oracles.hpp"

using namespace levimag;

namespace {

const MagnetBody kRod{ProlateEllipsoid(2.7e-6, 1.25e-6), materials::iron()};

double omega_at(double field) { return libration_frequency_soft(kRod.shape, kRod.material, field).omega; }

// Largest deviation from the analytic small-angle release over `periods`.
double release_error(double phi0, double gamma, int steps_per_period, int periods) {
  SimulationConfig cfg;
  cfg.field = 0.1;
  cfg.damping = gamma;
  const double w = omega_at(cfg.field);
  const double period = 2.0 * constants::pi / w;
  cfg.dt = period / steps_per_period;
  cfg.duration = periods * period;
  cfg.initial_angle = phi0;
  const auto traj = simulate(kRod, cfg);
  double err = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    err = std::max(err, std::abs(traj.angle[i] - oracle::damped_release(phi0, w, gamma, traj.time(i))));
  return err;
}

// Deviation at t = 10¼ periods, where the reference crosses zero and the
// error is the accumulated phase error alone.
double phase_error(double phi0, int steps_per_period) {
  SimulationConfig cfg;
  cfg.field = 0.1;
  const double w = omega_at(cfg.field);
  const double period = 2.0 * constants::pi / w;
  cfg.dt = period / steps_per_period;
  cfg.duration = 10.5 * period;
  cfg.initial_angle = phi0;
  const auto traj = simulate(kRod, cfg);
  const std::size_t i = static_cast<std::size_t>(41 * steps_per_period / 4);
  REQUIRE(i < traj.size());
  return std::abs(traj.angle[i] - oracle::damped_release(phi0, w, 0.0, traj.time(i)));
}

double mean_square(const std::vector<double>& x, std::size_t first) {
  double s = 0.0;
  for (std::size_t i = first; i < x.size(); ++i) s += x[i] * x[i];
  return s / static_cast<double>(x.size() - first);
}

}  // namespace

TEST_CASE("noiseless release matches the damped cosine") {
  CHECK(release_error(1e-3, 0.0, 1000, 10) < 1e-6);
  CHECK(release_error(1e-3, omega_at(0.1) / 50.0, 1000, 10) < 1e-6);
}

TEST_CASE("integrator is second order") {
  const double e1 = phase_error(1e-5, 48);
  const double e2 = phase_error(1e-5, 96);
  const double e3 = phase_error(1e-5, 192);
  CAPTURE(e1);
  CAPTURE(e2);
  CAPTURE(e3);
  CHECK(e1 / e2 >= 4.0);
  CHECK(e2 / e3 >= 4.0);
  CHECK(e1 / e2 < 4.2);
}

TEST_CASE("large amplitudes are anharmonic and conserve energy") {
  // Soft torque law: potential ½κ sin²φ, so the period grows with amplitude.
  SimulationConfig cfg;
  cfg.field = 0.1;
  const double w = omega_at(0.1);
  const double kappa = stiffness(kRod, 0.1);
  const double inertia = inertia_phi(kRod.shape, kRod.material.density);
  cfg.dt = 2.0 * constants::pi / w / 400.0;
  cfg.duration = 100.0 * 2.0 * constants::pi / w;
  cfg.initial_angle = 0.5;
  const auto traj = simulate(kRod, cfg);
  const auto energy = [&](std::size_t i) {
    const double s = std::sin(traj.angle[i]);
    return 0.5 * inertia * traj.rate[i] * traj.rate[i] + 0.5 * kappa * s * s;
  };
  const double e0 = energy(0);
  double drift = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) drift = std::max(drift, std::abs(energy(i) - e0) / e0);
  CHECK(drift < 1e-3);

  // Count zero crossings: fewer than the harmonic 200.
  int crossings = 0;
  for (std::size_t i = 1; i < traj.size(); ++i)
    if ((traj.angle[i - 1] > 0.0) != (traj.angle[i] > 0.0)) ++crossings;
  CHECK(crossings < 195);
}

TEST_CASE("equipartition for random parameter sets") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> field(0.02, 0.1);
  std::uniform_real_distribution<double> temperature(50.0, 500.0);
  std::uniform_real_distribution<double> quality(5.0, 15.0);
  for (int k = 0; k < 5; ++k) {
    SimulationConfig cfg;
    cfg.field = field(rng);
    cfg.bath_temperature = temperature(rng);
    const double w = omega_at(cfg.field);
    cfg.damping = w / quality(rng);
    const double period = 2.0 * constants::pi / w;
    cfg.dt = period / 32.0;
    cfg.duration = 20000.0 * period;
    cfg.seed = 1000 + k;
    const auto traj = simulate(kRod, cfg);
    const double kt = constants::k_boltzmann * cfg.bath_temperature;
    const std::size_t burn = traj.size() / 50;
    CAPTURE(k);
    CHECK(mean_square(traj.angle, burn) == doctest::Approx(kt / stiffness(kRod, cfg.field)).epsilon(0.05));
    CHECK(mean_square(traj.rate, burn) ==
          doctest::Approx(kt / inertia_phi(kRod.shape, kRod.material.density)).epsilon(0.05));
  }
}

TEST_CASE("seed determinism") {
  SimulationConfig cfg;
  cfg.field = 0.1;
  cfg.bath_temperature = 300.0;
  cfg.damping = omega_at(0.1) / 100.0;
  cfg.dt = 2.0 * constants::pi / omega_at(0.1) / 32.0;
  cfg.duration = 2000.0 * cfg.dt;
  cfg.seed = 5;
  const auto a = simulate(kRod, cfg);
  const auto b = simulate(kRod, cfg);
  CHECK(a.angle == b.angle);
  CHECK(a.rate == b.rate);
  cfg.seed = 6;
  CHECK(simulate(kRod, cfg).angle != a.angle);

  ReadoutModel noisy;
  noisy.noise_std = 1e-3;
  CHECK(detect(a, noisy) == detect(b, noisy));
}

TEST_CASE("output stride and rate recording") {
  SimulationConfig cfg;
  cfg.field = 0.1;
  cfg.dt = 2.0 * constants::pi / omega_at(0.1) / 40.0;
  cfg.duration = 400.0 * cfg.dt;
  cfg.initial_angle = 1e-3;
  const auto full = simulate(kRod, cfg);
  cfg.output_stride = 4;
  cfg.record_rate = false;
  const auto thin = simulate(kRod, cfg);
  CHECK(thin.rate.empty());
  CHECK(thin.dt == doctest::Approx(4.0 * full.dt));
  for (std::size_t i = 0; i < thin.size(); ++i) CHECK(thin.angle[i] == full.angle[4 * i]);
}

TEST_CASE("step guard and input validation") {
  SimulationConfig cfg;
  cfg.field = 0.1;
  cfg.duration = 1e-3;
  cfg.dt = 2.0 * constants::pi / omega_at(0.1) / 10.0;
  CHECK_THROWS_AS(simulate(kRod, cfg), std::invalid_argument);
  cfg.dt = 0.0;
  CHECK_THROWS_AS(simulate(kRod, cfg), std::invalid_argument);
  cfg.dt = 1e-8;
  cfg.damping = -1.0;
  CHECK_THROWS_AS(simulate(kRod, cfg), std::invalid_argument);
}

TEST_CASE("excitation pulse shape") {
  ExcitationSequence ex;
  ex.n_pulses = 2;
  ex.pulse_frequency = 2.0 * constants::pi * 1e3;  // 1 ms period, 0.5 ms on
  ex.transverse_field = 1e-3;
  ex.switch_time = 1e-5;
  ex.start_time = 1e-4;
  CHECK(ex.field_at(0.0) == 0.0);
  CHECK(ex.field_at(1e-4 + 5e-6) == doctest::Approx(0.5e-3));
  CHECK(ex.field_at(3e-4) == doctest::Approx(1e-3));
  CHECK(ex.field_at(1e-4 + 0.8e-3) == 0.0);
  CHECK(ex.field_at(1e-4 + 1.3e-3) == doctest::Approx(1e-3));
  CHECK(ex.end_time() == doctest::Approx(1e-4 + 2e-3).epsilon(0.01));
  CHECK(ex.field_at(ex.end_time() + 1e-4) == 0.0);
  ex.n_pulses = -1;
  CHECK_THROWS_AS(ex.validate(), std::invalid_argument);
}

TEST_CASE("resonant pulses drive harder than off-resonant ones") {
  const double w = omega_at(0.02);
  const auto amplitude_after = [&](double pulse_frequency) {
    SimulationConfig cfg;
    cfg.field = 0.02;
    cfg.damping = w / 200.0;
    ExcitationSequence ex;
    ex.pulse_frequency = pulse_frequency;
    ex.transverse_field = 1e-5;
    ex.switch_time = 0.02 * 2.0 * constants::pi / w;
    cfg.excitation = ex;
    cfg.dt = 2.0 * constants::pi / w / 64.0;
    cfg.duration = ex.end_time() + 5.0 * 2.0 * constants::pi / w;
    const auto traj = simulate(kRod, cfg);
    double peak = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i)
      if (traj.time(i) > ex.end_time()) peak = std::max(peak, std::abs(traj.angle[i]));
    return peak;
  };
  CHECK(amplitude_after(w) > 2.0 * amplitude_after(2.0 * w));
}

TEST_CASE("optical detector") {
  LibrationTrajectory traj;
  traj.dt = 1e-6;
  traj.angle = {0.0, 0.01, -0.02};
  ReadoutModel m;
  m.gain = 2.0;
  m.nonlinearity = 10.0;
  const auto s = detect(traj, m);
  CHECK(s[0] == 0.0);
  CHECK(s[1] == doctest::Approx(0.02 + 0.001));
  CHECK(s[2] == doctest::Approx(-0.04 + 0.004));
}

TEST_CASE("spin response time") {
  CHECK(spin_response_time(32e-6, 32e-6) == doctest::Approx(32e-6));
  const double t = spin_response_time(28e-6, 34e-6, 0.5);
  CHECK(t == doctest::Approx(2.0 / (1.0 / 28e-6 + 1.0 / 34e-6)).epsilon(1e-12));
  CHECK(t == doctest::Approx(30.7e-6).epsilon(0.002));
  CHECK(spin_response_time(28e-6, 34e-6, 1.0) == doctest::Approx(28e-6));
  CHECK(spin_response_time(28e-6, 34e-6, 0.0) == doctest::Approx(34e-6));
  CHECK_THROWS_AS(spin_response_time(0.0, 34e-6), std::invalid_argument);
}

TEST_CASE("spin-PL detector lags a sinusoid like a first-order filter") {
  const double f = 500.0, w = 2.0 * constants::pi * f, tau = 32e-6;
  LibrationTrajectory traj;
  traj.dt = 1e-7;
  for (int i = 0; i < 200000; ++i) traj.angle.push_back(1e-4 * std::sin(w * i * traj.dt));

  ReadoutModel plus;
  plus.kind = DetectorKind::spin_pl;
  plus.esr_sensitivity = 1e8;
  plus.response_time = tau;
  ReadoutModel minus = plus;
  minus.detuning_sign = -1;
  const auto sp = detect(traj, plus);
  const auto sm = detect(traj, minus);

  // Opposite detuning sides respond with opposite sign.
  std::vector<double> dp(sp.size()), dm(sm.size());
  const double mp = std::accumulate(sp.begin(), sp.end(), 0.0) / sp.size();
  const double mm = std::accumulate(sm.begin(), sm.end(), 0.0) / sm.size();
  double cross = 0.0, np = 0.0, nm = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    dp[i] = sp[i] - mp;
    dm[i] = sm[i] - mm;
    cross += dp[i] * dm[i];
    np += dp[i] * dp[i];
    nm += dm[i] * dm[i];
  }
  CHECK(cross / std::sqrt(np * nm) < -0.99);

  std::vector<double> response(dm.size());
  std::transform(sm.begin(), sm.end(), sp.begin(), response.begin(), [](double a, double b) { return a - b; });
  const auto lag = lag_estimate(traj.angle, response, traj.dt, 100e-6);
  CHECK(lag.lag == doctest::Approx(std::atan(w * tau) / w).epsilon(0.01));

  // The difference carries no spin-independent illumination term.
  ReadoutModel plus_lit = plus, minus_lit = minus;
  plus_lit.illumination_gain = minus_lit.illumination_gain = 0.5;
  const auto lp = detect(traj, plus_lit);
  const auto lm = detect(traj, minus_lit);
  for (std::size_t i = 0; i < lp.size(); i += 997) CHECK(lm[i] - lp[i] == doctest::Approx(response[i]).epsilon(1e-9));

  ReadoutModel bad = plus;
  bad.detuning_sign = 0;
  CHECK_THROWS_AS(detect(traj, bad), std::invalid_argument);
}
