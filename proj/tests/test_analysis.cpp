#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "levimag/analysis.hpp"
#include "levimag/classical.hpp"
#include "levimag/constants.hpp"
#include "levimag/magnetostatics.hpp"

using namespace levimag;

namespace {

constexpr double kPi = constants::pi;

std::vector<double> ringdown(double a, double gamma, double omega, double psi, double c, double dt, std::size_t n,
                             double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, noise);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    x[i] = a * std::exp(-0.5 * gamma * t) * std::cos(omega * t + psi) + c + (noise > 0.0 ? normal(rng) : 0.0);
  }
  return x;
}

double variance(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

double wrap(double x) { return std::remainder(x, 2.0 * kPi); }

}  // namespace

TEST_CASE("ring-down fit recovers synthetic parameters") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> freq(1e3, 1e5);
  std::uniform_real_distribution<double> quality(20.0, 400.0);
  std::uniform_real_distribution<double> amp(0.1, 10.0);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  for (int k = 0; k < 20; ++k) {
    const double w = 2.0 * kPi * freq(rng);
    const double q = quality(rng);
    const double a = amp(rng);
    const double psi = phase(rng);
    const double gamma = w / q;
    const double dt = 2.0 * kPi / w / 40.0;
    // About three amplitude decay times, capped at 400 periods.
    const std::size_t n = static_cast<std::size_t>(std::min(6.0 / gamma, 400.0 * 2.0 * kPi / w) / dt);
    const auto x = ringdown(a, gamma, w, psi, 0.01 * a, dt, n, 1e-3 * a, 100 + k);
    const auto fit = fit_ringdown(x, dt);
    CAPTURE(k);
    CAPTURE(q);
    CHECK(fit.omega == doctest::Approx(w).epsilon(1e-4));
    CHECK(fit.damping == doctest::Approx(gamma).epsilon(0.02));
    CHECK(fit.quality == doctest::Approx(q).epsilon(0.02));
    CHECK(fit.amplitude == doctest::Approx(a).epsilon(0.01));
    CHECK(std::abs(wrap(fit.phase - psi)) < 0.01);
    CHECK(std::isfinite(fit.residual_norm));
    CHECK(fit.omega_stderr > 0.0);
  }
}

TEST_CASE("ring-down fit edge cases") {
  const double w = 2.0 * kPi * 1e3, dt = 1e-5;
  const auto flat = ringdown(1.0, 0.0, w, 0.3, 0.0, dt, 5000, 1e-4, 1);
  const auto fit = fit_ringdown(flat, dt);
  CHECK(fit.quality_unbounded);
  CHECK(std::isinf(fit.quality));
  CHECK(fit.omega == doctest::Approx(w).epsilon(1e-5));

  const auto short_record = ringdown(1.0, 10.0, w, 0.0, 0.0, dt, 800, 0.0, 1);  // 8 periods
  CHECK_THROWS_AS(fit_ringdown(short_record, dt), std::invalid_argument);
  CHECK_THROWS_AS(fit_ringdown(flat, 0.0), std::invalid_argument);
}

TEST_CASE("psd satisfies Parseval") {
  const double dt = 1e-5;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> white(1 << 16), tone(1 << 16), mixed(1 << 16), chirp(1 << 16);
  for (std::size_t i = 0; i < white.size(); ++i) {
    const double t = dt * static_cast<double>(i);
    white[i] = normal(rng);
    tone[i] = 2.0 * std::sin(2.0 * kPi * 1234.5 * t);
    mixed[i] = 0.3 * white[i] + tone[i] + 0.5 * std::cos(2.0 * kPi * 7000.0 * t);
    chirp[i] = std::sin(2.0 * kPi * (500.0 + 5000.0 * t) * t);
  }
  for (const auto* x : {&white, &tone, &mixed, &chirp}) {
    for (int segments : {1, 4, 9}) {
      const auto s = psd(*x, dt, segments);
      CAPTURE(segments);
      CHECK(s.integrated_power() == doctest::Approx(variance(*x)).epsilon(0.02));
    }
  }
  const auto s = psd(tone, dt, 8);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < s.density.size(); ++i)
    if (s.density[i] > s.density[peak]) peak = i;
  CHECK(std::abs(s.frequency[peak] - 1234.5) <= s.resolution);
  CHECK(s.frequency.front() == 0.0);
  CHECK(s.frequency.back() == doctest::Approx(0.5 / dt).epsilon(1e-3));

  CHECK_THROWS_AS(psd(std::vector<double>(10, 1.0), dt, 8), std::invalid_argument);
  CHECK_THROWS_AS(psd(white, dt, 0), std::invalid_argument);
}

TEST_CASE("Lorentzian fit on an exact line shape") {
  Spectrum s;
  s.resolution = 1.0;
  const double w0 = 2.0 * kPi * 2000.0, width = 2.0 * kPi * 40.0, h = 5.0, offset = 0.01;
  for (int i = 0; i < 4000; ++i) {
    const double f = i * s.resolution;
    const double dw = 2.0 * kPi * f - w0;
    s.frequency.push_back(f);
    s.density.push_back(h * 0.25 * width * width / (dw * dw + 0.25 * width * width) + offset);
  }
  const auto fit = fit_lorentzian(s);
  CHECK(fit.omega0 == doctest::Approx(w0).epsilon(1e-6));
  CHECK(fit.width == doctest::Approx(width).epsilon(1e-4));
  CHECK(fit.height == doctest::Approx(h).epsilon(1e-4));
  CHECK(fit.offset == doctest::Approx(offset).epsilon(1e-3));
  CHECK(fit.quality == doctest::Approx(w0 / width).epsilon(1e-4));
  // Area in signal units² is H·Γ/4 with Γ in rad/s converted to Hz.
  CHECK(fit.area == doctest::Approx(h * kPi * (width / (2.0 * kPi)) / 2.0).epsilon(1e-3));
  CHECK_FALSE(fit.secondary_peak.has_value());

  // A second, well separated line is reported.
  for (std::size_t i = 0; i < s.density.size(); ++i) {
    const double dw = 2.0 * kPi * s.frequency[i] - 2.0 * kPi * 3500.0;
    s.density[i] += 1.0 * 0.25 * width * width / (dw * dw + 0.25 * width * width);
  }
  const auto two = fit_lorentzian(s);
  REQUIRE(two.secondary_peak.has_value());
  CHECK(*two.secondary_peak == doctest::Approx(2.0 * kPi * 3500.0).epsilon(1e-3));
}

TEST_CASE("Lorentzian fit refuses a featureless spectrum") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(1 << 15);
  for (auto& v : x) v = normal(rng);
  CHECK_THROWS_AS(fit_lorentzian(psd(x, 1e-5, 16)), std::runtime_error);
}

TEST_CASE("ring-down and Lorentzian Q agree on the same oscillator") {
  const MagnetBody rod{ProlateEllipsoid(2.7e-6, 1.25e-6), materials::iron()};
  const double field = 0.1 * 20e3 / to_hz(libration_frequency_soft(rod.shape, rod.material, 0.1).omega);
  const double w = libration_frequency_soft(rod.shape, rod.material, field).omega;
  const double q = 200.0;

  SimulationConfig ring;
  ring.field = field;
  ring.damping = w / q;
  ring.dt = 2.0 * kPi / w / 40.0;
  ring.duration = 3.0 * q / w;
  ring.initial_angle = 1e-3;
  const auto traj = simulate(rod, ring);
  const auto rfit = fit_ringdown(traj.angle, traj.dt);

  SimulationConfig bath = ring;
  bath.initial_angle = 0.0;
  bath.bath_temperature = 300.0;
  bath.duration = 4000.0 * q / w;
  bath.seed = 3;
  bath.record_rate = false;
  const auto noisy = simulate(rod, bath);
  const auto lfit = fit_lorentzian(psd(noisy.angle, noisy.dt, 16));

  CHECK(rfit.quality == doctest::Approx(q).epsilon(0.05));
  CHECK(lfit.quality == doctest::Approx(rfit.quality).epsilon(0.10));
  CHECK(lfit.omega0 == doctest::Approx(rfit.omega).epsilon(1e-3));
}

TEST_CASE("linear fit") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> y = {3.0, 5.0, 7.0, 9.0, 11.0};
  const auto exact = linear_fit(x, y);
  CHECK(exact.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(exact.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(exact.r_squared == doctest::Approx(1.0));

  // Textbook standard errors for a noisy line.
  const std::vector<double> yn = {3.1, 4.8, 7.3, 8.9, 11.2};
  const auto fit = linear_fit(x, yn);
  const double n = 5.0, sx = 15.0, sxx = 55.0;
  double sy = 0.0, sxy = 0.0;
  for (int i = 0; i < 5; ++i) {
    sy += yn[i];
    sxy += x[i] * yn[i];
  }
  const double denom = n * sxx - sx * sx;
  const double b = (n * sxy - sx * sy) / denom;
  const double a = (sy - b * sx) / n;
  double sse = 0.0;
  for (int i = 0; i < 5; ++i) sse += (yn[i] - a - b * x[i]) * (yn[i] - a - b * x[i]);
  const double s2 = sse / (n - 2.0);
  CHECK(fit.slope == doctest::Approx(b).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(a).epsilon(1e-12));
  CHECK(fit.slope_stderr == doctest::Approx(std::sqrt(n * s2 / denom)).epsilon(1e-10));
  CHECK(fit.intercept_stderr == doctest::Approx(std::sqrt(s2 * sxx / denom)).epsilon(1e-10));

  const std::vector<double> two_x = {1.0, 1.0, 2.0};
  CHECK_THROWS_AS(linear_fit(two_x, std::vector<double>{1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(linear_fit(x, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("lag estimate") {
  const double dt = 1e-6;
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(20000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = dt * static_cast<double>(i);
    a[i] = std::sin(2.0 * kPi * 700.0 * t) + 0.4 * std::sin(2.0 * kPi * 1900.0 * t + 1.0);
  }
  const auto same = lag_estimate(a, a, dt, 100e-6);
  CHECK(std::abs(same.lag) < 1e-12);
  CHECK_FALSE(same.flagged);

  for (int shift : {32, -17}) {
    std::vector<double> b(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const long j = static_cast<long>(i) - shift;
      if (j >= 0 && j < static_cast<long>(a.size())) b[i] = a[static_cast<std::size_t>(j)];
    }
    const auto est = lag_estimate(a, b, dt, 100e-6);
    CAPTURE(shift);
    CHECK(std::abs(est.lag - shift * dt) <= 0.5 * dt);
    CHECK_FALSE(est.flagged);
  }

  // Beyond the scan window the minimum sits on the boundary.
  std::vector<double> late(a.size(), 0.0);
  for (std::size_t i = 150; i < a.size(); ++i) late[i] = a[i - 150];
  const auto edge = lag_estimate(a, late, dt, 100e-6);
  CHECK(edge.flagged);

  std::vector<double> n1(a.size()), n2(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    n1[i] = normal(rng);
    n2[i] = normal(rng);
  }
  const auto none = lag_estimate(n1, n2, dt, 100e-6);
  CHECK(none.flagged);
  CHECK(none.reason != LagFlag::none);
  CHECK(none.scan_lags.size() == none.scan_msd.size());
  CHECK(none.scan_lags.size() == 201);
}
