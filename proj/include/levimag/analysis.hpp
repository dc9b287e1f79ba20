#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace levimag {

/// Damped-oscillation fit result. Q = ω/Γ; `quality_unbounded` marks a
/// damping estimate indistinguishable from zero (Q reported as +inf).
struct FitReport {
  double omega = 0.0;      // rad/s
  double damping = 0.0;    // energy decay rate Γ, 1/s
  double quality = 0.0;
  bool quality_unbounded = false;
  double amplitude = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  double residual_norm = 0.0;
  double omega_stderr = 0.0;
  double damping_stderr = 0.0;
  double amplitude_stderr = 0.0;
  double phase_stderr = 0.0;
  int iterations = 0;
};

/// Non-convergence within the iteration budget; carries the best parameters seen.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, FitReport best) : std::runtime_error(what), best_(best) {}
  const FitReport& best() const { return best_; }

 private:
  FitReport best_;
};

/// Least squares of A·exp(−Γt/2)·cos(ωt + ψ) + C, started from the
/// periodogram peak and the log-envelope slope. Needs ≥ 10 periods.
FitReport fit_ringdown(std::span<const double> signal, double dt);

struct Spectrum {
  std::vector<double> frequency;  // Hz
  std::vector<double> density;    // one-sided, signal units² per Hz
  double resolution = 0.0;        // Hz

  /// Σ density·Δf: the signal variance by Parseval.
  double integrated_power() const;
};

/// Welch estimate: `n_segments` Hann-windowed segments with 50 % overlap,
/// each with its mean removed, normalized so the integral over frequency is
/// the variance. Throws std::invalid_argument if the record is too short.
Spectrum psd(std::span<const double> signal, double dt, int n_segments);

struct LorentzianFit {
  double omega0 = 0.0;     // rad/s
  double width = 0.0;      // FWHM Γ, rad/s
  double height = 0.0;     // peak density above offset
  double offset = 0.0;
  double area = 0.0;       // ∫ peak df, i.e. variance carried by the peak
  double quality = 0.0;    // ω₀/Γ
  double omega0_stderr = 0.0;
  double width_stderr = 0.0;
  /// Strongest local maximum outside the fit window exceeding 5× the fitted
  /// line (or the floor, whichever is larger).
  std::optional<double> secondary_peak;  // rad/s
};

/// Fits H·(Γ/2)²/((ω−ω₀)²+(Γ/2)²) + offset about the dominant peak, in
/// angular frequency. Throws std::runtime_error when the peak does not clear
/// 3× the median spectral floor.
LorentzianFit fit_lorentzian(const Spectrum& spectrum);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
};

/// Ordinary least squares. Needs at least three distinct x values.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

enum class LagFlag { none, boundary, unstructured };

struct LagEstimate {
  double lag = 0.0;  // s; positive when `b` trails `a`
  double min_msd = 0.0;
  bool flagged = false;
  LagFlag reason = LagFlag::none;
  std::vector<double> scan_lags;  // s
  std::vector<double> scan_msd;
};

/// Scans integer-sample delays in [−max_lag, max_lag], comparing the
/// standardized overlap of a(t) and b(t + lag) by mean squared difference,
/// and refines the minimum with a parabola through its neighbours. Signal
/// polarity is the caller's responsibility.
LagEstimate lag_estimate(std::span<const double> a, std::span<const double> b, double dt, double max_lag);

}  // namespace levimag
