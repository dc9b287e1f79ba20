#include "levimag/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <fftw3.h>

#include "levimag/constants.hpp"

namespace levimag {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Levenberg–Marquardt with Marquardt's diagonal scaling.

struct LmResult {
  VectorXd params;
  double cost = 0.0;  // ½‖r‖²
  int iterations = 0;
  bool converged = false;
  MatrixXd jtj;
  std::size_t n_residuals = 0;
};

using ResidualFn = std::function<void(const VectorXd& p, VectorXd& r, MatrixXd& j)>;

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-10;

LmResult levenberg_marquardt(const ResidualFn& fn, VectorXd p) {
  VectorXd r;
  MatrixXd j;
  fn(p, r, j);
  double cost = 0.5 * r.squaredNorm();
  double lambda = 1e-3;

  LmResult out;
  out.n_residuals = static_cast<std::size_t>(r.size());
  for (int it = 1; it <= kMaxIterations; ++it) {
    out.iterations = it;
    const MatrixXd jtj = j.transpose() * j;
    const VectorXd g = j.transpose() * r;
    bool accepted = false;
    while (!accepted && lambda < 1e16) {
      MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      const VectorXd step = a.ldlt().solve(-g);
      const VectorXd trial = p + step;
      VectorXd rt;
      MatrixXd jt;
      fn(trial, rt, jt);
      const double ct = 0.5 * rt.squaredNorm();
      if (std::isfinite(ct) && ct <= cost) {
        const bool small_step =
            (step.cwiseAbs().array() <= kStepTolerance * (trial.cwiseAbs().array() + kStepTolerance)).all();
        const bool flat = cost - ct <= 1e-15 * cost;
        p = trial;
        r = std::move(rt);
        j = std::move(jt);
        cost = ct;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (small_step || flat || cost == 0.0) {
          out.converged = true;
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) {
      // Cannot decrease the cost any further: a local minimum at machine precision.
      out.converged = true;
    }
    if (out.converged) break;
  }
  out.params = p;
  out.cost = cost;
  out.jtj = j.transpose() * j;
  return out;
}

VectorXd standard_errors(const LmResult& lm) {
  const auto n = static_cast<double>(lm.n_residuals);
  const auto k = static_cast<double>(lm.params.size());
  const double dof = std::max(1.0, n - k);
  const double s2 = 2.0 * lm.cost / dof;
  const MatrixXd cov = lm.jtj.completeOrthogonalDecomposition().pseudoInverse() * s2;
  return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

// ---------------------------------------------------------------------------
// FFT helpers (FFTW).

std::vector<double> power_spectrum(std::span<const double> x, std::size_t n_fft) {
  std::vector<double> in(n_fft, 0.0);
  std::copy(x.begin(), x.end(), in.begin());
  const std::size_t n_out = n_fft / 2 + 1;
  auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_out));
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n_fft), in.data(), out, FFTW_ESTIMATE);
  fftw_execute(plan);
  std::vector<double> p(n_out);
  for (std::size_t k = 0; k < n_out; ++k) p[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
  fftw_destroy_plan(plan);
  fftw_free(out);
  return p;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

FitReport report_from(const VectorXd& p, const LmResult& lm, const VectorXd& se) {
  FitReport rep;
  rep.amplitude = p[0];
  rep.damping = p[1];
  rep.omega = p[2];
  rep.phase = p[3];
  rep.offset = p[4];
  if (rep.amplitude < 0.0) {
    rep.amplitude = -rep.amplitude;
    rep.phase += constants::pi;
  }
  rep.phase = std::remainder(rep.phase, 2.0 * constants::pi);
  rep.residual_norm = std::sqrt(2.0 * lm.cost);
  rep.amplitude_stderr = se[0];
  rep.damping_stderr = se[1];
  rep.omega_stderr = se[2];
  rep.phase_stderr = se[3];
  rep.iterations = lm.iterations;
  rep.quality_unbounded =
      rep.damping <= std::max(2.0 * rep.damping_stderr, 1e-9 * std::abs(rep.omega));
  rep.quality = rep.quality_unbounded ? std::numeric_limits<double>::infinity() : rep.omega / rep.damping;
  return rep;
}

}  // namespace

// ---------------------------------------------------------------------------

FitReport fit_ringdown(std::span<const double> signal, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("fit_ringdown: dt must be > 0");
  const std::size_t n = signal.size();
  if (n < 32) throw std::invalid_argument("fit_ringdown: record too short");

  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centred(n);
  std::transform(signal.begin(), signal.end(), centred.begin(), [mean](double v) { return v - mean; });

  // Frequency from the zero-padded periodogram peak, parabolic in log power.
  const std::size_t n_fft = next_pow2(n) * 4;
  const auto p = power_spectrum(centred, n_fft);
  std::size_t k = 1;
  for (std::size_t i = 2; i + 1 < p.size(); ++i)
    if (p[i] > p[k]) k = i;
  double shift = 0.0;
  if (k > 0 && k + 1 < p.size() && p[k - 1] > 0.0 && p[k + 1] > 0.0) {
    const double l = std::log(p[k - 1]), c = std::log(p[k]), r = std::log(p[k + 1]);
    const double denom = l - 2.0 * c + r;
    if (denom < 0.0) shift = 0.5 * (l - r) / denom;
  }
  const double omega0 = 2.0 * constants::pi * (static_cast<double>(k) + shift) / (static_cast<double>(n_fft) * dt);
  const double duration = dt * static_cast<double>(n - 1);
  if (omega0 * duration / (2.0 * constants::pi) < 10.0)
    throw std::invalid_argument("fit_ringdown: fewer than 10 oscillation periods in the record");

  // Damping from the slope of log(max |x|) per period.
  const auto per_period = std::max<std::size_t>(2, static_cast<std::size_t>(2.0 * constants::pi / (omega0 * dt)));
  std::vector<double> tt, ll;
  for (std::size_t start = 0; start + per_period <= n; start += per_period) {
    double peak = 0.0;
    std::size_t where = start;
    for (std::size_t i = start; i < start + per_period; ++i)
      if (std::abs(centred[i]) > peak) {
        peak = std::abs(centred[i]);
        where = i;
      }
    if (peak > 0.0) {
      tt.push_back(dt * static_cast<double>(where));
      ll.push_back(std::log(peak));
    }
  }
  double gamma0 = 0.0;
  double log_amp = std::log(std::max(1e-300, *std::max_element(ll.begin(), ll.end())));
  if (tt.size() >= 3) {
    const auto fit = linear_fit(tt, ll);
    gamma0 = std::max(0.0, -2.0 * fit.slope);
    log_amp = fit.intercept;
  }

  // Amplitude and phase by linear least squares at fixed (ω₀, Γ₀).
  MatrixXd basis(n, 3);
  VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    const double env = std::exp(-0.5 * gamma0 * t);
    basis(i, 0) = env * std::cos(omega0 * t);
    basis(i, 1) = env * std::sin(omega0 * t);
    basis(i, 2) = 1.0;
    y[i] = signal[i];
  }
  const VectorXd c = basis.colPivHouseholderQr().solve(y);
  double amp0 = std::hypot(c[0], c[1]);
  if (!(amp0 > 0.0)) amp0 = std::exp(log_amp);
  const double psi0 = std::atan2(-c[1], c[0]);

  const ResidualFn residual = [&](const VectorXd& q, VectorXd& r, MatrixXd& j) {
    r.resize(static_cast<Eigen::Index>(n));
    j.resize(static_cast<Eigen::Index>(n), 5);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = dt * static_cast<double>(i);
      const double env = std::exp(-0.5 * q[1] * t);
      const double arg = q[2] * t + q[3];
      const double cs = std::cos(arg), sn = std::sin(arg);
      const auto ii = static_cast<Eigen::Index>(i);
      r[ii] = q[0] * env * cs + q[4] - signal[i];
      j(ii, 0) = env * cs;
      j(ii, 1) = -0.5 * t * q[0] * env * cs;
      j(ii, 2) = -q[0] * env * sn * t;
      j(ii, 3) = -q[0] * env * sn;
      j(ii, 4) = 1.0;
    }
  };

  VectorXd start(5);
  start << amp0, gamma0, omega0, psi0, c[2];
  const auto lm = levenberg_marquardt(residual, start);
  const auto rep = report_from(lm.params, lm, standard_errors(lm));
  if (!lm.converged)
    throw FitError("fit_ringdown: no convergence within " + std::to_string(kMaxIterations) + " iterations", rep);
  return rep;
}

// ---------------------------------------------------------------------------

double Spectrum::integrated_power() const {
  return std::accumulate(density.begin(), density.end(), 0.0) * resolution;
}

Spectrum psd(std::span<const double> signal, double dt, int n_segments) {
  if (!(dt > 0.0)) throw std::invalid_argument("psd: dt must be > 0");
  if (n_segments < 1) throw std::invalid_argument("psd: n_segments must be >= 1");
  const std::size_t n = signal.size();
  const auto k = static_cast<std::size_t>(n_segments);
  if (n < 2 * k) throw std::invalid_argument("psd: record too short for the requested segments");

  const std::size_t len = k == 1 ? n : (2 * n) / (k + 1);
  const std::size_t hop = k == 1 ? 0 : len / 2;
  if (len < 4) throw std::invalid_argument("psd: segments shorter than 4 samples");

  std::vector<double> window(len);
  double wsum2 = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * constants::pi * static_cast<double>(i) / static_cast<double>(len));
    wsum2 += window[i] * window[i];
  }

  const double fs = 1.0 / dt;
  const std::size_t n_out = len / 2 + 1;
  Spectrum s;
  s.resolution = fs / static_cast<double>(len);
  s.frequency.resize(n_out);
  s.density.assign(n_out, 0.0);
  for (std::size_t i = 0; i < n_out; ++i) s.frequency[i] = s.resolution * static_cast<double>(i);

  std::vector<double> seg(len);
  for (std::size_t m = 0; m < k; ++m) {
    const auto first = signal.begin() + static_cast<std::ptrdiff_t>(m * hop);
    const double mean = std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) / static_cast<double>(len);
    for (std::size_t i = 0; i < len; ++i) seg[i] = (first[static_cast<std::ptrdiff_t>(i)] - mean) * window[i];
    const auto p = power_spectrum(seg, len);
    for (std::size_t i = 0; i < n_out; ++i) {
      const bool edge = i == 0 || (len % 2 == 0 && i == n_out - 1);
      s.density[i] += (edge ? 1.0 : 2.0) * p[i] / (fs * wsum2);
    }
  }
  for (auto& d : s.density) d /= static_cast<double>(k);
  return s;
}

// ---------------------------------------------------------------------------

LorentzianFit fit_lorentzian(const Spectrum& spectrum) {
  const auto& f = spectrum.frequency;
  const auto& d = spectrum.density;
  if (f.size() != d.size() || f.size() < 8) throw std::invalid_argument("fit_lorentzian: spectrum too short");

  std::size_t peak = 1;
  for (std::size_t i = 1; i < d.size(); ++i)
    if (d[i] > d[peak]) peak = i;
  const double floor = median(std::vector<double>(d.begin() + 1, d.end()));
  if (!(floor > 0.0) || d[peak] < 3.0 * floor)
    throw std::runtime_error("fit_lorentzian: no resolvable peak (SNR < 3)");

  const double half = floor + 0.5 * (d[peak] - floor);
  std::size_t lo = peak, hi = peak;
  while (lo > 1 && d[lo - 1] > half) --lo;
  while (hi + 1 < d.size() && d[hi + 1] > half) ++hi;
  const double df = spectrum.resolution;
  const double width0 = 2.0 * constants::pi * std::max(df, (static_cast<double>(hi - lo) + 1.0) * df);

  // Window of ±25 initial widths around the peak, at least ±8 bins.
  const auto half_bins = static_cast<std::size_t>(
      std::max(8.0, 25.0 * width0 / (2.0 * constants::pi * df)));
  const std::size_t w_lo = peak > half_bins ? peak - half_bins : 1;
  const std::size_t w_hi = std::min(d.size() - 1, peak + half_bins);
  const std::size_t m = w_hi - w_lo + 1;

  const double scale = d[peak];
  const ResidualFn residual = [&](const VectorXd& q, VectorXd& r, MatrixXd& j) {
    r.resize(static_cast<Eigen::Index>(m));
    j.resize(static_cast<Eigen::Index>(m), 4);
    const double g = 0.5 * q[2];
    for (std::size_t i = 0; i < m; ++i) {
      const double x = 2.0 * constants::pi * f[w_lo + i];
      const double u = x - q[1];
      const double den = u * u + g * g;
      const double shape = g * g / den;
      const auto ii = static_cast<Eigen::Index>(i);
      r[ii] = q[0] * shape + q[3] - d[w_lo + i] / scale;
      j(ii, 0) = shape;
      j(ii, 1) = q[0] * g * g * 2.0 * u / (den * den);
      j(ii, 2) = q[0] * (g / den - g * g * g / (den * den));
      j(ii, 3) = 1.0;
    }
  };

  VectorXd start(4);
  start << (d[peak] - floor) / scale, 2.0 * constants::pi * f[peak], width0, floor / scale;
  const auto lm = levenberg_marquardt(residual, start);
  if (!lm.converged) throw std::runtime_error("fit_lorentzian: no convergence");
  const VectorXd se = standard_errors(lm);

  LorentzianFit out;
  out.height = lm.params[0] * scale;
  out.omega0 = lm.params[1];
  out.width = std::abs(lm.params[2]);
  out.offset = lm.params[3] * scale;
  out.area = out.height * constants::pi * out.width / 2.0 / (2.0 * constants::pi);
  out.quality = out.omega0 / out.width;
  out.omega0_stderr = se[1];
  out.width_stderr = se[2];

  const auto model = [&](double x) {
    const double g = 0.5 * out.width;
    return out.height * g * g / ((x - out.omega0) * (x - out.omega0) + g * g) + std::max(out.offset, 0.0);
  };
  // A slightly negative fitted offset must not turn tail noise into peaks.
  double best_ratio = 5.0;
  for (std::size_t i = 1; i + 1 < d.size(); ++i) {
    if (i >= w_lo && i <= w_hi) continue;
    if (d[i] < d[i - 1] || d[i] < d[i + 1] || d[i] < 3.0 * floor) continue;
    const double ratio = d[i] / std::max(model(2.0 * constants::pi * f[i]), floor);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      out.secondary_peak = 2.0 * constants::pi * f[i];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("linear_fit: need at least 3 points");
  std::vector<double> distinct(x.begin(), x.end());
  std::sort(distinct.begin(), distinct.end());
  if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() < 3)
    throw std::invalid_argument("linear_fit: degenerate x (fewer than 3 distinct values)");

  const double nn = static_cast<double>(n);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / nn;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / nn;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (out.intercept + out.slope * x[i]);
    sse += e * e;
  }
  out.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  const double s2 = sse / (nn - 2.0);
  out.slope_stderr = std::sqrt(s2 / sxx);
  out.intercept_stderr = std::sqrt(s2 * (1.0 / nn + mx * mx / sxx));
  return out;
}

// ---------------------------------------------------------------------------

LagEstimate lag_estimate(std::span<const double> a, std::span<const double> b, double dt, double max_lag) {
  if (a.size() != b.size()) throw std::invalid_argument("lag_estimate: signals differ in length");
  if (!(dt > 0.0) || !(max_lag >= 0.0)) throw std::invalid_argument("lag_estimate: dt must be > 0, max_lag >= 0");
  const auto n = static_cast<long>(a.size());
  const long k_max = std::lround(max_lag / dt);
  if (2 * k_max + 4 > n) throw std::invalid_argument("lag_estimate: max_lag too long for the record");

  const auto msd_at = [&](long k) {
    // Overlap of a[i] with b[i + k].
    const long i0 = std::max(0L, -k);
    const long i1 = std::min(n, n - k);
    const auto cnt = static_cast<double>(i1 - i0);
    double ma = 0.0, mb = 0.0;
    for (long i = i0; i < i1; ++i) {
      ma += a[static_cast<std::size_t>(i)];
      mb += b[static_cast<std::size_t>(i + k)];
    }
    ma /= cnt;
    mb /= cnt;
    double va = 0.0, vb = 0.0;
    for (long i = i0; i < i1; ++i) {
      const double da = a[static_cast<std::size_t>(i)] - ma;
      const double db = b[static_cast<std::size_t>(i + k)] - mb;
      va += da * da;
      vb += db * db;
    }
    const double sa = va > 0.0 ? std::sqrt(va / cnt) : 1.0;
    const double sb = vb > 0.0 ? std::sqrt(vb / cnt) : 1.0;
    double acc = 0.0;
    for (long i = i0; i < i1; ++i) {
      const double e = (a[static_cast<std::size_t>(i)] - ma) / sa - (b[static_cast<std::size_t>(i + k)] - mb) / sb;
      acc += e * e;
    }
    return acc / cnt;
  };

  LagEstimate out;
  long best = 0;
  double best_msd = std::numeric_limits<double>::infinity();
  for (long k = -k_max; k <= k_max; ++k) {
    const double v = msd_at(k);
    out.scan_lags.push_back(static_cast<double>(k) * dt);
    out.scan_msd.push_back(v);
    if (v < best_msd) {
      best_msd = v;
      best = k;
    }
  }
  out.min_msd = best_msd;

  double refined = static_cast<double>(best);
  if (best == -k_max || best == k_max) {
    out.flagged = true;
    out.reason = LagFlag::boundary;
  } else {
    const auto idx = static_cast<std::size_t>(best + k_max);
    const double l = out.scan_msd[idx - 1], c = out.scan_msd[idx], r = out.scan_msd[idx + 1];
    const double denom = l - 2.0 * c + r;
    if (denom > 0.0) refined += 0.5 * (l - r) / denom;
  }
  if (!out.flagged && out.scan_msd.size() >= 3 && best_msd > 0.5 * median(out.scan_msd)) {
    out.flagged = true;
    out.reason = LagFlag::unstructured;
  }
  out.lag = refined * dt;
  return out;
}

}  // namespace levimag
