#include "levimag/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levimag/constants.hpp"

namespace levimag {

namespace {

using Eigen::Matrix2cd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

constexpr Complex kI{0.0, 1.0};
constexpr double kTraceTol = 1e-9;
constexpr double kHermitianTol = 1e-12;
constexpr double kPositivityTol = 1e-9;
constexpr double kGuard = 0.1;
constexpr double kAutoStep = 0.02;

// Columns are |+⟩ and |−⟩ in the computational basis.
Matrix2cd dressed_basis() {
  Matrix2cd w;
  const double s = 1.0 / std::sqrt(2.0);
  w << s, s, -kI * s, kI * s;
  return w;
}

// (A ⊗ 1) ρ (A ⊗ 1)† on 2×2 spin blocks.
MatrixXcd spin_transform(const MatrixXcd& rho, const Matrix2cd& a, int cutoff) {
  const Eigen::Index m = cutoff + 1;
  MatrixXcd out = MatrixXcd::Zero(rho.rows(), rho.cols());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const Complex c = a(i, k) * std::conj(a(j, l));
          if (c == Complex{}) continue;
          out.block(i * m, j * m, m, m) += c * rho.block(k * m, l * m, m, m);
        }
  return out;
}

struct Entry {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
  double freq;  // E_row − E_col, rotating frequency in the interaction picture
};

// Sparse operator in the dressed product basis.
struct Operator {
  std::vector<Entry> entries;

  double row_sum_norm(Eigen::Index dim) const {
    std::vector<double> sums(static_cast<std::size_t>(dim), 0.0);
    for (const auto& e : entries) sums[static_cast<std::size_t>(e.row)] += std::abs(e.value);
    return sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
  }
  double max_freq() const {
    double w = 0.0;
    for (const auto& e : entries) w = std::max(w, std::abs(e.freq));
    return w;
  }
};

Operator from_dense(const MatrixXcd& m, const VectorXd& energy) {
  Operator op;
  const double scale = m.cwiseAbs().maxCoeff();
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (std::abs(m(r, c)) > 1e-14 * scale) op.entries.push_back({r, c, m(r, c), energy[r] - energy[c]});
  return op;
}

MatrixXcd to_dense(const Operator& op, Eigen::Index dim) {
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (const auto& e : op.entries) m(e.row, e.col) += e.value;
  return m;
}

// Spin operator (computational basis) ⊗ phonon operator, expressed in the dressed basis.
MatrixXcd product_operator(const Matrix2cd& spin, const MatrixXcd& phonon) {
  const Matrix2cd w = dressed_basis();
  const Matrix2cd sd = w.adjoint() * spin * w;
  const Eigen::Index m = phonon.rows();
  MatrixXcd out = MatrixXcd::Zero(2 * m, 2 * m);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block(i * m, j * m, m, m) = sd(i, j) * phonon;
  return out;
}

MatrixXcd annihilation(int cutoff) {
  MatrixXcd a = MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Operator coupling_operator(const Hamiltonian& h) {
  const Eigen::Index m = h.cutoff + 1;
  const VectorXd e = h.diagonal();
  Operator op;
  const auto add = [&](Eigen::Index r, Eigen::Index c, double v) {
    op.entries.push_back({r, c, v, e[r] - e[c]});
    op.entries.push_back({c, r, v, e[c] - e[r]});
  };
  if (h.lambda == 0.0) return op;
  for (int n = 0; n < h.cutoff; ++n) {
    const double g = 0.5 * h.lambda * std::sqrt(n + 1.0);
    add(n, m + n + 1, g);  // |+,n⟩⟨−,n+1|: σ̃₊a
    if (!h.rwa) add(n + 1, m + n, g);  // |+,n+1⟩⟨−,n|: σ̃₊a†
  }
  return op;
}

struct Channel {
  Operator c;
  Operator cdc;
};

std::vector<Channel> channels(const DecoherenceParams& d, int cutoff, const VectorXd& energy) {
  const MatrixXcd id = MatrixXcd::Identity(cutoff + 1, cutoff + 1);
  const MatrixXcd a = annihilation(cutoff);
  std::vector<MatrixXcd> ops;
  if (std::isfinite(d.t2_star)) {
    Matrix2cd sz;
    sz << 0.5, 0.0, 0.0, -0.5;
    ops.push_back(std::sqrt(2.0 / d.t2_star) * product_operator(sz, id));
  }
  if (std::isfinite(d.t1)) {
    Matrix2cd sm;
    sm << 0.0, 1.0, 0.0, 0.0;
    ops.push_back(std::sqrt(1.0 / d.t1) * product_operator(sm, id));
  }
  const Matrix2cd one = Matrix2cd::Identity();
  if (d.gas_damping > 0.0) {
    ops.push_back(std::sqrt(d.gas_damping * (d.thermal_occupation + 1.0)) * product_operator(one, a));
    if (d.thermal_occupation > 0.0)
      ops.push_back(std::sqrt(d.gas_damping * d.thermal_occupation) * product_operator(one, a.adjoint()));
  }
  std::vector<Channel> out;
  for (const auto& c : ops) out.push_back({from_dense(c, energy), from_dense(c.adjoint() * c, energy)});
  return out;
}

// Entry values at time t in the interaction picture.
std::vector<Complex> at_time(const Operator& op, double t) {
  std::vector<Complex> v(op.entries.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& e = op.entries[i];
    v[i] = e.freq == 0.0 ? e.value : e.value * std::exp(kI * (e.freq * t));
  }
  return v;
}

struct Generator {
  Operator coupling;
  std::vector<Channel> channels;

  // dρ/dt in the interaction picture.
  MatrixXcd apply(const MatrixXcd& rho, double t) const {
    MatrixXcd out = MatrixXcd::Zero(rho.rows(), rho.cols());
    {
      const auto v = at_time(coupling, t);
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& e = coupling.entries[i];
        out.row(e.row) += (-kI * v[i]) * rho.row(e.col);
        out.col(e.col) += (kI * v[i]) * rho.col(e.row);
      }
    }
    MatrixXcd m(rho.rows(), rho.cols());
    for (const auto& ch : channels) {
      const auto cv = at_time(ch.c, t);
      m.setZero();
      for (std::size_t i = 0; i < cv.size(); ++i) m.row(ch.c.entries[i].row) += cv[i] * rho.row(ch.c.entries[i].col);
      // (c ρ) c†
      for (std::size_t i = 0; i < cv.size(); ++i)
        out.col(ch.c.entries[i].row) += std::conj(cv[i]) * m.col(ch.c.entries[i].col);
      const auto nv = at_time(ch.cdc, t);
      for (std::size_t i = 0; i < nv.size(); ++i) {
        const auto& e = ch.cdc.entries[i];
        out.row(e.row) -= 0.5 * nv[i] * rho.row(e.col);
        out.col(e.col) -= 0.5 * nv[i] * rho.col(e.row);
      }
    }
    return out;
  }

  double norm_bound(Eigen::Index dim) const {
    double s = 2.0 * coupling.row_sum_norm(dim);
    double w = coupling.max_freq();
    for (const auto& ch : channels) {
      s += 2.0 * ch.cdc.row_sum_norm(dim);
      w = std::max({w, ch.c.max_freq(), ch.cdc.max_freq()});
    }
    return s + w;
  }
};

void check_invariants(const MatrixXcd& rho, const std::string& where) {
  const double tr_err = std::abs(rho.trace() - Complex{1.0, 0.0});
  if (!(tr_err < kTraceTol)) {
    std::ostringstream os;
    os << where << ": trace invariant breached (|tr rho - 1| = " << tr_err << ")";
    throw InvariantError(os.str());
  }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm < kHermitianTol)) {
    std::ostringstream os;
    os << where << ": Hermiticity invariant breached (max |rho - rho^dagger| = " << herm << ")";
    throw InvariantError(os.str());
  }
  // ρ + tol·1 is positive definite iff the smallest eigenvalue exceeds −tol.
  MatrixXcd shifted = 0.5 * (rho + rho.adjoint());
  shifted.diagonal().array() += kPositivityTol;
  if (shifted.llt().info() != Eigen::Success) {
    const double min_eig = Eigen::SelfAdjointEigenSolver<MatrixXcd>(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
    if (min_eig < -kPositivityTol) {
      std::ostringstream os;
      os << where << ": positivity invariant breached (min eigenvalue = " << min_eig << ")";
      throw InvariantError(os.str());
    }
  }
}

double dressed_excitations(const MatrixXcd& rho_dressed, int cutoff) {
  const int m = cutoff + 1;
  double x = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int n = 0; n < m; ++n) x += rho_dressed(s * m + n, s * m + n).real() * ((s == 0 ? 1.0 : 0.0) + n);
  return x;
}

HybridState evolve_impl(const HybridState& state, const Hamiltonian& h, const DecoherenceParams& decoherence,
                        double duration, double dt, EvolutionTrace* trace) {
  if (state.cutoff != h.cutoff) throw std::invalid_argument("evolve: state and Hamiltonian cutoffs differ");
  if (!(duration >= 0.0)) throw std::invalid_argument("evolve: duration must be >= 0");
  decoherence.validate();

  const Eigen::Index dim = state.dimension();
  const VectorXd energy = h.diagonal();
  const Generator gen{coupling_operator(h), channels(decoherence, h.cutoff, energy)};
  const double scale = gen.norm_bound(dim);

  if (dt > 0.0 && scale * dt >= kGuard) {
    std::ostringstream os;
    os << "evolve: step " << dt << " s violates the stability guard (||L|| dt = " << scale * dt << " >= " << kGuard
       << ")";
    throw std::invalid_argument(os.str());
  }
  const double step = dt > 0.0 ? dt : (scale > 0.0 ? kAutoStep / scale : duration);
  const auto n_steps =
      duration > 0.0 ? std::max<long>(1, static_cast<long>(std::ceil(duration / step - 1e-9))) : 0L;
  const double hstep = n_steps > 0 ? duration / static_cast<double>(n_steps) : 0.0;

  const Matrix2cd w = dressed_basis();
  MatrixXcd rho = spin_transform(state.rho, w.adjoint(), state.cutoff);

  if (trace) {
    trace->times.push_back(0.0);
    trace->excitation_number.push_back(dressed_excitations(rho, state.cutoff));
    trace->purity.push_back((rho * rho).trace().real());
  }

  for (long i = 0; i < n_steps; ++i) {
    const double t = hstep * static_cast<double>(i);
    const MatrixXcd k1 = gen.apply(rho, t);
    const MatrixXcd k2 = gen.apply(rho + 0.5 * hstep * k1, t + 0.5 * hstep);
    const MatrixXcd k3 = gen.apply(rho + 0.5 * hstep * k2, t + 0.5 * hstep);
    const MatrixXcd k4 = gen.apply(rho + hstep * k3, t + hstep);
    rho += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_invariants(rho, "evolve (step " + std::to_string(i + 1) + ")");
    rho = 0.5 * (rho + rho.adjoint()).eval();
    if (trace) {
      trace->times.push_back(t + hstep);
      trace->excitation_number.push_back(dressed_excitations(rho, state.cutoff));
      trace->purity.push_back((rho * rho).trace().real());
    }
  }

  // Back from the interaction picture: ρ_jk ← ρ_jk e^{−i(E_j−E_k)T}.
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double f = energy[r] - energy[c];
      if (f != 0.0) rho(r, c) *= std::exp(-kI * (f * duration));
    }

  HybridState out{state.cutoff, spin_transform(rho, w, state.cutoff)};
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void HybridState::validate() const {
  if (cutoff < 1) throw std::invalid_argument("state: Fock cutoff must be >= 1");
  if (rho.rows() != dimension() || rho.cols() != dimension())
    throw std::invalid_argument("state: density matrix dimension does not match the cutoff");
  check_invariants(rho, "state");
}

HybridState HybridState::product(int cutoff, int spin, int phonons) {
  if (cutoff < 1) throw std::invalid_argument("state: Fock cutoff must be >= 1");
  if (spin != 0 && spin != 1) throw std::invalid_argument("state: spin level must be 0 or 1");
  if (phonons < 0 || phonons > cutoff) throw std::invalid_argument("state: phonon number outside the cutoff");
  HybridState s{cutoff, MatrixXcd::Zero(2 * (cutoff + 1), 2 * (cutoff + 1))};
  const int i = spin * (cutoff + 1) + phonons;
  s.rho(i, i) = 1.0;
  return s;
}

HybridState HybridState::thermal(int cutoff, int spin, double mean_phonons) {
  if (!(mean_phonons >= 0.0)) throw std::invalid_argument("state: mean phonon number must be >= 0");
  if (!(mean_phonons < 0.5 * cutoff))
    throw std::invalid_argument("state: thermal mean must stay below half the Fock cutoff");
  HybridState s = product(cutoff, spin, 0);
  if (mean_phonons == 0.0) return s;

  // Boltzmann weights x^n on 0..N; x is tuned so the truncated mean is exact.
  std::vector<double> p(static_cast<std::size_t>(cutoff + 1));
  const auto fill = [&](double x) {
    double sum = 0.0, first = 0.0;
    for (int n = 0; n <= cutoff; ++n) {
      p[static_cast<std::size_t>(n)] = std::pow(x, n);
      sum += p[static_cast<std::size_t>(n)];
      first += n * p[static_cast<std::size_t>(n)];
    }
    for (auto& v : p) v /= sum;
    return first / sum;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fill(mid) < mean_phonons ? lo : hi) = mid;
  }
  fill(0.5 * (lo + hi));
  s.rho.setZero();
  for (int n = 0; n <= cutoff; ++n) {
    const int i = spin * (cutoff + 1) + n;
    s.rho(i, i) = p[static_cast<std::size_t>(n)];
  }
  return s;
}

HybridState HybridState::dressed(int cutoff, int sign, int phonons) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("state: dressed sign must be +1 or -1");
  HybridState s = product(cutoff, 0, phonons);
  Matrix2cd w = dressed_basis();
  // Map |0⟩ onto the requested dressed state.
  Matrix2cd a;
  const int col = sign > 0 ? 0 : 1;
  a << w(0, col), 0.0, w(1, col), 0.0;
  s.rho = spin_transform(s.rho, a, cutoff);
  return s;
}

void DecoherenceParams::validate() const {
  if (!(t1 > 0.0)) throw std::invalid_argument("decoherence: T1 must be > 0");
  if (!(t2_star > 0.0)) throw std::invalid_argument("decoherence: T2* must be > 0");
  if (!(gas_damping >= 0.0)) throw std::invalid_argument("decoherence: gas damping must be >= 0");
  if (!(thermal_occupation >= 0.0)) throw std::invalid_argument("decoherence: thermal occupation must be >= 0");
  if (!(init_fidelity >= 0.0 && init_fidelity <= 1.0))
    throw std::invalid_argument("decoherence: init fidelity must lie in [0, 1]");
}

DecoherenceParams DecoherenceParams::none() {
  const double inf = std::numeric_limits<double>::infinity();
  return {inf, inf, 0.0, 0.0, 1.0};
}

// ---------------------------------------------------------------------------

Hamiltonian build_hamiltonian(double omega, double lambda, int cutoff, bool rwa) {
  if (cutoff < 1) throw std::invalid_argument("build_hamiltonian: Fock cutoff must be >= 1");
  if (!(omega >= 0.0) || !(lambda >= 0.0))
    throw std::invalid_argument("build_hamiltonian: omega and lambda must be >= 0");
  Hamiltonian h{omega, lambda, cutoff, rwa, std::nullopt};
  if (rwa && lambda > omega / 5.0) {
    std::ostringstream os;
    os << "rotating-wave approximation questionable: lambda/omega = " << lambda / omega << " > 0.2";
    h.warning = os.str();
  }
  return h;
}

VectorXd Hamiltonian::diagonal() const {
  const int m = cutoff + 1;
  VectorXd e(2 * m);
  for (int n = 0; n < m; ++n) {
    e[n] = omega * (0.5 + n);
    e[m + n] = omega * (-0.5 + n);
  }
  return e;
}

MatrixXcd Hamiltonian::dressed() const {
  MatrixXcd m = to_dense(coupling_operator(*this), 2 * (cutoff + 1));
  m.diagonal() += diagonal().cast<Complex>();
  return m;
}

MatrixXcd Hamiltonian::computational() const {
  return spin_transform(dressed(), dressed_basis(), cutoff);
}

HybridState evolve(const HybridState& state, const Hamiltonian& h, const DecoherenceParams& decoherence,
                   double duration, double dt) {
  return evolve_impl(state, h, decoherence, duration, dt, nullptr);
}

EvolutionTrace evolve_traced(const HybridState& state, const Hamiltonian& h, const DecoherenceParams& decoherence,
                             double duration, double dt) {
  EvolutionTrace trace;
  trace.state = evolve_impl(state, h, decoherence, duration, dt, &trace);
  return trace;
}

HybridState rotate_spin(const HybridState& state, SpinAxis axis, double angle) {
  Matrix2cd sigma;
  if (axis == SpinAxis::x)
    sigma << 0.0, 1.0, 1.0, 0.0;
  else
    sigma << 0.0, -kI, kI, 0.0;
  const Matrix2cd u = std::cos(0.5 * angle) * Matrix2cd::Identity() - kI * std::sin(0.5 * angle) * sigma;
  return {state.cutoff, spin_transform(state.rho, u, state.cutoff)};
}

HybridState spin_init(const HybridState& state, double fidelity) {
  if (!(fidelity >= 0.5 && fidelity <= 1.0)) throw std::invalid_argument("spin_init: fidelity must lie in [0.5, 1]");
  const Eigen::Index m = state.cutoff + 1;
  const MatrixXcd phonon = state.rho.block(0, 0, m, m) + state.rho.block(m, m, m, m);
  HybridState out{state.cutoff, MatrixXcd::Zero(2 * m, 2 * m)};
  out.rho.block(0, 0, m, m) = fidelity * phonon;
  out.rho.block(m, m, m, m) = (1.0 - fidelity) * phonon;
  return out;
}

void PulseSequence::validate() const {
  for (const auto& s : steps) {
    if (const auto* c = std::get_if<CoupledEvolution>(&s); c && !(c->duration >= 0.0))
      throw std::invalid_argument("pulse sequence: coupled evolution duration must be >= 0");
    if (const auto* w = std::get_if<Wait>(&s); w && !(w->duration >= 0.0))
      throw std::invalid_argument("pulse sequence: wait duration must be >= 0");
  }
}

HybridState run_sequence(const HybridState& state, const Hamiltonian& h, const DecoherenceParams& decoherence,
                         const PulseSequence& sequence) {
  sequence.validate();
  HybridState s = state;
  for (const auto& step : sequence.steps) {
    if (const auto* r = std::get_if<Rotation>(&step)) {
      s = rotate_spin(s, r->axis, r->angle);
    } else if (const auto* c = std::get_if<CoupledEvolution>(&step)) {
      s = evolve(s, h, decoherence, c->duration);
    } else if (std::holds_alternative<SpinInit>(step)) {
      s = spin_init(s, decoherence.init_fidelity);
    } else if (const auto* w = std::get_if<Wait>(&step)) {
      s = evolve(s, build_hamiltonian(h.omega, 0.0, h.cutoff, h.rwa), decoherence, w->duration);
    }
  }
  return s;
}

double flip_time(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("flip_time: lambda must be > 0");
  return constants::pi / lambda;
}

FockPrepResult fock_prep(double omega, double lambda, const DecoherenceParams& decoherence, int cutoff, bool rwa) {
  const Hamiltonian h = build_hamiltonian(omega, lambda, cutoff, rwa);
  PulseSequence seq;
  seq.steps.emplace_back(Rotation{SpinAxis::x, constants::pi / 2.0});
  // Without coupling there is no exchange to wait for.
  if (lambda > 0.0) seq.steps.emplace_back(CoupledEvolution{flip_time(lambda)});
  seq.steps.emplace_back(Rotation{SpinAxis::x, -constants::pi / 2.0});

  FockPrepResult out;
  out.state = run_sequence(HybridState::product(cutoff, 0, 0), h, decoherence, seq);
  out.phonon_fidelity = phonon_distribution(out.state)[1];
  out.spin_excited = spin_population(out.state, 1);
  return out;
}

CoolingResult sideband_cool(double omega, double lambda, const DecoherenceParams& decoherence, double mean_start,
                            int n_cycles, int cutoff, CoolingSchedule schedule) {
  if (cutoff < 1) throw std::invalid_argument("sideband_cool: Fock cutoff must be >= 1");
  if (!(mean_start >= 0.0)) throw std::invalid_argument("sideband_cool: starting mean phonon number must be >= 0");
  if (!(mean_start < cutoff / 3.0))
    throw std::invalid_argument("sideband_cool: cutoff headroom violated (need mean phonon number < N/3)");
  if (n_cycles < 0) throw std::invalid_argument("sideband_cool: n_cycles must be >= 0");
  const Hamiltonian h = build_hamiltonian(omega, lambda, cutoff, true);
  const double tau = flip_time(lambda);

  CoolingResult out;
  out.state = HybridState::thermal(cutoff, 0, mean_start);
  out.mean_phonons.push_back(mean_phonon_number(out.state));
  for (int c = 0; c < n_cycles; ++c) {
    const int k = schedule == CoolingSchedule::sweep ? cutoff - c % cutoff : 1;
    out.state = spin_init(out.state, decoherence.init_fidelity);
    out.state = rotate_spin(out.state, SpinAxis::x, -constants::pi / 2.0);
    out.state = evolve(out.state, h, decoherence, tau / std::sqrt(static_cast<double>(k)));
    out.mean_phonons.push_back(mean_phonon_number(out.state));
  }
  return out;
}

NvTransitions nv_transitions(const std::array<double, 3>& field, double zero_field_splitting) {
  const double b = std::sqrt(field[0] * field[0] + field[1] * field[1] + field[2] * field[2]);
  if (!(b < 0.2)) throw std::invalid_argument("nv_transitions: |B| must be < 0.2 T");
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix3cd sx, sy, sz;
  sx << 0, s, 0, s, 0, s, 0, s, 0;
  sy << 0, -kI * s, 0, kI * s, 0, -kI * s, 0, kI * s, 0;
  sz << 1, 0, 0, 0, 0, 0, 0, 0, -1;
  const double g = constants::gamma_nv / (2.0 * constants::pi);  // Hz/T
  const Eigen::Matrix3cd h =
      zero_field_splitting * sz * sz + g * (field[0] * sx + field[1] * sy + field[2] * sz);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(h);
  int zero = 0;
  for (int i = 1; i < 3; ++i)
    if (std::norm(es.eigenvectors()(1, i)) > std::norm(es.eigenvectors()(1, zero))) zero = i;
  std::vector<double> f;
  for (int i = 0; i < 3; ++i)
    if (i != zero) f.push_back(es.eigenvalues()[i] - es.eigenvalues()[zero]);
  std::sort(f.begin(), f.end());
  return {f[0], f[1]};
}

// ---------------------------------------------------------------------------

std::vector<double> phonon_distribution(const HybridState& state) {
  const int m = state.cutoff + 1;
  std::vector<double> p(static_cast<std::size_t>(m));
  for (int n = 0; n < m; ++n) p[static_cast<std::size_t>(n)] = (state.rho(n, n) + state.rho(m + n, m + n)).real();
  return p;
}

double mean_phonon_number(const HybridState& state) {
  const auto p = phonon_distribution(state);
  double x = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) x += static_cast<double>(n) * p[n];
  return x;
}

double spin_population(const HybridState& state, int spin) {
  if (spin != 0 && spin != 1) throw std::invalid_argument("spin_population: spin level must be 0 or 1");
  const Eigen::Index m = state.cutoff + 1;
  return state.rho.block(spin * m, spin * m, m, m).trace().real();
}

double dressed_population(const HybridState& state, int sign, int phonons) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("dressed_population: sign must be +1 or -1");
  if (phonons < 0 || phonons > state.cutoff) throw std::invalid_argument("dressed_population: phonon number outside cutoff");
  const MatrixXcd d = spin_transform(state.rho, dressed_basis().adjoint(), state.cutoff);
  const int i = (sign > 0 ? 0 : 1) * (state.cutoff + 1) + phonons;
  return d(i, i).real();
}

double excitation_number(const HybridState& state) {
  return dressed_excitations(spin_transform(state.rho, dressed_basis().adjoint(), state.cutoff), state.cutoff);
}

double purity(const HybridState& state) { return (state.rho * state.rho).trace().real(); }

}  // namespace levimag
