#pragma once

#include <array>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace levimag {

using Complex = std::complex<double>;
using DensityMatrix = Eigen::MatrixXcd;

/// Spin ⊗ Fock state. Basis index s·(N+1) + n with s the NV computational
/// spin level (0 or 1) and n the phonon number up to the cutoff N.
///
/// Dressed spin states are |±⟩ = (|0⟩ ∓ i|1⟩)/√2, so a π/2 rotation about x
/// takes |0⟩ to |+⟩.
struct HybridState {
  int cutoff = 0;
  DensityMatrix rho;

  int dimension() const { return 2 * (cutoff + 1); }
  /// Throws InvariantError naming the failed check (trace, Hermiticity, positivity).
  void validate() const;

  /// Spin |s⟩ with a Fock state |n⟩.
  static HybridState product(int cutoff, int spin, int phonons);
  /// Spin |s⟩ with a Boltzmann phonon distribution on 0..N whose mean is
  /// exactly n̄. Throws std::invalid_argument unless n̄ < N/2.
  static HybridState thermal(int cutoff, int spin, double mean_phonons);
  /// Dressed spin |+⟩ (sign=+1) or |−⟩ (sign=−1) with a Fock state |n⟩.
  static HybridState dressed(int cutoff, int sign, int phonons);
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DecoherenceParams {
  double t1 = 100.0;            // s
  double t2_star = 460e-6;      // s
  double gas_damping = 0.0;     // Γ_gas, 1/s
  double thermal_occupation = 0.0;
  double init_fidelity = 0.998;

  void validate() const;
  /// No relaxation, no dephasing, no bath, perfect initialization.
  static DecoherenceParams none();
};

/// Spin–libration Hamiltonian (ħ = 1, rad/s)
///   H = ω S̃_z + ω a†a + λ S̃_x (a + a†)
/// with S̃ = σ̃/2 in the dressed basis {|+⟩, |−⟩}. With `rwa` the coupling is
/// (λ/2)(σ̃₊a + σ̃₋a†).
struct Hamiltonian {
  double omega = 0.0;
  double lambda = 0.0;
  int cutoff = 0;
  bool rwa = true;
  std::optional<std::string> warning;  // set when RWA is requested with λ > ω/5

  /// Dense matrix in the dressed product basis (index σ·(N+1)+n, σ = 0 for |+⟩).
  Eigen::MatrixXcd dressed() const;
  /// Dense matrix in the computational product basis.
  Eigen::MatrixXcd computational() const;
  /// Diagonal energies in the dressed product basis.
  Eigen::VectorXd diagonal() const;
};

Hamiltonian build_hamiltonian(double omega, double lambda, int cutoff, bool rwa);

/// Lindblad evolution with fixed-step RK4 in the interaction picture of the
/// diagonal part of H. Collapse channels: √(2/T2*)·S_z, √(1/T1)·σ₋,
/// √(Γ(n̄+1))·a, √(Γn̄)·a†. dt ≤ 0 picks a step automatically; an explicit dt
/// with ‖L‖dt ≥ 0.1 throws std::invalid_argument. Every step checks trace,
/// Hermiticity and positivity and throws InvariantError on a breach.
HybridState evolve(const HybridState& state, const Hamiltonian& h, const DecoherenceParams& decoherence,
                   double duration, double dt = 0.0);

/// As `evolve`, also recording an observable after every step (first entry at t = 0).
struct EvolutionTrace {
  HybridState state;
  std::vector<double> times;
  std::vector<double> excitation_number;  // ⟨σ̃₊σ̃₋ + a†a⟩
  std::vector<double> purity;
};
EvolutionTrace evolve_traced(const HybridState& state, const Hamiltonian& h, const DecoherenceParams& decoherence,
                             double duration, double dt = 0.0);

enum class SpinAxis { x, y };

/// Instantaneous rotation exp(−iθσ_axis/2) ⊗ 1.
HybridState rotate_spin(const HybridState& state, SpinAxis axis, double angle);

/// Replaces the spin marginal by f|0⟩⟨0| + (1−f)|1⟩⟨1|, keeping the phonon marginal.
HybridState spin_init(const HybridState& state, double fidelity);

struct Rotation {
  SpinAxis axis = SpinAxis::x;
  double angle = 0.0;
};
struct CoupledEvolution {
  double duration = 0.0;
};
struct SpinInit {};
/// Free evolution with the coupling switched off.
struct Wait {
  double duration = 0.0;
};
using PulseStep = std::variant<Rotation, CoupledEvolution, SpinInit, Wait>;

struct PulseSequence {
  std::vector<PulseStep> steps;
  void validate() const;
};

HybridState run_sequence(const HybridState& state, const Hamiltonian& h, const DecoherenceParams& decoherence,
                         const PulseSequence& sequence);

/// Exchange time π/λ for a full |+,n⟩ ↔ |−,n+1⟩ swap at n = 0, i.e. 1/(2·λ/2π).
double flip_time(double lambda);

struct FockPrepResult {
  HybridState state;
  double phonon_fidelity = 0.0;  // ⟨1|ρ_ph|1⟩
  double spin_excited = 0.0;     // population of spin |1⟩
};

/// From |0, 0⟩: π/2 about x, coupled evolution for π/λ, then −π/2 about x
/// (returns |−⟩ to |1⟩).
FockPrepResult fock_prep(double omega, double lambda, const DecoherenceParams& decoherence, int cutoff = 20,
                         bool rwa = true);

enum class CoolingSchedule {
  sweep,  // exchange time τ/√k for k = N, N−1, …, 1, repeated
  fixed,  // exchange time τ every cycle
};

struct CoolingResult {
  std::vector<double> mean_phonons;  // n̄ before the first cycle and after each cycle
  HybridState state;
};

/// Pulsed sideband cooling. Each cycle: spin_init, −π/2 about x (to |−⟩),
/// coupled evolution. Throws std::invalid_argument if n̄_start ≥ N/3.
CoolingResult sideband_cool(double omega, double lambda, const DecoherenceParams& decoherence, double mean_start,
                            int n_cycles, int cutoff = 20, CoolingSchedule schedule = CoolingSchedule::sweep);

struct NvTransitions {
  double lower = 0.0;  // Hz, |0⟩ → |−1⟩-like
  double upper = 0.0;  // Hz, |0⟩ → |+1⟩-like
};

/// Ground-state NV transitions from D·S_z² + γ_NV B·S (spin 1), B in the NV frame.
/// Throws std::invalid_argument for |B| ≥ 0.2 T.
NvTransitions nv_transitions(const std::array<double, 3>& field, double zero_field_splitting = 2.87e9);

// Observables.
std::vector<double> phonon_distribution(const HybridState& state);
double mean_phonon_number(const HybridState& state);
/// Population of computational spin level s (0 or 1).
double spin_population(const HybridState& state, int spin);
/// Population of the dressed product state |±, n⟩.
double dressed_population(const HybridState& state, int sign, int phonons);
double excitation_number(const HybridState& state);
double purity(const HybridState& state);

}  // namespace levimag
