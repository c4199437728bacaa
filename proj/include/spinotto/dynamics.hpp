#pragma once

// Time evolution: unitary ramp propagators, Lindblad dissipation with the
// two sigma_x-channel jump operators, and the ramp transition probabilities
// xi (eigenstate sector), lambda/delta (bare-basis sector) together with
// their two-amplitude interference decomposition.

#include <vector>

#include "spinotto/qcore.hpp"
#include "spinotto/types.hpp"

namespace spinotto {

enum class RampDirection { Expansion, Compression };

// Linear field ramp B(t) = B_start + (B_end - B_start) t/tau.  A compression
// protocol is the time-reverse of the matching expansion.
struct FieldProtocol {
  double B_start = 1.0;
  double B_end = 4.0;
  double tau = 1.0;
  RampDirection direction = RampDirection::Expansion;

  static FieldProtocol expansion(double B_low, double B_high, double tau);
  static FieldProtocol compression(double B_low, double B_high, double tau);

  double field_at(double t) const { return B_start + (B_end - B_start) * (t / tau); }
  void validate() const;
};

// Below this ramp duration the propagator is the identity (sudden quench).
inline constexpr double kSuddenQuenchTau = 1e-6;

// Default step count for the midpoint-exponential product.  Scales with
// sqrt(tau) so that doubling the count moves the propagator by < 1e-8 in
// max-norm over the whole working range tau <= 20.
long default_ramp_steps(double tau);

struct Propagator {
  Mat4 U = Mat4::Identity();  // mirrored (expansion-ordered) composition
  FieldProtocol protocol;
  long steps = 0;

  // Operator applied to states.  The down-ramp composes the same Hermitian
  // midpoint factors in reverse order, which is the transpose of the stored
  // mirrored form; storing the mirrored form keeps the expansion and
  // compression matrices identical.
  Mat4 state_map() const {
    if (protocol.direction == RampDirection::Compression) return Mat4(U.transpose());
    return U;
  }
};

// Time-ordered product of exact midpoint exponentials over `steps`
// sub-intervals.  steps = 0 selects default_ramp_steps(tau); steps < 16
// throws StepsTooFew.  gamma and J come from p_base; the field follows the
// protocol.
Propagator propagate_unitary(const FieldProtocol& protocol, const SpinParams& p_base,
                             long steps = 0);

// Propagator for a compression protocol, built from H_com(t) = H_exp(tau - t)
// and asserted equal (max-norm 1e-10) to the mirrored expansion propagator.
Propagator compression_propagator(const FieldProtocol& protocol, const SpinParams& p_base,
                                  long steps = 0);

// Jump operators for the bath coupled to spin 1 through sigma_x:
//   X1 = [(c-d)|psi1><psi3| + (a+b)|psi0><psi2|]/2,   omega1 = 2k + 2J,
//   X2 = [(c+d)|psi2><psi3| + (a-b)|psi0><psi1|]/2,   omega2 = 2k - 2J.
// Each lowers the energy by its omega: [H, Xi] = -omega_i Xi.
struct JumpOperators {
  Mat4 X1, X2;
  double omega1 = 0.0, omega2 = 0.0;
};

JumpOperators jump_operators(const SpinParams& p);

struct DissipativeConfig {
  double bath_temperature = 1.0;
  double Gamma = 0.1;
  double duration = 0.0;
  SpinParams fixed_params;  // field held constant during the isochore
  double dt = 0.0;          // 0 selects the default 1e-3 / Gamma

  double step_size() const { return dt > 0.0 ? dt : 1e-3 / Gamma; }
  void validate() const;
};

// Integrates d rho/dt = i[rho,H] + sum_i Gamma(n_i+1) D[X_i] + Gamma n_i D[X_i+]
// with n_i = 1/(exp(omega_i/T)-1), using fixed-step RK4 on the vectorised
// generator.  Returns the state at each requested sample time (ascending,
// within [0, duration]).  Positivity beyond -1e-8 throws StepSizeTooLarge.
std::vector<Mat4> evolve_lindblad(const Mat4& rho0, const DissipativeConfig& cfg,
                                  const std::vector<double>& sample_times);

// Convenience: final state only.
Mat4 evolve_lindblad_final(const Mat4& rho0, const DissipativeConfig& cfg);

struct TransitionProbabilities {
  double xi = 0.0;
  double lambda = 0.0;
  double delta = 0.0;
  double tau = 0.0;
};

// xi = |<psi0(2)|U|psi3(1)>|^2.  The four conservation-of-probability
// equalities are checked pairwise to 1e-8 before returning.
double transition_xi(const Propagator& U, const Spectrum& low, const Spectrum& high);

// lambda = |<00|U|psi3(1)>|^2, delta = |<11|V|psi0(2)>|^2 with V applied as a
// state map.  Asserts the paired equalities to 1e-8 and the vanishing of the
// middle-sector cross terms to 1e-10.
TransitionProbabilities transition_lambda_delta(const Propagator& U, const Propagator& V,
                                                const Spectrum& low, const Spectrum& high);

// All three probabilities for the ramp (B_low -> B_high, tau) at p_base.
TransitionProbabilities transition_probabilities(double B_low, double B_high, double tau,
                                                 const SpinParams& p_base, long steps = 0);

// Two-amplitude decomposition of lambda (expansion input) or delta
// (compression input): total = |amp_a - amp_b|^2 reproduces the probability.
struct InterferenceDecomposition {
  Complex amp_a, amp_b;
  double total = 0.0;
};

InterferenceDecomposition interference_decomposition(const Propagator& prop,
                                                     const Spectrum& low,
                                                     const Spectrum& high);

}  // namespace spinotto
