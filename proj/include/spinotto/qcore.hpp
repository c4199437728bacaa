#pragma once

// Exact linear algebra for the two-spin working medium: Hamiltonian
// construction, closed-form spectral data, thermal states, partial trace
// and trace distance.
//
// Basis convention (fixed everywhere): product basis {|00>, |01>, |10>, |11>}
// with index = 2*s1 + s2, and sigma_z|0> = -|0>, sigma_z|1> = +|1>.  With this
// choice the ground state of H lives in the {|00>,|11>} sector and the k-branch
// amplitudes below hold verbatim.

#include <array>

#include "spinotto/types.hpp"

namespace spinotto {

// Single-spin Pauli matrices in the convention above.
Mat2 sigma_x();
Mat2 sigma_y();
Mat2 sigma_z();

Mat4 kron(const Mat2& a, const Mat2& b);

// H = B (sz x I + I x sz) + J [(1+gamma) sx x sx + (1-gamma) sy x sy]
Mat4 build_hamiltonian(const SpinParams& p);

// Spectral data in the fixed level order
//   E0 = -2k, E1 = -2J, E2 = +2J, E3 = +2k,   k = sqrt(B^2 + gamma^2 J^2).
// States are stored as columns of `states`; phases are fixed so the first
// nonzero amplitude of each eigenvector is real and positive.
//
// a, b, c, d are the sector amplitudes:
//   psi0 = (a|11> + b|00>)/sqrt2,  psi3 = (c|11> + d|00>)/sqrt2,
//   a = (B-k)/sqrt(k^2-Bk), b = gJ/sqrt(k^2-Bk),
//   c = (B+k)/sqrt(k^2+Bk), d = gJ/sqrt(k^2+Bk).
struct Spectrum {
  SpinParams params;
  double k = 0.0;
  std::array<double, 4> energies{};
  Mat4 states = Mat4::Zero();
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  Vec4 state(int i) const { return states.col(i); }
  double energy(int i) const { return energies[static_cast<size_t>(i)]; }
};

// Closed-form spectrum.  Throws DegenerateSpectrum when |k^2 - Bk| < 1e-14
// (the psi0 amplitude formula divides by sqrt(k^2 - Bk)); callers that need
// the gamma*J -> 0 limit should use spectrum() below.
Spectrum analytic_spectrum(const SpinParams& p);

// analytic_spectrum with the commuting-limit fallback: at gamma*J ~ 0 the
// k-branch states are exactly |00> and |11> and the amplitudes take their
// limits a = d = 0, b = c = sqrt2.  Total over valid params.
Spectrum spectrum(const SpinParams& p);

struct GibbsState {
  Mat4 rho;
  double partition = 0.0;  // Z = Tr exp(-H/T)
};

// exp(-H/T)/Z for any Hermitian H.  Throws NonPositiveTemperature.
GibbsState gibbs_state(const Mat4& hamiltonian, double temperature);

// Tr(rho H).  The imaginary residual must be < 1e-10 and is discarded.
double internal_energy(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& hamiltonian);

// Reduced one-spin state; keep_spin is 1 (first) or 2 (second).
Mat2 partial_trace(const Mat4& rho, int keep_spin = 1);

// D(rho, sigma) = Tr|rho - sigma| / 2.
double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

// Validation helpers (entrywise / max-norm tolerances).
bool is_hermitian(const Eigen::MatrixXcd& m, double tol = 1e-12);
bool is_unitary(const Eigen::MatrixXcd& m, double tol = 1e-10);
bool is_density_matrix(const Eigen::MatrixXcd& m, double herm_tol = 1e-12,
                       double trace_tol = 1e-10, double eig_tol = 1e-10);

}  // namespace spinotto
