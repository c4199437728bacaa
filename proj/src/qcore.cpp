#include "spinotto/qcore.hpp"

#include <algorithm>

namespace spinotto {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Fix the phase so the first amplitude above threshold is real positive.
void fix_phase(Eigen::Ref<Vec4> v) {
  for (int i = 0; i < 4; ++i) {
    const Complex amp = v(i);
    if (std::abs(amp) > 1e-12) {
      v *= std::conj(amp) / std::abs(amp);
      if (v(i).real() < 0) v = -v;
      return;
    }
  }
}

}  // namespace

Mat2 sigma_x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}

Mat2 sigma_y() {
  Mat2 m;
  m << Complex(0, 0), Complex(0, 1), Complex(0, -1), Complex(0, 0);
  return m;
}

Mat2 sigma_z() {
  Mat2 m;
  m << -1, 0, 0, 1;
  return m;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Mat4 build_hamiltonian(const SpinParams& p) {
  p.validate();
  const Mat2 id = Mat2::Identity();
  Mat4 h = p.B * (kron(sigma_z(), id) + kron(id, sigma_z()));
  h += p.J * (1.0 + p.gamma) * kron(sigma_x(), sigma_x());
  h += p.J * (1.0 - p.gamma) * kron(sigma_y(), sigma_y());
  return h;
}

Spectrum analytic_spectrum(const SpinParams& p) {
  p.validate();
  const double k = p.k();
  const double B = p.B;
  const double gJ = p.gamma * p.J;
  // k^2 - Bk = k (gJ)^2 / (k + B) exactly; the subtracted form cancels badly
  // for small gJ, so the guard and the amplitudes use this identity.
  if (k == 0.0 || std::abs(k * gJ * gJ / (k + B)) < 1e-14)
    throw DegenerateSpectrum(
        "analytic_spectrum: |k^2 - Bk| < 1e-14, amplitude formula singular "
        "(use spectrum() for the commuting limit)");

  Spectrum s;
  s.params = p;
  s.k = k;
  s.energies = {-2 * k, -2 * p.J, 2 * p.J, 2 * k};
  s.d = gJ / std::sqrt(k * (k + B));  // = gJ/sqrt(k^2 + Bk)
  s.a = -s.d;                         // (B-k)/sqrt(k^2 - Bk) reduced
  s.b = std::sqrt((k + B) / k);       // gJ/sqrt(k^2 - Bk) reduced
  s.c = s.b;                          // (B+k)/sqrt(k^2 + Bk) reduced

  s.states.setZero();
  s.states(3, 0) = s.a / kSqrt2;  // psi0 = (a|11> + b|00>)/sqrt2
  s.states(0, 0) = s.b / kSqrt2;
  s.states(2, 1) = -1.0 / kSqrt2;  // psi1 = (-|10> + |01>)/sqrt2
  s.states(1, 1) = 1.0 / kSqrt2;
  s.states(2, 2) = 1.0 / kSqrt2;  // psi2 = (|10> + |01>)/sqrt2
  s.states(1, 2) = 1.0 / kSqrt2;
  s.states(3, 3) = s.c / kSqrt2;  // psi3 = (c|11> + d|00>)/sqrt2
  s.states(0, 3) = s.d / kSqrt2;

  for (int i = 0; i < 4; ++i) fix_phase(s.states.col(i));
  return s;
}

Spectrum spectrum(const SpinParams& p) {
  p.validate();
  const double k = p.k();
  const double gJ = p.gamma * p.J;
  if (k > 0.0 && std::abs(k * gJ * gJ / (k + p.B)) >= 1e-14) return analytic_spectrum(p);

  // gamma*J -> 0: the Hamiltonian family commutes and the k-branch reduces to
  // the bare states |00>, |11>; amplitudes take their limits.
  Spectrum s;
  s.params = p;
  s.k = p.k();
  s.energies = {-2 * s.k, -2 * p.J, 2 * p.J, 2 * s.k};
  s.a = 0.0;
  s.b = kSqrt2;
  s.c = kSqrt2;
  s.d = 0.0;
  s.states.setZero();
  s.states(0, 0) = 1.0;
  s.states(2, 1) = -1.0 / kSqrt2;
  s.states(1, 1) = 1.0 / kSqrt2;
  s.states(2, 2) = 1.0 / kSqrt2;
  s.states(1, 2) = 1.0 / kSqrt2;
  s.states(3, 3) = 1.0;
  for (int i = 0; i < 4; ++i) fix_phase(s.states.col(i));
  return s;
}

GibbsState gibbs_state(const Mat4& hamiltonian, double temperature) {
  if (!(temperature > 0.0))
    throw NonPositiveTemperature("gibbs_state: temperature must be positive");

  Eigen::SelfAdjointEigenSolver<Mat4> es(hamiltonian);
  const Eigen::Vector4d evals = es.eigenvalues();
  const double emin = evals.minCoeff();

  // Weights relative to the ground level keep the normalisation stable; the
  // reported partition function is the unshifted Tr exp(-H/T).
  Eigen::Vector4d w;
  double zshift = 0.0, z = 0.0;
  for (int i = 0; i < 4; ++i) {
    w(i) = std::exp(-(evals(i) - emin) / temperature);
    zshift += w(i);
    z += std::exp(-evals(i) / temperature);
  }

  Mat4 rho = Mat4::Zero();
  for (int i = 0; i < 4; ++i)
    rho += (w(i) / zshift) * (es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint());
  return {rho, z};
}

double internal_energy(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& hamiltonian) {
  if (rho.rows() != hamiltonian.rows() || rho.cols() != hamiltonian.cols() ||
      rho.rows() != rho.cols())
    throw DimensionMismatch("internal_energy: state and Hamiltonian dimensions differ");
  const Complex tr = (rho * hamiltonian).trace();
  if (std::abs(tr.imag()) >= 1e-10)
    throw DimensionMismatch("internal_energy: non-real trace, inputs are not Hermitian");
  return tr.real();
}

Mat2 partial_trace(const Mat4& rho, int keep_spin) {
  if (keep_spin != 1 && keep_spin != 2)
    throw DimensionMismatch("partial_trace: keep_spin must be 1 or 2");
  Mat2 out = Mat2::Zero();
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp)
      for (int t = 0; t < 2; ++t) {
        if (keep_spin == 1)
          out(s, sp) += rho(2 * s + t, 2 * sp + t);
        else
          out(s, sp) += rho(2 * t + s, 2 * t + sp);
      }
  return out;
}

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw DimensionMismatch("trace_distance: dimension mismatch");
  Eigen::MatrixXcd diff = rho - sigma;
  // Orient the difference so both argument orders feed the solver the same
  // matrix; makes D(rho, sigma) == D(sigma, rho) exact, not just to roundoff.
  for (Eigen::Index i = 0; i < diff.rows(); ++i) {
    bool decided = false;
    for (Eigen::Index j = 0; j < diff.cols(); ++j) {
      const Complex v = diff(i, j);
      const double lead = v.real() != 0.0 ? v.real() : v.imag();
      if (lead != 0.0) {
        if (lead < 0.0) diff = -diff;
        decided = true;
        break;
      }
    }
    if (decided) break;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

bool is_hermitian(const Eigen::MatrixXcd& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() < tol;
}

bool is_unitary(const Eigen::MatrixXcd& m, double tol) {
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  return (m * m.adjoint() - id).cwiseAbs().maxCoeff() < tol;
}

bool is_density_matrix(const Eigen::MatrixXcd& m, double herm_tol, double trace_tol,
                       double eig_tol) {
  if (!is_hermitian(m, herm_tol)) return false;
  if (std::abs(m.trace().real() - 1.0) >= trace_tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  return es.eigenvalues().minCoeff() > -eig_tol;
}

}  // namespace spinotto
