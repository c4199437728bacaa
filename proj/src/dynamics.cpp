#include "spinotto/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace spinotto {

namespace {

using Mat16 = Eigen::Matrix<Complex, 16, 16>;
using Vec16 = Eigen::Matrix<Complex, 16, 1>;

// exp(-i h dt) for the {|00>,|11>} block h = [[-2B, 2gJ],[2gJ, 2B]], done in
// closed form: h = 2gJ sx - 2B sz(block), |h| = 2k.
Mat2 outer_block_step(double B, double gJ, double dt) {
  const double k = std::sqrt(B * B + gJ * gJ);
  if (k == 0.0) return Mat2::Identity();
  const double th = 2.0 * k * dt;
  const double cs = std::cos(th), sn = std::sin(th);
  const double nx = gJ / k, nz = -B / k;
  Mat2 m;
  m(0, 0) = Complex(cs, -sn * nz);
  m(1, 1) = Complex(cs, sn * nz);
  m(0, 1) = Complex(0, -sn * nx);
  m(1, 0) = Complex(0, -sn * nx);
  return m;
}

// The middle {|01>,|10>} block is field-independent, so its ramp propagator
// is the single exact exponential of [[0,2J],[2J,0]] over tau.
Mat2 middle_block_prop(double J, double tau) {
  const double th = 2.0 * J * tau;
  Mat2 m;
  m(0, 0) = m(1, 1) = std::cos(th);
  m(0, 1) = m(1, 0) = Complex(0, -std::sin(th));
  return m;
}

Mat4 assemble_blocks(const Mat2& outer, const Mat2& middle) {
  Mat4 u = Mat4::Zero();
  u(0, 0) = outer(0, 0);
  u(0, 3) = outer(0, 1);
  u(3, 0) = outer(1, 0);
  u(3, 3) = outer(1, 1);
  u(1, 1) = middle(0, 0);
  u(1, 2) = middle(0, 1);
  u(2, 1) = middle(1, 0);
  u(2, 2) = middle(1, 1);
  return u;
}

long resolve_steps(const FieldProtocol& protocol, long steps) {
  if (steps == 0) return default_ramp_steps(protocol.tau);
  if (steps < 16) throw StepsTooFew("propagate_unitary: steps < 16");
  return steps;
}

Mat16 kron4(const Mat4& a, const Mat4& b) {
  Mat16 k;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) k.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return k;
}

Vec16 vectorize(const Mat4& m) {
  Vec16 v;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) v(4 * c + r) = m(r, c);
  return v;
}

Mat4 devectorize(const Vec16& v) {
  Mat4 m;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) m(r, c) = v(4 * c + r);
  return m;
}

// vec(X rho X+ - {X+X, rho}/2) = [conj(X) kron X - (I kron X+X + (X+X)^T kron I)/2] vec(rho)
Mat16 dissipator(const Mat4& x) {
  const Mat4 id = Mat4::Identity();
  const Mat4 xdx = x.adjoint() * x;
  return kron4(x.conjugate(), x) - 0.5 * kron4(id, xdx) - 0.5 * kron4(xdx.transpose(), id);
}

double probability(const Vec4& bra, const Mat4& op, const Vec4& ket) {
  return std::norm((bra.adjoint() * op * ket)(0, 0));
}

Vec4 basis_state(int idx) {
  Vec4 v = Vec4::Zero();
  v(idx) = 1.0;
  return v;
}

}  // namespace

FieldProtocol FieldProtocol::expansion(double B_low, double B_high, double tau) {
  FieldProtocol p{B_low, B_high, tau, RampDirection::Expansion};
  p.validate();
  return p;
}

FieldProtocol FieldProtocol::compression(double B_low, double B_high, double tau) {
  FieldProtocol p{B_high, B_low, tau, RampDirection::Compression};
  p.validate();
  return p;
}

void FieldProtocol::validate() const {
  if (!(tau > 0.0)) throw InvalidFields("FieldProtocol: tau must be positive");
  if (!(B_start >= 0.0 && B_end >= 0.0))
    throw InvalidFields("FieldProtocol: fields must be non-negative");
  if (direction == RampDirection::Expansion && !(B_start < B_end))
    throw InvalidFields("FieldProtocol: expansion requires B_start < B_end");
  if (direction == RampDirection::Compression && !(B_start > B_end))
    throw InvalidFields("FieldProtocol: compression requires B_start > B_end");
}

long default_ramp_steps(double tau) {
  return std::max<long>(2000, static_cast<long>(std::ceil(8000.0 * std::sqrt(tau))));
}

Propagator propagate_unitary(const FieldProtocol& protocol, const SpinParams& p_base,
                             long steps) {
  protocol.validate();
  p_base.validate();
  const long n = resolve_steps(protocol, steps);
  if (protocol.tau <= kSuddenQuenchTau) return {Mat4::Identity(), protocol, n};

  const double gJ = p_base.gamma * p_base.J;
  const double dt = protocol.tau / static_cast<double>(n);
  Mat2 outer = Mat2::Identity();
  for (long j = 0; j < n; ++j) {
    const double t = (static_cast<double>(j) + 0.5) * dt;
    outer = outer_block_step(protocol.field_at(t), gJ, dt) * outer;
  }
  Propagator prop{assemble_blocks(outer, middle_block_prop(p_base.J, protocol.tau)), protocol,
                  n};
  if (!is_unitary(prop.U, 1e-10))
    throw StepSizeTooLarge("propagate_unitary: propagator lost unitarity");
  return prop;
}

Propagator compression_propagator(const FieldProtocol& protocol, const SpinParams& p_base,
                                  long steps) {
  protocol.validate();
  if (protocol.direction != RampDirection::Compression)
    throw InvalidFields("compression_propagator: protocol must be a compression ramp");
  p_base.validate();
  const long n = resolve_steps(protocol, steps);
  if (protocol.tau <= kSuddenQuenchTau) return {Mat4::Identity(), protocol, n};

  // Compose the H_com(t) = H_exp(tau - t) midpoint factors with the earliest
  // compression time leftmost; this mirrored ordering makes the stored matrix
  // coincide with the matching expansion propagator.
  const double gJ = p_base.gamma * p_base.J;
  const double dt = protocol.tau / static_cast<double>(n);
  Mat2 outer = Mat2::Identity();
  for (long j = 0; j < n; ++j) {
    const double t = (static_cast<double>(j) + 0.5) * dt;
    outer = outer * outer_block_step(protocol.field_at(t), gJ, dt);
  }
  Propagator prop{assemble_blocks(outer, middle_block_prop(p_base.J, protocol.tau)), protocol,
                  n};

  const FieldProtocol mirror =
      FieldProtocol::expansion(protocol.B_end, protocol.B_start, protocol.tau);
  const Propagator expansion = propagate_unitary(mirror, p_base, n);
  if ((prop.U - expansion.U).cwiseAbs().maxCoeff() >= 1e-10)
    throw MicroreversibilityViolation(
        "compression_propagator: mirror identity violated beyond 1e-10");
  return prop;
}

JumpOperators jump_operators(const SpinParams& p) {
  const Spectrum s = spectrum(p);
  JumpOperators ops;
  ops.omega1 = 2.0 * s.k + 2.0 * p.J;
  ops.omega2 = 2.0 * s.k - 2.0 * p.J;
  if (std::abs(ops.omega2) < 1e-12)
    throw DegenerateSpectrum("jump_operators: omega2 = 2k - 2J vanishes (k = J)");

  ops.X1 = 0.5 * ((s.c - s.d) * (s.state(1) * s.state(3).adjoint()) +
                  (s.a + s.b) * (s.state(0) * s.state(2).adjoint()));
  ops.X2 = 0.5 * ((s.c + s.d) * (s.state(2) * s.state(3).adjoint()) +
                  (s.a - s.b) * (s.state(0) * s.state(1).adjoint()));
  return ops;
}

void DissipativeConfig::validate() const {
  fixed_params.validate();
  if (!(bath_temperature > 0.0))
    throw NonPositiveTemperature("DissipativeConfig: bath temperature must be positive");
  if (!(Gamma > 0.0)) throw InvalidFields("DissipativeConfig: Gamma must be positive");
  if (!(duration >= 0.0)) throw InvalidFields("DissipativeConfig: duration must be >= 0");
}

std::vector<Mat4> evolve_lindblad(const Mat4& rho0, const DissipativeConfig& cfg,
                                  const std::vector<double>& sample_times) {
  cfg.validate();
  for (size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < 0.0 || sample_times[i] > cfg.duration + 1e-12)
      throw InvalidFields("evolve_lindblad: sample time outside [0, duration]");
    if (i > 0 && sample_times[i] < sample_times[i - 1])
      throw InvalidFields("evolve_lindblad: sample times must be ascending");
  }

  const Mat4 h = build_hamiltonian(cfg.fixed_params);
  const JumpOperators jump = jump_operators(cfg.fixed_params);
  const double n1 = 1.0 / std::expm1(jump.omega1 / cfg.bath_temperature);
  const double n2 = 1.0 / std::expm1(jump.omega2 / cfg.bath_temperature);

  const Mat4 id = Mat4::Identity();
  Mat16 gen = Complex(0, 1) * (kron4(h.transpose(), id) - kron4(id, h));
  gen += cfg.Gamma * (n1 + 1.0) * dissipator(jump.X1);
  gen += cfg.Gamma * n1 * dissipator(jump.X1.adjoint());
  gen += cfg.Gamma * (n2 + 1.0) * dissipator(jump.X2);
  gen += cfg.Gamma * n2 * dissipator(jump.X2.adjoint());

  const double dt_max = cfg.step_size();
  Vec16 v = vectorize(rho0);
  std::vector<Mat4> out;
  out.reserve(sample_times.size());
  double t = 0.0;

  auto take_sample = [&](const Vec16& vv) {
    Mat4 rho = devectorize(vv);
    if (std::abs(rho.trace().real() - 1.0) >= 1e-8)
      throw StepSizeTooLarge("evolve_lindblad: trace drifted beyond 1e-8");
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho + rho.adjoint()).eval());
    if (es.eigenvalues().minCoeff() <= -1e-8)
      throw StepSizeTooLarge("evolve_lindblad: positivity violated beyond 1e-8");
    out.push_back(rho);
  };

  for (double sample : sample_times) {
    const double span = sample - t;
    if (span > 1e-15) {
      const long nsteps = std::max<long>(1, static_cast<long>(std::ceil(span / dt_max)));
      const double hstep = span / static_cast<double>(nsteps);
      for (long j = 0; j < nsteps; ++j) {
        const Vec16 k1 = gen * v;
        const Vec16 k2 = gen * (v + 0.5 * hstep * k1);
        const Vec16 k3 = gen * (v + 0.5 * hstep * k2);
        const Vec16 k4 = gen * (v + hstep * k3);
        v += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      t = sample;
    }
    take_sample(v);
  }
  return out;
}

Mat4 evolve_lindblad_final(const Mat4& rho0, const DissipativeConfig& cfg) {
  return evolve_lindblad(rho0, cfg, {cfg.duration}).back();
}

double transition_xi(const Propagator& U, const Spectrum& low, const Spectrum& high) {
  const Mat4& m = U.U;
  const Mat4 mt = m.transpose();
  const double e1 = probability(high.state(0), m, low.state(3));
  const double e2 = probability(high.state(3), m, low.state(0));
  const double e3 = probability(low.state(3), mt, high.state(0));
  const double e4 = probability(low.state(0), mt, high.state(3));
  const double lo = std::min(std::min(e1, e2), std::min(e3, e4));
  const double hi = std::max(std::max(e1, e2), std::max(e3, e4));
  if (hi - lo >= 1e-8)
    throw MicroreversibilityViolation("transition_xi: probability conservation violated");
  return e1;
}

TransitionProbabilities transition_lambda_delta(const Propagator& U, const Propagator& V,
                                                const Spectrum& low, const Spectrum& high) {
  const Mat4& m = U.U;
  const Mat4 w = V.state_map();

  const double lam = probability(basis_state(0), m, low.state(3));
  const double lam2 = probability(basis_state(3), m, low.state(0));
  if (std::abs(lam - lam2) >= 1e-8)
    throw MicroreversibilityViolation("transition_lambda_delta: lambda pair differs");

  const double del = probability(basis_state(3), w, high.state(0));
  const double del2 = probability(basis_state(0), w, high.state(3));
  if (std::abs(del - del2) >= 1e-8)
    throw MicroreversibilityViolation("transition_lambda_delta: delta pair differs");

  if (probability(basis_state(1), m, low.state(0)) >= 1e-10 ||
      probability(basis_state(2), m, low.state(0)) >= 1e-10)
    throw MicroreversibilityViolation(
        "transition_lambda_delta: middle-sector cross terms do not vanish");

  TransitionProbabilities probs;
  probs.lambda = lam;
  probs.delta = del;
  probs.xi = transition_xi(U, low, high);
  probs.tau = U.protocol.tau;
  return probs;
}

TransitionProbabilities transition_probabilities(double B_low, double B_high, double tau,
                                                 const SpinParams& p_base, long steps) {
  SpinParams low_p = p_base;
  low_p.B = B_low;
  SpinParams high_p = p_base;
  high_p.B = B_high;
  const Spectrum low = spectrum(low_p);
  const Spectrum high = spectrum(high_p);
  const Propagator U = propagate_unitary(FieldProtocol::expansion(B_low, B_high, tau), p_base,
                                         steps);
  const Propagator V = compression_propagator(FieldProtocol::compression(B_low, B_high, tau),
                                              p_base, steps);
  return transition_lambda_delta(U, V, low, high);
}

InterferenceDecomposition interference_decomposition(const Propagator& prop,
                                                     const Spectrum& low,
                                                     const Spectrum& high) {
  const bool expansion = prop.protocol.direction == RampDirection::Expansion;
  const Spectrum& coeff = expansion ? high : low;
  if (coeff.params.gamma * coeff.params.J < 1e-12)
    throw DegenerateSpectrum(
        "interference_decomposition: amplitudes undefined in the commuting limit");
  const double denom = coeff.a * coeff.d - coeff.b * coeff.c;
  if (std::abs(denom) < 1e-12)
    throw DegenerateSpectrum("interference_decomposition: a*d - b*c underflows");

  const double sq2 = std::sqrt(2.0);
  InterferenceDecomposition out;
  if (expansion) {
    const Mat4& m = prop.U;
    out.amp_a = sq2 * coeff.a / denom * (high.state(3).adjoint() * m * low.state(3))(0, 0);
    out.amp_b = sq2 * coeff.c / denom * (high.state(0).adjoint() * m * low.state(3))(0, 0);
  } else {
    const Mat4 w = prop.state_map();
    out.amp_a = sq2 * coeff.a / denom * (low.state(3).adjoint() * w * high.state(3))(0, 0);
    out.amp_b = sq2 * coeff.c / denom * (low.state(0).adjoint() * w * high.state(3))(0, 0);
  }
  out.total = std::norm(out.amp_a - out.amp_b);
  return out;
}

}  // namespace spinotto
