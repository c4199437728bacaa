#include <doctest.h>

#include "oracles.hpp"
#include "spinotto/dynamics.hpp"

using namespace spinotto;

namespace {

double element_prob(const Vec4& bra, const Mat4& op, const Vec4& ket) {
  return std::norm((bra.adjoint() * op * ket)(0, 0));
}

Vec4 basis(int i) {
  Vec4 v = Vec4::Zero();
  v(i) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("ramp propagator") {
  const SpinParams p1{1.0, 1.0, 1.0};

  SUBCASE("commuting family at gamma=0: no sector mixing, xi = 0") {
    const SpinParams p0{1.0, 1.0, 0.0};
    for (double tau : {0.2, 1.0, 6.0}) {
      const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, tau), p0);
      CHECK(std::abs(u.U(0, 3)) < 1e-12);
      CHECK(std::abs(u.U(3, 0)) < 1e-12);
      const double xi = transition_xi(u, spectrum({1.0, 1.0, 0.0}), spectrum({4.0, 1.0, 0.0}));
      CHECK(xi < 1e-15);
    }
  }
  SUBCASE("sudden quench limit returns the identity") {
    const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, 1e-8), p1);
    CHECK((u.U - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("tau=0.3 sector amplitude against the adaptive integrator") {
    const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, 0.3), p1);
    const Mat4 ref = oracle::expansion_oracle(1, 4, 0.3, p1);
    const Spectrum low = analytic_spectrum({1.0, 1.0, 1.0});
    const Spectrum high = analytic_spectrum({4.0, 1.0, 1.0});
    const double got = element_prob(high.state(0), u.U, low.state(3));
    const double expect = element_prob(high.state(0), ref, low.state(3));
    CHECK(got == doctest::Approx(expect).epsilon(1e-6));
    CHECK((u.U - ref).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("matches a dense general-eigensolver midpoint product step for step") {
    const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, 0.7), p1, 500);
    const Mat4 ref = oracle::dense_midpoint_product(1, 4, 0.7, p1, 500);
    CHECK((u.U - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("rejects too few steps") {
    CHECK_THROWS_AS(propagate_unitary(FieldProtocol::expansion(1, 4, 1), p1, 8), StepsTooFew);
  }
  SUBCASE("unitarity, determinant modulus and step-doubling certificate") {
    for (double tau : {0.3, 1.0, 5.0, 20.0}) {
      const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, tau), p1);
      REQUIRE(is_unitary(u.U, 1e-10));
      REQUIRE(std::abs(std::abs(u.U.determinant()) - 1.0) < 1e-10);
      const Propagator u2 =
          propagate_unitary(FieldProtocol::expansion(1, 4, tau), p1, 2 * u.steps);
      REQUIRE((u.U - u2.U).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  SUBCASE("selection rule: middle sector decouples from the k-branch sector") {
    for (double g : {0.25, 1.0})
      for (double tau : {0.4, 3.0}) {
        const SpinParams p{1.0, 1.0, g};
        const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, tau), p);
        const Spectrum low = spectrum({1.0, 1.0, g});
        const Spectrum high = spectrum({4.0, 1.0, g});
        for (int outer : {0, 3})
          for (int mid : {1, 2}) {
            REQUIRE(element_prob(high.state(outer), u.U, low.state(mid)) < 1e-20);
            REQUIRE(element_prob(high.state(mid), u.U, low.state(outer)) < 1e-20);
          }
      }
  }
}

TEST_CASE("compression propagator") {
  const SpinParams p1{1.0, 1.0, 1.0};

  SUBCASE("mirror identity against the matching expansion") {
    const Propagator v = compression_propagator(FieldProtocol::compression(1, 4, 1), p1);
    const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, 1), p1, v.steps);
    CHECK((v.U - u.U).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("gamma=0: diagonal in the shared sector basis") {
    const SpinParams p0{1.0, 1.0, 0.0};
    const Propagator v = compression_propagator(FieldProtocol::compression(1, 4, 2), p0);
    CHECK(std::abs(v.U(0, 3)) < 1e-12);
    CHECK(std::abs(v.U(1, 1)) > 0.0);
  }
  SUBCASE("state map matches the time-ordered down-ramp integration") {
    // Integrating the down-ramp directly gives the transpose of the mirrored
    // composition; state_map() applies exactly that operator.
    const SpinParams p{1.0, 1.0, 0.5};
    const Propagator v = compression_propagator(FieldProtocol::compression(1, 4, 5), p);
    const Mat4 ref = oracle::compression_oracle(1, 4, 5, p);
    CHECK((v.state_map() - ref).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((v.U - Mat4(ref.transpose())).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("requires a compression protocol") {
    CHECK_THROWS_AS(compression_propagator(FieldProtocol::expansion(1, 4, 1), p1),
                    InvalidFields);
  }
}

TEST_CASE("jump operators") {
  SUBCASE("transition energies at B=4, gamma=1") {
    const JumpOperators ops = jump_operators({4.0, 1.0, 1.0});
    const double k = std::sqrt(17.0);
    CHECK(ops.omega1 == doctest::Approx(2 * k + 2).epsilon(1e-14));
    CHECK(ops.omega2 == doctest::Approx(2 * k - 2).epsilon(1e-14));
  }
  SUBCASE("ladder identity [H, Xi] = -omega_i Xi on random parameters") {
    for (double b : {0.7, 2.0, 4.0, 5.5})
      for (double g : {0.0, 0.3, 1.0}) {
        if (std::abs(SpinParams{b, 1.0, g}.k() - 1.0) < 1e-9) continue;
        const SpinParams p{b, 1.0, g};
        const Mat4 h = build_hamiltonian(p);
        const JumpOperators ops = jump_operators(p);
        REQUIRE((h * ops.X1 - ops.X1 * h + ops.omega1 * ops.X1).cwiseAbs().maxCoeff() < 1e-10);
        REQUIRE((h * ops.X2 - ops.X2 * h + ops.omega2 * ops.X2).cwiseAbs().maxCoeff() < 1e-10);
      }
  }
  SUBCASE("X1 occupies exactly the two stated eigenbasis elements") {
    const SpinParams p{4.0, 1.0, 1.0};
    const Spectrum s = analytic_spectrum(p);
    const JumpOperators ops = jump_operators(p);
    const Mat4 in_basis = s.states.adjoint() * ops.X1 * s.states;
    CHECK(std::abs(in_basis(1, 3)) == doctest::Approx((s.c - s.d) / 2).epsilon(1e-12));
    CHECK(std::abs(in_basis(0, 2)) == doctest::Approx((s.a + s.b) / 2).epsilon(1e-12));
    double off_mass = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (!((i == 1 && j == 3) || (i == 0 && j == 2))) off_mass += std::abs(in_basis(i, j));
    CHECK(off_mass < 1e-12);
  }
  SUBCASE("the two channels resolve the bare sigma_x coupling") {
    for (double g : {0.0, 0.5, 1.0}) {
      const SpinParams p{4.0, 1.0, g};
      const JumpOperators ops = jump_operators(p);
      const Mat4 sum = ops.X1 + ops.X2 + ops.X1.adjoint() + ops.X2.adjoint();
      const Mat4 sx1 = kron(sigma_x(), Mat2::Identity());
      REQUIRE((sum - sx1).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("degenerate at k = J") {
    CHECK_THROWS_AS(jump_operators({1.0, 1.0, 0.0}), DegenerateSpectrum);
    CHECK_THROWS_AS(jump_operators({0.8, 1.0, 0.6}), DegenerateSpectrum);
  }
}

TEST_CASE("lindblad evolution") {
  DissipativeConfig cfg;
  cfg.bath_temperature = 10.0;
  cfg.Gamma = 0.1;
  cfg.fixed_params = {4.0, 1.0, 1.0};

  SUBCASE("thermal state of the bath Hamiltonian is a fixed point") {
    const Mat4 gibbs = gibbs_state(build_hamiltonian(cfg.fixed_params), 10.0).rho;
    cfg.duration = 30.0;
    const Mat4 out = evolve_lindblad_final(gibbs, cfg);
    CHECK(trace_distance(out, gibbs) < 1e-8);
  }
  SUBCASE("trace preservation and positivity along a trajectory") {
    const Mat4 rho0 = gibbs_state(build_hamiltonian({1.0, 1.0, 1.0}), 1.0).rho;
    cfg.duration = 40.0;
    const std::vector<double> samples{0.0, 1.0, 5.0, 10.0, 20.0, 40.0};
    const std::vector<Mat4> traj = evolve_lindblad(rho0, cfg, samples);
    for (const Mat4& rho : traj) {
      REQUIRE(std::abs(rho.trace().real() - 1.0) < 1e-8);
      REQUIRE(is_density_matrix(rho, 1e-8, 1e-8, 1e-8));
    }
  }
  SUBCASE("distance to the bath thermal state is non-increasing") {
    const Mat4 rho0 = gibbs_state(build_hamiltonian({1.0, 1.0, 1.0}), 1.0).rho;
    const Mat4 target = gibbs_state(build_hamiltonian(cfg.fixed_params), 10.0).rho;
    cfg.duration = 60.0;
    std::vector<double> samples;
    for (int i = 0; i <= 24; ++i) samples.push_back(2.5 * i);
    const std::vector<Mat4> traj = evolve_lindblad(rho0, cfg, samples);
    for (size_t i = 1; i < traj.size(); ++i)
      REQUIRE(trace_distance(traj[i], target) <=
              trace_distance(traj[i - 1], target) + 1e-6);
  }
  SUBCASE("a step size far beyond the stability limit is rejected") {
    const Mat4 rho0 = gibbs_state(build_hamiltonian({1.0, 1.0, 1.0}), 1.0).rho;
    cfg.duration = 50.0;
    cfg.dt = 0.5;
    CHECK_THROWS_AS(evolve_lindblad_final(rho0, cfg), StepSizeTooLarge);
  }
}

TEST_CASE("transition probabilities") {
  const SpinParams p1{1.0, 1.0, 1.0};
  const Spectrum low = spectrum({1.0, 1.0, 1.0});
  const Spectrum high = spectrum({4.0, 1.0, 1.0});

  SUBCASE("xi vanishes for a long ramp") {
    const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, 20), p1);
    CHECK(transition_xi(u, low, high) < 1e-3);
  }
  SUBCASE("xi at tau=0.3 against the adaptive integrator") {
    const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, 0.3), p1);
    const Mat4 ref = oracle::expansion_oracle(1, 4, 0.3, p1);
    const double expect = element_prob(high.state(0), ref, low.state(3));
    CHECK(transition_xi(u, low, high) == doctest::Approx(expect).epsilon(1e-6));
  }
  SUBCASE("lambda and delta: adiabatic values at tau=20") {
    const TransitionProbabilities probs = transition_probabilities(1, 4, 20, p1);
    CHECK(std::abs(probs.lambda - high.a * high.a / 2) < 1e-3);
    CHECK(std::abs(probs.delta - low.a * low.a / 2) < 1e-3);
  }
  SUBCASE("lambda and delta: sudden values at tau -> 0") {
    const TransitionProbabilities probs = transition_probabilities(1, 4, 1e-7, p1);
    CHECK(probs.lambda == doctest::Approx(low.d * low.d / 2).epsilon(1e-9));
    CHECK(probs.delta == doctest::Approx(high.d * high.d / 2).epsilon(1e-9));
  }
  SUBCASE("lambda and delta at tau=0.5 against the adaptive integrator") {
    const TransitionProbabilities probs = transition_probabilities(1, 4, 0.5, p1);
    const Mat4 uref = oracle::expansion_oracle(1, 4, 0.5, p1);
    const Mat4 vref = oracle::compression_oracle(1, 4, 0.5, p1);
    const double lam_ref = element_prob(basis(0), uref, low.state(3));
    const double del_ref = element_prob(basis(3), vref, high.state(0));
    CHECK(probs.lambda == doctest::Approx(lam_ref).epsilon(1e-6));
    CHECK(probs.delta == doctest::Approx(del_ref).epsilon(1e-6));
  }
  SUBCASE("probability-conservation equalities hold over a (gamma, tau) grid") {
    for (double g : {0.0, 0.25, 0.5, 0.75, 1.0})
      for (double tau : {0.1, 0.5, 1.0, 5.0, 20.0}) {
        const SpinParams p{1.0, 1.0, g};
        const TransitionProbabilities probs = transition_probabilities(1, 4, tau, p);
        for (double value : {probs.xi, probs.lambda, probs.delta}) {
          REQUIRE(value >= 0.0);
          REQUIRE(value <= 1.0);
        }
      }
  }
  SUBCASE("a sector-mixing operator is rejected as unphysical for this ramp") {
    Mat4 swap01 = Mat4::Identity();
    swap01(0, 0) = swap01(1, 1) = 0.0;
    swap01(0, 1) = swap01(1, 0) = 1.0;  // |00> <-> |01|, mixes the sectors
    const Propagator bad{swap01, FieldProtocol::expansion(1, 4, 1), 100};
    CHECK_THROWS_AS(transition_lambda_delta(bad, bad, low, high), MicroreversibilityViolation);
  }
  SUBCASE("halving the default step count moves probabilities by < 1e-7") {
    for (double tau : {0.1, 1.0, 5.0, 20.0}) {
      const long full = default_ramp_steps(tau);
      const TransitionProbabilities a = transition_probabilities(1, 4, tau, p1, full);
      const TransitionProbabilities b = transition_probabilities(1, 4, tau, p1, full / 2);
      REQUIRE(std::abs(a.xi - b.xi) < 1e-7);
      REQUIRE(std::abs(a.lambda - b.lambda) < 1e-7);
      REQUIRE(std::abs(a.delta - b.delta) < 1e-7);
    }
  }
}

TEST_CASE("interference decomposition") {
  const SpinParams p1{1.0, 1.0, 1.0};
  const Spectrum low = spectrum({1.0, 1.0, 1.0});
  const Spectrum high = spectrum({4.0, 1.0, 1.0});

  SUBCASE("reconstructs lambda and delta at tau=0.3") {
    const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, 0.3), p1);
    const Propagator v = compression_propagator(FieldProtocol::compression(1, 4, 0.3), p1);
    const TransitionProbabilities probs = transition_lambda_delta(u, v, low, high);
    CHECK(interference_decomposition(u, low, high).total ==
          doctest::Approx(probs.lambda).epsilon(1e-8));
    CHECK(interference_decomposition(v, low, high).total ==
          doctest::Approx(probs.delta).epsilon(1e-8));
  }
  SUBCASE("adiabatic limit of the reconstructed lambda") {
    const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, 20), p1);
    CHECK(std::abs(interference_decomposition(u, low, high).total -
                   high.a * high.a / 2) < 1e-3);
  }
  SUBCASE("refuses the commuting limit") {
    const SpinParams p0{1.0, 1.0, 0.0};
    const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, 0.5), p0);
    CHECK_THROWS_AS(
        interference_decomposition(u, spectrum({1.0, 1.0, 0.0}), spectrum({4.0, 1.0, 0.0})),
        DegenerateSpectrum);
  }
}
