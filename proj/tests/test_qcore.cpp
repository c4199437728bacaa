#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "spinotto/qcore.hpp"

using namespace spinotto;

namespace {

Eigen::Vector4d sorted_eigenvalues(const Mat4& h) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(h);
  return es.eigenvalues();
}

Mat4 pure_state(const Vec4& psi) { return psi * psi.adjoint(); }

}  // namespace

TEST_CASE("hamiltonian matrix and eigenvalues") {
  SUBCASE("B=0, gamma=0: levels {-2,0,0,2}") {
    const Eigen::Vector4d ev = sorted_eigenvalues(build_hamiltonian({0.0, 1.0, 0.0}));
    const Eigen::Vector4d expect(-2, 0, 0, 2);
    CHECK((ev - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("B=1, gamma=1: levels {-2sqrt2, -2, 2, 2sqrt2}") {
    const Eigen::Vector4d ev = sorted_eigenvalues(build_hamiltonian({1.0, 1.0, 1.0}));
    const double s = 2.0 * std::sqrt(2.0);
    const Eigen::Vector4d expect(-s, -2, 2, s);
    CHECK((ev - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("B=4, gamma=0.5: explicit matrix against the dense eigensolver") {
    const SpinParams p{4.0, 1.0, 0.5};
    const Mat4 h = build_hamiltonian(p);
    CHECK(is_hermitian(h, 1e-12));
    Eigen::SelfAdjointEigenSolver<Mat4> es(h);
    Mat4 rebuilt = Mat4::Zero();
    for (int i = 0; i < 4; ++i)
      rebuilt += es.eigenvalues()(i) * pure_state(es.eigenvectors().col(i));
    CHECK((rebuilt - h).cwiseAbs().maxCoeff() < 1e-12);
    const double k = p.k();
    Eigen::Vector4d expect(-2 * k, -2, 2, 2 * k);
    std::sort(expect.data(), expect.data() + 4);
    CHECK((es.eigenvalues() - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("only the expected sparsity pattern is populated") {
    const Mat4 h = build_hamiltonian({2.0, 1.0, 0.3});
    CHECK(h(0, 0) == Complex(-4.0));
    CHECK(h(3, 3) == Complex(4.0));
    CHECK(h(0, 3).real() == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(h(1, 2) == Complex(2.0));
    CHECK(std::abs(h(0, 1)) == 0.0);
    CHECK(std::abs(h(0, 2)) == 0.0);
    CHECK(std::abs(h(1, 3)) == 0.0);
  }
}

TEST_CASE("analytic spectrum") {
  SUBCASE("B=1, gamma=1: energies and the singlet eigenvector") {
    const Spectrum s = analytic_spectrum({1.0, 1.0, 1.0});
    const double k = std::sqrt(2.0);
    CHECK(s.energy(0) == doctest::Approx(-2 * k).epsilon(1e-14));
    CHECK(s.energy(1) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(s.energy(2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s.energy(3) == doctest::Approx(2 * k).epsilon(1e-14));
    Vec4 singlet = Vec4::Zero();
    singlet(1) = 1.0 / std::sqrt(2.0);
    singlet(2) = -1.0 / std::sqrt(2.0);
    CHECK((s.state(1) - singlet).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("gamma=0 exactly is degenerate; the fallback keeps the sector limit") {
    CHECK_THROWS_AS(analytic_spectrum({1.0, 1.0, 0.0}), DegenerateSpectrum);
    const Spectrum s = spectrum({1.0, 1.0, 0.0});
    Vec4 ground = Vec4::Zero();
    ground(0) = 1.0;  // |00>, the gamma->0 limit of the k-branch ground state
    CHECK((s.state(0) - ground).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(s.a == 0.0);
    CHECK(s.d == 0.0);
  }
  SUBCASE("small gamma joins the fallback limit continuously") {
    const Spectrum s = analytic_spectrum({1.0, 1.0, 1e-6});
    CHECK(std::abs(s.state(0)(0)) > 0.999999);
    const Mat4 h = build_hamiltonian({1.0, 1.0, 1e-6});
    const double e0 = ((s.state(0).adjoint() * h * s.state(0))(0, 0)).real();
    CHECK(e0 == doctest::Approx(-2 * s.k).epsilon(1e-12));
  }
  SUBCASE("B=4, gamma=1: agrees with the numeric eigensolver up to phase") {
    const SpinParams p{4.0, 1.0, 1.0};
    const Spectrum s = analytic_spectrum(p);
    Eigen::SelfAdjointEigenSolver<Mat4> es(build_hamiltonian(p));
    // Same level ordering here: -2k < -2J < 2J < 2k since k > J.
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(es.eigenvalues()(i) - s.energy(i)) < 1e-10);
      const double overlap = std::abs((es.eigenvectors().col(i).adjoint() * s.state(i))(0, 0));
      CHECK(overlap == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("eigenvector phase convention: first nonzero amplitude positive") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> fb(0.1, 6.0), fg(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const Spectrum s = analytic_spectrum({fb(rng), 1.0, fg(rng)});
      for (int i = 0; i < 4; ++i) {
        for (int r = 0; r < 4; ++r) {
          const Complex amp = s.state(i)(r);
          if (std::abs(amp) > 1e-12) {
            CHECK(amp.real() > 0.0);
            CHECK(std::abs(amp.imag()) < 1e-14);
            break;
          }
        }
      }
    }
  }
}

TEST_CASE("spectrum invariants over random parameters") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> fb(0.05, 6.0), fg(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const SpinParams p{fb(rng), 1.0, fg(rng)};
    const Spectrum s = spectrum(p);
    const Mat4 h = build_hamiltonian(p);

    Mat4 rebuilt = Mat4::Zero();
    for (int i = 0; i < 4; ++i) rebuilt += s.energy(i) * pure_state(s.state(i));
    REQUIRE((rebuilt - h).cwiseAbs().maxCoeff() < 1e-10);

    REQUIRE((s.states.adjoint() * s.states - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 0; i < 4; ++i)
      REQUIRE((h * s.state(i) - s.energy(i) * s.state(i)).cwiseAbs().maxCoeff() < 1e-10);

    Eigen::Vector4d expect(-2 * s.k, -2 * p.J, 2 * p.J, 2 * s.k);
    std::sort(expect.data(), expect.data() + 4);
    REQUIRE((sorted_eigenvalues(h) - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("gibbs state") {
  const SpinParams p{1.0, 1.0, 1.0};
  const Mat4 h = build_hamiltonian(p);

  SUBCASE("infinite-temperature limit is maximally mixed") {
    const GibbsState g = gibbs_state(h, 1e9);
    CHECK((g.rho - 0.25 * Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("populations follow the Boltzmann weights with the closed-form Z") {
    const GibbsState g = gibbs_state(h, 1.0);
    const double z = 2 * std::cosh(2 * std::sqrt(2.0)) + 2 * std::cosh(2.0);
    CHECK(g.partition == doctest::Approx(z).epsilon(1e-10));
    const Spectrum s = analytic_spectrum(p);
    for (int i = 0; i < 4; ++i) {
      const double pop = ((s.state(i).adjoint() * g.rho * s.state(i))(0, 0)).real();
      CHECK(pop == doctest::Approx(std::exp(-s.energy(i)) / z).epsilon(1e-10));
    }
  }
  SUBCASE("thermal energy matches the hyperbolic closed form") {
    const GibbsState g = gibbs_state(h, 1.0);
    const double k = std::sqrt(2.0);
    const double z = 2 * std::cosh(2 * k) + 2 * std::cosh(2.0);
    const double expect = -4 * k * std::sinh(2 * k) / z - 4 * std::sinh(2.0) / z;
    CHECK(internal_energy(g.rho, h) == doctest::Approx(expect).epsilon(1e-10));
  }
  SUBCASE("normalisation and closed-form partition over random parameters") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> fb(0.1, 5.0), fg(0.0, 1.0), ft(0.5, 20.0);
    for (int trial = 0; trial < 40; ++trial) {
      const SpinParams q{fb(rng), 1.0, fg(rng)};
      const double T = ft(rng);
      const GibbsState g = gibbs_state(build_hamiltonian(q), T);
      REQUIRE(std::abs(g.rho.trace().real() - 1.0) < 1e-12);
      const double z = 2 * std::cosh(2 * q.k() / T) + 2 * std::cosh(2 * q.J / T);
      REQUIRE(std::abs(g.partition - z) / z < 1e-10);
      REQUIRE(is_density_matrix(g.rho));
    }
  }
  SUBCASE("rejects non-positive temperature") {
    CHECK_THROWS_AS(gibbs_state(h, 0.0), NonPositiveTemperature);
    CHECK_THROWS_AS(gibbs_state(h, -1.0), NonPositiveTemperature);
  }
}

TEST_CASE("internal energy") {
  const SpinParams p{1.0, 1.0, 1.0};
  const Mat4 h = build_hamiltonian(p);

  CHECK(internal_energy(0.25 * Mat4::Identity(), h) == doctest::Approx(0.0).epsilon(1e-14));

  const Spectrum s = analytic_spectrum(p);
  CHECK(internal_energy(pure_state(s.state(0)), h) ==
        doctest::Approx(-2 * s.k).epsilon(1e-12));

  CHECK_THROWS_AS(internal_energy(Mat2::Identity(), h), DimensionMismatch);
}

TEST_CASE("partial trace") {
  SUBCASE("maximally entangled middle states reduce to I/2") {
    const Spectrum s = analytic_spectrum({1.0, 1.0, 1.0});
    const Mat2 r = partial_trace(pure_state(s.state(1)));
    CHECK((r - 0.5 * Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("product state reduces to its factor") {
    Mat4 rho = Mat4::Zero();
    rho(0, 0) = 1.0;  // |00><00|
    Mat2 expect = Mat2::Zero();
    expect(0, 0) = 1.0;
    CHECK((partial_trace(rho, 1) - expect).cwiseAbs().maxCoeff() == 0.0);
    CHECK((partial_trace(rho, 2) - expect).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("thermal state matches the element-wise contraction") {
    const GibbsState g = gibbs_state(build_hamiltonian({1.0, 1.0, 1.0}), 1.0);
    const Mat2 expect = oracle::partial_trace_contraction(g.rho);
    CHECK((partial_trace(g.rho, 1) - expect).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(partial_trace(g.rho, 1).trace().real() - 1.0) < 1e-12);
  }
  SUBCASE("linearity and trace preservation on random Hermitian inputs") {
    std::mt19937 rng(29);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_hermitian = [&] {
      Mat4 m;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
      return Mat4(0.5 * (m + m.adjoint()));
    };
    for (int trial = 0; trial < 25; ++trial) {
      const Mat4 x = random_hermitian(), y = random_hermitian();
      const double al = gauss(rng), be = gauss(rng);
      const Mat2 lhs = partial_trace(Mat4(al * x + be * y));
      const Mat2 rhs = al * partial_trace(x) + be * partial_trace(y);
      REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
      REQUIRE(std::abs(partial_trace(x).trace().real() - x.trace().real()) < 1e-12);
    }
  }
}

TEST_CASE("trace distance") {
  Mat4 rho00 = Mat4::Zero();
  rho00(0, 0) = 1.0;
  Mat4 rho11 = Mat4::Zero();
  rho11(3, 3) = 1.0;

  CHECK(trace_distance(rho00, rho00) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(trace_distance(rho00, rho11) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(trace_distance(Mat4(0.25 * Mat4::Identity()), rho00) ==
        doctest::Approx(0.75).epsilon(1e-14));
  CHECK_THROWS_AS(trace_distance(Mat2::Identity(), rho00), DimensionMismatch);

  SUBCASE("metric properties on sampled state triples") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> fb(0.1, 5.0), fg(0.0, 1.0), ft(0.5, 20.0);
    auto random_state = [&] {
      return gibbs_state(build_hamiltonian({fb(rng), 1.0, fg(rng)}), ft(rng)).rho;
    };
    for (int trial = 0; trial < 20; ++trial) {
      const Mat4 a = random_state(), b = random_state(), c = random_state();
      const double dab = trace_distance(a, b);
      REQUIRE(dab == trace_distance(b, a));
      REQUIRE(dab <= trace_distance(a, c) + trace_distance(c, b) + 1e-12);
      REQUIRE(dab >= 0.0);
      REQUIRE(dab <= 1.0);
    }
  }
}
