#include "telefid/channels.hpp"

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace telefid;
using namespace telefid::channels;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("pure channel construction and canonical order") {
  const PureChannel ch(0.6, 0.8);
  REQUIRE(ch.alpha() == Approx(0.6));
  REQUIRE(ch.beta() == Approx(0.8));
  REQUIRE_FALSE(ch.reordered());

  const PureChannel swapped(0.8, 0.6);
  REQUIRE(swapped.alpha() == Approx(0.6));
  REQUIRE(swapped.reordered());

  REQUIRE_THROWS_AS(PureChannel(-0.6, 0.8), std::invalid_argument);
  REQUIRE_THROWS_AS(PureChannel(0.7, 0.8), std::invalid_argument);
  // near-unit inputs are renormalized
  const PureChannel nudged(0.6 * (1 + 4e-10), 0.8);
  REQUIRE(nudged.alpha() * nudged.alpha() + nudged.beta() * nudged.beta() ==
          Approx(1.0).margin(1e-15));

  for (double c : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    const auto fc = PureChannel::from_concurrence(c);
    REQUIRE(pure_concurrence(fc) == Approx(c).margin(1e-12));
    REQUIRE(fc.alpha() <= fc.beta());
  }
  const auto fa = PureChannel::from_alpha(0.6);
  REQUIRE(fa.beta() == Approx(0.8).margin(1e-15));
  REQUIRE_THROWS_AS(PureChannel::from_alpha(1.2), std::invalid_argument);
  REQUIRE_THROWS_AS(PureChannel::from_concurrence(1.2), std::invalid_argument);
}

TEST_CASE("pure channel density and reduced states") {
  const PureChannel ch(0.6, 0.8);
  const auto rho = pure_channel_density(ch);
  const Eigen::Vector4cd k = ch.ket().vec();
  REQUIRE((rho.mat() - k * k.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  const auto ra = qkernel::partial_trace_second(rho);
  REQUIRE(ra.mat()(0, 0).real() == Approx(0.36).margin(1e-14));
  REQUIRE(ra.mat()(1, 1).real() == Approx(0.64).margin(1e-14));
  REQUIRE(std::abs(ra.mat()(0, 1)) < 1e-15);
}

TEST_CASE("x-state parameter validation names the violated block") {
  REQUIRE_NOTHROW(XStateParams(0.25, 0.25, 0.25, 0.25, 0.2, 0.1));
  REQUIRE_THROWS_WITH(XStateParams(-0.05, 0.4, 0.4, 0.25, 0.0, 0.0),
                      ContainsSubstring("negative diagonal"));
  REQUIRE_THROWS_WITH(XStateParams(0.3, 0.3, 0.3, 0.3, 0.0, 0.0),
                      ContainsSubstring("trace"));
  REQUIRE_THROWS_WITH(XStateParams(0.25, 0.25, 0.25, 0.25, 0.3, 0.0),
                      ContainsSubstring("inner block"));
  REQUIRE_THROWS_WITH(XStateParams(0.25, 0.25, 0.25, 0.25, 0.0, 0.3),
                      ContainsSubstring("outer block"));
  REQUIRE_THROWS_AS(XStateParams(0.25, 0.25, 0.25, 0.25, -0.1, 0.0),
                    std::invalid_argument);
}

TEST_CASE("x-state constructor strips off-diagonal phases") {
  const XStateParams p(0.25, 0.25, 0.25, 0.25, Complex(0.0, 0.2),
                       Complex(-0.1, 0.0));
  REQUIRE(p.rho23() == Approx(0.2));
  REQUIRE(p.phase23() == Approx(std::numbers::pi / 2));
  REQUIRE(p.rho14() == Approx(0.1));
  REQUIRE(p.phase14() == Approx(std::numbers::pi));

  const auto rho = xstate_density(p);
  REQUIRE(rho.mat()(1, 2).real() == Approx(0.2));
  REQUIRE(rho.mat()(1, 2).imag() == 0.0);
}

TEST_CASE("x-state density layout") {
  const XStateParams p(0.1, 0.3, 0.4, 0.2, 0.25, 0.1);
  const auto m = xstate_density(p).mat();
  REQUIRE(m(0, 0).real() == Approx(0.1));
  REQUIRE(m(1, 1).real() == Approx(0.3));
  REQUIRE(m(2, 2).real() == Approx(0.4));
  REQUIRE(m(3, 3).real() == Approx(0.2));
  REQUIRE(m(1, 2).real() == Approx(0.25));
  REQUIRE(m(0, 3).real() == Approx(0.1));
  REQUIRE(std::abs(m(0, 1)) + std::abs(m(0, 2)) + std::abs(m(1, 3)) +
              std::abs(m(2, 3)) == 0.0);
}

TEST_CASE("closed-form x-state concurrence matches the spectral value") {
  for (std::uint64_t i = 0; i < 300; ++i) {
    const auto p = sample_xstate(31415, i);
    const double closed = xstate_concurrence(p);
    const double spectral = qkernel::wootters_concurrence(xstate_density(p));
    REQUIRE(closed == Approx(spectral).margin(1e-10));
  }
}

TEST_CASE("werner states and their entanglement onset") {
  const auto p = werner_xstate(WernerParams(0.5));
  REQUIRE(p.rho11() == Approx(0.125));
  REQUIRE(p.rho22() == Approx(0.375));
  REQUIRE(p.rho23() == Approx(0.25));
  REQUIRE(p.rho14() == 0.0);

  for (double g : {0.0, 0.1, 0.3, 1.0 / 3.0, 0.4, 0.7, 1.0}) {
    const auto w = werner_xstate(WernerParams(g));
    const double want = std::max(0.0, (3.0 * g - 1.0) / 2.0);
    REQUIRE(xstate_concurrence(w) == Approx(want).margin(1e-12));
    REQUIRE(qkernel::wootters_concurrence(xstate_density(w)) ==
            Approx(want).margin(1e-10));
  }
  REQUIRE(xstate_concurrence(werner_xstate(WernerParams(1.0 / 3.0 - 2e-12))) == 0.0);
  REQUIRE(xstate_concurrence(werner_xstate(WernerParams(1.0 / 3.0 + 2e-12))) > 0.0);

  REQUIRE_THROWS_AS(WernerParams(-0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(WernerParams(1.1), std::invalid_argument);
}

TEST_CASE("principal-subspace predicate") {
  REQUIRE(principal_subspace_ok(werner_xstate(WernerParams(0.5))));
  REQUIRE_FALSE(principal_subspace_ok(werner_xstate(WernerParams(0.2))));
  // entanglement in the outer block instead
  const XStateParams outer(0.35, 0.15, 0.15, 0.35, 0.05, 0.25);
  REQUIRE_FALSE(principal_subspace_ok(outer));
  REQUIRE(xstate_concurrence(outer) == Approx(2 * (0.25 - 0.15)).margin(1e-14));
  REQUIRE(principal_concurrence_signed(outer) < 0.0);
}

TEST_CASE("pure channels embed as x states") {
  for (double c : {0.2, 0.5, 0.9, 1.0}) {
    const auto ch = PureChannel::from_concurrence(c);
    const auto p = xstate_embedding(ch);
    REQUIRE(xstate_concurrence(p) == Approx(c).margin(1e-12));
    REQUIRE(principal_subspace_ok(p));
    REQUIRE((xstate_density(p).mat() - pure_channel_density(ch).mat())
                .cwiseAbs()
                .maxCoeff() < 1e-15);
  }
}

TEST_CASE("bell-diagonal weights reconstruct the state") {
  REQUIRE_FALSE(bell_diagonal_weights(XStateParams(0.1, 0.3, 0.4, 0.2, 0.0, 0.0))
                    .has_value());

  const auto w = bell_diagonal_weights(werner_xstate(WernerParams(0.5)));
  REQUIRE(w.has_value());
  REQUIRE((*w)[0] == Approx(0.125));
  REQUIRE((*w)[1] == Approx(0.125));
  REQUIRE((*w)[2] == Approx(0.625));
  REQUIRE((*w)[3] == Approx(0.125));

  std::mt19937 g(77);
  const std::array<qkernel::Ket4, 4> bells = {
      qkernel::bell_phi_plus(), qkernel::bell_phi_minus(),
      qkernel::bell_psi_plus(), qkernel::bell_psi_minus()};
  for (int i = 0; i < 50; ++i) {
    const double a = 0.25 * test_support::random_unit(g);
    const double b = 0.5 - a;
    const double r23 = b * test_support::random_unit(g);
    const double r14 = a * test_support::random_unit(g);
    const XStateParams p(a, b, b, a, r23, r14);
    const auto weights = bell_diagonal_weights(p);
    REQUIRE(weights.has_value());
    double sum = 0.0;
    Eigen::Matrix4cd recon = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 4; ++k) {
      REQUIRE((*weights)[k] >= -1e-12);
      sum += (*weights)[k];
      recon += (*weights)[k] * (bells[k].vec() * bells[k].vec().adjoint());
    }
    REQUIRE(sum == Approx(1.0).margin(1e-12));
    REQUIRE((recon - xstate_density(p).mat()).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("random x-state samplers are valid and reproducible") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto p = sample_xstate(999, i);
    const auto q = sample_xstate(999, i);
    REQUIRE(p.rho23() == q.rho23());
    REQUIRE(p.rho11() + p.rho22() + p.rho33() + p.rho44() ==
            Approx(1.0).margin(1e-12));

    const auto pr = sample_principal_xstate(999, i);
    REQUIRE(principal_subspace_ok(pr));
  }
  REQUIRE(sample_xstate(999, 0).rho23() != sample_xstate(999, 1).rho23());
  REQUIRE(sample_xstate(999, 0).rho23() != sample_xstate(1000, 0).rho23());
}
