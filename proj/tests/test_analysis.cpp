#include "telefid/analysis.hpp"

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace telefid;
using namespace telefid::analysis;
using namespace telefid::channels;
using Catch::Approx;

namespace {

double lookup(const std::vector<std::pair<std::string, double>>& kv,
              const std::string& key) {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  FAIL("missing key " << key);
  return 0.0;
}

XStateParams shared_concurrence_state(double r11, double r44, double c) {
  const double q = r11 + r44;
  const double s = std::sqrt(r11 * r44);
  return XStateParams(r11, (1.0 - q) / 2.0, (1.0 - q) / 2.0, r44,
                      c / 2.0 + s, 0.0);
}

}  // namespace

TEST_CASE("pure-channel closed form") {
  REQUIRE(fp_closed(0.0, 0.0) == Approx(2.0 / 3.0));
  REQUIRE(fp_closed(1.0, 1.0) == Approx(1.0));
  REQUIRE(fp_closed(0.6, 1.0) == Approx(13.0 / 15.0).margin(1e-15));
  REQUIRE_THROWS_AS(fp_closed(-0.1, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(fp_closed(0.5, 1.1), std::invalid_argument);
}

TEST_CASE("x-channel closed forms agree where both apply") {
  for (int i = 0; i < 200; ++i) {
    const auto p = sample_principal_xstate(97, i);
    const double c = telefid::qkernel::rng::unit(98, i);
    REQUIRE(fx_closed(c, p) == Approx(fx_closed_general(c, p)).margin(1e-14));
  }

  // outside the principal regime only the general form is defined
  REQUIRE_THROWS_AS(fx_closed(0.9, werner_xstate(WernerParams(0.2))),
                    std::invalid_argument);
  const XStateParams outer(0.35, 0.15, 0.15, 0.35, 0.05, 0.25);
  REQUIRE_THROWS_AS(fx_closed(0.9, outer), std::invalid_argument);
  REQUIRE(std::isfinite(fx_closed_general(0.9, outer)));
  REQUIRE_THROWS_AS(fx_closed_general(1.5, outer), std::invalid_argument);
}

TEST_CASE("werner channel average is linear in the mixing weight") {
  // basis concurrence 0.9: F_X(gamma) = (15 + 14 gamma) / 30
  for (int i = 0; i <= 100; ++i) {
    const double gamma = i / 100.0;
    const auto p = werner_xstate(WernerParams(gamma));
    const double want = (15.0 + 14.0 * gamma) / 30.0;
    REQUIRE(fx_closed_general(0.9, p) == Approx(want).margin(1e-14));
    if (gamma > 1.0 / 3.0 + 1e-12)
      REQUIRE(fx_closed(0.9, p) == Approx(want).margin(1e-14));
  }
  REQUIRE(fx_closed_general(0.9, werner_xstate(WernerParams(0.5))) ==
          Approx(22.0 / 30.0).margin(1e-15));
}

TEST_CASE("outer coherence never enters the average") {
  for (int i = 0; i < 50; ++i) {
    const auto p = sample_xstate(113, i);
    const double cap = std::sqrt(p.rho11() * p.rho44());
    const XStateParams off(p.rho11(), p.rho22(), p.rho33(), p.rho44(),
                           p.rho23(), 0.0);
    const XStateParams on(p.rho11(), p.rho22(), p.rho33(), p.rho44(),
                          p.rho23(), 0.9 * cap);
    REQUIRE(fx_closed_general(0.7, off) == fx_closed_general(0.7, on));
    if (principal_subspace_ok(off) && principal_subspace_ok(on))
      REQUIRE(fx_closed(0.7, off) == fx_closed(0.7, on));
  }
}

TEST_CASE("threshold functions") {
  SECTION("hand values and the c = 1 identity") {
    REQUIRE(frak_C(0.5, 0.09, 0.04) == Approx(0.14).margin(1e-15));
    REQUIRE(cal_C(0.5, 0.09, 0.04) == Approx(0.13 / 0.62).margin(1e-15));
    std::mt19937 g(5);
    for (int i = 0; i < 50; ++i) {
      const double r11 = 0.3 * test_support::random_unit(g);
      const double r44 = 0.3 * test_support::random_unit(g);
      const double d = std::sqrt(r11) - std::sqrt(r44);
      REQUIRE(frak_C(1.0, r11, r44) == Approx(d * d).margin(1e-15));
    }
  }

  SECTION("monotone decreasing in the concurrence argument") {
    std::mt19937 g(7);
    for (int i = 0; i < 100; ++i) {
      const double r11 = 0.3 * test_support::random_unit(g) + 1e-4;
      const double r44 = 0.3 * test_support::random_unit(g) + 1e-4;
      double c1 = test_support::random_unit(g) * 0.98 + 0.01;
      double c2 = test_support::random_unit(g) * 0.98 + 0.01;
      if (c1 > c2) std::swap(c1, c2);
      REQUIRE(frak_C(c1, r11, r44) >= frak_C(c2, r11, r44) - 1e-15);
      REQUIRE(cal_C(c1, r11, r44) >= cal_C(c2, r11, r44) - 1e-15);
    }
  }

  SECTION("domain checks") {
    REQUIRE_THROWS_AS(frak_C(0.0, 0.1, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(frak_C(1.1, 0.1, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(frak_C(0.5, -0.1, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(cal_C(-0.1, 0.1, 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(cal_C(0.0, 0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(equal_concurrence_threshold(-0.1, 0.1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(equal_concurrence_threshold(0.8, 0.8),
                      std::invalid_argument);
  }
}

TEST_CASE("equal-concurrence threshold is the break-even point") {
  std::mt19937 g(11);
  for (int i = 0; i < 100; ++i) {
    const double u = 0.2 + 0.8 * test_support::random_unit(g);
    const double r11 = 0.1 * u;
    const double r44 = (i % 2 ? 0.1 : 0.05) * u;
    const double s = std::sqrt(r11 * r44);
    const double cs = equal_concurrence_threshold(r11, r44);
    REQUIRE(cs * cs + 2.0 * s * cs - (r11 + r44) == Approx(0.0).margin(1e-13));

    // crossing the threshold with matched basis and channel concurrence
    // flips the verdict
    const auto above = quantum_feature_check(
        shared_concurrence_state(r11, r44, cs + 1e-6), cs + 1e-6);
    const auto below = quantum_feature_check(
        shared_concurrence_state(r11, r44, cs - 1e-6), cs - 1e-6);
    REQUIRE(above.classical_limit_exceeded == Verdict::yes);
    REQUIRE(below.classical_limit_exceeded == Verdict::no);
    REQUIRE(lookup(above.threshold_values, "equal_concurrence_threshold") ==
            Approx(cs));
  }
}

TEST_CASE("verdict classification") {
  REQUIRE(classify(2e-9) == Verdict::yes);
  REQUIRE(classify(-2e-9) == Verdict::no);
  REQUIRE(classify(5e-10) == Verdict::boundary);
  REQUIRE(classify(0.5, 0.6) == Verdict::boundary);
  REQUIRE(std::string(to_string(Verdict::yes)) == "yes");
  REQUIRE(std::string(to_string(Verdict::no)) == "no");
  REQUIRE(std::string(to_string(Verdict::boundary)) == "boundary");
}

TEST_CASE("quantum feature check on werner channels") {
  const double c = 0.9;

  const auto mid = quantum_feature_check(werner_xstate(WernerParams(0.5)), c);
  REQUIRE(mid.classical_limit_exceeded == Verdict::yes);
  REQUIRE(mid.feature_margin == Approx(1.0 / 15.0).margin(1e-14));
  REQUIRE(mid.satisfied_branch == "both");
  REQUIRE(lookup(mid.threshold_values, "channel_concurrence_signed") ==
          Approx(0.25));
  REQUIRE(lookup(mid.threshold_values, "frak_at_1") == Approx(0.0).margin(1e-15));
  REQUIRE(lookup(mid.threshold_values, "cal_at_channel") == Approx(0.5));
  REQUIRE(lookup(mid.margins, "feature") == Approx(mid.feature_margin));

  const auto low = quantum_feature_check(werner_xstate(WernerParams(0.3)), c);
  REQUIRE(low.classical_limit_exceeded == Verdict::no);
  REQUIRE(low.feature_margin == Approx(-0.8 / 30.0).margin(1e-14));
  REQUIRE(low.satisfied_branch == "none");

  const double g0 = 5.0 / 14.0;
  REQUIRE(quantum_feature_check(werner_xstate(WernerParams(g0)), c)
              .classical_limit_exceeded == Verdict::boundary);
  REQUIRE(quantum_feature_check(werner_xstate(WernerParams(g0 + 1e-6)), c)
              .classical_limit_exceeded == Verdict::yes);
  REQUIRE(quantum_feature_check(werner_xstate(WernerParams(g0 - 1e-6)), c)
              .classical_limit_exceeded == Verdict::no);
}

TEST_CASE("feature branches agree with the sign of the margin") {
  for (int i = 0; i < 400; ++i) {
    const auto p = sample_xstate(211, i);
    const double c = telefid::qkernel::rng::unit(212, i);
    const auto rep = quantum_feature_check(p, c);
    if (std::abs(rep.feature_margin) <= kBoundaryBand) continue;
    if (rep.feature_margin > 0.0) {
      REQUIRE(rep.satisfied_branch == "both");
      REQUIRE(rep.classical_limit_exceeded == Verdict::yes);
    } else {
      REQUIRE(rep.satisfied_branch == "none");
      REQUIRE(rep.classical_limit_exceeded == Verdict::no);
    }
  }
}

TEST_CASE("improvement check compares the two protocol averages") {
  const auto p = werner_xstate(WernerParams(0.5));
  const auto worse = improvement_check(0.6, 1.0, 0.9, p);
  REQUIRE(worse.verdict == Verdict::no);
  REQUIRE(worse.fp == Approx(13.0 / 15.0));
  REQUIRE(worse.fx == Approx(22.0 / 30.0));
  REQUIRE(worse.margin == Approx(22.0 / 30.0 - 13.0 / 15.0));

  const auto better = improvement_check(0.1, 0.5, 0.9, p);
  REQUIRE(better.verdict == Verdict::yes);
  REQUIRE(better.margin == Approx(22.0 / 30.0 - (2.0 / 3.0 + 0.05 / 3.0)));
}

TEST_CASE("independent-basis comparison report") {
  SECTION("set satisfaction tracks the margin away from the boundary") {
    for (int i = 0; i < 300; ++i) {
      const auto p = sample_xstate(223, i);
      const double cb = telefid::qkernel::rng::unit(224, i);
      const double cpb = telefid::qkernel::rng::unit(225, i);
      const double cpc = telefid::qkernel::rng::unit(226, i);
      const auto rep = situation_b1_report(cpb, cpc, cb, p);
      REQUIRE(rep.improvement.has_value());
      const double m = *rep.improvement_margin;
      REQUIRE(m == Approx(lookup(rep.margins, "improvement")));
      if (std::abs(m) <= kBoundaryBand) continue;
      if (m > 0.0) {
        REQUIRE(rep.satisfied_branch == "both");
        REQUIRE(*rep.improvement == Verdict::yes);
        // the product bound is a necessary condition
        REQUIRE(lookup(rep.margins, "product_below_upper_bound") > 0.0);
      } else {
        REQUIRE(rep.satisfied_branch == "none");
        REQUIRE(*rep.improvement == Verdict::no);
      }
    }
  }

  SECTION("noise-free channels carry the product-comparison note") {
    const XStateParams clean(0.0, 0.6, 0.4, 0.0, 0.3, 0.0);
    const auto rep = situation_b1_report(0.5, 0.5, 0.8, clean);
    bool found = false;
    for (const auto& n : rep.notes)
      found = found || n.find("concurrence-product") != std::string::npos;
    REQUIRE(found);
  }

  SECTION("a less entangled x channel can still improve") {
    const XStateParams p(0.01, 0.58, 0.4, 0.01, 0.4, 0.0);
    const auto rep = situation_b1_report(0.7, 0.8, 0.9, p);
    const double cab = principal_concurrence_signed(p);
    REQUIRE(cab == Approx(0.78));
    REQUIRE(cab < 0.8);  // strictly below the pure reference concurrence
    REQUIRE(*rep.improvement == Verdict::yes);
    REQUIRE(*rep.improvement_margin == Approx(0.14 / 3.0).margin(1e-14));
    REQUIRE(rep.satisfied_branch == "both");
    bool found = false;
    for (const auto& n : rep.notes)
      found = found || n.find("less entangled") != std::string::npos;
    REQUIRE(found);
    REQUIRE(lookup(rep.margins, "less_entangled_product") > 0.0);
  }
}

TEST_CASE("shared-basis comparison report") {
  SECTION("set satisfaction tracks the margin away from the boundary") {
    for (int i = 0; i < 300; ++i) {
      const auto p = sample_xstate(227, i);
      const double cb = telefid::qkernel::rng::unit(228, i);
      const double cpc = telefid::qkernel::rng::unit(229, i);
      const auto rep = situation_b2_report(cb, cpc, p);
      const double m = *rep.improvement_margin;
      if (std::abs(m) <= kBoundaryBand) continue;
      if (m > 0.0) {
        REQUIRE(rep.satisfied_branch == "both");
        REQUIRE(lookup(rep.margins, "channel_below_upper_bound") > 0.0);
      } else {
        REQUIRE(rep.satisfied_branch == "none");
      }
    }
  }

  SECTION("the critical-sum note matches the threshold ordering") {
    for (int i = 0; i < 300; ++i) {
      const auto p = sample_xstate(233, i);
      const double cpc = telefid::qkernel::rng::unit(234, i);
      const double q = p.rho11() + p.rho44();
      if (q <= 0.0) continue;
      const auto rep = situation_b2_report(0.7, cpc, p);
      const double sum = lookup(rep.threshold_values, "critical_sum");
      if (std::abs(sum - 1.0) <= 1e-9) continue;
      const double s = std::sqrt(p.rho11() * p.rho44());
      const auto cal = [&](double arg) {
        const double denom = arg + 2.0 * s;
        return denom > 0.0 ? q / denom
                           : std::numeric_limits<double>::infinity();
      };
      const double cal_pure = cal(1.0 - cpc);
      const double cal_x = cal(principal_concurrence_signed(p));
      bool says_above = false;
      for (const auto& n : rep.notes)
        says_above = says_above || n.find("critical sum above 1") != std::string::npos;
      REQUIRE(says_above == (sum > 1.0));
      if (sum > 1.0)
        REQUIRE(cal_pure >= cal_x - 1e-12);
      else
        REQUIRE(cal_pure <= cal_x + 1e-12);
    }
  }
}

TEST_CASE("werner crossover weights") {
  const auto beats_pure = werner_crossover(0.9, 13.0 / 15.0);
  REQUIRE(beats_pure.has_value());
  REQUIRE(std::abs(*beats_pure - 11.0 / 14.0) <= 1e-12);

  const auto beats_classical = werner_crossover(0.9, 2.0 / 3.0);
  REQUIRE(beats_classical.has_value());
  REQUIRE(std::abs(*beats_classical - 5.0 / 14.0) <= 1e-12);

  // with a bell basis the average leaves 2/3 as soon as the channel is
  // entangled at all
  const auto onset = werner_crossover(1.0, 2.0 / 3.0);
  REQUIRE(onset.has_value());
  REQUIRE(std::abs(*onset - 1.0 / 3.0) <= 1e-10);

  REQUIRE_FALSE(werner_crossover(0.5, 0.95).has_value());

  REQUIRE_THROWS_AS(werner_crossover(0.0, 0.9), std::invalid_argument);
  REQUIRE_THROWS_AS(werner_crossover(1.2, 0.9), std::invalid_argument);
  REQUIRE_THROWS_AS(werner_crossover(0.9, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(werner_crossover(0.9, 1.05), std::invalid_argument);
}
