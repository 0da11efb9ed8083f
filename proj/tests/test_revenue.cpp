#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "aqr/errors.hpp"
#include "aqr/model.hpp"
#include "aqr/revenue.hpp"

using namespace aqr;

namespace {

// V(tau) = tau, no covariates.
ParentQuantileCurve uniform_curve(int denom = 1000) {
  return sample_curve(
      [](double tau) {
        VectorXd g(1);
        g << tau;
        return g;
      },
      default_tau_grid(denom));
}

const VectorXd kX1 = VectorXd::Ones(1);

}  // namespace

TEST_CASE("selling probability") {
  AsymmetrySpec spec = two_type_spec(1.0);
  BidderRoster r2 = two_type_roster(1, 1);
  CHECK(selling_probability(0.0, r2, spec) == doctest::Approx(1.0));
  CHECK(selling_probability(1.0, r2, spec) == doctest::Approx(0.0));
  CHECK(selling_probability(0.5, r2, spec) == doctest::Approx(0.75));
  for (double lo : {0.9, 0.5, 0.2})
    CHECK(selling_probability(lo, r2, spec) > selling_probability(lo + 0.05, r2, spec));
}

TEST_CASE("second order statistic of two uniforms") {
  // E min(U1,U2) = 1/3 as r -> 0, eps -> 0
  ParentQuantileCurve c = uniform_curve(2000);
  AsymmetrySpec spec = two_type_spec(1.0);
  BidderRoster roster = two_type_roster(1, 1);
  double eps = 1e-4;
  double pi = expected_revenue(eps, kX1, roster, spec, c, 0.0, eps);
  CHECK(pi == doctest::Approx(1.0 / 3.0).epsilon(2e-3));
}

TEST_CASE("symmetric uniform reserve math") {
  ParentQuantileCurve c = uniform_curve(2000);
  AsymmetrySpec spec = two_type_spec(1.0);
  BidderRoster roster = two_type_roster(1, 1);
  SUBCASE("revenue at one half is 5/12") {
    double pi = expected_revenue(0.5, kX1, roster, spec, c, 0.0, 1e-4);
    CHECK(pi == doctest::Approx(5.0 / 12.0).epsilon(2e-3));
  }
  SUBCASE("optimal reserve at one half") {
    ReserveSolution sol = optimal_reserve(kX1, roster, spec, c, 0.0, 0.01, 981);
    CHECK(sol.r_star == doctest::Approx(0.5).epsilon(5e-3));
    CHECK(sol.reserve_price == doctest::Approx(0.5).epsilon(5e-3));
  }
  SUBCASE("FOC residual vanishes at the optimum") {
    CHECK(foc_residual(0.5, kX1, roster, spec, c, 0.0) == doctest::Approx(0.0).epsilon(5e-3));
    // near r = 1 the sum term dies and the residual approaches R - v0 > 0
    CHECK(foc_residual(0.995, kX1, roster, spec, c, 0.0) > 0.2);
  }
  SUBCASE("argmax is FOC-consistent") {
    ReserveSolution sol = optimal_reserve(kX1, roster, spec, c, 0.0, 0.01, 981);
    CHECK(std::abs(foc_residual(sol.r_star, kX1, roster, spec, c, 0.0)) <= 0.02);
  }
}

TEST_CASE("symmetric formula identities") {
  ParentQuantileCurve c = uniform_curve(2000);
  SUBCASE("uniform n=2 closed forms") {
    double eps = 1e-4;
    CHECK(symmetric_expected_revenue(0.5, kX1, 2, c, 0.0, eps) ==
          doctest::Approx(5.0 / 12.0).epsilon(2e-3));
    CHECK(symmetric_expected_revenue(eps, kX1, 2, c, 0.0, eps) ==
          doctest::Approx(1.0 / 3.0).epsilon(2e-3));
  }
  SUBCASE("exact agreement with the asymmetric formula at lambda = 1") {
    // identical partition and scheme: agreement near machine precision
    for (int n : {2, 3, 5, 8, 12}) {
      AsymmetrySpec spec = two_type_spec(1.0);
      BidderRoster roster = two_type_roster(n - 1, 1);
      for (int i = 0; i <= 20; ++i) {
        double r = 0.1 + 0.8 * i / 20.0;
        double a = expected_revenue(r, kX1, roster, spec, c, 0.3, 0.1);
        double s = symmetric_expected_revenue(r, kX1, n, c, 0.3, 0.1);
        CHECK(a == doctest::Approx(s).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("revenue invariances") {
  ParentQuantileCurve c = uniform_curve(500);
  AsymmetrySpec spec = two_type_spec(3.0);
  SUBCASE("roster permutation") {
    BidderRoster r1 = two_type_roster(2, 1);
    BidderRoster r2;
    r2.bidders = {BidderInfo{-1, 1, {}}, BidderInfo{-1, 0, {}}, BidderInfo{-1, 0, {}}};
    for (double r : {0.15, 0.4, 0.8})
      CHECK(expected_revenue(r, kX1, r1, spec, c, 0.0, 0.1) ==
            doctest::Approx(expected_revenue(r, kX1, r2, spec, c, 0.0, 0.1)).epsilon(1e-14));
  }
  SUBCASE("stronger bidder never lowers non-strategical revenue") {
    std::mt19937_64 g(21);
    std::uniform_real_distribution<double> ld(0.2, 4.0);
    for (int rep = 0; rep < 200; ++rep) {
      double weak = ld(g), strong = weak + ld(g) * 0.5;
      AsymmetrySpec sweak = two_type_spec(weak);
      AsymmetrySpec sstrong = two_type_spec(strong);
      BidderRoster roster = two_type_roster(2, 1);  // the type-b slot swaps strength
      double eps = 0.05;
      double rv_weak = expected_revenue(eps, kX1, roster, sweak, c, 0.0, eps);
      double rv_strong = expected_revenue(eps, kX1, roster, sstrong, c, 0.0, eps);
      CHECK(rv_strong >= rv_weak - 1e-10);
    }
  }
  SUBCASE("r outside the truncated range") {
    BidderRoster roster = two_type_roster(1, 1);
    CHECK_THROWS_AS(expected_revenue(0.05, kX1, roster, spec, c, 0.0, 0.1), InputError);
    CHECK_THROWS_AS(expected_revenue(0.95, kX1, roster, spec, c, 0.0, 0.1), InputError);
  }
}

TEST_CASE("type swap table") {
  ParentQuantileCurve c = uniform_curve(500);
  SUBCASE("symmetric types: revenue depends only on N") {
    AsymmetrySpec spec = two_type_spec(1.0);
    auto rows = type_swap_table(kX1, {3}, spec, c, 0.0, 0.1, 181);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].rev_nonstrat == doctest::Approx(rows[0].rev_nonstrat).epsilon(1e-12));
      CHECK(rows[i].rev_strat == doctest::Approx(rows[0].rev_strat).epsilon(1e-12));
    }
  }
  SUBCASE("adding a bidder raises non-strategical revenue") {
    AsymmetrySpec spec = two_type_spec(0.7);
    auto rows = type_swap_table(kX1, {2, 3}, spec, c, 0.0, 0.1, 181);
    for (const auto& row : rows) {
      CHECK(row.rev_add_a > row.rev_nonstrat);
      CHECK(row.rev_add_b > row.rev_nonstrat);
    }
  }
  SUBCASE("strong asymmetry produces a Bulow-Klemperer violation") {
    // a weak entrant (lambda = 0.2) adds little; the optimal reserve wins at N=2
    AsymmetrySpec spec = two_type_spec(0.2);
    auto rows = type_swap_table(kX1, {2}, spec, c, 0.0, 0.1, 381);
    bool any = false;
    for (const auto& row : rows) any = any || row.bk_violation_add_b;
    CHECK(any);
  }
}
