#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "aqr/errors.hpp"
#include "aqr/estimator.hpp"
#include "aqr/simulator.hpp"
#include "aqr/spec_tests.hpp"
#include "test_util.hpp"

using namespace aqr;

namespace {

AuctionRecord count_record(long id, double w, double x1, int p, int q, int wt) {
  AuctionRecord r;
  r.id = id;
  r.winning_bid = w;
  r.x.resize(2);
  r.x << 1.0, x1;
  r.roster = two_type_roster(p, q);
  r.winner_type = wt;
  return r;
}

Dataset two_cell_dataset() {
  Dataset d;
  long id = 0;
  for (int i = 0; i < 40; ++i) d.push_back(count_record(id++, 1.0, 2.0, 1, 1, i < 22 ? 0 : 1));
  for (int i = 0; i < 50; ++i) d.push_back(count_record(id++, 1.0, 2.0, 2, 1, i < 35 ? 0 : 1));
  return d;
}

}  // namespace

TEST_CASE("cell statistics against independently computed values") {
  Dataset d = two_cell_dataset();
  double lam = mle_fit(d, AsymmetryVariant::TypeFixedEffects).spec.alpha[1];
  auto cells = cell_stats(d, lam, 30);
  REQUIRE(cells.size() == 2);
  const CellStats& c11 = cells[0];
  const CellStats& c21 = cells[1];
  CHECK(c11.p == 1);
  CHECK(c11.l_pq == 40);
  CHECK(c11.omega_hat == doctest::Approx(0.55));
  CHECK(c11.model_share == doctest::Approx(0.544083462862).epsilon(1e-6));
  CHECK(c11.sigma_hat_sq == doctest::Approx(0.127389705882).epsilon(1e-6));
  CHECK(c11.xi == doctest::Approx(0.104840823385).epsilon(1e-4));
  CHECK(c21.l_pq == 50);
  CHECK(c21.sigma_hat_sq == doctest::Approx(0.101911764706).epsilon(1e-6));
  CHECK(c21.xi == doctest::Approx(-0.104840823385).epsilon(1e-4));
}

TEST_CASE("cell where the share matches the model gives xi = 0") {
  Dataset d;
  for (int i = 0; i < 80; ++i) d.push_back(count_record(i, 1.0, 2.0, 1, 1, i < 60 ? 0 : 1));
  double lam = mle_fit(d, AsymmetryVariant::TypeFixedEffects).spec.alpha[1];
  auto cells = cell_stats(d, lam, 30);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].xi == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("cell qualification and errors") {
  Dataset d;
  for (int i = 0; i < 25; ++i) d.push_back(count_record(i, 1.0, 2.0, 1, 1, i % 2));
  // 25 <= 30: no qualifying cell
  CHECK_THROWS_AS(cell_stats(d, 1.0, 30), InputError);
  CHECK_NOTHROW(cell_stats(d, 1.0, 20));
  for (int i = 0; i < 40; ++i) d.push_back(count_record(100 + i, 1.0, 2.0, 2, 0, 0));
  // symmetric cells never qualify
  auto cells = cell_stats(d, 1.0, 20);
  CHECK(cells.size() == 1);
}

TEST_CASE("max-xi test on a degenerate single cell") {
  Dataset d;
  for (int i = 0; i < 80; ++i) d.push_back(count_record(i, 1.0, 2.0, 1, 1, i < 60 ? 0 : 1));
  TestReport rep = max_xi_test(d, 200, 5, 30, 2);
  CHECK(rep.statistic == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(rep.p_value >= 0.9);  // statistic at zero is below almost every replicate
}

TEST_CASE("max-xi p-value is deterministic and order invariant") {
  SimConfig cfg = paper_mc_config(12);
  cfg.n_auctions = 400;
  cfg.n_bidders = 2;
  cfg.spec = two_type_spec(0.7);
  Dataset d = simulate_dataset(cfg);
  TestReport a = max_xi_test(d, 300, 42, 30, 2);
  TestReport b = max_xi_test(d, 300, 42, 30, 1);
  CHECK(a.p_value == b.p_value);
  CHECK(a.statistic == b.statistic);
  std::mt19937_64 g(9);
  std::shuffle(d.begin(), d.end(), g);
  TestReport c = max_xi_test(d, 300, 42, 30, 2);
  CHECK(a.p_value == c.p_value);
  CHECK(a.statistic == c.statistic);
}

namespace {

ParentQuantileCurve monotone_curve() {
  return sample_curve(
      [](double tau) {
        VectorXd g(2);
        g << tau, 0.5 * tau;
        return g;
      },
      default_tau_grid(100));
}

}  // namespace

TEST_CASE("winning-bid quantile grid") {
  VectorXd x(2);
  x << 1.0, 2.0;
  VectorXd tau = default_tau_grid(100);
  SUBCASE("monotone curve matches the psi-inverse composition") {
    ParentQuantileCurve c = monotone_curve();
    LevelTransform t{1.0, 2.0, 1.0};
    VectorXd w = winning_bid_quantile_grid(x, t, c, tau, 100);
    double lo = c.gamma.row(0).dot(x);
    double hi = c.gamma.row(c.size() - 1).dot(x);
    double step = (hi - lo) / 100.0;
    for (int i = 5; i < 95; i += 10) {
      double direct = parent_quantile_clamped(c, psi_inverse(tau[i], t), x);
      CHECK(std::abs(w[i] - direct) <= 2.0 * step + 0.05);
    }
  }
  SUBCASE("monotone output for adversarial curves") {
    std::mt19937_64 g(23);
    std::uniform_real_distribution<double> cd(-1.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
      ParentQuantileCurve c;
      c.grid = default_tau_grid(100);
      c.gamma.resize(c.size(), 2);
      for (int i = 0; i < c.size(); ++i) {
        c.gamma(i, 0) = cd(g);
        c.gamma(i, 1) = cd(g);
      }
      LevelTransform t = aqr_test::random_transform(g);
      VectorXd w = winning_bid_quantile_grid(x, t, c, tau, 100);
      for (int i = 1; i < w.size(); ++i) CHECK(w[i] >= w[i - 1]);
    }
  }
  SUBCASE("constant curve collapses to the endpoint value") {
    ParentQuantileCurve c = sample_curve(
        [](double) {
          VectorXd g(2);
          g << 2.0, 1.0;
          return g;
        },
        default_tau_grid(100));
    LevelTransform t{1.0, 2.0, 1.0};
    VectorXd w = winning_bid_quantile_grid(x, t, c, tau, 100);
    for (int i = 0; i < w.size(); ++i) CHECK(w[i] == doctest::Approx(4.0));
  }
}

namespace {

// Parent with spread-out support: the 100-point value grid resolves its cdf
// well, unlike curves that are nearly flat at the bottom.
SimConfig linear_parent_cfg(std::uint64_t seed, long L) {
  SimConfig cfg;
  cfg.master_seed = seed;
  cfg.n_auctions = L;
  cfg.n_bidders = 2;
  cfg.spec = two_type_spec(0.7);
  cfg.gamma = [](double t) {
    VectorXd g(2);
    g << 0.2 + 0.5 * t, 0.1 + 0.2 * t;
    return g;
  };
  return cfg;
}

}  // namespace

TEST_CASE("rw statistic basics") {
  SimConfig cfg = linear_parent_cfg(88, 120);
  Dataset d = simulate_dataset(cfg);
  MleResult mle = mle_fit(d, AsymmetryVariant::TypeFixedEffects);
  ParentQuantileCurve curve = qr_curve(d, default_tau_grid(100), mle.spec, 2);
  double rw = rw_statistic(d, curve, mle.spec.alpha[1]);
  CHECK(rw >= 0.0);

  std::mt19937_64 g(3);
  Dataset shuffled = d;
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  CHECK(rw_statistic(shuffled, curve, mle.spec.alpha[1]) == doctest::Approx(rw).epsilon(1e-12));

  // subsample filter restricts both cdfs and the outer sum
  auto only_mixed = [](const AuctionRecord& rec) {
    TypeCountView v = type_count_view(rec);
    return v.p > 0 && v.q > 0;
  };
  double rw_mixed = rw_statistic(d, curve, mle.spec.alpha[1], only_mixed);
  CHECK(rw_mixed >= 0.0);
  CHECK(rw_mixed != doctest::Approx(rw).epsilon(1e-12));
}

TEST_CASE("rw bootstrap is deterministic and self-consistent") {
  SimConfig cfg = linear_parent_cfg(314, 150);
  Dataset d = simulate_dataset(cfg);
  MleResult mle = mle_fit(d, AsymmetryVariant::TypeFixedEffects);
  ParentQuantileCurve curve = qr_curve(d, default_tau_grid(100), mle.spec, 2);

  TestReport a = rw_bootstrap_pvalue(d, curve, mle.spec.alpha[1], 60, 7, 2);
  TestReport b = rw_bootstrap_pvalue(d, curve, mle.spec.alpha[1], 60, 7, 1);
  CHECK(a.p_value == b.p_value);
  CHECK(a.replicates == b.replicates);
  CHECK(a.statistic >= 0.0);
  // correct model: the statistic should not be extreme relative to replicates
  CHECK(a.p_value > 0.0);

  TestReport m = rw_bootstrap_pvalue(d, curve, mle.spec.alpha[1], 60, 7, 2, true);
  CHECK(m.p_value >= 0.0);
}
