#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "aqr/dataset.hpp"
#include "aqr/errors.hpp"
#include "aqr/estimator.hpp"
#include "aqr/json_io.hpp"
#include "aqr/simulator.hpp"

using namespace aqr;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("aqr_test_io_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("type_count load and validation") {
  TempDir tmp;
  SUBCASE("well-formed three rows") {
    write_text(tmp.file("d.csv"),
               "auction_id,winning_bid,x_1,n_type_a,n_type_b,winner_type\n"
               "1,10.5,2.0,1,1,a\n"
               "2,8.25,1.5,2,1,b\n"
               "3,9.0,2.5,0,3,b\n");
    Dataset d = load_dataset(tmp.file("d.csv"), DatasetMode::TypeCount);
    REQUIRE(d.size() == 3);
    CHECK(d[0].winning_bid == 10.5);
    CHECK(d[1].x[1] == 1.5);
    TypeCountView v = type_count_view(d[1]);
    CHECK(v.p == 2);
    CHECK(v.winner_type == 1);
  }
  SUBCASE("empty roster row rejected") {
    write_text(tmp.file("bad.csv"),
               "auction_id,winning_bid,x_1,n_type_a,n_type_b,winner_type\n"
               "1,10.5,2.0,0,0,a\n");
    CHECK_THROWS_AS(load_dataset(tmp.file("bad.csv"), DatasetMode::TypeCount), InputError);
  }
  SUBCASE("missing column") {
    write_text(tmp.file("mc.csv"), "auction_id,winning_bid,x_1,n_type_a,winner_type\n");
    CHECK_THROWS_AS(load_dataset(tmp.file("mc.csv"), DatasetMode::TypeCount), InputError);
  }
  SUBCASE("non-positive covariate rejected") {
    write_text(tmp.file("np.csv"),
               "auction_id,winning_bid,x_1,n_type_a,n_type_b,winner_type\n"
               "1,10.5,-2.0,1,1,a\n");
    CHECK_THROWS_AS(load_dataset(tmp.file("np.csv"), DatasetMode::TypeCount), InputError);
  }
  SUBCASE("timber-style two-covariate rows") {
    write_text(tmp.file("timber.csv"),
               "auction_id,winning_bid,x_1,x_2,n_type_a,n_type_b,winner_type\n"
               "1,126.4,58.65,4466.9,4,2,a\n"
               "2,99.0,40.0,1000.0,2,1,b\n");
    Dataset d = load_dataset(tmp.file("timber.csv"), DatasetMode::TypeCount);
    REQUIRE(d.size() == 2);
    CHECK(d[0].x.size() == 3);  // (1, appraisal, volume)
    CHECK(d[0].x[2] == 4466.9);
  }
}

TEST_CASE("full_identity load") {
  TempDir tmp;
  write_text(tmp.file("main.csv"),
             "auction_id,winning_bid,x_1\n"
             "1,5.0,2.0\n"
             "2,6.0,2.5\n");
  SUBCASE("well-formed") {
    write_text(tmp.file("bidders.csv"),
               "auction_id,bidder_index,z_1,is_winner\n"
               "1,0,0.5,0\n1,1,1.5,1\n"
               "2,0,0.7,1\n2,1,0.2,0\n2,2,0.9,0\n");
    Dataset d = load_dataset(tmp.file("main.csv"), DatasetMode::FullIdentity,
                             tmp.file("bidders.csv"));
    REQUIRE(d.size() == 2);
    CHECK(d[0].winner_index == 1);
    CHECK(d[1].n() == 3);
    CHECK(d[1].roster.bidders[2].z[0] == 0.9);
  }
  SUBCASE("no winner rejected") {
    write_text(tmp.file("nw.csv"),
               "auction_id,bidder_index,z_1,is_winner\n"
               "1,0,0.5,0\n1,1,1.5,0\n"
               "2,0,0.7,1\n2,1,0.2,0\n");
    CHECK_THROWS_AS(
        load_dataset(tmp.file("main.csv"), DatasetMode::FullIdentity, tmp.file("nw.csv")),
        InputError);
  }
  SUBCASE("two winners rejected") {
    write_text(tmp.file("tw.csv"),
               "auction_id,bidder_index,z_1,is_winner\n"
               "1,0,0.5,1\n1,1,1.5,1\n"
               "2,0,0.7,1\n2,1,0.2,0\n");
    CHECK_THROWS_AS(
        load_dataset(tmp.file("main.csv"), DatasetMode::FullIdentity, tmp.file("tw.csv")),
        InputError);
  }
}

TEST_CASE("save/load round trip preserves estimation inputs exactly") {
  TempDir tmp;
  SimConfig cfg = paper_mc_config(2718);
  cfg.n_auctions = 250;
  Dataset data = simulate_dataset(cfg);
  save_dataset_csv(tmp.file("sim.csv"), data, {"seed: 2718"});
  Dataset loaded = load_dataset(tmp.file("sim.csv"), DatasetMode::TypeCount);
  REQUIRE(loaded.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(loaded[i].winning_bid == data[i].winning_bid);  // %.17g is lossless
    CHECK(loaded[i].x == data[i].x);
    TypeCountView a = type_count_view(data[i]);
    TypeCountView b = type_count_view(loaded[i]);
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
    CHECK(a.winner_type == b.winner_type);
  }
  MleResult m1 = mle_fit(data, AsymmetryVariant::TypeFixedEffects);
  MleResult m2 = mle_fit(loaded, AsymmetryVariant::TypeFixedEffects);
  CHECK(m1.spec.alpha[1] == m2.spec.alpha[1]);
  QrFit f1 = qr_fit(data, 0.5, m1.spec);
  QrFit f2 = qr_fit(loaded, 0.5, m2.spec);
  CHECK(f1.gamma_hat == f2.gamma_hat);
}

TEST_CASE("json round trips") {
  AsymmetrySpec spec = two_type_spec(0.6988);
  AsymmetrySpec back = spec_from_json(to_json(spec));
  CHECK(back.variant == spec.variant);
  CHECK(back.alpha == spec.alpha);

  ParentQuantileCurve c = sample_curve(
      [](double tau) {
        VectorXd g(2);
        g << tau, 2.0 * tau;
        return g;
      },
      default_tau_grid(20));
  ParentQuantileCurve cback = curve_from_json(to_json(c));
  CHECK(cback.grid == c.grid);
  CHECK(cback.gamma == c.gamma);
}
