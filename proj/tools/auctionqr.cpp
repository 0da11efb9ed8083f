// auctionqr: simulation, two-stage estimation, seller-revenue analysis,
// misspecification study and specification tests for asymmetric ascending
// auctions under the power-asymmetry quantile model.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aqr/dataset.hpp"
#include "aqr/errors.hpp"
#include "aqr/estimator.hpp"
#include "aqr/json_io.hpp"
#include "aqr/misspec.hpp"
#include "aqr/model.hpp"
#include "aqr/parallel.hpp"
#include "aqr/revenue.hpp"
#include "aqr/simulator.hpp"
#include "aqr/spec_tests.hpp"

namespace {

using namespace aqr;

// "a..b/d" (levels a/d .. b/d) or a comma list of levels.
VectorXd parse_tau_grid(const std::string& s) {
  auto slash = s.find('/');
  auto dots = s.find("..");
  if (slash != std::string::npos && dots != std::string::npos && dots < slash) {
    int a = std::stoi(s.substr(0, dots));
    int b = std::stoi(s.substr(dots + 2, slash - dots - 2));
    int d = std::stoi(s.substr(slash + 1));
    if (a < 1 || b >= d || a > b) throw InputError("bad tau grid range: " + s);
    VectorXd g(b - a + 1);
    for (int i = a; i <= b; ++i) g[i - a] = static_cast<double>(i) / d;
    return g;
  }
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (vals.empty()) throw InputError("empty tau grid: " + s);
  VectorXd g(static_cast<int>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) g[static_cast<int>(i)] = vals[i];
  return g;
}

VectorXd parse_x(const std::string& s) {
  std::vector<double> vals{1.0};  // intercept
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  VectorXd x(static_cast<int>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) x[static_cast<int>(i)] = vals[i];
  return x;
}

std::vector<std::string> meta_lines(const std::string& cmdline, std::uint64_t seed) {
  return {"tool: auctionqr", "command: " + cmdline, "seed: " + std::to_string(seed)};
}

void write_csv(const std::string& path, const std::vector<std::string>& meta,
               const std::string& header, const std::vector<std::string>& rows) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw InputError("cannot write file: " + tmp);
    for (const auto& m : meta) out << "# " << m << "\n";
    out << header << "\n";
    for (const auto& r : rows) out << r << "\n";
  }
  std::filesystem::rename(tmp, path);
}

std::string fmt(double v, const char* f = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

AsymmetryVariant parse_variant(const std::string& s) {
  if (s == "type_fixed" || s == "type_fixed_effects") return AsymmetryVariant::TypeFixedEffects;
  if (s == "fixed" || s == "fixed_effects") return AsymmetryVariant::FixedEffects;
  if (s == "linear") return AsymmetryVariant::LinearRegression;
  if (s == "linear_fixed") return AsymmetryVariant::LinearWithFixedEffects;
  if (s == "exp_linear_fixed") return AsymmetryVariant::ExpLinearWithFixedEffects;
  throw InputError("unknown variant: " + s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asymmetric ascending-auction quantile toolkit"};
  app.set_config("--config", "", "flat key=value config file; command-line flags win");

  std::uint64_t seed = 1;
  std::string out_path;
  int threads = default_threads();
  int B = 10000;
  double epsilon = 0.1;
  int min_cell = 30;
  std::string tau_grid_str = "1..99/100";
  app.add_option("--seed", seed, "master RNG seed");
  app.add_option("--threads", threads, "worker threads");

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset (CSV)");
  long sim_L = 2000;
  int sim_N = 5;
  double sim_lambda_b = std::exp(2.0);
  std::string sim_parent = "paper";
  sim->add_option("--L", sim_L, "number of auctions");
  sim->add_option("--N", sim_N, "bidders per auction");
  sim->add_option("--lambda-b", sim_lambda_b, "type-b asymmetry exponent (type a = 1)");
  sim->add_option("--parent", sim_parent, "parent curve: paper | uniform");
  sim->add_option("--out", out_path, "output CSV path")->required();

  // estimate
  auto* est = app.add_subcommand("estimate", "two-stage fit: winner MLE + quantile regression");
  std::string est_input, est_variant = "type_fixed", est_bidders;
  int est_boot = 0;
  est->add_option("--input", est_input, "dataset CSV (type_count schema)")->required();
  est->add_option("--bidders", est_bidders, "companion bidders CSV (full_identity schema)");
  est->add_option("--variant", est_variant, "asymmetry variant");
  est->add_option("--tau-grid", tau_grid_str, "levels as a..b/d or comma list");
  est->add_option("--B", est_boot, "bootstrap replicates for the lambda CI (0 = none)");
  est->add_option("--out", out_path, "output JSON path")->required();

  // revenue
  auto* rev = app.add_subcommand("revenue", "expected revenue curve and optimal reserve");
  std::string rev_fit, rev_x, rev_swap;
  int rev_a = 1, rev_b = 1, rev_grid = 981;
  double v0 = 0.0;
  rev->add_option("--fit", rev_fit, "fit JSON from `estimate`")->required();
  rev->add_option("--x", rev_x, "non-intercept covariates, comma separated")->required();
  rev->add_option("--count-a", rev_a, "type-a bidders");
  rev->add_option("--count-b", rev_b, "type-b bidders");
  rev->add_option("--v0", v0, "seller value");
  rev->add_option("--epsilon", epsilon, "truncation index");
  rev->add_option("--grid", rev_grid, "reserve grid size");
  rev->add_option("--swap-table", rev_swap, "emit per-split table for these N (comma list)");
  rev->add_option("--out", out_path, "output CSV path")->required();

  // misspec
  auto* mis = app.add_subcommand("misspec", "symmetric-misspecification study");
  std::string mis_rows = "table1";
  double mis_l1 = 0.1, mis_l2 = 3.9, mis_kappa = 1.0;
  mis->add_option("--rows", mis_rows, "table1 | table2 | single");
  mis->add_option("--lambda1", mis_l1, "lambda_1 (single row)");
  mis->add_option("--lambda2", mis_l2, "lambda_2 (single row)");
  mis->add_option("--kappa", mis_kappa, "curvature (single row)");
  mis->add_option("--out", out_path, "output CSV path")->required();

  // test-xi
  auto* txi = app.add_subcommand("test-xi", "max-|xi| power-asymmetry specification test");
  std::string txi_input;
  txi->add_option("--input", txi_input, "dataset CSV (type_count schema)")->required();
  txi->add_option("--B", B, "bootstrap replicates");
  txi->add_option("--min-cell", min_cell, "cell-size threshold");
  txi->add_option("--out", out_path, "output JSON path")->required();

  // test-rw
  auto* trw = app.add_subcommand("test-rw", "Rothe-Wied style global specification test");
  std::string trw_input;
  bool trw_match = false;
  trw->add_option("--input", trw_input, "dataset CSV (type_count schema)")->required();
  trw->add_option("--B", B, "bootstrap replicates");
  trw->add_option("--tau-grid", tau_grid_str, "curve-fit levels");
  trw->add_flag("--match-counts", trw_match, "preserve (p,q) composition in replicates");
  trw->add_option("--out", out_path, "output JSON path")->required();

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo bias/SE study of the two-stage estimator");
  int mc_reps = 1000;
  long mc_L = 2000;
  int mc_N = 5;
  mc->add_option("--reps", mc_reps, "replications");
  mc->add_option("--L", mc_L, "auctions per replication");
  mc->add_option("--N", mc_N, "bidders per auction");
  mc->add_option("--out", out_path, "output CSV path")->required();

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  std::string cmdline;
  for (int i = 1; i < argc; ++i) cmdline += std::string(i > 1 ? " " : "") + argv[i];

  try {
    if (*sim) {
      SimConfig cfg = paper_mc_config(seed);
      cfg.n_auctions = sim_L;
      cfg.n_bidders = sim_N;
      cfg.spec = two_type_spec(sim_lambda_b);
      if (sim_parent == "uniform") {
        cfg.gamma = [](double tau) {
          VectorXd g(1);
          g << tau;
          return g;
        };
        cfg.dim_x = 0;
      } else if (sim_parent != "paper") {
        throw InputError("unknown parent: " + sim_parent);
      }
      Dataset data = simulate_dataset(cfg);
      save_dataset_csv(out_path, data, meta_lines(cmdline, seed));
      std::cout << "simulate: wrote " << data.size() << " auctions to " << out_path << "\n";
    } else if (*est) {
      Dataset data = load_dataset(est_input,
                                  est_bidders.empty() ? DatasetMode::TypeCount
                                                      : DatasetMode::FullIdentity,
                                  est_bidders);
      MleResult mle = mle_fit(data, parse_variant(est_variant));
      VectorXd grid = parse_tau_grid(tau_grid_str);
      ParentQuantileCurve curve = qr_curve(data, grid, mle.spec, threads);
      json j{{"meta", {{"command", cmdline}, {"seed", seed}}},
             {"stage1", to_json(mle)},
             {"curve", to_json(curve)}};
      if (est_boot > 0) {
        auto stat = [&](const Dataset& d) {
          VectorXd v(1);
          v << mle_fit(d, AsymmetryVariant::TypeFixedEffects).spec.alpha[1];
          return v;
        };
        BootstrapResult bs = pairwise_bootstrap(data, est_boot, seed, stat, 0.95, threads);
        j["lambda_ci"] = to_json(bs);
      }
      write_json_file(out_path, j);
      std::cout << "estimate: loglik " << mle.loglik << ", n_used " << mle.n_used;
      if (mle.spec.variant == AsymmetryVariant::TypeFixedEffects && mle.spec.alpha.size() == 2)
        std::cout << ", lambda_b " << mle.spec.alpha[1];
      std::cout << ", curve levels " << curve.size() << " -> " << out_path << "\n";
    } else if (*rev) {
      std::ifstream in(rev_fit);
      if (!in) throw InputError("cannot open fit file: " + rev_fit);
      json j = json::parse(in, nullptr, true, true);
      AsymmetrySpec spec = spec_from_json(j.at("stage1"));
      ParentQuantileCurve curve = curve_from_json(j.at("curve"));
      VectorXd x = parse_x(rev_x);
      BidderRoster roster = two_type_roster(rev_a, rev_b);
      RevenueCurve rc = revenue_curve(x, roster, spec, curve, v0, epsilon, rev_grid);
      ReserveSolution sol = optimal_reserve(x, roster, spec, curve, v0, epsilon, rev_grid);
      std::vector<std::string> rows;
      for (int i = 0; i < rc.r_grid.size(); ++i)
        rows.push_back(fmt(rc.r_grid[i]) + "," + fmt(rc.pi[i]));
      auto meta = meta_lines(cmdline, seed);
      meta.push_back("r_star: " + fmt(sol.r_star));
      meta.push_back("reserve_price: " + fmt(sol.reserve_price));
      meta.push_back("pi_star: " + fmt(sol.pi_star));
      write_csv(out_path, meta, "r,pi", rows);
      std::cout << "revenue: r* " << fmt(sol.r_star) << ", R* " << fmt(sol.reserve_price)
                << ", Pi* " << fmt(sol.pi_star) << " -> " << out_path << "\n";
      if (!rev_swap.empty()) {
        std::vector<int> ns;
        std::stringstream ss(rev_swap);
        std::string tok;
        while (std::getline(ss, tok, ',')) ns.push_back(std::stoi(tok));
        auto table = type_swap_table(x, ns, spec, curve, v0, epsilon, rev_grid);
        std::vector<std::string> trows;
        for (const auto& r : table)
          trows.push_back(std::to_string(r.n) + "," + std::to_string(r.count_a) + "," +
                          std::to_string(r.count_b) + "," + fmt(r.rev_nonstrat) + "," +
                          fmt(r.rev_strat) + "," + fmt(r.reserve_price) + "," +
                          fmt(r.rev_add_a) + "," + fmt(r.rev_add_b) + "," +
                          (r.bk_violation_add_a ? "1" : "0") + "," +
                          (r.bk_violation_add_b ? "1" : "0"));
        std::string swap_path = out_path + ".swap.csv";
        write_csv(swap_path, meta_lines(cmdline, seed),
                  "n,count_a,count_b,rev_nonstrat,rev_strat,reserve_price,rev_add_a,"
                  "rev_add_b,bk_violation_add_a,bk_violation_add_b",
                  trows);
        std::cout << "revenue: swap table -> " << swap_path << "\n";
      }
    } else if (*mis) {
      std::vector<MisspecRow> rows;
      if (mis_rows == "table1")
        rows = misspec_table1();
      else if (mis_rows == "table2")
        rows = misspec_table2();
      else if (mis_rows == "single")
        rows.push_back(misspec_study(mis_l1, mis_l2, mis_kappa));
      else
        throw InputError("unknown --rows: " + mis_rows);
      std::vector<std::string> lines;
      for (const auto& r : rows)
        lines.push_back(fmt(r.lambda1, "%.2f") + "," + fmt(r.lambda2, "%.2f") + "," +
                        fmt(r.kappa, "%.0f") + "," + fmt(r.rp_asym, "%.4f") + "," +
                        fmt(r.rp_mis, "%.4f") + "," + fmt(r.rev_asym, "%.4f") + "," +
                        fmt(r.rev_mis, "%.4f") + "," + fmt(100.0 * r.pct_loss, "%.2f"));
      write_csv(out_path, meta_lines(cmdline, seed),
                "lambda1,lambda2,kappa,rp_asym,rp_mis,rev_asym,rev_mis,pct_loss", lines);
      std::cout << "misspec: " << rows.size() << " rows -> " << out_path << "\n";
    } else if (*txi) {
      Dataset data = load_dataset(txi_input, DatasetMode::TypeCount);
      TestReport repo = max_xi_test(data, B, seed, min_cell, threads);
      json j = to_json(repo);
      j["meta"] = {{"command", cmdline}, {"seed", seed}};
      write_json_file(out_path, j);
      std::cout << "test-xi: max|xi| " << fmt(repo.statistic, "%.4f") << ", p "
                << fmt(repo.p_value, "%.4f") << " -> " << out_path << "\n";
    } else if (*trw) {
      Dataset data = load_dataset(trw_input, DatasetMode::TypeCount);
      MleResult mle = mle_fit(data, AsymmetryVariant::TypeFixedEffects);
      ParentQuantileCurve curve = qr_curve(data, parse_tau_grid(tau_grid_str), mle.spec, threads);
      TestReport repo = rw_bootstrap_pvalue(data, curve, mle.spec.alpha[1], B, seed, threads,
                                            trw_match);
      json j = to_json(repo);
      j["meta"] = {{"command", cmdline}, {"seed", seed}, {"lambda_hat", mle.spec.alpha[1]}};
      write_json_file(out_path, j);
      std::cout << "test-rw: RW " << fmt(repo.statistic, "%.4f") << ", p "
                << fmt(repo.p_value, "%.4f") << " -> " << out_path << "\n";
    } else if (*mc) {
      SimConfig cfg = paper_mc_config(seed);
      cfg.n_auctions = mc_L;
      cfg.n_bidders = mc_N;
      VectorXd tg = parse_tau_grid("1..9/10");
      VectorXd eval_x(2);
      eval_x << 1.0, 2.0;  // median-covariate auction
      McResult res = run_mc_study(cfg, mc_reps, tg, eval_x, threads);
      std::vector<std::string> rows;
      for (int t = 0; t < tg.size(); ++t)
        rows.push_back(fmt(tg[t], "%.1f") + "," + fmt(res.type_a[t].bias, "%.4f") + "," +
                       fmt(res.type_a[t].se, "%.4f") + "," + fmt(res.type_b[t].bias, "%.4f") +
                       "," + fmt(res.type_b[t].se, "%.4f"));
      auto meta = meta_lines(cmdline, seed);
      meta.push_back("failed_replications: " + std::to_string(res.n_failed));
      write_csv(out_path, meta, "tau,bias_type_a,se_type_a,bias_type_b,se_type_b", rows);
      std::cout << "mc: " << mc_reps << " replications (" << res.n_failed << " failed) -> "
                << out_path << "\n";
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const TestAbortError& e) {
    std::cerr << "test aborted: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
