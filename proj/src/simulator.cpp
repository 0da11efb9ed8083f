#include "aqr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "aqr/errors.hpp"
#include "aqr/estimator.hpp"
#include "aqr/parallel.hpp"
#include "aqr/rng.hpp"

namespace aqr {

SimConfig paper_mc_config(std::uint64_t master_seed) {
  SimConfig cfg;
  cfg.n_auctions = 2000;
  cfg.n_bidders = 5;
  cfg.spec = two_type_spec(std::exp(2.0));
  const double e15 = std::exp(1.5);
  cfg.gamma = [e15](double tau) {
    VectorXd g(2);
    double base = std::pow(tau, e15);
    g << 0.5 * base, 0.25 * base;
    return g;
  };
  cfg.dim_x = 1;
  cfg.master_seed = master_seed;
  return cfg;
}

Dataset simulate_dataset(const SimConfig& cfg) {
  if (cfg.n_auctions < 1) throw InputError("simulate_dataset: n_auctions >= 1 required");
  if (cfg.n_bidders < 2) throw InputError("simulate_dataset: n_bidders >= 2 required");
  if (!cfg.gamma) throw InputError("simulate_dataset: parent gamma function required");

  const int n_types = static_cast<int>(cfg.spec.alpha.size());
  VectorXd probs = cfg.type_probs;
  if (probs.size() == 0) probs = VectorXd::Constant(n_types, 1.0 / n_types);
  if (probs.size() != n_types || std::abs(probs.sum() - 1.0) > 1e-9 || probs.minCoeff() < 0.0)
    throw InputError("simulate_dataset: type_probs must be a distribution over the types");
  VectorXd cum(probs.size());
  std::partial_sum(probs.data(), probs.data() + probs.size(), cum.data());

  Dataset out;
  out.reserve(static_cast<std::size_t>(cfg.n_auctions));
  std::vector<double> lam_of_type(static_cast<std::size_t>(n_types));
  for (int t = 0; t < n_types; ++t) {
    BidderInfo b;
    b.type = t;
    lam_of_type[static_cast<std::size_t>(t)] = lambda_eval(cfg.spec, b);
  }

  for (long l = 0; l < cfg.n_auctions; ++l) {
    auto rng = make_rng(cfg.master_seed, static_cast<std::uint64_t>(l));
    AuctionRecord rec;
    rec.id = l;
    rec.x.resize(cfg.dim_x + 1);
    rec.x[0] = 1.0;
    for (int j = 1; j <= cfg.dim_x; ++j)
      rec.x[j] = cfg.x_low + (cfg.x_high - cfg.x_low) * uniform01(rng);

    rec.roster.bidders.resize(static_cast<std::size_t>(cfg.n_bidders));
    double best = -std::numeric_limits<double>::infinity();
    double second = best;
    int win = 0;
    for (int i = 0; i < cfg.n_bidders; ++i) {
      double ut = uniform01(rng);
      int type = static_cast<int>(
          std::lower_bound(cum.data(), cum.data() + cum.size(), ut) - cum.data());
      type = std::min(type, n_types - 1);
      rec.roster.bidders[static_cast<std::size_t>(i)].type = type;
      double u = uniform01(rng);
      double level = std::pow(u, 1.0 / lam_of_type[static_cast<std::size_t>(type)]);
      double v = rec.x.dot(cfg.gamma(level));
      // argmax ties break to the lowest bidder index
      if (v > best) {
        second = best;
        best = v;
        win = i;
      } else if (v > second) {
        second = v;
      }
    }
    rec.winner_index = win;
    rec.winner_type = rec.roster.bidders[static_cast<std::size_t>(win)].type;
    rec.winning_bid = second;
    out.push_back(std::move(rec));
  }
  return out;
}

McResult run_mc_study(const SimConfig& cfg, int n_replications, const VectorXd& tau_grid,
                      const VectorXd& eval_x, int threads) {
  if (n_replications < 1) throw InputError("run_mc_study: n_replications >= 1");
  const int T = static_cast<int>(tau_grid.size());

  struct RepOut {
    std::vector<double> va, vb;
    double lambda_hat = 0.0;
    double min_certificate = 0.0;
    bool ok = false;
  };
  std::vector<RepOut> reps(static_cast<std::size_t>(n_replications));

  parallel_for(static_cast<std::size_t>(n_replications), threads, [&](std::size_t r) {
    SimConfig c = cfg;
    c.master_seed = derive_seed(cfg.master_seed, r);
    try {
      Dataset data = simulate_dataset(c);
      MleResult mle = mle_fit(data, AsymmetryVariant::TypeFixedEffects);
      double lam_hat = mle.spec.alpha[1];
      RepOut& ro = reps[r];
      ro.va.resize(static_cast<std::size_t>(T));
      ro.vb.resize(static_cast<std::size_t>(T));
      for (int t = 0; t < T; ++t) {
        // V_type(tau | eval_x) = x' gamma_hat(tau^{1/lambda_type}); the curve
        // is re-fit at the exact transformed level for each type.
        for (int ty = 0; ty < 2; ++ty) {
          double lam_ty = ty == 0 ? mle.spec.alpha[0] : lam_hat;
          double u = std::pow(tau_grid[t], 1.0 / lam_ty);
          QrFit fit = qr_fit(data, u, mle.spec);
          ro.min_certificate = std::min(ro.min_certificate, fit.certificate);
          double v = eval_x.dot(fit.gamma_hat);
          (ty == 0 ? ro.va : ro.vb)[static_cast<std::size_t>(t)] = v;
        }
      }
      ro.lambda_hat = lam_hat;
      ro.ok = true;
    } catch (const std::exception&) {
      reps[r].ok = false;
    }
  });

  McResult out;
  out.tau_grid = tau_grid;
  out.type_a.resize(static_cast<std::size_t>(T));
  out.type_b.resize(static_cast<std::size_t>(T));
  std::vector<const RepOut*> good;
  for (const auto& r : reps)
    if (r.ok)
      good.push_back(&r);
    else
      ++out.n_failed;
  if (good.empty()) throw NumericError("run_mc_study: every replication failed");

  double lam_a = cfg.spec.alpha[0], lam_b = cfg.spec.alpha[1];
  for (int t = 0; t < T; ++t) {
    for (int ty = 0; ty < 2; ++ty) {
      double lam_ty = ty == 0 ? lam_a : lam_b;
      double truth = eval_x.dot(cfg.gamma(std::pow(tau_grid[t], 1.0 / lam_ty)));
      double mean = 0.0;
      for (auto* r : good) mean += (ty == 0 ? r->va : r->vb)[static_cast<std::size_t>(t)];
      mean /= static_cast<double>(good.size());
      double ss = 0.0;
      for (auto* r : good) {
        double dv = (ty == 0 ? r->va : r->vb)[static_cast<std::size_t>(t)] - mean;
        ss += dv * dv;
      }
      McCell cell;
      cell.bias = mean - truth;
      cell.se = good.size() > 1 ? std::sqrt(ss / (static_cast<double>(good.size()) - 1.0)) : 0.0;
      (ty == 0 ? out.type_a : out.type_b)[static_cast<std::size_t>(t)] = cell;
    }
  }
  for (auto* r : good) {
    out.lambda_hats.push_back(r->lambda_hat);
    out.min_certificate = std::min(out.min_certificate, r->min_certificate);
  }
  return out;
}

}  // namespace aqr
