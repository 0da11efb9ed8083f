#pragma once

#include <cstdint>
#include <functional>

#include "aqr/dataset.hpp"
#include "aqr/model.hpp"

namespace aqr {

// Synthetic-auction generator: inverse-transform private values from a
// closed-form parent curve, winning bid = second-highest value.
struct SimConfig {
  long n_auctions = 2000;
  int n_bidders = 5;
  AsymmetrySpec spec = two_type_spec(1.0);  // true asymmetry (two-type)
  VectorXd type_probs;                      // per-type assignment probabilities; default equal
  std::function<VectorXd(double)> gamma;    // closed-form parent gamma(tau)
  int dim_x = 1;                            // non-intercept covariates, iid U[x_low, x_high]
  double x_low = 1.0, x_high = 3.0;
  std::uint64_t master_seed = 1;
};

// The paper-style default DGP: gamma_0(tau) = tau^{e^{1.5}}/2,
// gamma_1(tau) = tau^{e^{1.5}}/4, lambda = (1, e^2), N = 5, L = 2000.
SimConfig paper_mc_config(std::uint64_t master_seed);

// Deterministic given master_seed: auction l derives its own RNG stream, so
// the dataset is bit-identical regardless of evaluation order.
Dataset simulate_dataset(const SimConfig& cfg);

// Bias/SE of the estimated per-type private-value quantile function at a
// fixed evaluation covariate (the median auction), across replications of
// simulate + two-stage estimation.
struct McCell {
  double bias = 0.0;
  double se = 0.0;
};

struct McResult {
  VectorXd tau_grid;
  std::vector<McCell> type_a;  // one cell per tau
  std::vector<McCell> type_b;
  std::vector<double> lambda_hats;
  long n_failed = 0;            // replications whose estimation failed
  double min_certificate = 0.0; // worst subgradient certificate across all fits
};

McResult run_mc_study(const SimConfig& cfg, int n_replications, const VectorXd& tau_grid,
                      const VectorXd& eval_x, int threads = 1);

}  // namespace aqr
