#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "aqr/dataset.hpp"
#include "aqr/model.hpp"
#include "aqr/quantile_regression.hpp"

namespace aqr {

struct MleResult {
  AsymmetrySpec spec;
  double loglik = 0.0;
  bool converged = false;
  long n_used = 0;  // auctions whose winner probability depends on parameters
};

// Stage 1: maximum likelihood on winner identities/types.
// TypeFixedEffects with two types is a 1-D concave search in log lambda
// (golden section on [1e-4, 1e4] then one Newton polish); other variants run
// a projected quasi-Newton from 8 low-discrepancy starts.
// Throws FlatLikelihoodError when no auction is informative.
MleResult mle_fit(const Dataset& data, AsymmetryVariant variant);

// Two-type winner-share MLE straight from (p, q, winner_type) triples with
// the lambda_a = 1 normalization; the specification tests re-estimate lambda
// inside every bootstrap replicate through this entry point.
double mle_lambda_from_triples(const std::vector<std::array<int, 3>>& pqt);

// Phi_l(tau) = Psi_{winner}(tau; roster, spec) for one record.
double transformed_level(double tau, const AuctionRecord& rec, const AsymmetrySpec& spec);

// Stage 2: quantile regression of winning bids on covariates at the
// per-observation transformed levels Phi_l(tau).
QrFit qr_fit(const Dataset& data, double tau, const AsymmetrySpec& spec);

// Independent per-level fits assembled into a curve. Levels that fail leave
// the previous-level coefficients in place and mark the curve partial.
ParentQuantileCurve qr_curve(const Dataset& data, const VectorXd& tau_grid,
                             const AsymmetrySpec& spec, int threads = 1);

struct BootstrapResult {
  VectorXd point;
  MatrixXd replicates;  // B x dim(point), failed replicates excluded
  VectorXd ci_low, ci_high;
  double coverage = 0.95;
  int B = 0;
  std::uint64_t seed = 0;
  long n_failed = 0;
};

// Pairwise bootstrap: resamples whole auction records with replacement and
// recomputes `statistic` per replicate. Failures (exceptions) are counted and
// excluded; more than 5% failures aborts with TestAbortError. Percentile CIs
// with linear interpolation between order statistics. Deterministic given
// seed, independent of thread count.
BootstrapResult pairwise_bootstrap(
    const Dataset& data, int B, std::uint64_t seed,
    const std::function<VectorXd(const Dataset&)>& statistic, double coverage = 0.95,
    int threads = 1);

}  // namespace aqr
