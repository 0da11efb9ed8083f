#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

namespace aqr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Power-asymmetry families for lambda(z; alpha, beta) > 0. The winner-identity
// likelihood and all level transforms depend on the model only through these
// per-bidder exponents.
enum class AsymmetryVariant {
  FixedEffects,               // lambda_i = alpha[identity],    alpha[0] = 1
  TypeFixedEffects,           // lambda_i = alpha[type],        alpha[0] = 1
  LinearRegression,           // lambda_i = z'beta,             beta[0]  = 1
  LinearWithFixedEffects,     // lambda_i = alpha[id] + z'beta, alpha[0] = 1
  ExpLinearWithFixedEffects,  // lambda_i = alpha[id]*exp(z'b), alpha[0] = 1
};

// One bidder as seen by the asymmetry function: a persistent identity (for
// fixed effects), a discrete type label, and/or a covariate vector.
struct BidderInfo {
  int identity = -1;
  int type = -1;
  VectorXd z;
};

struct AsymmetrySpec {
  AsymmetryVariant variant = AsymmetryVariant::TypeFixedEffects;
  VectorXd alpha;  // fixed effects, identification pins alpha[0] = 1
  VectorXd beta;   // regression coefficients, LinearRegression pins beta[0] = 1
};

// Convenience: two-type spec with lambda_a = 1 (normalized) and lambda_b.
AsymmetrySpec two_type_spec(double lambda_b);

// lambda(z; alpha, beta) for one bidder. Throws InputError on a dimension or
// label mismatch, NumericError if the evaluated lambda is not strictly
// positive (e.g. a linear variant with a negative fitted value).
double lambda_eval(const AsymmetrySpec& spec, const BidderInfo& bidder);

// True exactly when the variant's identification constraint holds on the
// stored parameters (alpha[0] == 1 or beta[0] == 1).
bool normalization_holds(const AsymmetrySpec& spec);

struct BidderRoster {
  std::vector<BidderInfo> bidders;

  int n() const { return static_cast<int>(bidders.size()); }
  // Counts per type for two-type rosters; {-1,-1} when a bidder lacks a label.
  std::array<int, 2> type_counts() const;
};

// Roster of unlabeled-covariate bidders: p of type 0 and q of type 1.
BidderRoster two_type_roster(int n_type_a, int n_type_b);

VectorXd lambda_vector(const AsymmetrySpec& spec, const BidderRoster& roster);

// P(bidder i wins | roster) = lambda_i / sum_j lambda_j; sums to one.
VectorXd win_probabilities(const AsymmetrySpec& spec, const BidderRoster& roster);

// The quantile-level transformation for a given winner: carries the winner's
// exponent, the roster total and the total excluding the winner.
struct LevelTransform {
  double lambda_winner = 1.0;
  double lambda_total = 2.0;  // Lambda_N
  double lambda_excl = 1.0;   // Lambda_{N|i} = Lambda_N - lambda_winner
};

LevelTransform level_transform(const AsymmetrySpec& spec, const BidderRoster& roster,
                               int winner_index);
// Two-type fast path: p bidders with lambda_a, q with lambda_b, winner of
// winner_type (0 = a, 1 = b).
LevelTransform level_transform_counts(double lambda_a, double lambda_b, int p, int q,
                                      int winner_type);

// Psi_i(tau) = (Lambda_N tau^{Lambda_N|i} - Lambda_N|i tau^{Lambda_N}) / lambda_i,
// the winning-bid cdf evaluated at parent level tau given that i wins.
// Strictly increasing on (0,1) with Psi(0)=0, Psi(1)=1.
double psi(double tau, const LevelTransform& t);

// Inverse of psi by bisection: |psi(tau) - u| <= tol. Newton is avoided since
// the derivative vanishes at tau = 1.
double psi_inverse(double u, const LevelTransform& t, double tol = 1e-10);

// d psi / d tau = Lambda_N Lambda_N|i tau^{Lambda_N|i - 1} (1 - tau^{lambda_i}) / lambda_i.
double psi_tau_derivative(double tau, const LevelTransform& t);

// Parent quantile-regression curve: gamma(tau_g) sampled on a strictly
// increasing grid in (0,1). Evaluation is a left-nearest step function so the
// quantile grid and the Riemann cdf grid are bit-compatible; no monotonicity
// is imposed on the raw coefficients (rearrangement happens downstream).
struct ParentQuantileCurve {
  VectorXd grid;   // G levels, strictly increasing, inside (0,1)
  MatrixXd gamma;  // G x (d+1) coefficients

  int size() const { return static_cast<int>(grid.size()); }
  int dim() const { return static_cast<int>(gamma.cols()); }
  bool partial = false;  // set when some levels of a fitted curve failed
};

// tau_i = i/denom for i = 1..denom-1 (denom=100 gives the default 99 grid).
VectorXd default_tau_grid(int denom = 100);

// Samples a closed-form gamma(.) on a grid.
ParentQuantileCurve sample_curve(const std::function<VectorXd(double)>& gamma,
                                 const VectorXd& grid);

// Index of the left-nearest grid point at or below tau (step interpolation).
int curve_step_index(const ParentQuantileCurve& curve, double tau);

// x'gamma(tau) with step interpolation; throws InputError outside [grid min,
// grid max].
double parent_quantile(const ParentQuantileCurve& curve, double tau, const VectorXd& x);

// As parent_quantile but with the level clamped into the grid range, i.e. the
// step curve extended constantly beyond its endpoints.
double parent_quantile_clamped(const ParentQuantileCurve& curve, double tau,
                               const VectorXd& x);

// Bidder-i quantile x'gamma(tau^{1/lambda_i}); the transformed level is
// clamped into the grid range (lambda -> infinity approaches V at the top
// grid point).
double bidder_quantile(const ParentQuantileCurve& curve, double tau, const VectorXd& x,
                       double lambda_i);

// Riemann-sum parent cdf on the curve's grid:
// (1/G) * #{g : x'gamma(tau_g) <= v}, a nondecreasing step function in [0,1].
double parent_cdf_on_grid(const ParentQuantileCurve& curve, const VectorXd& x, double v);

// Validation helpers (throw InputError on violation).
void validate_covariates(const VectorXd& x);
void validate_curve(const ParentQuantileCurve& curve);

}  // namespace aqr
