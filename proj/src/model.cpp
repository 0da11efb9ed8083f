#include "aqr/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aqr/errors.hpp"

namespace aqr {

namespace {
constexpr double kLambdaFloor = 1e-8;  // Assumption-5 strict positivity floor
}

AsymmetrySpec two_type_spec(double lambda_b) {
  AsymmetrySpec s;
  s.variant = AsymmetryVariant::TypeFixedEffects;
  s.alpha = VectorXd(2);
  s.alpha << 1.0, lambda_b;
  return s;
}

double lambda_eval(const AsymmetrySpec& spec, const BidderInfo& bidder) {
  double lam = 0.0;
  switch (spec.variant) {
    case AsymmetryVariant::FixedEffects: {
      if (bidder.identity < 0 || bidder.identity >= spec.alpha.size())
        throw InputError("lambda_eval: bidder identity out of range");
      lam = spec.alpha[bidder.identity];
      break;
    }
    case AsymmetryVariant::TypeFixedEffects: {
      if (bidder.type < 0 || bidder.type >= spec.alpha.size())
        throw InputError("lambda_eval: bidder type label out of range");
      lam = spec.alpha[bidder.type];
      break;
    }
    case AsymmetryVariant::LinearRegression: {
      if (bidder.z.size() != spec.beta.size())
        throw InputError("lambda_eval: z dimension mismatch");
      lam = bidder.z.dot(spec.beta);
      break;
    }
    case AsymmetryVariant::LinearWithFixedEffects: {
      if (bidder.identity < 0 || bidder.identity >= spec.alpha.size())
        throw InputError("lambda_eval: bidder identity out of range");
      if (bidder.z.size() != spec.beta.size())
        throw InputError("lambda_eval: z dimension mismatch");
      lam = spec.alpha[bidder.identity] + bidder.z.dot(spec.beta);
      break;
    }
    case AsymmetryVariant::ExpLinearWithFixedEffects: {
      if (bidder.identity < 0 || bidder.identity >= spec.alpha.size())
        throw InputError("lambda_eval: bidder identity out of range");
      if (bidder.z.size() != spec.beta.size())
        throw InputError("lambda_eval: z dimension mismatch");
      lam = spec.alpha[bidder.identity] * std::exp(bidder.z.dot(spec.beta));
      break;
    }
  }
  if (!(lam > 0.0) || !std::isfinite(lam))
    throw NumericError("lambda_eval: non-positive asymmetry exponent");
  return lam;
}

bool normalization_holds(const AsymmetrySpec& spec) {
  switch (spec.variant) {
    case AsymmetryVariant::LinearRegression:
      return spec.beta.size() > 0 && spec.beta[0] == 1.0;
    default:
      return spec.alpha.size() > 0 && spec.alpha[0] == 1.0;
  }
}

std::array<int, 2> BidderRoster::type_counts() const {
  std::array<int, 2> c{0, 0};
  for (const auto& b : bidders) {
    if (b.type != 0 && b.type != 1) return {-1, -1};
    ++c[static_cast<std::size_t>(b.type)];
  }
  return c;
}

BidderRoster two_type_roster(int n_type_a, int n_type_b) {
  if (n_type_a < 0 || n_type_b < 0 || n_type_a + n_type_b < 2)
    throw InputError("two_type_roster: need at least two bidders");
  BidderRoster r;
  r.bidders.reserve(static_cast<std::size_t>(n_type_a + n_type_b));
  for (int i = 0; i < n_type_a; ++i) r.bidders.push_back(BidderInfo{-1, 0, {}});
  for (int i = 0; i < n_type_b; ++i) r.bidders.push_back(BidderInfo{-1, 1, {}});
  return r;
}

VectorXd lambda_vector(const AsymmetrySpec& spec, const BidderRoster& roster) {
  VectorXd lam(roster.n());
  for (int i = 0; i < roster.n(); ++i)
    lam[i] = lambda_eval(spec, roster.bidders[static_cast<std::size_t>(i)]);
  return lam;
}

VectorXd win_probabilities(const AsymmetrySpec& spec, const BidderRoster& roster) {
  if (roster.n() < 2) throw InputError("win_probabilities: roster needs n >= 2");
  VectorXd lam = lambda_vector(spec, roster);
  return lam / lam.sum();
}

LevelTransform level_transform(const AsymmetrySpec& spec, const BidderRoster& roster,
                               int winner_index) {
  if (winner_index < 0 || winner_index >= roster.n())
    throw InputError("level_transform: winner index out of range");
  VectorXd lam = lambda_vector(spec, roster);
  LevelTransform t;
  t.lambda_winner = lam[winner_index];
  t.lambda_total = lam.sum();
  t.lambda_excl = t.lambda_total - t.lambda_winner;
  return t;
}

LevelTransform level_transform_counts(double lambda_a, double lambda_b, int p, int q,
                                      int winner_type) {
  if (p < 0 || q < 0 || p + q < 2) throw InputError("level_transform_counts: n >= 2 required");
  if (winner_type != 0 && winner_type != 1)
    throw InputError("level_transform_counts: winner type must be 0 or 1");
  if ((winner_type == 0 && p == 0) || (winner_type == 1 && q == 0))
    throw InputError("level_transform_counts: winner type not in roster");
  if (lambda_a < kLambdaFloor || lambda_b < kLambdaFloor)
    throw NumericError("level_transform_counts: lambda below positivity floor");
  LevelTransform t;
  t.lambda_winner = winner_type == 0 ? lambda_a : lambda_b;
  t.lambda_total = p * lambda_a + q * lambda_b;
  t.lambda_excl = t.lambda_total - t.lambda_winner;
  return t;
}

double psi(double tau, const LevelTransform& t) {
  if (tau <= 0.0) return 0.0;
  if (tau >= 1.0) return 1.0;
  const double a = std::pow(tau, t.lambda_excl);
  const double b = std::pow(tau, t.lambda_total);
  double u = (t.lambda_total * a - t.lambda_excl * b) / t.lambda_winner;
  return std::clamp(u, 0.0, 1.0);
}

double psi_inverse(double u, const LevelTransform& t, double tol) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double val = psi(mid, t);
    if (std::abs(val - u) <= tol) return mid;
    (val < u ? lo : hi) = mid;
  }
  double mid = 0.5 * (lo + hi);
  if (std::abs(psi(mid, t) - u) <= 1e3 * tol) return mid;
  throw NonConvergenceError("psi_inverse: bisection did not reach tolerance");
}

double psi_tau_derivative(double tau, const LevelTransform& t) {
  if (tau >= 1.0) return 0.0;
  if (tau <= 0.0) {
    // tau -> 0 limit: 0 when Lambda_N|i > 1, Lambda_N at exactly 1, +inf below.
    if (t.lambda_excl > 1.0) return 0.0;
    if (t.lambda_excl == 1.0) return t.lambda_total;
    return std::numeric_limits<double>::infinity();
  }
  return t.lambda_total * t.lambda_excl * std::pow(tau, t.lambda_excl - 1.0) *
         (1.0 - std::pow(tau, t.lambda_winner)) / t.lambda_winner;
}

VectorXd default_tau_grid(int denom) {
  if (denom < 2) throw InputError("default_tau_grid: denom >= 2 required");
  VectorXd g(denom - 1);
  for (int i = 1; i < denom; ++i) g[i - 1] = static_cast<double>(i) / denom;
  return g;
}

ParentQuantileCurve sample_curve(const std::function<VectorXd(double)>& gamma,
                                 const VectorXd& grid) {
  ParentQuantileCurve c;
  c.grid = grid;
  VectorXd g0 = gamma(grid[0]);
  c.gamma.resize(grid.size(), g0.size());
  c.gamma.row(0) = g0;
  for (int i = 1; i < grid.size(); ++i) c.gamma.row(i) = gamma(grid[i]);
  validate_curve(c);
  return c;
}

int curve_step_index(const ParentQuantileCurve& curve, double tau) {
  const auto& g = curve.grid;
  // last index with g[i] <= tau
  int lo = 0, hi = curve.size() - 1;
  if (tau < g[0] || tau > g[hi]) throw InputError("curve evaluation outside grid range");
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (g[mid] <= tau)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

double parent_quantile(const ParentQuantileCurve& curve, double tau, const VectorXd& x) {
  int g = curve_step_index(curve, tau);
  if (x.size() != curve.dim()) throw InputError("parent_quantile: x dimension mismatch");
  return curve.gamma.row(g).dot(x);
}

double parent_quantile_clamped(const ParentQuantileCurve& curve, double tau,
                               const VectorXd& x) {
  double lo = curve.grid[0], hi = curve.grid[curve.size() - 1];
  return parent_quantile(curve, std::clamp(tau, lo, hi), x);
}

double bidder_quantile(const ParentQuantileCurve& curve, double tau, const VectorXd& x,
                       double lambda_i) {
  if (!(lambda_i > 0.0)) throw NumericError("bidder_quantile: lambda must be positive");
  double level = tau <= 0.0 ? 0.0 : std::pow(tau, 1.0 / lambda_i);
  return parent_quantile_clamped(curve, level, x);
}

double parent_cdf_on_grid(const ParentQuantileCurve& curve, const VectorXd& x, double v) {
  if (x.size() != curve.dim()) throw InputError("parent_cdf_on_grid: x dimension mismatch");
  int count = 0;
  for (int g = 0; g < curve.size(); ++g)
    if (curve.gamma.row(g).dot(x) <= v) ++count;  // closed lower ties
  return static_cast<double>(count) / curve.size();
}

void validate_covariates(const VectorXd& x) {
  if (x.size() < 1 || x[0] != 1.0)
    throw InputError("covariates: first entry must be the intercept 1.0");
  for (int i = 1; i < x.size(); ++i)
    if (!(x[i] > 0.0) || !std::isfinite(x[i]))
      throw InputError("covariates: non-intercept entries must be strictly positive");
}

void validate_curve(const ParentQuantileCurve& curve) {
  if (curve.size() < 1) throw InputError("curve: empty grid");
  if (curve.gamma.rows() != curve.grid.size()) throw InputError("curve: grid/gamma size mismatch");
  for (int i = 0; i < curve.size(); ++i) {
    if (!(curve.grid[i] > 0.0 && curve.grid[i] < 1.0))
      throw InputError("curve: grid levels must lie in (0,1)");
    if (i > 0 && !(curve.grid[i] > curve.grid[i - 1]))
      throw InputError("curve: grid must be strictly increasing");
    if (!curve.gamma.row(i).allFinite()) throw InputError("curve: non-finite coefficients");
  }
}

}  // namespace aqr
