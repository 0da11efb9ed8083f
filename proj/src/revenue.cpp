#include "aqr/revenue.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "aqr/errors.hpp"

namespace aqr {

namespace {

// Midpoint Riemann sum of f over [a, b] on the partition induced by the
// curve's grid points interior to (a, b).
template <typename F>
double midpoint_on_grid(const ParentQuantileCurve& curve, double a, double b, F&& f) {
  if (b <= a) return 0.0;
  double total = 0.0;
  double left = a;
  for (int g = 0; g < curve.size(); ++g) {
    double cut = curve.grid[g];
    if (cut <= left) continue;
    if (cut >= b) break;
    total += (cut - left) * f(0.5 * (left + cut));
    left = cut;
  }
  total += (b - left) * f(0.5 * (left + b));
  return total;
}

}  // namespace

double selling_probability(double r, const BidderRoster& roster, const AsymmetrySpec& spec) {
  if (r < 0.0 || r > 1.0) throw InputError("selling_probability: r must lie in [0,1]");
  VectorXd lam = lambda_vector(spec, roster);
  return 1.0 - std::pow(r, lam.sum());
}

double expected_revenue(double r, const VectorXd& x, const BidderRoster& roster,
                        const AsymmetrySpec& spec, const ParentQuantileCurve& curve,
                        double v0, double epsilon) {
  const double hi = 1.0 - epsilon;
  if (r < epsilon - 1e-12 || r > hi + 1e-12)
    throw InputError("expected_revenue: r outside [epsilon, 1-epsilon]");
  VectorXd lam = lambda_vector(spec, roster);
  const int n = static_cast<int>(lam.size());
  const double total = lam.sum();
  const double R = parent_quantile_clamped(curve, r, x);

  double boundary = 0.0;
  for (int i = 0; i < n; ++i) {
    double excl = total - lam[i];
    boundary += std::pow(r, excl) * (1.0 - std::pow(r, lam[i]));
  }

  auto integrand = [&](double t) {
    double kern = (1.0 - n) * total * std::pow(t, total - 1.0);
    for (int i = 0; i < n; ++i) {
      double excl = total - lam[i];
      kern += excl * std::pow(t, excl - 1.0);
    }
    return parent_quantile_clamped(curve, t, x) * kern;
  };
  return v0 * std::pow(r, total) + R * boundary + midpoint_on_grid(curve, r, hi, integrand);
}

RevenueCurve revenue_curve(const VectorXd& x, const BidderRoster& roster,
                           const AsymmetrySpec& spec, const ParentQuantileCurve& curve,
                           double v0, double epsilon, int grid_size) {
  RevenueCurve out;
  out.v0 = v0;
  out.epsilon = epsilon;
  out.r_grid.resize(grid_size);
  out.pi.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    double r = epsilon + (1.0 - 2.0 * epsilon) * i / (grid_size - 1.0);
    out.r_grid[i] = r;
    out.pi[i] = expected_revenue(r, x, roster, spec, curve, v0, epsilon);
  }
  return out;
}

ReserveSolution optimal_reserve(const VectorXd& x, const BidderRoster& roster,
                                const AsymmetrySpec& spec, const ParentQuantileCurve& curve,
                                double v0, double epsilon, int grid_size) {
  RevenueCurve rc = revenue_curve(x, roster, spec, curve, v0, epsilon, grid_size);
  int best = 0;
  for (int i = 1; i < rc.pi.size(); ++i)
    if (rc.pi[i] > rc.pi[best]) best = i;  // strict: ties keep the smallest r
  ReserveSolution sol;
  sol.r_star = rc.r_grid[best];
  sol.pi_star = rc.pi[best];
  sol.reserve_price = parent_quantile_clamped(curve, sol.r_star, x);
  return sol;
}

double foc_residual(double r, const VectorXd& x, const BidderRoster& roster,
                    const AsymmetrySpec& spec, const ParentQuantileCurve& curve, double v0) {
  if (r <= 0.0 || r >= 1.0) throw InputError("foc_residual: r must lie in (0,1)");
  VectorXd lam = lambda_vector(spec, roster);
  double total = lam.sum();
  double R = parent_quantile_clamped(curve, r, x);

  // central difference on adjacent grid points around r
  int g = curve_step_index(curve, std::clamp(r, curve.grid[0], curve.grid[curve.size() - 1]));
  int g_lo = std::max(g - 1, 0);
  int g_hi = std::min(g + 1, curve.size() - 1);
  if (g_hi == g_lo) throw NumericError("foc_residual: curve grid too small for a derivative");
  double dv = curve.gamma.row(g_hi).dot(x) - curve.gamma.row(g_lo).dot(x);
  double v1 = dv / (curve.grid[g_hi] - curve.grid[g_lo]);

  double s = 0.0;
  for (int i = 0; i < lam.size(); ++i) s += std::pow(r, -lam[i]) - 1.0;
  return R - v1 * (r / total) * s - v0;
}

double symmetric_expected_revenue(double r, const VectorXd& x, int n,
                                  const ParentQuantileCurve& curve, double v0,
                                  double epsilon) {
  if (n < 2) throw InputError("symmetric_expected_revenue: n >= 2 required");
  const double hi = 1.0 - epsilon;
  if (r < epsilon - 1e-12 || r > hi + 1e-12)
    throw InputError("symmetric_expected_revenue: r outside [epsilon, 1-epsilon]");
  const double R = parent_quantile_clamped(curve, r, x);
  const double nn = static_cast<double>(n);
  auto integrand = [&](double t) {
    return parent_quantile_clamped(curve, t, x) * nn * (nn - 1.0) * std::pow(t, nn - 2.0) *
           (1.0 - t);
  };
  return v0 * std::pow(r, nn) + R * nn * std::pow(r, nn - 1.0) * (1.0 - r) +
         midpoint_on_grid(curve, r, hi, integrand);
}

std::vector<TypeSwapRow> type_swap_table(const VectorXd& x, const std::vector<int>& n_range,
                                         const AsymmetrySpec& spec,
                                         const ParentQuantileCurve& curve, double v0,
                                         double epsilon, int grid_size) {
  auto nonstrat = [&](int a, int b) {
    BidderRoster roster = two_type_roster(a, b);
    return expected_revenue(epsilon, x, roster, spec, curve, v0, epsilon);
  };
  std::vector<TypeSwapRow> rows;
  for (int n : n_range) {
    for (int a = n; a >= 0; --a) {
      int b = n - a;
      TypeSwapRow row;
      row.n = n;
      row.count_a = a;
      row.count_b = b;
      row.rev_nonstrat = nonstrat(a, b);
      BidderRoster roster = two_type_roster(a, b);
      ReserveSolution sol = optimal_reserve(x, roster, spec, curve, v0, epsilon, grid_size);
      row.rev_strat = sol.pi_star;
      row.r_star = sol.r_star;
      row.reserve_price = sol.reserve_price;
      row.rev_add_a = nonstrat(a + 1, b);
      row.rev_add_b = nonstrat(a, b + 1);
      row.bk_violation_add_a = row.rev_add_a < row.rev_strat;
      row.bk_violation_add_b = row.rev_add_b < row.rev_strat;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace aqr
