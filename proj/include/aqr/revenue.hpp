#pragma once

#include <vector>

#include "aqr/model.hpp"

namespace aqr {

// Probability of selling at reserve quantile level r: 1 - r^{Lambda_N}.
double selling_probability(double r, const BidderRoster& roster, const AsymmetrySpec& spec);

// Expected seller revenue at reserve level r with seller value v0:
//   V0 r^{Lambda_N} + R sum_i r^{Lambda_N|i} (1 - r^{lambda_i})
//   + int_r^{1-eps} V(t|x) { (1-N) Lambda_N t^{Lambda_N - 1}
//                            + sum_i Lambda_N|i t^{Lambda_N|i - 1} } dt
// with R = x'gamma(r). The integral is a midpoint Riemann sum over the
// curve's tau-grid cells restricted to [r, 1-eps]; curve values step-extend
// beyond the grid endpoints. Throws InputError when r lies outside
// [eps, 1-eps].
double expected_revenue(double r, const VectorXd& x, const BidderRoster& roster,
                        const AsymmetrySpec& spec, const ParentQuantileCurve& curve,
                        double v0, double epsilon);

struct RevenueCurve {
  VectorXd r_grid;
  VectorXd pi;
  double v0 = 0.0;
  double epsilon = 0.1;
};

RevenueCurve revenue_curve(const VectorXd& x, const BidderRoster& roster,
                           const AsymmetrySpec& spec, const ParentQuantileCurve& curve,
                           double v0, double epsilon, int grid_size = 981);

struct ReserveSolution {
  double r_star = 0.0;        // reserve quantile level
  double reserve_price = 0.0; // R* = V(r*|x)
  double pi_star = 0.0;
};

// Grid argmax of expected_revenue over grid_size uniform levels in
// [eps, 1-eps]; ties resolve to the smallest r.
ReserveSolution optimal_reserve(const VectorXd& x, const BidderRoster& roster,
                                const AsymmetrySpec& spec, const ParentQuantileCurve& curve,
                                double v0, double epsilon, int grid_size = 981);

// First-order-condition residual
//   R - V^(1)(r|x) (r / Lambda_N) sum_i (r^{-lambda_i} - 1) - v0,
// with V^(1) by central finite difference on the curve grid. A root marks a
// stationary reserve level.
double foc_residual(double r, const VectorXd& x, const BidderRoster& roster,
                    const AsymmetrySpec& spec, const ParentQuantileCurve& curve, double v0);

// Symmetric benchmark (all exponents 1):
//   V0 r^N + R N r^{N-1} (1-r) + N(N-1) int_r^{1-eps} V(t|x) t^{N-2}(1-t) dt
// with the same partition/midpoint scheme as expected_revenue.
double symmetric_expected_revenue(double r, const VectorXd& x, int n,
                                  const ParentQuantileCurve& curve, double v0,
                                  double epsilon);

// Revenue per (count_a, count_b) split at a non-binding reserve (r = eps) and
// at the optimal reserve, with Bulow-Klemperer flags: an entry is flagged
// when adding one bidder of that type under no reserve yields less than the
// strategical revenue at the original roster.
struct TypeSwapRow {
  int n = 0;
  int count_a = 0, count_b = 0;
  double rev_nonstrat = 0.0;
  double rev_strat = 0.0;
  double r_star = 0.0, reserve_price = 0.0;
  double rev_add_a = 0.0, rev_add_b = 0.0;  // non-strategical, one extra bidder
  bool bk_violation_add_a = false;
  bool bk_violation_add_b = false;
};

std::vector<TypeSwapRow> type_swap_table(const VectorXd& x, const std::vector<int>& n_range,
                                         const AsymmetrySpec& spec,
                                         const ParentQuantileCurve& curve, double v0,
                                         double epsilon, int grid_size = 981);

}  // namespace aqr
