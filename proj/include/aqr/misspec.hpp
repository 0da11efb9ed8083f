#pragma once

#include <vector>

namespace aqr {

// Two-bidder symmetric-misspecification experiment: parent F(v) = v^kappa on
// [0,1], true exponents (lambda1, lambda2). The misspecified symmetric
// private-value cdf matching the winning-bid law is
//   F_S(v) = 1 - (1 - v^{k l1} - v^{k l2} + v^{k(l1+l2)})^{1/2},
// whose reserve solves R_S - V_S^(1)(r_S)(1 - r_S) = 0 (seller value 0).
struct MisspecRow {
  double lambda1 = 0.0, lambda2 = 0.0, kappa = 1.0;
  double rp_asym = 0.0;   // optimal reserve price V(r*) under the truth
  double rp_mis = 0.0;    // R_S, the misspecified reserve price
  double rev_asym = 0.0;  // true revenue at the true optimum
  double rev_mis = 0.0;   // true revenue at the misspecified reserve
  double pct_loss = 0.0;  // (rev_asym - rev_mis) / rev_asym
};

// Revenue evaluation uses a rectangle rule over the fixed level grid
// t_i = i/1000 restricted to t_i >= r, and the r* argmax scans the same 999
// nodes (plus the misspecified level, which keeps the loss nonnegative).
// Finer or textbook-converged quadratures do NOT reproduce the reference
// high-curvature rows; the grid scheme does.
MisspecRow misspec_study(double lambda1, double lambda2, double kappa);

// The ten high/moderate-asymmetry rows and the five varying-asymmetry rows.
std::vector<MisspecRow> misspec_table1();
std::vector<MisspecRow> misspec_table2();

}  // namespace aqr
