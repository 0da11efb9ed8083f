#include "aqr/misspec.hpp"

#include <algorithm>
#include <cmath>

#include "aqr/errors.hpp"

namespace aqr {

namespace {

constexpr int kGrid = 1000;  // level grid t_i = i/kGrid, i = 1..kGrid-1

// True expected revenue at parent level r, seller value 0, parent V(t)=t^{1/k}.
double revenue_at(double r, double l1, double l2, double kappa) {
  const double total = l1 + l2;
  const double ik = 1.0 / kappa;
  const double R = std::pow(r, ik);
  double boundary = std::pow(r, total - l1) * (1.0 - std::pow(r, l1)) +
                    std::pow(r, total - l2) * (1.0 - std::pow(r, l2));
  double integral = 0.0;
  int j0 = static_cast<int>(std::ceil(r * kGrid));
  if (j0 < 1) j0 = 1;
  for (int j = j0; j < kGrid; ++j) {
    double t = static_cast<double>(j) / kGrid;
    if (t < r) continue;
    double kern = -total * std::pow(t, total - 1.0) +
                  (total - l1) * std::pow(t, total - l1 - 1.0) +
                  (total - l2) * std::pow(t, total - l2 - 1.0);
    integral += std::pow(t, ik) * kern;
  }
  integral /= kGrid;
  return R * boundary + integral;
}

double f_sym(double v, double a, double b) {
  double g2 = (1.0 - std::pow(v, a)) * (1.0 - std::pow(v, b));
  return 1.0 - std::sqrt(std::max(g2, 0.0));
}

// V_S(r) = F_S^{-1}(r) by bisection (F_S is strictly increasing on [0,1]).
double v_sym(double r, double a, double b) {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    (f_sym(mid, a, b) < r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MisspecRow misspec_study(double lambda1, double lambda2, double kappa) {
  if (!(lambda1 > 0.0 && lambda2 > 0.0 && kappa > 0.0))
    throw InputError("misspec_study: lambda1, lambda2, kappa must be positive");
  MisspecRow row;
  row.lambda1 = lambda1;
  row.lambda2 = lambda2;
  row.kappa = kappa;

  // Misspecified reserve: bisection on [0.01, 0.99] of the symmetric FOC
  // V_S(r) - V_S'(r)(1-r), derivative by central difference h = 1e-4. When
  // the root falls outside (very concentrated distributions), the bracket
  // widens once before reporting failure.
  const double a = kappa * lambda1, b = kappa * lambda2;
  auto foc = [&](double r) {
    const double h = 1e-4;
    double v1 = (v_sym(r + h, a, b) - v_sym(r - h, a, b)) / (2.0 * h);
    return v_sym(r, a, b) - v1 * (1.0 - r);
  };
  double lo = 0.01, hi = 0.99;
  if (foc(lo) > 0.0) lo = 1e-6;
  if (foc(hi) < 0.0) hi = 1.0 - 1e-6;
  double flo = foc(lo), fhi = foc(hi);
  if (!(flo < 0.0 && fhi > 0.0))
    throw NumericError("misspec_study: symmetric FOC has no sign change");
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (foc(mid) < 0.0 ? lo : hi) = mid;
  }
  double r_sym = 0.5 * (lo + hi);
  row.rp_mis = v_sym(r_sym, a, b);

  // True revenue at the misspecified reserve, mapped back to the parent scale.
  double r_mis = std::pow(row.rp_mis, kappa);
  row.rev_mis = revenue_at(r_mis, lambda1, lambda2, kappa);

  // Grid argmax for the true optimum; r_mis joins the candidate set so the
  // reported loss cannot go negative from grid snapping.
  double best_r = r_mis, best_pi = row.rev_mis;
  for (int j = 1; j < kGrid; ++j) {
    double r = static_cast<double>(j) / kGrid;
    double pi = revenue_at(r, lambda1, lambda2, kappa);
    if (pi > best_pi) {
      best_pi = pi;
      best_r = r;
    }
  }
  row.rev_asym = best_pi;
  row.rp_asym = std::pow(best_r, 1.0 / kappa);
  row.pct_loss = (row.rev_asym - row.rev_mis) / row.rev_asym;
  return row;
}

std::vector<MisspecRow> misspec_table1() {
  std::vector<MisspecRow> rows;
  for (double l2 : {3.9, 0.9})
    for (double kappa : {1.0, 2.0, 5.0, 10.0, 50.0})
      rows.push_back(misspec_study(0.1, l2, kappa));
  return rows;
}

std::vector<MisspecRow> misspec_table2() {
  std::vector<MisspecRow> rows;
  for (double l1 : {0.1, 0.2, 0.3, 0.4, 0.5}) rows.push_back(misspec_study(l1, 1.0 - l1, 1.0));
  return rows;
}

}  // namespace aqr
