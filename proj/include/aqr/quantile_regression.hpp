#pragma once

#include <Eigen/Dense>
#include <vector>

namespace aqr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Solution of min_gamma sum_l rho_{phi_l}(w_l - x_l' gamma) with the check
// loss rho_phi(u) = u (phi - 1[u<0]) and per-observation levels phi_l.
struct QrFit {
  double tau = 0.0;       // the quantile level this fit was requested for
  VectorXd gamma_hat;
  double objective = 0.0;
  // Subgradient optimality certificate: the minimum one-sided directional
  // derivative of the objective along +-e_k over all coordinates. Nonnegative
  // (up to roundoff) iff gamma_hat is optimal.
  double certificate = 0.0;
  int iterations = 0;
};

// Weighted check-loss objective and its smallest +-e_k directional derivative.
double check_loss(const MatrixXd& X, const VectorXd& w, const VectorXd& phi,
                  const VectorXd& gamma);
double min_directional_derivative(const MatrixXd& X, const VectorXd& w,
                                  const VectorXd& phi, const VectorXd& gamma);

// Exact LP solve by exchange pivoting over interpolation vertices: the
// optimum of the convex piecewise-linear objective is attained at a gamma
// interpolating d observations (d = #columns). Each iteration walks one
// edge of the polyhedral graph to the exact line-search minimum.
//
// Levels phi must lie in [0,1]; values outside signal corrupt inputs
// (UnboundedError). Degenerate levels in {0,1} are clamped to
// [1e-6, 1-1e-6] to keep the program bounded. Throws RankDeficientError
// when X lacks full column rank.
//
// warm_basis, when given, seeds the pivoting with a previous solution's basis
// (row indices) and receives the final basis: fitting a whole curve level by
// level then takes a handful of pivots per level instead of a cold solve.
QrFit qr_solve(const MatrixXd& X, const VectorXd& w, const VectorXd& phi,
               double tau_label = 0.0, std::vector<int>* warm_basis = nullptr);

}  // namespace aqr
