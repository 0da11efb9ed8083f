#include "aqr/quantile_regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "aqr/errors.hpp"

namespace aqr {

double check_loss(const MatrixXd& X, const VectorXd& w, const VectorXd& phi,
                  const VectorXd& gamma) {
  VectorXd res = w - X * gamma;
  double obj = 0.0;
  for (int l = 0; l < res.size(); ++l)
    obj += res[l] * (phi[l] - (res[l] < 0.0 ? 1.0 : 0.0));
  return obj;
}

namespace {

// One-sided directional derivative of the objective along v at residuals res.
// g = X v. Rows with res == 0 contribute the slope of whichever side the move
// enters: (1-phi) g for g > 0 (residual turns negative), -phi g for g < 0.
double directional_derivative(const VectorXd& res, const VectorXd& g, const VectorXd& phi,
                              double zero_tol) {
  double d = 0.0;
  for (int l = 0; l < res.size(); ++l) {
    if (g[l] == 0.0) continue;
    if (res[l] > zero_tol)
      d += -g[l] * phi[l];
    else if (res[l] < -zero_tol)
      d += g[l] * (1.0 - phi[l]);
    else
      d += g[l] > 0.0 ? g[l] * (1.0 - phi[l]) : -g[l] * phi[l];
  }
  return d;
}

}  // namespace

double min_directional_derivative(const MatrixXd& X, const VectorXd& w,
                                  const VectorXd& phi, const VectorXd& gamma) {
  VectorXd res = w - X * gamma;
  double scale = 1.0 + w.cwiseAbs().maxCoeff();
  double zero_tol = 1e-9 * scale;
  double dmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < X.cols(); ++k) {
    // direction +e_k means gamma_k increases, so residuals move by -X.col(k)
    VectorXd g = X.col(k);
    dmin = std::min(dmin, directional_derivative(res, g, phi, zero_tol));
    dmin = std::min(dmin, directional_derivative(res, VectorXd(-g), phi, zero_tol));
  }
  return dmin;
}

QrFit qr_solve(const MatrixXd& X, const VectorXd& w, const VectorXd& phi_in,
               double tau_label, std::vector<int>* warm_basis) {
  const int L = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  if (L < d) throw RankDeficientError("qr_solve: fewer observations than coefficients");
  if (w.size() != L || phi_in.size() != L)
    throw InputError("qr_solve: size mismatch between X, w, phi");

  VectorXd phi = phi_in;
  for (int l = 0; l < L; ++l) {
    if (!(phi[l] >= 0.0 && phi[l] <= 1.0))
      throw UnboundedError("qr_solve: level outside [0,1] at observation " + std::to_string(l));
    phi[l] = std::clamp(phi[l], 1e-6, 1.0 - 1e-6);
  }

  std::vector<int> basis;
  bool seeded = false;
  if (warm_basis && static_cast<int>(warm_basis->size()) == d) {
    basis = *warm_basis;
    std::sort(basis.begin(), basis.end());
    bool in_range = true;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (basis[k] < 0 || basis[k] >= L || (k > 0 && basis[k] == basis[k - 1])) in_range = false;
    }
    if (in_range) {
      MatrixXd Bw(d, d);
      for (int k = 0; k < d; ++k) Bw.row(k) = X.row(basis[static_cast<std::size_t>(k)]);
      seeded = Eigen::FullPivLU<MatrixXd>(Bw).isInvertible();
    }
  }
  if (!seeded) {
    // Initial vertex: d independent rows chosen by column-pivoted QR of X'.
    Eigen::ColPivHouseholderQR<MatrixXd> rowsel(X.transpose());
    if (rowsel.rank() < d) throw RankDeficientError("qr_solve: design matrix is rank deficient");
    basis.resize(static_cast<std::size_t>(d));
    auto perm = rowsel.colsPermutation().indices();
    for (int k = 0; k < d; ++k) basis[static_cast<std::size_t>(k)] = perm[k];
    std::sort(basis.begin(), basis.end());
  }

  MatrixXd B(d, d);
  VectorXd wb(d);
  auto rebuild = [&](VectorXd& gamma, MatrixXd& Binv) {
    for (int k = 0; k < d; ++k) {
      B.row(k) = X.row(basis[static_cast<std::size_t>(k)]);
      wb[k] = w[basis[static_cast<std::size_t>(k)]];
    }
    Eigen::PartialPivLU<MatrixXd> lu(B);
    gamma = lu.solve(wb);
    Binv = lu.inverse();
  };

  VectorXd gamma(d);
  MatrixXd Binv(d, d);
  rebuild(gamma, Binv);

  const double scale = 1.0 + w.cwiseAbs().maxCoeff();
  const double zero_tol = 1e-9 * scale;
  const double opt_tol = 1e-10 * (1.0 + static_cast<double>(L));
  const int max_iter = 200 + 20 * L;

  VectorXd res = w - X * gamma;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    // G.col(k) is the residual response to basis-direction k: moving gamma by
    // t * Binv.col(k) changes res_l by -t * G(l,k), keeps other basic rows at 0
    // and drives basic row k's residual to -t.
    MatrixXd G = X * Binv;

    double best = -opt_tol;
    int best_k = -1;
    double best_sign = 0.0;
    for (int k = 0; k < d; ++k) {
      for (double sign : {1.0, -1.0}) {
        VectorXd g = sign * G.col(k);
        double der = directional_derivative(res, g, phi, zero_tol);
        if (der < best) {
          best = der;
          best_k = k;
          best_sign = sign;
        }
      }
    }
    if (best_k < 0) break;  // all directional derivatives nonnegative: optimal

    // Exact line search along the chosen edge. Residuals cross zero at
    // t = res_l / g_l; each crossing raises the slope by |g_l| (the check
    // loss has slope gap 1 between its two pieces).
    VectorXd g = best_sign * G.col(best_k);
    std::vector<std::pair<double, int>> cross;
    cross.reserve(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
      if (l == basis[static_cast<std::size_t>(best_k)] || g[l] == 0.0) continue;
      double t = res[l] / g[l];
      if (t > zero_tol / std::max(std::abs(g[l]), 1e-300)) cross.emplace_back(t, l);
    }
    std::sort(cross.begin(), cross.end());

    double slope = best;
    int enter = -1;
    for (const auto& [t, l] : cross) {
      slope += std::abs(g[l]);
      if (slope >= 0.0) {
        enter = l;
        break;
      }
    }
    if (enter < 0)
      throw UnboundedError("qr_solve: descent direction with no blocking observation");

    // The stepped gamma interpolates the new basis exactly, so rebuilding from
    // the basis rows is the numerically stable update.
    basis[static_cast<std::size_t>(best_k)] = enter;
    std::sort(basis.begin(), basis.end());
    rebuild(gamma, Binv);
    res = w - X * gamma;
  }
  if (iter >= max_iter)
    throw NonConvergenceError("qr_solve: pivot cap reached (degenerate cycling?)");

  if (warm_basis) *warm_basis = basis;

  QrFit fit;
  fit.tau = tau_label;
  fit.gamma_hat = gamma;
  fit.objective = check_loss(X, w, phi, gamma);
  fit.certificate = min_directional_derivative(X, w, phi, gamma);
  fit.iterations = iter;
  return fit;
}

}  // namespace aqr
