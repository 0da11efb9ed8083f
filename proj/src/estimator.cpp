#include "aqr/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "aqr/errors.hpp"
#include "aqr/parallel.hpp"
#include "aqr/rng.hpp"

namespace aqr {

namespace {

constexpr double kLogLamLo = -4.0 * 2.302585092994046;  // ln 1e-4
constexpr double kLogLamHi = 4.0 * 2.302585092994046;   // ln 1e4

// --- two-type fast path ----------------------------------------------------

struct TwoTypeCells {
  // (p, q) -> (count, wins of type a)
  std::map<std::pair<int, int>, std::pair<long, long>> cells;
  long n_mixed = 0;
};

TwoTypeCells collect_cells(const Dataset& data) {
  TwoTypeCells out;
  for (const auto& rec : data) {
    TypeCountView v = type_count_view(rec);
    auto& cell = out.cells[{v.p, v.q}];
    ++cell.first;
    if (v.winner_type == 0) ++cell.second;
    if (v.p > 0 && v.q > 0) ++out.n_mixed;
  }
  return out;
}

TwoTypeCells collect_cells(const std::vector<std::array<int, 3>>& pqt) {
  TwoTypeCells out;
  for (const auto& t : pqt) {
    auto& cell = out.cells[{t[0], t[1]}];
    ++cell.first;
    if (t[2] == 0) ++cell.second;
    if (t[0] > 0 && t[1] > 0) ++out.n_mixed;
  }
  return out;
}

// log-likelihood of log-lambda m over aggregated mixed cells:
// wins_a * ln(p/(p+lam q)) + wins_b * ln(lam q/(p+lam q)).
double cells_loglik(const TwoTypeCells& c, double m) {
  double lam = std::exp(m);
  double ll = 0.0;
  for (const auto& [pq, cw] : c.cells) {
    auto [p, q] = pq;
    if (p == 0 || q == 0) continue;
    auto [count, wins_a] = cw;
    double denom = p + lam * q;
    ll += static_cast<double>(wins_a) * std::log(p / denom) +
          static_cast<double>(count - wins_a) * std::log(lam * q / denom);
  }
  return ll;
}

// d/dm and d2/dm2 of cells_loglik (concave in m).
void cells_loglik_derivs(const TwoTypeCells& c, double m, double& d1, double& d2) {
  double lam = std::exp(m);
  d1 = 0.0;
  d2 = 0.0;
  for (const auto& [pq, cw] : c.cells) {
    auto [p, q] = pq;
    if (p == 0 || q == 0) continue;
    auto [count, wins_a] = cw;
    double denom = p + lam * q;
    double s = lam * q / denom;
    d1 += static_cast<double>(count - wins_a) - static_cast<double>(count) * s;
    d2 += -static_cast<double>(count) * s * (1.0 - s);
  }
}

double mle_loglambda(const TwoTypeCells& cells) {
  if (cells.n_mixed == 0)
    throw FlatLikelihoodError("mle_fit: no mixed-type auction, likelihood is flat");

  // golden section on [kLogLamLo, kLogLamHi] to width 1e-6
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = kLogLamLo, b = kLogLamHi;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = cells_loglik(cells, c1), f2 = cells_loglik(cells, c2);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = cells_loglik(cells, c2);
    } else {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = cells_loglik(cells, c1);
    }
  }
  double m = 0.5 * (a + b);
  // one Newton polish (the log-parameterized likelihood is concave)
  double d1, d2;
  cells_loglik_derivs(cells, m, d1, d2);
  if (d2 < 0.0) m = std::clamp(m - d1 / d2, kLogLamLo, kLogLamHi);
  return m;
}

MleResult mle_two_type(const Dataset& data) {
  TwoTypeCells cells = collect_cells(data);
  double m = mle_loglambda(cells);
  MleResult r;
  r.spec = two_type_spec(std::exp(m));
  r.loglik = cells_loglik(cells, m);
  r.converged = m > kLogLamLo + 1e-9 && m < kLogLamHi - 1e-9;
  r.n_used = cells.n_mixed;
  return r;
}

// --- general variants --------------------------------------------------------

// Parameter packing: free vector theta -> AsymmetrySpec honoring the variant's
// normalization. Sizes are inferred from the dataset (max identity / type
// label / z dimension).
struct VariantShape {
  AsymmetryVariant variant;
  int n_alpha = 0;  // total fixed effects incl. the normalized first one
  int n_beta = 0;
  bool log_alpha = false;  // free alphas parameterized on log scale

  int n_free() const {
    int a = n_alpha > 0 ? n_alpha - 1 : 0;
    int b = variant == AsymmetryVariant::LinearRegression ? n_beta - 1 : n_beta;
    return a + b;
  }

  AsymmetrySpec unpack(const VectorXd& theta) const {
    AsymmetrySpec s;
    s.variant = variant;
    int at = 0;
    if (n_alpha > 0) {
      s.alpha.resize(n_alpha);
      s.alpha[0] = 1.0;
      for (int i = 1; i < n_alpha; ++i, ++at)
        s.alpha[i] = log_alpha ? std::exp(theta[at]) : theta[at];
    }
    if (variant == AsymmetryVariant::LinearRegression) {
      s.beta.resize(n_beta);
      s.beta[0] = 1.0;
      for (int i = 1; i < n_beta; ++i, ++at) s.beta[i] = theta[at];
    } else if (n_beta > 0) {
      s.beta.resize(n_beta);
      for (int i = 0; i < n_beta; ++i, ++at) s.beta[i] = theta[at];
    }
    return s;
  }
};

VariantShape infer_shape(const Dataset& data, AsymmetryVariant variant) {
  VariantShape sh;
  sh.variant = variant;
  int max_id = -1, max_type = -1, zdim = 0;
  for (const auto& rec : data)
    for (const auto& b : rec.roster.bidders) {
      max_id = std::max(max_id, b.identity);
      max_type = std::max(max_type, b.type);
      zdim = std::max(zdim, static_cast<int>(b.z.size()));
    }
  switch (variant) {
    case AsymmetryVariant::FixedEffects:
      if (max_id < 0) throw InputError("mle_fit: FixedEffects needs bidder identities");
      sh.n_alpha = max_id + 1;
      sh.log_alpha = true;
      break;
    case AsymmetryVariant::TypeFixedEffects:
      if (max_type < 0) throw InputError("mle_fit: TypeFixedEffects needs type labels");
      sh.n_alpha = max_type + 1;
      sh.log_alpha = true;
      break;
    case AsymmetryVariant::LinearRegression:
      if (zdim < 1) throw InputError("mle_fit: LinearRegression needs bidder covariates");
      sh.n_beta = zdim;
      break;
    case AsymmetryVariant::LinearWithFixedEffects:
      if (max_id < 0 || zdim < 1)
        throw InputError("mle_fit: LinearWithFixedEffects needs identities and covariates");
      sh.n_alpha = max_id + 1;
      sh.n_beta = zdim;
      break;
    case AsymmetryVariant::ExpLinearWithFixedEffects:
      if (max_id < 0 || zdim < 1)
        throw InputError("mle_fit: ExpLinearWithFixedEffects needs identities and covariates");
      sh.n_alpha = max_id + 1;
      sh.n_beta = zdim;
      sh.log_alpha = true;
      break;
  }
  return sh;
}

double general_loglik(const Dataset& data, const AsymmetrySpec& spec, long* n_used) {
  double ll = 0.0;
  long used = 0;
  for (const auto& rec : data) {
    VectorXd lam(rec.n());
    for (int i = 0; i < rec.n(); ++i) {
      double v = lambda_eval(spec, rec.roster.bidders[static_cast<std::size_t>(i)]);
      lam[i] = std::max(v, 1e-8);
    }
    double total = lam.sum();
    double lw;
    if (rec.winner_index >= 0) {
      lw = lam[rec.winner_index];
    } else {
      // winner observed by type only: sum the exponents of that type
      lw = 0.0;
      for (int i = 0; i < rec.n(); ++i)
        if (rec.roster.bidders[static_cast<std::size_t>(i)].type == rec.winner_type)
          lw += lam[i];
      if (lw == 0.0) throw InputError("mle_fit: winner type absent from roster");
    }
    double p = lw / total;
    if (p < 1.0 - 1e-12) ++used;  // degenerate-probability auctions are uninformative
    ll += std::log(p);
  }
  if (n_used) *n_used = used;
  return ll;
}

// Projected quasi-Newton (BFGS with backtracking) on the free parameters,
// numeric central-difference gradient. Likelihoods here are low dimensional
// and cheap relative to stage 2, so robustness beats speed.
MleResult mle_general(const Dataset& data, AsymmetryVariant variant) {
  VariantShape sh = infer_shape(data, variant);
  const int dim = sh.n_free();
  if (dim == 0) throw FlatLikelihoodError("mle_fit: variant has no free parameter");

  auto negll = [&](const VectorXd& th) -> double {
    try {
      AsymmetrySpec s = sh.unpack(th);
      return -general_loglik(data, s, nullptr);
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  auto grad = [&](const VectorXd& th, double f0) -> VectorXd {
    VectorXd g(dim);
    for (int j = 0; j < dim; ++j) {
      double h = 1e-6 * (1.0 + std::abs(th[j]));
      VectorXd tp = th, tm = th;
      tp[j] += h;
      tm[j] -= h;
      double fp = negll(tp), fm = negll(tm);
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        g[j] = std::isfinite(fp) ? (fp - f0) / h : (f0 - fm) / h;
      } else {
        g[j] = (fp - fm) / (2.0 * h);
      }
    }
    return g;
  };

  // 8 starts: all-equal first, then a low-discrepancy spread (Halton bases 2,3).
  auto halton = [](int index, int base) {
    double f = 1.0, r = 0.0;
    for (int i = index; i > 0; i /= base) {
      f /= base;
      r += f * (i % base);
    }
    return r;
  };
  std::vector<VectorXd> starts;
  starts.push_back(VectorXd::Zero(dim));
  for (int s = 1; s < 8; ++s) {
    VectorXd th(dim);
    for (int j = 0; j < dim; ++j) {
      int base = j % 2 == 0 ? 2 : 3;
      th[j] = 2.0 * (halton(s + 1, base) - 0.5) * (1.0 + 0.5 * j);
    }
    starts.push_back(th);
  }

  VectorXd best_th;
  double best_f = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (const auto& start : starts) {
    VectorXd th = start;
    double f = negll(th);
    if (!std::isfinite(f)) continue;
    MatrixXd H = MatrixXd::Identity(dim, dim);
    VectorXd g = grad(th, f);
    bool ok = false;
    for (int it = 0; it < 200; ++it) {
      if (g.norm() < 1e-8 * (1.0 + std::abs(f))) {
        ok = true;
        break;
      }
      VectorXd p = -H * g;
      if (p.dot(g) > 0) p = -g;  // reset on loss of descent
      double step = 1.0;
      double fn = std::numeric_limits<double>::infinity();
      VectorXd tn;
      for (int bt = 0; bt < 40; ++bt) {
        tn = th + step * p;
        fn = negll(tn);
        if (fn < f + 1e-4 * step * p.dot(g)) break;
        step *= 0.5;
      }
      if (!(fn < f)) {
        ok = g.norm() < 1e-5 * (1.0 + std::abs(f));
        break;
      }
      VectorXd gn = grad(tn, fn);
      VectorXd sv = tn - th, yv = gn - g;
      double sy = sv.dot(yv);
      if (sy > 1e-12) {
        MatrixXd I = MatrixXd::Identity(dim, dim);
        H = (I - sv * yv.transpose() / sy) * H * (I - yv * sv.transpose() / sy) +
            sv * sv.transpose() / sy;
      }
      th = tn;
      f = fn;
      g = gn;
    }
    if (f < best_f) {
      best_f = f;
      best_th = th;
      converged = ok;
    }
  }
  if (!std::isfinite(best_f))
    throw FlatLikelihoodError("mle_fit: likelihood not finite at any start");

  MleResult r;
  r.spec = sh.unpack(best_th);
  long used = 0;
  r.loglik = general_loglik(data, r.spec, &used);
  r.converged = converged;
  r.n_used = used;
  if (used == 0) throw FlatLikelihoodError("mle_fit: no informative auctions");
  return r;
}

bool two_type_fast_path(const Dataset& data) {
  for (const auto& rec : data) {
    auto c = rec.roster.type_counts();
    if (c[0] < 0) return false;
    if (rec.winner_type < 0 && rec.winner_index < 0) return false;
  }
  return true;
}

}  // namespace

MleResult mle_fit(const Dataset& data, AsymmetryVariant variant) {
  if (data.empty()) throw InputError("mle_fit: empty dataset");
  if (variant == AsymmetryVariant::TypeFixedEffects && two_type_fast_path(data))
    return mle_two_type(data);
  return mle_general(data, variant);
}

double mle_lambda_from_triples(const std::vector<std::array<int, 3>>& pqt) {
  if (pqt.empty()) throw InputError("mle_lambda_from_triples: empty sample");
  return std::exp(mle_loglambda(collect_cells(pqt)));
}

double transformed_level(double tau, const AuctionRecord& rec, const AsymmetrySpec& spec) {
  if (spec.variant == AsymmetryVariant::TypeFixedEffects && spec.alpha.size() == 2) {
    TypeCountView v = type_count_view(rec);
    LevelTransform t =
        level_transform_counts(spec.alpha[0], spec.alpha[1], v.p, v.q, v.winner_type);
    return psi(tau, t);
  }
  if (rec.winner_index < 0) throw InputError("transformed_level: winner identity required");
  return psi(tau, level_transform(spec, rec.roster, rec.winner_index));
}

QrFit qr_fit(const Dataset& data, double tau, const AsymmetrySpec& spec) {
  if (data.empty()) throw InputError("qr_fit: empty dataset");
  const int L = static_cast<int>(data.size());
  const int d = static_cast<int>(data.front().x.size());
  MatrixXd X(L, d);
  VectorXd w(L), phi(L);
  for (int l = 0; l < L; ++l) {
    const auto& rec = data[static_cast<std::size_t>(l)];
    if (rec.x.size() != d) throw InputError("qr_fit: inconsistent covariate dimension");
    X.row(l) = rec.x;
    w[l] = rec.winning_bid;
    phi[l] = transformed_level(tau, rec, spec);
  }
  return qr_solve(X, w, phi, tau);
}

ParentQuantileCurve qr_curve(const Dataset& data, const VectorXd& tau_grid,
                             const AsymmetrySpec& spec, int threads) {
  ParentQuantileCurve curve;
  curve.grid = tau_grid;
  const int G = static_cast<int>(tau_grid.size());
  const int d = static_cast<int>(data.front().x.size());
  curve.gamma = MatrixXd::Zero(G, d);
  std::vector<char> failed(static_cast<std::size_t>(G), 0);
  parallel_for(static_cast<std::size_t>(G), threads, [&](std::size_t g) {
    try {
      QrFit fit = qr_fit(data, tau_grid[static_cast<int>(g)], spec);
      curve.gamma.row(static_cast<int>(g)) = fit.gamma_hat;
    } catch (const std::exception&) {
      failed[g] = 1;
    }
  });
  for (int g = 0; g < G; ++g) {
    if (failed[static_cast<std::size_t>(g)]) {
      curve.partial = true;
      curve.gamma.row(g) = g > 0 ? curve.gamma.row(g - 1) : curve.gamma.row(g).eval();
    }
  }
  validate_curve(curve);
  return curve;
}

BootstrapResult pairwise_bootstrap(const Dataset& data, int B, std::uint64_t seed,
                                   const std::function<VectorXd(const Dataset&)>& statistic,
                                   double coverage, int threads) {
  if (B < 1) throw InputError("pairwise_bootstrap: B >= 1 required");
  if (data.empty()) throw InputError("pairwise_bootstrap: empty dataset");

  BootstrapResult out;
  out.B = B;
  out.seed = seed;
  out.coverage = coverage;
  out.point = statistic(data);
  const int dim = static_cast<int>(out.point.size());
  const std::size_t L = data.size();

  MatrixXd reps(B, dim);
  std::vector<char> ok(static_cast<std::size_t>(B), 0);
  parallel_for(static_cast<std::size_t>(B), threads, [&](std::size_t b) {
    auto rng = make_rng(seed, b);
    Dataset sample;
    sample.reserve(L);
    for (std::size_t l = 0; l < L; ++l) sample.push_back(data[uniform_index(rng, L)]);
    try {
      VectorXd v = statistic(sample);
      if (v.size() == dim && v.allFinite()) {
        reps.row(static_cast<int>(b)) = v;
        ok[b] = 1;
      }
    } catch (const std::exception&) {
      // counted below
    }
  });

  long good = std::count(ok.begin(), ok.end(), 1);
  out.n_failed = B - good;
  if (out.n_failed * 20 > B)
    throw TestAbortError("pairwise_bootstrap: more than 5% of replicates failed (" +
                         std::to_string(out.n_failed) + "/" + std::to_string(B) + ")");
  out.replicates.resize(good, dim);
  int r = 0;
  for (int b = 0; b < B; ++b)
    if (ok[static_cast<std::size_t>(b)]) out.replicates.row(r++) = reps.row(b);

  out.ci_low.resize(dim);
  out.ci_high.resize(dim);
  double alpha = 0.5 * (1.0 - coverage);
  for (int j = 0; j < dim; ++j) {
    std::vector<double> col(static_cast<std::size_t>(good));
    for (int b = 0; b < good; ++b) col[static_cast<std::size_t>(b)] = out.replicates(b, j);
    std::sort(col.begin(), col.end());
    auto pct = [&](double p) {
      double pos = p * (static_cast<double>(good) - 1.0);
      std::size_t i0 = static_cast<std::size_t>(std::floor(pos));
      std::size_t i1 = std::min(i0 + 1, col.size() - 1);
      double fr = pos - static_cast<double>(i0);
      return (1.0 - fr) * col[i0] + fr * col[i1];
    };
    out.ci_low[j] = pct(alpha);
    out.ci_high[j] = pct(1.0 - alpha);
  }
  return out;
}

}  // namespace aqr
