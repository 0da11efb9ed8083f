#include "aqr/json_io.hpp"

#include <filesystem>
#include <fstream>

#include "aqr/errors.hpp"

namespace aqr {

namespace {

const char* variant_name(AsymmetryVariant v) {
  switch (v) {
    case AsymmetryVariant::FixedEffects: return "fixed_effects";
    case AsymmetryVariant::TypeFixedEffects: return "type_fixed_effects";
    case AsymmetryVariant::LinearRegression: return "linear_regression";
    case AsymmetryVariant::LinearWithFixedEffects: return "linear_with_fixed_effects";
    case AsymmetryVariant::ExpLinearWithFixedEffects: return "exp_linear_with_fixed_effects";
  }
  return "unknown";
}

AsymmetryVariant variant_from_name(const std::string& s) {
  if (s == "fixed_effects") return AsymmetryVariant::FixedEffects;
  if (s == "type_fixed_effects") return AsymmetryVariant::TypeFixedEffects;
  if (s == "linear_regression") return AsymmetryVariant::LinearRegression;
  if (s == "linear_with_fixed_effects") return AsymmetryVariant::LinearWithFixedEffects;
  if (s == "exp_linear_with_fixed_effects") return AsymmetryVariant::ExpLinearWithFixedEffects;
  throw InputError("unknown asymmetry variant: " + s);
}

json vec_to_json(const VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

VectorXd vec_from_json(const json& a) {
  VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

const char* normalization_name(AsymmetryVariant v) {
  return v == AsymmetryVariant::LinearRegression ? "beta[0] = 1" : "alpha[0] = 1";
}

}  // namespace

json to_json(const AsymmetrySpec& spec) {
  return json{{"variant", variant_name(spec.variant)},
              {"alpha", vec_to_json(spec.alpha)},
              {"beta", vec_to_json(spec.beta)},
              {"normalization", normalization_name(spec.variant)}};
}

AsymmetrySpec spec_from_json(const json& j) {
  AsymmetrySpec s;
  s.variant = variant_from_name(j.at("variant").get<std::string>());
  s.alpha = vec_from_json(j.at("alpha"));
  s.beta = vec_from_json(j.at("beta"));
  return s;
}

json to_json(const ParentQuantileCurve& curve) {
  json rows = json::array();
  for (int g = 0; g < curve.size(); ++g) rows.push_back(vec_to_json(curve.gamma.row(g)));
  return json{{"tau_grid", vec_to_json(curve.grid)},
              {"gamma", rows},
              {"partial", curve.partial}};
}

ParentQuantileCurve curve_from_json(const json& j) {
  ParentQuantileCurve c;
  c.grid = vec_from_json(j.at("tau_grid"));
  const auto& rows = j.at("gamma");
  if (rows.empty()) throw InputError("curve json: empty gamma");
  c.gamma.resize(rows.size(), rows[0].size());
  for (std::size_t g = 0; g < rows.size(); ++g)
    c.gamma.row(static_cast<int>(g)) = vec_from_json(rows[g]);
  c.partial = j.value("partial", false);
  validate_curve(c);
  return c;
}

json to_json(const MleResult& r) {
  json j = to_json(r.spec);
  j["loglik"] = r.loglik;
  j["converged"] = r.converged;
  j["n_used"] = r.n_used;
  return j;
}

json to_json(const BootstrapResult& r) {
  return json{{"point", vec_to_json(r.point)},  {"ci_low", vec_to_json(r.ci_low)},
              {"ci_high", vec_to_json(r.ci_high)}, {"coverage", r.coverage},
              {"B", r.B},                        {"seed", r.seed},
              {"n_failed", r.n_failed}};
}

json to_json(const TestReport& r) {
  json cells = json::array();
  for (const auto& c : r.per_cell)
    cells.push_back(json{{"p", c.p},
                         {"q", c.q},
                         {"l_pq", c.l_pq},
                         {"omega_hat", c.omega_hat},
                         {"model_share", c.model_share},
                         {"sigma_hat_sq", c.sigma_hat_sq},
                         {"xi", c.xi}});
  return json{{"name", r.name},       {"statistic", r.statistic}, {"p_value", r.p_value},
              {"B", r.B},             {"seed", r.seed},           {"per_cell", cells},
              {"n_failed", r.n_failed}};
}

json to_json(const MisspecRow& r) {
  return json{{"lambda1", r.lambda1},   {"lambda2", r.lambda2},   {"kappa", r.kappa},
              {"rp_asym", r.rp_asym},   {"rp_mis", r.rp_mis},     {"rev_asym", r.rev_asym},
              {"rev_mis", r.rev_mis},   {"pct_loss", r.pct_loss}};
}

void write_json_file(const std::string& path, const json& j) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw InputError("cannot write file: " + tmp);
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace aqr
