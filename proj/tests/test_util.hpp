#pragma once

#include <random>

#include "aqr/model.hpp"

namespace aqr_test {

using aqr::VectorXd;

// Random transform with lambdas in [0.2, 5], n in [2, 6].
inline aqr::LevelTransform random_transform(std::mt19937_64& g) {
  std::uniform_int_distribution<int> nd(2, 6);
  std::uniform_real_distribution<double> ld(0.2, 5.0);
  int n = nd(g);
  double total = 0.0;
  std::vector<double> lams(static_cast<std::size_t>(n));
  for (auto& l : lams) {
    l = ld(g);
    total += l;
  }
  aqr::LevelTransform t;
  t.lambda_winner = lams[0];
  t.lambda_total = total;
  t.lambda_excl = total - lams[0];
  return t;
}

inline VectorXd random_vector(std::mt19937_64& g, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(g);
  return v;
}

}  // namespace aqr_test
