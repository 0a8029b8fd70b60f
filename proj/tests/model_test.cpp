#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "newsrank/model.hpp"
#include "newsrank/util.hpp"

using namespace newsrank;

namespace {

DesignMatrix make_matrix(size_t n, size_t p, uint64_t seed) {
  DesignMatrix m;
  m.n = n;
  m.p = p;
  for (size_t j = 0; j < p; ++j) m.feature_names.push_back("f" + std::to_string(j));
  Rng rng(seed);
  m.x.resize(n * p);
  for (double& v : m.x) v = rng.gauss();
  m.y.assign(n, 0.0);
  return m;
}

// y = X . signal + intercept + noise_sd * N(0,1)
void fill_response(DesignMatrix& m, const std::vector<double>& signal, double intercept,
                   double noise_sd, uint64_t seed) {
  Rng rng(seed);
  for (size_t i = 0; i < m.n; ++i) {
    double v = intercept;
    for (size_t j = 0; j < m.p; ++j) v += signal[j] * m.at(i, j);
    m.y[i] = v + noise_sd * rng.gauss();
  }
}

// Least squares on a standardized matrix via normal equations with partial
// pivoting; the oracle for lasso at lambda = 0.
std::vector<double> ols_oracle(const DesignMatrix& s) {
  size_t p = s.p, n = s.n;
  double ybar = 0.0;
  for (double v : s.y) ybar += v;
  ybar /= static_cast<double>(n);

  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (size_t j = 0; j < p; ++j) {
    for (size_t k = 0; k < p; ++k) {
      double dot = 0.0;
      for (size_t i = 0; i < n; ++i) dot += s.at(i, j) * s.at(i, k);
      a[j][k] = dot;
    }
    double rhs = 0.0;
    for (size_t i = 0; i < n; ++i) rhs += s.at(i, j) * (s.y[i] - ybar);
    a[j][p] = rhs;
  }
  for (size_t col = 0; col < p; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < p; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (size_t k = col; k <= p; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::vector<double> beta(p);
  for (size_t j = 0; j < p; ++j) beta[j] = a[j][p] / a[j][j];
  return beta;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("standardize: population moments, exclusions, validation") {
  DesignMatrix m;
  m.n = 4;
  m.p = 2;
  m.feature_names = {"a", "const"};
  m.x = {1, 7, 2, 7, 3, 7, 6, 7};  // col 0 = {1,2,3,6}, col 1 constant
  m.y = {1, 2, 3, 4};

  DesignMatrix s = standardize(m);
  CHECK(s.standardized);
  CHECK(s.mean[0] == doctest::Approx(3.0));
  CHECK(s.sd[0] == doctest::Approx(std::sqrt(3.5)));  // population variance
  CHECK(s.excluded[0] == 0);
  CHECK(s.excluded[1] == 1);
  CHECK(s.at(0, 1) == 0.0);  // excluded column zeroed

  double mean = 0, var = 0;
  for (size_t i = 0; i < 4; ++i) mean += s.at(i, 0);
  mean /= 4;
  for (size_t i = 0; i < 4; ++i) var += (s.at(i, 0) - mean) * (s.at(i, 0) - mean);
  CHECK(mean == doctest::Approx(0.0));
  CHECK(var / 4 == doctest::Approx(1.0));

  DesignMatrix tiny = m;
  tiny.n = 1;
  tiny.x = {1, 7};
  tiny.y = {1};
  CHECK_THROWS_AS(standardize(tiny), Error);

  DesignMatrix bad = m;
  bad.x[2] = std::nan("");
  CHECK_THROWS_AS(standardize(bad), Error);

  DesignMatrix flat = m;
  flat.x = {7, 7, 7, 7, 7, 7, 7, 7};
  CHECK_THROWS_AS(standardize(flat), Error);

  DesignMatrix shape = m;
  shape.x.pop_back();
  CHECK_THROWS_AS(standardize(shape), Error);
}

TEST_CASE("lasso at lambda 0 matches least squares") {
  for (uint64_t seed : {11ull, 12ull, 13ull}) {
    DesignMatrix m = make_matrix(60, 4, seed);
    fill_response(m, {2.0, -1.5, 0.7, 0.0}, 3.0, 0.3, seed + 100);
    DesignMatrix s = standardize(m);
    std::vector<double> oracle = ols_oracle(s);

    LinearRankModel fit = lasso_fit(s, 0.0);
    for (size_t j = 0; j < s.p; ++j) {
      CHECK(fit.coef[j] == doctest::Approx(oracle[j]).epsilon(1e-6));
    }
    double ybar = 0;
    for (double v : s.y) ybar += v;
    CHECK(fit.intercept == doctest::Approx(ybar / static_cast<double>(s.n)));
  }
}

TEST_CASE("all coefficients vanish exactly at lambda_max and above") {
  DesignMatrix m = make_matrix(50, 3, 21);
  fill_response(m, {1.0, -2.0, 0.5}, 0.0, 0.2, 22);
  DesignMatrix s = standardize(m);
  double lmax = lambda_max(s);
  CHECK(lmax > 0.0);

  for (double lambda : {lmax, lmax * 1.5}) {
    LinearRankModel fit = lasso_fit(s, lambda);
    for (double b : fit.coef) CHECK(b == 0.0);
  }
  LinearRankModel below = lasso_fit(s, lmax * 0.95);
  bool any_nonzero = false;
  for (double b : below.coef) any_nonzero |= (b != 0.0);
  CHECK(any_nonzero);

  CHECK_THROWS_AS(lambda_max(m), Error);  // needs a standardized matrix
}

TEST_CASE("KKT conditions hold at the returned solution") {
  for (uint64_t seed : {31ull, 32ull, 33ull, 34ull}) {
    DesignMatrix m = make_matrix(40, 5, seed);
    fill_response(m, {1.5, 0.0, -1.0, 0.0, 0.4}, 1.0, 0.5, seed + 7);
    DesignMatrix s = standardize(m);
    double lambda = 0.3 * lambda_max(s);
    LassoOptions opts;
    LinearRankModel fit = lasso_fit(s, lambda, opts);

    std::vector<double> r(s.n);
    for (size_t i = 0; i < s.n; ++i) {
      double pred = fit.intercept;
      for (size_t j = 0; j < s.p; ++j) pred += s.at(i, j) * fit.coef[j];
      r[i] = s.y[i] - pred;
    }
    for (size_t j = 0; j < s.p; ++j) {
      double g = 0;
      for (size_t i = 0; i < s.n; ++i) g += s.at(i, j) * r[i];
      g /= static_cast<double>(s.n);
      if (fit.coef[j] == 0.0) {
        CHECK(std::fabs(g) <= lambda + 10 * opts.tol + 1e-12);
      } else {
        CHECK(std::fabs(g - lambda * (fit.coef[j] > 0 ? 1.0 : -1.0)) <= 10 * opts.tol + 1e-12);
      }
    }
  }
}

TEST_CASE("penalty scaling silences a column; warm starts converge to the same fit") {
  DesignMatrix m = make_matrix(50, 3, 41);
  fill_response(m, {2.0, 2.0, 0.0}, 0.0, 0.1, 42);
  DesignMatrix s = standardize(m);
  double lambda = 0.1 * lambda_max(s);

  LassoOptions heavy;
  heavy.penalty_scale = {1.0, 1e6, 1.0};
  LinearRankModel fit = lasso_fit(s, lambda, heavy);
  CHECK(fit.coef[0] != 0.0);
  CHECK(fit.coef[1] == 0.0);  // priced out

  LinearRankModel cold = lasso_fit(s, lambda);
  LassoOptions warm;
  warm.init_coef = cold.coef;
  LinearRankModel rewarm = lasso_fit(s, lambda, warm);
  for (size_t j = 0; j < s.p; ++j) {
    CHECK(rewarm.coef[j] == doctest::Approx(cold.coef[j]).epsilon(1e-6));
  }
  CHECK(rewarm.convergence.sweeps <= cold.convergence.sweeps);

  LassoOptions bad;
  bad.penalty_scale = {1.0};
  CHECK_THROWS_AS(lasso_fit(s, lambda, bad), Error);
  LassoOptions bad2;
  bad2.init_coef = {0.0};
  CHECK_THROWS_AS(lasso_fit(s, lambda, bad2), Error);
  CHECK_THROWS_AS(lasso_fit(m, lambda), Error);    // not standardized
  CHECK_THROWS_AS(lasso_fit(s, -0.5), Error);      // negative lambda
}

TEST_CASE("lambda grid is log-spaced from lambda_max down") {
  DesignMatrix m = make_matrix(40, 3, 51);
  fill_response(m, {1.0, 0.5, -0.5}, 0.0, 0.2, 52);
  DesignMatrix s = standardize(m);
  double lmax = lambda_max(s);

  std::vector<double> grid = default_lambda_grid(s, 10, 0.01);
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == doctest::Approx(lmax));
  CHECK(grid.back() == doctest::Approx(lmax * 0.01));
  for (size_t k = 1; k < grid.size(); ++k) {
    CHECK(grid[k] < grid[k - 1]);
    CHECK(grid[k] / grid[k - 1] == doctest::Approx(grid[1] / grid[0]));  // constant ratio
  }
  CHECK(default_lambda_grid(s, 1, 0.01) == std::vector<double>{lmax});
  CHECK_THROWS_AS(default_lambda_grid(s, 0, 0.01), Error);

  DesignMatrix flat_y = s;
  std::fill(flat_y.y.begin(), flat_y.y.end(), 5.0);
  CHECK(default_lambda_grid(flat_y, 10, 0.01) == std::vector<double>{0.0});
}

TEST_CASE("cross-validated fit recovers a planted sparse signal deterministically") {
  DesignMatrix m = make_matrix(80, 6, 61);
  fill_response(m, {3.0, 0.0, -2.0, 0.0, 0.0, 0.0}, 5.0, 0.4, 62);
  std::vector<double> grid = default_lambda_grid(standardize(m), 30, 0.01);

  LinearRankModel a = lasso_cv(m, grid, 5, 99);
  LinearRankModel b = lasso_cv(m, grid, 5, 99);
  CHECK(a.coef == b.coef);  // bitwise determinism
  CHECK(a.lambda == b.lambda);
  CHECK(a.seed == 99);

  CHECK(a.coef[0] > 1.0);   // strong true features survive CV
  CHECK(a.coef[2] < -0.5);
  int false_hits = 0;
  for (size_t j : {1ul, 3ul, 4ul, 5ul}) {
    if (std::fabs(a.coef[j]) > 0.25) ++false_hits;
  }
  CHECK(false_hits == 0);

  CHECK_THROWS_AS(lasso_cv(m, {}, 5, 1), Error);
  CHECK_THROWS_AS(lasso_cv(m, {0.1, 0.2}, 5, 1), Error);   // ascending grid
  CHECK_THROWS_AS(lasso_cv(m, {0.2, 0.1}, 1, 1), Error);   // folds < 2
  DesignMatrix few = make_matrix(6, 2, 1);
  CHECK_THROWS_AS(lasso_cv(few, {0.2, 0.1}, 5, 1), Error); // too few rows
}

TEST_CASE("prediction is identical through raw and standardized paths") {
  DesignMatrix m = make_matrix(50, 4, 71);
  fill_response(m, {1.0, -1.0, 0.5, 0.0}, 2.0, 0.3, 72);
  DesignMatrix s = standardize(m);
  LinearRankModel fit = lasso_fit(s, 0.05 * lambda_max(s));

  std::vector<double> raw_pred = predict(fit, m);
  std::vector<double> std_pred = predict(fit, s);
  REQUIRE(raw_pred.size() == std_pred.size());
  for (size_t i = 0; i < raw_pred.size(); ++i) {
    CHECK(raw_pred[i] == doctest::Approx(std_pred[i]));
  }

  DesignMatrix renamed = m;
  renamed.feature_names[0] = "other";
  CHECK_THROWS_AS(predict(fit, renamed), Error);
}

TEST_CASE("constant response yields the empty model") {
  DesignMatrix m = make_matrix(30, 3, 81);
  std::fill(m.y.begin(), m.y.end(), 7.0);
  LinearRankModel fit = lasso_cv(m, {0.0}, 3, 5);
  for (double b : fit.coef) CHECK(b == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fit.intercept == doctest::Approx(7.0));
}

TEST_CASE("stability selection finds the planted feature and is deterministic") {
  DesignMatrix m = make_matrix(80, 4, 91);
  fill_response(m, {4.0, 0.0, 0.0, 0.0}, 0.0, 0.3, 92);
  double lambda = 0.25 * lambda_max(standardize(m));

  StabilityReport r1 = stability_selection(m, lambda, 50, 0.5, 0.5, 0.6, 7);
  StabilityReport r2 = stability_selection(m, lambda, 50, 0.5, 0.5, 0.6, 7);
  CHECK(r1.frequency == r2.frequency);
  CHECK(r1.frequency[0] >= 0.9);
  for (size_t j = 1; j < 4; ++j) CHECK(r1.frequency[j] <= 0.3);
  CHECK(r1.selected() == std::vector<std::string>{"f0"});
  CHECK(r1.resamples == 50);
  CHECK(r1.lambda == lambda);

  // Frequencies are multiples of 1/resamples.
  for (double f : r1.frequency) {
    double scaled = f * 50.0;
    CHECK(scaled == doctest::Approx(std::round(scaled)));
  }

  CHECK_THROWS_AS(stability_selection(m, lambda, 0, 0.5, 0.5, 0.6, 7), Error);
  CHECK_THROWS_AS(stability_selection(m, lambda, 10, 0.5, 0.0, 0.6, 7), Error);
  CHECK_THROWS_AS(stability_selection(m, lambda, 10, 0.5, 1.5, 0.6, 7), Error);
  CHECK_THROWS_AS(stability_selection(m, lambda, 10, 0.0, 0.5, 0.6, 7), Error);
  CHECK_THROWS_AS(stability_selection(m, lambda, 10, 1.0, 0.5, 0.6, 7), Error);
  DesignMatrix tiny = make_matrix(3, 2, 1);
  fill_response(tiny, {1.0, 0.0}, 0.0, 0.1, 2);
  CHECK_THROWS_AS(stability_selection(tiny, lambda, 10, 0.5, 0.5, 0.6, 7), Error);
}

TEST_CASE("selection threshold is inclusive") {
  StabilityReport r;
  r.feature_names = {"a", "b", "c"};
  r.frequency = {0.6, 0.59, 0.61};
  r.threshold = 0.6;
  CHECK(r.selected() == std::vector<std::string>{"a", "c"});
}

TEST_CASE("model JSON round trip is exact") {
  DesignMatrix m = make_matrix(40, 3, 101);
  fill_response(m, {1.0, -0.5, 0.0}, 1.5, 0.2, 102);
  DesignMatrix s = standardize(m);
  LinearRankModel fit = lasso_fit(s, 0.2 * lambda_max(s));
  fit.seed = 1234;

  std::string text = model_to_json(fit);
  LinearRankModel back = model_from_json(text);
  CHECK(back.version == fit.version);
  CHECK(back.feature_names == fit.feature_names);
  CHECK(back.coef == fit.coef);  // exact: JSON uses shortest round-trip floats
  CHECK(back.intercept == fit.intercept);
  CHECK(back.lambda == fit.lambda);
  CHECK(back.mean == fit.mean);
  CHECK(back.sd == fit.sd);
  CHECK(back.excluded == fit.excluded);
  CHECK(back.seed == fit.seed);
  CHECK(back.convergence.sweeps == fit.convergence.sweeps);
  CHECK(back.convergence.objective == fit.convergence.objective);
  CHECK(model_to_json(back) == text);

  CHECK_THROWS_AS(model_from_json(R"({"version":"lrm1","features":["a"],"coef":[1,2],)"
                                  R"("intercept":0,"lambda":0,"mean":[0],"sd":[1],)"
                                  R"("excluded":[0],"seed":0,"convergence":)"
                                  R"({"sweeps":1,"final_max_change":0,"objective":0}})"),
                  Error);
}

TEST_CASE("excluded columns pass through fitting and prediction untouched") {
  DesignMatrix m = make_matrix(40, 3, 111);
  for (size_t i = 0; i < m.n; ++i) m.at(i, 1) = 42.0;  // constant column
  fill_response(m, {2.0, 0.0, -1.0}, 0.0, 0.2, 112);
  DesignMatrix s = standardize(m);
  REQUIRE(s.excluded[1] == 1);

  LassoOptions opts;
  opts.init_coef = {0.5, 9.9, 0.5};  // nonzero warm start on the dead column
  LinearRankModel fit = lasso_fit(s, 0.1 * lambda_max(s), opts);
  CHECK(fit.coef[1] == 0.0);
  CHECK(fit.excluded[1] == 1);

  std::vector<double> pred = predict(fit, m);  // must not divide by sd = 0
  for (double v : pred) CHECK(std::isfinite(v));
}

}  // TEST_SUITE
