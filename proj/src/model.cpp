#include "newsrank/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "newsrank/util.hpp"

namespace newsrank {

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

double column_dot_residual(const DesignMatrix& m, size_t j, const std::vector<double>& r) {
  double s = 0.0;
  for (size_t i = 0; i < m.n; ++i) s += m.at(i, j) * r[i];
  return s / static_cast<double>(m.n);
}

double objective(const DesignMatrix& m, const std::vector<double>& r, const std::vector<double>& beta,
                 double lambda, const std::vector<double>& w) {
  double sq = 0.0;
  for (double v : r) sq += v * v;
  double l1 = 0.0;
  for (size_t j = 0; j < beta.size(); ++j) l1 += w[j] * std::fabs(beta[j]);
  return sq / (2.0 * static_cast<double>(m.n)) + lambda * l1;
}

}  // namespace

DesignMatrix standardize(const DesignMatrix& m) {
  if (m.n < 2) throw Error("standardize: need at least 2 rows");
  if (m.x.size() != m.n * m.p || m.y.size() != m.n) throw Error("standardize: inconsistent shape");
  for (double v : m.x) {
    if (!std::isfinite(v)) throw Error("standardize: non-finite entry in design matrix");
  }
  for (double v : m.y) {
    if (!std::isfinite(v)) throw Error("standardize: non-finite target value");
  }

  DesignMatrix out = m;
  out.mean.assign(m.p, 0.0);
  out.sd.assign(m.p, 0.0);
  out.excluded.assign(m.p, 0);

  double dn = static_cast<double>(m.n);
  size_t retained = 0;
  for (size_t j = 0; j < m.p; ++j) {
    double mu = 0.0;
    for (size_t i = 0; i < m.n; ++i) mu += m.at(i, j);
    mu /= dn;
    double var = 0.0;
    for (size_t i = 0; i < m.n; ++i) {
      double d = m.at(i, j) - mu;
      var += d * d;
    }
    double sd = std::sqrt(var / dn);  // population sd
    out.mean[j] = mu;
    out.sd[j] = sd;
    if (sd <= 1e-12 * (1.0 + std::fabs(mu))) {
      out.excluded[j] = 1;
      for (size_t i = 0; i < m.n; ++i) out.at(i, j) = 0.0;
      continue;
    }
    ++retained;
    for (size_t i = 0; i < m.n; ++i) out.at(i, j) = (m.at(i, j) - mu) / sd;
  }
  if (retained == 0) throw Error("standardize: all columns constant");
  out.standardized = true;
  return out;
}

LinearRankModel lasso_fit(const DesignMatrix& m, double lambda, const LassoOptions& opts) {
  if (!m.standardized) throw Error("lasso_fit: matrix must be standardized");
  if (lambda < 0) throw Error("lasso_fit: lambda must be >= 0");

  std::vector<double> w = opts.penalty_scale;
  if (w.empty()) w.assign(m.p, 1.0);
  if (w.size() != m.p) throw Error("lasso_fit: penalty_scale size mismatch");

  std::vector<double> beta = opts.init_coef;
  if (beta.empty()) beta.assign(m.p, 0.0);
  if (beta.size() != m.p) throw Error("lasso_fit: init_coef size mismatch");
  for (size_t j = 0; j < m.p; ++j) {
    if (m.excluded[j]) beta[j] = 0.0;
  }

  double dn = static_cast<double>(m.n);
  double intercept = std::accumulate(m.y.begin(), m.y.end(), 0.0) / dn;

  // (1/n) sum x_ij^2; exactly 1 for standardized columns up to rounding.
  std::vector<double> z(m.p, 0.0);
  for (size_t j = 0; j < m.p; ++j) {
    if (m.excluded[j]) continue;
    double s = 0.0;
    for (size_t i = 0; i < m.n; ++i) s += m.at(i, j) * m.at(i, j);
    z[j] = s / dn;
  }

  // Full residual r = y - intercept - X beta. Incremental updates drift by
  // accumulated rounding, so the residual is also recomputed periodically;
  // without that, coordinate changes on large-|y| problems floor out just
  // above tol and never converge.
  std::vector<double> r(m.n);
  auto refresh_residual = [&] {
    for (size_t i = 0; i < m.n; ++i) {
      double fit = intercept;
      for (size_t j = 0; j < m.p; ++j) {
        if (beta[j] != 0.0) fit += m.at(i, j) * beta[j];
      }
      r[i] = m.y[i] - fit;
    }
  };
  refresh_residual();

  double kkt_tol = 10.0 * opts.tol;
  double prev_obj = objective(m, r, beta, lambda, w);
  int sweeps = 0;
  double max_change = 0.0;

  while (true) {
    if (sweeps >= opts.max_sweeps) {
      throw Error("lasso_fit: no convergence after " + std::to_string(sweeps) +
                  " sweeps (last max change " + format_double(max_change) + ")");
    }
    ++sweeps;
    max_change = 0.0;
    for (size_t j = 0; j < m.p; ++j) {
      if (m.excluded[j]) continue;
      double old = beta[j];
      double rho = column_dot_residual(m, j, r) + z[j] * old;
      double updated = soft_threshold(rho, lambda * w[j]) / z[j];
      if (updated != old) {
        double delta = updated - old;
        for (size_t i = 0; i < m.n; ++i) r[i] -= m.at(i, j) * delta;
        beta[j] = updated;
        max_change = std::max(max_change, std::fabs(delta));
      }
    }

    double obj = objective(m, r, beta, lambda, w);
    if (obj > prev_obj + 1e-9 * (1.0 + std::fabs(prev_obj))) {
      throw Error("lasso_fit: objective increased within a sweep");
    }
    prev_obj = obj;

    if (max_change >= opts.tol) {
      if (sweeps % 50 == 0) refresh_residual();
      continue;
    }
    refresh_residual();

    // Converged by coordinate change; accept only if KKT residual is small.
    bool kkt_ok = true;
    for (size_t j = 0; j < m.p && kkt_ok; ++j) {
      if (m.excluded[j]) continue;
      double g = column_dot_residual(m, j, r);
      if (beta[j] == 0.0) {
        kkt_ok = std::fabs(g) <= lambda * w[j] + kkt_tol;
      } else {
        kkt_ok = std::fabs(g - lambda * w[j] * (beta[j] > 0 ? 1.0 : -1.0)) <= kkt_tol;
      }
    }
    if (kkt_ok) break;
  }

  LinearRankModel model;
  model.feature_names = m.feature_names;
  model.coef = std::move(beta);
  model.intercept = intercept;
  model.lambda = lambda;
  model.mean = m.mean;
  model.sd = m.sd;
  model.excluded = m.excluded;
  model.convergence = {sweeps, max_change, prev_obj};
  return model;
}

double lambda_max(const DesignMatrix& m) {
  if (!m.standardized) throw Error("lambda_max: matrix must be standardized");
  double dn = static_cast<double>(m.n);
  double ybar = std::accumulate(m.y.begin(), m.y.end(), 0.0) / dn;
  double best = 0.0;
  for (size_t j = 0; j < m.p; ++j) {
    if (m.excluded[j]) continue;
    double s = 0.0;
    for (size_t i = 0; i < m.n; ++i) s += m.at(i, j) * (m.y[i] - ybar);
    best = std::max(best, std::fabs(s / dn));
  }
  return best;
}

std::vector<double> default_lambda_grid(const DesignMatrix& m, int count, double min_ratio) {
  if (count < 1) throw Error("default_lambda_grid: count must be >= 1");
  double lmax = lambda_max(m);
  if (lmax <= 0) return {0.0};
  std::vector<double> grid;
  grid.reserve(count);
  if (count == 1) return {lmax};
  double lmin = lmax * min_ratio;
  for (int k = 0; k < count; ++k) {
    double t = static_cast<double>(k) / static_cast<double>(count - 1);
    grid.push_back(lmax * std::pow(lmin / lmax, t));
  }
  return grid;
}

namespace {

// Convergence tolerance proportional to the response scale. lasso_fit's tol
// is absolute, which stalls on raw engagement counts (|y| in the hundreds):
// coordinate changes hit the soft-threshold noise floor just above 1e-7.
double response_tol(const std::vector<double>& y) {
  double dn = static_cast<double>(y.size());
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / dn;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  double sd = std::sqrt(var / dn);
  return 1e-7 * std::max(1.0, sd);
}

}  // namespace

LinearRankModel lasso_cv(const DesignMatrix& raw, const std::vector<double>& grid, int folds, uint64_t seed) {
  if (grid.empty()) throw Error("lasso_cv: empty lambda grid");
  for (size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] < grid[k - 1])) throw Error("lasso_cv: grid must be strictly descending");
  }
  if (folds < 2) throw Error("lasso_cv: folds must be >= 2");
  if (raw.n < static_cast<size_t>(2 * folds)) throw Error("lasso_cv: not enough rows for folds");

  std::vector<size_t> idx(raw.n);
  for (size_t i = 0; i < raw.n; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);
  std::vector<int> fold_of(raw.n);
  for (size_t pos = 0; pos < raw.n; ++pos) fold_of[idx[pos]] = static_cast<int>(pos % folds);

  std::vector<double> mse(grid.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    DesignMatrix train;
    train.feature_names = raw.feature_names;
    train.p = raw.p;
    std::vector<size_t> held;
    for (size_t i = 0; i < raw.n; ++i) {
      if (fold_of[i] == f) {
        held.push_back(i);
        continue;
      }
      for (size_t j = 0; j < raw.p; ++j) train.x.push_back(raw.at(i, j));
      train.y.push_back(raw.y[i]);
      ++train.n;
    }
    DesignMatrix std_train = standardize(train);

    LassoOptions opts;
    opts.tol = response_tol(raw.y);
    for (size_t gi = 0; gi < grid.size(); ++gi) {
      LinearRankModel fit = lasso_fit(std_train, grid[gi], opts);
      opts.init_coef = fit.coef;  // warm start down the path

      double err = 0.0;
      for (size_t i : held) {
        double pred = fit.intercept;
        for (size_t j = 0; j < raw.p; ++j) {
          if (fit.excluded[j] || fit.coef[j] == 0.0) continue;
          pred += fit.coef[j] * (raw.at(i, j) - fit.mean[j]) / fit.sd[j];
        }
        double d = raw.y[i] - pred;
        err += d * d;
      }
      mse[gi] += err / static_cast<double>(held.size());
    }
  }

  size_t best = 0;
  for (size_t k = 1; k < grid.size(); ++k) {
    if (mse[k] < mse[best]) best = k;  // ties keep the larger lambda
  }

  DesignMatrix full = standardize(raw);
  LassoOptions opts;
  opts.tol = response_tol(raw.y);
  LinearRankModel model;
  for (size_t k = 0; k <= best; ++k) {
    model = lasso_fit(full, grid[k], opts);
    opts.init_coef = model.coef;
  }
  model.seed = seed;
  return model;
}

std::vector<double> predict(const LinearRankModel& model, const DesignMatrix& m) {
  if (m.feature_names != model.feature_names) throw Error("predict: schema mismatch");
  if (m.p != model.coef.size()) throw Error("predict: width mismatch");

  std::vector<double> out(m.n, model.intercept);
  for (size_t j = 0; j < m.p; ++j) {
    if (model.excluded[j] || model.coef[j] == 0.0) continue;
    double b = model.coef[j];
    if (m.standardized) {
      for (size_t i = 0; i < m.n; ++i) out[i] += b * m.at(i, j);
    } else {
      double mu = model.mean[j], sd = model.sd[j];
      for (size_t i = 0; i < m.n; ++i) out[i] += b * (m.at(i, j) - mu) / sd;
    }
  }
  return out;
}

std::vector<std::string> StabilityReport::selected() const {
  std::vector<std::string> out;
  for (size_t j = 0; j < feature_names.size(); ++j) {
    if (frequency[j] >= threshold) out.push_back(feature_names[j]);
  }
  return out;
}

StabilityReport stability_selection(const DesignMatrix& raw, double lambda, int resamples,
                                    double subsample_frac, double weakness, double threshold,
                                    uint64_t seed) {
  if (resamples < 1) throw Error("stability_selection: resamples must be >= 1");
  if (!(weakness > 0.0 && weakness <= 1.0)) throw Error("stability_selection: weakness must be in (0,1]");
  if (!(subsample_frac > 0.0 && subsample_frac < 1.0)) {
    throw Error("stability_selection: subsample_frac must be in (0,1)");
  }
  auto m_rows = static_cast<size_t>(std::floor(subsample_frac * static_cast<double>(raw.n)));
  if (m_rows < 2) throw Error("stability_selection: subsample smaller than 2 rows");

  std::vector<long long> hits(raw.p, 0);
  double tol = response_tol(raw.y);
  Rng master(seed);
  for (int r = 0; r < resamples; ++r) {
    Rng rng = master.child(static_cast<uint64_t>(r));
    std::vector<size_t> rows = rng.sample_without_replacement(raw.n, m_rows);

    LassoOptions opts;
    opts.tol = tol;
    opts.penalty_scale.resize(raw.p);
    for (size_t j = 0; j < raw.p; ++j) {
      opts.penalty_scale[j] = rng.unit() < 0.5 ? 1.0 : 1.0 / weakness;
    }

    DesignMatrix sub;
    sub.feature_names = raw.feature_names;
    sub.p = raw.p;
    sub.n = m_rows;
    sub.x.reserve(m_rows * raw.p);
    for (size_t i : rows) {
      for (size_t j = 0; j < raw.p; ++j) sub.x.push_back(raw.at(i, j));
      sub.y.push_back(raw.y[i]);
    }
    LinearRankModel fit = lasso_fit(standardize(sub), lambda, opts);
    for (size_t j = 0; j < raw.p; ++j) {
      if (fit.coef[j] != 0.0) ++hits[j];
    }
  }

  StabilityReport report;
  report.feature_names = raw.feature_names;
  report.frequency.resize(raw.p);
  for (size_t j = 0; j < raw.p; ++j) {
    report.frequency[j] = static_cast<double>(hits[j]) / static_cast<double>(resamples);
  }
  report.resamples = resamples;
  report.subsample_frac = subsample_frac;
  report.weakness = weakness;
  report.threshold = threshold;
  report.lambda = lambda;
  report.seed = seed;
  return report;
}

std::string model_to_json(const LinearRankModel& model) {
  nlohmann::json j = {
      {"version", model.version},
      {"features", model.feature_names},
      {"coef", model.coef},
      {"intercept", model.intercept},
      {"lambda", model.lambda},
      {"mean", model.mean},
      {"sd", model.sd},
      {"excluded", model.excluded},
      {"seed", model.seed},
      {"convergence",
       {{"sweeps", model.convergence.sweeps},
        {"final_max_change", model.convergence.final_max_change},
        {"objective", model.convergence.objective}}},
  };
  return j.dump(2) + "\n";
}

LinearRankModel model_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  LinearRankModel m;
  m.version = j.at("version").get<std::string>();
  m.feature_names = j.at("features").get<std::vector<std::string>>();
  m.coef = j.at("coef").get<std::vector<double>>();
  m.intercept = j.at("intercept").get<double>();
  m.lambda = j.at("lambda").get<double>();
  m.mean = j.at("mean").get<std::vector<double>>();
  m.sd = j.at("sd").get<std::vector<double>>();
  for (const auto& e : j.at("excluded")) m.excluded.push_back(e.get<int>() ? 1 : 0);
  m.seed = j.at("seed").get<uint64_t>();
  m.convergence.sweeps = j.at("convergence").at("sweeps").get<int>();
  m.convergence.final_max_change = j.at("convergence").at("final_max_change").get<double>();
  m.convergence.objective = j.at("convergence").at("objective").get<double>();
  if (m.coef.size() != m.feature_names.size() || m.mean.size() != m.coef.size() ||
      m.sd.size() != m.coef.size() || m.excluded.size() != m.coef.size()) {
    throw Error("model_from_json: inconsistent field lengths");
  }
  return m;
}

}  // namespace newsrank
