#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace newsrank {

// Row-major design matrix. mean/sd/excluded are filled by standardize and
// describe the original scale; excluded marks zero-variance columns, which
// never enter a fit and always carry coefficient 0.
struct DesignMatrix {
  std::vector<std::string> feature_names;
  size_t n = 0, p = 0;
  std::vector<double> x;  // n * p
  std::vector<double> y;
  std::vector<double> mean, sd;
  std::vector<char> excluded;
  bool standardized = false;

  double at(size_t i, size_t j) const { return x[i * p + j]; }
  double& at(size_t i, size_t j) { return x[i * p + j]; }
};

// Mean 0 / population-sd 1 per retained column; throws when every column is
// constant or any entry is non-finite.
DesignMatrix standardize(const DesignMatrix& m);

struct ConvergenceRecord {
  int sweeps = 0;
  double final_max_change = 0.0;
  double objective = 0.0;
};

struct LassoOptions {
  double tol = 1e-7;
  int max_sweeps = 10000;
  // Per-feature penalty multipliers (randomized lasso); empty means all 1.
  std::vector<double> penalty_scale;
  // Warm start; empty means zeros.
  std::vector<double> init_coef;
};

struct LinearRankModel {
  std::vector<std::string> feature_names;
  std::vector<double> coef;  // standardized scale
  double intercept = 0.0;
  double lambda = 0.0;
  std::vector<double> mean, sd;
  std::vector<char> excluded;
  ConvergenceRecord convergence;
  uint64_t seed = 0;
  std::string version = "lrm1";
};

// Minimizes (1/2n)|y - Xb - c|^2 + lambda * sum(w_j |b_j|) by cyclic
// coordinate descent with soft-thresholding; iterates until the largest
// coordinate change falls below tol and the KKT residual below 10*tol.
LinearRankModel lasso_fit(const DesignMatrix& m, double lambda, const LassoOptions& opts = {});

// max_j |(1/n) x_j . (y - mean(y))| over retained columns; the smallest
// lambda with an all-zero solution.
double lambda_max(const DesignMatrix& m);

// count log-spaced values from lambda_max down to min_ratio * lambda_max.
std::vector<double> default_lambda_grid(const DesignMatrix& m, int count = 100, double min_ratio = 1e-3);

// Seeded k-fold CV over a descending grid (warm-started); picks the lambda
// with the lowest mean held-out squared error, then refits on all rows.
// Takes the raw (unstandardized) matrix; folds are standardized internally.
LinearRankModel lasso_cv(const DesignMatrix& raw, const std::vector<double>& grid, int folds, uint64_t seed);

// intercept + standardized features . coef. A raw matrix is standardized
// with the model's stored parameters first.
std::vector<double> predict(const LinearRankModel& model, const DesignMatrix& m);

struct StabilityReport {
  std::vector<std::string> feature_names;
  std::vector<double> frequency;  // multiples of 1/resamples
  int resamples = 200;
  double subsample_frac = 0.5;
  double weakness = 0.5;
  double threshold = 0.6;
  double lambda = 0.0;
  uint64_t seed = 0;

  std::vector<std::string> selected() const;
};

// Randomized lasso over seeded subsamples: each resample draws
// floor(frac*n) rows without replacement and per-column penalty factors
// from {1, 1/weakness}, re-standardizes, fits at lambda, and records the
// nonzero support.
StabilityReport stability_selection(const DesignMatrix& raw, double lambda, int resamples = 200,
                                    double subsample_frac = 0.5, double weakness = 0.5,
                                    double threshold = 0.6, uint64_t seed = 0);

std::string model_to_json(const LinearRankModel& model);
LinearRankModel model_from_json(const std::string& text);

}  // namespace newsrank
