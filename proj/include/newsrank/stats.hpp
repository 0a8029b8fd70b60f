#pragma once

#include <string>
#include <vector>

#include "newsrank/corpus.hpp"
#include "newsrank/features.hpp"
#include "newsrank/model.hpp"

namespace newsrank {

enum class TestMethod { exact, normal_approx };

struct TestResult {
  double u = 0.0;  // Mann-Whitney U for the first sample, half-credit ties
  double p = 1.0;  // two-sided
  TestMethod method = TestMethod::exact;
  size_t n1 = 0, n2 = 0;
};

// Mann-Whitney U for a over b: wins + 0.5 * ties.
double mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

// Exact: enumerate all C(n1+n2, n1) group assignments of the pooled values;
// p = P(|U - n1 n2 / 2| >= |U_obs - n1 n2 / 2|).
double rank_sum_p_exact(const std::vector<double>& a, const std::vector<double>& b);

// Normal approximation with midrank tie correction and 0.5 continuity
// correction; returns 1 when the tie-corrected variance is 0.
double rank_sum_p_normal(const std::vector<double>& a, const std::vector<double>& b);

// Exact enumeration when n1 + n2 <= 16, else the normal approximation.
TestResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b);

// (mean(a) - mean(b)) / pooled sd, n-1 weights; throws on zero pooled sd.
double cohens_d(const std::vector<double>& a, const std::vector<double>& b);

// P(draw from a > draw from b), ties counted half.
double grissom_kim(const std::vector<double>& a, const std::vector<double>& b);

struct EffectRow {
  std::string feature;
  std::string direction;  // "high>low", "high<low", "changed>original", "changed<original"
  double u = 0.0;
  double p = 1.0;
  double cohens_d = 0.0;
  // Oriented along `direction`: P(draw from the favored group > draw from
  // the other), so values are >= 0.5 up to ties.
  double gk = 0.5;
  size_t n1 = 0, n2 = 0;
};

struct EffectReport {
  std::string label;
  std::vector<EffectRow> rows;  // sorted by p, then feature name
};

// One row per selected feature comparing high-class vs low-class values.
EffectReport feature_shift_report(const TwoClassSplit& split, const FeatureTable& table,
                                  const std::vector<std::string>& selected);

std::string effect_report_to_csv(const EffectReport& report, const std::string& preamble = "");

}  // namespace newsrank
