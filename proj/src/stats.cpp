#include "newsrank/stats.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "newsrank/util.hpp"

namespace newsrank {

namespace {

void check_samples(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error("rank statistics: both samples must be nonempty");
  for (double v : a) {
    if (!std::isfinite(v)) throw Error("rank statistics: non-finite value");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw Error("rank statistics: non-finite value");
  }
}

// wins and ties of a over sorted b.
std::pair<long long, long long> win_tie_counts(const std::vector<double>& a, std::vector<double> b_sorted) {
  std::sort(b_sorted.begin(), b_sorted.end());
  long long wins = 0, ties = 0;
  for (double x : a) {
    auto lo = std::lower_bound(b_sorted.begin(), b_sorted.end(), x);
    auto hi = std::upper_bound(b_sorted.begin(), b_sorted.end(), x);
    wins += lo - b_sorted.begin();
    ties += hi - lo;
  }
  return {wins, ties};
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  check_samples(a, b);
  auto [wins, ties] = win_tie_counts(a, b);
  return static_cast<double>(wins) + 0.5 * static_cast<double>(ties);
}

double rank_sum_p_exact(const std::vector<double>& a, const std::vector<double>& b) {
  check_samples(a, b);
  size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
  if (n > 20) throw Error("rank_sum_p_exact: enumeration limited to 20 observations");

  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());

  // Pairwise half-credit win scores, doubled to stay integral.
  std::vector<int> win2(n * n, 0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (pooled[i] > pooled[j]) win2[i * n + j] = 2;
      else if (pooled[i] == pooled[j]) win2[i * n + j] = 1;
    }
  }

  long long u2_obs = 0;  // 2 * U_obs for group a = first n1 pooled entries
  for (size_t i = 0; i < n1; ++i) {
    for (size_t j = n1; j < n; ++j) u2_obs += win2[i * n + j];
  }
  long long mu2 = static_cast<long long>(n1) * static_cast<long long>(n2);  // 2 * n1 n2 / 2
  long long dev_obs = std::llabs(u2_obs - mu2);

  // Enumerate all group assignments: mask has n1 zeros then n2 ones; its
  // distinct permutations are exactly the C(n, n1) subsets.
  std::vector<char> mask(n, 1);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(n1), 0);
  std::sort(mask.begin(), mask.end());
  long long total = 0, extreme = 0;
  do {
    long long u2 = 0;
    for (size_t i = 0; i < n; ++i) {
      if (mask[i]) continue;
      for (size_t j = 0; j < n; ++j) {
        if (mask[j]) u2 += win2[i * n + j];
      }
    }
    ++total;
    if (std::llabs(u2 - mu2) >= dev_obs) ++extreme;
  } while (std::next_permutation(mask.begin(), mask.end()));

  return static_cast<double>(extreme) / static_cast<double>(total);
}

double rank_sum_p_normal(const std::vector<double>& a, const std::vector<double>& b) {
  check_samples(a, b);
  double n1 = static_cast<double>(a.size());
  double n2 = static_cast<double>(b.size());
  double n = n1 + n2;

  double u = mann_whitney_u(a, b);
  double mu = n1 * n2 / 2.0;

  // Tie correction over pooled value groups.
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  double tie_term = 0.0;
  for (size_t i = 0; i < pooled.size();) {
    size_t j = i;
    while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
    double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  double z = (std::fabs(u - mu) - 0.5) / std::sqrt(var);
  if (z < 0.0) z = 0.0;
  return std::erfc(z / std::sqrt(2.0));
}

TestResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b) {
  check_samples(a, b);
  TestResult res;
  res.n1 = a.size();
  res.n2 = b.size();
  res.u = mann_whitney_u(a, b);
  if (res.n1 + res.n2 <= 16) {
    res.method = TestMethod::exact;
    res.p = rank_sum_p_exact(a, b);
  } else {
    res.method = TestMethod::normal_approx;
    res.p = rank_sum_p_normal(a, b);
  }
  return res;
}

double cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw Error("cohens_d: both samples need at least 2 values");
  auto mean_var = [](const std::vector<double>& v) {
    double mu = 0.0;
    for (double x : v) mu += x;
    mu /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::pair<double, double>(mu, ss / static_cast<double>(v.size() - 1));
  };
  auto [ma, va] = mean_var(a);
  auto [mb, vb] = mean_var(b);
  double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  double pooled = ((n1 - 1.0) * va + (n2 - 1.0) * vb) / (n1 + n2 - 2.0);
  if (pooled <= 0.0) throw Error("cohens_d: zero pooled sd");
  return (ma - mb) / std::sqrt(pooled);
}

double grissom_kim(const std::vector<double>& a, const std::vector<double>& b) {
  check_samples(a, b);
  auto [wins, ties] = win_tie_counts(a, b);
  double n = static_cast<double>(a.size()) * static_cast<double>(b.size());
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) / n;
}

EffectReport feature_shift_report(const TwoClassSplit& split, const FeatureTable& table,
                                  const std::vector<std::string>& selected) {
  std::unordered_map<std::string, size_t> row_of;
  for (size_t i = 0; i < table.post_ids.size(); ++i) row_of[table.post_ids[i]] = i;

  auto gather = [&](const PostCollection& c, size_t col) {
    std::vector<double> out;
    out.reserve(c.posts.size());
    for (const auto& p : c.posts) {
      auto it = row_of.find(p.id);
      if (it == row_of.end()) throw Error("post missing from feature table: " + p.id);
      out.push_back(table.rows[it->second][col]);
    }
    return out;
  };

  EffectReport report;
  report.label = std::string("high vs low by ") + target_name(split.target);
  for (const auto& feature : selected) {
    size_t col = table.col(feature);
    std::vector<double> high = gather(split.high, col);
    std::vector<double> low = gather(split.low, col);

    TestResult t = rank_sum_test(high, low);
    double gk_high = grissom_kim(high, low);
    double diff = median_of(high) - median_of(low);
    bool high_side = diff > 0.0 || (diff == 0.0 && gk_high >= 0.5);

    EffectRow row;
    row.feature = feature;
    row.direction = high_side ? "high>low" : "high<low";
    row.u = t.u;
    row.p = t.p;
    row.cohens_d = cohens_d(high, low);
    row.gk = high_side ? gk_high : grissom_kim(low, high);
    row.n1 = high.size();
    row.n2 = low.size();
    report.rows.push_back(row);
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const EffectRow& x, const EffectRow& y) {
    if (x.p != y.p) return x.p < y.p;
    return x.feature < y.feature;
  });
  return report;
}

std::string effect_report_to_csv(const EffectReport& report, const std::string& preamble) {
  std::string out = preamble;
  out += "feature,direction,u,p_value,cohens_d,grissom_kim,n1,n2\n";
  for (const auto& r : report.rows) {
    out += csv_escape(r.feature) + "," + r.direction + "," + format_double(r.u) + "," + format_double(r.p) +
           "," + format_double(r.cohens_d) + "," + format_double(r.gk) + "," + std::to_string(r.n1) + "," +
           std::to_string(r.n2) + "\n";
  }
  return out;
}

}  // namespace newsrank
