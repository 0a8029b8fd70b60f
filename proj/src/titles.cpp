#include "newsrank/titles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "newsrank/util.hpp"

namespace newsrank {

namespace {

std::map<std::string, long long> term_frequencies(const TokenizedText& t) {
  std::map<std::string, long long> tf;
  for (const auto& tok : t.tokens) ++tf[tok];
  return tf;
}

// Type-7 quantile (linear interpolation) over sorted values.
double quantile_sorted(const std::vector<double>& v, double q) {
  double h = q * static_cast<double>(v.size() - 1);
  auto lo = static_cast<size_t>(std::floor(h));
  size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

bool has_pooled_sd(const std::vector<double>& a, const std::vector<double>& b) {
  auto varies = [](const std::vector<double>& v) {
    for (double x : v)
      if (x != v.front()) return true;
    return false;
  };
  return varies(a) || varies(b);
}

}  // namespace

double title_cosine(const std::string& t1, const std::string& t2) {
  TokenizedText a = tokenize(t1), b = tokenize(t2);
  if (a.tokens.empty() || b.tokens.empty()) throw Error("title_cosine: title has no word tokens");

  auto fa = term_frequencies(a), fb = term_frequencies(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [tok, c] : fa) {
    na += static_cast<double>(c) * static_cast<double>(c);
    auto it = fb.find(tok);
    if (it != fb.end()) dot += static_cast<double>(c) * static_cast<double>(it->second);
  }
  for (const auto& [tok, c] : fb) nb += static_cast<double>(c) * static_cast<double>(c);
  // sqrt of the product keeps perfect-square norms exact (e.g. a one-of-two
  // overlap is exactly 0.5), which matters for threshold and histogram edges.
  double sim = dot / std::sqrt(na * nb);
  // Guard tiny rounding drift out of [0, 1].
  return std::min(1.0, std::max(0.0, sim));
}

std::vector<TitlePair> make_title_pairs(const PostCollection& c) {
  std::vector<TitlePair> pairs;
  for (const auto& p : c.posts) {
    if (!p.article_title) continue;
    TokenizedText orig = tokenize(*p.article_title);
    TokenizedText changed = tokenize(p.post_title);
    if (orig.tokens.empty() || changed.tokens.empty()) continue;
    TitlePair pair;
    pair.post_id = p.id;
    pair.original = *p.article_title;
    pair.changed = p.post_title;
    pair.cosine_sim = title_cosine(p.post_title, *p.article_title);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

double changed_fraction(const PostCollection& c) {
  size_t eligible = 0, changed = 0;
  for (const auto& p : c.posts) {
    if (!p.article_title) continue;
    ++eligible;
    std::vector<std::string> a = tokenize(p.post_title).tokens;
    std::vector<std::string> b = tokenize(*p.article_title).tokens;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) ++changed;
  }
  if (eligible == 0) throw Error("changed_fraction: no posts with both titles");
  return static_cast<double>(changed) / static_cast<double>(eligible);
}

std::vector<TitlePair> divergent_pairs(const PostCollection& c, double max_sim) {
  std::vector<TitlePair> out;
  for (auto& pair : make_title_pairs(c)) {
    if (pair.cosine_sim < max_sim) out.push_back(std::move(pair));
  }
  return out;
}

EffectReport title_change_report(const std::vector<TitlePair>& pairs, const FeatureConfig& cfg) {
  if (pairs.empty()) throw Error("title_change_report: no title pairs");

  std::vector<std::vector<double>> changed_vals(feature_schema().size()),
      original_vals(feature_schema().size());
  for (const auto& pair : pairs) {
    FeatureVector fc = extract_features(pair.changed, cfg, TextUnit::post_title);
    FeatureVector fo = extract_features(pair.original, cfg, TextUnit::article_title);
    for (size_t k = 0; k < feature_schema().size(); ++k) {
      const std::string& name = feature_schema()[k];
      changed_vals[k].push_back(fc.values.at(name));
      original_vals[k].push_back(fo.values.at(name));
    }
  }

  EffectReport report;
  report.label = "changed vs original titles";
  for (size_t k = 0; k < feature_schema().size(); ++k) {
    const auto& a = changed_vals[k];
    const auto& b = original_vals[k];
    TestResult t = rank_sum_test(a, b);
    if (!(t.p < 0.05)) continue;

    double gk_changed = grissom_kim(a, b);
    auto med = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      size_t n = v.size();
      return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    double diff = med(a) - med(b);
    bool changed_side = diff > 0.0 || (diff == 0.0 && gk_changed >= 0.5);

    EffectRow row;
    row.feature = feature_schema()[k];
    row.direction = changed_side ? "changed>original" : "changed<original";
    row.u = t.u;
    row.p = t.p;
    // A feature can shift significantly while being constant inside each
    // group (zero pooled sd); the standardized effect is undefined there, so
    // report 0 and let u/p/gk carry the result.
    row.cohens_d = has_pooled_sd(a, b) ? cohens_d(a, b) : 0.0;
    row.gk = changed_side ? gk_changed : grissom_kim(b, a);
    row.n1 = a.size();
    row.n2 = b.size();
    report.rows.push_back(row);
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const EffectRow& x, const EffectRow& y) {
    if (x.p != y.p) return x.p < y.p;
    return x.feature < y.feature;
  });
  return report;
}

BoxSummary box_summary(std::vector<double> values) {
  if (values.empty()) throw Error("box_summary: empty sample");
  std::sort(values.begin(), values.end());
  BoxSummary s;
  s.n = values.size();
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  double iqr = s.q3 - s.q1;
  double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_lo = s.max;
  s.whisker_hi = s.min;
  for (double v : values) {
    if (v >= lo_fence) {
      s.whisker_lo = v;  // first value at or above the fence (sorted)
      break;
    }
  }
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    if (*it <= hi_fence) {
      s.whisker_hi = *it;
      break;
    }
  }
  return s;
}

SimilarityPopularityReport similarity_popularity_report(const PostCollection& c, Target target,
                                                        double high_pct, double low_pct) {
  TwoClassSplit split = two_class_split(c, target, high_pct, low_pct);

  auto sims_of = [](const PostCollection& posts) {
    std::vector<double> sims;
    for (const auto& pair : make_title_pairs(posts)) sims.push_back(pair.cosine_sim);
    return sims;
  };
  std::vector<double> high = sims_of(split.high);
  std::vector<double> low = sims_of(split.low);
  if (high.empty() || low.empty()) {
    throw Error("similarity_popularity_report: a class has no title pairs");
  }

  TestResult t = rank_sum_test(high, low);
  double gk_high = grissom_kim(high, low);
  auto med = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  double diff = med(high) - med(low);
  bool high_side = diff > 0.0 || (diff == 0.0 && gk_high >= 0.5);

  SimilarityPopularityReport report;
  report.target = target_name(target);
  report.n_high = high.size();
  report.n_low = low.size();
  report.stats.feature = "title_cosine";
  report.stats.direction = high_side ? "high>low" : "high<low";
  report.stats.u = t.u;
  report.stats.p = t.p;
  report.stats.cohens_d = has_pooled_sd(high, low) ? cohens_d(high, low) : 0.0;
  report.stats.gk = high_side ? gk_high : grissom_kim(low, high);
  report.stats.n1 = high.size();
  report.stats.n2 = low.size();
  report.high_box = box_summary(high);
  report.low_box = box_summary(low);

  report.high_hist.assign(kSimilarityHistogramBins, 0);
  report.low_hist.assign(kSimilarityHistogramBins, 0);
  auto fill = [](std::vector<long long>& hist, const std::vector<double>& sims) {
    for (double s : sims) {
      auto bin = static_cast<long long>(s * kSimilarityHistogramBins);
      if (bin >= kSimilarityHistogramBins) bin = kSimilarityHistogramBins - 1;
      if (bin < 0) bin = 0;
      ++hist[static_cast<size_t>(bin)];
    }
  };
  fill(report.high_hist, high);
  fill(report.low_hist, low);
  return report;
}

std::string title_pairs_to_csv(const std::vector<TitlePair>& pairs, const std::string& preamble) {
  std::string out = preamble;
  out += "post_id,cosine_sim,original,changed\n";
  for (const auto& p : pairs) {
    out += csv_escape(p.post_id) + "," + format_double(p.cosine_sim) + "," + csv_escape(p.original) + "," +
           csv_escape(p.changed) + "\n";
  }
  return out;
}

}  // namespace newsrank
