#pragma once

#include <string>
#include <vector>

#include "newsrank/corpus.hpp"
#include "newsrank/features.hpp"
#include "newsrank/stats.hpp"

namespace newsrank {

struct TitlePair {
  std::string post_id;
  std::string original;  // article title
  std::string changed;   // post title
  double cosine_sim = 0.0;
};

// Cosine of term-frequency vectors over word tokens; no weighting, no
// stemming, stopwords retained. Throws when either title has no tokens.
double title_cosine(const std::string& t1, const std::string& t2);

// Posts carrying an article title whose post and article titles both
// tokenize to at least one word, in input order.
std::vector<TitlePair> make_title_pairs(const PostCollection& c);

// Fraction of posts (with both titles) whose token multisets differ.
// Punctuation- or case-only edits do not count as changes.
double changed_fraction(const PostCollection& c);

// Pairs with cosine_sim strictly below max_sim, input order preserved.
std::vector<TitlePair> divergent_pairs(const PostCollection& c, double max_sim = 0.1);

// Features of changed vs original titles; keeps rows with p < 0.05.
EffectReport title_change_report(const std::vector<TitlePair>& pairs, const FeatureConfig& cfg);

struct BoxSummary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double whisker_lo = 0, whisker_hi = 0;  // data extremes within 1.5 IQR
  size_t n = 0;
};

BoxSummary box_summary(std::vector<double> values);

inline constexpr int kSimilarityHistogramBins = 20;

struct SimilarityPopularityReport {
  EffectRow stats;  // feature "title_cosine", direction high/low
  BoxSummary high_box, low_box;
  std::vector<long long> high_hist, low_hist;  // kSimilarityHistogramBins over [0,1]
  std::string target;
  size_t n_high = 0, n_low = 0;
};

// Title-similarity distributions of the high vs low class of a two-class
// split on the popularity target.
SimilarityPopularityReport similarity_popularity_report(const PostCollection& c, Target target,
                                                        double high_pct = 90.0, double low_pct = 50.0);

std::string title_pairs_to_csv(const std::vector<TitlePair>& pairs, const std::string& preamble = "");

}  // namespace newsrank
