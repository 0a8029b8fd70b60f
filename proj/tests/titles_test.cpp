#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "newsrank/titles.hpp"
#include "newsrank/util.hpp"

using namespace newsrank;

namespace {

Post make_post(const std::string& id, long long score, const std::string& post_title,
               const std::string& article_title) {
  Post p;
  p.id = id;
  p.post_title = post_title;
  if (!article_title.empty()) p.article_title = article_title;
  p.score = score;
  p.num_comments = score;
  p.subreddit = "s";
  p.year = 2012;
  return p;
}

const EffectRow* find_row(const EffectReport& rep, const std::string& feature) {
  for (const auto& r : rep.rows) {
    if (r.feature == feature) return &r;
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("titles") {

TEST_CASE("cosine similarity of term-frequency vectors") {
  CHECK(title_cosine("dogs bark", "dogs bark") == doctest::Approx(1.0));
  CHECK(title_cosine("alpha beta", "gamma delta") == doctest::Approx(0.0));
  CHECK(title_cosine("a b", "a c") == doctest::Approx(0.5));
  CHECK(title_cosine("dog dog cat", "dog") == doctest::Approx(2.0 / std::sqrt(5.0)));
  // Case and punctuation are ignored by tokenization.
  CHECK(title_cosine("Dogs Bark!", "dogs... bark") == doctest::Approx(1.0));
  CHECK_THROWS_AS(title_cosine("???", "dogs bark"), Error);
  CHECK_THROWS_AS(title_cosine("dogs bark", ""), Error);
}

TEST_CASE("title pairs require an article title and word tokens on both sides") {
  PostCollection c;
  c.posts.push_back(make_post("a", 1, "same words", "same words"));
  c.posts.push_back(make_post("b", 2, "new take", "original headline here"));
  c.posts.push_back(make_post("c", 3, "no article title", ""));
  c.posts.push_back(make_post("d", 4, "???", "real title"));   // post title has no tokens
  c.posts.push_back(make_post("e", 5, "real title", "!!!"));   // article title has no tokens

  std::vector<TitlePair> pairs = make_title_pairs(c);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].post_id == "a");
  CHECK(pairs[0].original == "same words");
  CHECK(pairs[0].changed == "same words");
  CHECK(pairs[0].cosine_sim == doctest::Approx(1.0));
  CHECK(pairs[1].post_id == "b");
  CHECK(pairs[1].cosine_sim == doctest::Approx(0.0));
}

TEST_CASE("changed_fraction ignores order, case, and punctuation") {
  PostCollection c;
  c.posts.push_back(make_post("a", 1, "loud dogs bark", "Dogs bark loud!"));  // reorder only
  c.posts.push_back(make_post("b", 2, "fresh spin on events", "boring headline"));
  c.posts.push_back(make_post("c", 3, "no pair", ""));  // not eligible
  c.posts.push_back(make_post("d", 4, "dogs bark", "dogs bark twice"));
  CHECK(changed_fraction(c) == doctest::Approx(2.0 / 3.0));

  PostCollection none;
  none.posts.push_back(make_post("x", 1, "title", ""));
  CHECK_THROWS_AS(changed_fraction(none), Error);
}

TEST_CASE("divergent pairs use a strict similarity bound") {
  PostCollection c;
  c.posts.push_back(make_post("half", 1, "a b", "a c"));          // sim 0.5
  c.posts.push_back(make_post("zero", 2, "alpha beta", "gamma delta"));  // sim 0
  CHECK(divergent_pairs(c, 0.5).size() == 1);    // 0.5 itself is excluded
  CHECK(divergent_pairs(c, 0.5)[0].post_id == "zero");
  CHECK(divergent_pairs(c, 0.51).size() == 2);
  CHECK(divergent_pairs(c, 0.1).size() == 1);    // the default-style cut
}

TEST_CASE("title change report keeps only significant feature shifts") {
  // 12 pairs; every changed title has 6 words (one stopword), every original
  // 2 words (none). Structural features separate fully; lexicon and NB
  // features tie and must be filtered out by the p < 0.05 rule.
  Lexicon categories;  // empty: all category rates 0
  Lexicon polarity;    // no valences: neutral everywhere
  FrequencyTable freqs;  // empty: everything at the floor
  NBModel nb = train_nb({{"love love great", SubjLabel::subjective},
                         {"report states facts", SubjLabel::objective}},
                        1.0);
  FeatureConfig cfg{&categories, &polarity, &freqs, &nb};

  std::vector<TitlePair> pairs;
  for (int i = 0; i < 12; ++i) {
    TitlePair p;
    p.post_id = "p" + std::to_string(i);
    p.changed = "the quick brown fox jumps high";
    p.original = "short title";
    p.cosine_sim = 0.0;
    pairs.push_back(p);
  }

  EffectReport rep = title_change_report(pairs, cfg);
  CHECK(rep.label == "changed vs original titles");
  CHECK(rep.rows.size() >= 5);
  for (const auto& row : rep.rows) {
    CHECK(row.p < 0.05);
    CHECK(row.n1 == 12);
    CHECK(row.n2 == 12);
  }
  for (size_t i = 1; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i - 1].p <= rep.rows[i].p);
  }

  const EffectRow* wc = find_row(rep, "WC");
  REQUIRE(wc != nullptr);
  CHECK(wc->direction == "changed>original");
  CHECK(wc->u == doctest::Approx(144.0));
  CHECK(wc->gk == doctest::Approx(1.0));

  const EffectRow* wlen = find_row(rep, "avg_wlen");
  REQUIRE(wlen != nullptr);
  CHECK(wlen->direction == "changed<original");  // 25/6 vs 5
  CHECK(wlen->gk == doctest::Approx(1.0));       // oriented along the direction

  const EffectRow* stop = find_row(rep, "per_stop");
  REQUIRE(stop != nullptr);
  CHECK(stop->direction == "changed>original");

  // Tied features cannot appear: SMOG is 3.1291 on both sides, lexicon and
  // NB features are constant.
  CHECK(find_row(rep, "SMOG") == nullptr);
  CHECK(find_row(rep, "posemo") == nullptr);
  CHECK(find_row(rep, "NB_psubj") == nullptr);

  CHECK_THROWS_AS(title_change_report({}, cfg), Error);
}

TEST_CASE("box summary: quartiles, whiskers, outliers") {
  BoxSummary odd = box_summary({100, 1, 3, 2, 4});  // sorted: 1 2 3 4 100
  CHECK(odd.n == 5);
  CHECK(odd.min == 1);
  CHECK(odd.max == 100);
  CHECK(odd.q1 == doctest::Approx(2.0));
  CHECK(odd.median == doctest::Approx(3.0));
  CHECK(odd.q3 == doctest::Approx(4.0));
  CHECK(odd.whisker_lo == doctest::Approx(1.0));
  CHECK(odd.whisker_hi == doctest::Approx(4.0));  // 100 is outside q3 + 1.5 IQR

  BoxSummary even = box_summary({1, 2, 3, 4});
  CHECK(even.q1 == doctest::Approx(1.75));
  CHECK(even.median == doctest::Approx(2.5));
  CHECK(even.q3 == doctest::Approx(3.25));
  CHECK(even.whisker_lo == doctest::Approx(1.0));
  CHECK(even.whisker_hi == doctest::Approx(4.0));

  BoxSummary one = box_summary({7});
  CHECK(one.median == 7);
  CHECK(one.q1 == 7);
  CHECK(one.q3 == 7);
  CHECK(one.whisker_lo == 7);
  CHECK(one.whisker_hi == 7);

  CHECK_THROWS_AS(box_summary({}), Error);
}

TEST_CASE("similarity-popularity report on an engineered split") {
  // Scores 1..20: the 90th percentile cutoff is 18 (high = scores 19,20),
  // the 50th is 10 (low = scores 1..9).
  PostCollection c;
  for (int s = 1; s <= 20; ++s) {
    std::string id = "p" + std::to_string(s);
    if (s == 19) {
      c.posts.push_back(make_post(id, s, "first thing", "other words"));  // sim 0
    } else if (s == 20) {
      c.posts.push_back(make_post(id, s, "x y", "x z"));  // sim 0.5
    } else if (s == 1) {
      c.posts.push_back(make_post(id, s, "a b c", "a b d"));  // sim 2/3
    } else {
      c.posts.push_back(make_post(id, s, "alpha beta news", "alpha beta news"));  // sim 1
    }
  }

  SimilarityPopularityReport rep = similarity_popularity_report(c, Target::score, 90.0, 50.0);
  CHECK(rep.target == "score");
  CHECK(rep.n_high == 2);
  CHECK(rep.n_low == 9);
  CHECK(rep.stats.feature == "title_cosine");
  CHECK(rep.stats.direction == "high<low");  // popular posts changed their titles
  CHECK(rep.stats.u == doctest::Approx(0.0));
  CHECK(rep.stats.gk == doctest::Approx(1.0));
  CHECK(rep.stats.p == doctest::Approx(1.0 / 55.0));  // exact enumeration, one extreme subset
  CHECK(rep.stats.n1 == 2);
  CHECK(rep.stats.n2 == 9);

  CHECK(rep.high_box.median == doctest::Approx(0.25));
  CHECK(rep.low_box.median == doctest::Approx(1.0));

  REQUIRE(rep.high_hist.size() == 20);
  REQUIRE(rep.low_hist.size() == 20);
  CHECK(rep.high_hist[0] == 1);    // sim 0
  CHECK(rep.high_hist[10] == 1);   // sim 0.5
  CHECK(rep.low_hist[19] == 8);    // sim 1 clamps into the last bin
  CHECK(rep.low_hist[13] == 1);    // sim 2/3
  long long total = 0;
  for (long long b : rep.low_hist) total += b;
  CHECK(total == 9);

  // High class without usable pairs must error rather than report silently.
  PostCollection broken = c;
  broken.posts[18].article_title.reset();  // score 19
  broken.posts[19].article_title.reset();  // score 20
  CHECK_THROWS_AS(similarity_popularity_report(broken, Target::score, 90.0, 50.0), Error);
}

TEST_CASE("title pairs CSV") {
  TitlePair p;
  p.post_id = "t3_1";
  p.original = "a, b";
  p.changed = "c";
  p.cosine_sim = 0.5;
  CHECK(title_pairs_to_csv({p}, "# x\n") ==
        "# x\n"
        "post_id,cosine_sim,original,changed\n"
        "t3_1,0.5,\"a, b\",c\n");
  CHECK(title_pairs_to_csv({}) == "post_id,cosine_sim,original,changed\n");
  CHECK(kSimilarityHistogramBins == 20);
}

}  // TEST_SUITE
