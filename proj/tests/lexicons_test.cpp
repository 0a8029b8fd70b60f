#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "doctest.h"
#include "newsrank/lexicons.hpp"
#include "newsrank/textproc.hpp"
#include "newsrank/util.hpp"

using namespace newsrank;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::filesystem::path dir = std::filesystem::path(NEWSRANK_TEST_TMP) / "lexicons";
  std::filesystem::create_directories(dir);
  std::filesystem::path p = dir / name;
  std::ofstream out(p);
  out << content;
  out.close();
  return p.string();
}

void expect_error(const std::function<void()>& fn, const std::string& needle) {
  bool threw = false;
  try {
    fn();
  } catch (const Error& e) {
    threw = true;
    CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                  "message was: " << e.what() << " (wanted substring: " << needle << ")");
  }
  CHECK_MESSAGE(threw, "expected an Error containing: " << needle);
}

Lexicon polarity_fixture() {
  Lexicon lex;
  lex.name = "fixture";
  lex.categories["positive"] = {"good", "great", "like"};
  lex.categories["negative"] = {"bad", "awful"};
  lex.valence["good"] = 2.0;
  lex.valence["great"] = 4.0;
  lex.valence["like"] = 2.0;
  lex.valence["bad"] = -2.0;
  lex.valence["awful"] = -4.0;
  return lex;
}

}  // namespace

TEST_SUITE("lexicons") {

TEST_CASE("loads categories, stems, and valences from TSV") {
  std::string path = write_temp("ok.tsv",
                                "# demo lexicon\n"
                                "category\tentry\tvalence\n"
                                "posemo\tgood\t1.9\n"
                                "posemo\twin*\t2.5\n"
                                "negemo\tbad\t-2.1\n"
                                "function\tthe\n");
  Lexicon lex = load_lexicon(path);
  CHECK(lex.name == "ok");
  CHECK(lex.categories.size() == 3);
  CHECK(lex.categories.at("posemo") == std::vector<std::string>{"good", "win*"});
  CHECK(lex.categories.at("function") == std::vector<std::string>{"the"});
  CHECK(lex.has_valences());
  CHECK(lex.valence.at("win*") == doctest::Approx(2.5));
  CHECK(lex.valence.count("the") == 0);  // no valence column value
}

TEST_CASE("category and entry are lowercased on load") {
  std::string path = write_temp("case.tsv",
                                "category\tentry\n"
                                "PosEmo\tGOOD\n");
  Lexicon lex = load_lexicon(path);
  CHECK(lex.categories.count("posemo") == 1);
  CHECK(lex.categories.at("posemo") == std::vector<std::string>{"good"});
}

TEST_CASE("loader rejects malformed files with line numbers") {
  expect_error([] { load_lexicon(write_temp("nohdr.tsv", "posemo\tgood\n")); },
               "line 1: expected header");
  expect_error([] { load_lexicon(write_temp("onefield.tsv", "category\tentry\njusttext\n")); },
               "line 2: expected 2 or 3 tab-separated fields");
  expect_error([] { load_lexicon(write_temp("interior.tsv", "category\tentry\nposemo\twi*n\n")); },
               "line 2: interior wildcard");
  expect_error([] { load_lexicon(write_temp("barestar.tsv", "category\tentry\nposemo\t*\n")); },
               "line 2: empty stem");
  expect_error([] {
    load_lexicon(write_temp("dup.tsv", "category\tentry\nposemo\tgood\nposemo\tgood\n"));
  }, "line 3: duplicate entry 'good' in category 'posemo'");
  expect_error([] {
    load_lexicon(write_temp("zeroval.tsv", "category\tentry\tvalence\nposemo\tgood\t0\n"));
  }, "line 2: zero valence");
  expect_error([] {
    load_lexicon(write_temp("bigval.tsv", "category\tentry\tvalence\nposemo\tgood\t5.5\n"));
  }, "line 2: valence out of [-5,5]");
  expect_error([] {
    load_lexicon(write_temp("badval.tsv", "category\tentry\tvalence\nposemo\tgood\tnine\n"));
  }, "line 2: invalid valence");
  expect_error([] {
    load_lexicon(write_temp("conflict.tsv",
                            "category\tentry\tvalence\nposemo\tgood\t2\naffect\tgood\t3\n"));
  }, "line 3: conflicting valence");
  expect_error([] {
    load_lexicon(write_temp("emptycat.tsv", "category\tentry\n\tgood\n"));
  }, "line 2: empty category");
  expect_error([] { load_lexicon(write_temp("empty.tsv", "# only a comment\n")); },
               "no header line");
  expect_error([] { load_lexicon("/nonexistent/lexicon.tsv"); }, "cannot open lexicon file");
}

TEST_CASE("same entry in two categories shares one valence") {
  std::string path = write_temp("shared.tsv",
                                "category\tentry\tvalence\n"
                                "posemo\tgood\t2\n"
                                "affect\tgood\t2\n");
  Lexicon lex = load_lexicon(path);
  CHECK(lex.categories.at("posemo") == std::vector<std::string>{"good"});
  CHECK(lex.categories.at("affect") == std::vector<std::string>{"good"});
  CHECK(lex.valence.at("good") == doctest::Approx(2.0));
}

TEST_CASE("category_counts: literals, stems, and per-100-words rates") {
  Lexicon lex;
  lex.categories["posemo"] = {"good", "win*"};
  lex.categories["negemo"] = {"bad"};

  TokenizedText t = tokenize("Good vibes win winners, nothing bad.");
  REQUIRE(t.tokens.size() == 6);
  auto scores = category_counts(t, lex);
  CHECK(scores.at("posemo").count == 3);  // good, win, winners
  CHECK(scores.at("posemo").rate == doctest::Approx(50.0));
  CHECK(scores.at("negemo").count == 1);
  CHECK(scores.at("negemo").rate == doctest::Approx(100.0 / 6.0));
}

TEST_CASE("category_counts: token hits a category at most once, all categories present") {
  Lexicon lex;
  lex.categories["posemo"] = {"win*", "winner"};  // both match "winner"
  lex.categories["quiet"] = {"zzz"};

  TokenizedText t = tokenize("winner");
  auto scores = category_counts(t, lex);
  CHECK(scores.at("posemo").count == 1);
  CHECK(scores.count("quiet") == 1);  // zero-hit category still reported
  CHECK(scores.at("quiet").count == 0);
  CHECK(scores.at("quiet").rate == doctest::Approx(0.0));

  auto empty_scores = category_counts(tokenize(""), lex);
  CHECK(empty_scores.at("posemo").count == 0);
  CHECK(empty_scores.at("posemo").rate == doctest::Approx(0.0));
}

TEST_CASE("strength_polarity: neutral baseline and extremes") {
  Lexicon lex = polarity_fixture();

  StrengthScore neutral = strength_polarity(tokenize("table chair lamp"), lex);
  CHECK(neutral.pos == 1);
  CHECK(neutral.neg == -1);

  StrengthScore s = strength_polarity(tokenize("good but awful and great"), lex);
  CHECK(s.pos == 4);   // max of {2, 4}
  CHECK(s.neg == -4);  // min of {-4}
}

TEST_CASE("strength_polarity: negation flips the flanked word") {
  Lexicon lex = polarity_fixture();

  StrengthScore s = strength_polarity(tokenize("not good"), lex);
  CHECK(s.pos == 1);   // the +2 became -2
  CHECK(s.neg == -2);

  StrengthScore d = strength_polarity(tokenize("don't like this"), lex);
  CHECK(d.neg == -2);  // "n't" contraction counts as negation

  StrengthScore b = strength_polarity(tokenize("never bad"), lex);
  CHECK(b.pos == 2);
  CHECK(b.neg == -1);
}

TEST_CASE("strength_polarity: fractional valences round to nearest integer") {
  Lexicon lex;
  lex.valence["nice"] = 2.6;
  lex.valence["meh"] = -1.4;
  StrengthScore s = strength_polarity(tokenize("nice but meh"), lex);
  CHECK(s.pos == 3);
  CHECK(s.neg == -1);
}

TEST_CASE("valence lookup: exact beats stem, longest stem wins") {
  Lexicon lex;
  lex.valence["win*"] = 2.0;
  lex.valence["winn*"] = -3.0;
  lex.valence["winter"] = -1.0;

  // "winter" has an exact entry; "winning" matches the longer stem "winn*";
  // "wins" only the short stem.
  StrengthScore s1 = strength_polarity(tokenize("winter"), lex);
  CHECK(s1.neg == -1);
  CHECK(s1.pos == 1);
  StrengthScore s2 = strength_polarity(tokenize("winning"), lex);
  CHECK(s2.neg == -3);
  StrengthScore s3 = strength_polarity(tokenize("wins"), lex);
  CHECK(s3.pos == 2);
}

TEST_CASE("rule_polarity: single positive word") {
  Lexicon lex = polarity_fixture();
  RuleScore r = rule_polarity(tokenize("good"), lex);
  CHECK(r.pos == doctest::Approx(1.0));
  CHECK(r.neg == doctest::Approx(0.0));
  CHECK(r.neu == doctest::Approx(0.0));
  CHECK(r.comp == doctest::Approx(2.0 / std::sqrt(19.0)));
}

TEST_CASE("rule_polarity: booster adds a fixed increment") {
  Lexicon lex = polarity_fixture();
  // "very" is neutral mass 1; "good" becomes 2 + 0.29.
  RuleScore r = rule_polarity(tokenize("very good"), lex);
  double boosted = 2.0 + kBoosterIncrement;
  CHECK(r.pos == doctest::Approx(boosted / (boosted + 1.0)));
  CHECK(r.neu == doctest::Approx(1.0 / (boosted + 1.0)));
  CHECK(r.comp == doctest::Approx(boosted / std::sqrt(boosted * boosted + 15.0)));
}

TEST_CASE("rule_polarity: negation scales and flips") {
  Lexicon lex = polarity_fixture();
  // "not" is neutral mass 1; "good" becomes 2 * (-0.74) = -1.48.
  RuleScore r = rule_polarity(tokenize("not good"), lex);
  double flipped = 2.0 * kNegationScalar;  // -1.48
  double mass = 1.0 + (-flipped);
  CHECK(r.neg == doctest::Approx(-flipped / mass));
  CHECK(r.neu == doctest::Approx(1.0 / mass));
  CHECK(r.pos == doctest::Approx(0.0));
  CHECK(r.comp == doctest::Approx(flipped / std::sqrt(flipped * flipped + 15.0)));
  CHECK(r.comp < 0.0);
}

TEST_CASE("rule_polarity: shares sum to one; empty text is all zeros") {
  Lexicon lex = polarity_fixture();
  RuleScore r = rule_polarity(tokenize("the bad news is not good at all"), lex);
  CHECK(r.pos + r.neg + r.neu == doctest::Approx(1.0));
  CHECK(r.comp > -1.0);
  CHECK(r.comp < 1.0);

  RuleScore empty = rule_polarity(tokenize(""), lex);
  CHECK(empty.pos == 0.0);
  CHECK(empty.neg == 0.0);
  CHECK(empty.neu == 0.0);
  CHECK(empty.comp == 0.0);
}

TEST_CASE("negation and booster token predicates") {
  CHECK(is_negation_token("not"));
  CHECK(is_negation_token("no"));
  CHECK(is_negation_token("never"));
  CHECK(is_negation_token("don't"));
  CHECK(is_negation_token("isn't"));
  CHECK_FALSE(is_negation_token("knot"));
  CHECK_FALSE(is_negation_token("nothing"));
  CHECK(is_booster_token("very"));
  CHECK(is_booster_token("extremely"));
  CHECK_FALSE(is_booster_token("quite"));
}

}  // TEST_SUITE
