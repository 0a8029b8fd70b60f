#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "newsrank/util.hpp"

using namespace newsrank;

TEST_SUITE("util") {

TEST_CASE("rng is deterministic per seed") {
  Rng a(7), b(7), c(8);
  std::vector<uint64_t> va, vb, vc;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
  }
  CHECK(va == vb);
  CHECK(va != vc);
}

TEST_CASE("child streams are independent of parent draw count") {
  Rng a(99), b(99);
  a.next_u64();
  a.next_u64();
  CHECK(a.child(5).next_u64() == b.child(5).next_u64());
  CHECK(a.child(5).next_u64() != b.child(6).next_u64());
}

TEST_CASE("below is unbiased over its range and rejects out-of-range") {
  Rng rng(3);
  std::set<uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    uint64_t v = rng.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("unit stays in [0,1)") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    double u = rng.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("shuffle permutes and sample_without_replacement is distinct") {
  Rng rng(21);
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
  auto orig = v;
  rng.shuffle(v);
  std::multiset<int> a(v.begin(), v.end()), b(orig.begin(), orig.end());
  CHECK(a == b);

  auto picks = rng.sample_without_replacement(100, 10);
  std::set<size_t> uniq(picks.begin(), picks.end());
  CHECK(picks.size() == 10);
  CHECK(uniq.size() == 10);
  for (size_t p : picks) CHECK(p < 100);
}

TEST_CASE("format_double is stable and normalizes negative zero") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1.5) == "1.5");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333");
}

TEST_CASE("fnv1a distinguishes close strings and is stable") {
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") != fnv1a("b"));
  CHECK(fnv1a("abc") == fnv1a("abc"));
}

TEST_CASE("csv field escaping round-trips through the parser") {
  std::string line = csv_escape("plain") + "," + csv_escape("has,comma") + "," +
                     csv_escape("has \"quote\"") + "," + csv_escape("two\nlines") + "\n";
  auto rows = csv_parse(line);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].size() == 4);
  CHECK(rows[0][0] == "plain");
  CHECK(rows[0][1] == "has,comma");
  CHECK(rows[0][2] == "has \"quote\"");
  CHECK(rows[0][3] == "two\nlines");
}

TEST_CASE("csv_parse_lines tracks the starting line of each row") {
  // Quoted newline keeps one logical row across two physical lines.
  std::string text = "a,b\n\"x\ny\",z\nlast,row\n";
  CsvFile f = csv_parse_lines(text);
  REQUIRE(f.rows.size() == 3);
  CHECK(f.line_numbers[0] == 1);
  CHECK(f.line_numbers[1] == 2);
  CHECK(f.line_numbers[2] == 4);
  CHECK(f.rows[1][0] == "x\ny");
}

TEST_CASE("splitmix64 matches its reference stream") {
  // First outputs for the zero state, from the published reference code.
  CHECK(splitmix64(0) == 16294208416658607535ull);
}

}  // TEST_SUITE
