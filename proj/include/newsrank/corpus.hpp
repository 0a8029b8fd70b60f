#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace newsrank {

struct Post {
  std::string id;
  std::string post_title;
  std::optional<std::string> article_title;
  std::optional<std::string> article_body;
  long long score = 0;
  long long num_comments = 0;
  std::optional<long long> created_utc;
  std::optional<std::string> url;
  std::string subreddit;
  long long year = 0;
};

struct PostCollection {
  std::vector<Post> posts;
  std::string source_path;
  std::vector<std::string> filter_history;  // append-only

  size_t size() const { return posts.size(); }
};

enum class CorpusFormat { jsonl, csv };
CorpusFormat format_from_name(const std::string& name);

enum class Target { score, comments };
const char* target_name(Target t);
Target target_from_name(const std::string& name);
long long target_value(const Post& p, Target t);

// JSONL: one object per line, keys id, post_title, article_title,
// article_body, score, num_comments, created_utc, url, subreddit, year
// (extras ignored). CSV: identical header names. Errors carry 1-based file
// line numbers ("line 2: missing field score").
PostCollection load_posts(const std::string& path, CorpusFormat format);

void save_posts_jsonl(const PostCollection& c, const std::string& path);

// Keeps posts whose article body exists and has >= min_chars code points.
PostCollection filter_articles(const PostCollection& c, long long min_chars = 100);

// Nearest-rank percentile of sorted values: value at rank ceil(pct/100 * n)
// (1-based, clamped to [1, n]); pct <= 0 yields the minimum.
long long nearest_rank_value(std::vector<long long> values, double pct);

// Removes posts whose target is strictly below the pct-th percentile value.
PostCollection percentile_filter(const PostCollection& c, Target target, double pct = 30.0);

// Seeded shuffle; |train| = round(train_frac * n) clamped to [1, n-1].
std::pair<PostCollection, PostCollection> train_test_split(const PostCollection& c, double train_frac,
                                                           uint64_t seed);

struct TwoClassSplit {
  PostCollection high;
  PostCollection low;
  Target target = Target::score;
  double high_percentile = 90.0;
  double low_percentile = 50.0;
};

// high: strictly above the high_pct percentile value; low: strictly below
// the low_pct value; middle discarded. Errors when either class is empty.
TwoClassSplit two_class_split(const PostCollection& c, Target target, double high_pct = 90.0,
                              double low_pct = 50.0);

}  // namespace newsrank
