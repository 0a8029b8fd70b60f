#include "newsrank/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "newsrank/textproc.hpp"
#include "newsrank/util.hpp"

namespace newsrank {

namespace {

Error line_error(size_t line_no, const std::string& msg) {
  return Error("line " + std::to_string(line_no) + ": " + msg);
}

long long parse_int_field(const std::string& raw, size_t line_no, const std::string& field) {
  try {
    size_t pos = 0;
    long long v = std::stoll(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw line_error(line_no, "invalid value for field " + field);
  }
}

long long json_int_field(const nlohmann::json& rec, const std::string& field, size_t line_no) {
  if (!rec.contains(field) || rec[field].is_null()) {
    throw line_error(line_no, "missing field " + field);
  }
  const auto& v = rec[field];
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number()) return static_cast<long long>(std::llround(v.get<double>()));
  if (v.is_string()) return parse_int_field(v.get<std::string>(), line_no, field);
  throw line_error(line_no, "invalid value for field " + field);
}

std::string json_string_field(const nlohmann::json& rec, const std::string& field, size_t line_no) {
  if (!rec.contains(field) || rec[field].is_null()) {
    throw line_error(line_no, "missing field " + field);
  }
  if (!rec[field].is_string()) throw line_error(line_no, "invalid value for field " + field);
  return rec[field].get<std::string>();
}

void validate_post(Post& p, size_t line_no, std::unordered_set<std::string>& ids) {
  if (p.id.empty()) throw line_error(line_no, "missing field id");
  if (p.post_title.empty()) throw line_error(line_no, "missing field post_title");
  if (p.num_comments < 0) throw line_error(line_no, "negative num_comments");
  if (!ids.insert(p.id).second) throw line_error(line_no, "duplicate id '" + p.id + "'");
}

PostCollection load_jsonl(const std::string& path) {
  std::string text = read_text_file(path);
  PostCollection c;
  c.source_path = path;
  std::unordered_set<std::string> ids;

  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw line_error(line_no, std::string("parse error: ") + e.what());
    }
    if (!rec.is_object()) throw line_error(line_no, "record is not an object");

    Post p;
    p.id = json_string_field(rec, "id", line_no);
    p.post_title = json_string_field(rec, "post_title", line_no);
    p.score = json_int_field(rec, "score", line_no);
    p.num_comments = json_int_field(rec, "num_comments", line_no);
    p.subreddit = json_string_field(rec, "subreddit", line_no);
    p.year = json_int_field(rec, "year", line_no);
    if (rec.contains("article_title") && rec["article_title"].is_string()) {
      p.article_title = rec["article_title"].get<std::string>();
    }
    if (rec.contains("article_body") && rec["article_body"].is_string()) {
      p.article_body = rec["article_body"].get<std::string>();
    }
    if (rec.contains("created_utc") && rec["created_utc"].is_number()) {
      p.created_utc = static_cast<long long>(rec["created_utc"].get<double>());
    }
    if (rec.contains("url") && rec["url"].is_string()) {
      p.url = rec["url"].get<std::string>();
    }
    validate_post(p, line_no, ids);
    c.posts.push_back(std::move(p));
  }
  return c;
}

PostCollection load_csv(const std::string& path) {
  CsvFile file = csv_parse_lines(read_text_file(path));
  if (file.rows.empty()) throw Error("empty CSV file: " + path);

  const auto& header = file.rows[0];
  auto col_of = [&](const std::string& name) -> int {
    for (size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return static_cast<int>(j);
    }
    return -1;
  };
  int c_id = col_of("id"), c_ptitle = col_of("post_title"), c_atitle = col_of("article_title");
  int c_body = col_of("article_body"), c_score = col_of("score"), c_nc = col_of("num_comments");
  int c_created = col_of("created_utc"), c_url = col_of("url"), c_sub = col_of("subreddit");
  int c_year = col_of("year");

  PostCollection c;
  c.source_path = path;
  std::unordered_set<std::string> ids;

  for (size_t r = 1; r < file.rows.size(); ++r) {
    const auto& row = file.rows[r];
    size_t line_no = file.line_numbers[r];
    if (row.size() == 1 && row[0].empty()) continue;  // blank line

    auto cell = [&](int col) -> std::string {
      return col >= 0 && static_cast<size_t>(col) < row.size() ? row[col] : std::string();
    };
    auto required = [&](int col, const char* name) -> std::string {
      std::string v = cell(col);
      if (v.empty()) throw line_error(line_no, std::string("missing field ") + name);
      return v;
    };

    Post p;
    p.id = required(c_id, "id");
    p.post_title = required(c_ptitle, "post_title");
    p.score = parse_int_field(required(c_score, "score"), line_no, "score");
    p.num_comments = parse_int_field(required(c_nc, "num_comments"), line_no, "num_comments");
    p.subreddit = required(c_sub, "subreddit");
    p.year = parse_int_field(required(c_year, "year"), line_no, "year");
    if (!cell(c_atitle).empty()) p.article_title = cell(c_atitle);
    if (!cell(c_body).empty()) p.article_body = cell(c_body);
    if (!cell(c_created).empty()) p.created_utc = parse_int_field(cell(c_created), line_no, "created_utc");
    if (!cell(c_url).empty()) p.url = cell(c_url);
    validate_post(p, line_no, ids);
    c.posts.push_back(std::move(p));
  }
  return c;
}

}  // namespace

CorpusFormat format_from_name(const std::string& name) {
  if (name == "jsonl") return CorpusFormat::jsonl;
  if (name == "csv") return CorpusFormat::csv;
  throw Error("unknown corpus format: " + name);
}

const char* target_name(Target t) {
  return t == Target::score ? "score" : "comments";
}

Target target_from_name(const std::string& name) {
  if (name == "score") return Target::score;
  if (name == "comments") return Target::comments;
  throw Error("unknown target: " + name);
}

long long target_value(const Post& p, Target t) {
  return t == Target::score ? p.score : p.num_comments;
}

PostCollection load_posts(const std::string& path, CorpusFormat format) {
  return format == CorpusFormat::jsonl ? load_jsonl(path) : load_csv(path);
}

void save_posts_jsonl(const PostCollection& c, const std::string& path) {
  std::string out;
  for (const auto& p : c.posts) {
    nlohmann::json rec = {
        {"id", p.id},
        {"post_title", p.post_title},
        {"score", p.score},
        {"num_comments", p.num_comments},
        {"subreddit", p.subreddit},
        {"year", p.year},
    };
    if (p.article_title) rec["article_title"] = *p.article_title;
    if (p.article_body) rec["article_body"] = *p.article_body;
    if (p.created_utc) rec["created_utc"] = *p.created_utc;
    if (p.url) rec["url"] = *p.url;
    out += rec.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

PostCollection filter_articles(const PostCollection& c, long long min_chars) {
  PostCollection out;
  out.source_path = c.source_path;
  out.filter_history = c.filter_history;
  for (const auto& p : c.posts) {
    if (p.article_body && static_cast<long long>(utf8_length(*p.article_body)) >= min_chars) {
      out.posts.push_back(p);
    }
  }
  out.filter_history.push_back("filter_articles(min_chars=" + std::to_string(min_chars) + "): kept " +
                               std::to_string(out.posts.size()) + " of " + std::to_string(c.posts.size()));
  return out;
}

long long nearest_rank_value(std::vector<long long> values, double pct) {
  if (values.empty()) throw Error("nearest_rank_value: empty sample");
  std::sort(values.begin(), values.end());
  double n = static_cast<double>(values.size());
  auto rank = static_cast<long long>(std::ceil(pct / 100.0 * n));
  if (rank < 1) rank = 1;
  if (rank > static_cast<long long>(values.size())) rank = static_cast<long long>(values.size());
  return values[static_cast<size_t>(rank - 1)];
}

PostCollection percentile_filter(const PostCollection& c, Target target, double pct) {
  if (c.posts.empty()) throw Error("percentile_filter: empty collection");
  std::vector<long long> values;
  values.reserve(c.posts.size());
  for (const auto& p : c.posts) values.push_back(target_value(p, target));
  long long cutoff = nearest_rank_value(std::move(values), pct);

  PostCollection out;
  out.source_path = c.source_path;
  out.filter_history = c.filter_history;
  for (const auto& p : c.posts) {
    if (target_value(p, target) >= cutoff) out.posts.push_back(p);
  }
  out.filter_history.push_back("percentile_filter(target=" + std::string(target_name(target)) +
                               ", pct=" + format_double(pct) + "): kept " + std::to_string(out.posts.size()) +
                               " of " + std::to_string(c.posts.size()));
  return out;
}

std::pair<PostCollection, PostCollection> train_test_split(const PostCollection& c, double train_frac,
                                                           uint64_t seed) {
  if (c.posts.size() < 2) throw Error("train_test_split: need at least 2 posts");
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw Error("train_test_split: train_frac must be in (0,1)");

  size_t n = c.posts.size();
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);

  auto train_n = static_cast<size_t>(std::llround(train_frac * static_cast<double>(n)));
  if (train_n < 1) train_n = 1;
  if (train_n > n - 1) train_n = n - 1;

  PostCollection train, test;
  train.source_path = test.source_path = c.source_path;
  train.filter_history = test.filter_history = c.filter_history;
  std::string entry = "train_test_split(train_frac=" + format_double(train_frac) +
                      ", seed=" + std::to_string(seed) + "): train=" + std::to_string(train_n) +
                      " test=" + std::to_string(n - train_n);
  train.filter_history.push_back(entry + " [train]");
  test.filter_history.push_back(entry + " [test]");
  for (size_t i = 0; i < n; ++i) {
    (i < train_n ? train : test).posts.push_back(c.posts[idx[i]]);
  }
  return {std::move(train), std::move(test)};
}

TwoClassSplit two_class_split(const PostCollection& c, Target target, double high_pct, double low_pct) {
  if (c.posts.empty()) throw Error("two_class_split: empty collection");
  if (!(high_pct > low_pct)) throw Error("two_class_split: high_pct must exceed low_pct");

  std::vector<long long> values;
  values.reserve(c.posts.size());
  for (const auto& p : c.posts) values.push_back(target_value(p, target));
  long long high_cut = nearest_rank_value(values, high_pct);
  long long low_cut = nearest_rank_value(values, low_pct);

  TwoClassSplit split;
  split.target = target;
  split.high_percentile = high_pct;
  split.low_percentile = low_pct;
  split.high.source_path = split.low.source_path = c.source_path;
  split.high.filter_history = split.low.filter_history = c.filter_history;
  for (const auto& p : c.posts) {
    long long v = target_value(p, target);
    if (v > high_cut) split.high.posts.push_back(p);
    else if (v < low_cut) split.low.posts.push_back(p);
  }
  if (split.high.posts.empty()) throw Error("two_class_split: high class empty");
  if (split.low.posts.empty()) throw Error("two_class_split: low class empty");
  split.high.filter_history.push_back("two_class_split(target=" + std::string(target_name(target)) +
                                      "): high above " + std::to_string(high_cut));
  split.low.filter_history.push_back("two_class_split(target=" + std::string(target_name(target)) +
                                     "): low below " + std::to_string(low_cut));
  return split;
}

}  // namespace newsrank
