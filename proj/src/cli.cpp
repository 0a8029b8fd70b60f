#include "newsrank/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "newsrank/eval_rank.hpp"
#include "newsrank/model.hpp"
#include "newsrank/stats.hpp"
#include "newsrank/titles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace newsrank {

namespace {

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Deterministic per-stage stream so reordering one stage never shifts the
// randomness of another.
uint64_t stage_seed(const RunConfig& c, const std::string& tag) {
  return splitmix64(c.seed ^ fnv1a(tag));
}

const json& expect(const json& j, const char* key, const char* type_name, bool (json::*pred)() const) {
  const json& v = j.at(key);
  if (!(v.*pred)()) throw ConfigError(std::string("config key '") + key + "' must be " + type_name);
  return v;
}

double get_number(const json& j, const char* key) {
  return expect(j, key, "a number", &json::is_number).get<double>();
}

long long get_integer(const json& j, const char* key) {
  return expect(j, key, "an integer", &json::is_number_integer).get<long long>();
}

std::string get_string(const json& j, const char* key) {
  return expect(j, key, "a string", &json::is_string).get<std::string>();
}

void check_range(double v, double lo, double hi, const char* key) {
  if (!(v >= lo && v <= hi))
    throw ConfigError(std::string("config key '") + key + "' out of range [" + format_double(lo) + ", " +
                      format_double(hi) + "]: " + format_double(v));
}

void require_path(const std::string& path, const char* key) {
  if (path.empty()) return;  // requiredness is checked per command
  if (!fs::exists(path)) throw ConfigError(std::string("input path does not exist (") + key + "): " + path);
}

std::string require_set(const std::string& value, const char* key) {
  if (value.empty()) throw ConfigError(std::string("config key '") + key + "' is required for this command");
  return value;
}

struct Resources {
  Lexicon categories;
  Lexicon polarity;
  FrequencyTable freqs;
  NBModel nb;

  FeatureConfig feature_config() const { return FeatureConfig{&categories, &polarity, &freqs, &nb}; }
};

Resources load_resources(const RunConfig& c) {
  Resources r;
  r.categories = load_lexicon(require_set(c.categories_lexicon, "categories_lexicon"));
  r.polarity = load_lexicon(require_set(c.polarity_lexicon, "polarity_lexicon"));
  if (!r.polarity.has_valences())
    throw ConfigError("polarity lexicon has no valences: " + c.polarity_lexicon);
  r.freqs = load_frequency_table(require_set(c.frequencies, "frequencies"), c.frequency_floor);
  r.nb = train_nb(load_subjectivity_corpus(require_set(c.nb_subjective, "nb_subjective"),
                                           require_set(c.nb_objective, "nb_objective")));
  return r;
}

std::string normalized_corpus_path(const RunConfig& c) {
  return (fs::path(c.out_dir) / "corpus.jsonl").string();
}

PostCollection load_normalized(const RunConfig& c) {
  std::string path = normalized_corpus_path(c);
  if (!fs::exists(path)) throw Error("normalized corpus not found: " + path + " (run ingest first)");
  return load_posts(path, CorpusFormat::jsonl);
}

std::vector<Target> selected_targets(const RunConfig& c) {
  if (c.only_target) return {*c.only_target};
  return {Target::score, Target::comments};
}

std::vector<std::string> selected_groups(const RunConfig& c) {
  if (c.only_model.empty()) return model_group_names();
  return {c.only_model};
}

double percentile_for(const RunConfig& c, Target t) {
  return t == Target::score ? c.percentile_score : c.percentile_comments;
}

// Stamp fields shared by every artifact.
void stamp(json& j, const RunConfig& c) {
  j["config_hash"] = hash_hex(config_hash(c));
  j["seed"] = c.seed;
  j["schema_version"] = kSchemaVersion;
  j["tokenizer_version"] = kTokenizerVersion;
}

std::string csv_preamble(const RunConfig& c) {
  return "# config_hash=" + hash_hex(config_hash(c)) + " seed=" + std::to_string(c.seed) +
         " schema_version=" + kSchemaVersion + " tokenizer_version=" + kTokenizerVersion + "\n";
}

void write_json_artifact(const RunConfig& c, const std::string& name, json j) {
  stamp(j, c);
  fs::create_directories(c.out_dir);
  write_text_file((fs::path(c.out_dir) / name).string(), j.dump(2) + "\n");
}

void write_csv_artifact(const RunConfig& c, const std::string& name, const std::string& content) {
  fs::create_directories(c.out_dir);
  write_text_file((fs::path(c.out_dir) / name).string(), content);
}

FeatureTable subset_rows(const FeatureTable& table, const PostCollection& posts) {
  std::unordered_map<std::string, size_t> row_of;
  row_of.reserve(table.post_ids.size());
  for (size_t i = 0; i < table.post_ids.size(); ++i) row_of[table.post_ids[i]] = i;
  FeatureTable out;
  out.names = table.names;
  out.schema_version = table.schema_version;
  for (const Post& p : posts.posts) {
    auto it = row_of.find(p.id);
    if (it == row_of.end()) throw Error("post missing from feature table: " + p.id);
    out.post_ids.push_back(p.id);
    out.rows.push_back(table.rows[it->second]);
    out.degenerate.push_back(table.degenerate[it->second]);
  }
  return out;
}

std::vector<double> lambda_grid_for(const RunConfig& c, const DesignMatrix& raw) {
  if (!c.lambda_grid.empty()) return c.lambda_grid;
  return default_lambda_grid(standardize(raw), c.lambda_count, c.lambda_min_ratio);
}

std::vector<size_t> usable_ks(const RunConfig& c, size_t test_n) {
  std::vector<size_t> ks;
  for (size_t k : c.ks)
    if (k <= test_n) ks.push_back(k);
  if (ks.empty())
    throw Error("every configured k exceeds the test split size " + std::to_string(test_n));
  return ks;
}

std::string model_file_name(const std::string& group, Target target) {
  return "model_" + group + "_" + std::string(target_name(target)) + ".json";
}

// Per-target training state shared by train / rank-eval / report.
struct TargetRun {
  Target target = Target::score;
  PostCollection filtered;
  PostCollection train_posts, test_posts;
  FeatureTable table;        // over `filtered`
  FeatureTable train_table, test_table;
};

TargetRun prepare_target(const RunConfig& c, const PostCollection& corpus, const FeatureConfig& cfg,
                         Target target) {
  TargetRun r;
  r.target = target;
  r.filtered = percentile_filter(corpus, target, percentile_for(c, target));
  r.table = build_feature_table(r.filtered, cfg, c.units);
  auto split = train_test_split(r.filtered, c.train_frac,
                                stage_seed(c, std::string("split:") + target_name(target)));
  r.train_posts = std::move(split.first);
  r.test_posts = std::move(split.second);
  r.train_table = subset_rows(r.table, r.train_posts);
  r.test_table = subset_rows(r.table, r.test_posts);
  return r;
}

LinearRankModel train_group_model(const RunConfig& c, const TargetRun& run, const std::string& group) {
  DesignMatrix full = make_design(run.train_table, run.train_posts, run.target);
  DesignMatrix sub = select_columns(full, group_features(group));
  std::vector<double> grid = lambda_grid_for(c, sub);
  return lasso_cv(sub, grid, c.cv_folds,
                  stage_seed(c, "cv:" + group + ":" + target_name(run.target)));
}

json model_summary(const LinearRankModel& m) {
  size_t nonzero = 0;
  for (double b : m.coef)
    if (b != 0.0) ++nonzero;
  json j;
  j["lambda"] = m.lambda;
  j["nonzero_coefficients"] = nonzero;
  j["features"] = m.feature_names.size();
  j["sweeps"] = m.convergence.sweeps;
  j["objective"] = m.convergence.objective;
  return j;
}

RankEvalReport eval_group_model(const RunConfig& c, const TargetRun& run, const std::string& group,
                                const LinearRankModel& model) {
  DesignMatrix full = make_design(run.test_table, run.test_posts, run.target);
  DesignMatrix sub = select_columns(full, group_features(group));
  return rank_eval(model, sub, usable_ks(c, sub.n), c.dataset_label, group, target_name(run.target));
}

json rank_eval_json(const std::vector<RankEvalReport>& reports) {
  json arr = json::array();
  for (const auto& rep : reports) {
    for (const auto& e : rep.entries) {
      json row;
      row["dataset"] = rep.dataset;
      row["model"] = rep.model_id;
      row["target"] = rep.target;
      row["k"] = e.k;
      row["precision"] = e.precision;
      row["kt_distance"] = e.kt_distance;
      row["test_size"] = rep.test_size;
      arr.push_back(row);
    }
  }
  return arr;
}

json stability_json(const StabilityReport& rep) {
  json j;
  j["resamples"] = rep.resamples;
  j["subsample_frac"] = rep.subsample_frac;
  j["weakness"] = rep.weakness;
  j["threshold"] = rep.threshold;
  j["lambda"] = rep.lambda;
  j["stage_seed"] = rep.seed;
  json feats = json::array();
  for (size_t i = 0; i < rep.feature_names.size(); ++i) {
    json f;
    f["feature"] = rep.feature_names[i];
    f["frequency"] = rep.frequency[i];
    f["selected"] = rep.frequency[i] >= rep.threshold;
    feats.push_back(f);
  }
  j["features"] = feats;
  j["selected"] = rep.selected();
  return j;
}

std::string stability_csv(const RunConfig& c, const StabilityReport& rep) {
  std::string out = csv_preamble(c);
  out += "feature,frequency,selected\n";
  for (size_t i = 0; i < rep.feature_names.size(); ++i) {
    out += csv_escape(rep.feature_names[i]) + "," + format_double(rep.frequency[i]) + "," +
           (rep.frequency[i] >= rep.threshold ? "1" : "0") + "\n";
  }
  return out;
}

json effect_rows_json(const EffectReport& rep) {
  json arr = json::array();
  for (const auto& r : rep.rows) {
    json row;
    row["feature"] = r.feature;
    row["direction"] = r.direction;
    row["u"] = r.u;
    row["p_value"] = r.p;
    row["cohens_d"] = r.cohens_d;
    row["grissom_kim"] = r.gk;
    row["n1"] = r.n1;
    row["n2"] = r.n2;
    arr.push_back(row);
  }
  return arr;
}

// Stability selection and the two-class shift report for one target over the
// percentile-filtered collection.
struct IntrospectOut {
  StabilityReport stability;
  EffectReport effects;
  double lambda = 0.0;
};

IntrospectOut introspect_target(const RunConfig& c, const TargetRun& run) {
  IntrospectOut out;
  DesignMatrix design = make_design(run.table, run.filtered, run.target);
  out.lambda = c.stability_lambda_scale * lambda_max(standardize(design));
  out.stability = stability_selection(design, out.lambda, c.stability_resamples, c.stability_frac,
                                      c.stability_weakness, c.stability_threshold,
                                      stage_seed(c, std::string("stability:") + target_name(run.target)));
  TwoClassSplit split = two_class_split(run.filtered, run.target, c.high_pct, c.low_pct);
  out.effects = feature_shift_report(split, run.table, out.stability.selected());
  return out;
}

void write_introspect_outputs(const RunConfig& c, Target target, const IntrospectOut& out) {
  std::string t = target_name(target);
  write_csv_artifact(c, "stability_" + t + ".csv", stability_csv(c, out.stability));
  json sj = stability_json(out.stability);
  sj["target"] = t;
  write_json_artifact(c, "stability_" + t + ".json", std::move(sj));
  write_csv_artifact(c, "effects_" + t + ".csv", effect_report_to_csv(out.effects, csv_preamble(c)));
  json ej;
  ej["target"] = t;
  ej["label"] = out.effects.label;
  ej["rows"] = effect_rows_json(out.effects);
  write_json_artifact(c, "effects_" + t + ".json", std::move(ej));
}

template <typename F>
auto run_stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("stage " + name + ": " + e.what());
  }
}

json box_json(const BoxSummary& b) {
  json j;
  j["min"] = b.min;
  j["q1"] = b.q1;
  j["median"] = b.median;
  j["q3"] = b.q3;
  j["max"] = b.max;
  j["whisker_lo"] = b.whisker_lo;
  j["whisker_hi"] = b.whisker_hi;
  j["n"] = b.n;
  return j;
}

}  // namespace

const std::vector<std::string>& model_group_names() {
  static const std::vector<std::string> names = {"senti_subj", "content", "all"};
  return names;
}

const std::vector<std::string>& group_features(const std::string& group) {
  if (group == "senti_subj") return senti_subj_features();
  if (group == "content") return content_features();
  if (group == "all") return feature_schema();
  throw ConfigError("unknown model group: " + group + " (expected senti_subj, content, or all)");
}

RunConfig load_run_config(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("config file does not exist: " + path);
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object: " + path);

  static const std::set<std::string> known = {
      "corpus",          "format",
      "units",           "categories_lexicon",
      "polarity_lexicon", "frequencies",
      "nb_subjective",   "nb_objective",
      "seed",            "out_dir",
      "ks",              "percentile",
      "percentile_score", "percentile_comments",
      "train_frac",      "cv_folds",
      "lambda_count",    "lambda_min_ratio",
      "lambda_grid",     "stability_resamples",
      "stability_frac",  "stability_weakness",
      "stability_threshold", "stability_lambda_scale",
      "high_pct",        "low_pct",
      "min_article_chars", "frequency_floor",
      "divergent_max_sim", "dataset_label"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ConfigError("unknown config key: " + item.key());

  RunConfig c;
  if (!j.contains("seed")) throw ConfigError("config key 'seed' is required");
  {
    const json& s = j.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0))
      throw ConfigError("config key 'seed' must be a non-negative integer");
    c.seed = s.get<uint64_t>();
  }

  if (j.contains("corpus")) c.corpus = get_string(j, "corpus");
  if (j.contains("format")) c.format = format_from_name(get_string(j, "format"));
  if (j.contains("units")) {
    const json& u = expect(j, "units", "an array of unit names", &json::is_array);
    if (u.empty()) throw ConfigError("config key 'units' must not be empty");
    c.units.clear();
    for (const auto& name : u) {
      if (!name.is_string()) throw ConfigError("config key 'units' must contain strings");
      c.units.push_back(unit_from_name(name.get<std::string>()));
    }
    std::set<TextUnit> seen(c.units.begin(), c.units.end());
    if (seen.size() != c.units.size()) throw ConfigError("config key 'units' has duplicates");
  }
  if (j.contains("categories_lexicon")) c.categories_lexicon = get_string(j, "categories_lexicon");
  if (j.contains("polarity_lexicon")) c.polarity_lexicon = get_string(j, "polarity_lexicon");
  if (j.contains("frequencies")) c.frequencies = get_string(j, "frequencies");
  if (j.contains("nb_subjective")) c.nb_subjective = get_string(j, "nb_subjective");
  if (j.contains("nb_objective")) c.nb_objective = get_string(j, "nb_objective");
  if (j.contains("out_dir")) c.out_dir = get_string(j, "out_dir");
  if (c.out_dir.empty()) throw ConfigError("config key 'out_dir' must not be empty");

  if (j.contains("ks")) {
    const json& arr = expect(j, "ks", "an array of positive integers", &json::is_array);
    if (arr.empty()) throw ConfigError("config key 'ks' must not be empty");
    c.ks.clear();
    for (const auto& v : arr) {
      if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw ConfigError("config key 'ks' must contain positive integers");
      c.ks.push_back(v.get<size_t>());
    }
    for (size_t i = 1; i < c.ks.size(); ++i)
      if (c.ks[i] <= c.ks[i - 1]) throw ConfigError("config key 'ks' must be strictly increasing");
  }

  if (j.contains("percentile")) {
    double p = get_number(j, "percentile");
    check_range(p, 0.0, 100.0, "percentile");
    c.percentile_score = c.percentile_comments = p;
  }
  if (j.contains("percentile_score")) {
    c.percentile_score = get_number(j, "percentile_score");
    check_range(c.percentile_score, 0.0, 100.0, "percentile_score");
  }
  if (j.contains("percentile_comments")) {
    c.percentile_comments = get_number(j, "percentile_comments");
    check_range(c.percentile_comments, 0.0, 100.0, "percentile_comments");
  }
  if (j.contains("train_frac")) {
    c.train_frac = get_number(j, "train_frac");
    if (!(c.train_frac > 0.0 && c.train_frac < 1.0))
      throw ConfigError("config key 'train_frac' must be in (0, 1)");
  }
  if (j.contains("cv_folds")) {
    long long f = get_integer(j, "cv_folds");
    if (f < 2) throw ConfigError("config key 'cv_folds' must be at least 2");
    c.cv_folds = static_cast<int>(f);
  }
  if (j.contains("lambda_count")) {
    long long n = get_integer(j, "lambda_count");
    if (n < 1) throw ConfigError("config key 'lambda_count' must be positive");
    c.lambda_count = static_cast<int>(n);
  }
  if (j.contains("lambda_min_ratio")) {
    c.lambda_min_ratio = get_number(j, "lambda_min_ratio");
    if (!(c.lambda_min_ratio > 0.0 && c.lambda_min_ratio <= 1.0))
      throw ConfigError("config key 'lambda_min_ratio' must be in (0, 1]");
  }
  if (j.contains("lambda_grid")) {
    const json& arr = expect(j, "lambda_grid", "an array of numbers", &json::is_array);
    c.lambda_grid.clear();
    for (const auto& v : arr) {
      if (!v.is_number() || v.get<double>() < 0.0)
        throw ConfigError("config key 'lambda_grid' must contain non-negative numbers");
      c.lambda_grid.push_back(v.get<double>());
    }
    std::sort(c.lambda_grid.begin(), c.lambda_grid.end(), std::greater<double>());
    for (size_t i = 1; i < c.lambda_grid.size(); ++i)
      if (c.lambda_grid[i] == c.lambda_grid[i - 1])
        throw ConfigError("config key 'lambda_grid' has duplicate values");
  }
  if (j.contains("stability_resamples")) {
    long long n = get_integer(j, "stability_resamples");
    if (n < 1) throw ConfigError("config key 'stability_resamples' must be positive");
    c.stability_resamples = static_cast<int>(n);
  }
  auto unit_interval = [&](const char* key, double& field, bool allow_one) {
    if (!j.contains(key)) return;
    field = get_number(j, key);
    bool ok = field > 0.0 && (allow_one ? field <= 1.0 : field < 1.0);
    if (!ok)
      throw ConfigError(std::string("config key '") + key + "' must be in (0, 1" +
                        (allow_one ? "]" : ")"));
  };
  unit_interval("stability_frac", c.stability_frac, true);
  unit_interval("stability_weakness", c.stability_weakness, true);
  unit_interval("stability_threshold", c.stability_threshold, true);
  unit_interval("stability_lambda_scale", c.stability_lambda_scale, true);
  unit_interval("divergent_max_sim", c.divergent_max_sim, true);
  if (j.contains("high_pct")) {
    c.high_pct = get_number(j, "high_pct");
    check_range(c.high_pct, 0.0, 100.0, "high_pct");
  }
  if (j.contains("low_pct")) {
    c.low_pct = get_number(j, "low_pct");
    check_range(c.low_pct, 0.0, 100.0, "low_pct");
  }
  if (c.low_pct >= c.high_pct) throw ConfigError("config: low_pct must be below high_pct");
  if (j.contains("min_article_chars")) {
    c.min_article_chars = get_integer(j, "min_article_chars");
    if (c.min_article_chars < 0) throw ConfigError("config key 'min_article_chars' must be >= 0");
  }
  if (j.contains("frequency_floor")) {
    c.frequency_floor = get_number(j, "frequency_floor");
    if (!(c.frequency_floor > 0.0)) throw ConfigError("config key 'frequency_floor' must be positive");
  }
  if (j.contains("dataset_label")) c.dataset_label = get_string(j, "dataset_label");

  require_path(c.corpus, "corpus");
  require_path(c.categories_lexicon, "categories_lexicon");
  require_path(c.polarity_lexicon, "polarity_lexicon");
  require_path(c.frequencies, "frequencies");
  require_path(c.nb_subjective, "nb_subjective");
  require_path(c.nb_objective, "nb_objective");
  return c;
}

std::string config_to_canonical_json(const RunConfig& c) {
  json j;
  j["corpus"] = c.corpus;
  j["format"] = c.format == CorpusFormat::jsonl ? "jsonl" : "csv";
  json units = json::array();
  for (TextUnit u : c.units) units.push_back(unit_name(u));
  j["units"] = units;
  j["categories_lexicon"] = c.categories_lexicon;
  j["polarity_lexicon"] = c.polarity_lexicon;
  j["frequencies"] = c.frequencies;
  j["nb_subjective"] = c.nb_subjective;
  j["nb_objective"] = c.nb_objective;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["ks"] = c.ks;
  j["percentile_score"] = c.percentile_score;
  j["percentile_comments"] = c.percentile_comments;
  j["train_frac"] = c.train_frac;
  j["cv_folds"] = c.cv_folds;
  j["lambda_count"] = c.lambda_count;
  j["lambda_min_ratio"] = c.lambda_min_ratio;
  j["lambda_grid"] = c.lambda_grid;
  j["stability_resamples"] = c.stability_resamples;
  j["stability_frac"] = c.stability_frac;
  j["stability_weakness"] = c.stability_weakness;
  j["stability_threshold"] = c.stability_threshold;
  j["stability_lambda_scale"] = c.stability_lambda_scale;
  j["high_pct"] = c.high_pct;
  j["low_pct"] = c.low_pct;
  j["min_article_chars"] = c.min_article_chars;
  j["frequency_floor"] = c.frequency_floor;
  j["divergent_max_sim"] = c.divergent_max_sim;
  j["dataset_label"] = c.dataset_label;
  j["only_target"] = c.only_target ? target_name(*c.only_target) : "";
  j["only_model"] = c.only_model;
  return j.dump();
}

uint64_t config_hash(const RunConfig& c) { return fnv1a(config_to_canonical_json(c)); }

FeatureTable build_feature_table(const PostCollection& c, const FeatureConfig& cfg,
                                 const std::vector<TextUnit>& units) {
  FeatureTable table;
  const auto& schema = feature_schema();
  for (TextUnit u : units)
    for (const std::string& f : schema) table.names.push_back(std::string(unit_name(u)) + ":" + f);
  for (const Post& p : c.posts) {
    std::vector<double> row;
    row.reserve(table.names.size());
    bool degenerate = false;
    for (TextUnit u : units) {
      std::string text;
      switch (u) {
        case TextUnit::post_title: text = p.post_title; break;
        case TextUnit::article_title: text = p.article_title.value_or(""); break;
        case TextUnit::article_body: text = p.article_body.value_or(""); break;
      }
      FeatureVector fv = extract_features(text, cfg, u);
      degenerate = degenerate || fv.degenerate;
      for (const std::string& f : schema) row.push_back(fv.values.at(f));
    }
    table.post_ids.push_back(p.id);
    table.rows.push_back(std::move(row));
    table.degenerate.push_back(degenerate ? 1 : 0);
  }
  return table;
}

DesignMatrix make_design(const FeatureTable& table, const PostCollection& c, Target target) {
  if (table.post_ids.size() != c.posts.size())
    throw Error("feature table and collection sizes differ");
  DesignMatrix m;
  m.feature_names = table.names;
  m.n = table.rows.size();
  m.p = table.names.size();
  m.x.reserve(m.n * m.p);
  for (size_t i = 0; i < m.n; ++i) {
    if (table.post_ids[i] != c.posts[i].id) throw Error("feature table row order mismatch");
    m.x.insert(m.x.end(), table.rows[i].begin(), table.rows[i].end());
    m.y.push_back(static_cast<double>(target_value(c.posts[i], target)));
  }
  return m;
}

DesignMatrix select_columns(const DesignMatrix& m, const std::vector<std::string>& bases) {
  std::set<std::string> wanted(bases.begin(), bases.end());
  std::vector<size_t> cols;
  for (size_t jcol = 0; jcol < m.feature_names.size(); ++jcol) {
    const std::string& name = m.feature_names[jcol];
    size_t sep = name.find(':');
    std::string base = sep == std::string::npos ? name : name.substr(sep + 1);
    if (wanted.count(base)) cols.push_back(jcol);
  }
  if (cols.empty()) throw Error("no matrix columns match the requested feature group");
  DesignMatrix out;
  out.n = m.n;
  out.p = cols.size();
  out.y = m.y;
  for (size_t jcol : cols) out.feature_names.push_back(m.feature_names[jcol]);
  out.x.reserve(out.n * out.p);
  for (size_t i = 0; i < m.n; ++i)
    for (size_t jcol : cols) out.x.push_back(m.at(i, jcol));
  return out;
}

void cmd_ingest(const RunConfig& c) {
  if (c.corpus.empty()) throw ConfigError("config key 'corpus' is required for ingest");
  if (!fs::exists(c.corpus)) throw ConfigError("input path does not exist (corpus): " + c.corpus);
  PostCollection loaded = load_posts(c.corpus, c.format);
  PostCollection kept = filter_articles(loaded, c.min_article_chars);
  fs::create_directories(c.out_dir);
  save_posts_jsonl(kept, normalized_corpus_path(c));

  std::map<long long, std::pair<long long, long long>> per_year;  // year -> (posts, articles)
  for (const Post& p : loaded.posts) ++per_year[p.year].first;
  for (const Post& p : kept.posts) ++per_year[p.year].second;

  json summary;
  summary["posts"] = loaded.size();
  summary["articles"] = kept.size();
  summary["source"] = c.corpus;
  summary["min_article_chars"] = c.min_article_chars;
  json years;
  for (const auto& [year, counts] : per_year) {
    json row;
    row["posts"] = counts.first;
    row["articles"] = counts.second;
    years[std::to_string(year)] = row;
  }
  summary["per_year"] = years;
  summary["filter_history"] = kept.filter_history;
  write_json_artifact(c, "ingest_summary.json", std::move(summary));
}

void cmd_extract(const RunConfig& c) {
  PostCollection corpus = load_normalized(c);
  Resources res = load_resources(c);
  FeatureTable table = build_feature_table(corpus, res.feature_config(), c.units);

  std::string out = csv_preamble(c);
  out += "post_id,degenerate";
  for (const std::string& n : table.names) out += "," + csv_escape(n);
  out += "\n";
  for (size_t i = 0; i < table.rows.size(); ++i) {
    out += csv_escape(table.post_ids[i]);
    out += table.degenerate[i] ? ",1" : ",0";
    for (double v : table.rows[i]) out += "," + format_double(v);
    out += "\n";
  }
  write_csv_artifact(c, "features.csv", out);

  json meta;
  meta["posts"] = table.post_ids.size();
  json units = json::array();
  for (TextUnit u : c.units) units.push_back(unit_name(u));
  meta["units"] = units;
  meta["columns"] = table.names;
  write_json_artifact(c, "features_meta.json", std::move(meta));
}

void cmd_train(const RunConfig& c) {
  PostCollection corpus = load_normalized(c);
  Resources res = load_resources(c);
  json summary;
  for (Target target : selected_targets(c)) {
    TargetRun run = prepare_target(c, corpus, res.feature_config(), target);
    json per_target;
    per_target["filtered_posts"] = run.filtered.size();
    per_target["train_posts"] = run.train_posts.size();
    per_target["test_posts"] = run.test_posts.size();
    per_target["percentile"] = percentile_for(c, target);
    for (const std::string& group : selected_groups(c)) {
      LinearRankModel model = train_group_model(c, run, group);
      json wrapper;
      wrapper["model"] = json::parse(model_to_json(model));
      write_json_artifact(c, model_file_name(group, target), std::move(wrapper));
      per_target[group] = model_summary(model);
    }
    summary[target_name(target)] = per_target;
  }
  write_json_artifact(c, "train_summary.json", std::move(summary));
}

void cmd_rank_eval(const RunConfig& c) {
  PostCollection corpus = load_normalized(c);
  Resources res = load_resources(c);
  std::vector<RankEvalReport> reports;
  for (Target target : selected_targets(c)) {
    TargetRun run = prepare_target(c, corpus, res.feature_config(), target);
    for (const std::string& group : selected_groups(c)) {
      std::string path = (fs::path(c.out_dir) / model_file_name(group, target)).string();
      if (!fs::exists(path)) throw Error("model file not found: " + path + " (run train first)");
      json wrapper;
      try {
        wrapper = json::parse(read_text_file(path));
      } catch (const json::exception& e) {
        throw Error("model file parse error in " + path + ": " + e.what());
      }
      if (!wrapper.contains("model")) throw Error("model file missing 'model' object: " + path);
      LinearRankModel model = model_from_json(wrapper["model"].dump());
      reports.push_back(eval_group_model(c, run, group, model));
    }
  }
  write_csv_artifact(c, "rank_eval.csv", rank_eval_to_csv(reports, csv_preamble(c)));
  json j;
  j["entries"] = rank_eval_json(reports);
  write_json_artifact(c, "rank_eval.json", std::move(j));
}

void cmd_introspect(const RunConfig& c) {
  PostCollection corpus = load_normalized(c);
  Resources res = load_resources(c);
  for (Target target : selected_targets(c)) {
    PostCollection filtered = percentile_filter(corpus, target, percentile_for(c, target));
    TargetRun run;
    run.target = target;
    run.filtered = std::move(filtered);
    run.table = build_feature_table(run.filtered, res.feature_config(), c.units);
    write_introspect_outputs(c, target, introspect_target(c, run));
  }
}

void cmd_titles(const RunConfig& c) {
  PostCollection corpus = load_normalized(c);
  Resources res = load_resources(c);

  std::vector<TitlePair> pairs = make_title_pairs(corpus);
  double changed = changed_fraction(corpus);
  std::vector<TitlePair> divergent = divergent_pairs(corpus, c.divergent_max_sim);
  EffectReport change_report = title_change_report(divergent, res.feature_config());

  std::vector<long long> hist(kSimilarityHistogramBins, 0);
  for (const TitlePair& p : pairs) {
    int bin = std::min(static_cast<int>(p.cosine_sim * kSimilarityHistogramBins),
                       kSimilarityHistogramBins - 1);
    ++hist[bin];
  }

  json sim_json;
  std::string sim_csv = csv_preamble(c);
  sim_csv += "dataset,target,measure,value\n";
  for (Target target : selected_targets(c)) {
    SimilarityPopularityReport rep =
        similarity_popularity_report(corpus, target, c.high_pct, c.low_pct);
    json t;
    t["direction"] = rep.stats.direction;
    t["u"] = rep.stats.u;
    t["p_value"] = rep.stats.p;
    t["cohens_d"] = rep.stats.cohens_d;
    t["grissom_kim"] = rep.stats.gk;
    t["n_high"] = rep.n_high;
    t["n_low"] = rep.n_low;
    t["high_box"] = box_json(rep.high_box);
    t["low_box"] = box_json(rep.low_box);
    t["high_hist"] = rep.high_hist;
    t["low_hist"] = rep.low_hist;
    sim_json[target_name(target)] = t;
    for (const auto& [measure, value] :
         std::initializer_list<std::pair<const char*, double>>{{"u", rep.stats.u},
                                                               {"p_value", rep.stats.p},
                                                               {"cohens_d", rep.stats.cohens_d},
                                                               {"grissom_kim", rep.stats.gk}}) {
      sim_csv += csv_escape(c.dataset_label) + "," + target_name(target) + "," + measure + "," +
                 format_double(value) + "\n";
    }
  }

  json summary;
  summary["dataset"] = c.dataset_label;
  summary["posts"] = corpus.size();
  summary["pairs"] = pairs.size();
  summary["changed_fraction"] = changed;
  summary["divergent_pairs"] = divergent.size();
  summary["divergent_max_sim"] = c.divergent_max_sim;
  summary["similarity_histogram_bins"] = kSimilarityHistogramBins;
  summary["similarity_histogram"] = hist;
  write_json_artifact(c, "title_summary.json", std::move(summary));
  write_csv_artifact(c, "divergent_pairs.csv", title_pairs_to_csv(divergent, csv_preamble(c)));
  write_csv_artifact(c, "title_change_effects.csv",
                     effect_report_to_csv(change_report, csv_preamble(c)));
  json cj;
  cj["label"] = change_report.label;
  cj["rows"] = effect_rows_json(change_report);
  write_json_artifact(c, "title_change_effects.json", std::move(cj));
  write_csv_artifact(c, "similarity_popularity.csv", sim_csv);
  write_json_artifact(c, "similarity_popularity.json", std::move(sim_json));
}

void cmd_run_experiment(const RunConfig& c) {
  PostCollection corpus = run_stage("load_corpus", [&] { return load_normalized(c); });
  Resources res = run_stage("load_resources", [&] { return load_resources(c); });

  json manifest;
  std::vector<RankEvalReport> reports;
  for (Target target : selected_targets(c)) {
    std::string t = target_name(target);
    TargetRun run = run_stage("prepare:" + t,
                              [&] { return prepare_target(c, corpus, res.feature_config(), target); });
    json per_target;
    per_target["percentile"] = percentile_for(c, target);
    per_target["filtered_posts"] = run.filtered.size();
    per_target["train_posts"] = run.train_posts.size();
    per_target["test_posts"] = run.test_posts.size();

    for (const std::string& group : selected_groups(c)) {
      LinearRankModel model =
          run_stage("train:" + group + ":" + t, [&] { return train_group_model(c, run, group); });
      json wrapper;
      wrapper["model"] = json::parse(model_to_json(model));
      write_json_artifact(c, model_file_name(group, target), std::move(wrapper));
      per_target[group] = model_summary(model);
      reports.push_back(run_stage("rank_eval:" + group + ":" + t,
                                  [&] { return eval_group_model(c, run, group, model); }));
    }

    IntrospectOut intro = run_stage("introspect:" + t, [&] { return introspect_target(c, run); });
    write_introspect_outputs(c, target, intro);
    per_target["stability_lambda"] = intro.lambda;
    per_target["stability_selected"] = intro.stability.selected();
    per_target["significant_shifts"] = intro.effects.rows.size();
    manifest[t] = per_target;
  }

  run_stage("write_reports", [&] {
    write_csv_artifact(c, "rank_eval.csv", rank_eval_to_csv(reports, csv_preamble(c)));
    json j;
    j["entries"] = rank_eval_json(reports);
    write_json_artifact(c, "rank_eval.json", std::move(j));
    return 0;
  });

  manifest["dataset"] = c.dataset_label;
  manifest["posts"] = corpus.size();
  json units = json::array();
  for (TextUnit u : c.units) units.push_back(unit_name(u));
  manifest["units"] = units;
  manifest["models"] = selected_groups(c);
  write_json_artifact(c, "run_manifest.json", std::move(manifest));
}

}  // namespace newsrank
