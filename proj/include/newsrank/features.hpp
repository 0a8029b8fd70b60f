#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "newsrank/lexicons.hpp"
#include "newsrank/subjectivity.hpp"
#include "newsrank/textproc.hpp"

namespace newsrank {

inline constexpr const char* kSchemaVersion = "fv1";

enum class TextUnit { post_title, article_title, article_body };
const char* unit_name(TextUnit u);
TextUnit unit_from_name(const std::string& name);

struct FeatureVector {
  std::map<std::string, double> values;
  std::string schema_version = kSchemaVersion;
  TextUnit unit = TextUnit::article_body;
  // Set when the text tokenizes to zero words; structural and readability
  // features are reported as 0 instead of erroring.
  bool degenerate = false;
};

// Corpus word frequencies per million; unknown tokens fall back to floor.
struct FrequencyTable {
  std::unordered_map<std::string, double> freq;
  double floor = 0.5;
  std::string source;

  double lookup(const std::string& token) const {
    auto it = freq.find(token);
    return it == freq.end() ? floor : it->second;
  }
};

// TSV "token<TAB>freq_per_million"; '#' comments; frequencies must be > 0.
FrequencyTable load_frequency_table(const std::string& path, double floor = 0.5);

// All four require >= 1 sentence (and >= 1 word where the formula divides
// by word count); they throw on empty text.
double readability_gunning_fog(const TokenizedText& t);
double readability_smog(const TokenizedText& t);
double readability_fk(const TokenizedText& t);
double readability_fre(const TokenizedText& t);  // Flesch Reading Ease

double ttr(const TokenizedText& t);

enum class FluencyMode { least_common_3, doc_avg };
double fluency(const TokenizedText& t, const FrequencyTable& f, FluencyMode mode);

struct FeatureConfig {
  const Lexicon* categories = nullptr;
  const Lexicon* polarity = nullptr;
  const FrequencyTable* freqs = nullptr;
  const NBModel* nb = nullptr;
};

// Populates every schema feature for one text unit. Categories missing from
// the lexicon score 0 so user dictionaries of any coverage still run.
FeatureVector extract_features(const std::string& text, const FeatureConfig& cfg, TextUnit unit);

// Canonical schema: 47 features in fixed order. senti_subj + content is an
// exact partition of the schema.
const std::vector<std::string>& feature_schema();
const std::vector<std::string>& senti_subj_features();
const std::vector<std::string>& content_features();

// Per-post rows in schema order with unit-prefixed column names
// ("article_body:WC"). Row order follows the input collection.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::string> post_ids;
  std::vector<std::vector<double>> rows;
  std::vector<char> degenerate;  // any unit degenerate for that post
  std::string schema_version = kSchemaVersion;

  size_t col(const std::string& name) const;  // throws when absent
};

}  // namespace newsrank
