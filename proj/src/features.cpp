#include "newsrank/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include "newsrank/util.hpp"

namespace newsrank {

namespace {

const char* const kCategoryNames[] = {
    "posemo", "negemo", "affect", "tone",  "analytic",     "clout",       "authent", "insight",
    "tentat", "certain", "affil", "focuspresent", "focusfuture", "ppron", "i",       "we",
    "you",    "shehe",  "quant",  "swear", "netspeak",     "interrog",    "informal", "function",
};

int syllable_total(const TokenizedText& t) {
  int total = 0;
  for (const auto& tok : t.tokens) total += count_syllables(tok);
  return total;
}

int polysyllable_total(const TokenizedText& t) {
  int total = 0;
  for (const auto& tok : t.tokens) {
    if (count_syllables(tok) >= 3) ++total;
  }
  return total;
}

bool is_quote_mark(const std::string& p) {
  return p == "\"" || p == "'" || p == "‘" || p == "’" || p == "“" ||
         p == "”" || p == "«" || p == "»";
}

void require_sentences(const TokenizedText& t) {
  if (t.sentence_count() == 0) throw Error("no sentences");
}

}  // namespace

const char* unit_name(TextUnit u) {
  switch (u) {
    case TextUnit::post_title: return "post_title";
    case TextUnit::article_title: return "article_title";
    case TextUnit::article_body: return "article_body";
  }
  throw Error("unknown text unit");
}

TextUnit unit_from_name(const std::string& name) {
  if (name == "post_title") return TextUnit::post_title;
  if (name == "article_title") return TextUnit::article_title;
  if (name == "article_body") return TextUnit::article_body;
  throw Error("unknown text unit: " + name);
}

FrequencyTable load_frequency_table(const std::string& path, double floor) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open frequency file: " + path);
  FrequencyTable table;
  table.floor = floor;
  table.source = path;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("line " + std::to_string(line_no) + ": expected token<TAB>frequency");
    }
    std::string tok = line.substr(0, tab);
    double f = 0;
    try {
      size_t pos = 0;
      f = std::stod(line.substr(tab + 1), &pos);
    } catch (const std::exception&) {
      throw Error("line " + std::to_string(line_no) + ": invalid frequency");
    }
    if (!(f > 0)) throw Error("line " + std::to_string(line_no) + ": frequency must be positive");
    table.freq[tok] = f;
  }
  return table;
}

double readability_gunning_fog(const TokenizedText& t) {
  require_sentences(t);
  double wc = static_cast<double>(t.word_count());
  double sents = static_cast<double>(t.sentence_count());
  double complex_words = static_cast<double>(polysyllable_total(t));
  return 0.4 * (wc / sents + 100.0 * complex_words / wc);
}

double readability_smog(const TokenizedText& t) {
  require_sentences(t);
  double sents = static_cast<double>(t.sentence_count());
  double poly = static_cast<double>(polysyllable_total(t));
  return 1.0430 * std::sqrt(poly * 30.0 / sents) + 3.1291;
}

double readability_fk(const TokenizedText& t) {
  require_sentences(t);
  double wc = static_cast<double>(t.word_count());
  double sents = static_cast<double>(t.sentence_count());
  double syll = static_cast<double>(syllable_total(t));
  return 0.39 * (wc / sents) + 11.8 * (syll / wc) - 15.59;
}

double readability_fre(const TokenizedText& t) {
  require_sentences(t);
  double wc = static_cast<double>(t.word_count());
  double sents = static_cast<double>(t.sentence_count());
  double syll = static_cast<double>(syllable_total(t));
  return 206.835 - 1.015 * (wc / sents) - 84.6 * (syll / wc);
}

double ttr(const TokenizedText& t) {
  if (t.tokens.empty()) throw Error("ttr: empty text");
  std::unordered_set<std::string> distinct(t.tokens.begin(), t.tokens.end());
  return static_cast<double>(distinct.size()) / static_cast<double>(t.tokens.size());
}

double fluency(const TokenizedText& t, const FrequencyTable& f, FluencyMode mode) {
  if (t.tokens.empty()) throw Error("fluency: empty text");
  std::vector<double> freqs;
  freqs.reserve(t.tokens.size());
  for (const auto& tok : t.tokens) freqs.push_back(f.lookup(tok));

  if (mode == FluencyMode::least_common_3 && freqs.size() > 3) {
    std::sort(freqs.begin(), freqs.end());
    freqs.resize(3);
  }
  double sum = 0;
  for (double x : freqs) sum += x;
  return sum / static_cast<double>(freqs.size());
}

FeatureVector extract_features(const std::string& text, const FeatureConfig& cfg, TextUnit unit) {
  if (!cfg.categories || !cfg.polarity || !cfg.freqs || !cfg.nb) {
    throw Error("extract_features: incomplete feature config");
  }

  TokenizedText t = tokenize(text);
  FeatureVector fv;
  fv.unit = unit;
  fv.degenerate = t.tokens.empty();

  size_t wc = t.word_count();
  double dwc = static_cast<double>(wc);
  auto& v = fv.values;

  v["WC"] = dwc;
  v["WPS"] = t.sentence_count() ? dwc / static_cast<double>(t.sentence_count()) : 0.0;

  size_t char_sum = 0, stop = 0, six = 0, distinct = 0;
  {
    std::unordered_set<std::string> seen;
    for (const auto& tok : t.tokens) {
      size_t len = utf8_length(tok);
      char_sum += len;
      if (len > 6) ++six;
      if (is_stopword(tok)) ++stop;
      seen.insert(tok);
    }
    distinct = seen.size();
  }
  v["avg_wlen"] = wc ? static_cast<double>(char_sum) / dwc : 0.0;
  v["per_stop"] = wc ? 100.0 * static_cast<double>(stop) / dwc : 0.0;
  v["sixltr"] = wc ? static_cast<double>(six) / dwc : 0.0;
  v["TTR"] = wc ? static_cast<double>(distinct) / dwc : 0.0;

  v["allPunc"] = static_cast<double>(t.punctuation_marks.size());
  long long quotes = 0;
  for (const auto& p : t.punctuation_marks) {
    if (is_quote_mark(p)) ++quotes;
  }
  v["quotes"] = static_cast<double>(quotes);

  if (fv.degenerate) {
    v["GI"] = v["SMOG"] = v["FK"] = v["FKE"] = 0.0;
    v["flu_coca_c"] = v["flu_coca_d"] = 0.0;
  } else {
    v["GI"] = readability_gunning_fog(t);
    v["SMOG"] = readability_smog(t);
    v["FK"] = readability_fk(t);
    v["FKE"] = readability_fre(t);
    v["flu_coca_c"] = fluency(t, *cfg.freqs, FluencyMode::least_common_3);
    v["flu_coca_d"] = fluency(t, *cfg.freqs, FluencyMode::doc_avg);
  }

  auto counts = category_counts(t, *cfg.categories);
  for (const char* cat : kCategoryNames) {
    auto it = counts.find(cat);
    v[cat] = it == counts.end() ? 0.0 : it->second.rate;
  }

  StrengthScore s = strength_polarity(t, *cfg.polarity);
  v["str_pos"] = s.pos;
  v["str_neg"] = s.neg;
  RuleScore r = rule_polarity(t, *cfg.polarity);
  v["vad_pos"] = r.pos;
  v["vad_neg"] = r.neg;
  v["vad_neu"] = r.neu;
  v["vad_comp"] = r.comp;

  auto [psubj, pobj] = predict_proba(*cfg.nb, text);
  v["NB_psubj"] = psubj;
  v["NB_pobj"] = pobj;
  v["NB_subjcat"] = classify(*cfg.nb, text) == SubjLabel::subjective ? 1.0 : 0.0;

  return fv;
}

const std::vector<std::string>& feature_schema() {
  static const std::vector<std::string> schema = [] {
    std::vector<std::string> s = {
        "WC",    "WPS",  "avg_wlen", "per_stop", "allPunc",    "quotes",    "sixltr",
        "TTR",   "GI",   "SMOG",     "FK",       "FKE",        "flu_coca_c", "flu_coca_d",
        "str_pos", "str_neg", "vad_pos", "vad_neg", "vad_neu", "vad_comp",
        "NB_psubj", "NB_pobj", "NB_subjcat",
    };
    for (const char* cat : kCategoryNames) s.push_back(cat);
    return s;
  }();
  return schema;
}

const std::vector<std::string>& senti_subj_features() {
  static const std::vector<std::string> group = {
      "str_pos",  "str_neg", "vad_pos", "vad_neg",  "vad_neu",      "vad_comp",
      "NB_psubj", "NB_pobj", "NB_subjcat",
      "posemo",   "negemo",  "affect",  "tone",     "analytic",     "clout",
      "authent",  "insight", "tentat",  "certain",  "affil",        "focuspresent",
      "focusfuture",
  };
  return group;
}

const std::vector<std::string>& content_features() {
  static const std::vector<std::string> group = {
      "WC",       "WPS",      "avg_wlen", "per_stop", "allPunc",  "quotes",   "sixltr",
      "TTR",      "GI",       "SMOG",     "FK",       "FKE",      "flu_coca_c", "flu_coca_d",
      "ppron",    "i",        "we",       "you",      "shehe",    "quant",    "swear",
      "netspeak", "interrog", "informal", "function",
  };
  return group;
}

size_t FeatureTable::col(const std::string& name) const {
  for (size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return j;
  }
  throw Error("feature not in table: " + name);
}

}  // namespace newsrank
