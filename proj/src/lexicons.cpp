#include "newsrank/lexicons.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "newsrank/util.hpp"

namespace newsrank {

namespace {

std::string ascii_lower_copy(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c += 32;
  }
  return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

Error line_error(size_t line_no, const std::string& msg) {
  return Error("line " + std::to_string(line_no) + ": " + msg);
}

// Flattened matching structures built per scoring call. Lexicons are small
// (hundreds of entries), so rebuilding is cheap and keeps Lexicon a plain
// value type.
struct Matcher {
  // literal token -> categories holding it
  std::unordered_map<std::string, std::vector<const std::string*>> exact;
  // (stem prefix without '*', categories), longest prefix first
  std::vector<std::pair<std::string, std::vector<const std::string*>>> stems;

  explicit Matcher(const Lexicon& lex) {
    std::map<std::string, std::vector<const std::string*>> stem_map;
    for (const auto& [cat, entries] : lex.categories) {
      for (const auto& e : entries) {
        if (!e.empty() && e.back() == '*') {
          stem_map[e.substr(0, e.size() - 1)].push_back(&cat);
        } else {
          exact[e].push_back(&cat);
        }
      }
    }
    stems.assign(stem_map.begin(), stem_map.end());
    std::sort(stems.begin(), stems.end(), [](const auto& a, const auto& b) {
      return a.first.size() > b.first.size() || (a.first.size() == b.first.size() && a.first < b.first);
    });
  }
};

bool has_prefix(const std::string& token, const std::string& prefix) {
  return token.size() >= prefix.size() && token.compare(0, prefix.size(), prefix) == 0;
}

// Valence for a token: exact entry wins, then the longest matching stem.
// Returns 0 when nothing matches.
struct ValenceMatcher {
  std::unordered_map<std::string, double> exact;
  std::vector<std::pair<std::string, double>> stems;  // longest first

  explicit ValenceMatcher(const Lexicon& lex) {
    for (const auto& [entry, v] : lex.valence) {
      if (!entry.empty() && entry.back() == '*') {
        stems.emplace_back(entry.substr(0, entry.size() - 1), v);
      } else {
        exact.emplace(entry, v);
      }
    }
    std::sort(stems.begin(), stems.end(), [](const auto& a, const auto& b) {
      return a.first.size() > b.first.size() || (a.first.size() == b.first.size() && a.first < b.first);
    });
  }

  double lookup(const std::string& token) const {
    auto it = exact.find(token);
    if (it != exact.end()) return it->second;
    for (const auto& [prefix, v] : stems) {
      if (has_prefix(token, prefix)) return v;
    }
    return 0.0;
  }
};

}  // namespace

bool is_negation_token(const std::string& token) {
  if (token == "not" || token == "no" || token == "never") return true;
  // Contractions keep their apostrophe in tokenization: "don't", "isn't".
  return token.size() >= 3 && token.compare(token.size() - 3, 3, "n't") == 0;
}

bool is_booster_token(const std::string& token) {
  return token == "very" || token == "extremely";
}

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon file: " + path);

  Lexicon lex;
  size_t slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  size_t dot = base.find_last_of('.');
  lex.name = dot == std::string::npos ? base : base.substr(0, dot);

  std::set<std::pair<std::string, std::string>> seen;
  bool header_done = false;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::vector<std::string> cols = split_tabs(line);
    if (!header_done) {
      if (cols.size() < 2 || cols.size() > 3 || cols[0] != "category" || cols[1] != "entry" ||
          (cols.size() == 3 && cols[2] != "valence")) {
        throw line_error(line_no, "expected header 'category<TAB>entry[<TAB>valence]'");
      }
      header_done = true;
      continue;
    }
    if (cols.size() < 2 || cols.size() > 3) {
      throw line_error(line_no, "expected 2 or 3 tab-separated fields, got " + std::to_string(cols.size()));
    }

    std::string cat = ascii_lower_copy(cols[0]);
    std::string entry = ascii_lower_copy(cols[1]);
    if (cat.empty()) throw line_error(line_no, "empty category name");
    if (entry.empty()) throw line_error(line_no, "empty entry");

    size_t star = entry.find('*');
    if (star != std::string::npos) {
      if (star != entry.size() - 1) throw line_error(line_no, "interior wildcard in entry '" + entry + "'");
      if (entry.size() == 1) throw line_error(line_no, "empty stem '*'");
      if (entry.find('*') != entry.rfind('*')) {
        throw line_error(line_no, "multiple wildcards in entry '" + entry + "'");
      }
    }

    if (!seen.insert({cat, entry}).second) {
      throw line_error(line_no, "duplicate entry '" + entry + "' in category '" + cat + "'");
    }
    lex.categories[cat].push_back(entry);

    if (cols.size() == 3 && !cols[2].empty()) {
      double v = 0;
      try {
        size_t pos = 0;
        v = std::stod(cols[2], &pos);
        if (pos != cols[2].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw line_error(line_no, "invalid valence '" + cols[2] + "'");
      }
      if (v == 0.0) throw line_error(line_no, "zero valence for entry '" + entry + "'");
      if (v < -5.0 || v > 5.0) throw line_error(line_no, "valence out of [-5,5] for entry '" + entry + "'");
      auto it = lex.valence.find(entry);
      if (it != lex.valence.end() && it->second != v) {
        throw line_error(line_no, "conflicting valence for entry '" + entry + "'");
      }
      lex.valence[entry] = v;
    }
  }
  if (!header_done) throw Error("lexicon file has no header line: " + path);
  return lex;
}

std::map<std::string, CategoryScore> category_counts(const TokenizedText& t, const Lexicon& lex) {
  Matcher m(lex);
  std::map<std::string, CategoryScore> out;
  for (const auto& [cat, _] : lex.categories) out[cat];  // every category present, zeroed

  for (const auto& tok : t.tokens) {
    // A token may hit several categories, but at most once per category.
    std::set<const std::string*> hit;
    auto it = m.exact.find(tok);
    if (it != m.exact.end()) hit.insert(it->second.begin(), it->second.end());
    for (const auto& [prefix, cats] : m.stems) {
      if (has_prefix(tok, prefix)) hit.insert(cats.begin(), cats.end());
    }
    for (const std::string* cat : hit) ++out[*cat].count;
  }

  size_t wc = t.tokens.size();
  for (auto& [_, score] : out) {
    score.rate = wc == 0 ? 0.0 : 100.0 * static_cast<double>(score.count) / static_cast<double>(wc);
  }
  return out;
}

StrengthScore strength_polarity(const TokenizedText& t, const Lexicon& lex) {
  ValenceMatcher vm(lex);
  double best_pos = 1.0;
  double best_neg = -1.0;
  for (size_t i = 0; i < t.tokens.size(); ++i) {
    double v = vm.lookup(t.tokens[i]);
    if (v == 0.0) continue;
    if (i > 0 && is_negation_token(t.tokens[i - 1])) v = -v;
    if (v > 0) {
      best_pos = std::max(best_pos, v);
    } else {
      best_neg = std::min(best_neg, v);
    }
  }
  StrengthScore s;
  s.pos = static_cast<int>(std::llround(std::min(5.0, std::max(1.0, best_pos))));
  s.neg = static_cast<int>(std::llround(std::max(-5.0, std::min(-1.0, best_neg))));
  return s;
}

RuleScore rule_polarity(const TokenizedText& t, const Lexicon& lex) {
  if (t.tokens.empty()) return {};

  ValenceMatcher vm(lex);
  double total = 0.0;
  double pos_mass = 0.0, neg_mass = 0.0, neu_mass = 0.0;
  for (size_t i = 0; i < t.tokens.size(); ++i) {
    double v = vm.lookup(t.tokens[i]);
    if (v != 0.0 && i > 0) {
      const std::string& prev = t.tokens[i - 1];
      if (is_booster_token(prev)) {
        v += v > 0 ? kBoosterIncrement : -kBoosterIncrement;
      } else if (is_negation_token(prev)) {
        v *= kNegationScalar;
      }
    }
    total += v;
    if (v > 0) {
      pos_mass += v;
    } else if (v < 0) {
      neg_mass += -v;
    } else {
      neu_mass += 1.0;
    }
  }

  RuleScore r;
  double mass = pos_mass + neg_mass + neu_mass;
  r.pos = pos_mass / mass;
  r.neg = neg_mass / mass;
  r.neu = neu_mass / mass;
  r.comp = total / std::sqrt(total * total + 15.0);
  return r;
}

}  // namespace newsrank
