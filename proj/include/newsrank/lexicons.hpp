#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "newsrank/textproc.hpp"

namespace newsrank {

// Dictionary of category -> entries. An entry is a literal token or a stem
// with a single trailing '*' (prefix match). Valences, when present, are
// nonzero numbers in [-5, 5] shared across categories.
struct Lexicon {
  std::string name;
  std::map<std::string, std::vector<std::string>> categories;
  std::unordered_map<std::string, double> valence;

  bool has_valences() const { return !valence.empty(); }
};

struct CategoryScore {
  long long count = 0;
  double rate = 0.0;  // per 100 words
};

// Output of the max/min-valence scorer. pos in [1,5], neg in [-5,-1]; a text
// with no matches scores the neutral baseline (1, -1).
struct StrengthScore {
  int pos = 1;
  int neg = -1;
};

// Output of the rule-based scorer. pos/neg/neu are normalized mass shares
// summing to 1 for nonempty text; comp in (-1, 1).
struct RuleScore {
  double pos = 0.0;
  double neg = 0.0;
  double neu = 0.0;
  double comp = 0.0;
};

// TSV format: header "category<TAB>entry[<TAB>valence]", one entry per row,
// '#' comment lines. Errors carry 1-based line numbers.
Lexicon load_lexicon(const std::string& path);

std::map<std::string, CategoryScore> category_counts(const TokenizedText& t, const Lexicon& lex);

StrengthScore strength_polarity(const TokenizedText& t, const Lexicon& lex);

RuleScore rule_polarity(const TokenizedText& t, const Lexicon& lex);

// Scoring constants for rule_polarity.
inline constexpr double kNegationScalar = -0.74;
inline constexpr double kBoosterIncrement = 0.29;

bool is_negation_token(const std::string& token);
bool is_booster_token(const std::string& token);

}  // namespace newsrank
