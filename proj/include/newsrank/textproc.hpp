#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace newsrank {

// Identifies the tokenizer rule set; embedded in run metadata so reports
// can be tied to the rules that produced them.
inline constexpr const char* kTokenizerVersion = "rb1";
inline constexpr const char* kStopwordListVersion = "v1";

struct SentenceRange {
  size_t begin = 0;  // token index, inclusive
  size_t end = 0;    // token index, exclusive
  size_t size() const { return end - begin; }
};

// Output of tokenize(). Word tokens are lowercased (ASCII case only) maximal
// runs of letters/digits plus word-internal apostrophes; every other
// non-whitespace character is a punctuation mark. Sentences close at '.',
// '!' or '?' followed by whitespace or end of text.
struct TokenizedText {
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<std::string> punctuation_marks;
  std::vector<SentenceRange> sentences;

  size_t word_count() const { return tokens.size(); }
  size_t sentence_count() const { return sentences.size(); }
};

TokenizedText tokenize(const std::string& text);

// Vowel-group heuristic: count maximal runs of [aeiouy], drop one for a
// terminal silent 'e' unless that would reach zero; never below 1.
// Expects a nonempty lowercase word.
int count_syllables(const std::string& word);

// Membership in the bundled stopword list (see data/stopwords.txt, which
// mirrors the built-in list). Token must be lowercase.
bool is_stopword(const std::string& token);

// The built-in stopword list, in file order.
const std::vector<std::string>& default_stopwords();

// Loads a stopword file: one lowercase token per line, UTF-8, '#' comments.
std::unordered_set<std::string> load_stopwords(const std::string& path);

// Number of Unicode code points in a UTF-8 string (invalid bytes count 1).
size_t utf8_length(const std::string& s);

}  // namespace newsrank
