#include "newsrank/textproc.hpp"

#include <fstream>

#include "newsrank/util.hpp"

namespace newsrank {

namespace {

// Decodes one UTF-8 code point starting at i; advances i. Invalid bytes are
// consumed one at a time and returned as U+FFFD.
uint32_t next_codepoint(const std::string& s, size_t& i) {
  unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    unsigned char b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_ws(uint32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0x00A0 || cp == 0x2028 || cp == 0x2029;
}

// Non-ASCII code points that act as punctuation; everything else >= 0x80
// is treated as a word character so non-English words survive intact.
bool is_nonascii_punct(uint32_t cp) {
  switch (cp) {
    case 0x00A1:  // inverted exclamation
    case 0x00AB:  // left guillemet
    case 0x00B7:  // middle dot
    case 0x00BB:  // right guillemet
    case 0x00BF:  // inverted question
    case 0x2010:
    case 0x2011:
    case 0x2012:
    case 0x2013:  // en dash
    case 0x2014:  // em dash
    case 0x2015:
    case 0x2018:  // left single quote
    case 0x201A:
    case 0x201C:  // left double quote
    case 0x201D:  // right double quote
    case 0x201E:
    case 0x2022:  // bullet
    case 0x2026:  // ellipsis
    case 0x2039:
    case 0x203A:
    case 0xFFFD:
      return true;
    default:
      return false;
  }
}

bool is_apostrophe(uint32_t cp) { return cp == '\'' || cp == 0x2019; }

bool is_word_char(uint32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  return !is_nonascii_punct(cp) && !is_apostrophe(cp) && !is_ws(cp);
}

uint32_t ascii_lower(uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  return cp;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

// Built-in stopword list, version v1. Mirrored byte-for-byte (minus comments)
// in data/stopwords.txt; a unit test keeps the two in sync.
const char* const kStopwords[] = {
    "a",      "about",  "above", "after",  "again",   "against", "all",    "am",      "an",
    "and",    "any",    "are",   "aren't", "as",      "at",      "be",     "because", "been",
    "before", "being",  "below", "between", "both",   "but",     "by",     "can",     "cannot",
    "could",  "couldn't", "did", "didn't", "do",      "does",    "doesn't", "doing",  "don't",
    "down",   "during", "each",  "few",    "for",     "from",    "further", "had",    "hadn't",
    "has",    "hasn't", "have",  "haven't", "having", "he",      "her",    "here",    "hers",
    "herself", "him",   "himself", "his",  "how",     "i",       "if",     "in",      "into",
    "is",     "isn't",  "it",    "its",    "itself",  "let's",   "me",     "more",    "most",
    "mustn't", "my",    "myself", "no",    "nor",     "not",     "of",     "off",     "on",
    "once",   "only",   "or",    "other",  "ought",   "our",     "ours",   "ourselves", "out",
    "over",   "own",    "same",  "shan't", "she",     "should",  "shouldn't", "so",   "some",
    "such",   "than",   "that",  "the",    "their",   "theirs",  "them",   "themselves", "then",
    "there",  "these",  "they",  "this",   "those",   "through", "to",     "too",     "under",
    "until",  "up",     "very",  "was",    "wasn't",  "we",      "were",   "weren't", "what",
    "when",   "where",  "which", "while",  "who",     "whom",    "why",    "will",    "with",
    "won't",  "would",  "wouldn't", "you", "your",    "yours",   "yourself", "yourselves",
};

}  // namespace

TokenizedText tokenize(const std::string& text) {
  TokenizedText out;
  out.raw = text;

  std::string current;
  size_t sentence_start = 0;

  auto flush_token = [&] {
    if (!current.empty()) {
      out.tokens.push_back(current);
      current.clear();
    }
  };
  auto close_sentence = [&] {
    if (out.tokens.size() > sentence_start) {
      out.sentences.push_back({sentence_start, out.tokens.size()});
      sentence_start = out.tokens.size();
    }
  };

  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    size_t at = i;
    uint32_t cp = next_codepoint(text, i);
    if (is_ws(cp)) {
      flush_token();
      continue;
    }
    if (is_word_char(cp)) {
      append_utf8(current, ascii_lower(cp));
      continue;
    }
    if (is_apostrophe(cp)) {
      // Word-internal apostrophes stay in the token ("don't"); leading and
      // trailing ones are punctuation.
      size_t peek = i;
      bool next_is_word = peek < n && is_word_char(next_codepoint(text, peek));
      if (!current.empty() && next_is_word) {
        append_utf8(current, cp);
        continue;
      }
    }
    // Punctuation mark.
    flush_token();
    out.punctuation_marks.push_back(text.substr(at, i - at));
    if (cp == '.' || cp == '!' || cp == '?') {
      size_t peek = i;
      bool at_end = peek >= n;
      bool ws_next = false;
      if (!at_end) {
        uint32_t nxt = next_codepoint(text, peek);
        ws_next = is_ws(nxt);
      }
      if (at_end || ws_next) close_sentence();
    }
  }
  flush_token();
  close_sentence();
  return out;
}

int count_syllables(const std::string& word) {
  if (word.empty()) throw Error("count_syllables: empty word");
  int groups = 0;
  bool in_group = false;
  for (char c : word) {
    if (is_vowel(c)) {
      if (!in_group) {
        ++groups;
        in_group = true;
      }
    } else {
      in_group = false;
    }
  }
  // Terminal silent 'e': "ode" -> 1, but "the" keeps its only group.
  if (word.size() >= 2 && word.back() == 'e' && !is_vowel(word[word.size() - 2]) && groups > 1) {
    --groups;
  }
  return groups < 1 ? 1 : groups;
}

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> list(std::begin(kStopwords), std::end(kStopwords));
  return list;
}

bool is_stopword(const std::string& token) {
  static const std::unordered_set<std::string> set(default_stopwords().begin(),
                                                   default_stopwords().end());
  return set.count(token) > 0;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stopword file: " + path);
  std::unordered_set<std::string> set;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t");
    set.insert(line.substr(b, e - b + 1));
  }
  return set;
}

size_t utf8_length(const std::string& s) {
  size_t i = 0, count = 0;
  while (i < s.size()) {
    next_codepoint(s, i);
    ++count;
  }
  return count;
}

}  // namespace newsrank
