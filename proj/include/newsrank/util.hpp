#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace newsrank {

// All recoverable failures surface as Error; messages carry file/line
// context where one exists.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic RNG. std::shuffle and the std distributions are
// implementation-defined, so draws and shuffles are hand-rolled on top of
// mt19937_64 to keep seeded results stable across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed), seed_base_(seed) {}

  // Independent child stream for a named stage or task index.
  Rng child(uint64_t salt) const { return Rng(splitmix64(seed_base_ ^ splitmix64(salt))); }

  uint64_t next_u64() { return eng_(); }

  // Unbiased integer in [0, n) via rejection sampling.
  uint64_t below(uint64_t n) {
    if (n == 0) throw Error("Rng::below: n must be positive");
    uint64_t rem = std::numeric_limits<uint64_t>::max() % n;
    uint64_t limit = std::numeric_limits<uint64_t>::max() - rem;
    for (;;) {
      uint64_t v = eng_();
      if (v <= limit) return v % n;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Standard normal via Box-Muller.
  double gauss() {
    double u1 = unit(), u2 = unit();
    while (u1 <= 0.0) u1 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n) without replacement, in draw order.
  std::vector<size_t> sample_without_replacement(size_t n, size_t k) {
    if (k > n) throw Error("sample_without_replacement: k > n");
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    for (size_t i = 0; i < k; ++i) {
      size_t j = i + static_cast<size_t>(below(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::mt19937_64 eng_;
  uint64_t seed_base_;
};

// Fixed formatting for report files; reruns must be byte-identical, so all
// float output funnels through here.
std::string format_double(double v);

// FNV-1a over a string; used for config hashes embedded in outputs.
uint64_t fnv1a(const std::string& s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Minimal RFC-4180 CSV support (quoted fields, embedded commas/quotes/newlines).
std::string csv_escape(const std::string& field);
std::vector<std::vector<std::string>> csv_parse(const std::string& text);

// Same parse, with the 1-based file line each row starts on (quoted fields
// may span lines, so row index and line number can diverge).
struct CsvFile {
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> line_numbers;
};
CsvFile csv_parse_lines(const std::string& text);

}  // namespace newsrank
