#include "ecgsym/nonlinear_features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ecgsym/errors.hpp"

namespace ecgsym {

namespace {

void require_non_empty(const SymbolSequence& seq) {
  if (seq.empty()) throw DataError("empty sequence");
}

void require_alphabet(int alphabet_size) {
  if (alphabet_size < 2) throw ConfigError("alphabet size must be at least 2");
}

double log_base(double x, double base) { return std::log(x) / std::log(base); }

}  // namespace

double shannon_entropy(const SymbolSequence& seq) {
  require_non_empty(seq);
  require_alphabet(seq.alphabet_size);
  std::array<std::size_t, 3> counts{};
  for (const auto s : seq.symbols) {
    const int idx = symbol_index(s, seq.alphabet_size);
    if (idx < 0 || idx >= seq.alphabet_size) throw DataError("symbol outside declared alphabet");
    ++counts[static_cast<std::size_t>(idx)];
  }
  const double n = static_cast<double>(seq.size());
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double shannon_entropy_normalized(const SymbolSequence& seq) {
  return shannon_entropy(seq) / std::log2(static_cast<double>(seq.alphabet_size));
}

std::size_t lz_complexity(const SymbolSequence& seq) {
  require_non_empty(seq);
  // Kaspar & Schuster scan. `prefix_end` is the length of the part already
  // parsed; the current phrase starts there and is matched against every
  // earlier start `i`.
  const auto& s = seq.symbols;
  const std::size_t n = s.size();
  if (n == 1) return 1;

  std::size_t complexity = 1;
  std::size_t prefix_end = 1;
  std::size_t i = 0;
  std::size_t k = 1;
  std::size_t k_max = 1;
  while (true) {
    if (s[i + k - 1] == s[prefix_end + k - 1]) {
      ++k;
      if (prefix_end + k > n) {
        ++complexity;
        break;
      }
    } else {
      k_max = std::max(k, k_max);
      ++i;
      if (i == prefix_end) {
        ++complexity;
        prefix_end += k_max;
        if (prefix_end + 1 > n) break;
        i = 0;
        k = 1;
        k_max = 1;
      } else {
        k = 1;
      }
    }
  }
  return complexity;
}

double lz_normalized(const SymbolSequence& seq) {
  require_alphabet(seq.alphabet_size);
  if (seq.size() < 2) throw DataError("sequence too short to normalize");
  const double n = static_cast<double>(seq.size());
  return static_cast<double>(lz_complexity(seq)) * log_base(n, seq.alphabet_size) / n;
}

double validity_ratio(int alphabet_size, std::size_t n) {
  require_alphabet(alphabet_size);
  if (n < 2) throw ConfigError("validity bound requires n >= 2");
  const double a = alphabet_size;
  const double len = static_cast<double>(n);
  return (1.0 + log_base(log_base(a * len, a), a)) / log_base(len, a);
}

double epsilon_n(int alphabet_size, std::size_t n) { return 2.0 * validity_ratio(alphabet_size, n); }

std::size_t min_valid_length(int alphabet_size) {
  if (alphabet_size != 2 && alphabet_size != 3) {
    throw ConfigError("min_valid_length supports alphabet sizes 2 and 3");
  }
  std::size_t n = 2;
  while (!(validity_ratio(alphabet_size, n) < 0.5)) ++n;
  return n;
}

FeatureVector extract_features(const SymbolSequence& seq, ValidityCheck check) {
  require_non_empty(seq);
  if (check == ValidityCheck::enforce) {
    const std::size_t bound = min_valid_length(seq.alphabet_size);
    if (seq.size() < bound) {
      throw DataError("segment below complexity validity length: " + std::to_string(seq.size()) +
                      " < " + std::to_string(bound));
    }
  }
  return {shannon_entropy_normalized(seq), lz_normalized(seq)};
}

}  // namespace ecgsym
