#pragma once

#include <cstddef>

#include "ecgsym/symbol_encoding.hpp"

namespace ecgsym {

// A point in the entropy-complexity plane.
struct FeatureVector {
  double h_norm = 0.0;
  double c_norm = 0.0;
};

// Shannon entropy in bits over the declared alphabet; 0 log 0 = 0.
double shannon_entropy(const SymbolSequence& seq);
// Entropy divided by log2(alphabet_size).
double shannon_entropy_normalized(const SymbolSequence& seq);

// Lempel-Ziv (1976) production complexity: number of phrases in the
// exhaustive history of the sequence, a trailing incomplete phrase included.
std::size_t lz_complexity(const SymbolSequence& seq);
// c(s) * log_alpha(n) / n.
double lz_normalized(const SymbolSequence& seq);

// 2 (1 + log_a(log_a(a n))) / log_a(n)
double epsilon_n(int alphabet_size, std::size_t n);
// Left-hand side of the validity condition, epsilon_n / 2; valid when < 1/2.
double validity_ratio(int alphabet_size, std::size_t n);
// Smallest n >= 2 with validity_ratio(alpha, n) < 1/2 (361 binary, 366 ternary).
std::size_t min_valid_length(int alphabet_size);

enum class ValidityCheck { enforce, skip };

// Throws DataError when the sequence is shorter than min_valid_length and
// the check is enforced.
FeatureVector extract_features(const SymbolSequence& seq,
                               ValidityCheck check = ValidityCheck::enforce);

}  // namespace ecgsym
