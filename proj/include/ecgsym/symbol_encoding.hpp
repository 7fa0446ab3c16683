#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecgsym/signal.hpp"

namespace ecgsym {

enum class EncodingMethod { slope, threshold };

// One symbolization scheme: slope or threshold, binary or ternary.
// `deviation` (E) is the threshold offset as a fraction of the segment's
// peak-to-peak range; it is required for threshold methods and must be
// absent for slope methods.
struct EncoderSpec {
  EncodingMethod method = EncodingMethod::slope;
  int alphabet_size = 2;
  std::optional<double> deviation;

  // Throws ConfigError when the combination is invalid.
  void validate() const;

  // Stable human-readable name, e.g. "slope-binary" or "threshold-ternary E=1/12".
  std::string label() const;

  static EncoderSpec slope(int alphabet_size);
  static EncoderSpec threshold(int alphabet_size, double deviation);
};

// Parses "slope binary", "threshold ternary 1/12", "threshold 2 -0.05", ...
EncoderSpec parse_encoder_spec(const std::string& text);

// Symbols are 0/1 for binary and -1/0/1 for ternary sequences.
struct SymbolSequence {
  std::vector<std::int8_t> symbols;
  int alphabet_size = 2;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
};

// Dense index of a symbol inside its alphabet: binary s -> s, ternary s -> s + 1.
int symbol_index(std::int8_t symbol, int alphabet_size);

SymbolSequence encode_slope_binary(const Signal& input, double zero_tol = 0.0);
SymbolSequence encode_slope_ternary(const Signal& input, double zero_tol = 0.0);
SymbolSequence encode_threshold_binary(const Signal& input, double deviation);
SymbolSequence encode_threshold_ternary(const Signal& input, double deviation);

// Dispatch on spec; zero_tol only affects slope methods.
SymbolSequence encode(const EncoderSpec& spec, const Signal& input, double zero_tol = 0.0);

}  // namespace ecgsym
