#include "ecgsym/symbol_encoding.hpp"

#include <algorithm>
#include <numeric>

#include "ecgsym/errors.hpp"
#include "ecgsym/text_util.hpp"

namespace ecgsym {

namespace {

void require_slope_input(const Signal& input) {
  if (input.size() < 2) throw DataError("segment too short for slope encoding");
}

struct Range {
  double mean;
  double span;
};

Range mean_and_range(const Signal& input) {
  if (input.empty()) throw DataError("empty signal");
  const auto& x = input.samples;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  return {mean, *hi - *lo};
}

const char* alphabet_name(int alphabet_size) {
  return alphabet_size == 2 ? "binary" : "ternary";
}

}  // namespace

void EncoderSpec::validate() const {
  if (alphabet_size != 2 && alphabet_size != 3) {
    throw ConfigError("alphabet size must be 2 or 3");
  }
  if (method == EncodingMethod::slope) {
    if (deviation) throw ConfigError("slope encoding takes no deviation E");
    return;
  }
  if (!deviation) throw ConfigError("threshold encoding requires a deviation E");
  if (!(std::abs(*deviation) < 0.5)) throw ConfigError("deviation E must satisfy |E| < 1/2");
  if (alphabet_size == 3 && *deviation < 0.0) {
    throw ConfigError("ternary threshold requires non-negative E");
  }
}

std::string EncoderSpec::label() const {
  std::string out = method == EncodingMethod::slope ? "slope-" : "threshold-";
  out += alphabet_name(alphabet_size);
  if (deviation) out += " E=" + text::format_fraction(*deviation);
  return out;
}

EncoderSpec EncoderSpec::slope(int alphabet_size) {
  EncoderSpec spec{EncodingMethod::slope, alphabet_size, std::nullopt};
  spec.validate();
  return spec;
}

EncoderSpec EncoderSpec::threshold(int alphabet_size, double deviation) {
  EncoderSpec spec{EncodingMethod::threshold, alphabet_size, deviation};
  spec.validate();
  return spec;
}

EncoderSpec parse_encoder_spec(const std::string& text) {
  // Accept both "threshold ternary 1/12" and the label form "threshold-ternary E=1/12".
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), '-', ' ');
  // Restore minus signs that belong to numbers ("E= 1/10" -> "E=-1/10").
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    if (text[i] == '-' && (i == 0 || text[i - 1] == ' ' || text[i - 1] == '=')) {
      normalized[i] = '-';
    }
  }
  auto tokens = text::split_whitespace(normalized);
  if (tokens.size() < 2) throw ConfigError("bad encoder spec: '" + text + "'");

  EncoderSpec spec;
  const std::string method = text::lower(tokens[0]);
  if (method == "slope") {
    spec.method = EncodingMethod::slope;
  } else if (method == "threshold") {
    spec.method = EncodingMethod::threshold;
  } else {
    throw ConfigError("unknown encoding method '" + tokens[0] + "'");
  }

  const std::string alphabet = text::lower(tokens[1]);
  if (alphabet == "binary" || alphabet == "2") {
    spec.alphabet_size = 2;
  } else if (alphabet == "ternary" || alphabet == "3") {
    spec.alphabet_size = 3;
  } else {
    throw ConfigError("unknown alphabet '" + tokens[1] + "'");
  }

  if (tokens.size() >= 3) {
    std::string value = tokens[2];
    if (value.rfind("E=", 0) == 0 || value.rfind("e=", 0) == 0) value = value.substr(2);
    double e = 0.0;
    if (!text::parse_fraction(value, e)) throw ConfigError("bad deviation E '" + tokens[2] + "'");
    spec.deviation = e;
  }
  if (tokens.size() > 3) throw ConfigError("bad encoder spec: '" + text + "'");
  spec.validate();
  return spec;
}

int symbol_index(std::int8_t symbol, int alphabet_size) {
  return alphabet_size == 3 ? symbol + 1 : symbol;
}

SymbolSequence encode_slope_binary(const Signal& input, double zero_tol) {
  require_slope_input(input);
  const auto& y = input.samples;
  SymbolSequence out{std::vector<std::int8_t>(y.size() - 1), 2};
  for (std::size_t k = 0; k + 1 < y.size(); ++k) {
    const double slope = y[k + 1] - y[k];
    // Slopes inside the tolerance band count as zero, which maps to 1.
    out.symbols[k] = slope >= -zero_tol ? 1 : 0;
  }
  return out;
}

SymbolSequence encode_slope_ternary(const Signal& input, double zero_tol) {
  require_slope_input(input);
  const auto& y = input.samples;
  SymbolSequence out{std::vector<std::int8_t>(y.size() - 1), 3};
  for (std::size_t k = 0; k + 1 < y.size(); ++k) {
    const double slope = y[k + 1] - y[k];
    if (slope > zero_tol) {
      out.symbols[k] = 1;
    } else if (slope < -zero_tol) {
      out.symbols[k] = -1;
    } else {
      out.symbols[k] = 0;
    }
  }
  return out;
}

SymbolSequence encode_threshold_binary(const Signal& input, double deviation) {
  const auto [mean, span] = mean_and_range(input);
  const double threshold = mean + deviation * span;
  SymbolSequence out{std::vector<std::int8_t>(input.size()), 2};
  for (std::size_t k = 0; k < input.size(); ++k) {
    out.symbols[k] = input.samples[k] >= threshold ? 1 : 0;
  }
  return out;
}

SymbolSequence encode_threshold_ternary(const Signal& input, double deviation) {
  if (deviation < 0.0) throw ConfigError("ternary threshold requires non-negative E");
  const auto [mean, span] = mean_and_range(input);
  const double upper = mean + deviation * span;
  const double lower = mean - deviation * span;
  SymbolSequence out{std::vector<std::int8_t>(input.size()), 3};
  for (std::size_t k = 0; k < input.size(); ++k) {
    const double v = input.samples[k];
    out.symbols[k] = v > upper ? 1 : (v < lower ? -1 : 0);
  }
  return out;
}

SymbolSequence encode(const EncoderSpec& spec, const Signal& input, double zero_tol) {
  spec.validate();
  if (spec.method == EncodingMethod::slope) {
    return spec.alphabet_size == 2 ? encode_slope_binary(input, zero_tol)
                                   : encode_slope_ternary(input, zero_tol);
  }
  return spec.alphabet_size == 2 ? encode_threshold_binary(input, *spec.deviation)
                                 : encode_threshold_ternary(input, *spec.deviation);
}

}  // namespace ecgsym
