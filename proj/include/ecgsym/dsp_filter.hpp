#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ecgsym/signal.hpp"

namespace ecgsym {

// Rational transfer function b(z)/a(z) in powers of z^-1. The constructor
// normalizes both polynomials so that denominator()[0] == 1.
class FilterCoefficients {
 public:
  FilterCoefficients(std::vector<double> numerator, std::vector<double> denominator);

  const std::vector<double>& numerator() const { return numerator_; }
  const std::vector<double>& denominator() const { return denominator_; }

  // Highest lag with a nonzero coefficient in either polynomial, max(M, N).
  std::size_t order() const;
  std::size_t numerator_degree() const;
  std::size_t denominator_degree() const;

 private:
  std::vector<double> numerator_;
  std::vector<double> denominator_;
};

// Edge-replica padding used by filter_compensated. `delay` is the offset
// (beyond `leading`) at which the aligned output window starts.
struct PaddingPlan {
  std::size_t leading = 0;
  std::size_t trailing = 0;
  std::size_t delay = 0;
};

// (1 - 2z^-6 + z^-12) / (36 - 72z^-1 + 36z^-2)
FilterCoefficients make_lowpass();
// (-1 + 32z^-16 - 32z^-17 + z^-32) / (32 - 32z^-1)
FilterCoefficients make_highpass();
// Product of the two above, expanded: degree-44 numerator over 1152(1 - z^-1)^3.
FilterCoefficients make_bandpass();

// Direct-form I recurrence with zero initial conditions:
//   y[n] = sum_i b_i x[n-i] - sum_{j>=1} a_j y[n-j]
// Output has the same length as the input. Throws DataError on empty input.
Signal apply_filter(const FilterCoefficients& coeffs, const Signal& input);

std::complex<double> frequency_response(const FilterCoefficients& coeffs, double omega);

// Group delay -d(arg H)/d(omega) in samples, by central difference of the
// unwrapped phase. omega in radians/sample, 0 < omega < pi.
double group_delay(const FilterCoefficients& coeffs, double omega);

inline constexpr double kGroupDelayStep = 1e-4;

// Frequency (radians/sample) of the magnitude peak on a uniform grid over (0, pi).
double passband_center(const FilterCoefficients& coeffs, std::size_t grid_points = 4096);

// Default plan: leading = trailing = max(M+1, N+1, ceil(tau)) + margin, with
// delay = round(tau) at the passband center. For make_bandpass() this is 65/65/21.
PaddingPlan default_padding(const FilterCoefficients& coeffs, std::size_t margin = 20);

// Same as above but with explicit pad lengths; only the delay is derived.
PaddingPlan padding_with_lengths(const FilterCoefficients& coeffs, std::size_t leading,
                                 std::size_t trailing);

// Pads with replicas of the first/last sample, filters, and extracts the
// window of input length starting at leading + delay. Throws ConfigError
// ("insufficient padding") when leading < order() or trailing < delay.
Signal filter_compensated(const FilterCoefficients& coeffs, const Signal& input,
                          const PaddingPlan& plan);

}  // namespace ecgsym
