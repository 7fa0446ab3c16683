#include "ecgsym/dsp_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ecgsym/errors.hpp"

namespace ecgsym {

namespace {

std::size_t degree_of(const std::vector<double>& poly) {
  for (std::size_t i = poly.size(); i-- > 0;) {
    if (poly[i] != 0.0) return i;
  }
  return 0;
}

// Polynomial in z^-1 evaluated at z = e^{j omega}.
std::complex<double> evaluate_poly(const std::vector<double>& poly, double omega) {
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    if (poly[k] == 0.0) continue;
    acc += poly[k] * std::polar(1.0, -omega * static_cast<double>(k));
  }
  return acc;
}

double abs_sum(const std::vector<double>& poly) {
  double s = 0.0;
  for (double v : poly) s += std::abs(v);
  return s;
}

// Both polynomials must be clearly nonzero for the phase to exist.
std::complex<double> checked_response(const FilterCoefficients& c, double omega) {
  constexpr double kRelativeFloor = 1e-12;
  const auto num = evaluate_poly(c.numerator(), omega);
  const auto den = evaluate_poly(c.denominator(), omega);
  if (std::abs(num) <= kRelativeFloor * abs_sum(c.numerator()) ||
      std::abs(den) <= kRelativeFloor * abs_sum(c.denominator())) {
    throw DataError("phase undefined at omega");
  }
  return num / den;
}

std::size_t delay_at_center(const FilterCoefficients& coeffs) {
  const double tau = group_delay(coeffs, passband_center(coeffs));
  return tau > 0.0 ? static_cast<std::size_t>(std::lround(tau)) : 0;
}

}  // namespace

FilterCoefficients::FilterCoefficients(std::vector<double> numerator,
                                       std::vector<double> denominator)
    : numerator_(std::move(numerator)), denominator_(std::move(denominator)) {
  if (numerator_.empty() || denominator_.empty()) {
    throw ConfigError("filter coefficients must be non-empty");
  }
  const double a0 = denominator_.front();
  if (a0 == 0.0 || !std::isfinite(a0)) {
    throw ConfigError("leading denominator coefficient must be nonzero");
  }
  if (a0 != 1.0) {
    for (double& v : numerator_) v /= a0;
    for (double& v : denominator_) v /= a0;
  }
}

std::size_t FilterCoefficients::numerator_degree() const { return degree_of(numerator_); }
std::size_t FilterCoefficients::denominator_degree() const { return degree_of(denominator_); }
std::size_t FilterCoefficients::order() const {
  return std::max(numerator_degree(), denominator_degree());
}

FilterCoefficients make_lowpass() {
  std::vector<double> b(13, 0.0);
  b[0] = 1.0;
  b[6] = -2.0;
  b[12] = 1.0;
  return {std::move(b), {36.0, -72.0, 36.0}};
}

FilterCoefficients make_highpass() {
  std::vector<double> b(33, 0.0);
  b[0] = -1.0;
  b[16] = 32.0;
  b[17] = -32.0;
  b[32] = 1.0;
  return {std::move(b), {32.0, -32.0}};
}

FilterCoefficients make_bandpass() {
  // (1 - 2z^-6 + z^-12)(-1 + 32z^-16 - 32z^-17 + z^-32), integer coefficients.
  const std::vector<double> lp{1, 0, 0, 0, 0, 0, -2, 0, 0, 0, 0, 0, 1};
  std::vector<double> hp(33, 0.0);
  hp[0] = -1.0;
  hp[16] = 32.0;
  hp[17] = -32.0;
  hp[32] = 1.0;
  std::vector<double> b(lp.size() + hp.size() - 1, 0.0);
  for (std::size_t i = 0; i < lp.size(); ++i) {
    for (std::size_t j = 0; j < hp.size(); ++j) b[i + j] += lp[i] * hp[j];
  }
  return {std::move(b), {1152.0, -3456.0, 3456.0, -1152.0}};
}

Signal apply_filter(const FilterCoefficients& coeffs, const Signal& input) {
  if (input.empty()) throw DataError("empty signal");
  const auto& b = coeffs.numerator();
  const auto& a = coeffs.denominator();
  const auto& x = input.samples;
  const std::size_t n = x.size();

  Signal out{std::vector<double>(n, 0.0), input.sample_rate};
  auto& y = out.samples;
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    const std::size_t nb = std::min(b.size(), k + 1);
    for (std::size_t i = 0; i < nb; ++i) acc += b[i] * x[k - i];
    const std::size_t na = std::min(a.size(), k + 1);
    for (std::size_t j = 1; j < na; ++j) acc -= a[j] * y[k - j];
    y[k] = acc;
  }
  return out;
}

std::complex<double> frequency_response(const FilterCoefficients& coeffs, double omega) {
  return evaluate_poly(coeffs.numerator(), omega) / evaluate_poly(coeffs.denominator(), omega);
}

double group_delay(const FilterCoefficients& coeffs, double omega) {
  if (!(omega > 0.0 && omega < std::numbers::pi)) {
    throw ConfigError("group delay requires 0 < omega < pi");
  }
  const double h = kGroupDelayStep;
  const double lo = std::max(omega - h, 0.5 * omega);
  const double hi = std::min(omega + h, 0.5 * (omega + std::numbers::pi));
  checked_response(coeffs, omega);
  // arg(H(hi) / H(lo)) is the phase increment already unwrapped into (-pi, pi].
  const double dphase = std::arg(checked_response(coeffs, hi) / checked_response(coeffs, lo));
  return -dphase / (hi - lo);
}

double passband_center(const FilterCoefficients& coeffs, std::size_t grid_points) {
  if (grid_points == 0) throw ConfigError("passband search needs at least one grid point");
  double best_omega = 0.0;
  double best_mag = -1.0;
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double omega = std::numbers::pi * (static_cast<double>(k) + 0.5) /
                         static_cast<double>(grid_points);
    const double mag = std::abs(frequency_response(coeffs, omega));
    if (std::isfinite(mag) && mag > best_mag) {
      best_mag = mag;
      best_omega = omega;
    }
  }
  return best_omega;
}

PaddingPlan default_padding(const FilterCoefficients& coeffs, std::size_t margin) {
  const double tau = group_delay(coeffs, passband_center(coeffs));
  const std::size_t tau_ceil = tau > 0.0 ? static_cast<std::size_t>(std::ceil(tau)) : 0;
  const std::size_t taps = std::max(coeffs.numerator_degree(), coeffs.denominator_degree()) + 1;
  const std::size_t pad = std::max(taps, tau_ceil) + margin;
  return {pad, pad, tau > 0.0 ? static_cast<std::size_t>(std::lround(tau)) : 0};
}

PaddingPlan padding_with_lengths(const FilterCoefficients& coeffs, std::size_t leading,
                                 std::size_t trailing) {
  return {leading, trailing, delay_at_center(coeffs)};
}

Signal filter_compensated(const FilterCoefficients& coeffs, const Signal& input,
                          const PaddingPlan& plan) {
  if (input.empty()) throw DataError("empty signal");
  if (plan.leading < coeffs.order() || plan.trailing < plan.delay) {
    throw ConfigError("insufficient padding");
  }
  const auto& x = input.samples;
  Signal padded{{}, input.sample_rate};
  padded.samples.reserve(plan.leading + x.size() + plan.trailing);
  padded.samples.insert(padded.samples.end(), plan.leading, x.front());
  padded.samples.insert(padded.samples.end(), x.begin(), x.end());
  padded.samples.insert(padded.samples.end(), plan.trailing, x.back());

  const Signal filtered = apply_filter(coeffs, padded);
  const auto first = filtered.samples.begin() +
                     static_cast<std::ptrdiff_t>(plan.leading + plan.delay);
  return {std::vector<double>(first, first + static_cast<std::ptrdiff_t>(x.size())),
          input.sample_rate};
}

}  // namespace ecgsym
