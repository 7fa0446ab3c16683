#include "ecgsym/class_distribution.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>

#include "ecgsym/errors.hpp"
#include "ecgsym/text_util.hpp"

namespace ecgsym {

namespace {

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

}  // namespace

std::size_t LabeledFeatureSet::total_size() const {
  std::size_t n = 0;
  for (const auto& c : classes) n += c.points.size();
  return n;
}

void LabeledFeatureSet::validate() const {
  if (classes.size() < 2) throw ConfigError("need at least two classes");
  const std::size_t dim = classes.front().points.empty() ? 0 : classes.front().points.front().size();
  for (const auto& c : classes) {
    if (c.points.empty()) throw DataError("empty class: " + c.name);
    for (const auto& p : c.points) {
      if (p.size() != dim || dim == 0) throw DataError("inconsistent feature dimension in class " + c.name);
    }
  }
}

std::size_t LabeledFeatureSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].name == name) return i;
  }
  return classes.size();
}

const char* to_string(QuantifierMode mode) {
  return mode == QuantifierMode::forall ? "forall" : "exists";
}

QuantifierMode parse_quantifier_mode(const std::string& text) {
  const auto t = text::lower(text);
  if (t == "forall") return QuantifierMode::forall;
  if (t == "exists") return QuantifierMode::exists;
  throw ConfigError("unknown quantifier mode '" + text + "' (expected forall or exists)");
}

Point centroid(std::span<const Point> points) {
  if (points.empty()) throw DataError("empty class");
  Point c(points.front().size(), 0.0);
  for (const auto& p : points) {
    if (p.size() != c.size()) throw DataError("inconsistent feature dimension");
    for (std::size_t d = 0; d < c.size(); ++d) c[d] += p[d];
  }
  for (double& v : c) v /= static_cast<double>(points.size());
  return c;
}

namespace {

std::size_t count_lambda(std::size_t target, const LabeledFeatureSet& dataset,
                         const std::vector<Point>& centroids, QuantifierMode mode) {
  std::size_t lambda = 0;
  for (const auto& e : dataset.classes[target].points) {
    const double own = squared_distance(e, centroids[target]);
    bool all = true;
    bool any = false;
    for (std::size_t h = 0; h < centroids.size(); ++h) {
      if (h == target) continue;
      const bool ge = own >= squared_distance(e, centroids[h]);
      all = all && ge;
      any = any || ge;
    }
    if (mode == QuantifierMode::forall ? all : any) ++lambda;
  }
  return lambda;
}

std::vector<Point> all_centroids(const LabeledFeatureSet& dataset) {
  std::vector<Point> out;
  out.reserve(dataset.classes.size());
  for (const auto& c : dataset.classes) out.push_back(centroid(c.points));
  return out;
}

// Mean of lambda_i / n_i over a common denominator, so equal class sizes
// give bit-for-bit the same value as sum(lambda) / N. Empty when the
// common denominator overflows.
std::optional<double> mean_ratio_exact(const std::vector<ClassDistribution>& classes) {
  std::uint64_t common = 1;
  for (const auto& c : classes) {
    const std::uint64_t step = c.size / std::gcd(common, static_cast<std::uint64_t>(c.size));
    if (__builtin_mul_overflow(common, step, &common)) return std::nullopt;
  }
  std::uint64_t denominator = 0;
  if (__builtin_mul_overflow(common, static_cast<std::uint64_t>(classes.size()), &denominator)) return std::nullopt;
  std::uint64_t numerator = 0;
  for (const auto& c : classes) numerator += c.lambda * (common / c.size);  // <= denominator
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace

std::size_t class_lambda(std::size_t target, const LabeledFeatureSet& dataset,
                         QuantifierMode mode) {
  dataset.validate();
  if (target >= dataset.classes.size()) throw ConfigError("class index out of range");
  return count_lambda(target, dataset, all_centroids(dataset), mode);
}

DistributionReport summarize(std::vector<ClassDistribution> classes, QuantifierMode mode) {
  if (classes.size() < 2) throw ConfigError("need at least two classes");
  DistributionReport report;
  report.mode = mode;
  std::size_t raw_sum = 0;
  double norm_sum = 0.0;
  for (auto& c : classes) {
    if (c.size == 0) throw DataError("empty class: " + c.name);
    if (c.lambda > c.size) throw DataError("lambda exceeds class size for " + c.name);
    c.lambda_norm = static_cast<double>(c.lambda) / static_cast<double>(c.size);
    report.total += c.size;
    raw_sum += c.lambda;
    norm_sum += c.lambda_norm;
  }
  report.lambda_d = static_cast<double>(raw_sum);
  report.lambda_dn = report.lambda_d / static_cast<double>(report.total);
  report.lambda_dp = mean_ratio_exact(classes).value_or(norm_sum / static_cast<double>(classes.size()));
  report.classes = std::move(classes);
  return report;
}

DistributionReport evaluate(const LabeledFeatureSet& dataset, QuantifierMode mode) {
  dataset.validate();
  const auto centroids = all_centroids(dataset);
  std::vector<ClassDistribution> per_class;
  per_class.reserve(dataset.classes.size());
  for (std::size_t i = 0; i < dataset.classes.size(); ++i) {
    per_class.push_back({dataset.classes[i].name, dataset.classes[i].points.size(),
                         count_lambda(i, dataset, centroids, mode), 0.0});
  }
  return summarize(std::move(per_class), mode);
}

void write_report(std::ostream& os, const DistributionReport& report) {
  using text::format_double;
  os << "mode = " << to_string(report.mode) << '\n'
     << "classes = " << report.classes.size() << '\n'
     << "total = " << report.total << '\n'
     << "lambda_d = " << format_double(report.lambda_d) << '\n'
     << "lambda_dn = " << format_double(report.lambda_dn) << '\n'
     << "lambda_dp = " << format_double(report.lambda_dp) << '\n'
     << '\n'
     << "class\tsize\tlambda\tlambda_norm\n";
  for (const auto& c : report.classes) {
    os << c.name << '\t' << c.size << '\t' << c.lambda << '\t' << format_double(c.lambda_norm)
       << '\n';
  }
}

}  // namespace ecgsym
