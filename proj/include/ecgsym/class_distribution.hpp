#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ecgsym/nonlinear_features.hpp"

namespace ecgsym {

// Feature-space point of any fixed dimension (2-D for (h_norm, c_norm)).
using Point = std::vector<double>;

inline Point to_point(const FeatureVector& f) { return {f.h_norm, f.c_norm}; }

struct FeatureClass {
  std::string name;
  std::vector<Point> points;
};

struct LabeledFeatureSet {
  std::vector<FeatureClass> classes;

  std::size_t total_size() const;
  // Throws DataError on an empty class or mismatched dimensions, and
  // ConfigError when fewer than two classes are present.
  void validate() const;
  // Index of the class called `name`, or classes.size() when absent.
  std::size_t find(const std::string& name) const;
};

// forall: the element is at least as far from its own centroid as from every
// other centroid. exists: ... as from some other centroid.
enum class QuantifierMode { forall, exists };

const char* to_string(QuantifierMode mode);
QuantifierMode parse_quantifier_mode(const std::string& text);

Point centroid(std::span<const Point> points);

// Number of elements of class `target` that are no closer to their own
// centroid than to the other centroids (per `mode`).
std::size_t class_lambda(std::size_t target, const LabeledFeatureSet& dataset,
                         QuantifierMode mode = QuantifierMode::forall);

struct ClassDistribution {
  std::string name;
  std::size_t size = 0;      // n_i
  std::size_t lambda = 0;    // raw count
  double lambda_norm = 0.0;  // lambda / n_i
};

struct DistributionReport {
  QuantifierMode mode = QuantifierMode::forall;
  std::vector<ClassDistribution> classes;
  std::size_t total = 0;    // N
  double lambda_d = 0.0;    // sum of raw counts
  double lambda_dn = 0.0;   // lambda_d / N
  double lambda_dp = 0.0;   // mean of per-class lambda_norm
};

// Aggregates per-class counts. Each entry needs name, size and lambda; the
// normalized fields are filled in.
DistributionReport summarize(std::vector<ClassDistribution> classes,
                             QuantifierMode mode = QuantifierMode::forall);

DistributionReport evaluate(const LabeledFeatureSet& dataset,
                            QuantifierMode mode = QuantifierMode::forall);

// Key/value header followed by a tab-separated per-class table.
void write_report(std::ostream& os, const DistributionReport& report);

}  // namespace ecgsym
