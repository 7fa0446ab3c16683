#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ecgsym/class_distribution.hpp"
#include "ecgsym/nonlinear_features.hpp"
#include "ecgsym/record_ingestion.hpp"
#include "ecgsym/symbol_encoding.hpp"

namespace ecgsym {

inline constexpr std::size_t kDefaultPadding = 65;

// slope binary, slope ternary, threshold binary at E in {-1/10, -1/20, 1/20, 1/10},
// threshold ternary at E in {1/8, 1/10, 1/12, 1/14, 1/16, 1/20}.
std::vector<EncoderSpec> default_grid();

// One encoder per line in parse_encoder_spec syntax; '#' starts a comment.
std::vector<EncoderSpec> parse_grid(const std::string& text);
std::vector<EncoderSpec> read_grid(const std::filesystem::path& path);

struct ExperimentConfig {
  // Input: records plus a label sidecar, or a segments file from `ingest`.
  std::vector<std::filesystem::path> records;
  std::filesystem::path labels;
  std::filesystem::path segments;
  RecordOptions record_options;
  // Binary records hold several leads; the lead must be chosen explicitly.
  bool channel_given = false;

  std::size_t segment_length = 720;
  std::size_t stride = 720;
  bool filter = true;
  std::size_t pad_before = kDefaultPadding;
  std::size_t pad_after = kDefaultPadding;
  double zero_tol = 0.0;
  std::vector<EncoderSpec> grid = default_grid();
  QuantifierMode mode = QuantifierMode::forall;
  ValidityCheck validity = ValidityCheck::enforce;
  // Required classes, in report order. Empty: classes in order of first appearance.
  std::vector<std::string> classes;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;

  void validate() const;
};

// Flat "key = value" document. Relative paths resolve against `base_dir`.
// Keys: records (comma separated), labels, segments, channel, signal_count,
// sample_rate, delimiter, header, segment_length, stride, filter, pad_before,
// pad_after, zero_tol, grid, mode, validity, classes, seed, out.
ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct SegmentFeature {
  std::string label;
  std::string record_id;
  std::size_t start = 0;
  FeatureVector features;
};

struct EncoderResult {
  EncoderSpec spec;
  DistributionReport report;
  std::vector<SegmentFeature> features;  // in segment order
};

struct ExperimentResult {
  std::vector<std::string> class_order;
  std::vector<EncoderResult> encoders;    // in grid order
  std::vector<std::size_t> ranking;       // encoder indices, ascending lambda_dn, ties by grid order
  std::size_t excluded = 0;               // segments whose label is not a configured class
  std::size_t best() const { return ranking.front(); }
};

// Band-pass filtering with edge-replica compensation (or a pass-through
// copy when filtering is disabled).
std::vector<Signal> preprocess(const ExperimentConfig& config, const LabeledSegments& segments);

ExperimentResult run_experiment(const ExperimentConfig& config, const LabeledSegments& segments);
// Ingests from config.records/labels or config.segments first.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Groups one encoder's features by class, restricted to `classes`
// (all classes when empty).
LabeledFeatureSet group_features(const EncoderResult& encoder,
                                 const std::vector<std::string>& class_order,
                                 const std::vector<std::string>& classes = {});

struct PairwiseRow {
  std::string first;
  std::string second;
  std::size_t encoder = 0;
  std::string encoder_label;
  double lambda_dn = 0.0;
  double lambda_dp = 0.0;
};

std::vector<std::pair<std::string, std::string>> all_pairs(const std::vector<std::string>& classes);

// Best encoder (minimum lambda_dn over the two-class restriction) for each pair.
std::vector<PairwiseRow> pairwise_table(
    const ExperimentResult& result,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    QuantifierMode mode = QuantifierMode::forall);

struct ClusterSpec {
  std::vector<Point> centers;     // one per class
  std::vector<std::size_t> sizes; // one per class, or a single shared size
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::string> names; // optional; defaults to C1..Cm
};

// Isotropic Gaussian clusters; deterministic for a fixed seed.
LabeledFeatureSet make_clusters(const ClusterSpec& spec);

// Turns 2-D parameter points (frequency in Hz, noise level) into labeled
// sinusoid-plus-noise segments, one per point.
LabeledSegments synthesize_segments(const LabeledFeatureSet& parameters, std::size_t length,
                                    double sample_rate, std::uint64_t seed);

// Rows "label<TAB>x1<TAB>x2..." with a header line.
void write_feature_table(std::ostream& os, const LabeledFeatureSet& set);
LabeledFeatureSet read_feature_table(const std::filesystem::path& path);

// scatter_<k>_<encoder>.tsv, report_<k>_<encoder>.txt and summary.tsv under out_dir.
void emit_plot_data(const ExperimentResult& result, const std::filesystem::path& out_dir);
void write_summary(std::ostream& os, const ExperimentResult& result);
void write_pairwise_table(std::ostream& os, const std::vector<PairwiseRow>& rows);

}  // namespace ecgsym
