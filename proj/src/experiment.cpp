#include "ecgsym/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include "ecgsym/dsp_filter.hpp"
#include "ecgsym/errors.hpp"
#include "ecgsym/text_util.hpp"

namespace ecgsym {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t symbols_emitted(const EncoderSpec& spec, std::size_t samples) {
  return spec.method == EncodingMethod::slope && samples > 0 ? samples - 1 : samples;
}

std::string slug(const std::string& label) {
  std::string out;
  for (std::size_t i = 0; i < label.size(); ++i) {
    const char c = label[i];
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += c;
    } else if (c == '-' && i > 0 && label[i - 1] == '=') {
      out += 'm';  // E=-1/10 -> E_m1_10
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const auto v = text::lower(value);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t n = 0;
  if (!text::parse_size(value, n)) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
  return n;
}

double parse_real(const std::string& key, const std::string& value) {
  double x = 0.0;
  if (!text::parse_fraction(value, x)) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
  return x;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::vector<std::string> class_order_of(const ExperimentConfig& config,
                                        const LabeledSegments& segments) {
  if (!config.classes.empty()) return config.classes;
  std::vector<std::string> order;
  for (const auto& s : segments.segments) {
    if (std::find(order.begin(), order.end(), s.label) == order.end()) order.push_back(s.label);
  }
  return order;
}

EncoderResult run_encoder(const EncoderSpec& spec, const ExperimentConfig& config,
                          const LabeledSegments& segments, const std::vector<Signal>& signals,
                          const std::vector<std::string>& class_order) {
  EncoderResult result{spec, {}, {}};
  result.features.reserve(signals.size());
  for (std::size_t i = 0; i < signals.size(); ++i) {
    const auto& seg = segments.segments[i];
    if (std::find(class_order.begin(), class_order.end(), seg.label) == class_order.end()) continue;
    const auto symbols = encode(spec, signals[i], config.zero_tol);
    result.features.push_back(
        {seg.label, seg.record_id, seg.start, extract_features(symbols, config.validity)});
  }
  result.report = evaluate(group_features(result, class_order), config.mode);
  return result;
}

}  // namespace

std::vector<EncoderSpec> default_grid() {
  std::vector<EncoderSpec> grid{EncoderSpec::slope(2), EncoderSpec::slope(3)};
  for (double e : {-1.0 / 10, -1.0 / 20, 1.0 / 20, 1.0 / 10}) {
    grid.push_back(EncoderSpec::threshold(2, e));
  }
  for (double e : {1.0 / 8, 1.0 / 10, 1.0 / 12, 1.0 / 14, 1.0 / 16, 1.0 / 20}) {
    grid.push_back(EncoderSpec::threshold(3, e));
  }
  return grid;
}

std::vector<EncoderSpec> parse_grid(const std::string& text) {
  std::vector<EncoderSpec> grid;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    const auto t = text::trim(std::string_view(line).substr(0, hash));
    if (t.empty()) continue;
    grid.push_back(parse_encoder_spec(std::string(t)));
  }
  if (grid.empty()) throw ConfigError("encoder grid is empty");
  return grid;
}

std::vector<EncoderSpec> read_grid(const fs::path& path) { return parse_grid(read_text(path)); }

void ExperimentConfig::validate() const {
  if (grid.empty()) throw ConfigError("encoder grid is empty");
  for (const auto& spec : grid) spec.validate();
  if (segment_length == 0 || stride == 0) throw ConfigError("segment length and stride must be positive");
  if (records.empty() == segments.empty()) {
    throw ConfigError("give either records (with a label sidecar) or a segments file");
  }
  if (!records.empty() && labels.empty()) throw ConfigError("records need a label sidecar");
  for (const auto& r : records) {
    const auto ext = text::lower(r.extension().string());
    if ((ext == ".hea" || ext == ".dat") && !channel_given) {
      throw ConfigError("binary record " + r.filename().string() + " needs an explicit channel index");
    }
  }
  if (!classes.empty() && classes.size() < 2) throw ConfigError("need at least two classes");
  if (filter) {
    const auto bp = make_bandpass();
    if (pad_before < bp.order()) throw ConfigError("insufficient padding");
  }
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto hash = line.find('#');
    const auto t = text::trim(std::string_view(line).substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(row) + ": expected key = value");
    }
    const std::string key = text::lower(text::trim(t.substr(0, eq)));
    const std::string value(text::trim(t.substr(eq + 1)));

    if (key == "records") {
      config.records.clear();
      for (const auto& p : text::split(value, ',')) {
        if (!p.empty()) config.records.push_back(resolve(base_dir, p));
      }
    } else if (key == "labels") {
      config.labels = resolve(base_dir, value);
    } else if (key == "segments") {
      config.segments = resolve(base_dir, value);
    } else if (key == "channel") {
      config.record_options.channel = parse_count(key, value);
      config.channel_given = true;
    } else if (key == "signal_count") {
      config.record_options.signal_count = parse_count(key, value);
    } else if (key == "sample_rate") {
      config.record_options.text.sample_rate = parse_real(key, value);
    } else if (key == "delimiter") {
      config.record_options.text.delimiter = value == "tab" ? '\t' : (value == "space" ? ' ' : value.at(0));
    } else if (key == "header") {
      config.record_options.text.header = parse_bool(key, value);
    } else if (key == "segment_length") {
      config.segment_length = parse_count(key, value);
    } else if (key == "stride") {
      config.stride = parse_count(key, value);
    } else if (key == "filter") {
      config.filter = parse_bool(key, value);
    } else if (key == "pad_before") {
      config.pad_before = parse_count(key, value);
    } else if (key == "pad_after") {
      config.pad_after = parse_count(key, value);
    } else if (key == "zero_tol") {
      config.zero_tol = parse_real(key, value);
    } else if (key == "grid") {
      config.grid = read_grid(resolve(base_dir, value));
    } else if (key == "mode") {
      config.mode = parse_quantifier_mode(value);
    } else if (key == "validity") {
      const auto v = text::lower(value);
      if (v == "enforce" || v == "skip") {
        config.validity = v == "enforce" ? ValidityCheck::enforce : ValidityCheck::skip;
      } else {
        config.validity = parse_bool(key, value) ? ValidityCheck::enforce : ValidityCheck::skip;
      }
    } else if (key == "classes") {
      config.classes.clear();
      for (const auto& c : text::split(value, ',')) {
        if (!c.empty()) config.classes.push_back(c);
      }
    } else if (key == "seed") {
      config.seed = parse_count(key, value);
    } else if (key == "out") {
      config.out_dir = resolve(base_dir, value);
    } else {
      throw ConfigError("config line " + std::to_string(row) + ": unknown key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig load_config(const fs::path& path) {
  return parse_config(read_text(path), path.parent_path());
}

std::vector<Signal> preprocess(const ExperimentConfig& config, const LabeledSegments& segments) {
  std::vector<Signal> out;
  out.reserve(segments.segments.size());
  if (!config.filter) {
    for (const auto& s : segments.segments) out.push_back(s.segment);
    return out;
  }
  const auto bp = make_bandpass();
  const auto plan = padding_with_lengths(bp, config.pad_before, config.pad_after);
  for (const auto& s : segments.segments) out.push_back(filter_compensated(bp, s.segment, plan));
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const LabeledSegments& segments) {
  config.validate();
  ExperimentResult result;
  result.class_order = class_order_of(config, segments);
  if (result.class_order.size() < 2) throw DataError("need at least two classes");
  for (const auto& name : result.class_order) {
    const bool present = std::any_of(segments.segments.begin(), segments.segments.end(),
                                     [&](const LabeledSegment& s) { return s.label == name; });
    if (!present) throw DataError("class " + name + " has no segments");
  }
  for (const auto& s : segments.segments) {
    const auto& order = result.class_order;
    if (std::find(order.begin(), order.end(), s.label) == order.end()) ++result.excluded;
  }

  for (const auto& spec : config.grid) {
    if (config.validity == ValidityCheck::skip) break;
    const std::size_t bound = min_valid_length(spec.alphabet_size);
    for (const auto& s : segments.segments) {
      const std::size_t n = symbols_emitted(spec, s.segment.size());
      if (n < bound) {
        throw DataError("encoder " + spec.label() + " yields " + std::to_string(n) +
                        " symbols per segment, below the complexity validity bound of " +
                        std::to_string(bound));
      }
    }
  }

  const auto signals = preprocess(config, segments);

  // Encoders are independent; results are collected in grid order.
  std::vector<std::future<EncoderResult>> jobs;
  jobs.reserve(config.grid.size());
  for (const auto& spec : config.grid) {
    jobs.push_back(std::async(std::launch::async, [&, spec] {
      return run_encoder(spec, config, segments, signals, result.class_order);
    }));
  }
  for (auto& job : jobs) result.encoders.push_back(job.get());

  result.ranking.resize(result.encoders.size());
  for (std::size_t i = 0; i < result.ranking.size(); ++i) result.ranking[i] = i;
  std::stable_sort(result.ranking.begin(), result.ranking.end(), [&](std::size_t a, std::size_t b) {
    return result.encoders[a].report.lambda_dn < result.encoders[b].report.lambda_dn;
  });
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  LabeledSegments segments;
  if (!config.segments.empty()) {
    segments = read_segments(config.segments, config.record_options.text.sample_rate);
  } else {
    segments = load_labeled_segments(config.records, config.labels, config.record_options,
                                     config.segment_length, config.stride);
  }
  return run_experiment(config, segments);
}

LabeledFeatureSet group_features(const EncoderResult& encoder,
                                 const std::vector<std::string>& class_order,
                                 const std::vector<std::string>& classes) {
  const auto& wanted = classes.empty() ? class_order : classes;
  LabeledFeatureSet set;
  for (const auto& name : wanted) set.classes.push_back({name, {}});
  for (const auto& f : encoder.features) {
    const auto it = std::find(wanted.begin(), wanted.end(), f.label);
    if (it == wanted.end()) continue;
    set.classes[static_cast<std::size_t>(it - wanted.begin())].points.push_back(to_point(f.features));
  }
  for (const auto& c : set.classes) {
    if (c.points.empty()) throw DataError("class " + c.name + " has no segments");
  }
  return set;
}

std::vector<std::pair<std::string, std::string>> all_pairs(const std::vector<std::string>& classes) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) pairs.emplace_back(classes[i], classes[j]);
  }
  return pairs;
}

std::vector<PairwiseRow> pairwise_table(
    const ExperimentResult& result,
    const std::vector<std::pair<std::string, std::string>>& pairs, QuantifierMode mode) {
  if (result.encoders.empty()) throw ConfigError("encoder grid is empty");
  const auto& known = result.class_order;
  std::vector<PairwiseRow> rows;
  for (const auto& [a, b] : pairs) {
    for (const auto& name : {a, b}) {
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ConfigError("unknown class name: " + name);
      }
    }
    if (a == b) throw ConfigError("pair needs two different classes: " + a);
    PairwiseRow best;
    bool have = false;
    for (std::size_t k = 0; k < result.encoders.size(); ++k) {
      const auto report = evaluate(group_features(result.encoders[k], known, {a, b}), mode);
      if (!have || report.lambda_dn < best.lambda_dn) {
        best = {a, b, k, result.encoders[k].spec.label(), report.lambda_dn, report.lambda_dp};
        have = true;
      }
    }
    rows.push_back(std::move(best));
  }
  return rows;
}

LabeledFeatureSet make_clusters(const ClusterSpec& spec) {
  const std::size_t m = spec.centers.size();
  if (m < 2) throw ConfigError("need at least two cluster centers");
  if (!(spec.sigma >= 0.0)) throw ConfigError("cluster spread must be non-negative");
  if (spec.sizes.size() != 1 && spec.sizes.size() != m) {
    throw ConfigError("give one cluster size or one per center");
  }
  if (!spec.names.empty() && spec.names.size() != m) throw ConfigError("give one name per center");
  const std::size_t dim = spec.centers.front().size();
  if (dim == 0) throw ConfigError("cluster centers need at least one coordinate");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  LabeledFeatureSet set;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& center = spec.centers[i];
    if (center.size() != dim) throw ConfigError("cluster centers differ in dimension");
    const std::size_t n = spec.sizes.size() == 1 ? spec.sizes.front() : spec.sizes[i];
    if (n == 0) throw ConfigError("cluster size must be positive");
    FeatureClass cls{spec.names.empty() ? "C" + std::to_string(i + 1) : spec.names[i], {}};
    cls.points.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      Point p = center;
      for (double& v : p) v += spec.sigma * noise(rng);
      cls.points.push_back(std::move(p));
    }
    set.classes.push_back(std::move(cls));
  }
  return set;
}

LabeledSegments synthesize_segments(const LabeledFeatureSet& parameters, std::size_t length,
                                    double sample_rate, std::uint64_t seed) {
  if (length == 0) throw ConfigError("segment length must be positive");
  if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double nyquist = 0.5 * sample_rate;

  LabeledSegments out;
  for (const auto& cls : parameters.classes) {
    std::size_t index = 0;
    for (const auto& p : cls.points) {
      if (p.empty()) throw ConfigError("synthetic parameters need a frequency coordinate");
      const double freq = std::clamp(p[0], 0.1, nyquist - 0.1);
      const double level = p.size() > 1 ? std::max(p[1], 0.0) : 0.0;
      const double phi = phase(rng);
      Signal s{std::vector<double>(length), sample_rate};
      for (std::size_t n = 0; n < length; ++n) {
        s.samples[n] = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(n) / sample_rate + phi) +
                       level * noise(rng);
      }
      out.segments.push_back({std::move(s), cls.name, cls.name, index * length});
      ++index;
    }
  }
  return out;
}

void write_feature_table(std::ostream& os, const LabeledFeatureSet& set) {
  const std::size_t dim =
      set.classes.empty() || set.classes.front().points.empty() ? 2 : set.classes.front().points.front().size();
  os << "label";
  if (dim == 2) {
    os << "\th_norm\tc_norm";
  } else {
    for (std::size_t d = 0; d < dim; ++d) os << "\tx" << d + 1;
  }
  os << '\n';
  for (const auto& c : set.classes) {
    for (const auto& p : c.points) {
      os << c.name;
      for (double v : p) os << '\t' << text::format_double(v);
      os << '\n';
    }
  }
}

LabeledFeatureSet read_feature_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path.string());
  LabeledFeatureSet set;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#' || t.rfind("label", 0) == 0) continue;
    const auto fields = t.find('\t') != std::string_view::npos ? text::split(t, '\t') : text::split(t, ',');
    if (fields.size() < 2) throw DataError(path.string() + ": row " + std::to_string(row) + ": need a label and coordinates");
    Point p;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0.0;
      if (!text::parse_double(fields[i], v)) {
        throw DataError(path.string() + ": row " + std::to_string(row) + ": bad value '" + fields[i] + "'");
      }
      p.push_back(v);
    }
    auto idx = set.find(fields[0]);
    if (idx == set.classes.size()) set.classes.push_back({fields[0], {}});
    set.classes[idx].points.push_back(std::move(p));
  }
  return set;
}

void write_summary(std::ostream& os, const ExperimentResult& result) {
  os << "# encoders ranked by ascending lambda_dn; ties keep grid order\n"
     << "rank\tgrid_index\tencoder\tlambda_d\tlambda_dn\tlambda_dp\n";
  for (std::size_t r = 0; r < result.ranking.size(); ++r) {
    const auto k = result.ranking[r];
    const auto& rep = result.encoders[k].report;
    os << r + 1 << '\t' << k << '\t' << result.encoders[k].spec.label() << '\t'
       << text::format_double(rep.lambda_d) << '\t' << text::format_double(rep.lambda_dn) << '\t'
       << text::format_double(rep.lambda_dp) << '\n';
  }
}

void write_pairwise_table(std::ostream& os, const std::vector<PairwiseRow>& rows) {
  os << "pair\tencoder\tlambda_dn\tlambda_dp\n";
  for (const auto& r : rows) {
    os << r.first << " vs " << r.second << '\t' << r.encoder_label << '\t'
       << text::format_double(r.lambda_dn) << '\t' << text::format_double(r.lambda_dp) << '\n';
  }
}

void emit_plot_data(const ExperimentResult& result, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  auto open = [](const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    return f;
  };

  for (std::size_t k = 0; k < result.encoders.size(); ++k) {
    const auto& enc = result.encoders[k];
    const std::string stem = std::to_string(k) + "_" + slug(enc.spec.label());

    auto scatter = open(out_dir / ("scatter_" + stem + ".tsv"));
    scatter << "label\th_norm\tc_norm\n";
    for (const auto& f : enc.features) {
      scatter << f.label << '\t' << text::format_double(f.features.h_norm) << '\t'
              << text::format_double(f.features.c_norm) << '\n';
    }

    auto report = open(out_dir / ("report_" + stem + ".txt"));
    report << "encoder = " << enc.spec.label() << '\n';
    write_report(report, enc.report);
  }

  auto summary = open(out_dir / "summary.tsv");
  write_summary(summary, result);
}

}  // namespace ecgsym
