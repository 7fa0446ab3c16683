// ecgsym: symbolization, entropy/complexity features and class-separability
// evaluation for ECG segments.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "ecgsym/class_distribution.hpp"
#include "ecgsym/dsp_filter.hpp"
#include "ecgsym/errors.hpp"
#include "ecgsym/experiment.hpp"
#include "ecgsym/nonlinear_features.hpp"
#include "ecgsym/record_ingestion.hpp"
#include "ecgsym/symbol_encoding.hpp"
#include "ecgsym/text_util.hpp"

namespace fs = std::filesystem;
using namespace ecgsym;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

char parse_delimiter(const std::string& s) {
  if (s == "tab" || s == "\\t") return '\t';
  if (s == "space") return ' ';
  if (s.size() != 1) throw ConfigError("delimiter must be a single character, 'tab' or 'space'");
  return s[0];
}

// Writes to `path`, or stdout when it is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  fn(out);
  if (!out) throw ConfigError("failed writing " + path);
}

struct SignalInput {
  std::string path;
  std::size_t column = 0;
  std::string delimiter = ",";
  bool header = false;
  double sample_rate = kDefaultSampleRate;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--input", path, "Text signal file (one sample per row)")->required();
    cmd->add_option("--column", column, "Column index to read")->capture_default_str();
    cmd->add_option("--delimiter", delimiter, "Column delimiter (char, 'tab' or 'space')")
        ->capture_default_str();
    cmd->add_flag("--header", header, "Skip the first row");
    cmd->add_option("--sample-rate", sample_rate, "Sampling rate in Hz")->capture_default_str();
  }

  Signal read() const {
    return read_text_signal(path, {column, parse_delimiter(delimiter), header, sample_rate});
  }
};

void write_signal(std::ostream& os, const Signal& s) {
  for (double v : s.samples) os << text::format_double(v) << '\n';
}

// Options shared by ingest/run/pairs; each one only overrides the config
// value when given on the command line.
struct PipelineOptions {
  std::string config;
  std::vector<std::string> records;
  std::string labels;
  std::string segments;
  std::size_t channel = 0;
  std::size_t signal_count = 2;
  double sample_rate = kDefaultSampleRate;
  std::size_t segment_length = 720;
  std::size_t stride = 720;
  bool no_filter = false;
  std::size_t pad_before = kDefaultPadding;
  std::size_t pad_after = kDefaultPadding;
  double zero_tol = 0.0;
  std::string mode = "forall";
  std::string grid;
  std::string classes;
  bool no_validity = false;
  std::uint64_t seed = 0;
  std::string out;

  std::map<std::string, CLI::Option*> opts;

  void add_to(CLI::App* cmd, bool full) {
    opts["config"] = cmd->add_option("--config", config, "Key/value config file");
    opts["record"] = cmd->add_option("--record", records, "Record file(s): .hea, .dat or text");
    opts["labels"] = cmd->add_option("--labels", labels, "Label sidecar file");
    opts["channel"] = cmd->add_option("--channel", channel, "Signal/column index (required for binary records)")->capture_default_str();
    opts["signal-count"] =
        cmd->add_option("--signal-count", signal_count, "Signals in a bare .dat file")->capture_default_str();
    opts["sample-rate"] = cmd->add_option("--sample-rate", sample_rate, "Sampling rate in Hz")->capture_default_str();
    opts["segment-length"] =
        cmd->add_option("--segment-length", segment_length, "Samples per segment")->capture_default_str();
    opts["stride"] = cmd->add_option("--stride", stride, "Samples between segment starts")->capture_default_str();
    opts["out"] = cmd->add_option("--out", out, "Output directory (file for ingest)");
    if (!full) return;
    opts["segments"] = cmd->add_option("--segments", segments, "Segments file written by 'ingest'");
    opts["no-filter"] = cmd->add_flag("--no-filter", no_filter, "Skip band-pass filtering");
    opts["pad-before"] = cmd->add_option("--pad-before", pad_before, "Leading pad length")->capture_default_str();
    opts["pad-after"] = cmd->add_option("--pad-after", pad_after, "Trailing pad length")->capture_default_str();
    opts["zero-tol"] = cmd->add_option("--zero-tol", zero_tol, "Slope zero band")->capture_default_str();
    opts["mode"] = cmd->add_option("--mode", mode, "Quantifier: forall or exists")->capture_default_str();
    opts["grid"] = cmd->add_option("--grid", grid, "Encoder grid file");
    opts["classes"] = cmd->add_option("--classes", classes, "Comma-separated required classes");
    opts["no-validity"] = cmd->add_flag("--no-validity", no_validity, "Do not enforce the LZ validity length");
    opts["seed"] = cmd->add_option("--seed", seed, "Seed recorded with the run")->capture_default_str();
  }

  bool given(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }

  ExperimentConfig build() const {
    ExperimentConfig c = config.empty() ? ExperimentConfig{} : load_config(config);
    if (given("record")) c.records.assign(records.begin(), records.end());
    if (given("labels")) c.labels = labels;
    if (given("segments")) c.segments = segments;
    if (given("channel")) {
      c.record_options.channel = channel;
      c.channel_given = true;
    }
    if (given("signal-count")) c.record_options.signal_count = signal_count;
    if (given("sample-rate")) c.record_options.text.sample_rate = sample_rate;
    if (given("segment-length")) c.segment_length = segment_length;
    if (given("stride")) c.stride = stride;
    if (given("no-filter")) c.filter = !no_filter;
    if (given("pad-before")) c.pad_before = pad_before;
    if (given("pad-after")) c.pad_after = pad_after;
    if (given("zero-tol")) c.zero_tol = zero_tol;
    if (given("mode")) c.mode = parse_quantifier_mode(mode);
    if (given("grid")) c.grid = read_grid(grid);
    if (given("classes")) {
      c.classes.clear();
      for (const auto& name : text::split(classes, ',')) {
        if (!name.empty()) c.classes.push_back(name);
      }
    }
    if (given("no-validity")) c.validity = no_validity ? ValidityCheck::skip : ValidityCheck::enforce;
    if (given("seed")) c.seed = seed;
    if (given("out")) c.out_dir = out;
    return c;
  }
};

void print_class_counts(std::ostream& os, const LabeledSegments& segs) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : segs.segments) ++counts[s.label];
  for (const auto& [label, n] : counts) os << "class " << label << " = " << n << '\n';
  os << "segments = " << segs.segments.size() << '\n'
     << "skipped_unlabeled = " << segs.skipped << '\n'
     << "dropped_partial = " << segs.dropped_partial << '\n';
}

std::vector<Point> parse_centers(const std::string& text) {
  std::vector<Point> centers;
  for (const auto& chunk : text::split(text, ';')) {
    if (chunk.empty()) continue;
    Point p;
    for (const auto& v : text::split(chunk, ',')) {
      double x = 0.0;
      if (!text::parse_double(v, x)) throw ConfigError("bad center coordinate '" + v + "'");
      p.push_back(x);
    }
    centers.push_back(std::move(p));
  }
  return centers;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECG symbolization, entropy/complexity features and class-separability evaluation"};
  app.require_subcommand(1);

  // ingest
  PipelineOptions ingest_opts;
  auto* ingest = app.add_subcommand("ingest", "Slice labeled records into segments");
  ingest_opts.add_to(ingest, false);

  // filter
  SignalInput filter_in;
  std::string filter_out;
  bool filter_raw = false;
  std::size_t filter_pad_before = kDefaultPadding;
  std::size_t filter_pad_after = kDefaultPadding;
  std::size_t response_points = 0;
  auto* filter = app.add_subcommand("filter", "Band-pass filter a signal with edge compensation");
  filter_in.add_to(filter);
  filter->add_option("--out", filter_out, "Output file (default stdout)");
  filter->add_flag("--raw", filter_raw, "Plain causal filtering without compensation");
  filter->add_option("--pad-before", filter_pad_before, "Leading pad length")->capture_default_str();
  filter->add_option("--pad-after", filter_pad_after, "Trailing pad length")->capture_default_str();
  filter->add_option("--response", response_points,
                     "Instead of filtering, write N frequency-response points (Hz, magnitude, phase, group delay)");
  // --input is required only when filtering.
  filter->get_option("--input")->required(false);

  // encode
  SignalInput encode_in;
  std::string encode_method = "threshold";
  int encode_alphabet = 3;
  std::string encode_e;
  double encode_tol = 0.0;
  std::string encode_out;
  auto* enc = app.add_subcommand("encode", "Encode a signal into a symbol sequence");
  encode_in.add_to(enc);
  enc->add_option("--method", encode_method, "slope or threshold")->capture_default_str();
  enc->add_option("--alphabet", encode_alphabet, "2 or 3")->capture_default_str();
  enc->add_option("-E,--deviation", encode_e, "Threshold deviation E, e.g. 1/12");
  enc->add_option("--zero-tol", encode_tol, "Slope zero band")->capture_default_str();
  enc->add_option("--out", encode_out, "Output file (default stdout)");

  // features
  std::string features_in;
  int features_alphabet = 2;
  bool features_no_validity = false;
  auto* feat = app.add_subcommand("features", "Entropy and LZ complexity of a symbol file");
  feat->add_option("--input", features_in, "Symbols, whitespace/comma/newline separated")->required();
  feat->add_option("--alphabet", features_alphabet, "Declared alphabet size")->capture_default_str();
  feat->add_flag("--no-validity", features_no_validity, "Do not enforce the LZ validity length");

  // evaluate
  std::string eval_in;
  std::string eval_mode = "forall";
  std::string eval_out;
  auto* eval = app.add_subcommand("evaluate", "Class-separability report for a feature table");
  eval->add_option("--input", eval_in, "Feature table: label, coordinates...")->required();
  eval->add_option("--mode", eval_mode, "forall or exists")->capture_default_str();
  eval->add_option("--out", eval_out, "Report file (default stdout)");

  // run
  PipelineOptions run_opts;
  auto* run = app.add_subcommand("run", "Full pipeline over the encoder grid");
  run_opts.add_to(run, true);

  // pairs
  PipelineOptions pairs_opts;
  std::vector<std::string> pair_names;
  auto* pairs = app.add_subcommand("pairs", "Best encoder per pair of classes");
  pairs_opts.add_to(pairs, true);
  pairs->add_option("--pair", pair_names, "Class pair A:B (default: all pairs)");

  // synth
  std::string synth_centers;
  std::vector<std::size_t> synth_sizes{200};
  double synth_sigma = 1.0;
  std::uint64_t synth_seed = 0;
  std::string synth_names;
  std::string synth_out;
  std::string synth_signals;
  std::size_t synth_length = 720;
  double synth_rate = kDefaultSampleRate;
  auto* synth = app.add_subcommand("synth", "Gaussian clusters, optionally rendered as signals");
  synth->add_option("--centers", synth_centers, "Centers 'x,y;x,y;...'")->required();
  synth->add_option("--size", synth_sizes, "Points per class (one value or one per class)");
  synth->add_option("--sigma", synth_sigma, "Isotropic spread")->capture_default_str();
  synth->add_option("--seed", synth_seed, "RNG seed")->capture_default_str();
  synth->add_option("--names", synth_names, "Comma-separated class names");
  synth->add_option("--out", synth_out, "Feature table output (default stdout)");
  synth->add_option("--signals", synth_signals,
                    "Also write a segments file treating points as (frequency Hz, noise level)");
  synth->add_option("--segment-length", synth_length, "Samples per synthetic segment")->capture_default_str();
  synth->add_option("--sample-rate", synth_rate, "Synthetic sampling rate")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*ingest) {
      const auto config = ingest_opts.build();
      if (config.records.empty() || config.labels.empty()) throw ConfigError("ingest needs --record and --labels");
      config.validate();
      const auto segs = load_labeled_segments(config.records, config.labels, config.record_options,
                                              config.segment_length, config.stride);
      if (!config.out_dir.empty()) write_segments(config.out_dir, segs);
      print_class_counts(std::cout, segs);
    } else if (*filter) {
      const auto bp = make_bandpass();
      if (response_points > 0) {
        with_output(filter_out, [&](std::ostream& os) {
          os << "freq_hz\tmagnitude\tphase_rad\tgroup_delay\n";
          for (std::size_t k = 0; k < response_points; ++k) {
            const double omega = std::numbers::pi * (static_cast<double>(k) + 0.5) /
                                 static_cast<double>(response_points);
            const auto h = frequency_response(bp, omega);
            os << text::format_double(omega * filter_in.sample_rate / (2.0 * std::numbers::pi)) << '\t'
               << text::format_double(std::abs(h)) << '\t' << text::format_double(std::arg(h)) << '\t';
            try {
              os << text::format_double(group_delay(bp, omega));
            } catch (const DataError&) {
              os << "nan";
            }
            os << '\n';
          }
        });
      } else {
        if (filter_in.path.empty()) throw ConfigError("filter needs --input (or --response)");
        const auto sig = filter_in.read();
        const auto out = filter_raw
                             ? apply_filter(bp, sig)
                             : filter_compensated(bp, sig, padding_with_lengths(bp, filter_pad_before, filter_pad_after));
        with_output(filter_out, [&](std::ostream& os) { write_signal(os, out); });
      }
    } else if (*enc) {
      EncoderSpec spec;
      spec.alphabet_size = encode_alphabet;
      const auto method = text::lower(encode_method);
      if (method == "slope") {
        spec.method = EncodingMethod::slope;
      } else if (method == "threshold") {
        spec.method = EncodingMethod::threshold;
      } else {
        throw ConfigError("unknown method '" + encode_method + "'");
      }
      if (!encode_e.empty()) {
        double e = 0.0;
        if (!text::parse_fraction(encode_e, e)) throw ConfigError("bad deviation E '" + encode_e + "'");
        spec.deviation = e;
      }
      spec.validate();
      const auto seq = encode(spec, encode_in.read(), encode_tol);
      with_output(encode_out, [&](std::ostream& os) {
        for (auto s : seq.symbols) os << static_cast<int>(s) << '\n';
      });
    } else if (*feat) {
      std::ifstream in(features_in);
      if (!in) throw DataError("cannot open file: " + features_in);
      SymbolSequence seq{{}, features_alphabet};
      std::string token;
      std::size_t position = 0;
      while (in >> token) {
        for (const auto& t : text::split(token, ',')) {
          if (t.empty()) continue;
          ++position;
          double v = 0.0;
          if (!text::parse_double(t, v) || v != static_cast<int>(v)) {
            throw DataError("symbol " + std::to_string(position) + ": not an integer: '" + t + "'");
          }
          const int s = static_cast<int>(v);
          const int idx = symbol_index(static_cast<std::int8_t>(s), features_alphabet);
          if (s < -1 || s > 1 || idx < 0 || idx >= features_alphabet) {
            throw DataError("symbol " + std::to_string(position) + " outside the declared alphabet");
          }
          seq.symbols.push_back(static_cast<std::int8_t>(s));
        }
      }
      const auto fv =
          extract_features(seq, features_no_validity ? ValidityCheck::skip : ValidityCheck::enforce);
      std::cout << "length = " << seq.size() << '\n'
                << "alphabet = " << seq.alphabet_size << '\n'
                << "entropy_bits = " << text::format_double(shannon_entropy(seq)) << '\n'
                << "h_norm = " << text::format_double(fv.h_norm) << '\n'
                << "lz_complexity = " << lz_complexity(seq) << '\n'
                << "c_norm = " << text::format_double(fv.c_norm) << '\n';
    } else if (*eval) {
      const auto set = read_feature_table(eval_in);
      const auto report = evaluate(set, parse_quantifier_mode(eval_mode));
      with_output(eval_out, [&](std::ostream& os) { write_report(os, report); });
    } else if (*run || *pairs) {
      auto& opts = *run ? run_opts : pairs_opts;
      const auto config = opts.build();
      const auto result = run_experiment(config);
      if (*run) {
        if (!config.out_dir.empty()) emit_plot_data(result, config.out_dir);
        write_summary(std::cout, result);
        std::cout << "best = " << result.encoders[result.best()].spec.label() << '\n';
        if (result.excluded > 0) std::cout << "excluded_segments = " << result.excluded << '\n';
      } else {
        std::vector<std::pair<std::string, std::string>> wanted;
        for (const auto& p : pair_names) {
          const auto parts = text::split(p, ':');
          if (parts.size() != 2) throw ConfigError("pair must look like A:B, got '" + p + "'");
          wanted.emplace_back(parts[0], parts[1]);
        }
        if (wanted.empty()) wanted = all_pairs(result.class_order);
        const auto rows = pairwise_table(result, wanted, config.mode);
        const std::string path = config.out_dir.empty() ? "" : (config.out_dir / "pairs.tsv").string();
        if (!config.out_dir.empty()) fs::create_directories(config.out_dir);
        with_output(path, [&](std::ostream& os) { write_pairwise_table(os, rows); });
        if (!path.empty()) write_pairwise_table(std::cout, rows);
      }
    } else if (*synth) {
      ClusterSpec spec;
      spec.centers = parse_centers(synth_centers);
      spec.sizes = synth_sizes;
      spec.sigma = synth_sigma;
      spec.seed = synth_seed;
      if (!synth_names.empty()) spec.names = text::split(synth_names, ',');
      const auto set = make_clusters(spec);
      with_output(synth_out, [&](std::ostream& os) { write_feature_table(os, set); });
      if (!synth_signals.empty()) {
        write_segments(synth_signals, synthesize_segments(set, synth_length, synth_rate, synth_seed));
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
