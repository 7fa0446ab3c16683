#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ecgsym/signal.hpp"

namespace ecgsym {

struct RecordHeader {
  std::string record_id;
  std::size_t signal_count = 1;
  double sample_rate = kDefaultSampleRate;
  std::size_t samples_per_signal = 0;  // 0 when the header does not say
  double gain = 200.0;                 // ADC units per millivolt
  double baseline = 0.0;               // ADC units
  std::vector<std::string> signal_files;
};

// Minimal reader for a WFDB-style header: a record line
// "<id> <signals> [<rate> [<samples>]]" followed by one line per signal
// "<file> 212 [<gain>[(<baseline>)][/<units>] [<adc bits> [<adc zero>] ...]]".
// Only format 212 is supported.
RecordHeader parse_header(const std::string& text);

// Two 12-bit two's-complement samples per three bytes:
//   first  = (b1 & 0x0F) << 8 | b0
//   second = (b1 & 0xF0) << 4 | b2
// The interleaved stream is split across `signal_count` channels.
std::vector<std::vector<int>> parse_format212(std::span<const std::uint8_t> bytes,
                                              std::size_t signal_count);

// Inverse of parse_format212 for an interleaved stream; values must lie in
// [-2048, 2047]. An odd sample count is padded with a zero sample.
std::vector<std::uint8_t> pack_format212(std::span<const int> interleaved);

double adc_to_millivolts(double adc, double gain, double baseline);
double millivolts_to_adc(double mv, double gain, double baseline);

struct TextSignalOptions {
  std::size_t column = 0;
  char delimiter = ',';
  bool header = false;
  double sample_rate = kDefaultSampleRate;
};

// One sample per row; the selected column must parse as a real number.
Signal read_text_signal(const std::filesystem::path& path, const TextSignalOptions& options = {});

struct Record {
  std::string id;
  Signal signal;
};

struct RecordOptions {
  std::size_t channel = 0;
  std::size_t signal_count = 2;  // for bare .dat files without a header
  TextSignalOptions text;
};

// Loads a .hea (+ its format-212 .dat), a bare format-212 .dat, or a
// delimited text file. The record id is the file stem. Samples stay in ADC
// units for binary records.
Record load_record(const std::filesystem::path& path, const RecordOptions& options = {});

struct Segment {
  std::size_t start = 0;
  Signal signal;
};

struct Segmentation {
  std::vector<Segment> segments;
  // signal length - segments * stride (negative when stride > length leaves gaps).
  long long residue = 0;
  // Incremented when samples past the last full window are not covered.
  std::size_t dropped_partial = 0;
};

// Windows [k*stride, k*stride + length) fully inside the signal.
Segmentation segment_record(const Signal& signal, std::size_t length = 720,
                            std::size_t stride = 720);

struct LabelSpan {
  std::string record_id;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  std::string label;
};

// Delimited text with columns record_id, start_sample, end_sample, label.
// Comma, tab or whitespace separated; '#' comments and a header row are
// allowed.
std::vector<LabelSpan> read_label_sidecar(const std::filesystem::path& path);
std::vector<LabelSpan> parse_label_sidecar(const std::string& text);

struct LabeledSegment {
  Signal segment;
  std::string label;
  std::string record_id;
  std::size_t start = 0;
};

struct LabeledSegments {
  std::vector<LabeledSegment> segments;
  std::size_t skipped = 0;          // windows with no covering label
  std::size_t dropped_partial = 0;  // trailing partial windows
};

// A window receives label L when a span for its record with label L covers
// it entirely. Throws DataError for spans naming an unknown record and for
// windows covered by spans with different labels.
LabeledSegments label_segments(const std::vector<Record>& records,
                               const std::vector<LabelSpan>& spans, std::size_t length = 720,
                               std::size_t stride = 720);

LabeledSegments load_labeled_segments(const std::vector<std::filesystem::path>& record_paths,
                                      const std::filesystem::path& sidecar,
                                      const RecordOptions& options = {},
                                      std::size_t length = 720, std::size_t stride = 720);

// Tab-separated: record_id, start, label, then comma-joined samples.
void write_segments(const std::filesystem::path& path, const LabeledSegments& segments);
LabeledSegments read_segments(const std::filesystem::path& path,
                              double sample_rate = kDefaultSampleRate);

}  // namespace ecgsym
