#include "ecgsym/record_ingestion.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "ecgsym/errors.hpp"
#include "ecgsym/text_util.hpp"

namespace ecgsym {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Leading numeric part of tokens like "360/1" or "200(1024)/mV".
bool leading_number(const std::string& token, double& out) {
  const auto end = token.find_first_of("/(:x+");
  return text::parse_double(token.substr(0, end), out);
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    lines.emplace_back(t);
  }
  return lines;
}

int sign_extend12(int v) { return (v & 0x800) ? v - 0x1000 : v; }

}  // namespace

RecordHeader parse_header(const std::string& text) {
  const auto lines = data_lines(text);
  if (lines.empty()) throw DataError("empty header");

  RecordHeader header;
  const auto rec = text::split_whitespace(lines.front());
  if (rec.size() < 2) throw DataError("header record line needs an id and a signal count");
  header.record_id = rec[0].substr(0, rec[0].find('/'));
  if (!text::parse_size(rec[1], header.signal_count) || header.signal_count == 0) {
    throw DataError("bad signal count in header: '" + rec[1] + "'");
  }
  if (rec.size() >= 3) {
    if (!leading_number(rec[2], header.sample_rate) || header.sample_rate <= 0.0) {
      throw DataError("bad sample rate in header: '" + rec[2] + "'");
    }
  }
  if (rec.size() >= 4 && !text::parse_size(rec[3], header.samples_per_signal)) {
    throw DataError("bad sample count in header: '" + rec[3] + "'");
  }

  if (lines.size() < 1 + header.signal_count) throw DataError("header is missing signal lines");
  for (std::size_t s = 0; s < header.signal_count; ++s) {
    const auto fields = text::split_whitespace(lines[1 + s]);
    if (fields.size() < 2) throw DataError("bad signal line in header: '" + lines[1 + s] + "'");
    if (fields[1].rfind("212", 0) != 0) {
      throw DataError("unsupported storage format '" + fields[1] + "' (only 212)");
    }
    header.signal_files.push_back(fields[0]);
    if (s != 0) continue;

    if (fields.size() >= 3) {
      double gain = 0.0;
      if (!leading_number(fields[2], gain)) throw DataError("bad gain in header: '" + fields[2] + "'");
      if (gain > 0.0) header.gain = gain;
      bool have_baseline = false;
      if (const auto open = fields[2].find('('); open != std::string::npos) {
        const auto close = fields[2].find(')', open);
        if (close == std::string::npos ||
            !text::parse_double(fields[2].substr(open + 1, close - open - 1), header.baseline)) {
          throw DataError("bad baseline in header: '" + fields[2] + "'");
        }
        have_baseline = true;
      }
      // Without an explicit baseline the ADC zero stands in for it.
      if (!have_baseline && fields.size() >= 5 && !text::parse_double(fields[4], header.baseline)) {
        throw DataError("bad ADC zero in header: '" + fields[4] + "'");
      }
    }
  }
  return header;
}

std::vector<std::vector<int>> parse_format212(std::span<const std::uint8_t> bytes,
                                              std::size_t signal_count) {
  if (signal_count == 0) throw ConfigError("signal count must be positive");
  if (bytes.size() % 3 != 0) throw DataError("truncated format-212 stream");

  std::vector<std::vector<int>> out(signal_count);
  for (auto& ch : out) ch.reserve(bytes.size() * 2 / 3 / signal_count + 1);
  std::size_t next = 0;
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    const int b0 = bytes[i];
    const int b1 = bytes[i + 1];
    const int b2 = bytes[i + 2];
    out[next].push_back(sign_extend12(((b1 & 0x0F) << 8) | b0));
    next = (next + 1) % signal_count;
    out[next].push_back(sign_extend12(((b1 & 0xF0) << 4) | b2));
    next = (next + 1) % signal_count;
  }
  if (next != 0) throw DataError("format-212 stream ends inside a sample frame");
  return out;
}

std::vector<std::uint8_t> pack_format212(std::span<const int> interleaved) {
  std::vector<std::uint8_t> out;
  out.reserve((interleaved.size() + 1) / 2 * 3);
  for (std::size_t i = 0; i < interleaved.size(); i += 2) {
    const int first = interleaved[i];
    const int second = i + 1 < interleaved.size() ? interleaved[i + 1] : 0;
    if (first < -2048 || first > 2047 || second < -2048 || second > 2047) {
      throw DataError("sample out of 12-bit range");
    }
    const unsigned u1 = static_cast<unsigned>(first) & 0xFFF;
    const unsigned u2 = static_cast<unsigned>(second) & 0xFFF;
    out.push_back(static_cast<std::uint8_t>(u1 & 0xFF));
    out.push_back(static_cast<std::uint8_t>(((u1 >> 8) & 0x0F) | ((u2 >> 4) & 0xF0)));
    out.push_back(static_cast<std::uint8_t>(u2 & 0xFF));
  }
  return out;
}

double adc_to_millivolts(double adc, double gain, double baseline) {
  if (!(gain > 0.0)) throw ConfigError("gain must be positive");
  return (adc - baseline) / gain;
}

double millivolts_to_adc(double mv, double gain, double baseline) {
  if (!(gain > 0.0)) throw ConfigError("gain must be positive");
  return mv * gain + baseline;
}

Signal read_text_signal(const fs::path& path, const TextSignalOptions& options) {
  if (!(options.sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path.string());

  Signal signal{{}, options.sample_rate};
  std::string line;
  std::size_t row = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = options.delimiter == ' ' ? text::split_whitespace(line)
                                                 : text::split(line, options.delimiter);
    double v = 0.0;
    if (options.column >= fields.size() || !text::parse_double(fields[options.column], v)) {
      throw DataError(path.string() + ": row " + std::to_string(row) +
                      ": cannot parse column " + std::to_string(options.column));
    }
    signal.samples.push_back(v);
  }
  if (signal.empty()) throw DataError(path.string() + ": empty column");
  return signal;
}

Record load_record(const fs::path& path, const RecordOptions& options) {
  const auto ext = text::lower(path.extension().string());
  Record record;
  record.id = path.stem().string();

  if (ext == ".hea" || ext == ".dat") {
    RecordHeader header;
    fs::path dat = path;
    if (ext == ".hea") {
      header = parse_header(read_file(path));
      std::set<std::string> files(header.signal_files.begin(), header.signal_files.end());
      if (files.size() != 1) throw DataError("signals spread over several files are not supported");
      dat = path.parent_path() / header.signal_files.front();
    } else {
      header.signal_count = options.signal_count;
      header.sample_rate = options.text.sample_rate;
    }
    if (options.channel >= header.signal_count) {
      throw ConfigError("channel " + std::to_string(options.channel) + " not in record " +
                        record.id + " (" + std::to_string(header.signal_count) + " signals)");
    }
    const std::string raw = read_file(dat);
    const auto* data = reinterpret_cast<const std::uint8_t*>(raw.data());
    auto channels = parse_format212({data, raw.size()}, header.signal_count);
    auto& chosen = channels[options.channel];
    if (header.samples_per_signal > 0 && chosen.size() > header.samples_per_signal) {
      chosen.resize(header.samples_per_signal);
    }
    record.signal.sample_rate = header.sample_rate;
    record.signal.samples.assign(chosen.begin(), chosen.end());
    if (record.signal.empty()) throw DataError("record " + record.id + " has no samples");
    return record;
  }

  TextSignalOptions text_options = options.text;
  text_options.column = options.channel;
  record.signal = read_text_signal(path, text_options);
  return record;
}

Segmentation segment_record(const Signal& signal, std::size_t length, std::size_t stride) {
  if (length == 0 || stride == 0) throw ConfigError("segment length and stride must be positive");
  Segmentation out;
  const std::size_t n = signal.size();
  std::size_t start = 0;
  for (; start + length <= n; start += stride) {
    const auto first = signal.samples.begin() + static_cast<std::ptrdiff_t>(start);
    out.segments.push_back(
        {start, {std::vector<double>(first, first + static_cast<std::ptrdiff_t>(length)),
                 signal.sample_rate}});
  }
  const std::size_t covered_end =
      out.segments.empty() ? 0 : out.segments.back().start + length;
  if (covered_end < n) out.dropped_partial = 1;
  out.residue = static_cast<long long>(n) -
                static_cast<long long>(out.segments.size()) * static_cast<long long>(stride);
  return out;
}

std::vector<LabelSpan> parse_label_sidecar(const std::string& text) {
  std::vector<LabelSpan> spans;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  bool first_data_row = true;
  while (std::getline(in, line)) {
    ++row;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> fields;
    if (t.find(',') != std::string_view::npos) {
      fields = text::split(t, ',');
    } else if (t.find('\t') != std::string_view::npos) {
      fields = text::split(t, '\t');
    } else {
      fields = text::split_whitespace(t);
    }
    const std::string where = "label sidecar row " + std::to_string(row);
    if (fields.size() != 4) throw DataError(where + ": expected 4 columns");

    LabelSpan span;
    span.record_id = fields[0];
    const bool numeric = text::parse_size(fields[1], span.start) && text::parse_size(fields[2], span.end);
    if (!numeric) {
      if (first_data_row) {  // header row
        first_data_row = false;
        continue;
      }
      throw DataError(where + ": bad sample range");
    }
    first_data_row = false;
    span.label = fields[3];
    if (span.record_id.empty() || span.label.empty()) throw DataError(where + ": empty field");
    if (span.end <= span.start) throw DataError(where + ": end must exceed start");
    spans.push_back(std::move(span));
  }
  return spans;
}

std::vector<LabelSpan> read_label_sidecar(const fs::path& path) {
  return parse_label_sidecar(read_file(path));
}

LabeledSegments label_segments(const std::vector<Record>& records,
                               const std::vector<LabelSpan>& spans, std::size_t length,
                               std::size_t stride) {
  std::map<std::string, std::vector<const LabelSpan*>> by_record;
  for (const auto& r : records) {
    if (!by_record.emplace(r.id, std::vector<const LabelSpan*>{}).second) {
      throw DataError("duplicate record id: " + r.id);
    }
  }
  for (const auto& s : spans) {
    const auto it = by_record.find(s.record_id);
    if (it == by_record.end()) throw DataError("label sidecar references unknown record: " + s.record_id);
    it->second.push_back(&s);
  }

  LabeledSegments out;
  for (const auto& record : records) {
    auto seg = segment_record(record.signal, length, stride);
    out.dropped_partial += seg.dropped_partial;
    const auto& record_spans = by_record.at(record.id);
    for (auto& window : seg.segments) {
      const std::size_t end = window.start + length;
      const LabelSpan* match = nullptr;
      for (const auto* s : record_spans) {
        if (s->start > window.start || s->end < end) continue;
        if (match && match->label != s->label) {
          throw DataError("conflicting labels for record " + record.id + " window [" +
                          std::to_string(window.start) + ", " + std::to_string(end) +
                          "): " + match->label + " vs " + s->label);
        }
        match = s;
      }
      if (!match) {
        ++out.skipped;
        continue;
      }
      out.segments.push_back({std::move(window.signal), match->label, record.id, window.start});
    }
  }
  return out;
}

LabeledSegments load_labeled_segments(const std::vector<fs::path>& record_paths,
                                      const fs::path& sidecar, const RecordOptions& options,
                                      std::size_t length, std::size_t stride) {
  std::vector<Record> records;
  records.reserve(record_paths.size());
  for (const auto& p : record_paths) records.push_back(load_record(p, options));
  return label_segments(records, read_label_sidecar(sidecar), length, stride);
}

void write_segments(const fs::path& path, const LabeledSegments& segments) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# skipped=" << segments.skipped << " dropped_partial=" << segments.dropped_partial << '\n';
  out << "record_id\tstart\tlabel\tsamples\n";
  for (const auto& s : segments.segments) {
    out << s.record_id << '\t' << s.start << '\t' << s.label << '\t';
    for (std::size_t i = 0; i < s.segment.size(); ++i) {
      if (i) out << ',';
      out << text::format_double(s.segment.samples[i]);
    }
    out << '\n';
  }
  if (!out) throw ConfigError("failed writing " + path.string());
}

LabeledSegments read_segments(const fs::path& path, double sample_rate) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path.string());
  LabeledSegments out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#' || t.rfind("record_id", 0) == 0) continue;
    const auto fields = text::split(t, '\t');
    const std::string where = path.string() + ": row " + std::to_string(row);
    if (fields.size() != 4) throw DataError(where + ": expected 4 columns");
    LabeledSegment seg;
    seg.record_id = fields[0];
    seg.label = fields[2];
    seg.segment.sample_rate = sample_rate;
    if (!text::parse_size(fields[1], seg.start)) throw DataError(where + ": bad start");
    for (const auto& v : text::split(fields[3], ',')) {
      double x = 0.0;
      if (!text::parse_double(v, x)) throw DataError(where + ": bad sample '" + v + "'");
      seg.segment.samples.push_back(x);
    }
    if (seg.label.empty() || seg.segment.empty()) throw DataError(where + ": empty label or segment");
    out.segments.push_back(std::move(seg));
  }
  return out;
}

}  // namespace ecgsym
