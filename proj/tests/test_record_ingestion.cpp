#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "ecgsym/errors.hpp"
#include "ecgsym/record_ingestion.hpp"
#include "oracles/oracles.hpp"
#include "temp_dir.hpp"

using namespace ecgsym;
namespace fs = std::filesystem;

TEST_CASE("format 212 decoding") {
  using Bytes = std::vector<std::uint8_t>;
  auto decode = [](Bytes b) { return parse_format212(b, 2); };
  CHECK(decode({0x01, 0x00, 0x02}) == std::vector<std::vector<int>>{{1}, {2}});
  CHECK(decode({0xFF, 0x0F, 0x00}) == std::vector<std::vector<int>>{{-1}, {0}});
  CHECK(decode({0x00, 0x80, 0x00}) == std::vector<std::vector<int>>{{0}, {-2048}});
  CHECK(parse_format212(Bytes{0x01, 0x00, 0x02, 0x03, 0x00, 0x04}, 1) == std::vector<std::vector<int>>{{1, 2, 3, 4}});
  CHECK_THROWS_WITH_AS(decode({0x01, 0x02}), "truncated format-212 stream", DataError);
  CHECK_THROWS_AS(parse_format212(Bytes{0x01, 0x00, 0x02}, 3), DataError);
  CHECK_THROWS_AS(parse_format212(Bytes{}, 0), ConfigError);
}

TEST_CASE("format 212 agrees with the bit-level oracle") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 5000; ++i) {
    const std::uint8_t b[3] = {static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
                               static_cast<std::uint8_t>(byte(rng))};
    const auto got = parse_format212(b, 2);
    const auto [first, second] = oracle::decode212_group(b[0], b[1], b[2]);
    CHECK(got[0][0] == first);
    CHECK(got[1][0] == second);
  }
}

TEST_CASE("format 212 round trip") {
  for (int partner : {-2048, 0, 2047, 123}) {
    std::vector<int> stream;
    for (int v = -2048; v <= 2047; ++v) {
      stream.push_back(v);
      stream.push_back(partner);
    }
    const auto bytes = pack_format212(stream);
    const auto channels = parse_format212(bytes, 2);
    for (std::size_t i = 0; i < 4096; ++i) {
      REQUIRE(channels[0][i] == stream[2 * i]);
      REQUIRE(channels[1][i] == partner);
    }
  }
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(-2048, 2047);
  std::vector<int> stream(20000);
  for (int& s : stream) s = v(rng);
  const auto ch = parse_format212(pack_format212(stream), 2);
  for (std::size_t i = 0; i < 10000; ++i) {
    REQUIRE(ch[0][i] == stream[2 * i]);
    REQUIRE(ch[1][i] == stream[2 * i + 1]);
  }
  CHECK_THROWS_AS(pack_format212(std::vector<int>{2048, 0}), DataError);
}

TEST_CASE("unit conversion") {
  for (int adc = -2048; adc <= 2047; adc += 7) {
    const double mv = adc_to_millivolts(adc, 200.0, 1024.0);
    CHECK(std::abs(millivolts_to_adc(mv, 200.0, 1024.0) - adc) < 1.0);
    CHECK(millivolts_to_adc(mv, 200.0, 1024.0) == doctest::Approx(adc));
  }
  CHECK(adc_to_millivolts(1224, 200.0, 1024.0) == 1.0);
  CHECK_THROWS_AS(adc_to_millivolts(1, 0.0, 0.0), ConfigError);
}

TEST_CASE("header parsing") {
  const auto h = parse_header(
      "# comment\n"
      "100 2 360 650000\n"
      "100.dat 212 200 11 1024 995 -22131 0 MLII\n"
      "100.dat 212 200 11 1024 1011 20052 0 V5\n");
  CHECK(h.record_id == "100");
  CHECK(h.signal_count == 2);
  CHECK(h.sample_rate == 360.0);
  CHECK(h.samples_per_signal == 650000);
  CHECK(h.gain == 200.0);
  CHECK(h.baseline == 1024.0);
  CHECK(h.signal_files == std::vector<std::string>{"100.dat", "100.dat"});

  const auto h2 = parse_header("x 1\nx.dat 212 100(5)/mV\n");
  CHECK(h2.gain == 100.0);
  CHECK(h2.baseline == 5.0);
  CHECK(h2.sample_rate == 360.0);

  CHECK_THROWS_AS(parse_header("x 1\nx.dat 16 200\n"), DataError);
  CHECK_THROWS_AS(parse_header("x 2\nx.dat 212\n"), DataError);
  CHECK_THROWS_AS(parse_header(""), DataError);
}

TEST_CASE("text signals") {
  test::TempDir dir;
  const auto p = dir.write("sig.txt", "0.0\n0.5\n1.0\n");
  CHECK(read_text_signal(p).samples == std::vector<double>{0.0, 0.5, 1.0});

  const auto h = dir.write("hdr.csv", "time,value\n0,1.5\n1,2.5\n");
  const auto s = read_text_signal(h, {1, ',', true, 250.0});
  CHECK(s.samples == std::vector<double>{1.5, 2.5});
  CHECK(s.sample_rate == 250.0);

  const auto bad = dir.write("bad.txt", "1\nabc\n");
  CHECK_THROWS_WITH_AS(read_text_signal(bad), doctest::Contains("row 2"), DataError);
  CHECK_THROWS_AS(read_text_signal(dir.path() / "missing.txt"), DataError);
  CHECK_THROWS_AS(read_text_signal(dir.write("empty.txt", "\n")), DataError);
}

TEST_CASE("segmentation") {
  auto signal_of = [](std::size_t n) { return Signal{std::vector<double>(n, 0.0), 360.0}; };
  auto s = segment_record(signal_of(2160));
  CHECK(s.segments.size() == 3);
  CHECK(s.dropped_partial == 0);
  CHECK(s.segments[2].start == 1440);

  s = segment_record(signal_of(719));
  CHECK(s.segments.empty());
  CHECK(s.dropped_partial == 1);

  s = segment_record(signal_of(1440), 720, 360);
  CHECK(s.segments.size() == 3);
  CHECK(s.segments[1].start == 360);

  CHECK_THROWS_AS(segment_record(signal_of(10), 0, 1), ConfigError);

  // Accounting property over many shapes.
  for (std::size_t n = 0; n < 60; ++n) {
    for (std::size_t len = 1; len < 12; ++len) {
      for (std::size_t stride = 1; stride < 12; ++stride) {
        const auto r = segment_record(signal_of(n), len, stride);
        CHECK(static_cast<long long>(r.segments.size() * stride) + r.residue == static_cast<long long>(n));
        const std::size_t covered = r.segments.empty() ? 0 : r.segments.back().start + len;
        CHECK(r.dropped_partial == (covered < n ? 1u : 0u));
        for (const auto& seg : r.segments) CHECK(seg.signal.size() == len);
      }
    }
  }
}

TEST_CASE("label sidecar and labeled segments") {
  std::vector<Record> records{{"r1", Signal{std::vector<double>(2160, 1.0), 360.0}}};

  SUBCASE("two labeled windows, one skipped") {
    const auto spans = parse_label_sidecar("record_id,start_sample,end_sample,label\nr1,0,720,Normal\nr1,720,1440,AFIB\n");
    const auto out = label_segments(records, spans);
    REQUIRE(out.segments.size() == 2);
    CHECK(out.skipped == 1);
    CHECK(out.segments[0].label == "Normal");
    CHECK(out.segments[1].label == "AFIB");
    CHECK(out.segments[1].start == 720);
    CHECK(out.segments[1].record_id == "r1");
    CHECK(out.segments[1].segment.size() == 720);
  }
  SUBCASE("empty sidecar") {
    const auto out = label_segments(records, parse_label_sidecar(""));
    CHECK(out.segments.empty());
    CHECK(out.skipped == 3);
  }
  SUBCASE("a span covering several windows") {
    const auto out = label_segments(records, parse_label_sidecar("r1\t0\t2160\tVT\n"));
    CHECK(out.segments.size() == 3);
  }
  SUBCASE("conflicts and unknown records") {
    CHECK_THROWS_WITH_AS(label_segments(records, parse_label_sidecar("r1 0 720 Normal\nr1 0 1440 VT\n")),
                         doctest::Contains("conflicting labels"), DataError);
    CHECK_NOTHROW(label_segments(records, parse_label_sidecar("r1 0 720 VT\nr1 0 1440 VT\n")));
    CHECK_THROWS_WITH_AS(label_segments(records, parse_label_sidecar("r9 0 720 VT\n")),
                         doctest::Contains("unknown record"), DataError);
  }
  SUBCASE("malformed sidecars") {
    CHECK_THROWS_AS(parse_label_sidecar("r1,0,720\n"), DataError);
    CHECK_THROWS_AS(parse_label_sidecar("r1,720,0,X\n"), DataError);
    CHECK_THROWS_AS(parse_label_sidecar("r1,0,720,X\nr1,a,b,X\n"), DataError);
  }
}

TEST_CASE("binary records on disk") {
  test::TempDir dir;
  std::vector<int> stream;
  for (int i = 0; i < 1500; ++i) {
    stream.push_back(i % 2000 - 1000);  // channel 0
    stream.push_back(-(i % 300));       // channel 1
  }
  const auto bytes = pack_format212(stream);
  {
    std::ofstream out(dir.path() / "rec.dat", std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  dir.write("rec.hea", "rec 2 360 1500\nrec.dat 212 200 11 0 0 0 0 MLII\nrec.dat 212 200 11 0 0 0 0 V1\n");

  const auto r0 = load_record(dir.path() / "rec.hea");
  CHECK(r0.id == "rec");
  REQUIRE(r0.signal.size() == 1500);
  CHECK(r0.signal.samples[10] == -990.0);
  const auto r1 = load_record(dir.path() / "rec.hea", {1, 2, {}});
  CHECK(r1.signal.samples[301] == -1.0);
  const auto bare = load_record(dir.path() / "rec.dat", {1, 2, {}});
  CHECK(bare.signal.samples == r1.signal.samples);
  CHECK_THROWS_AS(load_record(dir.path() / "rec.hea", {2, 2, {}}), ConfigError);

  const auto sidecar = dir.write("labels.csv", "rec,0,720,Normal\nrec,720,1440,VT\n");
  const auto segs = load_labeled_segments({dir.path() / "rec.hea"}, sidecar);
  CHECK(segs.segments.size() == 2);
  CHECK(segs.dropped_partial == 1);

  const auto file = dir.path() / "segments.tsv";
  write_segments(file, segs);
  const auto back = read_segments(file);
  REQUIRE(back.segments.size() == 2);
  CHECK(back.segments[1].label == "VT");
  CHECK(back.segments[1].start == 720);
  CHECK(back.segments[1].segment.samples == segs.segments[1].segment.samples);
}
