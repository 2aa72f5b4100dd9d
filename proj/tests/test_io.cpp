#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "vgan/errors.hpp"
#include "vgan/io.hpp"
#include "vgan/util.hpp"

using namespace vgan;
using namespace vgan::io;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("wav round trip, silence and square wave") {
  SUBCASE("one second of silence at 16 kHz") {
    AudioBuffer a;
    a.sample_rate = 16000;
    a.samples.assign(16000, 0.0);
    const auto path = temp_path("vgan_silence.wav");
    write_wav(path, a);
    const auto b = read_wav(path);
    REQUIRE(b.samples.size() == 16000);
    CHECK(b.sample_rate == 16000);
    for (double s : b.samples) CHECK(s == 0.0);
  }
  SUBCASE("full-scale square wave alternates +-32767/32768") {
    AudioBuffer a;
    a.sample_rate = 16000;
    for (int i = 0; i < 64; ++i) a.samples.push_back(i % 2 == 0 ? 1.0 : -1.0);
    const auto path = temp_path("vgan_square.wav");
    write_wav(path, a);
    const auto b = read_wav(path);
    REQUIRE(b.samples.size() == 64);
    for (std::size_t i = 0; i < b.samples.size(); ++i) {
      const double expect = (i % 2 == 0 ? 32767.0 : -32768.0) / 32768.0;
      CHECK(b.samples[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("stereo wav keeps channel 0 and per-channel frame count") {
  // Hand-built 2-channel file: 10 frames, left channel = 1000*i, right = -1.
  std::string bytes = "RIFF";
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto u16 = [&](std::uint16_t v) {
    bytes.push_back(static_cast<char>(v & 0xff));
    bytes.push_back(static_cast<char>((v >> 8) & 0xff));
  };
  u32(36 + 40);
  bytes += "WAVEfmt ";
  u32(16);
  u16(1);      // PCM
  u16(2);      // stereo
  u32(16000);  // rate
  u32(16000 * 4);
  u16(4);
  u16(16);
  bytes += "data";
  u32(40);
  for (int i = 0; i < 10; ++i) {
    u16(static_cast<std::uint16_t>(1000 * i));
    u16(static_cast<std::uint16_t>(-1));
  }
  const auto path = temp_path("vgan_stereo.wav");
  write_text_file(path, bytes);
  const auto a = read_wav(path);
  REQUIRE(a.samples.size() == 10);  // frames, not total samples
  CHECK(a.samples[3] == doctest::Approx(3000.0 / 32768.0));
}

TEST_CASE("wav errors name the offending chunk") {
  const auto path = temp_path("vgan_bad.wav");
  SUBCASE("non-PCM encoding") {
    std::string bytes = "RIFF";
    auto u32 = [&](std::uint32_t v) {
      for (int i = 0; i < 4; ++i)
        bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    auto u16 = [&](std::uint16_t v) {
      bytes.push_back(static_cast<char>(v & 0xff));
      bytes.push_back(static_cast<char>((v >> 8) & 0xff));
    };
    u32(36);
    bytes += "WAVEfmt ";
    u32(16);
    u16(3);  // IEEE float
    u16(1);
    u32(16000);
    u32(32000);
    u16(2);
    u16(16);
    write_text_file(path, bytes);
    try {
      read_wav(path);
      FAIL("expected parse error");
    } catch (const VganError& e) {
      CHECK(e.code() == Errc::parse);
      CHECK(std::string(e.what()).find("fmt") != std::string::npos);
    }
  }
  SUBCASE("truncated data chunk") {
    AudioBuffer a;
    a.sample_rate = 16000;
    a.samples.assign(100, 0.25);
    write_wav(path, a);
    auto bytes = read_text_file(path);
    bytes.resize(bytes.size() - 50);
    write_text_file(path, bytes);
    try {
      read_wav(path);
      FAIL("expected parse error");
    } catch (const VganError& e) {
      CHECK(e.code() == Errc::parse);
      CHECK(std::string(e.what()).find("data") != std::string::npos);
    }
  }
}

TEST_CASE("textgrid parses a minimal single-tier file") {
  const std::string text =
      "File type = \"ooTextFile\"\n"
      "Object class = \"TextGrid\"\n\n"
      "xmin = 0\nxmax = 1\ntiers? <exists>\nsize = 1\nitem []:\n"
      "    item [1]:\n"
      "        class = \"IntervalTier\"\n"
      "        name = \"syllable\"\n"
      "        xmin = 0\n"
      "        xmax = 1\n"
      "        intervals: size = 1\n"
      "        intervals [1]:\n"
      "            xmin = 0\n"
      "            xmax = 1\n"
      "            text = \"a\"\n";
  const auto tiers = parse_textgrid(text);
  REQUIRE(tiers.size() == 1);
  CHECK(tiers[0].name == "syllable");
  REQUIRE(tiers[0].intervals.size() == 1);
  CHECK(tiers[0].intervals[0].start == 0.0);
  CHECK(tiers[0].intervals[0].end == 1.0);
  CHECK(tiers[0].intervals[0].label == "a");
}

TEST_CASE("textgrid point tiers are skipped with a warning") {
  const std::string text =
      "File type = \"ooTextFile\"\n"
      "Object class = \"TextGrid\"\n\n"
      "xmin = 0\nxmax = 1\ntiers? <exists>\nsize = 1\nitem []:\n"
      "    item [1]:\n"
      "        class = \"TextTier\"\n"
      "        name = \"points\"\n"
      "        xmin = 0\n"
      "        xmax = 1\n"
      "        points: size = 1\n"
      "        points [1]:\n"
      "            number = 0.5\n"
      "            mark = \"x\"\n";
  TextGridWarnings warnings;
  const auto tiers = parse_textgrid(text, &warnings);
  CHECK(tiers.empty());
  REQUIRE(warnings.messages.size() == 1);
  CHECK(warnings.messages[0].find("points") != std::string::npos);
}

TEST_CASE("textgrid parse errors carry line numbers") {
  const std::string text =
      "File type = \"ooTextFile\"\n"
      "Object class = \"TextGrid\"\n\n"
      "xmin = 0\nxmax = 1\ntiers? <exists>\nsize = 1\nitem []:\n"
      "    item [1]:\n"
      "        class = \"IntervalTier\"\n"
      "        name = \"t\"\n"
      "        xmin = 0\n"
      "        xmax = 1\n"
      "        intervals: size = 2\n"
      "        intervals [1]:\n"
      "            xmin = 0\n"
      "            xmax = 1\n"
      "            text = \"a\"\n";
  try {
    parse_textgrid(text);
    FAIL("expected parse error");
  } catch (const VganError& e) {
    CHECK(e.code() == Errc::parse);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
    CHECK(std::string(e.what()).find("declared 2") != std::string::npos);
  }
}

namespace {

std::vector<SegmentTier> random_tiers(Rng& rng) {
  std::vector<SegmentTier> tiers;
  const int n_tiers = 1 + static_cast<int>(rng.index(3));
  for (int t = 0; t < n_tiers; ++t) {
    SegmentTier tier;
    tier.name = "tier" + std::to_string(t) + (rng.index(2) ? " with \"quotes\"" : "");
    double cursor = rng.uniform(0.0, 0.5);
    const int n = static_cast<int>(rng.index(6));
    for (int i = 0; i < n; ++i) {
      Interval iv;
      iv.start = cursor;
      cursor += rng.uniform(0.01, 1.0);
      iv.end = cursor;
      const char* labels[] = {"ma", "", "he said \"hi\"", "nv", "x,y", "mi"};
      iv.label = labels[rng.index(6)];
      cursor += rng.uniform(0.0, 0.2);
      tier.intervals.push_back(iv);
    }
    tiers.push_back(tier);
  }
  return tiers;
}

bool tiers_equal(const std::vector<SegmentTier>& a, const std::vector<SegmentTier>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].name != b[t].name) return false;
    if (a[t].intervals.size() != b[t].intervals.size()) return false;
    for (std::size_t i = 0; i < a[t].intervals.size(); ++i) {
      const auto& x = a[t].intervals[i];
      const auto& y = b[t].intervals[i];
      if (x.start != y.start || x.end != y.end || x.label != y.label) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("textgrid serialize/parse round trip on generated grids") {
  Rng rng = Rng::seeded(2024);
  for (int iter = 0; iter < 100; ++iter) {
    const auto tiers = random_tiers(rng);
    const auto text = serialize_textgrid(tiers);
    const auto back = parse_textgrid(text);
    REQUIRE(tiers_equal(tiers, back));
    // And a second round trip re-serializes to identical bytes.
    CHECK(serialize_textgrid(back) == text);
  }
}

TEST_CASE("segments csv") {
  SUBCASE("two disjoint rows") {
    const auto tier = parse_segments_csv("start,end,label\n0.0,0.5,ma\n0.6,1.0,mi\n");
    REQUIRE(tier.intervals.size() == 2);
  }
  SUBCASE("unsorted rows come out sorted") {
    const auto tier = parse_segments_csv("start,end,label\n0.6,1.0,mi\n0.0,0.5,ma\n");
    REQUIRE(tier.intervals.size() == 2);
    CHECK(tier.intervals[0].label == "ma");
    CHECK(tier.intervals[1].label == "mi");
  }
  SUBCASE("overlap is rejected") {
    CHECK_THROWS_AS(parse_segments_csv("start,end,label\n0,0.5,ma\n0.4,1,mi\n"),
                    VganError);
  }
  SUBCASE("start >= end is rejected with the row number") {
    try {
      parse_segments_csv("start,end,label\n0.5,0.5,ma\n");
      FAIL("expected error");
    } catch (const VganError& e) {
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
}

TEST_CASE("landmark csv") {
  LandmarkIndexMap map;
  map.left_corner = 0;
  map.right_corner = 1;
  map.upper_mid = 2;
  map.lower_mid = 3;
  map.inner_upper = {2};
  map.inner_lower = {3};

  SUBCASE("fps inferred as (count-1)/span") {
    std::string text = "frame,t,x0,y0,x1,y1,x2,y2,x3,y3\n";
    for (int i = 0; i < 25; ++i) {
      text += std::to_string(i) + "," + format_double(i / 24.0) +
              ",0,0,1,0,0.5,1,0.5,-1\n";
    }
    const auto seq = read_landmarks_csv(text, map);
    CHECK(seq.fps == doctest::Approx(24.0));
    CHECK(seq.frames.size() == 25);
  }
  SUBCASE("single frame is rejected") {
    CHECK_THROWS_AS(
        read_landmarks_csv("frame,t,x0,y0,x1,y1,x2,y2,x3,y3\n0,0,0,0,1,0,0.5,1,0.5,-1\n",
                           map),
        VganError);
  }
  SUBCASE("ragged row is rejected naming the row") {
    try {
      read_landmarks_csv(
          "frame,t,x0,y0,x1,y1,x2,y2,x3,y3\n"
          "0,0,0,0,1,0,0.5,1,0.5,-1\n"
          "1,0.1,0,0,1,0\n",
          map);
      FAIL("expected error");
    } catch (const VganError& e) {
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
  }
  SUBCASE("non-monotone time is rejected") {
    CHECK_THROWS_AS(read_landmarks_csv(
                        "frame,t,x0,y0,x1,y1,x2,y2,x3,y3\n"
                        "0,0.5,0,0,1,0,0.5,1,0.5,-1\n"
                        "1,0.2,0,0,1,0,0.5,1,0.5,-1\n",
                        map),
                    VganError);
  }
}

TEST_CASE("gop sidecar lookup") {
  const auto table = GopTable::parse(
      "recording_id,start,end,gop_vowel,gop_consonant\nr1,0.5,1,0.8,0.9\n");
  const auto hit = table.lookup("r1", 0.5, 1.0);
  REQUIRE(hit.has_value());
  CHECK(hit->gop_vowel == 0.8);
  CHECK(hit->gop_consonant == 0.9);
  CHECK(!table.lookup("r1", 0.6, 1.0).has_value());
  CHECK(!table.lookup("r2", 0.5, 1.0).has_value());
}

TEST_CASE("manifest json round trip") {
  DatasetManifest m;
  SubjectEntry s;
  s.subject_id = "s1";
  s.fda_scores[0] = 95;
  s.fda_present[0] = true;
  s.fda_scores[1] = 17;
  s.fda_present[1] = true;
  m.subjects.push_back(s);
  RecordingEntry r;
  r.recording_id = "r1";
  r.subject_id = "s1";
  r.audio_path = "a.wav";
  r.segment_path = "a.TextGrid";
  r.landmark_path = "a.csv";
  r.fps = 30.0;
  m.recordings.push_back(r);

  const auto path = temp_path("vgan_manifest.json");
  write_manifest(m, path);
  const auto back = read_manifest(path);
  REQUIRE(back.subjects.size() == 1);
  REQUIRE(back.recordings.size() == 1);
  CHECK(back.subjects[0].score(FdaKind::total) == 95.0);
  CHECK(back.subjects[0].score(FdaKind::lips) == 17.0);
  CHECK(!back.subjects[0].score(FdaKind::jaw).has_value());
  CHECK(back.recordings[0].fps == 30.0);
  CHECK(back.base_dir == path_dir(path));
}

TEST_CASE("wav below 16 kHz is rejected") {
  AudioBuffer a;
  a.sample_rate = 8000;
  a.samples.assign(800, 0.1);
  const auto path = temp_path("vgan_lowrate.wav");
  write_wav(path, a);
  try {
    read_wav(path);
    FAIL("expected validation error");
  } catch (const VganError& e) {
    CHECK(e.code() == Errc::validation);
    CHECK(std::string(e.what()).find("16000") != std::string::npos);
  }
}
