#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vgan/core.hpp"

namespace vgan::io {

// ---- audio ------------------------------------------------------------------

struct AudioBuffer {
  std::vector<double> samples;  // mono, [-1,1]
  double sample_rate = 0.0;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// PCM16 WAV only. Multichannel input is reduced to channel 0; samples are
// scaled by 1/32768.
AudioBuffer read_wav(const std::string& path);
void write_wav(const std::string& path, const AudioBuffer& audio);

// Cut [start,end) seconds, clamped to the buffer.
AudioBuffer slice(const AudioBuffer& audio, double start, double end);

// ---- segment annotations -----------------------------------------------------

struct Interval {
  double start = 0.0;
  double end = 0.0;
  std::string label;
};

struct SegmentTier {
  std::string name;
  std::vector<Interval> intervals;  // sorted by start, non-overlapping
};

struct TextGridWarnings {
  std::vector<std::string> messages;
};

// Praat long "ooTextFile" format, IntervalTiers only. PointTiers are skipped
// with a warning. Labels unescape doubled quotes.
std::vector<SegmentTier> parse_textgrid(const std::string& text,
                                        TextGridWarnings* warnings = nullptr);

std::string serialize_textgrid(const std::vector<SegmentTier>& tiers);

// Header `start,end,label`, decimal seconds. Output sorted and validated.
SegmentTier parse_segments_csv(const std::string& text);

std::vector<SegmentTier> read_segments_file(const std::string& path,
                                            TextGridWarnings* warnings = nullptr);

// ---- landmarks ----------------------------------------------------------------

struct LandmarkFrame {
  double t = 0.0;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct LandmarkIndexMap {
  std::vector<int> inner_upper;  // paired with inner_lower by position
  std::vector<int> inner_lower;
  int left_corner = -1;
  int right_corner = -1;
  int upper_mid = -1;
  int lower_mid = -1;

  int max_index() const;
  void validate(int point_count) const;
};

struct LandmarkSequence {
  double fps = 0.0;
  std::vector<LandmarkFrame> frames;  // t strictly increasing, equal point count
  LandmarkIndexMap index_map;

  int point_count() const {
    return frames.empty() ? 0 : static_cast<int>(frames.front().xs.size());
  }
};

// Header `frame,t,x0,y0,...,xN,yN`; constant point count. fps inferred as
// (count-1)/(t_last-t_first) when fps_hint <= 0.
LandmarkSequence read_landmarks_csv(const std::string& text,
                                    const LandmarkIndexMap& index_map,
                                    double fps_hint = 0.0);

std::string serialize_landmarks_csv(const LandmarkSequence& seq);

// ---- GOP sidecar ---------------------------------------------------------------

struct GopEntry {
  double gop_vowel = 0.0;
  double gop_consonant = 0.0;
};

// `recording_id,start,end,gop_vowel,gop_consonant`; keys match observations
// by recording id and start/end within 1e-6 s.
class GopTable {
 public:
  static GopTable parse(const std::string& text);
  std::optional<GopEntry> lookup(const std::string& recording_id, double start,
                                 double end) const;
  bool empty() const { return rows_.empty(); }

 private:
  struct Row {
    std::string recording_id;
    double start, end;
    GopEntry entry;
  };
  std::vector<Row> rows_;
};

// ---- manifest ---------------------------------------------------------------------

DatasetManifest read_manifest(const std::string& path);
void write_manifest(const DatasetManifest& manifest, const std::string& path);

}  // namespace vgan::io
