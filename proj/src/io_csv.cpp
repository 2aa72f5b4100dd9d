#include <cmath>
#include <sstream>

#include "vgan/errors.hpp"
#include "vgan/io.hpp"
#include "vgan/util.hpp"

namespace vgan::io {

int LandmarkIndexMap::max_index() const {
  int m = std::max({left_corner, right_corner, upper_mid, lower_mid});
  for (int i : inner_upper) m = std::max(m, i);
  for (int i : inner_lower) m = std::max(m, i);
  return m;
}

void LandmarkIndexMap::validate(int point_count) const {
  if (inner_upper.empty() || inner_upper.size() != inner_lower.size())
    fail(Errc::validation,
         "landmark index map: inner_upper/inner_lower must be nonempty and paired");
  for (int i : {left_corner, right_corner, upper_mid, lower_mid}) {
    if (i < 0) fail(Errc::validation, "landmark index map: missing corner/midpoint index");
  }
  if (max_index() >= point_count)
    fail(Errc::validation, "landmark index map references point " +
                               std::to_string(max_index()) + " but frames have " +
                               std::to_string(point_count) + " points");
}

LandmarkSequence read_landmarks_csv(const std::string& text,
                                    const LandmarkIndexMap& index_map,
                                    double fps_hint) {
  const auto lines = split(text, '\n');
  if (lines.empty()) fail(Errc::parse, "landmarks CSV: empty document");
  const auto header = split(trim(lines[0]), ',');
  if (header.size() < 4 || to_lower(trim(header[0])) != "frame" ||
      to_lower(trim(header[1])) != "t")
    fail(Errc::parse, "landmarks CSV: expected header `frame,t,x0,y0,...`");
  if ((header.size() - 2) % 2 != 0)
    fail(Errc::parse, "landmarks CSV: odd coordinate column count");
  const std::size_t n_points = (header.size() - 2) / 2;

  LandmarkSequence seq;
  seq.index_map = index_map;
  double prev_t = -1.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != header.size())
      fail(Errc::parse, "landmarks CSV row " + std::to_string(i + 1) + ": has " +
                            std::to_string(cols.size()) + " columns, header has " +
                            std::to_string(header.size()));
    LandmarkFrame frame;
    bool ok = false;
    frame.t = parse_double(cols[1], &ok);
    if (!ok)
      fail(Errc::parse, "landmarks CSV row " + std::to_string(i + 1) + ": bad t");
    if (!seq.frames.empty() && !(frame.t > prev_t))
      fail(Errc::parse, "landmarks CSV row " + std::to_string(i + 1) +
                            ": t not strictly increasing");
    prev_t = frame.t;
    frame.xs.resize(n_points);
    frame.ys.resize(n_points);
    for (std::size_t p = 0; p < n_points; ++p) {
      bool okx = false, oky = false;
      frame.xs[p] = parse_double(cols[2 + 2 * p], &okx);
      frame.ys[p] = parse_double(cols[3 + 2 * p], &oky);
      if (!okx || !oky)
        fail(Errc::parse, "landmarks CSV row " + std::to_string(i + 1) +
                              ": bad coordinate for point " + std::to_string(p));
    }
    seq.frames.push_back(std::move(frame));
  }
  if (seq.frames.size() < 2)
    fail(Errc::insufficient_data,
         "landmarks CSV: need at least 2 frames, velocity is undefined otherwise");
  index_map.validate(static_cast<int>(n_points));

  if (fps_hint > 0.0) {
    seq.fps = fps_hint;
  } else {
    const double span = seq.frames.back().t - seq.frames.front().t;
    seq.fps = static_cast<double>(seq.frames.size() - 1) / span;
  }
  return seq;
}

std::string serialize_landmarks_csv(const LandmarkSequence& seq) {
  std::ostringstream out;
  const int n = seq.point_count();
  out << "frame,t";
  for (int p = 0; p < n; ++p) out << ",x" << p << ",y" << p;
  out << "\n";
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto& f = seq.frames[i];
    out << i << "," << format_double(f.t);
    for (int p = 0; p < n; ++p)
      out << "," << format_double(f.xs[p]) << "," << format_double(f.ys[p]);
    out << "\n";
  }
  return out.str();
}

GopTable GopTable::parse(const std::string& text) {
  GopTable table;
  const auto lines = split(text, '\n');
  if (lines.empty()) return table;
  const auto header = split(trim(lines[0]), ',');
  if (header.size() < 5 || to_lower(trim(header[0])) != "recording_id")
    fail(Errc::parse,
         "GOP CSV: expected header `recording_id,start,end,gop_vowel,gop_consonant`");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() < 5)
      fail(Errc::parse, "GOP CSV row " + std::to_string(i + 1) + ": expected 5 columns");
    Row row;
    row.recording_id = trim(cols[0]);
    bool ok = true, okc = false;
    row.start = parse_double(cols[1], &okc); ok &= okc;
    row.end = parse_double(cols[2], &okc); ok &= okc;
    row.entry.gop_vowel = parse_double(cols[3], &okc); ok &= okc;
    row.entry.gop_consonant = parse_double(cols[4], &okc); ok &= okc;
    if (!ok) fail(Errc::parse, "GOP CSV row " + std::to_string(i + 1) + ": bad number");
    table.rows_.push_back(std::move(row));
  }
  return table;
}

std::optional<GopEntry> GopTable::lookup(const std::string& recording_id,
                                         double start, double end) const {
  for (const auto& row : rows_) {
    if (row.recording_id == recording_id && std::abs(row.start - start) < 1e-6 &&
        std::abs(row.end - end) < 1e-6)
      return row.entry;
  }
  return std::nullopt;
}

}  // namespace vgan::io
