#include <cmath>
#include <sstream>

#include "vgan/errors.hpp"
#include "vgan/io.hpp"
#include "vgan/util.hpp"

namespace vgan::io {

namespace {

// Line-oriented scanner for the Praat long "ooTextFile" format.
class Scanner {
 public:
  explicit Scanner(const std::string& text) {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines_.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) lines_.push_back(cur);
  }

  bool eof() const { return pos_ >= lines_.size(); }
  int line_no() const { return static_cast<int>(pos_) + 1; }

  [[noreturn]] void error(const std::string& msg) const {
    fail(Errc::parse, "TextGrid line " + std::to_string(line_no()) + ": " + msg);
  }

  // Next non-empty line, not consumed.
  const std::string* peek() {
    while (pos_ < lines_.size() && trim(lines_[pos_]).empty()) ++pos_;
    return pos_ < lines_.size() ? &lines_[pos_] : nullptr;
  }

  void advance() { ++pos_; }

  // Parses `key = value` returning the raw value text; accepts an optional
  // label prefix such as `intervals [1]:` being skipped by the caller.
  bool key_value(const std::string& key, std::string* value) {
    const std::string* line = peek();
    if (!line) return false;
    const std::string t = trim(*line);
    const auto eq = t.find('=');
    if (eq == std::string::npos) return false;
    if (trim(t.substr(0, eq)) != key) return false;
    *value = trim(t.substr(eq + 1));
    return true;
  }

  double number(const std::string& key) {
    std::string v;
    if (!key_value(key, &v)) error("expected `" + key + " = <number>`");
    bool ok = false;
    const double x = parse_double(v, &ok);
    if (!ok) error("cannot parse number for `" + key + "`: " + v);
    advance();
    return x;
  }

  // Quoted string; doubled quotes unescape, value may span lines.
  std::string quoted(const std::string& key) {
    std::string v;
    if (!key_value(key, &v)) error("expected `" + key + " = \"...\"`");
    if (v.empty() || v.front() != '"') error("expected quoted value for `" + key + "`");
    std::string out;
    std::string rest = v.substr(1);
    while (true) {
      std::size_t i = 0;
      for (; i < rest.size(); ++i) {
        if (rest[i] == '"') {
          if (i + 1 < rest.size() && rest[i + 1] == '"') {
            out.push_back('"');
            ++i;
          } else {
            advance();
            return out;
          }
        } else {
          out.push_back(rest[i]);
        }
      }
      // Unterminated on this line: the label continues on the next one.
      advance();
      if (eof()) error("unterminated string for `" + key + "`");
      out.push_back('\n');
      rest = lines_[pos_];
    }
  }

  // Consumes a structural line such as `item [1]:` when present.
  bool structural(const std::string& prefix) {
    const std::string* line = peek();
    if (!line) return false;
    const std::string t = trim(*line);
    if (t.rfind(prefix, 0) == 0) {
      advance();
      return true;
    }
    return false;
  }

  // `intervals: size = N` style combined line.
  long sized_list(const std::string& name) {
    const std::string* line = peek();
    if (!line) error("expected `" + name + ": size = <n>`");
    const std::string t = trim(*line);
    const std::string prefix = name + ":";
    if (t.rfind(prefix, 0) != 0) error("expected `" + name + ": size = <n>`");
    const auto eq = t.find('=');
    if (eq == std::string::npos) error("expected `size =` in `" + t + "`");
    bool ok = false;
    const double x = parse_double(trim(t.substr(eq + 1)), &ok);
    if (!ok || x < 0 || x != std::floor(x)) error("bad list size in `" + t + "`");
    advance();
    return static_cast<long>(x);
  }

 private:
  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<SegmentTier> parse_textgrid(const std::string& text,
                                        TextGridWarnings* warnings) {
  Scanner sc(text);

  if (sc.quoted("File type") != "ooTextFile")
    fail(Errc::parse, "TextGrid: not an ooTextFile header");
  if (sc.quoted("Object class") != "TextGrid")
    fail(Errc::parse, "TextGrid: object class is not TextGrid");

  sc.number("xmin");
  sc.number("xmax");
  if (!sc.structural("tiers?")) sc.error("expected `tiers? <exists>`");
  const long n_tiers = static_cast<long>(sc.number("size"));
  sc.structural("item []:");

  std::vector<SegmentTier> tiers;
  for (long t = 0; t < n_tiers; ++t) {
    if (!sc.structural("item [")) sc.error("expected `item [" + std::to_string(t + 1) + "]:`");
    const std::string cls = sc.quoted("class");
    const std::string name = sc.quoted("name");
    sc.number("xmin");
    sc.number("xmax");

    if (cls == "IntervalTier") {
      const long n = sc.sized_list("intervals");
      SegmentTier tier;
      tier.name = name;
      double prev_end = -1.0;
      for (long i = 0; i < n; ++i) {
        if (!sc.structural("intervals ["))
          sc.error("tier \"" + name + "\": declared " + std::to_string(n) +
                   " intervals but found " + std::to_string(i));
        Interval iv;
        iv.start = sc.number("xmin");
        iv.end = sc.number("xmax");
        iv.label = sc.quoted("text");
        if (!(iv.start < iv.end))
          sc.error("tier \"" + name + "\": interval " + std::to_string(i + 1) +
                   " has start >= end");
        if (iv.start < prev_end)
          sc.error("tier \"" + name + "\": interval " + std::to_string(i + 1) +
                   " overlaps its predecessor");
        prev_end = iv.end;
        tier.intervals.push_back(std::move(iv));
      }
      tiers.push_back(std::move(tier));
    } else if (cls == "TextTier") {
      const long n = sc.sized_list("points");
      for (long i = 0; i < n; ++i) {
        if (!sc.structural("points ["))
          sc.error("point tier \"" + name + "\": declared " + std::to_string(n) +
                   " points but found " + std::to_string(i));
        sc.number("number");
        sc.quoted("mark");
      }
      if (warnings)
        warnings->messages.push_back("skipped PointTier \"" + name + "\"");
    } else {
      sc.error("unsupported tier class \"" + cls + "\"");
    }
  }
  return tiers;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    out.push_back(c);
    if (c == '"') out.push_back('"');
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string serialize_textgrid(const std::vector<SegmentTier>& tiers) {
  double xmin = 0.0, xmax = 0.0;
  for (const auto& tier : tiers) {
    for (const auto& iv : tier.intervals) {
      xmin = std::min(xmin, iv.start);
      xmax = std::max(xmax, iv.end);
    }
  }
  std::ostringstream out;
  out << "File type = \"ooTextFile\"\n"
      << "Object class = \"TextGrid\"\n\n"
      << "xmin = " << format_double(xmin) << "\n"
      << "xmax = " << format_double(xmax) << "\n"
      << "tiers? <exists>\n"
      << "size = " << tiers.size() << "\n"
      << "item []:\n";
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    const auto& tier = tiers[t];
    double txmin = tier.intervals.empty() ? xmin : tier.intervals.front().start;
    double txmax = tier.intervals.empty() ? xmax : tier.intervals.back().end;
    out << "    item [" << (t + 1) << "]:\n"
        << "        class = \"IntervalTier\"\n"
        << "        name = " << quote(tier.name) << "\n"
        << "        xmin = " << format_double(txmin) << "\n"
        << "        xmax = " << format_double(txmax) << "\n"
        << "        intervals: size = " << tier.intervals.size() << "\n";
    for (std::size_t i = 0; i < tier.intervals.size(); ++i) {
      const auto& iv = tier.intervals[i];
      out << "        intervals [" << (i + 1) << "]:\n"
          << "            xmin = " << format_double(iv.start) << "\n"
          << "            xmax = " << format_double(iv.end) << "\n"
          << "            text = " << quote(iv.label) << "\n";
    }
  }
  return out.str();
}

SegmentTier parse_segments_csv(const std::string& text) {
  SegmentTier tier;
  tier.name = "segments";
  const auto lines = split(text, '\n');
  if (lines.empty() || split(trim(lines[0]), ',').size() < 3 ||
      to_lower(trim(split(lines[0], ',')[0])) != "start")
    fail(Errc::parse, "segments CSV: expected header `start,end,label`");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() < 3)
      fail(Errc::parse, "segments CSV row " + std::to_string(i + 1) +
                            ": expected 3 columns");
    bool ok1 = false, ok2 = false;
    Interval iv;
    iv.start = parse_double(cols[0], &ok1);
    iv.end = parse_double(cols[1], &ok2);
    iv.label = trim(cols[2]);
    if (!ok1 || !ok2)
      fail(Errc::parse, "segments CSV row " + std::to_string(i + 1) +
                            ": cannot parse start/end");
    if (!(iv.start < iv.end))
      fail(Errc::validation, "segments CSV row " + std::to_string(i + 1) +
                                 ": start >= end");
    tier.intervals.push_back(std::move(iv));
  }
  std::stable_sort(tier.intervals.begin(), tier.intervals.end(),
                   [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < tier.intervals.size(); ++i) {
    if (tier.intervals[i].start < tier.intervals[i - 1].end)
      fail(Errc::validation,
           "segments CSV: intervals [" + format_double(tier.intervals[i - 1].start) +
               "," + format_double(tier.intervals[i - 1].end) + ") and [" +
               format_double(tier.intervals[i].start) + "," +
               format_double(tier.intervals[i].end) + ") overlap");
  }
  return tier;
}

std::vector<SegmentTier> read_segments_file(const std::string& path,
                                            TextGridWarnings* warnings) {
  const std::string text = read_text_file(path);
  const std::string lower = to_lower(path);
  if (lower.size() >= 4 && lower.substr(lower.size() - 4) == ".csv")
    return {parse_segments_csv(text)};
  return parse_textgrid(text, warnings);
}

}  // namespace vgan::io
