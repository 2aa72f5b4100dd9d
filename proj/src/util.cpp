#include "vgan/util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "vgan/errors.hpp"

namespace vgan {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) fail(Errc::usage, "Rng::index called with n=0");
  const std::uint64_t bound = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

double Rng::gaussian() {
  double u1 = uniform();
  double u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Rng Rng::child(std::uint64_t stream_id) const {
  return Rng::seeded(splitmix64(seed_value_ ^ splitmix64(stream_id + 0x51ed2701)));
}

double mean(const std::vector<double>& v) {
  if (v.empty()) fail(Errc::insufficient_data, "mean of empty vector");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.empty()) fail(Errc::insufficient_data, "stddev of empty vector");
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

double median(std::vector<double> v) {
  if (v.empty()) fail(Errc::insufficient_data, "median of empty vector");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    fail(Errc::insufficient_data, "pearson needs two equal-length series");
  const double ma = mean(a), mb = mean(b);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sxy += (a[i] - ma) * (b[i] - mb);
    sxx += (a[i] - ma) * (a[i] - ma);
    syy += (b[i] - mb) * (b[i] - mb);
  }
  if (sxx <= 0.0 || syy <= 0.0)
    fail(Errc::degenerate, "pearson of constant series");
  return sxy / std::sqrt(sxx * syy);
}

namespace {
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}
}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(ranks(a), ranks(b));
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, bool* ok) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(begin, &end);
  const bool good = end != begin && errno != ERANGE;
  if (ok) {
    // Trailing whitespace is tolerated, any other residue is not.
    const char* p = end;
    while (*p == ' ' || *p == '\t' || *p == '\r' || *p == '\n') ++p;
    *ok = good && *p == '\0' && s.find_first_not_of(" \t\r\n") != std::string::npos;
  }
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string dir = path_dir(path);
  if (!dir.empty()) make_dirs(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io, "cannot write file: " + path);
  out << content;
  if (!out) fail(Errc::io, "write failed: " + path);
}

std::string path_dir(const std::string& path) {
  const auto pos = path.find_last_of('/');
  return pos == std::string::npos ? "" : path.substr(0, pos);
}

std::string path_join(const std::string& dir, const std::string& rel) {
  if (rel.empty()) return dir;
  if (dir.empty() || rel.front() == '/') return rel;
  return dir.back() == '/' ? dir + rel : dir + "/" + rel;
}

void make_dirs(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::io, "cannot create directory " + dir + ": " + ec.message());
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::usage: return "usage";
    case Errc::parse: return "parse";
    case Errc::validation: return "validation";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::unvoiced: return "unvoiced";
    case Errc::missing_vowel: return "missing-vowel";
    case Errc::degenerate: return "degenerate";
    case Errc::numeric: return "numeric";
    case Errc::io: return "io";
  }
  return "unknown";
}

}  // namespace vgan
