#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace vgan {

// Deterministic RNG. The engine is the standardized mt19937_64; all
// distributions are implemented here so streams are identical across
// standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0,1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0,n) by rejection.
  std::size_t index(std::size_t n);

  // Box-Muller. Draws two uniforms per call; no cached state.
  double gaussian();

  double gaussian(double mean, double sigma) {
    return mean + sigma * gaussian();
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  // Independent child stream; distinct ids give uncorrelated streams.
  Rng child(std::uint64_t stream_id) const;

  std::uint64_t seed() const { return seed_value_; }

  static Rng seeded(std::uint64_t seed) {
    Rng r(seed);
    r.seed_value_ = seed;
    return r;
  }

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_value_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// ---- small statistics helpers -------------------------------------------

double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);  // population (divide by n)
double median(std::vector<double> v);
double pearson(const std::vector<double>& a, const std::vector<double>& b);
double spearman(const std::vector<double>& a, const std::vector<double>& b);

// ---- number <-> text ------------------------------------------------------

// Shortest representation that round-trips the exact double.
std::string format_double(double x);
double parse_double(const std::string& s, bool* ok = nullptr);

// ---- strings / files ------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);
std::string to_lower(std::string s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Directory of a path ("" when the path has no directory part).
std::string path_dir(const std::string& path);
// Joins base dir and a possibly relative path.
std::string path_join(const std::string& dir, const std::string& rel);
void make_dirs(const std::string& dir);

}  // namespace vgan
