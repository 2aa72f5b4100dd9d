#include "vgan/fft.hpp"

#include <cmath>

#include "vgan/errors.hpp"

namespace vgan {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    fail(Errc::numeric, "fft size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

std::vector<std::complex<double>> fft_real(const std::vector<double>& x,
                                           std::size_t min_size) {
  std::size_t n = next_pow2(std::max(x.size(), std::max<std::size_t>(min_size, 2)));
  std::vector<std::complex<double>> a(n);
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = x[i];
  fft(a, false);
  return a;
}

namespace {

std::vector<double> envelope_from_spectrum(
    const std::vector<std::complex<double>>& spectrum, std::size_t out_len,
    double sample_rate, double f_lo, double f_hi) {
  const std::size_t n = spectrum.size();
  const double df = sample_rate / static_cast<double>(n);
  // Analytic band signal: keep positive frequencies inside the band, doubled.
  std::vector<std::complex<double>> masked(n, 0.0);
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f >= f_lo && f <= f_hi) masked[k] = 2.0 * spectrum[k];
  }
  fft(masked, true);
  std::vector<double> env(out_len);
  for (std::size_t i = 0; i < out_len; ++i) env[i] = std::abs(masked[i]);
  return env;
}

}  // namespace

std::vector<double> band_envelope(const std::vector<double>& x,
                                  double sample_rate, double f_lo, double f_hi) {
  return envelope_from_spectrum(fft_real(x), x.size(), sample_rate, f_lo, f_hi);
}

std::vector<std::vector<double>> band_envelopes(
    const std::vector<double>& x, double sample_rate,
    const std::vector<std::pair<double, double>>& bands) {
  const auto spectrum = fft_real(x);
  std::vector<std::vector<double>> out;
  out.reserve(bands.size());
  for (const auto& [lo, hi] : bands)
    out.push_back(envelope_from_spectrum(spectrum, x.size(), sample_rate, lo, hi));
  return out;
}

}  // namespace vgan
