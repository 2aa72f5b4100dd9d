#pragma once

#include <complex>
#include <vector>

namespace vgan {

// In-place radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

// Forward FFT of a real signal zero-padded to the next power of two
// (at least min_size when given).
std::vector<std::complex<double>> fft_real(const std::vector<double>& x,
                                           std::size_t min_size = 0);

// Magnitude envelope of the analytic signal restricted to [f_lo, f_hi].
// Used for cross-band envelope correlation of excitation signals.
std::vector<double> band_envelope(const std::vector<double>& x,
                                  double sample_rate, double f_lo, double f_hi);

// Same, for many bands; the forward transform is computed once.
std::vector<std::vector<double>> band_envelopes(
    const std::vector<double>& x, double sample_rate,
    const std::vector<std::pair<double, double>>& bands);

}  // namespace vgan
