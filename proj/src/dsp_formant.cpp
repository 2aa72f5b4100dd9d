#include <algorithm>
#include <cmath>
#include <complex>

#include "vgan/dsp.hpp"
#include "vgan/errors.hpp"
#include "vgan/util.hpp"

namespace vgan::dsp {

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
  int degree = static_cast<int>(coeffs.size()) - 1;
  while (degree > 0 && coeffs[degree] == 0.0) --degree;
  if (degree < 1) fail(Errc::degenerate, "polynomial_roots: degree < 1");

  std::vector<std::complex<double>> c(degree + 1);
  for (int i = 0; i <= degree; ++i) c[i] = coeffs[i] / coeffs[degree];

  auto eval = [&](std::complex<double> z) {
    std::complex<double> acc = c[degree];
    for (int i = degree - 1; i >= 0; --i) acc = acc * z + c[i];
    return acc;
  };

  // Durand-Kerner from staggered points on a non-unit circle.
  std::vector<std::complex<double>> roots(degree);
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> p(1.0, 0.0);
  for (int i = 0; i < degree; ++i) {
    p *= seed;
    roots[i] = p;
  }

  for (int iter = 0; iter < 800; ++iter) {
    double max_step = 0.0;
    for (int i = 0; i < degree; ++i) {
      std::complex<double> denom(1.0, 0.0);
      for (int j = 0; j < degree; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      if (std::abs(denom) < 1e-300) denom = 1e-300;
      const std::complex<double> step = eval(roots[i]) / denom;
      roots[i] -= step;
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step < 1e-12) break;
  }
  return roots;
}

namespace {

FormantFrame analyze_frame(const std::vector<double>& frame, double sr,
                           const FormantConfig& cfg, int order) {
  FormantFrame out;

  std::vector<double> r(order + 1, 0.0);
  for (int lag = 0; lag <= order; ++lag) {
    double acc = 0.0;
    for (std::size_t t = lag; t < frame.size(); ++t) acc += frame[t] * frame[t - lag];
    r[lag] = acc;
  }
  if (r[0] < 1e-12) return out;  // silent frame

  const auto a = levinson_durbin(r, order);

  // A(z) = 1 + a1 z^-1 + ... + ap z^-p; roots of z^p A(z).
  std::vector<double> poly(order + 1);
  for (int k = 0; k <= order; ++k) poly[k] = a[order - k];

  std::vector<double> candidates;
  for (const auto& z : polynomial_roots(poly)) {
    if (z.imag() <= 0.0) continue;  // one of each conjugate pair
    const double mag = std::abs(z);
    if (mag <= 0.0 || mag >= 1.0) continue;
    const double freq = std::atan2(z.imag(), z.real()) * sr / (2.0 * M_PI);
    const double bandwidth = -sr / M_PI * std::log(mag);
    if (bandwidth >= cfg.max_bandwidth_hz) continue;
    if (freq <= cfg.min_freq_hz || freq >= sr / 2.0 - cfg.nyquist_margin_hz) continue;
    candidates.push_back(freq);
  }
  if (candidates.size() < 3) return out;
  std::sort(candidates.begin(), candidates.end());
  out.f1 = candidates[0];
  out.f2 = candidates[1];
  out.f3 = candidates[2];
  out.valid = true;
  return out;
}

}  // namespace

FormantTrack lpc_formants(const AudioBuffer& segment, const FormantConfig& cfg) {
  const double sr = segment.sample_rate;
  if (segment.duration() < cfg.min_duration_s)
    fail(Errc::insufficient_data, "lpc_formants: segment shorter than " +
                                      format_double(cfg.min_duration_s) + " s");

  std::vector<double> emphasized(segment.samples.size());
  for (std::size_t i = 0; i < segment.samples.size(); ++i) {
    emphasized[i] = segment.samples[i] -
                    (i > 0 ? cfg.preemphasis * segment.samples[i - 1] : 0.0);
  }

  const auto win = static_cast<std::size_t>(std::lround(cfg.window_s * sr));
  const auto hop = static_cast<std::size_t>(std::lround(cfg.hop_s * sr));
  const int order = 2 + static_cast<int>(std::lround(sr / 1000.0));

  std::vector<double> hamming(win);
  for (std::size_t i = 0; i < win; ++i) {
    hamming[i] =
        0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                               static_cast<double>(win - 1));
  }

  FormantTrack track;
  std::vector<double> frame(win);
  for (std::size_t i0 = 0; i0 + win <= emphasized.size(); i0 += hop) {
    for (std::size_t t = 0; t < win; ++t) frame[t] = emphasized[i0 + t] * hamming[t];
    track.frames.push_back(analyze_frame(frame, sr, cfg, order));
  }
  if (track.frames.empty())
    fail(Errc::insufficient_data, "lpc_formants: segment shorter than one frame");
  return track;
}

FormantStats formant_stats(const FormantTrack& track) {
  std::vector<double> f1, f2, f3;
  for (const auto& frame : track.frames) {
    if (!frame.valid) continue;
    f1.push_back(frame.f1);
    f2.push_back(frame.f2);
    f3.push_back(frame.f3);
  }
  if (f1.empty())
    fail(Errc::numeric, "formant_stats: no valid formant frames in track");
  FormantStats s;
  s.valid_frames = f1.size();
  s.mean_f1 = mean(f1);
  s.mean_f2 = mean(f2);
  s.mean_f3 = mean(f3);
  s.std_f1 = stddev(f1);
  s.std_f2 = stddev(f2);
  s.std_f3 = stddev(f3);
  return s;
}

}  // namespace vgan::dsp
