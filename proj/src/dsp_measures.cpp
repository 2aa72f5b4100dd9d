#include <algorithm>
#include <cmath>
#include <complex>

#include "vgan/dsp.hpp"
#include "vgan/errors.hpp"
#include "vgan/fft.hpp"
#include "vgan/util.hpp"

namespace vgan::dsp {

std::vector<double> levinson_durbin(const std::vector<double>& autocorr, int order) {
  if (static_cast<int>(autocorr.size()) < order + 1)
    fail(Errc::insufficient_data, "levinson_durbin: need order+1 autocorrelation lags");
  if (autocorr[0] <= 0.0)
    fail(Errc::degenerate, "levinson_durbin: non-positive zero-lag energy");

  std::vector<double> a(order + 1, 0.0);
  a[0] = 1.0;
  double err = autocorr[0];
  for (int m = 1; m <= order; ++m) {
    double acc = autocorr[m];
    for (int k = 1; k < m; ++k) acc += a[k] * autocorr[m - k];
    const double reflection = -acc / err;
    std::vector<double> prev(a.begin(), a.begin() + m);
    for (int k = 1; k < m; ++k) a[k] = prev[k] + reflection * prev[m - k];
    a[m] = reflection;
    err *= (1.0 - reflection * reflection);
    if (err <= 0.0) err = 1e-12;  // marginally stable frame
  }
  return a;
}

std::vector<double> lpc_residual(const std::vector<double>& x, double /*sample_rate*/,
                                 int order) {
  if (static_cast<int>(x.size()) <= 2 * order)
    fail(Errc::insufficient_data, "lpc_residual: segment too short for LPC order");
  std::vector<double> r(order + 1, 0.0);
  for (int lag = 0; lag <= order; ++lag) {
    double acc = 0.0;
    for (std::size_t t = lag; t < x.size(); ++t) acc += x[t] * x[t - lag];
    r[lag] = acc;
  }
  if (r[0] <= 0.0) return std::vector<double>(x.size(), 0.0);
  const auto a = levinson_durbin(r, order);
  std::vector<double> e(x.size(), 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    double acc = x[t];
    for (int k = 1; k <= order; ++k) {
      if (t >= static_cast<std::size_t>(k)) acc += a[k] * x[t - k];
    }
    e[t] = acc;
  }
  return e;
}

namespace {

double centered_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sxy += (a[i] - ma) * (b[i] - mb);
    sxx += (a[i] - ma) * (a[i] - ma);
    syy += (b[i] - mb) * (b[i] - mb);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double gne(const AudioBuffer& segment, const GneConfig& cfg) {
  if (segment.duration() < cfg.min_duration_s)
    fail(Errc::insufficient_data, "gne: segment shorter than " +
                                      format_double(cfg.min_duration_s) + " s");
  const double nyquist = segment.sample_rate / 2.0;

  std::vector<double> centers;
  for (double c = cfg.first_center_hz; c <= nyquist - cfg.bandwidth_hz;
       c += cfg.step_hz)
    centers.push_back(c);
  if (centers.size() < 2)
    fail(Errc::usage, "gne: band configuration yields fewer than 2 bands");

  const auto residual =
      lpc_residual(segment.samples, segment.sample_rate, cfg.residual_order);

  std::vector<std::pair<double, double>> bands;
  bands.reserve(centers.size());
  for (double c : centers)
    bands.emplace_back(c - cfg.bandwidth_hz / 2.0, c + cfg.bandwidth_hz / 2.0);
  const auto envelopes = band_envelopes(residual, segment.sample_rate, bands);

  double best = -1.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      if (centers[j] - centers[i] < cfg.min_separation_hz) continue;
      best = std::max(best, centered_correlation(envelopes[i], envelopes[j]));
    }
  }
  if (best < -1.0 + 1e-12)
    fail(Errc::usage, "gne: no band pair satisfies the separation constraint");
  return std::clamp(best, 0.0, 1.0);
}

double vfer_from_residual(const std::vector<double>& residual, double sample_rate,
                          const VferConfig& cfg) {
  const auto spec = fft_real(residual);
  const std::size_t n = spec.size();
  const double df = sample_rate / static_cast<double>(n);
  double e_low = 0.0, e_high = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    const double p = std::norm(spec[k]);
    if (f < cfg.split_hz)
      e_low += p;
    else
      e_high += p;
  }
  const double total = e_low + e_high;
  if (total <= 0.0) fail(Errc::degenerate, "vfer: zero-energy residual");
  e_high = std::max(e_high, cfg.energy_floor_ratio * total);
  return 10.0 * std::log10(e_low / e_high);
}

double vfer(const AudioBuffer& segment, const VferConfig& cfg) {
  if (segment.duration() < 0.030)
    fail(Errc::insufficient_data, "vfer: segment shorter than 0.03 s");
  const auto residual =
      lpc_residual(segment.samples, segment.sample_rate, cfg.residual_order);
  return vfer_from_residual(residual, segment.sample_rate, cfg);
}

IntensityStats intensity_stats(const AudioBuffer& segment, const IntensityConfig& cfg) {
  const double sr = segment.sample_rate;
  const auto win = static_cast<std::size_t>(std::lround(cfg.window_s * sr));
  const auto hop = static_cast<std::size_t>(std::lround(cfg.hop_s * sr));

  std::vector<double> frames_db;
  if (segment.samples.size() >= win && win > 0) {
    for (std::size_t i0 = 0; i0 + win <= segment.samples.size(); i0 += hop) {
      double acc = 0.0;
      for (std::size_t t = 0; t < win; ++t)
        acc += segment.samples[i0 + t] * segment.samples[i0 + t];
      const double rms = std::sqrt(acc / static_cast<double>(win));
      const double db =
          rms > 0.0 ? std::max(20.0 * std::log10(rms), cfg.floor_db) : cfg.floor_db;
      frames_db.push_back(db);
    }
  }
  if (frames_db.empty()) {
    // Segment shorter than one window: single RMS over what is there.
    double acc = 0.0;
    for (double s : segment.samples) acc += s * s;
    const double rms =
        segment.samples.empty() ? 0.0 : std::sqrt(acc / segment.samples.size());
    frames_db.push_back(rms > 0.0 ? std::max(20.0 * std::log10(rms), cfg.floor_db)
                                  : cfg.floor_db);
  }
  return {mean(frames_db), stddev(frames_db)};
}

double hz_to_bark(double f) {
  if (f < 0.0) fail(Errc::usage, "hz_to_bark: negative frequency");
  return 13.0 * std::atan(0.00076 * f) + 3.5 * std::atan((f / 7500.0) * (f / 7500.0));
}

}  // namespace vgan::dsp
