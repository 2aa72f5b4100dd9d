#include <algorithm>
#include <cmath>

#include "vgan/dsp.hpp"
#include "vgan/errors.hpp"
#include "vgan/util.hpp"

namespace vgan::dsp {

namespace {

struct VoicedFrame {
  std::size_t center;  // sample index of the frame center
  double f0;
  double r;  // normalized autocorrelation at the period lag
};

// Normalized autocorrelation of x[i0..i0+len) at lag tau:
// sum x_t x_{t+tau} / sqrt(sum x_t^2 * sum x_{t+tau}^2), sums over len-tau terms.
double norm_autocorr(const std::vector<double>& x, std::size_t i0, std::size_t len,
                     std::size_t tau) {
  double num = 0.0, e0 = 0.0, e1 = 0.0;
  const std::size_t n = len - tau;
  for (std::size_t t = 0; t < n; ++t) {
    const double a = x[i0 + t];
    const double b = x[i0 + t + tau];
    num += a * b;
    e0 += a * a;
    e1 += b * b;
  }
  const double denom = std::sqrt(e0 * e1);
  return denom > 0.0 ? num / denom : 0.0;
}

std::vector<VoicedFrame> voiced_frames(const AudioBuffer& audio, const PitchConfig& cfg) {
  const double sr = audio.sample_rate;
  const auto win = static_cast<std::size_t>(std::lround(cfg.window_s * sr));
  const auto hop = static_cast<std::size_t>(std::lround(cfg.hop_s * sr));
  const auto lag_min = static_cast<std::size_t>(std::floor(sr / cfg.f0_max));
  const auto lag_max = static_cast<std::size_t>(std::ceil(sr / cfg.f0_min));

  std::vector<VoicedFrame> out;
  if (audio.samples.size() < win || lag_max + 8 >= win) return out;

  for (std::size_t i0 = 0; i0 + win <= audio.samples.size(); i0 += hop) {
    // Small octave cost so a perfectly periodic signal resolves to its
    // fundamental rather than a subharmonic of equal correlation.
    double best_r = -1.0, best_score = -1e9;
    std::size_t best_tau = 0;
    for (std::size_t tau = lag_min; tau <= lag_max; ++tau) {
      const double r = norm_autocorr(audio.samples, i0, win, tau);
      const double score =
          r - 0.01 * std::log2(static_cast<double>(tau) /
                               static_cast<double>(lag_min));
      if (score > best_score) {
        best_score = score;
        best_r = r;
        best_tau = tau;
      }
    }
    if (best_r < cfg.voicing_threshold) continue;

    // Parabolic refinement of the autocorrelation peak.
    double tau_ref = static_cast<double>(best_tau);
    if (best_tau > lag_min && best_tau < lag_max) {
      const double rm = norm_autocorr(audio.samples, i0, win, best_tau - 1);
      const double rp = norm_autocorr(audio.samples, i0, win, best_tau + 1);
      const double denom = rm - 2.0 * best_r + rp;
      if (std::abs(denom) > 1e-12) {
        const double delta = 0.5 * (rm - rp) / denom;
        if (std::abs(delta) <= 1.0) tau_ref += delta;
      }
    }
    out.push_back({i0 + win / 2, sr / tau_ref, best_r});
  }
  return out;
}

double f0_near(const std::vector<VoicedFrame>& frames, double sample_pos) {
  double best_d = 1e300, f0 = frames.front().f0;
  for (const auto& f : frames) {
    const double d = std::abs(static_cast<double>(f.center) - sample_pos);
    if (d < best_d) {
      best_d = d;
      f0 = f.f0;
    }
  }
  return f0;
}

struct Peak {
  double pos;  // samples, sub-sample refined
  double amp;
};

// Highest |x| in [lo,hi], parabolic sub-sample refinement.
Peak find_peak(const std::vector<double>& x, long lo, long hi) {
  lo = std::max(lo, 0L);
  hi = std::min(hi, static_cast<long>(x.size()) - 1);
  long best = lo;
  for (long i = lo; i <= hi; ++i) {
    if (std::abs(x[i]) > std::abs(x[best])) best = i;
  }
  double pos = static_cast<double>(best);
  double amp = std::abs(x[best]);
  if (best > 0 && best + 1 < static_cast<long>(x.size())) {
    const double ym = std::abs(x[best - 1]);
    const double y0 = std::abs(x[best]);
    const double yp = std::abs(x[best + 1]);
    const double denom = ym - 2.0 * y0 + yp;
    if (std::abs(denom) > 1e-15) {
      const double delta = 0.5 * (ym - yp) / denom;
      if (std::abs(delta) <= 0.5) {
        pos += delta;
        amp = y0 - 0.25 * (ym - yp) * delta;
      }
    }
  }
  return {pos, amp};
}

}  // namespace

PulseSequence estimate_pitch_track(const AudioBuffer& audio, const PitchConfig& cfg) {
  const double sr = audio.sample_rate;
  if (audio.duration() < 3.0 / cfg.f0_min)
    fail(Errc::insufficient_data,
         "segment shorter than 3 periods of f0_min (" +
             format_double(3.0 / cfg.f0_min) + " s)");

  const auto frames = voiced_frames(audio, cfg);
  if (frames.empty()) fail(Errc::unvoiced, "no voiced frames in segment");

  // Start pulse marking at the most periodic frame, then walk both ways.
  const auto anchor = std::max_element(
      frames.begin(), frames.end(),
      [](const VoicedFrame& a, const VoicedFrame& b) { return a.r < b.r; });

  const double t_min = sr / cfg.f0_max;  // lag bounds in samples
  const double t_max = sr / cfg.f0_min;

  const double anchor_period = sr / anchor->f0;
  const auto anchor_center = static_cast<double>(anchor->center);
  Peak first = find_peak(audio.samples,
                         static_cast<long>(anchor_center - anchor_period / 2),
                         static_cast<long>(anchor_center + anchor_period / 2));

  std::vector<Peak> pulses = {first};
  // Walk right.
  while (true) {
    const Peak& last = pulses.back();
    const double period = sr / f0_near(frames, last.pos);
    const double lo = std::max(0.8 * period, t_min);
    const double hi = std::min(1.25 * period, t_max);
    if (last.pos + lo >= static_cast<double>(audio.samples.size()) - 1) break;
    Peak next = find_peak(audio.samples, static_cast<long>(std::lround(last.pos + lo)),
                          static_cast<long>(std::lround(last.pos + hi)));
    if (next.pos - last.pos < t_min || next.pos - last.pos > t_max) break;
    if (next.amp < 1e-9) break;
    pulses.push_back(next);
  }
  // Walk left.
  while (true) {
    const Peak& head = pulses.front();
    const double period = sr / f0_near(frames, head.pos);
    const double lo = std::max(0.8 * period, t_min);
    const double hi = std::min(1.25 * period, t_max);
    if (head.pos - lo <= 1.0) break;
    Peak prev = find_peak(audio.samples, static_cast<long>(std::lround(head.pos - hi)),
                          static_cast<long>(std::lround(head.pos - lo)));
    if (head.pos - prev.pos < t_min || head.pos - prev.pos > t_max) break;
    if (prev.amp < 1e-9) break;
    pulses.insert(pulses.begin(), prev);
  }

  PulseSequence seq;
  for (std::size_t i = 0; i + 1 < pulses.size(); ++i) {
    seq.periods.push_back((pulses[i + 1].pos - pulses[i].pos) / sr);
    seq.peak_amplitudes.push_back(pulses[i].amp);
  }
  if (seq.periods.empty())
    fail(Errc::unvoiced, "could not mark two pulses in segment");
  return seq;
}

namespace {
double relative_sequence_perturbation(const std::vector<double>& v,
                                      const char* what) {
  if (v.size() < 3)
    fail(Errc::insufficient_data,
         std::string(what) + ": need at least 3 values, got " +
             std::to_string(v.size()));
  double num = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) num += std::abs(v[i] - v[i + 1]);
  num /= static_cast<double>(v.size() - 1);
  const double denom = mean(v);
  if (denom <= 0.0) fail(Errc::degenerate, std::string(what) + ": non-positive mean");
  return num / denom;
}
}  // namespace

double jitter_local(const PulseSequence& p) {
  return relative_sequence_perturbation(p.periods, "jitter");
}

double shimmer_local(const PulseSequence& p) {
  return relative_sequence_perturbation(p.peak_amplitudes, "shimmer");
}

double hnr_from_correlation(double r) {
  r = std::clamp(r, 1e-6, 1.0 - 1e-6);
  return 10.0 * std::log10(r / (1.0 - r));
}

double hnr_db(const AudioBuffer& segment, const PitchConfig& cfg) {
  const auto frames = voiced_frames(segment, cfg);
  if (frames.empty()) fail(Errc::unvoiced, "hnr: no voiced frames in segment");
  double acc = 0.0;
  for (const auto& f : frames) acc += hnr_from_correlation(f.r);
  return acc / static_cast<double>(frames.size());
}

}  // namespace vgan::dsp
