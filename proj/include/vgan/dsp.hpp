#pragma once

#include <complex>
#include <vector>

#include "vgan/io.hpp"

namespace vgan::dsp {

using io::AudioBuffer;

struct PitchConfig {
  double f0_min = 60.0;
  double f0_max = 400.0;
  double window_s = 0.040;
  double hop_s = 0.010;
  double voicing_threshold = 0.3;  // on normalized autocorrelation
};

struct FormantConfig {
  double preemphasis = 0.97;
  double window_s = 0.025;
  double hop_s = 0.010;
  double max_bandwidth_hz = 400.0;
  double min_freq_hz = 90.0;
  double nyquist_margin_hz = 50.0;
  double min_duration_s = 0.050;
};

struct GneConfig {
  int residual_order = 13;
  double bandwidth_hz = 1000.0;
  double step_hz = 500.0;
  double first_center_hz = 500.0;
  double min_separation_hz = 500.0;
  double min_duration_s = 0.030;
};

struct VferConfig {
  int residual_order = 13;
  double split_hz = 2500.0;
  double energy_floor_ratio = 1e-12;  // floor on E_high relative to total
};

struct IntensityConfig {
  double window_s = 0.025;
  double hop_s = 0.010;
  double floor_db = -120.0;
};

struct DspConfig {
  PitchConfig pitch;
  FormantConfig formant;
  GneConfig gne;
  VferConfig vfer;
  IntensityConfig intensity;
};

// ---- pitch and pulses ---------------------------------------------------------

struct PulseSequence {
  std::vector<double> periods;          // seconds, one per consecutive pulse pair
  std::vector<double> peak_amplitudes;  // linear, aligned with periods
};

// Autocorrelation pitch tracking plus per-period pulse peak marking.
// Throws Errc::unvoiced when no frame reaches the voicing threshold and
// Errc::insufficient_data when shorter than 3/f0_min.
PulseSequence estimate_pitch_track(const AudioBuffer& audio, const PitchConfig& cfg);

double jitter_local(const PulseSequence& p);   // mean|T_i-T_{i+1}| / mean(T_i)
double shimmer_local(const PulseSequence& p);  // mean|A_i-A_{i+1}| / mean(A_i)

// ---- voice quality --------------------------------------------------------------

// 10*log10(r/(1-r)) with r clamped to [1e-6, 1-1e-6].
double hnr_from_correlation(double r);
// Mean frame HNR over voiced frames.
double hnr_db(const AudioBuffer& segment, const PitchConfig& cfg);

// Cross-band Hilbert-envelope correlation of the LPC excitation residual.
double gne(const AudioBuffer& segment, const GneConfig& cfg);

// Low/high band energy ratio of the LPC residual, in dB.
double vfer(const AudioBuffer& segment, const VferConfig& cfg);
double vfer_from_residual(const std::vector<double>& residual, double sample_rate,
                          const VferConfig& cfg);

struct IntensityStats {
  double mean_db = 0.0;
  double std_db = 0.0;
};
IntensityStats intensity_stats(const AudioBuffer& segment, const IntensityConfig& cfg);

// ---- formants ----------------------------------------------------------------------

struct FormantFrame {
  double f1 = 0.0, f2 = 0.0, f3 = 0.0;  // Hz
  bool valid = false;
};

struct FormantTrack {
  std::vector<FormantFrame> frames;
};

struct FormantStats {
  double mean_f1 = 0.0, mean_f2 = 0.0, mean_f3 = 0.0;
  double std_f1 = 0.0, std_f2 = 0.0, std_f3 = 0.0;
  std::size_t valid_frames = 0;
};

FormantTrack lpc_formants(const AudioBuffer& segment, const FormantConfig& cfg);
FormantStats formant_stats(const FormantTrack& track);

// ---- scales ------------------------------------------------------------------------

// 13*atan(0.00076 f) + 3.5*atan((f/7500)^2)
double hz_to_bark(double f);

// ---- shared numerics -----------------------------------------------------------------

// Levinson-Durbin solve of the autocorrelation normal equations; returns LPC
// coefficients a[0..order] with a[0] = 1.
std::vector<double> levinson_durbin(const std::vector<double>& autocorr, int order);

// Inverse-filter residual e[n] = x[n] + sum a[k] x[n-k].
std::vector<double> lpc_residual(const std::vector<double>& x, double sample_rate,
                                 int order);

// Roots of a real polynomial c[0] + c[1] z + ... + c[n] z^n (Durand-Kerner).
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

}  // namespace vgan::dsp
