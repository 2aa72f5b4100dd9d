#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "vgan/core.hpp"
#include "vgan/io.hpp"

namespace vgan::synth {

struct FormantTriple {
  double f1 = 0.0, f2 = 0.0, f3 = 0.0;
};

struct SynthConfig {
  double sample_rate = 16000.0;
  double f0_hz = 100.0;
  // Canonical formant targets per vowel; conventions shipped with the repo,
  // chosen on f0 harmonics so the estimators see clean resonances.
  std::map<VowelClass, FormantTriple> formant_table = {
      {VowelClass::A, {800.0, 1300.0, 2600.0}},
      {VowelClass::O, {500.0, 900.0, 2500.0}},
      {VowelClass::E, {500.0, 1200.0, 2600.0}},
      {VowelClass::I, {300.0, 2300.0, 3200.0}},
      {VowelClass::U, {300.0, 800.0, 2300.0}},
      {VowelClass::V, {300.0, 2000.0, 2800.0}},
  };
  std::array<double, 3> bandwidths_hz = {150.0, 200.0, 250.0};
  // Glottal pulse shaping pole: the source falls off ~6 dB/oct like a real
  // excitation, which is what formant pre-emphasis expects to undo.
  double glottal_rho = 0.96;
  double vowel_duration_s = 0.6;
  double pad_s = 0.15;  // leading/trailing silence per utterance
  int repetitions = 3;  // vowels repeated per subject
  double fps = 30.0;    // landmark stream
  double lip_amplitude_scale = 1.0;  // 0 freezes the mouth
  // Share of the score variance carried by an independent lip severity;
  // 0 keeps a single severity driving both modalities.
  double lip_weight = 0.0;
};

// Severity-derived degradation levels for one subject.
struct SynthProfile {
  double severity = 0.0;  // s in [0,1]
  double f0_hz = 100.0;
  double jitter_level() const { return severity * 0.03; }
  double shimmer_level() const { return severity * 0.06; }
  double centralization() const { return severity * 0.6; }
  double lip_slowdown() const { return severity * 0.5; }
  std::uint64_t seed = 0;
};

// Formants after centralization toward the table centroid.
FormantTriple centralized_formants(const SynthConfig& cfg, VowelClass vowel,
                                   double severity);

// Glottal pulse train with per-period jitter and amplitude shimmer through
// three cascaded resonators; peak-normalized to 0.5. Seeded, bit-stable.
io::AudioBuffer synth_vowel(VowelClass vowel, const SynthProfile& profile,
                            double duration_s, const SynthConfig& cfg);

// Parametric mouth: open-hold-close envelope with per-vowel peak amplitude,
// severity-scaled amplitude and speed, seeded tremor proportional to s.
io::LandmarkSequence synth_landmarks(VowelClass vowel, const SynthProfile& profile,
                                     double duration_s, double fps,
                                     const SynthConfig& cfg);

io::LandmarkIndexMap synthetic_index_map();

// Score formulas.
double total_score(double severity);  // round(116 - 79 s)
double subitem_score(FdaKind kind, double severity, double u_kind);

struct CorpusOptions {
  int n_subjects = 10;
  std::uint64_t seed = 0;
  SynthConfig synth;
};

// Emits WAVs, landmark CSVs, TextGrids and a manifest JSON under out_dir.
DatasetManifest gen_corpus(const CorpusOptions& options, const std::string& out_dir);

}  // namespace vgan::synth
