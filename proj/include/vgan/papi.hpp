#pragma once

#include <array>
#include <map>
#include <string>

#include "vgan/core.hpp"
#include "vgan/dsp.hpp"
#include "vgan/io.hpp"

namespace vgan::papi {

inline constexpr int kPapiDim = 20;

// Canonical slot order of the 20-dim acoustic feature vector.
enum PapiSlot : int {
  kJitter = 0, kShimmer, kHnrDb, kGne, kVfer,
  kJawDistanceHz, kTongueDistanceHz, kMovementDegree, kVsaHz2, kFcr, kVai,
  kF1StdHz, kF2StdHz, kF3StdHz, kIntensityStdDb,
  kMeanIntensityDb, kSyllableDurationS, kVowelDurationS,
  kGopVowel, kGopConsonant,
};

const std::array<std::string, kPapiDim>& papi_slot_names();

struct PapiVector {
  std::array<double, kPapiDim> values{};
  bool measured = true;     // false when the default row was substituted
  bool gop_present = false;

  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
};

// Per-vowel mean (F1,F2), at least /a/, /i/, /u/ for the space metrics.
struct VowelFormantSet {
  struct F12 {
    double f1 = 0.0;
    double f2 = 0.0;
  };
  std::map<VowelClass, F12> means;

  const F12& require(VowelClass v) const;
  bool has(VowelClass v) const { return means.count(v) != 0; }
};

// Triangle area of /a/-/i/-/u/ in the (F1,F2) plane (shoelace), Hz^2.
double vowel_space_area(const VowelFormantSet& s);
// Convex-hull polygon area over every vowel present (optional variant).
double vowel_space_area_hull(const VowelFormantSet& s);

double fcr(const VowelFormantSet& s);  // (F2u+F2a+F1i+F1u)/(F2i+F1a)
double vai(const VowelFormantSet& s);  // 1/FCR

double movement_degree(const VowelFormantSet& s);  // F2i/F2u
double tongue_distance(const VowelFormantSet& s);  // |F2i-F2u|
double jaw_distance(const VowelFormantSet& s);     // |F1a-F1i|

struct PapiConfig {
  dsp::DspConfig dsp;
  bool vsa_hull = false;  // default: /a/-/i/-/u/ triangle
  std::array<double, kPapiDim> default_row{};
};

// Audio measurements from the vowel interval; articulation-space metrics from
// the subject-level formant set; durations from the observation; GOP copied
// or defaulted to 0 with the flag cleared. Failed voicing-dependent
// measurements substitute the configured default row and clear `measured`.
PapiVector assemble_papi(const SyllableObservation& obs, const io::AudioBuffer& audio,
                         const io::Interval& vowel_interval,
                         const VowelFormantSet& subject_formants,
                         const PapiConfig& cfg);

}  // namespace vgan::papi
