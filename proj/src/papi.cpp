#include "vgan/papi.hpp"

#include <algorithm>
#include <cmath>

#include "vgan/errors.hpp"
#include "vgan/util.hpp"

namespace vgan::papi {

const std::array<std::string, kPapiDim>& papi_slot_names() {
  static const std::array<std::string, kPapiDim> names = {
      "jitter", "shimmer", "hnr_db", "gne", "vfer",
      "jaw_distance_hz", "tongue_distance_hz", "movement_degree", "vsa_hz2",
      "fcr", "vai",
      "f1_std_hz", "f2_std_hz", "f3_std_hz", "intensity_std_db",
      "mean_intensity_db", "syllable_duration_s", "vowel_duration_s",
      "gop_vowel", "gop_consonant"};
  return names;
}

const VowelFormantSet::F12& VowelFormantSet::require(VowelClass v) const {
  const auto it = means.find(v);
  if (it == means.end())
    fail(Errc::missing_vowel,
         std::string("formant set lacks vowel /") + vowel_name(v) + "/");
  return it->second;
}

double vowel_space_area(const VowelFormantSet& s) {
  const auto& a = s.require(VowelClass::A);
  const auto& i = s.require(VowelClass::I);
  const auto& u = s.require(VowelClass::U);
  return 0.5 * std::abs(a.f1 * (i.f2 - u.f2) + i.f1 * (u.f2 - a.f2) +
                        u.f1 * (a.f2 - i.f2));
}

double vowel_space_area_hull(const VowelFormantSet& s) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [v, f] : s.means) pts.emplace_back(f.f1, f.f2);
  if (pts.size() < 3) fail(Errc::missing_vowel, "hull VSA needs at least 3 vowels");
  std::sort(pts.begin(), pts.end());
  // Andrew monotone chain.
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    for (const auto& p : pts) {
      while (hull.size() >= base + 2 &&
             cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
        hull.pop_back();
      hull.push_back(p);
    }
    hull.pop_back();
    std::reverse(pts.begin(), pts.end());
  }
  double area2 = 0.0;
  for (std::size_t k = 0; k < hull.size(); ++k) {
    const auto& p = hull[k];
    const auto& q = hull[(k + 1) % hull.size()];
    area2 += p.first * q.second - q.first * p.second;
  }
  return 0.5 * std::abs(area2);
}

double fcr(const VowelFormantSet& s) {
  const auto& a = s.require(VowelClass::A);
  const auto& i = s.require(VowelClass::I);
  const auto& u = s.require(VowelClass::U);
  const double denom = i.f2 + a.f1;
  if (denom == 0.0) fail(Errc::degenerate, "fcr: zero denominator F2i+F1a");
  return (u.f2 + a.f2 + i.f1 + u.f1) / denom;
}

double vai(const VowelFormantSet& s) {
  const double f = fcr(s);
  if (f == 0.0) fail(Errc::degenerate, "vai: zero FCR");
  return 1.0 / f;
}

double movement_degree(const VowelFormantSet& s) {
  const auto& i = s.require(VowelClass::I);
  const auto& u = s.require(VowelClass::U);
  if (u.f2 == 0.0) fail(Errc::degenerate, "movement_degree: zero F2u");
  return i.f2 / u.f2;
}

double tongue_distance(const VowelFormantSet& s) {
  const auto& i = s.require(VowelClass::I);
  const auto& u = s.require(VowelClass::U);
  return std::abs(i.f2 - u.f2);
}

double jaw_distance(const VowelFormantSet& s) {
  const auto& a = s.require(VowelClass::A);
  const auto& i = s.require(VowelClass::I);
  return std::abs(a.f1 - i.f1);
}

PapiVector assemble_papi(const SyllableObservation& obs, const io::AudioBuffer& audio,
                         const io::Interval& vowel_interval,
                         const VowelFormantSet& subject_formants,
                         const PapiConfig& cfg) {
  if (vowel_interval.start < obs.start - 1e-9 || vowel_interval.end > obs.end + 1e-9)
    fail(Errc::validation, "vowel interval [" + format_double(vowel_interval.start) +
                               "," + format_double(vowel_interval.end) +
                               ") outside observation " + obs.key());

  PapiVector vec;
  const auto vowel_audio = io::slice(audio, vowel_interval.start, vowel_interval.end);

  try {
    const auto pulses = dsp::estimate_pitch_track(vowel_audio, cfg.dsp.pitch);
    vec[kJitter] = dsp::jitter_local(pulses);
    vec[kShimmer] = dsp::shimmer_local(pulses);
    vec[kHnrDb] = dsp::hnr_db(vowel_audio, cfg.dsp.pitch);
    vec[kGne] = dsp::gne(vowel_audio, cfg.dsp.gne);
    vec[kVfer] = dsp::vfer(vowel_audio, cfg.dsp.vfer);

    const auto track = dsp::lpc_formants(vowel_audio, cfg.dsp.formant);
    const auto stats = dsp::formant_stats(track);
    vec[kF1StdHz] = stats.std_f1;
    vec[kF2StdHz] = stats.std_f2;
    vec[kF3StdHz] = stats.std_f3;
  } catch (const VganError& e) {
    switch (e.code()) {
      case Errc::unvoiced:
      case Errc::insufficient_data:
      case Errc::degenerate:
      case Errc::numeric:
        vec.values = cfg.default_row;
        vec.measured = false;
        break;
      default:
        throw;
    }
  }

  const auto intensity = dsp::intensity_stats(vowel_audio, cfg.dsp.intensity);
  if (vec.measured) {
    vec[kIntensityStdDb] = intensity.std_db;
    vec[kMeanIntensityDb] = intensity.mean_db;

    vec[kVsaHz2] = cfg.vsa_hull ? vowel_space_area_hull(subject_formants)
                                : vowel_space_area(subject_formants);
    vec[kFcr] = fcr(subject_formants);
    vec[kVai] = vai(subject_formants);
    vec[kMovementDegree] = movement_degree(subject_formants);
    vec[kTongueDistanceHz] = tongue_distance(subject_formants);
    vec[kJawDistanceHz] = jaw_distance(subject_formants);

    vec[kSyllableDurationS] = obs.end - obs.start;
    vec[kVowelDurationS] = vowel_interval.end - vowel_interval.start;
  }

  vec.gop_present = obs.gop_vowel.has_value() && obs.gop_consonant.has_value();
  if (vec.gop_present) {
    vec[kGopVowel] = *obs.gop_vowel;
    vec[kGopConsonant] = *obs.gop_consonant;
  } else if (vec.measured) {
    vec[kGopVowel] = 0.0;
    vec[kGopConsonant] = 0.0;
  }

  for (double v : vec.values) {
    if (!std::isfinite(v))
      fail(Errc::numeric, "papi vector for " + obs.key() + " has a non-finite entry");
  }
  return vec;
}

}  // namespace vgan::papi
