#include "vgan/synth.hpp"

#include <cmath>

#include "vgan/errors.hpp"
#include "vgan/util.hpp"

namespace vgan::synth {

FormantTriple centralized_formants(const SynthConfig& cfg, VowelClass vowel,
                                   double severity) {
  const auto it = cfg.formant_table.find(vowel);
  if (it == cfg.formant_table.end())
    fail(Errc::usage, std::string("no formant table entry for vowel /") +
                          vowel_name(vowel) + "/");
  FormantTriple centroid;
  for (const auto& [v, f] : cfg.formant_table) {
    centroid.f1 += f.f1;
    centroid.f2 += f.f2;
    centroid.f3 += f.f3;
  }
  const double n = static_cast<double>(cfg.formant_table.size());
  centroid.f1 /= n;
  centroid.f2 /= n;
  centroid.f3 /= n;

  const double t = severity * 0.6;
  FormantTriple out = it->second;
  out.f1 += t * (centroid.f1 - out.f1);
  out.f2 += t * (centroid.f2 - out.f2);
  out.f3 += t * (centroid.f3 - out.f3);
  if (!(out.f1 < out.f2 && out.f2 < out.f3))
    fail(Errc::validation, "centralized formants lost their ordering");
  return out;
}

namespace {

// Two-pole resonator y[n] = x[n] + 2 r cos(theta) y[n-1] - r^2 y[n-2].
struct Resonator {
  double c1, c2;
  double y1 = 0.0, y2 = 0.0;

  Resonator(double freq, double bandwidth, double sr) {
    const double r = std::exp(-M_PI * bandwidth / sr);
    c1 = 2.0 * r * std::cos(2.0 * M_PI * freq / sr);
    c2 = -r * r;
  }
  double step(double x) {
    const double y = x + c1 * y1 + c2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

io::AudioBuffer synth_vowel(VowelClass vowel, const SynthProfile& profile,
                            double duration_s, const SynthConfig& cfg) {
  if (duration_s < 0.1)
    fail(Errc::usage, "synth_vowel: duration must be at least 0.1 s");
  const double sr = cfg.sample_rate;
  const auto n = static_cast<std::size_t>(std::lround(duration_s * sr));

  const auto formants = centralized_formants(cfg, vowel, profile.severity);

  Rng rng = Rng::seeded(profile.seed).child(17 + vowel_index(vowel));

  // Glottal source: impulse train with timing jitter and amplitude shimmer.
  // Impulses are deposited with a fractional two-sample split so that pulse
  // times are not quantized to the sample grid.
  std::vector<double> excitation(n, 0.0);
  const double base_period = sr / profile.f0_hz;
  double t = base_period * 0.5;
  while (t < static_cast<double>(n) - 2.0) {
    const double amp = 1.0 + profile.shimmer_level() * rng.gaussian();
    const auto i = static_cast<std::size_t>(std::floor(t));
    const double frac = t - std::floor(t);
    excitation[i] += amp * (1.0 - frac);
    excitation[i + 1] += amp * frac;
    t += base_period * (1.0 + profile.jitter_level() * rng.gaussian());
  }
  double shaped = 0.0;
  for (double& v : excitation) {
    shaped = v + cfg.glottal_rho * shaped;
    v = shaped;
  }

  Resonator r1(formants.f1, cfg.bandwidths_hz[0], sr);
  Resonator r2(formants.f2, cfg.bandwidths_hz[1], sr);
  Resonator r3(formants.f3, cfg.bandwidths_hz[2], sr);

  io::AudioBuffer out;
  out.sample_rate = sr;
  out.samples.resize(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = r3.step(r2.step(r1.step(excitation[i])));
    out.samples[i] = y;
    peak = std::max(peak, std::abs(y));
  }
  if (peak > 0.0) {
    const double gain = 0.5 / peak;
    for (double& s : out.samples) s *= gain;
  }
  return out;
}

io::LandmarkIndexMap synthetic_index_map() {
  io::LandmarkIndexMap map;
  map.left_corner = 0;
  map.right_corner = 1;
  map.upper_mid = 2;
  map.lower_mid = 3;
  map.inner_upper = {4, 5, 6};
  map.inner_lower = {7, 8, 9};
  return map;
}

namespace {

// Per-vowel mouth opening peak (pixels), open vowels larger.
double vowel_peak_opening(VowelClass v) {
  switch (v) {
    case VowelClass::A: return 24.0;
    case VowelClass::O: return 14.0;
    case VowelClass::E: return 16.0;
    case VowelClass::I: return 8.0;
    case VowelClass::U: return 10.0;
    case VowelClass::V: return 9.0;
  }
  return 12.0;
}

// Open-hold-close envelope in [0,1]; raised-cosine ramps of length ramp_s.
double envelope(double t, double duration, double ramp_s) {
  if (t <= 0.0 || t >= duration) return 0.0;
  if (t < ramp_s) return 0.5 - 0.5 * std::cos(M_PI * t / ramp_s);
  if (t > duration - ramp_s)
    return 0.5 - 0.5 * std::cos(M_PI * (duration - t) / ramp_s);
  return 1.0;
}

}  // namespace

io::LandmarkSequence synth_landmarks(VowelClass vowel, const SynthProfile& profile,
                                     double duration_s, double fps,
                                     const SynthConfig& cfg) {
  if (fps < 10.0) fail(Errc::usage, "synth_landmarks: fps must be at least 10");

  const double s = profile.severity;
  const double amplitude =
      vowel_peak_opening(vowel) * cfg.lip_amplitude_scale * (1.0 - 0.5 * s);
  // Base ramp stretched so opening speed scales by (1 - lip_slowdown).
  const double base_ramp = 0.12;
  const double ramp =
      std::min(base_ramp / std::max(1.0 - profile.lip_slowdown(), 0.25),
               duration_s / 2.5);
  const double tremor_sigma = 0.2 * s;

  Rng rng = Rng::seeded(profile.seed).child(41 + vowel_index(vowel));

  io::LandmarkSequence seq;
  seq.fps = fps;
  seq.index_map = synthetic_index_map();

  const auto n_frames = static_cast<std::size_t>(std::floor(duration_s * fps)) + 1;
  for (std::size_t fidx = 0; fidx < n_frames; ++fidx) {
    const double t = static_cast<double>(fidx) / fps;
    double opening = amplitude * envelope(t, duration_s, ramp);
    opening = std::max(0.0, opening + tremor_sigma * rng.gaussian());
    const double width = 60.0 + 0.15 * opening + tremor_sigma * rng.gaussian();

    io::LandmarkFrame frame;
    frame.t = t;
    frame.xs.resize(10);
    frame.ys.resize(10);
    auto set = [&](int idx, double x, double y) {
      frame.xs[idx] = x;
      frame.ys[idx] = y;
    };
    set(0, -width / 2.0, 0.0);  // corners
    set(1, width / 2.0, 0.0);
    set(2, 0.0, 4.0 + opening / 2.0);  // outer midpoints
    set(3, 0.0, -4.0 - opening / 2.0);
    const double inner_x[3] = {-8.0, 0.0, 8.0};
    for (int k = 0; k < 3; ++k) {
      set(4 + k, inner_x[k], opening / 2.0);
      set(7 + k, inner_x[k], -opening / 2.0);
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

double total_score(double severity) {
  return std::round(116.0 - 79.0 * severity);
}

double subitem_score(FdaKind kind, double severity, double u_kind) {
  const double scale = fda_scale_max(kind);
  const double raw = scale * (1.0 - severity * (0.6 + 0.3 * u_kind));
  return std::clamp(std::round(raw), 0.0, scale);
}

DatasetManifest gen_corpus(const CorpusOptions& options, const std::string& out_dir) {
  if (options.n_subjects < 2)
    fail(Errc::usage, "gen_corpus: need at least 2 subjects");
  make_dirs(out_dir);

  const Rng base = Rng::seeded(options.seed);
  const auto& sc = options.synth;
  const double w = sc.lip_weight;
  if (w < 0.0 || w > 1.0)
    fail(Errc::usage, "gen_corpus: lip_weight must lie in [0,1]");

  DatasetManifest manifest;
  manifest.base_dir = out_dir;

  static const std::array<const char*, kVowelCount> kSyllables = {
      "ma", "mo", "me", "mi", "mu", "nv"};

  for (int si = 0; si < options.n_subjects; ++si) {
    Rng srng = base.child(1000 + si);
    const double s_audio = srng.uniform();
    const double s_lip = w > 0.0 ? srng.uniform() : s_audio;
    const double s_eff = (1.0 - w) * s_audio + w * s_lip;

    char sid[16];
    std::snprintf(sid, sizeof(sid), "s%03d", si);

    SubjectEntry subject;
    subject.subject_id = sid;
    subject.fda_scores[static_cast<int>(FdaKind::total)] = total_score(s_eff);
    subject.fda_present[static_cast<int>(FdaKind::total)] = true;
    for (int k = 1; k < kFdaKindCount; ++k) {
      const double u_kind = srng.uniform();
      subject.fda_scores[k] = subitem_score(static_cast<FdaKind>(k), s_eff, u_kind);
      subject.fda_present[k] = true;
    }
    manifest.subjects.push_back(subject);

    SynthProfile audio_profile;
    audio_profile.severity = s_audio;
    audio_profile.f0_hz = sc.f0_hz;
    SynthProfile lip_profile = audio_profile;
    lip_profile.severity = s_lip;

    for (int v = 0; v < kVowelCount; ++v) {
      for (int rep = 0; rep < sc.repetitions; ++rep) {
        audio_profile.seed = base.child(si * 997 + v * 31 + rep).seed();
        lip_profile.seed = audio_profile.seed ^ 0x11f0;

        const VowelClass vowel = kVowelOrder[v];
        char rid[48];
        std::snprintf(rid, sizeof(rid), "%s_%s_%d", sid, vowel_name(vowel), rep);

        const auto voiced =
            synth_vowel(vowel, audio_profile, sc.vowel_duration_s, sc);
        io::AudioBuffer audio;
        audio.sample_rate = sc.sample_rate;
        const auto pad =
            static_cast<std::size_t>(std::lround(sc.pad_s * sc.sample_rate));
        audio.samples.assign(pad, 0.0);
        audio.samples.insert(audio.samples.end(), voiced.samples.begin(),
                             voiced.samples.end());
        audio.samples.insert(audio.samples.end(), pad, 0.0);

        const std::string rel_wav = std::string(sid) + "/" + rid + ".wav";
        const std::string rel_tg = std::string(sid) + "/" + rid + ".TextGrid";
        const std::string rel_lm = std::string(sid) + "/" + rid + ".csv";
        io::write_wav(path_join(out_dir, rel_wav), audio);

        io::SegmentTier tier;
        tier.name = "syllable";
        tier.intervals.push_back(
            {sc.pad_s, sc.pad_s + sc.vowel_duration_s, kSyllables[v]});
        write_text_file(path_join(out_dir, rel_tg), io::serialize_textgrid({tier}));

        // Landmark stream covers the whole recording; the mouth opens only
        // inside the vowel interval.
        const double total_duration = audio.duration();
        auto lips = synth_landmarks(vowel, lip_profile, sc.vowel_duration_s, sc.fps, sc);
        io::LandmarkSequence shifted;
        shifted.fps = sc.fps;
        shifted.index_map = lips.index_map;
        const auto lead =
            static_cast<std::size_t>(std::floor(sc.pad_s * sc.fps));
        const auto total_frames =
            static_cast<std::size_t>(std::floor(total_duration * sc.fps)) + 1;
        for (std::size_t fidx = 0; fidx < total_frames; ++fidx) {
          const double t = static_cast<double>(fidx) / sc.fps;
          io::LandmarkFrame frame;
          if (fidx >= lead && fidx - lead < lips.frames.size()) {
            frame = lips.frames[fidx - lead];
          } else {
            frame = lips.frames.front();  // closed mouth
          }
          frame.t = t;
          shifted.frames.push_back(std::move(frame));
        }
        write_text_file(path_join(out_dir, rel_lm),
                        io::serialize_landmarks_csv(shifted));

        RecordingEntry rec;
        rec.recording_id = rid;
        rec.subject_id = sid;
        rec.audio_path = rel_wav;
        rec.segment_path = rel_tg;
        rec.landmark_path = rel_lm;
        rec.fps = sc.fps;
        manifest.recordings.push_back(rec);
      }
    }
  }

  io::write_manifest(manifest, path_join(out_dir, "manifest.json"));
  return manifest;
}

}  // namespace vgan::synth
