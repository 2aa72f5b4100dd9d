#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "vgan/dsp.hpp"
#include "vgan/errors.hpp"
#include "vgan/lip.hpp"
#include "vgan/synth.hpp"
#include "vgan/util.hpp"

using namespace vgan;
using namespace vgan::synth;

TEST_CASE("centralized formants") {
  SynthConfig cfg;
  SUBCASE("severity zero leaves the table untouched") {
    const auto f = centralized_formants(cfg, VowelClass::A, 0.0);
    CHECK(f.f1 == 800.0);
    CHECK(f.f2 == 1300.0);
    CHECK(f.f3 == 2600.0);
  }
  SUBCASE("ordering is preserved across severities") {
    for (double s = 0.0; s <= 1.0; s += 0.1) {
      for (VowelClass v : kVowelOrder) {
        const auto f = centralized_formants(cfg, v, s);
        CHECK(f.f1 < f.f2);
        CHECK(f.f2 < f.f3);
      }
    }
  }
  SUBCASE("target-space VSA shrinks strictly with severity") {
    auto corner_vsa = [&](double s) {
      const auto a = centralized_formants(cfg, VowelClass::A, s);
      const auto i = centralized_formants(cfg, VowelClass::I, s);
      const auto u = centralized_formants(cfg, VowelClass::U, s);
      return 0.5 * std::abs(a.f1 * (i.f2 - u.f2) + i.f1 * (u.f2 - a.f2) +
                            u.f1 * (a.f2 - i.f2));
    };
    double prev = corner_vsa(0.0);
    for (double s = 0.1; s <= 1.0; s += 0.1) {
      const double v = corner_vsa(s);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("synth_vowel") {
  SynthConfig cfg;
  dsp::PitchConfig pitch;

  SUBCASE("severity zero measures as clean speech") {
    SynthProfile p;
    p.severity = 0.0;
    p.seed = 1234;
    for (VowelClass v : {VowelClass::A, VowelClass::I, VowelClass::U}) {
      const auto audio = synth_vowel(v, p, 0.6, cfg);
      const auto pulses = dsp::estimate_pitch_track(audio, pitch);
      CHECK(dsp::jitter_local(pulses) < 0.005);

      const auto stats = dsp::formant_stats(dsp::lpc_formants(audio, {}));
      const auto target = cfg.formant_table.at(v);
      CHECK(std::abs(stats.mean_f1 - target.f1) <= 0.05 * target.f1);
      CHECK(std::abs(stats.mean_f2 - target.f2) <= 0.05 * target.f2);
      CHECK(std::abs(stats.mean_f3 - target.f3) <= 0.05 * target.f3);
    }
  }
  SUBCASE("measured corner VSA shrinks from severity 0 to 1") {
    auto measured_vsa = [&](double severity) {
      SynthProfile p;
      p.severity = severity;
      p.seed = 99;
      double f1[3], f2[3];
      int k = 0;
      for (VowelClass v : {VowelClass::A, VowelClass::I, VowelClass::U}) {
        const auto audio = synth_vowel(v, p, 0.6, cfg);
        const auto stats = dsp::formant_stats(dsp::lpc_formants(audio, {}));
        f1[k] = stats.mean_f1;
        f2[k] = stats.mean_f2;
        ++k;
      }
      return 0.5 * std::abs(f1[0] * (f2[1] - f2[2]) + f1[1] * (f2[2] - f2[0]) +
                            f1[2] * (f2[0] - f2[1]));
    };
    CHECK(measured_vsa(1.0) < measured_vsa(0.0));
  }
  SUBCASE("same profile and seed synthesizes bit-identical audio") {
    SynthProfile p;
    p.severity = 0.6;
    p.seed = 555;
    const auto a = synth_vowel(VowelClass::E, p, 0.4, cfg);
    const auto b = synth_vowel(VowelClass::E, p, 0.4, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i)
      CHECK(a.samples[i] == b.samples[i]);
  }
  SUBCASE("too-short duration is rejected") {
    SynthProfile p;
    CHECK_THROWS_AS(synth_vowel(VowelClass::A, p, 0.05, cfg), VganError);
  }
}

TEST_CASE("synth_landmarks") {
  SynthConfig cfg;
  SUBCASE("higher severity slows the inner-lip velocity") {
    auto velocity_at = [&](double severity) {
      SynthProfile p;
      p.severity = severity;
      p.seed = 7;
      const auto seq = synth_landmarks(VowelClass::A, p, 0.6, 30.0, cfg);
      const auto v = lip::lip_feature_vector(seq, 0.0, 0.6);
      return v[lip::kInnerDistVelocity];
    };
    CHECK(velocity_at(1.0) < velocity_at(0.0));
  }
  SUBCASE("a frozen mouth has zero velocities") {
    SynthConfig still = cfg;
    still.lip_amplitude_scale = 0.0;
    SynthProfile p;
    p.severity = 0.0;  // no tremor either
    p.seed = 7;
    const auto seq = synth_landmarks(VowelClass::A, p, 0.6, 30.0, still);
    const auto v = lip::lip_feature_vector(seq, 0.0, 0.6);
    CHECK(v[lip::kInnerDistVelocity] == 0.0);
    CHECK(v[lip::kLeftAngleVelocity] <= 1e-12);
    CHECK(v[lip::kRightAngleVelocity] <= 1e-12);
    CHECK(v[lip::kInnerDistStd] == 0.0);
  }
  SUBCASE("fixed seed reproduces the sequence") {
    SynthProfile p;
    p.severity = 0.4;
    p.seed = 17;
    const auto a = synth_landmarks(VowelClass::O, p, 0.5, 30.0, cfg);
    const auto b = synth_landmarks(VowelClass::O, p, 0.5, 30.0, cfg);
    REQUIRE(a.frames.size() == b.frames.size());
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
      CHECK(a.frames[i].xs == b.frames[i].xs);
      CHECK(a.frames[i].ys == b.frames[i].ys);
    }
  }
  SUBCASE("low fps is rejected") {
    SynthProfile p;
    CHECK_THROWS_AS(synth_landmarks(VowelClass::A, p, 0.5, 5.0, cfg), VganError);
  }
}

TEST_CASE("score formulas") {
  SUBCASE("endpoints") {
    CHECK(total_score(0.0) == 116.0);
    CHECK(total_score(1.0) == 37.0);
    CHECK(severity_band(total_score(0.0)) == SeverityBand::Normal);
    CHECK(severity_band(total_score(1.0)) == SeverityBand::Severe);
  }
  SUBCASE("total is injective on the 11-step severity grid") {
    std::set<double> values;
    for (int i = 0; i <= 10; ++i) values.insert(total_score(i / 10.0));
    CHECK(values.size() == 11);
  }
  SUBCASE("sub-items peg at the scale for severity zero and fall with severity") {
    for (int k = 1; k < kFdaKindCount; ++k) {
      const FdaKind kind = static_cast<FdaKind>(k);
      CHECK(subitem_score(kind, 0.0, 0.5) == fda_scale_max(kind));
      CHECK(subitem_score(kind, 1.0, 0.5) < fda_scale_max(kind));
      CHECK(subitem_score(kind, 1.0, 1.0) >= 0.0);
    }
  }
}

TEST_CASE("gen_corpus") {
  const auto dir =
      (std::filesystem::temp_directory_path() / "vgan_corpus_test").string();
  std::filesystem::remove_all(dir);

  CorpusOptions opt;
  opt.n_subjects = 3;
  opt.seed = 2718;
  opt.synth.repetitions = 1;
  const auto manifest = gen_corpus(opt, dir);

  SUBCASE("manifest is internally consistent and every file exists") {
    const auto report = validate_manifest(manifest, true);
    CHECK(report.ok());
    CHECK(manifest.subjects.size() == 3);
    CHECK(manifest.recordings.size() == 3 * 6);
  }
  SUBCASE("generation is reproducible byte for byte") {
    const auto dir2 =
        (std::filesystem::temp_directory_path() / "vgan_corpus_test2").string();
    std::filesystem::remove_all(dir2);
    gen_corpus(opt, dir2);
    for (const auto& rec : manifest.recordings) {
      const auto a = read_text_file(path_join(dir, rec.audio_path));
      const auto b = read_text_file(path_join(dir2, rec.audio_path));
      CHECK(a == b);
    }
    CHECK(read_text_file(dir + "/manifest.json") ==
          read_text_file(dir2 + "/manifest.json"));
    std::filesystem::remove_all(dir2);
  }
  SUBCASE("fewer than two subjects is rejected") {
    CorpusOptions bad;
    bad.n_subjects = 1;
    CHECK_THROWS_AS(gen_corpus(bad, dir + "_x"), VganError);
  }
  std::filesystem::remove_all(dir);
}
