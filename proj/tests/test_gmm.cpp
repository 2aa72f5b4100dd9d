#include <doctest.h>

#include <cmath>

#include "vgan/errors.hpp"
#include "vgan/gmm.hpp"
#include "vgan/synth.hpp"
#include "vgan/util.hpp"

using namespace vgan;
using namespace vgan::gmm;

namespace {

FeatureMatrix gaussian_blobs(const std::vector<std::vector<double>>& centers,
                             double sigma, std::size_t per_center,
                             std::uint64_t seed, std::vector<int>* labels = nullptr) {
  Rng rng = Rng::seeded(seed);
  FeatureMatrix m;
  m.cols = centers[0].size();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t i = 0; i < per_center; ++i) {
      for (std::size_t d = 0; d < m.cols; ++d)
        m.data.push_back(centers[c][d] + sigma * rng.gaussian());
      ++m.rows;
      if (labels) labels->push_back(static_cast<int>(c));
    }
  }
  return m;
}

}  // namespace

TEST_CASE("gmm_fit") {
  SUBCASE("two well-separated clusters recover their centers") {
    const auto frames = gaussian_blobs({{0.0, 0.0}, {6.0, 6.0}}, 0.5, 400, 42);
    EmOptions opt;
    opt.seed = 1;
    const auto fit = gmm_fit(frames, 2, opt);
    REQUIRE(fit.model.components() == 2);
    // Match components to true centers by nearest assignment.
    auto near = [&](double x, double y) {
      double best = 1e300;
      for (const auto& mu : fit.model.means)
        best = std::min(best, std::hypot(mu[0] - x, mu[1] - y));
      return best;
    };
    CHECK(near(0.0, 0.0) < 0.1);
    CHECK(near(6.0, 6.0) < 0.1);
  }
  SUBCASE("K=1 closes the analytic form: sample mean and covariance") {
    const auto frames = gaussian_blobs({{1.0, -2.0}}, 1.3, 500, 7);
    EmOptions opt;
    opt.seed = 2;
    const auto fit = gmm_fit(frames, 1, opt);
    std::vector<double> mean(2, 0.0);
    for (std::size_t r = 0; r < frames.rows; ++r)
      for (int d = 0; d < 2; ++d) mean[d] += frames.row(r)[d];
    for (double& v : mean) v /= static_cast<double>(frames.rows);
    CHECK(fit.model.means[0][0] == doctest::Approx(mean[0]).epsilon(1e-9));
    CHECK(fit.model.means[0][1] == doctest::Approx(mean[1]).epsilon(1e-9));
    std::vector<double> cov(4, 0.0);
    for (std::size_t r = 0; r < frames.rows; ++r) {
      const double dx = frames.row(r)[0] - mean[0];
      const double dy = frames.row(r)[1] - mean[1];
      cov[0] += dx * dx;
      cov[1] += dx * dy;
      cov[2] += dy * dx;
      cov[3] += dy * dy;
    }
    for (double& v : cov) v /= static_cast<double>(frames.rows);
    CHECK(fit.model.covariances[0][0] ==
          doctest::Approx(cov[0] + opt.covariance_reg).epsilon(1e-9));
    CHECK(fit.model.covariances[0][1] == doctest::Approx(cov[1]).epsilon(1e-9));
    CHECK(fit.model.weights[0] == 1.0);
  }
  SUBCASE("log-likelihood history is non-decreasing within 1e-8") {
    const auto frames =
        gaussian_blobs({{0.0, 0.0}, {2.0, 1.0}, {-1.0, 3.0}}, 0.9, 150, 11);
    EmOptions opt;
    opt.seed = 3;
    opt.tol = 0.0;  // run all iterations
    const auto fit = gmm_fit(frames, 3, opt);
    CHECK(fit.loglik_history.size() <= 60);
    for (std::size_t i = 1; i < fit.loglik_history.size(); ++i)
      CHECK(fit.loglik_history[i] >= fit.loglik_history[i - 1] - 1e-8);
  }
  SUBCASE("responsibilities rows sum to one") {
    const auto frames = gaussian_blobs({{0.0, 0.0}, {4.0, 4.0}}, 0.7, 120, 13);
    EmOptions opt;
    opt.seed = 5;
    const auto fit = gmm_fit(frames, 2, opt);
    for (const auto& row : responsibilities(fit.model, frames)) {
      double sum = 0.0;
      for (double v : row) sum += v;
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  SUBCASE("determinism under a fixed seed") {
    const auto frames = gaussian_blobs({{0.0, 0.0}, {4.0, 4.0}}, 0.7, 120, 17);
    EmOptions opt;
    opt.seed = 5;
    const auto a = gmm_fit(frames, 2, opt);
    const auto b = gmm_fit(frames, 2, opt);
    for (int k = 0; k < 2; ++k) {
      CHECK(a.model.weights[k] == b.model.weights[k]);
      for (int d = 0; d < 2; ++d) CHECK(a.model.means[k][d] == b.model.means[k][d]);
    }
  }
  SUBCASE("too few frames errors") {
    const auto frames = gaussian_blobs({{0.0, 0.0}}, 0.5, 15, 19);
    EmOptions opt;
    CHECK_THROWS_AS(gmm_fit(frames, 2, opt), VganError);
  }
  SUBCASE("two-cluster frame accuracy at least 95%") {
    std::vector<int> labels;
    const auto frames =
        gaussian_blobs({{0.0, 0.0, 0.0}, {4.0, 3.0, 2.0}}, 1.0, 500, 23, &labels);
    EmOptions opt;
    opt.seed = 29;
    const auto fit = gmm_fit(frames, 2, opt);
    const auto resp = responsibilities(fit.model, frames);
    std::size_t agree = 0;
    for (std::size_t r = 0; r < frames.rows; ++r) {
      const int assign = resp[r][0] > resp[r][1] ? 0 : 1;
      if (assign == labels[r]) ++agree;
    }
    double accuracy =
        static_cast<double>(agree) / static_cast<double>(frames.rows);
    accuracy = std::max(accuracy, 1.0 - accuracy);  // label permutation
    CHECK(accuracy >= 0.95);
  }
}

TEST_CASE("frame features have the configured dimension") {
  synth::SynthConfig sc;
  synth::SynthProfile profile;
  profile.seed = 3;
  const auto audio = synth::synth_vowel(VowelClass::A, profile, 0.4, sc);
  FrameFeatureConfig fc;
  const auto feats = frame_features(audio, fc);
  CHECK(feats.cols == 13);
  CHECK(feats.rows > 30);
}

namespace {

// Vowel/other models trained on synthetic vowel vs silence-plus-noise frames.
std::pair<GaussianMixture, GaussianMixture> trained_pair() {
  synth::SynthConfig sc;
  FrameFeatureConfig fc;
  FeatureMatrix vowel_frames, other_frames;
  vowel_frames.cols = other_frames.cols = fc.dim();

  Rng rng = Rng::seeded(41);
  for (int rep = 0; rep < 6; ++rep) {
    synth::SynthProfile profile;
    profile.severity = 0.15 * rep / 6.0;
    profile.seed = 100 + rep;
    const auto voiced =
        synth::synth_vowel(kVowelOrder[rep % kVowelCount], profile, 0.5, sc);
    const auto vf = frame_features(voiced, fc);
    vowel_frames.data.insert(vowel_frames.data.end(), vf.data.begin(), vf.data.end());
    vowel_frames.rows += vf.rows;

    io::AudioBuffer quiet;
    quiet.sample_rate = sc.sample_rate;
    quiet.samples.resize(static_cast<std::size_t>(0.5 * sc.sample_rate));
    for (double& v : quiet.samples) v = 1e-4 * rng.gaussian();
    const auto qf = frame_features(quiet, fc);
    other_frames.data.insert(other_frames.data.end(), qf.data.begin(), qf.data.end());
    other_frames.rows += qf.rows;
  }

  EmOptions opt;
  opt.seed = 31;
  auto vowel_fit = gmm_fit(vowel_frames, 4, opt);
  opt.seed = 32;
  auto other_fit = gmm_fit(other_frames, 4, opt);
  vowel_fit.model.feature_config = fc;
  other_fit.model.feature_config = fc;
  return {vowel_fit.model, other_fit.model};
}

}  // namespace

TEST_CASE("detect_vowel_intervals") {
  const auto [vowel_model, other_model] = trained_pair();
  synth::SynthConfig sc;
  DetectOptions opt;

  SUBCASE("pure silence yields no intervals") {
    io::AudioBuffer silence;
    silence.sample_rate = sc.sample_rate;
    silence.samples.assign(static_cast<std::size_t>(sc.sample_rate), 0.0);
    const auto tier = detect_vowel_intervals(silence, vowel_model, other_model, opt);
    CHECK(tier.intervals.empty());
  }
  SUBCASE("a vowel flanked by silence is found covering most of its span") {
    synth::SynthProfile profile;
    profile.seed = 9;
    const auto voiced = synth::synth_vowel(VowelClass::E, profile, 0.5, sc);
    io::AudioBuffer padded;
    padded.sample_rate = sc.sample_rate;
    const auto pad = static_cast<std::size_t>(0.3 * sc.sample_rate);
    padded.samples.assign(pad, 0.0);
    padded.samples.insert(padded.samples.end(), voiced.samples.begin(),
                          voiced.samples.end());
    padded.samples.insert(padded.samples.end(), pad, 0.0);

    const auto tier = detect_vowel_intervals(padded, vowel_model, other_model, opt);
    REQUIRE(tier.intervals.size() == 1);
    const double lo = std::max(tier.intervals[0].start, 0.3);
    const double hi = std::min(tier.intervals[0].end, 0.8);
    CHECK((hi - lo) / 0.5 >= 0.8);
  }
  SUBCASE("a minimum duration longer than the signal empties the tier") {
    synth::SynthProfile profile;
    profile.seed = 10;
    const auto voiced = synth::synth_vowel(VowelClass::A, profile, 0.3, sc);
    DetectOptions strict;
    strict.min_duration_s = 10.0;
    const auto tier = detect_vowel_intervals(voiced, vowel_model, other_model, strict);
    CHECK(tier.intervals.empty());
  }
  SUBCASE("mismatched feature definitions are rejected") {
    auto other = other_model;
    other.feature_config.hop_s = 0.020;
    io::AudioBuffer silence;
    silence.sample_rate = sc.sample_rate;
    silence.samples.assign(1600, 0.0);
    CHECK_THROWS_AS(detect_vowel_intervals(silence, vowel_model, other, opt),
                    VganError);
  }
}

TEST_CASE("gmm json round trip") {
  const auto [vowel_model, other_model] = trained_pair();
  const auto text = serialize_gmm(vowel_model);
  const auto back = deserialize_gmm(text);
  CHECK(back.dim == vowel_model.dim);
  REQUIRE(back.components() == vowel_model.components());
  for (int k = 0; k < back.components(); ++k) {
    CHECK(back.weights[k] == vowel_model.weights[k]);
    for (int d = 0; d < back.dim; ++d)
      CHECK(back.means[k][d] == vowel_model.means[k][d]);
  }
  SUBCASE("unknown version is rejected naming support") {
    auto bad = text;
    const auto pos = bad.find("gmm-1");
    bad.replace(pos, 5, "gmm-9");
    try {
      deserialize_gmm(bad);
      FAIL("expected version error");
    } catch (const VganError& e) {
      CHECK(std::string(e.what()).find("gmm-1") != std::string::npos);
    }
  }
}
