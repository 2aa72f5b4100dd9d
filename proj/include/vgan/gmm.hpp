#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgan/io.hpp"

namespace vgan::gmm {

// Frame feature definition for segment detection: log energy plus mel-band
// log energies (D = 1 + n_mels).
struct FrameFeatureConfig {
  double window_s = 0.025;
  double hop_s = 0.010;
  int n_mels = 12;

  int dim() const { return 1 + n_mels; }
};

// Row-major frame-by-dim feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
};

FeatureMatrix frame_features(const io::AudioBuffer& audio,
                             const FrameFeatureConfig& cfg);

struct GaussianMixture {
  int dim = 0;
  std::vector<double> weights;       // K, sums to 1
  std::vector<std::vector<double>> means;  // K x D
  std::vector<std::vector<double>> covariances;  // K x (D*D), full, SPD
  FrameFeatureConfig feature_config;

  int components() const { return static_cast<int>(weights.size()); }
  double log_likelihood(const double* x) const;
  void validate() const;
};

struct EmOptions {
  int max_iter = 60;
  double tol = 1e-6;             // stop when loglik gain drops below
  double covariance_reg = 1e-6;  // added to the diagonal each M-step
  int kmeans_iters = 10;
  std::uint64_t seed = 0;
};

struct FitResult {
  GaussianMixture model;
  std::vector<double> loglik_history;  // mean per-frame loglik per iteration
};

// k-means++ initialization followed by full-covariance EM.
FitResult gmm_fit(const FeatureMatrix& frames, int components, const EmOptions& options);

// Per-frame responsibilities (rows sum to 1), for cluster assignment checks.
std::vector<std::vector<double>> responsibilities(const GaussianMixture& model,
                                                  const FeatureMatrix& frames);

struct DetectOptions {
  double min_duration_s = 0.030;  // discard shorter runs
  double merge_gap_s = 0.020;     // merge runs separated by less
};

// Frame-wise log-likelihood ratio classification (vowel vs other) followed
// by run-length filtering.
io::SegmentTier detect_vowel_intervals(const io::AudioBuffer& audio,
                                       const GaussianMixture& vowel_model,
                                       const GaussianMixture& other_model,
                                       const DetectOptions& options);

// Model files are JSON: weights, means, covariances, feature config.
std::string serialize_gmm(const GaussianMixture& model);
GaussianMixture deserialize_gmm(const std::string& text);

}  // namespace vgan::gmm
