#include "vgan/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "vgan/errors.hpp"
#include "vgan/fft.hpp"
#include "vgan/util.hpp"

namespace vgan::gmm {

namespace {

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

constexpr double kEnergyFloor = 1e-12;

// Cholesky factor (lower) of an SPD matrix with diagonal jitter escalation.
// Returns false if the matrix cannot be factored even after jitter.
bool cholesky(const std::vector<double>& m, int d, std::vector<double>* lower) {
  std::vector<double> a = m;
  for (int attempt = 0; attempt < 6; ++attempt) {
    std::vector<double> l(d * d, 0.0);
    bool ok = true;
    for (int i = 0; i < d && ok; ++i) {
      for (int j = 0; j <= i; ++j) {
        double acc = a[i * d + j];
        for (int k = 0; k < j; ++k) acc -= l[i * d + k] * l[j * d + k];
        if (i == j) {
          if (acc <= 0.0) {
            ok = false;
            break;
          }
          l[i * d + i] = std::sqrt(acc);
        } else {
          l[i * d + j] = acc / l[j * d + j];
        }
      }
    }
    if (ok) {
      *lower = std::move(l);
      return true;
    }
    const double jitter = std::pow(10.0, attempt - 8);  // 1e-8 upward
    for (int i = 0; i < d; ++i) a[i * d + i] = m[i * d + i] + jitter;
  }
  return false;
}

struct ComponentCache {
  std::vector<double> lower;  // Cholesky factor of covariance
  double log_norm = 0.0;      // -0.5*(d log 2pi + log|Sigma|)
};

ComponentCache make_cache(const std::vector<double>& cov, int d) {
  ComponentCache c;
  if (!cholesky(cov, d, &c.lower))
    fail(Errc::numeric, "gmm: covariance is not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < d; ++i) logdet += 2.0 * std::log(c.lower[i * d + i]);
  c.log_norm = -0.5 * (d * std::log(2.0 * M_PI) + logdet);
  return c;
}

double component_logpdf(const ComponentCache& c, const std::vector<double>& mean,
                        const double* x, int d) {
  // Solve L y = (x - mu); quadratic form = |y|^2.
  std::vector<double> y(d);
  for (int i = 0; i < d; ++i) {
    double acc = x[i] - mean[i];
    for (int k = 0; k < i; ++k) acc -= c.lower[i * d + k] * y[k];
    y[i] = acc / c.lower[i * d + i];
  }
  double quad = 0.0;
  for (int i = 0; i < d; ++i) quad += y[i] * y[i];
  return c.log_norm - 0.5 * quad;
}

double logsumexp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

FeatureMatrix frame_features(const io::AudioBuffer& audio,
                             const FrameFeatureConfig& cfg) {
  const double sr = audio.sample_rate;
  const auto win = static_cast<std::size_t>(std::lround(cfg.window_s * sr));
  const auto hop = static_cast<std::size_t>(std::lround(cfg.hop_s * sr));

  FeatureMatrix out;
  out.cols = cfg.dim();
  if (audio.samples.size() < win) return out;

  const std::size_t nfft = next_pow2(win);
  const std::size_t n_bins = nfft / 2 + 1;
  const double mel_max = hz_to_mel(sr / 2.0);

  // Triangular mel filterbank edges.
  std::vector<double> edges(cfg.n_mels + 2);
  for (int m = 0; m < cfg.n_mels + 2; ++m)
    edges[m] = mel_to_hz(mel_max * m / (cfg.n_mels + 1));

  std::vector<double> hann(win);
  for (std::size_t i = 0; i < win; ++i)
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (win - 1));

  for (std::size_t i0 = 0; i0 + win <= audio.samples.size(); i0 += hop) {
    std::vector<double> frame(win);
    double energy = 0.0;
    for (std::size_t t = 0; t < win; ++t) {
      energy += audio.samples[i0 + t] * audio.samples[i0 + t];
      frame[t] = audio.samples[i0 + t] * hann[t];
    }
    const auto spec = fft_real(frame, nfft);

    std::vector<double> row(out.cols, 0.0);
    row[0] = std::log(std::max(energy / win, kEnergyFloor));
    for (int m = 0; m < cfg.n_mels; ++m) {
      double band = 0.0;
      for (std::size_t k = 0; k < n_bins; ++k) {
        const double f = static_cast<double>(k) * sr / static_cast<double>(nfft);
        double w = 0.0;
        if (f >= edges[m] && f <= edges[m + 1] && edges[m + 1] > edges[m])
          w = (f - edges[m]) / (edges[m + 1] - edges[m]);
        else if (f > edges[m + 1] && f <= edges[m + 2] && edges[m + 2] > edges[m + 1])
          w = (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1]);
        band += w * std::norm(spec[k]);
      }
      row[1 + m] = std::log(std::max(band, kEnergyFloor));
    }
    out.data.insert(out.data.end(), row.begin(), row.end());
    ++out.rows;
  }
  return out;
}

double GaussianMixture::log_likelihood(const double* x) const {
  std::vector<double> terms(components());
  for (int k = 0; k < components(); ++k) {
    const auto cache = make_cache(covariances[k], dim);
    terms[k] = std::log(weights[k]) + component_logpdf(cache, means[k], x, dim);
  }
  return logsumexp(terms);
}

void GaussianMixture::validate() const {
  if (components() == 0) fail(Errc::validation, "gmm: no components");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) fail(Errc::validation, "gmm: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    fail(Errc::validation, "gmm: weights sum to " + format_double(wsum));
  for (const auto& m : means) {
    if (static_cast<int>(m.size()) != dim)
      fail(Errc::validation, "gmm: mean dimension mismatch");
  }
  for (const auto& cov : covariances) {
    if (static_cast<int>(cov.size()) != dim * dim)
      fail(Errc::validation, "gmm: covariance shape mismatch");
    std::vector<double> l;
    if (!cholesky(cov, dim, &l))
      fail(Errc::validation, "gmm: covariance not positive definite");
  }
}

namespace {

std::vector<std::size_t> kmeanspp_centers(const FeatureMatrix& x, int k, Rng& rng) {
  const int d = static_cast<int>(x.cols);
  std::vector<std::size_t> centers;
  centers.push_back(rng.index(x.rows));
  std::vector<double> dist2(x.rows, 1e300);
  auto sqdist = [&](std::size_t a, std::size_t b) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
      const double diff = x.row(a)[i] - x.row(b)[i];
      acc += diff * diff;
    }
    return acc;
  };
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
      dist2[r] = std::min(dist2[r], sqdist(r, centers.back()));
      total += dist2[r];
    }
    if (total <= 0.0) {
      centers.push_back(rng.index(x.rows));
      continue;
    }
    double pick = rng.uniform() * total;
    std::size_t chosen = x.rows - 1;
    for (std::size_t r = 0; r < x.rows; ++r) {
      pick -= dist2[r];
      if (pick <= 0.0) {
        chosen = r;
        break;
      }
    }
    centers.push_back(chosen);
  }
  return centers;
}

}  // namespace

FitResult gmm_fit(const FeatureMatrix& frames, int components,
                  const EmOptions& options) {
  const int d = static_cast<int>(frames.cols);
  const std::size_t n = frames.rows;
  if (n < static_cast<std::size_t>(10 * components))
    fail(Errc::insufficient_data,
         "gmm_fit: need at least 10 frames per component, got " +
             std::to_string(n) + " for K=" + std::to_string(components));

  Rng rng = Rng::seeded(options.seed);

  // k-means++ then a few Lloyd iterations for initial assignment.
  auto center_rows = kmeanspp_centers(frames, components, rng);
  std::vector<std::vector<double>> centers(components, std::vector<double>(d));
  for (int k = 0; k < components; ++k)
    std::copy_n(frames.row(center_rows[k]), d, centers[k].begin());

  std::vector<int> assign(n, 0);
  for (int it = 0; it < options.kmeans_iters; ++it) {
    for (std::size_t r = 0; r < n; ++r) {
      double best = 1e300;
      for (int k = 0; k < components; ++k) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) {
          const double diff = frames.row(r)[i] - centers[k][i];
          acc += diff * diff;
        }
        if (acc < best) {
          best = acc;
          assign[r] = k;
        }
      }
    }
    for (int k = 0; k < components; ++k) {
      std::vector<double> acc(d, 0.0);
      std::size_t count = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (assign[r] != k) continue;
        for (int i = 0; i < d; ++i) acc[i] += frames.row(r)[i];
        ++count;
      }
      if (count > 0)
        for (int i = 0; i < d; ++i) centers[k][i] = acc[i] / count;
    }
  }

  // Initial model from the hard assignment.
  GaussianMixture model;
  model.dim = d;
  model.weights.assign(components, 0.0);
  model.means.assign(components, std::vector<double>(d, 0.0));
  model.covariances.assign(components, std::vector<double>(d * d, 0.0));

  std::vector<std::vector<double>> resp(n, std::vector<double>(components, 0.0));
  for (std::size_t r = 0; r < n; ++r) resp[r][assign[r]] = 1.0;

  auto m_step = [&]() {
    for (int k = 0; k < components; ++k) {
      double nk = 0.0;
      std::vector<double> mu(d, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        nk += resp[r][k];
        for (int i = 0; i < d; ++i) mu[i] += resp[r][k] * frames.row(r)[i];
      }
      nk = std::max(nk, 1e-10);
      for (int i = 0; i < d; ++i) mu[i] /= nk;
      std::vector<double> cov(d * d, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        const double w = resp[r][k];
        if (w == 0.0) continue;
        for (int i = 0; i < d; ++i) {
          const double di = frames.row(r)[i] - mu[i];
          for (int j = 0; j <= i; ++j) {
            cov[i * d + j] += w * di * (frames.row(r)[j] - mu[j]);
          }
        }
      }
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
          cov[i * d + j] /= nk;
          cov[j * d + i] = cov[i * d + j];
        }
        cov[i * d + i] += options.covariance_reg;
      }
      model.weights[k] = nk / static_cast<double>(n);
      model.means[k] = std::move(mu);
      model.covariances[k] = std::move(cov);
    }
  };
  m_step();

  FitResult result;
  double prev_ll = -1e300;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    // E-step.
    std::vector<ComponentCache> caches;
    caches.reserve(components);
    for (int k = 0; k < components; ++k)
      caches.push_back(make_cache(model.covariances[k], d));

    double ll = 0.0;
    std::vector<double> terms(components);
    for (std::size_t r = 0; r < n; ++r) {
      for (int k = 0; k < components; ++k) {
        terms[k] = std::log(std::max(model.weights[k], 1e-300)) +
                   component_logpdf(caches[k], model.means[k], frames.row(r), d);
      }
      const double lse = logsumexp(terms);
      ll += lse;
      for (int k = 0; k < components; ++k) resp[r][k] = std::exp(terms[k] - lse);
    }
    ll /= static_cast<double>(n);
    result.loglik_history.push_back(ll);

    if (iter > 0 && ll - prev_ll < options.tol) break;
    prev_ll = ll;
    m_step();
  }

  result.model = std::move(model);
  result.model.validate();
  return result;
}

std::vector<std::vector<double>> responsibilities(const GaussianMixture& model,
                                                  const FeatureMatrix& frames) {
  const int k_count = model.components();
  std::vector<ComponentCache> caches;
  for (int k = 0; k < k_count; ++k)
    caches.push_back(make_cache(model.covariances[k], model.dim));

  std::vector<std::vector<double>> resp(frames.rows, std::vector<double>(k_count));
  std::vector<double> terms(k_count);
  for (std::size_t r = 0; r < frames.rows; ++r) {
    for (int k = 0; k < k_count; ++k) {
      terms[k] = std::log(std::max(model.weights[k], 1e-300)) +
                 component_logpdf(caches[k], model.means[k], frames.row(r), model.dim);
    }
    const double lse = logsumexp(terms);
    for (int k = 0; k < k_count; ++k) resp[r][k] = std::exp(terms[k] - lse);
  }
  return resp;
}

io::SegmentTier detect_vowel_intervals(const io::AudioBuffer& audio,
                                       const GaussianMixture& vowel_model,
                                       const GaussianMixture& other_model,
                                       const DetectOptions& options) {
  if (vowel_model.feature_config.dim() != other_model.feature_config.dim() ||
      vowel_model.feature_config.window_s != other_model.feature_config.window_s ||
      vowel_model.feature_config.hop_s != other_model.feature_config.hop_s)
    fail(Errc::validation,
         "detect_vowel_intervals: models use different frame feature definitions");

  const auto& fc = vowel_model.feature_config;
  const auto feats = frame_features(audio, fc);

  io::SegmentTier tier;
  tier.name = "vowel";
  if (feats.rows == 0) return tier;

  std::vector<bool> is_vowel(feats.rows);
  for (std::size_t r = 0; r < feats.rows; ++r) {
    is_vowel[r] = vowel_model.log_likelihood(feats.row(r)) >
                  other_model.log_likelihood(feats.row(r));
  }

  struct Run {
    double start, end;
  };
  std::vector<Run> runs;
  for (std::size_t r = 0; r < feats.rows; ++r) {
    if (!is_vowel[r]) continue;
    const double t0 = r * fc.hop_s;
    const double t1 = t0 + fc.window_s;
    if (!runs.empty() && t0 <= runs.back().end) {
      runs.back().end = t1;  // consecutive vowel frames extend the run
    } else {
      runs.push_back({t0, t1});
    }
  }
  // Short runs are discarded first, then surviving neighbours merge.
  std::vector<Run> kept;
  for (const auto& run : runs) {
    if (run.end - run.start < options.min_duration_s) continue;
    if (!kept.empty() && run.start - kept.back().end < options.merge_gap_s) {
      kept.back().end = run.end;
    } else {
      kept.push_back(run);
    }
  }
  for (const auto& run : kept) tier.intervals.push_back({run.start, run.end, "V"});
  return tier;
}

using nlohmann::json;

std::string serialize_gmm(const GaussianMixture& model) {
  json doc;
  doc["version"] = "gmm-1";
  doc["dim"] = model.dim;
  doc["weights"] = model.weights;
  doc["means"] = model.means;
  doc["covariances"] = model.covariances;
  doc["feature_config"] = {{"window_s", model.feature_config.window_s},
                           {"hop_s", model.feature_config.hop_s},
                           {"n_mels", model.feature_config.n_mels}};
  return doc.dump(2) + "\n";
}

GaussianMixture deserialize_gmm(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::parse, std::string("gmm model: ") + e.what());
  }
  if (!doc.contains("version") || doc["version"] != "gmm-1")
    fail(Errc::parse, "gmm model: unknown version (supported: gmm-1)");
  GaussianMixture m;
  m.dim = doc.at("dim").get<int>();
  m.weights = doc.at("weights").get<std::vector<double>>();
  m.means = doc.at("means").get<std::vector<std::vector<double>>>();
  m.covariances = doc.at("covariances").get<std::vector<std::vector<double>>>();
  const auto& fc = doc.at("feature_config");
  m.feature_config.window_s = fc.at("window_s").get<double>();
  m.feature_config.hop_s = fc.at("hop_s").get<double>();
  m.feature_config.n_mels = fc.at("n_mels").get<int>();
  if (m.feature_config.dim() != m.dim)
    fail(Errc::parse, "gmm model: dim does not match feature config");
  m.validate();
  return m;
}

}  // namespace vgan::gmm
