#include "vgan/config.hpp"

#include <json.hpp>

#include "vgan/errors.hpp"
#include "vgan/util.hpp"

namespace vgan {

using nlohmann::json;

void GlobalConfig::validate() const {
  vgan.validate();
  train.validate();
  if (dsp.pitch.f0_min <= 0.0 || dsp.pitch.f0_max <= dsp.pitch.f0_min)
    fail(Errc::validation, "config dsp.pitch: need 0 < f0_min < f0_max");
  if (dsp.pitch.voicing_threshold <= 0.0 || dsp.pitch.voicing_threshold >= 1.0)
    fail(Errc::validation, "config dsp.pitch: voicing_threshold must lie in (0,1)");
  if (gmm_components < 1)
    fail(Errc::validation, "config gmm: components must be positive");
  if (gmm_em.max_iter < 1)
    fail(Errc::validation, "config gmm: max_iter must be positive");
  if (synth.repetitions < 1)
    fail(Errc::validation, "config synth: repetitions must be positive");
  if (synth.lip_weight < 0.0 || synth.lip_weight > 1.0)
    fail(Errc::validation, "config synth: lip_weight must lie in [0,1]");
  if (augment.mode == aug::GroupMode::random && augment.n == 0)
    fail(Errc::validation, "config augment: mode=random requires n > 0");
}

GlobalConfig default_config() {
  GlobalConfig cfg;
  cfg.lip_index_map = synth::synthetic_index_map();
  cfg.augment.mode = aug::GroupMode::random;
  cfg.augment.n = 12;
  cfg.papi.dsp = cfg.dsp;
  return cfg;
}

namespace {

struct Reader {
  const json& obj;
  std::string where;

  void known(std::initializer_list<const char*> keys) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* k : keys) {
        if (it.key() == k) {
          ok = true;
          break;
        }
      }
      if (!ok)
        fail(Errc::parse, "config " + where + ": unknown key \"" + it.key() + "\"");
    }
  }

  template <typename T>
  void get(const char* key, T* out) const {
    if (!obj.contains(key)) return;
    try {
      *out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      fail(Errc::parse, "config " + where + "." + key + ": wrong type");
    }
  }
};

void read_dsp(const json& j, dsp::DspConfig* d) {
  Reader r{j, "dsp"};
  r.known({"pitch", "formant", "gne", "vfer", "intensity"});
  if (j.contains("pitch")) {
    Reader p{j.at("pitch"), "dsp.pitch"};
    p.known({"f0_min", "f0_max", "window_s", "hop_s", "voicing_threshold"});
    p.get("f0_min", &d->pitch.f0_min);
    p.get("f0_max", &d->pitch.f0_max);
    p.get("window_s", &d->pitch.window_s);
    p.get("hop_s", &d->pitch.hop_s);
    p.get("voicing_threshold", &d->pitch.voicing_threshold);
  }
  if (j.contains("formant")) {
    Reader p{j.at("formant"), "dsp.formant"};
    p.known({"preemphasis", "window_s", "hop_s", "max_bandwidth_hz", "min_freq_hz",
             "nyquist_margin_hz", "min_duration_s"});
    p.get("preemphasis", &d->formant.preemphasis);
    p.get("window_s", &d->formant.window_s);
    p.get("hop_s", &d->formant.hop_s);
    p.get("max_bandwidth_hz", &d->formant.max_bandwidth_hz);
    p.get("min_freq_hz", &d->formant.min_freq_hz);
    p.get("nyquist_margin_hz", &d->formant.nyquist_margin_hz);
    p.get("min_duration_s", &d->formant.min_duration_s);
  }
  if (j.contains("gne")) {
    Reader p{j.at("gne"), "dsp.gne"};
    p.known({"residual_order", "bandwidth_hz", "step_hz", "first_center_hz",
             "min_separation_hz", "min_duration_s"});
    p.get("residual_order", &d->gne.residual_order);
    p.get("bandwidth_hz", &d->gne.bandwidth_hz);
    p.get("step_hz", &d->gne.step_hz);
    p.get("first_center_hz", &d->gne.first_center_hz);
    p.get("min_separation_hz", &d->gne.min_separation_hz);
    p.get("min_duration_s", &d->gne.min_duration_s);
  }
  if (j.contains("vfer")) {
    Reader p{j.at("vfer"), "dsp.vfer"};
    p.known({"residual_order", "split_hz", "energy_floor_ratio"});
    p.get("residual_order", &d->vfer.residual_order);
    p.get("split_hz", &d->vfer.split_hz);
    p.get("energy_floor_ratio", &d->vfer.energy_floor_ratio);
  }
  if (j.contains("intensity")) {
    Reader p{j.at("intensity"), "dsp.intensity"};
    p.known({"window_s", "hop_s", "floor_db"});
    p.get("window_s", &d->intensity.window_s);
    p.get("hop_s", &d->intensity.hop_s);
    p.get("floor_db", &d->intensity.floor_db);
  }
}

void apply_json(GlobalConfig* out, const json& doc) {
  GlobalConfig& cfg = *out;

  Reader top{doc, "(top level)"};
  top.known({"dsp", "papi", "lip", "augment", "gmm", "vgan", "train", "synth",
             "paths"});

  if (doc.contains("dsp")) read_dsp(doc.at("dsp"), &cfg.dsp);

  if (doc.contains("papi")) {
    Reader p{doc.at("papi"), "papi"};
    p.known({"vsa_hull", "default_row"});
    p.get("vsa_hull", &cfg.papi.vsa_hull);
    if (doc["papi"].contains("default_row")) {
      const auto row = doc["papi"]["default_row"].get<std::vector<double>>();
      if (row.size() != papi::kPapiDim)
        fail(Errc::parse, "config papi.default_row: expected " +
                              std::to_string(papi::kPapiDim) + " values");
      std::copy(row.begin(), row.end(), cfg.papi.default_row.begin());
    }
  }

  if (doc.contains("lip")) {
    Reader p{doc.at("lip"), "lip"};
    p.known({"index_map"});
    if (doc["lip"].contains("index_map")) {
      const auto& im = doc["lip"]["index_map"];
      Reader q{im, "lip.index_map"};
      q.known({"left_corner", "right_corner", "upper_mid", "lower_mid",
               "inner_upper", "inner_lower"});
      q.get("left_corner", &cfg.lip_index_map.left_corner);
      q.get("right_corner", &cfg.lip_index_map.right_corner);
      q.get("upper_mid", &cfg.lip_index_map.upper_mid);
      q.get("lower_mid", &cfg.lip_index_map.lower_mid);
      q.get("inner_upper", &cfg.lip_index_map.inner_upper);
      q.get("inner_lower", &cfg.lip_index_map.inner_lower);
    }
  }

  if (doc.contains("augment")) {
    Reader p{doc.at("augment"), "augment"};
    p.known({"mode", "n", "seed", "shuffle_before_zip", "balance", "balance_factor"});
    std::string mode = aug::group_mode_name(cfg.augment.mode);
    p.get("mode", &mode);
    cfg.augment.mode = aug::group_mode_from_name(mode);
    std::uint64_t n = cfg.augment.n;
    p.get("n", &n);
    cfg.augment.n = n;
    p.get("seed", &cfg.augment.seed);
    p.get("shuffle_before_zip", &cfg.augment.shuffle_before_zip);
    p.get("balance", &cfg.augment_balance);
    p.get("balance_factor", &cfg.augment_balance_factor);
  }

  if (doc.contains("gmm")) {
    Reader p{doc.at("gmm"), "gmm"};
    p.known({"components", "window_s", "hop_s", "n_mels", "max_iter", "tol",
             "covariance_reg", "kmeans_iters", "seed", "min_duration_s",
             "merge_gap_s"});
    p.get("components", &cfg.gmm_components);
    p.get("window_s", &cfg.gmm_features.window_s);
    p.get("hop_s", &cfg.gmm_features.hop_s);
    p.get("n_mels", &cfg.gmm_features.n_mels);
    p.get("max_iter", &cfg.gmm_em.max_iter);
    p.get("tol", &cfg.gmm_em.tol);
    p.get("covariance_reg", &cfg.gmm_em.covariance_reg);
    p.get("kmeans_iters", &cfg.gmm_em.kmeans_iters);
    p.get("seed", &cfg.gmm_em.seed);
    p.get("min_duration_s", &cfg.gmm_detect.min_duration_s);
    p.get("merge_gap_s", &cfg.gmm_detect.merge_gap_s);
  }

  if (doc.contains("vgan")) {
    Reader p{doc.at("vgan"), "vgan"};
    p.known({"shared_dim", "n_heads", "head_dim", "dense1", "dense2", "visual1",
             "visual2", "visual3", "fusion_dim", "final_dim", "leaky_slope",
             "audio_only"});
    p.get("shared_dim", &cfg.vgan.shared_dim);
    p.get("n_heads", &cfg.vgan.n_heads);
    p.get("head_dim", &cfg.vgan.head_dim);
    p.get("dense1", &cfg.vgan.dense1);
    p.get("dense2", &cfg.vgan.dense2);
    p.get("visual1", &cfg.vgan.visual1);
    p.get("visual2", &cfg.vgan.visual2);
    p.get("visual3", &cfg.vgan.visual3);
    p.get("fusion_dim", &cfg.vgan.fusion_dim);
    p.get("final_dim", &cfg.vgan.final_dim);
    p.get("leaky_slope", &cfg.vgan.leaky_slope);
    p.get("audio_only", &cfg.vgan.audio_only);
  }

  if (doc.contains("train")) {
    Reader p{doc.at("train"), "train"};
    p.known({"target_kind", "epochs", "batch_size", "learning_rate", "beta1",
             "beta2", "eps", "seed", "k_folds", "val_fraction", "balance",
             "balance_factor"});
    std::string kind = fda_kind_name(cfg.train.target_kind);
    p.get("target_kind", &kind);
    const auto parsed = fda_kind_from_name(kind);
    if (!parsed) fail(Errc::parse, "config train.target_kind: unknown kind " + kind);
    cfg.train.target_kind = *parsed;
    p.get("epochs", &cfg.train.epochs);
    p.get("batch_size", &cfg.train.batch_size);
    p.get("learning_rate", &cfg.train.learning_rate);
    p.get("beta1", &cfg.train.beta1);
    p.get("beta2", &cfg.train.beta2);
    p.get("eps", &cfg.train.eps);
    p.get("seed", &cfg.train.seed);
    p.get("k_folds", &cfg.train.k_folds);
    p.get("val_fraction", &cfg.train.val_fraction);
    p.get("balance", &cfg.train.balance);
    p.get("balance_factor", &cfg.train.balance_factor);
  }

  if (doc.contains("synth")) {
    Reader p{doc.at("synth"), "synth"};
    p.known({"sample_rate", "f0_hz", "formant_table", "bandwidths_hz",
             "glottal_rho", "vowel_duration_s", "pad_s", "repetitions", "fps",
             "lip_amplitude_scale", "lip_weight"});
    p.get("lip_amplitude_scale", &cfg.synth.lip_amplitude_scale);
    p.get("sample_rate", &cfg.synth.sample_rate);
    p.get("f0_hz", &cfg.synth.f0_hz);
    p.get("glottal_rho", &cfg.synth.glottal_rho);
    p.get("vowel_duration_s", &cfg.synth.vowel_duration_s);
    p.get("pad_s", &cfg.synth.pad_s);
    p.get("repetitions", &cfg.synth.repetitions);
    p.get("fps", &cfg.synth.fps);
    p.get("lip_weight", &cfg.synth.lip_weight);
    if (doc["synth"].contains("bandwidths_hz")) {
      const auto b = doc["synth"]["bandwidths_hz"].get<std::vector<double>>();
      if (b.size() != 3)
        fail(Errc::parse, "config synth.bandwidths_hz: expected 3 values");
      std::copy(b.begin(), b.end(), cfg.synth.bandwidths_hz.begin());
    }
    if (doc["synth"].contains("formant_table")) {
      for (const auto& [name, trip] : doc["synth"]["formant_table"].items()) {
        const auto vowel = vowel_from_name(name);
        if (!vowel)
          fail(Errc::parse, "config synth.formant_table: unknown vowel " + name);
        const auto f = trip.get<std::vector<double>>();
        if (f.size() != 3)
          fail(Errc::parse, "config synth.formant_table." + name +
                                ": expected [F1,F2,F3]");
        cfg.synth.formant_table[*vowel] = {f[0], f[1], f[2]};
      }
    }
  }

  if (doc.contains("paths")) {
    Reader p{doc.at("paths"), "paths"};
    p.known({"syllable_tier", "vowel_tier", "gop_csv", "skip_labels"});
    p.get("syllable_tier", &cfg.syllable_tier);
    p.get("vowel_tier", &cfg.vowel_tier);
    p.get("gop_csv", &cfg.gop_csv);
    p.get("skip_labels", &cfg.skip_labels);
  }

  cfg.papi.dsp = cfg.dsp;
}

}  // namespace

GlobalConfig load_config(const std::string& path) {
  GlobalConfig cfg = default_config();
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    fail(Errc::parse, "config " + path + ": " + e.what());
  }
  if (!doc.is_object()) fail(Errc::parse, "config " + path + ": not a JSON object");
  apply_json(&cfg, doc);
  cfg.validate();
  return cfg;
}

void apply_override(GlobalConfig* config, const std::string& dotted_key,
                    const std::string& value) {
  const auto parts = split(dotted_key, '.');
  if (parts.empty() || parts.front().empty())
    fail(Errc::usage, "config override: empty key");
  json doc = json::object();
  json* cursor = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    (*cursor)[parts[i]] = json::object();
    cursor = &(*cursor)[parts[i]];
  }
  json parsed;
  try {
    parsed = json::parse(value);
    if (!parsed.is_number() && !parsed.is_boolean() && !parsed.is_array() &&
        !parsed.is_string())
      parsed = value;
  } catch (const json::parse_error&) {
    parsed = value;  // bare strings
  }
  (*cursor)[parts.back()] = parsed;
  apply_json(config, doc);
  config->validate();
}

}  // namespace vgan
