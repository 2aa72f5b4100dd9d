// Command-line front end; all real work happens behind the C API.
#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "vgan_c.h"

namespace {

struct CtxDeleter {
  void operator()(vgan_ctx* c) const { vgan_ctx_free(c); }
};
using CtxPtr = std::unique_ptr<vgan_ctx, CtxDeleter>;

int finish(vgan_ctx* ctx, int rc) {
  if (rc != VGAN_OK) std::fprintf(stderr, "vgan: error: %s\n", vgan_ctx_error(ctx));
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audio-visual vowel-graph dysarthria severity pipeline"};
  app.require_subcommand(1);
  // Global flags remain valid after the subcommand name.
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--set", overrides,
                 "Override a config key, e.g. --set train.epochs=40")
      ->take_all();
  app.add_option("--seed", seed, "Seed for every seeded stage")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--jobs", jobs, "Per-file/per-fold worker threads");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  int synth_subjects = 10;
  std::string synth_out;
  synth->add_option("--subjects", synth_subjects, "Number of subjects");
  synth->add_option("--out", synth_out, "Output directory")->required();

  // extract
  auto* extract = app.add_subcommand("extract", "Extract features from a manifest");
  std::string ex_manifest, ex_out;
  extract->add_option("--manifest", ex_manifest, "Dataset manifest JSON")->required();
  extract->add_option("--out", ex_out, "Output features CSV")->required();

  // segment
  auto* segment = app.add_subcommand("segment", "GMM vowel segment detection");
  bool seg_fit = false;
  std::string seg_manifest, seg_audio, seg_vowel, seg_other, seg_out;
  int seg_components = 8;
  segment->add_flag("--fit", seg_fit, "Fit vowel/other models from a manifest");
  segment->add_option("--manifest", seg_manifest, "Manifest (with --fit)");
  segment->add_option("--components", seg_components, "Mixture components (with --fit)");
  segment->add_option("--audio", seg_audio, "WAV to segment");
  segment->add_option("--gmm-vowel", seg_vowel, "Vowel model JSON")->required();
  segment->add_option("--gmm-other", seg_other, "Non-vowel model JSON")->required();
  segment->add_option("--out", seg_out, "Output TextGrid (or model dir with --fit)");

  // augment
  auto* augment = app.add_subcommand("augment", "Build vowel-group samples");
  std::string au_manifest, au_features, au_out, au_mode;
  std::uint64_t au_n = 0;
  bool au_balance = false;
  augment->add_option("--manifest", au_manifest, "Dataset manifest JSON")->required();
  augment->add_option("--features", au_features, "Features CSV")->required();
  augment->add_option("--out", au_out, "Output group manifest JSON")->required();
  augment->add_option("--mode", au_mode, "zip|random");
  augment->add_option("--n", au_n, "Groups per subject (mode=random)");
  augment->add_flag("--balance", au_balance, "Severity-balance the groups");

  // train
  auto* train = app.add_subcommand("train", "Train a model (or run cross-validation)");
  std::string tr_manifest, tr_groups, tr_features, tr_model, tr_history;
  std::string tr_report, tr_folds, tr_loss, tr_target;
  bool tr_cv = false, tr_audio_only = false;
  int tr_epochs = -1;
  double tr_lr = -1.0;
  train->add_option("--manifest", tr_manifest, "Dataset manifest JSON")->required();
  train->add_option("--groups", tr_groups, "Group manifest JSON")->required();
  train->add_option("--features", tr_features, "Features CSV")->required();
  train->add_option("--target", tr_target, "Target kind (total, lips, ...)");
  train->add_option("--epochs", tr_epochs, "Training epochs");
  train->add_option("--lr", tr_lr, "Learning rate");
  train->add_flag("--audio-only", tr_audio_only, "Drop the visual branch");
  train->add_flag("--cv", tr_cv, "Run k-fold speaker-disjoint cross-validation");
  train->add_option("--out", tr_model, "Output model JSON (plain training)");
  train->add_option("--history", tr_history, "Loss history CSV (plain training)");
  train->add_option("--report", tr_report, "Report JSON (with --cv)");
  train->add_option("--folds-csv", tr_folds, "Per-fold CSV (with --cv)");
  train->add_option("--loss-csv", tr_loss, "Loss curves CSV (with --cv)");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a model on groups");
  std::string ev_model, ev_manifest, ev_groups, ev_features, ev_report;
  eval->add_option("--model", ev_model, "Model JSON")->required();
  eval->add_option("--manifest", ev_manifest, "Dataset manifest JSON")->required();
  eval->add_option("--groups", ev_groups, "Group manifest JSON")->required();
  eval->add_option("--features", ev_features, "Features CSV")->required();
  eval->add_option("--report", ev_report, "Output report JSON")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "Score groups with a model");
  std::string pr_model, pr_manifest, pr_groups, pr_features, pr_out;
  predict->add_option("--model", pr_model, "Model JSON")->required();
  predict->add_option("--manifest", pr_manifest, "Dataset manifest JSON")->required();
  predict->add_option("--groups", pr_groups, "Group manifest JSON")->required();
  predict->add_option("--features", pr_features, "Features CSV")->required();
  predict->add_option("--out", pr_out, "Output predictions CSV")->required();

  // export-embeddings
  auto* expemb = app.add_subcommand("export-embeddings",
                                    "Dump penultimate embeddings per group");
  std::string em_model, em_manifest, em_groups, em_features, em_out;
  expemb->add_option("--model", em_model, "Model JSON")->required();
  expemb->add_option("--manifest", em_manifest, "Dataset manifest JSON")->required();
  expemb->add_option("--groups", em_groups, "Group manifest JSON")->required();
  expemb->add_option("--features", em_features, "Features CSV")->required();
  expemb->add_option("--out", em_out, "Output embeddings CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "vgan: error: usage: %s\n", e.what());
    std::fprintf(stderr, "%s", app.help().c_str());
    return VGAN_ERR_USAGE;
  }

  CtxPtr ctx(vgan_ctx_new());
  if (!ctx) {
    std::fprintf(stderr, "vgan: error: internal: out of memory\n");
    return VGAN_ERR_NUMERIC;
  }

  if (!config_path.empty()) {
    const int rc = vgan_ctx_load_config(ctx.get(), config_path.c_str());
    if (rc != VGAN_OK) return finish(ctx.get(), rc);
  }
  auto set = [&](const std::string& key, const std::string& value) -> int {
    return vgan_ctx_set(ctx.get(), key.c_str(), value.c_str());
  };
  if (seed_given) {
    for (const char* key : {"augment.seed", "train.seed", "gmm.seed"}) {
      const int rc = set(key, std::to_string(seed));
      if (rc != VGAN_OK) return finish(ctx.get(), rc);
    }
  }
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "vgan: error: usage: --set expects key=value, got %s\n",
                   kv.c_str());
      return VGAN_ERR_USAGE;
    }
    const int rc = set(kv.substr(0, eq), kv.substr(eq + 1));
    if (rc != VGAN_OK) return finish(ctx.get(), rc);
  }

  // Subcommand-local overrides (flags win over config).
  if (augment->parsed()) {
    if (!au_mode.empty()) {
      const int rc = set("augment.mode", au_mode);
      if (rc != VGAN_OK) return finish(ctx.get(), rc);
    }
    if (au_n > 0) {
      const int rc = set("augment.n", std::to_string(au_n));
      if (rc != VGAN_OK) return finish(ctx.get(), rc);
    }
    if (au_balance) {
      const int rc = set("augment.balance", "true");
      if (rc != VGAN_OK) return finish(ctx.get(), rc);
    }
  }
  if (train->parsed()) {
    if (!tr_target.empty()) {
      const int rc = set("train.target_kind", tr_target);
      if (rc != VGAN_OK) return finish(ctx.get(), rc);
    }
    if (tr_epochs > 0) {
      const int rc = set("train.epochs", std::to_string(tr_epochs));
      if (rc != VGAN_OK) return finish(ctx.get(), rc);
    }
    if (tr_lr >= 0.0) {
      const int rc = set("train.learning_rate", std::to_string(tr_lr));
      if (rc != VGAN_OK) return finish(ctx.get(), rc);
    }
    if (tr_audio_only) {
      const int rc = set("vgan.audio_only", "true");
      if (rc != VGAN_OK) return finish(ctx.get(), rc);
    }
  }

  int rc = VGAN_OK;
  if (synth->parsed()) {
    rc = vgan_synth(ctx.get(), synth_out.c_str(), synth_subjects, seed);
  } else if (extract->parsed()) {
    rc = vgan_extract(ctx.get(), ex_manifest.c_str(), ex_out.c_str(), jobs);
  } else if (segment->parsed()) {
    if (seg_fit) {
      if (seg_manifest.empty()) {
        std::fprintf(stderr, "vgan: error: usage: segment --fit requires --manifest\n");
        return VGAN_ERR_USAGE;
      }
      rc = vgan_segment_fit(ctx.get(), seg_manifest.c_str(), seg_components,
                            seg_vowel.c_str(), seg_other.c_str());
    } else {
      if (seg_audio.empty() || seg_out.empty()) {
        std::fprintf(stderr,
                     "vgan: error: usage: segment requires --audio and --out\n");
        return VGAN_ERR_USAGE;
      }
      rc = vgan_segment(ctx.get(), seg_audio.c_str(), seg_vowel.c_str(),
                        seg_other.c_str(), seg_out.c_str());
    }
  } else if (augment->parsed()) {
    rc = vgan_augment(ctx.get(), au_manifest.c_str(), au_features.c_str(),
                      au_out.c_str());
  } else if (train->parsed()) {
    if (tr_cv) {
      rc = vgan_cross_validate(ctx.get(), tr_manifest.c_str(), tr_groups.c_str(),
                               tr_features.c_str(), tr_report.c_str(),
                               tr_folds.c_str(), tr_loss.c_str(), jobs);
    } else {
      if (tr_model.empty()) {
        std::fprintf(stderr, "vgan: error: usage: train requires --out\n");
        return VGAN_ERR_USAGE;
      }
      rc = vgan_train(ctx.get(), tr_manifest.c_str(), tr_groups.c_str(),
                      tr_features.c_str(), tr_model.c_str(), tr_history.c_str());
    }
  } else if (eval->parsed()) {
    rc = vgan_eval(ctx.get(), ev_model.c_str(), ev_manifest.c_str(),
                   ev_groups.c_str(), ev_features.c_str(), ev_report.c_str());
  } else if (predict->parsed()) {
    rc = vgan_predict(ctx.get(), pr_model.c_str(), pr_manifest.c_str(),
                      pr_groups.c_str(), pr_features.c_str(), pr_out.c_str());
  } else if (expemb->parsed()) {
    rc = vgan_export_embeddings(ctx.get(), em_model.c_str(), em_manifest.c_str(),
                                em_groups.c_str(), em_features.c_str(),
                                em_out.c_str());
  }
  return finish(ctx.get(), rc);
}
