#include "vgan_c.h"

#include <algorithm>
#include <exception>
#include <functional>
#include <new>
#include <string>

#include "vgan/config.hpp"
#include "vgan/errors.hpp"
#include "vgan/net.hpp"
#include "vgan/pipeline.hpp"

struct vgan_ctx {
  vgan::GlobalConfig config = vgan::default_config();
  std::string error;
};

struct vgan_model {
  vgan::net::VganModel model;
};

namespace {

int guard(vgan_ctx* ctx, const std::function<void()>& body) {
  if (!ctx) return VGAN_ERR_USAGE;
  ctx->error.clear();
  try {
    body();
    return VGAN_OK;
  } catch (const vgan::VganError& e) {
    ctx->error = std::string(vgan::errc_name(e.code())) + ": " + e.what();
    return vgan::exit_code(e.code());
  } catch (const std::exception& e) {
    ctx->error = std::string("internal: ") + e.what();
    return VGAN_ERR_NUMERIC;
  }
}

std::string arg(const char* s) { return s ? std::string(s) : std::string(); }

}  // namespace

extern "C" {

vgan_ctx* vgan_ctx_new(void) { return new (std::nothrow) vgan_ctx(); }

void vgan_ctx_free(vgan_ctx* ctx) { delete ctx; }

int vgan_ctx_load_config(vgan_ctx* ctx, const char* path) {
  return guard(ctx, [&] { ctx->config = vgan::load_config(arg(path)); });
}

int vgan_ctx_set(vgan_ctx* ctx, const char* dotted_key, const char* value) {
  return guard(ctx, [&] {
    vgan::apply_override(&ctx->config, arg(dotted_key), arg(value));
  });
}

const char* vgan_ctx_error(const vgan_ctx* ctx) {
  return ctx ? ctx->error.c_str() : "null context";
}

int vgan_synth(vgan_ctx* ctx, const char* out_dir, int n_subjects, uint64_t seed) {
  return guard(ctx, [&] {
    vgan::pipe::run_synth(ctx->config, arg(out_dir), n_subjects, seed);
  });
}

int vgan_extract(vgan_ctx* ctx, const char* manifest_path,
                 const char* out_features_csv, int jobs) {
  return guard(ctx, [&] {
    vgan::pipe::run_extract(ctx->config, arg(manifest_path), arg(out_features_csv),
                            jobs);
  });
}

int vgan_augment(vgan_ctx* ctx, const char* manifest_path, const char* features_csv,
                 const char* out_groups_json) {
  return guard(ctx, [&] {
    vgan::pipe::run_augment(ctx->config, arg(manifest_path), arg(features_csv),
                            arg(out_groups_json));
  });
}

int vgan_train(vgan_ctx* ctx, const char* manifest_path, const char* groups_json,
               const char* features_csv, const char* out_model,
               const char* out_history_csv) {
  return guard(ctx, [&] {
    vgan::pipe::run_train(ctx->config, arg(manifest_path), arg(groups_json),
                          arg(features_csv), arg(out_model), arg(out_history_csv));
  });
}

int vgan_cross_validate(vgan_ctx* ctx, const char* manifest_path,
                        const char* groups_json, const char* features_csv,
                        const char* out_report_json, const char* out_folds_csv,
                        const char* out_loss_csv, int jobs) {
  return guard(ctx, [&] {
    vgan::pipe::run_cross_validate(ctx->config, arg(manifest_path), arg(groups_json),
                                   arg(features_csv), arg(out_report_json),
                                   arg(out_folds_csv), arg(out_loss_csv), jobs);
  });
}

int vgan_eval(vgan_ctx* ctx, const char* model_path, const char* manifest_path,
              const char* groups_json, const char* features_csv,
              const char* out_report_json) {
  return guard(ctx, [&] {
    vgan::pipe::run_eval(ctx->config, arg(model_path), arg(manifest_path),
                         arg(groups_json), arg(features_csv), arg(out_report_json));
  });
}

int vgan_predict(vgan_ctx* ctx, const char* model_path, const char* manifest_path,
                 const char* groups_json, const char* features_csv,
                 const char* out_csv) {
  return guard(ctx, [&] {
    vgan::pipe::run_predict(ctx->config, arg(model_path), arg(manifest_path),
                            arg(groups_json), arg(features_csv), arg(out_csv));
  });
}

int vgan_export_embeddings(vgan_ctx* ctx, const char* model_path,
                           const char* manifest_path, const char* groups_json,
                           const char* features_csv, const char* out_csv) {
  return guard(ctx, [&] {
    vgan::pipe::run_export_embeddings(ctx->config, arg(model_path),
                                      arg(manifest_path), arg(groups_json),
                                      arg(features_csv), arg(out_csv));
  });
}

int vgan_segment_fit(vgan_ctx* ctx, const char* manifest_path, int components,
                     const char* out_vowel_model, const char* out_other_model) {
  return guard(ctx, [&] {
    vgan::pipe::run_segment_fit(ctx->config, arg(manifest_path), components,
                                arg(out_vowel_model), arg(out_other_model));
  });
}

int vgan_segment(vgan_ctx* ctx, const char* audio_path,
                 const char* vowel_model_path, const char* other_model_path,
                 const char* out_textgrid) {
  return guard(ctx, [&] {
    vgan::pipe::run_segment(ctx->config, arg(audio_path), arg(vowel_model_path),
                            arg(other_model_path), arg(out_textgrid));
  });
}

vgan_model* vgan_model_open(vgan_ctx* ctx, const char* path) {
  vgan_model* out = nullptr;
  const int rc = guard(ctx, [&] {
    out = new vgan_model{vgan::net::load_model(arg(path))};
  });
  if (rc != VGAN_OK) {
    delete out;
    return nullptr;
  }
  return out;
}

void vgan_model_close(vgan_model* model) { delete model; }

int vgan_model_is_audio_only(const vgan_model* model) {
  return model && model->model.config.audio_only ? 1 : 0;
}

int vgan_model_predict(vgan_ctx* ctx, const vgan_model* model, const double* papi,
                       const double* lip, double* out_score) {
  return guard(ctx, [&] {
    if (!model || !papi || !out_score)
      vgan::fail(vgan::Errc::usage, "model_predict: null argument");
    const auto& c = model->model.config;
    vgan::net::Tensor p(c.n_nodes, c.in_dim);
    std::copy(papi, papi + p.size(), p.data.begin());
    vgan::net::Tensor l(c.n_nodes, c.visual_in);
    if (lip) std::copy(lip, lip + l.size(), l.data.begin());
    if (!c.audio_only && !lip)
      vgan::fail(vgan::Errc::validation,
                 "model_predict: bimodal model requires lip features");
    const auto trace =
        vgan::net::forward(model->model, p, c.audio_only ? nullptr : &l);
    *out_score = trace.prediction;
  });
}

}  // extern "C"
