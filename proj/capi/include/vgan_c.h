/*
 * C API for the vowel-graph dysarthria assessment pipeline.
 *
 * All functions that can fail return an int status code and leave a
 * human-readable message retrievable via vgan_ctx_error(). Handles are
 * opaque; every handle created by this API must be released with the
 * matching free/close call.
 *
 * Status codes: 0 success, 1 usage error, 2 data/validation error,
 * 3 numeric failure.
 */
#ifndef VGAN_C_H
#define VGAN_C_H

#include <stdint.h>

#if defined(_WIN32) || defined(_WIN64)
#define VGAN_API __declspec(dllexport)
#else
#define VGAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  VGAN_OK = 0,
  VGAN_ERR_USAGE = 1,
  VGAN_ERR_DATA = 2,
  VGAN_ERR_NUMERIC = 3
};

typedef struct vgan_ctx vgan_ctx;
typedef struct vgan_model vgan_model;

/* Context: configuration plus the last error message. */
VGAN_API vgan_ctx* vgan_ctx_new(void);
VGAN_API void vgan_ctx_free(vgan_ctx* ctx);
VGAN_API int vgan_ctx_load_config(vgan_ctx* ctx, const char* path);
/* Dotted-key override, e.g. ("train.epochs", "40"). Flags win over files. */
VGAN_API int vgan_ctx_set(vgan_ctx* ctx, const char* dotted_key, const char* value);
VGAN_API const char* vgan_ctx_error(const vgan_ctx* ctx);

/* Pipeline stages. Paths are UTF-8. */
VGAN_API int vgan_synth(vgan_ctx* ctx, const char* out_dir, int n_subjects,
                        uint64_t seed);
VGAN_API int vgan_extract(vgan_ctx* ctx, const char* manifest_path,
                          const char* out_features_csv, int jobs);
VGAN_API int vgan_augment(vgan_ctx* ctx, const char* manifest_path,
                          const char* features_csv, const char* out_groups_json);
VGAN_API int vgan_train(vgan_ctx* ctx, const char* manifest_path,
                        const char* groups_json, const char* features_csv,
                        const char* out_model, const char* out_history_csv);
VGAN_API int vgan_cross_validate(vgan_ctx* ctx, const char* manifest_path,
                                 const char* groups_json, const char* features_csv,
                                 const char* out_report_json,
                                 const char* out_folds_csv, const char* out_loss_csv,
                                 int jobs);
VGAN_API int vgan_eval(vgan_ctx* ctx, const char* model_path,
                       const char* manifest_path, const char* groups_json,
                       const char* features_csv, const char* out_report_json);
VGAN_API int vgan_predict(vgan_ctx* ctx, const char* model_path,
                          const char* manifest_path, const char* groups_json,
                          const char* features_csv, const char* out_csv);
VGAN_API int vgan_export_embeddings(vgan_ctx* ctx, const char* model_path,
                                    const char* manifest_path,
                                    const char* groups_json,
                                    const char* features_csv, const char* out_csv);
VGAN_API int vgan_segment_fit(vgan_ctx* ctx, const char* manifest_path,
                              int components, const char* out_vowel_model,
                              const char* out_other_model);
VGAN_API int vgan_segment(vgan_ctx* ctx, const char* audio_path,
                          const char* vowel_model_path,
                          const char* other_model_path, const char* out_textgrid);

/* Trained-model handle for in-process scoring. */
VGAN_API vgan_model* vgan_model_open(vgan_ctx* ctx, const char* path);
VGAN_API void vgan_model_close(vgan_model* model);
VGAN_API int vgan_model_is_audio_only(const vgan_model* model);
/* papi: 6x20 row-major; lip: 6x10 row-major or NULL for audio-only models. */
VGAN_API int vgan_model_predict(vgan_ctx* ctx, const vgan_model* model,
                                const double* papi, const double* lip,
                                double* out_score);

#ifdef __cplusplus
}
#endif

#endif /* VGAN_C_H */
