#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vgan/config.hpp"
#include "vgan/core.hpp"
#include "vgan/lip.hpp"
#include "vgan/papi.hpp"
#include "vgan/train.hpp"

namespace vgan::pipe {

// One observation's extracted features; the unit of the features CSV.
struct FeatureRow {
  std::string subject_id;
  std::string recording_id;
  double start = 0.0;
  double end = 0.0;
  std::string syllable;
  std::set<VowelClass> vowels;
  papi::PapiVector papi;
  bool lip_present = false;
  lip::LipVector lip;

  std::string key() const;
};

struct FeatureTable {
  std::vector<FeatureRow> rows;

  const FeatureRow* find(const std::string& key) const;
  std::string to_csv() const;
  static FeatureTable from_csv(const std::string& text);
};

// Group manifest entry: member observation keys per vowel.
struct GroupRef {
  std::string group_id;
  std::string subject_id;
  std::array<std::string, kVowelCount> member_keys;
};

struct GroupManifest {
  std::string mode;
  std::uint64_t seed = 0;
  bool balanced = false;
  std::size_t skipped_vowelless = 0;  // syllables without any vowel letter
  std::vector<GroupRef> groups;

  std::string to_json() const;
  static GroupManifest from_json(const std::string& text);
};

// ---- pipeline stages; every stage is deterministic given its seeds ---------

DatasetManifest run_synth(const GlobalConfig& config, const std::string& out_dir,
                          int n_subjects, std::uint64_t seed);

struct ExtractSummary {
  std::size_t observations = 0;
  std::size_t unmeasured = 0;  // default-row substitutions
  std::size_t with_lip = 0;
};

ExtractSummary run_extract(const GlobalConfig& config,
                           const std::string& manifest_path,
                           const std::string& out_features_csv, int jobs = 1);

GroupManifest run_augment(const GlobalConfig& config,
                          const std::string& manifest_path,
                          const std::string& features_csv,
                          const std::string& out_groups_json);

// Joins groups with features and targets for the configured kind.
std::vector<train::LabeledGroup> load_labeled_groups(
    const GlobalConfig& config, const std::string& manifest_path,
    const std::string& groups_json, const std::string& features_csv,
    FdaKind target_kind);

void run_train(const GlobalConfig& config, const std::string& manifest_path,
               const std::string& groups_json, const std::string& features_csv,
               const std::string& out_model, const std::string& out_history_csv);

train::EvalReport run_cross_validate(const GlobalConfig& config,
                                     const std::string& manifest_path,
                                     const std::string& groups_json,
                                     const std::string& features_csv,
                                     const std::string& out_report_json,
                                     const std::string& out_folds_csv,
                                     const std::string& out_loss_csv, int jobs = 1);

train::EvalFragment run_eval(const GlobalConfig& config,
                             const std::string& model_path,
                             const std::string& manifest_path,
                             const std::string& groups_json,
                             const std::string& features_csv,
                             const std::string& out_report_json);

void run_predict(const GlobalConfig& config, const std::string& model_path,
                 const std::string& manifest_path, const std::string& groups_json,
                 const std::string& features_csv, const std::string& out_csv);

void run_export_embeddings(const GlobalConfig& config, const std::string& model_path,
                           const std::string& manifest_path,
                           const std::string& groups_json,
                           const std::string& features_csv,
                           const std::string& out_csv);

void run_segment_fit(const GlobalConfig& config, const std::string& manifest_path,
                     int components, const std::string& out_vowel_model,
                     const std::string& out_other_model);

void run_segment(const GlobalConfig& config, const std::string& audio_path,
                 const std::string& vowel_model_path,
                 const std::string& other_model_path,
                 const std::string& out_textgrid);

}  // namespace vgan::pipe
