#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vgan/core.hpp"
#include "vgan/net.hpp"

namespace vgan::train {

struct TrainConfig {
  FdaKind target_kind = FdaKind::total;
  int epochs = 60;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  int k_folds = 10;
  double val_fraction = 0.0;  // > 0 keeps the best-by-validation snapshot
  bool balance = false;       // severity-balance training groups per fold
  double balance_factor = 1.0;

  void validate() const;
};

// A vowel group with features attached, ready for the network.
struct LabeledGroup {
  std::string group_id;
  std::string subject_id;
  double subject_total = 0.0;  // total FDA score, for banding
  net::GroupSample sample;     // papi/lip tensors + target
};

// ---- optimizer -----------------------------------------------------------------

struct AdamState {
  net::ParamMap first_moment;
  net::ParamMap second_moment;
  long step = 0;
};

AdamState make_adam_state(const net::ParamMap& params);

// Standard Adam with bias correction; updates params in place.
void adam_step(net::ParamMap& params, const net::ParamMap& grads, AdamState& state,
               double lr, double beta1, double beta2, double eps);

// ---- folds ----------------------------------------------------------------------

// Partition of subjects into k folds of sizes differing by at most one,
// stratified by severity band where counts allow. Seeded.
std::vector<std::vector<std::string>> kfold_speakers(
    const std::vector<std::string>& subject_ids,
    const std::vector<double>& subject_totals, int k, std::uint64_t seed);

// ---- training --------------------------------------------------------------------

struct TrainHistory {
  std::vector<double> train_loss;  // standardized MSE per epoch
  std::vector<double> val_loss;    // empty when no validation split
};

net::VganModel train(const std::vector<LabeledGroup>& groups,
                     const net::VganConfig& net_config, const TrainConfig& config,
                     TrainHistory* history = nullptr);

// ---- metrics ---------------------------------------------------------------------

double rmse(const std::vector<double>& targets, const std::vector<double>& predictions);
// 1 - SS_res/SS_tot; throws Errc::degenerate when all targets are equal.
double r2(const std::vector<double>& targets, const std::vector<double>& predictions);

struct GroupPrediction {
  std::string group_id;
  std::string subject_id;
  double target = 0.0;
  double predicted = 0.0;
};

std::vector<GroupPrediction> predict_groups(const net::VganModel& model,
                                            const std::vector<LabeledGroup>& groups);

struct SubjectScore {
  std::string subject_id;
  double target = 0.0;
  double predicted = 0.0;  // mean of the subject's group predictions
};

std::vector<SubjectScore> aggregate_subject(const std::vector<GroupPrediction>& preds);

struct EvalFragment {
  double rmse_group = 0.0;
  double rmse_subject = 0.0;
  std::optional<double> r2_subject;  // absent when undefined (constant targets)
  std::size_t n_groups = 0;
  std::size_t n_subjects = 0;
};

EvalFragment evaluate(const net::VganModel& model,
                      const std::vector<LabeledGroup>& groups);

// ---- cross-validation -------------------------------------------------------------

struct FoldReport {
  int fold = 0;
  std::vector<std::string> test_subjects;
  EvalFragment metrics;
  TrainHistory history;
  std::vector<GroupPrediction> predictions;
};

struct EvalReport {
  FdaKind target_kind = FdaKind::total;
  bool audio_only = false;
  int k_folds = 0;
  std::uint64_t seed = 0;
  std::vector<FoldReport> folds;
  EvalFragment pooled;              // metrics over all held-out predictions
  double normalized_rmse_subject = 0.0;  // pooled subject RMSE / scale_max
};

// Speaker-disjoint k-fold cross-validation; fold jobs may run on `jobs`
// threads, results are independent of the worker count.
EvalReport cross_validate(const std::vector<LabeledGroup>& groups,
                          const net::VganConfig& net_config,
                          const TrainConfig& config, int jobs = 1);

std::string report_to_json(const EvalReport& report);
std::string folds_to_csv(const EvalReport& report);
std::string loss_curves_to_csv(const EvalReport& report);

}  // namespace vgan::train
