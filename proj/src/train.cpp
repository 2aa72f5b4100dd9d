#include "vgan/train.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <sstream>
#include <thread>

#include "vgan/errors.hpp"
#include "vgan/util.hpp"

namespace vgan::train {

void TrainConfig::validate() const {
  if (epochs <= 0) fail(Errc::usage, "train config: epochs must be positive");
  if (batch_size <= 0) fail(Errc::usage, "train config: batch_size must be positive");
  if (!(learning_rate > 0.0) && learning_rate != 0.0)
    fail(Errc::usage, "train config: learning_rate must be >= 0");
  if (k_folds < 2) fail(Errc::usage, "train config: k_folds must be at least 2");
  if (val_fraction < 0.0 || val_fraction >= 1.0)
    fail(Errc::usage, "train config: val_fraction must lie in [0,1)");
}

AdamState make_adam_state(const net::ParamMap& params) {
  AdamState state;
  for (const auto& [name, p] : params) {
    state.first_moment.emplace(name, net::Tensor(p.rows, p.cols));
    state.second_moment.emplace(name, net::Tensor(p.rows, p.cols));
  }
  return state;
}

void adam_step(net::ParamMap& params, const net::ParamMap& grads, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (auto& [name, p] : params) {
    const auto git = grads.find(name);
    if (git == grads.end())
      fail(Errc::usage, "adam_step: gradient missing for \"" + name + "\"");
    const net::Tensor& g = git->second;
    if (!g.same_shape(p))
      fail(Errc::usage, "adam_step: gradient shape mismatch for \"" + name + "\"");
    net::Tensor& m = state.first_moment.at(name);
    net::Tensor& v = state.second_moment.at(name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m.data[i] = beta1 * m.data[i] + (1.0 - beta1) * g.data[i];
      v.data[i] = beta2 * v.data[i] + (1.0 - beta2) * g.data[i] * g.data[i];
      const double m_hat = m.data[i] / bc1;
      const double v_hat = v.data[i] / bc2;
      p.data[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

std::vector<std::vector<std::string>> kfold_speakers(
    const std::vector<std::string>& subject_ids,
    const std::vector<double>& subject_totals, int k, std::uint64_t seed) {
  if (static_cast<int>(subject_ids.size()) < k)
    fail(Errc::validation, "kfold: " + std::to_string(subject_ids.size()) +
                               " subjects cannot fill " + std::to_string(k) + " folds");
  if (subject_ids.size() != subject_totals.size())
    fail(Errc::usage, "kfold: totals not aligned with subjects");

  // Group by severity band, shuffle within band, deal round-robin with a
  // continuing fold cursor so fold sizes differ by at most one.
  std::array<std::vector<std::size_t>, 4> by_band;
  for (std::size_t i = 0; i < subject_ids.size(); ++i)
    by_band[static_cast<int>(severity_band(subject_totals[i]))].push_back(i);

  Rng rng = Rng::seeded(seed);
  std::vector<std::vector<std::string>> folds(k);
  int cursor = 0;
  for (auto& band : by_band) {
    rng.shuffle(band);
    for (std::size_t idx : band) {
      folds[cursor % k].push_back(subject_ids[idx]);
      ++cursor;
    }
  }
  return folds;
}

namespace {

void fit_standardization(const std::vector<LabeledGroup>& groups,
                         const std::vector<std::size_t>& idx,
                         net::VganModel* model) {
  const auto& c = model->config;
  const double floor = 1e-8;

  std::vector<double> pm(c.in_dim, 0.0), ps(c.in_dim, 0.0);
  std::vector<double> lm(c.visual_in, 0.0), ls(c.visual_in, 0.0);
  std::size_t rows = 0, lip_rows = 0;
  for (std::size_t i : idx) {
    const auto& g = groups[i];
    for (int r = 0; r < c.n_nodes; ++r) {
      for (int j = 0; j < c.in_dim; ++j) pm[j] += g.sample.papi.at(r, j);
      ++rows;
    }
    if (g.sample.has_lip) {
      for (int r = 0; r < c.n_nodes; ++r) {
        for (int j = 0; j < c.visual_in; ++j) lm[j] += g.sample.lip.at(r, j);
        ++lip_rows;
      }
    }
  }
  for (double& v : pm) v /= static_cast<double>(rows);
  if (lip_rows > 0)
    for (double& v : lm) v /= static_cast<double>(lip_rows);

  for (std::size_t i : idx) {
    const auto& g = groups[i];
    for (int r = 0; r < c.n_nodes; ++r) {
      for (int j = 0; j < c.in_dim; ++j) {
        const double d = g.sample.papi.at(r, j) - pm[j];
        ps[j] += d * d;
      }
    }
    if (g.sample.has_lip) {
      for (int r = 0; r < c.n_nodes; ++r) {
        for (int j = 0; j < c.visual_in; ++j) {
          const double d = g.sample.lip.at(r, j) - lm[j];
          ls[j] += d * d;
        }
      }
    }
  }
  for (double& v : ps) v = std::max(std::sqrt(v / static_cast<double>(rows)), floor);
  if (lip_rows > 0)
    for (double& v : ls)
      v = std::max(std::sqrt(v / static_cast<double>(lip_rows)), floor);
  else
    ls.assign(c.visual_in, 1.0);

  model->papi_mean = std::move(pm);
  model->papi_std = std::move(ps);
  model->lip_mean = std::move(lm);
  model->lip_std = std::move(ls);

  std::vector<double> targets;
  targets.reserve(idx.size());
  for (std::size_t i : idx) targets.push_back(groups[i].sample.target);
  model->target_mean = mean(targets);
  model->target_std = std::max(stddev(targets), floor);
}

double epoch_eval_loss(const net::VganModel& model,
                       const std::vector<LabeledGroup>& groups,
                       const std::vector<std::size_t>& idx) {
  double acc = 0.0;
  for (std::size_t i : idx) {
    const auto& s = groups[i].sample;
    const auto trace =
        net::forward(model, s.papi, s.has_lip ? &s.lip : nullptr);
    const double d =
        (trace.prediction - s.target) / model.target_std;  // standardized units
    acc += d * d;
  }
  return acc / static_cast<double>(idx.size());
}

}  // namespace

net::VganModel train(const std::vector<LabeledGroup>& groups,
                     const net::VganConfig& net_config, const TrainConfig& config,
                     TrainHistory* history) {
  config.validate();
  if (groups.empty()) fail(Errc::validation, "train: empty training set");
  for (const auto& g : groups) {
    if (!net_config.audio_only && !g.sample.has_lip)
      fail(Errc::validation, "train: group " + g.group_id +
                                 " lacks lip features required by the bimodal model");
  }

  net::VganModel model = net::init_params(net_config, config.seed);
  model.target_kind = config.target_kind;

  Rng rng = Rng::seeded(splitmix64(config.seed ^ 0x7261696e));

  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);

  // Optional validation split (by group).
  std::vector<std::size_t> val_idx;
  if (config.val_fraction > 0.0) {
    rng.shuffle(order);
    const auto n_val = static_cast<std::size_t>(
        std::floor(config.val_fraction * static_cast<double>(order.size())));
    val_idx.assign(order.end() - n_val, order.end());
    order.resize(order.size() - n_val);
    if (order.empty()) fail(Errc::validation, "train: validation split leaves no data");
  }

  // Standardization statistics come from the optimized-on part only.
  fit_standardization(groups, order, &model);

  AdamState adam = make_adam_state(model.params);
  net::ParamMap best_params;
  double best_val = 1e300;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t b0 = 0; b0 < order.size();
         b0 += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t b1 =
          std::min(order.size(), b0 + static_cast<std::size_t>(config.batch_size));
      std::vector<net::GroupSample> batch;
      batch.reserve(b1 - b0);
      for (std::size_t i = b0; i < b1; ++i) batch.push_back(groups[order[i]].sample);
      double loss = 0.0;
      const auto grads = net::gradients(model, batch, &loss);
      if (config.learning_rate > 0.0)
        adam_step(model.params, grads, adam, config.learning_rate, config.beta1,
                  config.beta2, config.eps);
      epoch_loss += loss;
      ++batches;
    }
    epoch_loss /= static_cast<double>(batches);
    if (history) history->train_loss.push_back(epoch_loss);

    if (!val_idx.empty()) {
      const double vl = epoch_eval_loss(model, groups, val_idx);
      if (history) history->val_loss.push_back(vl);
      if (vl < best_val) {
        best_val = vl;
        best_params = model.params;
      }
    }
  }
  if (!val_idx.empty() && !best_params.empty()) model.params = std::move(best_params);
  return model;
}

double rmse(const std::vector<double>& targets, const std::vector<double>& predictions) {
  return std::sqrt(net::mse_loss(predictions, targets));
}

double r2(const std::vector<double>& targets, const std::vector<double>& predictions) {
  if (targets.empty() || targets.size() != predictions.size())
    fail(Errc::usage, "r2: need equal nonempty lists");
  const double m = mean(targets);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    ss_res += (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
    ss_tot += (targets[i] - m) * (targets[i] - m);
  }
  if (ss_tot <= 0.0)
    fail(Errc::degenerate, "r2 undefined: all targets are equal");
  return 1.0 - ss_res / ss_tot;
}

std::vector<GroupPrediction> predict_groups(const net::VganModel& model,
                                            const std::vector<LabeledGroup>& groups) {
  std::vector<GroupPrediction> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    const auto& s = g.sample;
    const auto trace = net::forward(model, s.papi, s.has_lip ? &s.lip : nullptr);
    out.push_back({g.group_id, g.subject_id, s.target, trace.prediction});
  }
  return out;
}

std::vector<SubjectScore> aggregate_subject(const std::vector<GroupPrediction>& preds) {
  std::map<std::string, std::pair<std::vector<double>, double>> by_subject;
  for (const auto& p : preds) {
    auto& slot = by_subject[p.subject_id];
    slot.first.push_back(p.predicted);
    slot.second = p.target;
  }
  std::vector<SubjectScore> out;
  out.reserve(by_subject.size());
  for (const auto& [id, slot] : by_subject)
    out.push_back({id, slot.second, mean(slot.first)});
  return out;
}

EvalFragment evaluate(const net::VganModel& model,
                      const std::vector<LabeledGroup>& groups) {
  if (groups.empty()) fail(Errc::validation, "evaluate: empty evaluation set");
  const auto preds = predict_groups(model, groups);

  EvalFragment frag;
  frag.n_groups = preds.size();

  std::vector<double> gy, gp;
  for (const auto& p : preds) {
    gy.push_back(p.target);
    gp.push_back(p.predicted);
  }
  frag.rmse_group = rmse(gy, gp);

  const auto subjects = aggregate_subject(preds);
  frag.n_subjects = subjects.size();
  std::vector<double> sy, sp;
  for (const auto& s : subjects) {
    sy.push_back(s.target);
    sp.push_back(s.predicted);
  }
  frag.rmse_subject = rmse(sy, sp);
  try {
    frag.r2_subject = r2(sy, sp);
  } catch (const VganError& e) {
    if (e.code() != Errc::degenerate) throw;
  }
  return frag;
}

namespace {

EvalFragment metrics_from_predictions(const std::vector<GroupPrediction>& preds) {
  EvalFragment frag;
  frag.n_groups = preds.size();
  std::vector<double> gy, gp;
  for (const auto& p : preds) {
    gy.push_back(p.target);
    gp.push_back(p.predicted);
  }
  frag.rmse_group = rmse(gy, gp);
  const auto subjects = aggregate_subject(preds);
  frag.n_subjects = subjects.size();
  std::vector<double> sy, sp;
  for (const auto& s : subjects) {
    sy.push_back(s.target);
    sp.push_back(s.predicted);
  }
  frag.rmse_subject = rmse(sy, sp);
  try {
    frag.r2_subject = r2(sy, sp);
  } catch (const VganError& e) {
    if (e.code() != Errc::degenerate) throw;
  }
  return frag;
}

}  // namespace

EvalReport cross_validate(const std::vector<LabeledGroup>& groups,
                          const net::VganConfig& net_config,
                          const TrainConfig& config, int jobs) {
  config.validate();
  if (groups.empty()) fail(Errc::validation, "cross_validate: no groups");

  // Subjects in first-appearance order for a stable fold assignment.
  std::vector<std::string> subject_ids;
  std::vector<double> subject_totals;
  for (const auto& g : groups) {
    if (std::find(subject_ids.begin(), subject_ids.end(), g.subject_id) ==
        subject_ids.end()) {
      subject_ids.push_back(g.subject_id);
      subject_totals.push_back(g.subject_total);
    }
  }

  const auto folds =
      kfold_speakers(subject_ids, subject_totals, config.k_folds, config.seed);

  EvalReport report;
  report.target_kind = config.target_kind;
  report.audio_only = net_config.audio_only;
  report.k_folds = config.k_folds;
  report.seed = config.seed;
  report.folds.resize(folds.size());

  auto run_fold = [&](int f) {
    const auto& test_subjects = folds[f];
    auto in_test = [&](const std::string& id) {
      return std::find(test_subjects.begin(), test_subjects.end(), id) !=
             test_subjects.end();
    };
    std::vector<LabeledGroup> train_groups, test_groups;
    for (const auto& g : groups) {
      (in_test(g.subject_id) ? test_groups : train_groups).push_back(g);
    }
    // Speaker disjointness is structural here; re-check anyway.
    for (const auto& g : train_groups) {
      if (in_test(g.subject_id))
        fail(Errc::validation, "cross_validate: subject " + g.subject_id +
                                   " leaked into both partitions");
    }
    if (train_groups.empty() || test_groups.empty())
      fail(Errc::validation, "cross_validate: fold " + std::to_string(f) +
                                 " has an empty train or test partition");

    if (config.balance) {
      std::vector<double> totals;
      totals.reserve(train_groups.size());
      for (const auto& g : train_groups) totals.push_back(g.subject_total);
      std::array<std::vector<std::size_t>, 4> by_band;
      for (std::size_t i = 0; i < train_groups.size(); ++i)
        by_band[static_cast<int>(severity_band(totals[i]))].push_back(i);
      bool all_bands = true;
      for (const auto& band : by_band) all_bands &= !band.empty();
      if (all_bands) {
        std::size_t min_count = SIZE_MAX;
        for (const auto& band : by_band) min_count = std::min(min_count, band.size());
        const auto quota = static_cast<std::size_t>(
            std::llround(static_cast<double>(min_count) * config.balance_factor));
        Rng rng = Rng::seeded(splitmix64(config.seed ^ (0xba1a5ceULL + f)));
        std::vector<LabeledGroup> balanced;
        for (auto& band : by_band) {
          if (band.size() >= quota) {
            rng.shuffle(band);
            band.resize(quota);
            std::sort(band.begin(), band.end());
            for (std::size_t i : band) balanced.push_back(train_groups[i]);
          } else {
            for (std::size_t i : band) balanced.push_back(train_groups[i]);
            for (std::size_t k = band.size(); k < quota; ++k)
              balanced.push_back(train_groups[band[rng.index(band.size())]]);
          }
        }
        train_groups = std::move(balanced);
      }
    }

    TrainConfig fold_config = config;
    fold_config.seed = splitmix64(config.seed + 0x0f01d000 + static_cast<std::uint64_t>(f));

    FoldReport fr;
    fr.fold = f;
    fr.test_subjects = test_subjects;
    const auto model = train(train_groups, net_config, fold_config, &fr.history);
    fr.predictions = predict_groups(model, test_groups);
    fr.metrics = metrics_from_predictions(fr.predictions);
    report.folds[f] = std::move(fr);
  };

  if (jobs <= 1) {
    for (int f = 0; f < static_cast<int>(folds.size()); ++f) run_fold(f);
  } else {
    std::vector<std::thread> workers;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          const int f = next.fetch_add(1);
          if (f >= static_cast<int>(folds.size())) break;
          run_fold(f);
        }
      });
    }
    for (auto& w : workers) w.join();
  }

  std::vector<GroupPrediction> pooled;
  for (const auto& fr : report.folds)
    pooled.insert(pooled.end(), fr.predictions.begin(), fr.predictions.end());
  report.pooled = metrics_from_predictions(pooled);
  report.normalized_rmse_subject =
      report.pooled.rmse_subject / fda_scale_max(config.target_kind);
  return report;
}

using nlohmann::json;

namespace {
json fragment_to_json(const EvalFragment& f) {
  json j = {{"rmse_group", f.rmse_group},
            {"rmse_subject", f.rmse_subject},
            {"n_groups", f.n_groups},
            {"n_subjects", f.n_subjects}};
  if (f.r2_subject)
    j["r2_subject"] = *f.r2_subject;
  else
    j["r2_subject"] = nullptr;
  return j;
}
}  // namespace

std::string report_to_json(const EvalReport& report) {
  json doc;
  doc["target_kind"] = fda_kind_name(report.target_kind);
  doc["audio_only"] = report.audio_only;
  doc["k_folds"] = report.k_folds;
  doc["seed"] = report.seed;
  doc["pooled"] = fragment_to_json(report.pooled);
  doc["normalized_rmse_subject"] = report.normalized_rmse_subject;
  doc["folds"] = json::array();
  for (const auto& f : report.folds) {
    json jf = fragment_to_json(f.metrics);
    jf["fold"] = f.fold;
    jf["test_subjects"] = f.test_subjects;
    doc["folds"].push_back(jf);
  }
  return doc.dump(2) + "\n";
}

std::string folds_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "fold,n_groups,n_subjects,rmse_group,rmse_subject,r2_subject\n";
  for (const auto& f : report.folds) {
    out << f.fold << "," << f.metrics.n_groups << "," << f.metrics.n_subjects << ","
        << format_double(f.metrics.rmse_group) << ","
        << format_double(f.metrics.rmse_subject) << ","
        << (f.metrics.r2_subject ? format_double(*f.metrics.r2_subject) : "")
        << "\n";
  }
  return out.str();
}

std::string loss_curves_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "fold,epoch,train_loss,val_loss\n";
  for (const auto& f : report.folds) {
    for (std::size_t e = 0; e < f.history.train_loss.size(); ++e) {
      out << f.fold << "," << e << "," << format_double(f.history.train_loss[e]) << ",";
      if (e < f.history.val_loss.size()) out << format_double(f.history.val_loss[e]);
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace vgan::train
