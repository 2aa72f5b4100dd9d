#include "vgan/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "vgan/augment.hpp"
#include "vgan/dsp.hpp"
#include "vgan/errors.hpp"
#include "vgan/gmm.hpp"
#include "vgan/synth.hpp"
#include "vgan/util.hpp"

namespace vgan::pipe {

using nlohmann::json;

std::string FeatureRow::key() const {
  return recording_id + "#" + format_double(start) + "-" + format_double(end);
}

const FeatureRow* FeatureTable::find(const std::string& key) const {
  for (const auto& row : rows) {
    if (row.key() == key) return &row;
  }
  return nullptr;
}

std::string FeatureTable::to_csv() const {
  std::ostringstream out;
  out << "subject_id,recording_id,start,end,syllable,vowels,measured,gop_present";
  for (const auto& name : papi::papi_slot_names()) out << "," << name;
  out << ",lip_present";
  for (const auto& name : lip::lip_slot_names()) out << "," << name;
  out << "\n";
  for (const auto& r : rows) {
    out << r.subject_id << "," << r.recording_id << "," << format_double(r.start)
        << "," << format_double(r.end) << "," << r.syllable << ",";
    bool first = true;
    for (VowelClass v : kVowelOrder) {
      if (!r.vowels.count(v)) continue;
      if (!first) out << "|";
      out << vowel_name(v);
      first = false;
    }
    out << "," << (r.papi.measured ? 1 : 0) << "," << (r.papi.gop_present ? 1 : 0);
    for (double v : r.papi.values) out << "," << format_double(v);
    out << "," << (r.lip_present ? 1 : 0);
    for (double v : r.lip.values) out << "," << format_double(v);
    out << "\n";
  }
  return out.str();
}

FeatureTable FeatureTable::from_csv(const std::string& text) {
  FeatureTable table;
  const auto lines = split(text, '\n');
  if (lines.empty()) fail(Errc::parse, "features CSV: empty document");
  const auto header = split(trim(lines[0]), ',');
  const std::size_t expected = 8 + papi::kPapiDim + 1 + lip::kLipDim;
  if (header.size() != expected)
    fail(Errc::parse, "features CSV: expected " + std::to_string(expected) +
                          " columns, found " + std::to_string(header.size()));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != expected)
      fail(Errc::parse, "features CSV row " + std::to_string(i + 1) +
                            ": column count mismatch");
    FeatureRow row;
    row.subject_id = cols[0];
    row.recording_id = cols[1];
    bool ok1 = false, ok2 = false;
    row.start = parse_double(cols[2], &ok1);
    row.end = parse_double(cols[3], &ok2);
    if (!ok1 || !ok2)
      fail(Errc::parse, "features CSV row " + std::to_string(i + 1) + ": bad start/end");
    row.syllable = cols[4];
    for (const auto& name : split(cols[5], '|')) {
      if (name.empty()) continue;
      const auto v = vowel_from_name(name);
      if (!v) fail(Errc::parse, "features CSV row " + std::to_string(i + 1) +
                                    ": unknown vowel " + name);
      row.vowels.insert(*v);
    }
    row.papi.measured = cols[6] == "1";
    row.papi.gop_present = cols[7] == "1";
    std::size_t c = 8;
    for (int k = 0; k < papi::kPapiDim; ++k, ++c) {
      bool ok = false;
      row.papi[k] = parse_double(cols[c], &ok);
      if (!ok) fail(Errc::parse, "features CSV row " + std::to_string(i + 1) +
                                     ": bad value in column " + header[c]);
    }
    row.lip_present = cols[c++] == "1";
    for (int k = 0; k < lip::kLipDim; ++k, ++c) {
      bool ok = false;
      row.lip[k] = parse_double(cols[c], &ok);
      if (!ok) fail(Errc::parse, "features CSV row " + std::to_string(i + 1) +
                                     ": bad value in column " + header[c]);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string GroupManifest::to_json() const {
  json doc;
  doc["mode"] = mode;
  doc["seed"] = seed;
  doc["balanced"] = balanced;
  doc["skipped_vowelless"] = skipped_vowelless;
  doc["groups"] = json::array();
  for (const auto& g : groups) {
    json members = json::object();
    for (int v = 0; v < kVowelCount; ++v)
      members[vowel_name(kVowelOrder[v])] = g.member_keys[v];
    doc["groups"].push_back({{"group_id", g.group_id},
                             {"subject_id", g.subject_id},
                             {"members", members}});
  }
  return doc.dump(2) + "\n";
}

GroupManifest GroupManifest::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::parse, std::string("group manifest: ") + e.what());
  }
  GroupManifest gm;
  try {
    gm.mode = doc.at("mode").get<std::string>();
    gm.seed = doc.at("seed").get<std::uint64_t>();
    gm.balanced = doc.at("balanced").get<bool>();
    gm.skipped_vowelless = doc.at("skipped_vowelless").get<std::size_t>();
    for (const auto& g : doc.at("groups")) {
      GroupRef ref;
      ref.group_id = g.at("group_id").get<std::string>();
      ref.subject_id = g.at("subject_id").get<std::string>();
      const auto& members = g.at("members");
      for (int v = 0; v < kVowelCount; ++v)
        ref.member_keys[v] = members.at(vowel_name(kVowelOrder[v])).get<std::string>();
      gm.groups.push_back(std::move(ref));
    }
  } catch (const json::exception& e) {
    fail(Errc::parse, std::string("group manifest: ") + e.what());
  }
  return gm;
}

DatasetManifest run_synth(const GlobalConfig& config, const std::string& out_dir,
                          int n_subjects, std::uint64_t seed) {
  synth::CorpusOptions options;
  options.n_subjects = n_subjects;
  options.seed = seed;
  options.synth = config.synth;
  const auto manifest = synth::gen_corpus(options, out_dir);
  const auto report = validate_manifest(manifest, true);
  if (!report.ok())
    fail(Errc::validation, "generated corpus failed validation:\n" + report.to_string());
  return manifest;
}

namespace {

struct RawObservation {
  SyllableObservation obs;
  io::Interval vowel_interval;
  const RecordingEntry* recording = nullptr;
};

std::vector<RawObservation> collect_observations(const GlobalConfig& config,
                                                 const DatasetManifest& manifest,
                                                 const io::GopTable& gop) {
  std::vector<RawObservation> out;
  for (const auto& rec : manifest.recordings) {
    io::TextGridWarnings warnings;
    const auto tiers = io::read_segments_file(
        path_join(manifest.base_dir, rec.segment_path), &warnings);
    for (const auto& message : warnings.messages)
      std::fprintf(stderr, "vgan: warning: %s: %s\n", rec.segment_path.c_str(),
                   message.c_str());
    const io::SegmentTier* syllables = nullptr;
    const io::SegmentTier* vowels = nullptr;
    for (const auto& tier : tiers) {
      if (tier.name == config.syllable_tier) syllables = &tier;
      if (!config.vowel_tier.empty() && tier.name == config.vowel_tier)
        vowels = &tier;
    }
    if (!syllables && tiers.size() == 1 && config.syllable_tier.empty())
      syllables = &tiers.front();
    if (!syllables)
      fail(Errc::validation, rec.segment_path + ": no tier named \"" +
                                 config.syllable_tier + "\"");

    for (const auto& interval : syllables->intervals) {
      const std::string label = trim(interval.label);
      if (std::find(config.skip_labels.begin(), config.skip_labels.end(), label) !=
          config.skip_labels.end())
        continue;

      RawObservation raw;
      raw.recording = &rec;
      raw.obs.subject_id = rec.subject_id;
      raw.obs.recording_id = rec.recording_id;
      raw.obs.start = interval.start;
      raw.obs.end = interval.end;
      raw.obs.syllable_text = label;
      raw.obs.vowel_classes = vowel_classes_of(label);
      raw.obs.audio_ref = rec.audio_path;
      raw.obs.landmark_ref = rec.landmark_path;

      raw.vowel_interval = {interval.start, interval.end, label};
      if (vowels) {
        for (const auto& vi : vowels->intervals) {
          const double lo = std::max(vi.start, interval.start);
          const double hi = std::min(vi.end, interval.end);
          if (hi > lo) {
            raw.vowel_interval = {lo, hi, vi.label};
            break;
          }
        }
      }
      if (const auto entry = gop.lookup(rec.recording_id, interval.start, interval.end)) {
        raw.obs.gop_vowel = entry->gop_vowel;
        raw.obs.gop_consonant = entry->gop_consonant;
      }
      out.push_back(std::move(raw));
    }
  }
  return out;
}

}  // namespace

ExtractSummary run_extract(const GlobalConfig& config,
                           const std::string& manifest_path,
                           const std::string& out_features_csv, int jobs) {
  const auto manifest = io::read_manifest(manifest_path);
  const auto validation = validate_manifest(manifest, true);
  if (!validation.ok())
    fail(Errc::validation, "manifest failed validation:\n" + validation.to_string());

  io::GopTable gop;
  if (!config.gop_csv.empty())
    gop = io::GopTable::parse(
        read_text_file(path_join(manifest.base_dir, config.gop_csv)));

  auto raws = collect_observations(config, manifest, gop);

  // Group observation indices by subject; articulation-space metrics are
  // subject-level.
  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < raws.size(); ++i)
    by_subject[raws[i].obs.subject_id].push_back(i);

  std::vector<FeatureRow> rows(raws.size());
  std::vector<std::string> subjects;
  for (const auto& [sid, _] : by_subject) subjects.push_back(sid);

  std::atomic<std::size_t> next{0};
  auto process_subject = [&](const std::string& sid) {
    const auto& idx = by_subject.at(sid);

    // Audio is cached per recording within the subject.
    std::map<std::string, io::AudioBuffer> audio_cache;
    auto audio_for = [&](const RecordingEntry& rec) -> const io::AudioBuffer& {
      auto it = audio_cache.find(rec.recording_id);
      if (it == audio_cache.end()) {
        it = audio_cache
                 .emplace(rec.recording_id,
                          io::read_wav(path_join(manifest.base_dir, rec.audio_path)))
                 .first;
      }
      return it->second;
    };

    // Pass 1: per-vowel mean formants over this subject's observations.
    papi::VowelFormantSet formant_set;
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> acc;
    for (std::size_t i : idx) {
      const auto& raw = raws[i];
      try {
        const auto segment = io::slice(audio_for(*raw.recording),
                                       raw.vowel_interval.start,
                                       raw.vowel_interval.end);
        const auto stats =
            dsp::formant_stats(dsp::lpc_formants(segment, config.dsp.formant));
        for (VowelClass v : raw.obs.vowel_classes) {
          acc[vowel_index(v)].first.push_back(stats.mean_f1);
          acc[vowel_index(v)].second.push_back(stats.mean_f2);
        }
      } catch (const VganError&) {
        // Unmeasurable observations simply do not contribute to the set.
      }
    }
    for (const auto& [vi, f12] : acc) {
      formant_set.means[kVowelOrder[vi]] = {mean(f12.first), mean(f12.second)};
    }
    for (VowelClass v : {VowelClass::A, VowelClass::I, VowelClass::U}) {
      if (!formant_set.has(v))
        fail(Errc::missing_vowel,
             "subject " + sid + ": no measurable observation of corner vowel /" +
                 std::string(vowel_name(v)) + "/");
    }

    // Pass 2: assemble feature rows.
    std::map<std::string, io::LandmarkSequence> lip_cache;
    for (std::size_t i : idx) {
      const auto& raw = raws[i];
      FeatureRow row;
      row.subject_id = raw.obs.subject_id;
      row.recording_id = raw.obs.recording_id;
      row.start = raw.obs.start;
      row.end = raw.obs.end;
      row.syllable = raw.obs.syllable_text;
      row.vowels = raw.obs.vowel_classes;
      row.papi = papi::assemble_papi(raw.obs, audio_for(*raw.recording),
                                     raw.vowel_interval, formant_set, config.papi);
      if (!raw.recording->landmark_path.empty()) {
        auto it = lip_cache.find(raw.recording->recording_id);
        if (it == lip_cache.end()) {
          const auto text = read_text_file(
              path_join(manifest.base_dir, raw.recording->landmark_path));
          it = lip_cache
                   .emplace(raw.recording->recording_id,
                            io::read_landmarks_csv(text, config.lip_index_map,
                                                   raw.recording->fps))
                   .first;
        }
        try {
          row.lip = lip::lip_feature_vector(it->second, raw.obs.start, raw.obs.end);
          row.lip_present = true;
        } catch (const VganError& e) {
          if (e.code() != Errc::insufficient_data) throw;
        }
      }
      rows[i] = std::move(row);
    }
  };

  if (jobs <= 1) {
    for (const auto& sid : subjects) process_subject(sid);
  } else {
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= subjects.size()) break;
          process_subject(subjects[i]);
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }

  FeatureTable table;
  table.rows = std::move(rows);
  write_text_file(out_features_csv, table.to_csv());

  ExtractSummary summary;
  summary.observations = table.rows.size();
  for (const auto& r : table.rows) {
    if (!r.papi.measured) ++summary.unmeasured;
    if (r.lip_present) ++summary.with_lip;
  }
  return summary;
}

GroupManifest run_augment(const GlobalConfig& config,
                          const std::string& manifest_path,
                          const std::string& features_csv,
                          const std::string& out_groups_json) {
  const auto manifest = io::read_manifest(manifest_path);
  const auto table = FeatureTable::from_csv(read_text_file(features_csv));

  std::map<std::string, std::vector<SyllableObservation>> by_subject;
  for (const auto& row : table.rows) {
    SyllableObservation obs;
    obs.subject_id = row.subject_id;
    obs.recording_id = row.recording_id;
    obs.start = row.start;
    obs.end = row.end;
    obs.syllable_text = row.syllable;
    obs.vowel_classes = row.vowels;
    by_subject[row.subject_id].push_back(std::move(obs));
  }

  GroupManifest gm;
  gm.mode = aug::group_mode_name(config.augment.mode);
  gm.seed = config.augment.seed;
  gm.balanced = config.augment_balance;

  std::vector<VowelGroup> all_groups;
  std::vector<double> totals;
  const Rng base = Rng::seeded(config.augment.seed);
  std::size_t subject_index = 0;
  for (const auto& [sid, observations] : by_subject) {
    const auto* subject = manifest.find_subject(sid);
    if (!subject)
      fail(Errc::validation, "features reference unknown subject " + sid);
    const auto total = subject->score(FdaKind::total);
    if (!total)
      fail(Errc::validation, "subject " + sid + " has no total FDA score");

    FdaTarget target{FdaKind::total, *total};
    auto options = config.augment;
    options.seed = base.child(subject_index++).seed();
    const auto cats = aug::categorize(observations);
    gm.skipped_vowelless += cats.skipped_vowelless;
    for (auto& g : aug::build_groups(cats, target, options)) {
      totals.push_back(*total);
      all_groups.push_back(std::move(g));
    }
  }

  if (config.augment_balance) {
    all_groups = aug::balance_by_severity(all_groups, totals,
                                          splitmix64(config.augment.seed ^ 0xba1),
                                          config.augment_balance_factor);
  }

  std::size_t counter = 0;
  for (const auto& g : all_groups) {
    GroupRef ref;
    char gid[16];
    std::snprintf(gid, sizeof(gid), "g%06zu", counter++);
    ref.group_id = gid;
    ref.subject_id = g.subject_id;
    for (int v = 0; v < kVowelCount; ++v) ref.member_keys[v] = g.members[v].key();
    gm.groups.push_back(std::move(ref));
  }

  write_text_file(out_groups_json, gm.to_json());
  return gm;
}

std::vector<train::LabeledGroup> load_labeled_groups(
    const GlobalConfig& config, const std::string& manifest_path,
    const std::string& groups_json, const std::string& features_csv,
    FdaKind target_kind) {
  (void)config;
  const auto manifest = io::read_manifest(manifest_path);
  const auto gm = GroupManifest::from_json(read_text_file(groups_json));
  const auto table = FeatureTable::from_csv(read_text_file(features_csv));

  std::map<std::string, const FeatureRow*> index;
  for (const auto& row : table.rows) index[row.key()] = &row;

  std::vector<train::LabeledGroup> out;
  out.reserve(gm.groups.size());
  for (const auto& ref : gm.groups) {
    const auto* subject = manifest.find_subject(ref.subject_id);
    if (!subject)
      fail(Errc::validation, "group " + ref.group_id + " references unknown subject " +
                                 ref.subject_id);
    const auto target = subject->score(target_kind);
    if (!target)
      fail(Errc::validation, "subject " + ref.subject_id + " has no " +
                                 fda_kind_name(target_kind) + " score");
    const auto total = subject->score(FdaKind::total);
    if (!total)
      fail(Errc::validation, "subject " + ref.subject_id + " has no total FDA score");

    train::LabeledGroup g;
    g.group_id = ref.group_id;
    g.subject_id = ref.subject_id;
    g.subject_total = *total;
    g.sample.target = *target;
    g.sample.papi = net::Tensor(kVowelCount, papi::kPapiDim);
    g.sample.lip = net::Tensor(kVowelCount, lip::kLipDim);
    g.sample.has_lip = true;
    for (int v = 0; v < kVowelCount; ++v) {
      const auto it = index.find(ref.member_keys[v]);
      if (it == index.end())
        fail(Errc::validation, "group " + ref.group_id + ": member " +
                                   ref.member_keys[v] + " not in the feature table");
      const FeatureRow& row = *it->second;
      for (int k = 0; k < papi::kPapiDim; ++k) g.sample.papi.at(v, k) = row.papi[k];
      if (row.lip_present) {
        for (int k = 0; k < lip::kLipDim; ++k) g.sample.lip.at(v, k) = row.lip[k];
      } else {
        g.sample.has_lip = false;
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

namespace {
std::string history_csv(const train::TrainHistory& history) {
  std::ostringstream out;
  out << "epoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
    out << e << "," << format_double(history.train_loss[e]) << ",";
    if (e < history.val_loss.size()) out << format_double(history.val_loss[e]);
    out << "\n";
  }
  return out.str();
}
}  // namespace

void run_train(const GlobalConfig& config, const std::string& manifest_path,
               const std::string& groups_json, const std::string& features_csv,
               const std::string& out_model, const std::string& out_history_csv) {
  const auto groups = load_labeled_groups(config, manifest_path, groups_json,
                                          features_csv, config.train.target_kind);
  train::TrainHistory history;
  const auto model = train::train(groups, config.vgan, config.train, &history);
  net::save_model(model, out_model);
  if (!out_history_csv.empty())
    write_text_file(out_history_csv, history_csv(history));
}

train::EvalReport run_cross_validate(const GlobalConfig& config,
                                     const std::string& manifest_path,
                                     const std::string& groups_json,
                                     const std::string& features_csv,
                                     const std::string& out_report_json,
                                     const std::string& out_folds_csv,
                                     const std::string& out_loss_csv, int jobs) {
  const auto groups = load_labeled_groups(config, manifest_path, groups_json,
                                          features_csv, config.train.target_kind);
  const auto report = train::cross_validate(groups, config.vgan, config.train, jobs);
  if (!out_report_json.empty())
    write_text_file(out_report_json, train::report_to_json(report));
  if (!out_folds_csv.empty())
    write_text_file(out_folds_csv, train::folds_to_csv(report));
  if (!out_loss_csv.empty())
    write_text_file(out_loss_csv, train::loss_curves_to_csv(report));
  return report;
}

train::EvalFragment run_eval(const GlobalConfig& config,
                             const std::string& model_path,
                             const std::string& manifest_path,
                             const std::string& groups_json,
                             const std::string& features_csv,
                             const std::string& out_report_json) {
  const auto model = net::load_model(model_path);
  if (model.config.in_dim != config.vgan.in_dim ||
      model.config.visual_in != config.vgan.visual_in)
    fail(Errc::validation,
         "model dims do not match the configured feature dimensions");
  const auto groups = load_labeled_groups(config, manifest_path, groups_json,
                                          features_csv, model.target_kind);
  const auto frag = train::evaluate(model, groups);

  json doc = {{"target_kind", fda_kind_name(model.target_kind)},
              {"audio_only", model.config.audio_only},
              {"rmse_group", frag.rmse_group},
              {"rmse_subject", frag.rmse_subject},
              {"n_groups", frag.n_groups},
              {"n_subjects", frag.n_subjects},
              {"normalized_rmse_subject",
               frag.rmse_subject / fda_scale_max(model.target_kind)}};
  if (frag.r2_subject)
    doc["r2_subject"] = *frag.r2_subject;
  else
    doc["r2_subject"] = nullptr;
  if (!out_report_json.empty()) write_text_file(out_report_json, doc.dump(2) + "\n");
  return frag;
}

void run_predict(const GlobalConfig& config, const std::string& model_path,
                 const std::string& manifest_path, const std::string& groups_json,
                 const std::string& features_csv, const std::string& out_csv) {
  const auto model = net::load_model(model_path);
  const auto groups = load_labeled_groups(config, manifest_path, groups_json,
                                          features_csv, model.target_kind);
  const auto preds = train::predict_groups(model, groups);
  std::ostringstream out;
  out << "group_id,subject_id,target,predicted\n";
  for (const auto& p : preds) {
    out << p.group_id << "," << p.subject_id << "," << format_double(p.target) << ","
        << format_double(p.predicted) << "\n";
  }
  write_text_file(out_csv, out.str());
}

void run_export_embeddings(const GlobalConfig& config, const std::string& model_path,
                           const std::string& manifest_path,
                           const std::string& groups_json,
                           const std::string& features_csv,
                           const std::string& out_csv) {
  const auto model = net::load_model(model_path);
  const auto groups = load_labeled_groups(config, manifest_path, groups_json,
                                          features_csv, model.target_kind);
  std::ostringstream out;
  out << "group_id,subject_id,target";
  for (int i = 0; i < model.config.penultimate_dim(); ++i) out << ",e" << i;
  out << "\n";
  for (const auto& g : groups) {
    const auto trace = net::forward(model, g.sample.papi,
                                    g.sample.has_lip ? &g.sample.lip : nullptr);
    out << g.group_id << "," << g.subject_id << "," << format_double(g.sample.target);
    for (double v : trace.fused_embedding) out << "," << format_double(v);
    out << "\n";
  }
  write_text_file(out_csv, out.str());
}

void run_segment_fit(const GlobalConfig& config, const std::string& manifest_path,
                     int components, const std::string& out_vowel_model,
                     const std::string& out_other_model) {
  const auto manifest = io::read_manifest(manifest_path);

  gmm::FeatureMatrix vowel_frames, other_frames;
  vowel_frames.cols = other_frames.cols = config.gmm_features.dim();

  for (const auto& rec : manifest.recordings) {
    const auto audio = io::read_wav(path_join(manifest.base_dir, rec.audio_path));
    const auto tiers =
        io::read_segments_file(path_join(manifest.base_dir, rec.segment_path));
    const io::SegmentTier* syllables = nullptr;
    for (const auto& tier : tiers)
      if (tier.name == config.syllable_tier) syllables = &tier;
    if (!syllables) continue;

    const auto feats = gmm::frame_features(audio, config.gmm_features);
    for (std::size_t r = 0; r < feats.rows; ++r) {
      const double center = r * config.gmm_features.hop_s +
                            config.gmm_features.window_s / 2.0;
      bool inside = false;
      for (const auto& iv : syllables->intervals) {
        const std::string label = trim(iv.label);
        if (std::find(config.skip_labels.begin(), config.skip_labels.end(), label) !=
            config.skip_labels.end())
          continue;
        if (center >= iv.start && center <= iv.end) {
          inside = true;
          break;
        }
      }
      auto& target = inside ? vowel_frames : other_frames;
      target.data.insert(target.data.end(), feats.row(r), feats.row(r) + feats.cols);
      ++target.rows;
    }
  }

  auto em = config.gmm_em;
  auto fit_vowel = gmm::gmm_fit(vowel_frames, components, em);
  em.seed = splitmix64(config.gmm_em.seed + 1);
  auto fit_other = gmm::gmm_fit(other_frames, components, em);
  fit_vowel.model.feature_config = config.gmm_features;
  fit_other.model.feature_config = config.gmm_features;
  write_text_file(out_vowel_model, gmm::serialize_gmm(fit_vowel.model));
  write_text_file(out_other_model, gmm::serialize_gmm(fit_other.model));
}

void run_segment(const GlobalConfig& config, const std::string& audio_path,
                 const std::string& vowel_model_path,
                 const std::string& other_model_path,
                 const std::string& out_textgrid) {
  const auto audio = io::read_wav(audio_path);
  const auto vowel_model = gmm::deserialize_gmm(read_text_file(vowel_model_path));
  const auto other_model = gmm::deserialize_gmm(read_text_file(other_model_path));
  const auto tier =
      gmm::detect_vowel_intervals(audio, vowel_model, other_model, config.gmm_detect);
  write_text_file(out_textgrid, io::serialize_textgrid({tier}));
}

}  // namespace vgan::pipe
