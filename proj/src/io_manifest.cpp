#include <json.hpp>

#include "vgan/errors.hpp"
#include "vgan/io.hpp"
#include "vgan/util.hpp"

namespace vgan::io {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const auto& k : allowed) {
      if (it.key() == k) { known = true; break; }
    }
    if (!known) fail(Errc::parse, where + ": unknown key \"" + it.key() + "\"");
  }
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    fail(Errc::parse, where + ": missing numeric field \"" + key + "\"");
  return obj[key].get<double>();
}

std::string require_string(const json& obj, const std::string& key,
                           const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string())
    fail(Errc::parse, where + ": missing string field \"" + key + "\"");
  return obj[key].get<std::string>();
}

}  // namespace

DatasetManifest read_manifest(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    fail(Errc::parse, "manifest " + path + ": " + e.what());
  }
  if (!doc.is_object()) fail(Errc::parse, "manifest " + path + ": not a JSON object");
  reject_unknown_keys(doc, {"subjects", "recordings"}, "manifest");

  DatasetManifest m;
  m.base_dir = path_dir(path);

  if (!doc.contains("subjects") || !doc["subjects"].is_array())
    fail(Errc::parse, "manifest: missing `subjects` array");
  std::size_t si = 0;
  for (const auto& s : doc["subjects"]) {
    const std::string where = "subjects[" + std::to_string(si++) + "]";
    if (!s.is_object()) fail(Errc::parse, where + ": not an object");
    reject_unknown_keys(s, {"subject_id", "fda"}, where);
    SubjectEntry entry;
    entry.subject_id = require_string(s, "subject_id", where);
    if (!s.contains("fda") || !s["fda"].is_object())
      fail(Errc::parse, where + ": missing `fda` object");
    for (auto it = s["fda"].begin(); it != s["fda"].end(); ++it) {
      const auto kind = fda_kind_from_name(it.key());
      if (!kind) fail(Errc::parse, where + ".fda: unknown score kind \"" + it.key() + "\"");
      if (!it.value().is_number())
        fail(Errc::parse, where + ".fda." + it.key() + ": not a number");
      entry.fda_scores[static_cast<int>(*kind)] = it.value().get<double>();
      entry.fda_present[static_cast<int>(*kind)] = true;
    }
    if (!entry.fda_present[static_cast<int>(FdaKind::total)])
      fail(Errc::parse, where + ".fda: `total` score is required");
    m.subjects.push_back(std::move(entry));
  }

  if (!doc.contains("recordings") || !doc["recordings"].is_array())
    fail(Errc::parse, "manifest: missing `recordings` array");
  std::size_t ri = 0;
  for (const auto& r : doc["recordings"]) {
    const std::string where = "recordings[" + std::to_string(ri++) + "]";
    if (!r.is_object()) fail(Errc::parse, where + ": not an object");
    reject_unknown_keys(r, {"recording_id", "subject_id", "audio_path",
                            "segment_path", "landmark_path", "fps"}, where);
    RecordingEntry entry;
    entry.recording_id = require_string(r, "recording_id", where);
    entry.subject_id = require_string(r, "subject_id", where);
    entry.audio_path = require_string(r, "audio_path", where);
    entry.segment_path = require_string(r, "segment_path", where);
    if (r.contains("landmark_path"))
      entry.landmark_path = require_string(r, "landmark_path", where);
    if (r.contains("fps")) entry.fps = require_number(r, "fps", where);
    m.recordings.push_back(std::move(entry));
  }
  return m;
}

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
  json doc;
  doc["subjects"] = json::array();
  for (const auto& s : manifest.subjects) {
    json fda = json::object();
    for (int k = 0; k < kFdaKindCount; ++k) {
      if (s.fda_present[k])
        fda[fda_kind_name(static_cast<FdaKind>(k))] = s.fda_scores[k];
    }
    doc["subjects"].push_back({{"subject_id", s.subject_id}, {"fda", fda}});
  }
  doc["recordings"] = json::array();
  for (const auto& r : manifest.recordings) {
    json rec = {{"recording_id", r.recording_id},
                {"subject_id", r.subject_id},
                {"audio_path", r.audio_path},
                {"segment_path", r.segment_path}};
    if (!r.landmark_path.empty()) rec["landmark_path"] = r.landmark_path;
    if (r.fps > 0.0) rec["fps"] = r.fps;
    doc["recordings"].push_back(rec);
  }
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace vgan::io
