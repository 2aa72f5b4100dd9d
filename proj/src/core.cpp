#include "vgan/core.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "vgan/errors.hpp"
#include "vgan/util.hpp"

namespace vgan {

int vowel_index(VowelClass v) { return static_cast<int>(v); }

const char* vowel_name(VowelClass v) {
  static constexpr const char* names[] = {"a", "o", "e", "i", "u", "v"};
  return names[vowel_index(v)];
}

char vowel_letter(VowelClass v) { return vowel_name(v)[0]; }

std::optional<VowelClass> vowel_from_name(const std::string& name) {
  for (VowelClass v : kVowelOrder) {
    if (name == vowel_name(v)) return v;
  }
  if (name == "ü" || name == "u:") return VowelClass::V;
  return std::nullopt;
}

std::string normalize_pinyin(const std::string& syllable) {
  std::string s;
  s.reserve(syllable.size());
  for (std::size_t i = 0; i < syllable.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(syllable[i]);
    // UTF-8 ü (0xC3 0xBC) and Ü (0xC3 0x9C) map to 'v'.
    if (c == 0xC3 && i + 1 < syllable.size()) {
      const unsigned char d = static_cast<unsigned char>(syllable[i + 1]);
      if (d == 0xBC || d == 0x9C) {
        s.push_back('v');
        ++i;
        continue;
      }
    }
    s.push_back(static_cast<char>(std::tolower(c)));
  }
  // Implicit ü: after j/q/x/y, written 'u' actually denotes ü.
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] == 'u') {
      const char p = s[i - 1];
      if (p == 'j' || p == 'q' || p == 'x' || p == 'y') s[i] = 'v';
    }
  }
  return s;
}

std::set<VowelClass> vowel_classes_of(const std::string& syllable) {
  const std::string s = normalize_pinyin(syllable);
  std::set<VowelClass> out;
  for (VowelClass v : kVowelOrder) {
    if (s.find(vowel_letter(v)) != std::string::npos) out.insert(v);
  }
  return out;
}

double fda_scale_max(FdaKind kind) {
  switch (kind) {
    case FdaKind::total: return 116.0;
    case FdaKind::lips: return 20.0;
    case FdaKind::reflex: return 12.0;
    case FdaKind::jaw: return 8.0;
    case FdaKind::laryngeal: return 16.0;
    case FdaKind::respiration: return 8.0;
    case FdaKind::velum: return 12.0;
    case FdaKind::tongue: return 24.0;
    case FdaKind::intelligibility: return 16.0;
  }
  fail(Errc::usage, "unknown FDA kind");
}

const char* fda_kind_name(FdaKind kind) {
  static constexpr const char* names[] = {
      "total", "lips", "reflex", "jaw", "laryngeal",
      "respiration", "velum", "tongue", "intelligibility"};
  return names[static_cast<int>(kind)];
}

std::optional<FdaKind> fda_kind_from_name(const std::string& name) {
  for (int i = 0; i < kFdaKindCount; ++i) {
    const FdaKind k = static_cast<FdaKind>(i);
    if (name == fda_kind_name(k)) return k;
  }
  return std::nullopt;
}

void FdaTarget::validate() const {
  if (!(value >= 0.0) || !(value <= scale_max())) {
    fail(Errc::validation,
         std::string(fda_kind_name(kind)) + " score " + format_double(value) +
             " outside [0," + format_double(scale_max()) + "]");
  }
}

const char* severity_band_name(SeverityBand band) {
  static constexpr const char* names[] = {"Normal", "Mild", "Moderate", "Severe"};
  return names[static_cast<int>(band)];
}

SeverityBand severity_band(double total) {
  if (!(total >= 37.0) || !(total <= 116.0)) {
    fail(Errc::validation, "total FDA score " + format_double(total) +
                               " outside the assessed range [37,116]");
  }
  if (total >= 116.0) return SeverityBand::Normal;
  if (total >= 87.0) return SeverityBand::Mild;
  if (total >= 58.0) return SeverityBand::Moderate;
  return SeverityBand::Severe;
}

std::string SyllableObservation::key() const {
  return recording_id + "#" + format_double(start) + "-" + format_double(end);
}

VowelGroup VowelGroup::make(std::string subject_id,
                            std::array<SyllableObservation, kVowelCount> members,
                            FdaTarget target) {
  for (int i = 0; i < kVowelCount; ++i) {
    const auto& obs = members[i];
    if (obs.subject_id != subject_id) {
      fail(Errc::validation, "group member for vowel " +
                                 std::string(vowel_name(kVowelOrder[i])) +
                                 " belongs to subject " + obs.subject_id +
                                 ", expected " + subject_id);
    }
    if (!obs.vowel_classes.count(kVowelOrder[i])) {
      fail(Errc::validation,
           "observation " + obs.key() + " does not carry vowel " +
               vowel_name(kVowelOrder[i]));
    }
  }
  target.validate();
  VowelGroup g;
  g.subject_id = std::move(subject_id);
  g.members = std::move(members);
  g.target = target;
  return g;
}

const SubjectEntry* DatasetManifest::find_subject(const std::string& id) const {
  for (const auto& s : subjects) {
    if (s.subject_id == id) return &s;
  }
  return nullptr;
}

std::string ValidationReport::to_string() const {
  std::ostringstream ss;
  for (const auto& issue : issues) ss << issue.where << ": " << issue.message << "\n";
  return ss.str();
}

ValidationReport validate_manifest(const DatasetManifest& manifest, bool check_files) {
  ValidationReport report;
  auto add = [&](std::string where, std::string msg) {
    report.issues.push_back({std::move(where), std::move(msg)});
  };

  for (std::size_t i = 0; i < manifest.subjects.size(); ++i) {
    const auto& s = manifest.subjects[i];
    const std::string where = "subjects[" + std::to_string(i) + "]";
    if (s.subject_id.empty()) add(where + ".subject_id", "empty id");
    for (std::size_t j = i + 1; j < manifest.subjects.size(); ++j) {
      if (manifest.subjects[j].subject_id == s.subject_id)
        add(where + ".subject_id", "duplicate subject id " + s.subject_id);
    }
    for (int k = 0; k < kFdaKindCount; ++k) {
      if (!s.fda_present[k]) continue;
      const FdaKind kind = static_cast<FdaKind>(k);
      const double v = s.fda_scores[k];
      if (!(v >= 0.0) || !(v <= fda_scale_max(kind))) {
        add(where + ".fda." + fda_kind_name(kind),
            "score " + format_double(v) + " outside [0," +
                format_double(fda_scale_max(kind)) + "]");
      }
    }
  }

  for (std::size_t i = 0; i < manifest.recordings.size(); ++i) {
    const auto& r = manifest.recordings[i];
    const std::string where = "recordings[" + std::to_string(i) + "]";
    if (r.recording_id.empty()) add(where + ".recording_id", "empty id");
    if (!manifest.find_subject(r.subject_id))
      add(where + ".subject_id", "references unknown subject " + r.subject_id);
    if (r.audio_path.empty()) add(where + ".audio_path", "missing");
    if (r.segment_path.empty()) add(where + ".segment_path", "missing");
    if (!r.landmark_path.empty() && r.fps <= 0.0)
      add(where + ".fps", "landmarks present but fps not positive");
    if (check_files) {
      for (const auto& [field, rel] :
           {std::pair{"audio_path", r.audio_path},
            std::pair{"segment_path", r.segment_path},
            std::pair{"landmark_path", r.landmark_path}}) {
        if (rel.empty()) continue;
        const std::string p = path_join(manifest.base_dir, rel);
        if (!std::filesystem::exists(p))
          add(where + "." + field, "file not found: " + p);
      }
    }
  }
  return report;
}

}  // namespace vgan
