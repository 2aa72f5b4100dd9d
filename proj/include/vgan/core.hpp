#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace vgan {

// The six Mandarin cardinal vowels in their fixed node order (a, o, e, i, u, ü).
// V stands for ü; the same index order is used everywhere a node index appears.
enum class VowelClass { A = 0, O, E, I, U, V };

inline constexpr int kVowelCount = 6;
inline constexpr std::array<VowelClass, kVowelCount> kVowelOrder = {
    VowelClass::A, VowelClass::O, VowelClass::E,
    VowelClass::I, VowelClass::U, VowelClass::V};

int vowel_index(VowelClass v);
const char* vowel_name(VowelClass v);     // "a" "o" "e" "i" "u" "v"
char vowel_letter(VowelClass v);          // pinyin letter after normalization
std::optional<VowelClass> vowel_from_name(const std::string& name);

// Lowercases, maps U+00FC (and uppercase form) to 'v', and expands the
// implicit ü written as 'u' after j/q/x/y.
std::string normalize_pinyin(const std::string& syllable);

// All vowel classes whose letter occurs in the normalized syllable.
std::set<VowelClass> vowel_classes_of(const std::string& syllable);

// ---- FDA scoring ----------------------------------------------------------

enum class FdaKind {
  total = 0, lips, reflex, jaw, laryngeal, respiration, velum, tongue,
  intelligibility,
};

inline constexpr int kFdaKindCount = 9;

double fda_scale_max(FdaKind kind);
const char* fda_kind_name(FdaKind kind);
std::optional<FdaKind> fda_kind_from_name(const std::string& name);

struct FdaTarget {
  FdaKind kind = FdaKind::total;
  double value = 0.0;

  double scale_max() const { return fda_scale_max(kind); }
  // Throws Errc::validation when value is outside [0, scale_max].
  void validate() const;
};

enum class SeverityBand { Normal = 0, Mild, Moderate, Severe };

const char* severity_band_name(SeverityBand band);

// Band of a total FDA score. Total function on [37,116]; scores outside
// that interval are rejected, not clamped.
SeverityBand severity_band(double total);

// ---- observations and groups ----------------------------------------------

struct SyllableObservation {
  std::string subject_id;
  std::string recording_id;
  double start = 0.0;  // seconds
  double end = 0.0;    // seconds
  std::string syllable_text;
  std::set<VowelClass> vowel_classes;
  std::string audio_ref;
  std::string landmark_ref;  // empty when absent
  std::optional<double> gop_vowel;
  std::optional<double> gop_consonant;

  // "recording#start-end"; stable because floats are printed shortest
  // round-trip.
  std::string key() const;
};

// One sample of the augmented space: exactly one observation per vowel,
// all from the same subject.
struct VowelGroup {
  std::string subject_id;
  std::array<SyllableObservation, kVowelCount> members;
  FdaTarget target;

  static VowelGroup make(std::string subject_id,
                         std::array<SyllableObservation, kVowelCount> members,
                         FdaTarget target);
};

// ---- dataset manifest -------------------------------------------------------

struct SubjectEntry {
  std::string subject_id;
  // Scores indexed by FdaKind; total is mandatory, sub-items optional (<0 = absent).
  std::array<double, kFdaKindCount> fda_scores{};
  std::array<bool, kFdaKindCount> fda_present{};

  std::optional<double> score(FdaKind kind) const {
    const int i = static_cast<int>(kind);
    if (!fda_present[i]) return std::nullopt;
    return fda_scores[i];
  }
};

struct RecordingEntry {
  std::string recording_id;
  std::string subject_id;
  std::string audio_path;
  std::string segment_path;
  std::string landmark_path;  // empty when absent
  double fps = 0.0;           // frames/second of the landmark stream
};

struct DatasetManifest {
  std::vector<SubjectEntry> subjects;
  std::vector<RecordingEntry> recordings;
  // Directory the manifest was loaded from; relative media paths resolve
  // against it.
  std::string base_dir;

  const SubjectEntry* find_subject(const std::string& id) const;
};

struct ValidationIssue {
  std::string where;    // "subjects[3].fda.lips", "recordings[0].subject_id"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::size_t skipped_vowelless = 0;

  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

// Consistency check: score scales, dangling subject references, and (when
// check_files) existence of referenced media files.
ValidationReport validate_manifest(const DatasetManifest& manifest,
                                   bool check_files = true);

}  // namespace vgan
