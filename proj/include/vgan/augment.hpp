#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vgan/core.hpp"

namespace vgan::aug {

// Per-vowel observation pools of one subject.
struct VowelCategories {
  std::string subject_id;
  std::array<std::vector<SyllableObservation>, kVowelCount> pools;
  std::size_t skipped_vowelless = 0;

  const std::vector<SyllableObservation>& pool(VowelClass v) const {
    return pools[vowel_index(v)];
  }
};

// Inserts each observation into every category whose vowel letter its
// normalized syllable contains. Vowel-less syllables are counted and skipped.
VowelCategories categorize(const std::vector<SyllableObservation>& observations);

enum class GroupMode { zip, random };

GroupMode group_mode_from_name(const std::string& name);
const char* group_mode_name(GroupMode mode);

struct GroupingOptions {
  GroupMode mode = GroupMode::zip;
  std::size_t n = 0;           // required for mode=random
  std::uint64_t seed = 0;
  bool shuffle_before_zip = true;
};

// mode=zip: min_v|C_v| groups, positional after a seeded per-category
// shuffle. mode=random: exactly n groups drawn uniformly with replacement
// per category. Throws when a category is empty, naming the missing vowels.
std::vector<VowelGroup> build_groups(const VowelCategories& categories,
                                     const FdaTarget& target,
                                     const GroupingOptions& options);

// Per severity band of the subject total score, resample groups (down
// without replacement, up with replacement) to min-band count * factor.
std::vector<VowelGroup> balance_by_severity(
    const std::vector<VowelGroup>& groups,
    const std::vector<double>& subject_totals,  // aligned with groups
    std::uint64_t seed, double factor = 1.0);

}  // namespace vgan::aug
