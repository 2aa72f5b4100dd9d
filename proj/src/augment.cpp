#include "vgan/augment.hpp"

#include <algorithm>
#include <cmath>

#include "vgan/errors.hpp"
#include "vgan/util.hpp"

namespace vgan::aug {

VowelCategories categorize(const std::vector<SyllableObservation>& observations) {
  VowelCategories cats;
  for (const auto& obs : observations) {
    if (!cats.subject_id.empty() && obs.subject_id != cats.subject_id)
      fail(Errc::validation, "categorize: mixed subjects " + cats.subject_id +
                                 " and " + obs.subject_id);
    if (cats.subject_id.empty()) cats.subject_id = obs.subject_id;

    const auto classes = obs.vowel_classes.empty()
                             ? vowel_classes_of(obs.syllable_text)
                             : obs.vowel_classes;
    if (classes.empty()) {
      ++cats.skipped_vowelless;
      continue;
    }
    SyllableObservation tagged = obs;
    tagged.vowel_classes = classes;
    for (VowelClass v : classes) cats.pools[vowel_index(v)].push_back(tagged);
  }
  return cats;
}

GroupMode group_mode_from_name(const std::string& name) {
  if (name == "zip") return GroupMode::zip;
  if (name == "random") return GroupMode::random;
  fail(Errc::usage, "unknown group mode \"" + name + "\" (expected zip|random)");
}

const char* group_mode_name(GroupMode mode) {
  return mode == GroupMode::zip ? "zip" : "random";
}

std::vector<VowelGroup> build_groups(const VowelCategories& categories,
                                     const FdaTarget& target,
                                     const GroupingOptions& options) {
  std::string missing;
  for (VowelClass v : kVowelOrder) {
    if (categories.pool(v).empty()) {
      if (!missing.empty()) missing += ",";
      missing += vowel_name(v);
    }
  }
  if (!missing.empty())
    fail(Errc::validation, "subject " + categories.subject_id +
                               ": empty vowel categories {" + missing + "}");

  Rng rng = Rng::seeded(options.seed);
  std::vector<VowelGroup> groups;

  if (options.mode == GroupMode::zip) {
    std::array<std::vector<std::size_t>, kVowelCount> order;
    std::size_t shortest = SIZE_MAX;
    for (int v = 0; v < kVowelCount; ++v) {
      order[v].resize(categories.pools[v].size());
      for (std::size_t i = 0; i < order[v].size(); ++i) order[v][i] = i;
      if (options.shuffle_before_zip) rng.shuffle(order[v]);
      shortest = std::min(shortest, order[v].size());
    }
    for (std::size_t g = 0; g < shortest; ++g) {
      std::array<SyllableObservation, kVowelCount> members;
      for (int v = 0; v < kVowelCount; ++v)
        members[v] = categories.pools[v][order[v][g]];
      groups.push_back(
          VowelGroup::make(categories.subject_id, std::move(members), target));
    }
  } else {
    if (options.n == 0)
      fail(Errc::usage, "build_groups: mode=random requires n > 0");
    for (std::size_t g = 0; g < options.n; ++g) {
      std::array<SyllableObservation, kVowelCount> members;
      for (int v = 0; v < kVowelCount; ++v) {
        const auto& pool = categories.pools[v];
        members[v] = pool[rng.index(pool.size())];
      }
      groups.push_back(
          VowelGroup::make(categories.subject_id, std::move(members), target));
    }
  }
  return groups;
}

std::vector<VowelGroup> balance_by_severity(
    const std::vector<VowelGroup>& groups, const std::vector<double>& subject_totals,
    std::uint64_t seed, double factor) {
  if (groups.size() != subject_totals.size())
    fail(Errc::usage, "balance_by_severity: totals not aligned with groups");
  if (factor <= 0.0) fail(Errc::usage, "balance_by_severity: factor must be positive");

  std::array<std::vector<std::size_t>, 4> by_band;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    by_band[static_cast<int>(severity_band(subject_totals[i]))].push_back(i);
  }
  std::size_t min_count = SIZE_MAX;
  for (int b = 0; b < 4; ++b) {
    if (by_band[b].empty())
      fail(Errc::validation,
           std::string("balance_by_severity: no groups in band ") +
               severity_band_name(static_cast<SeverityBand>(b)));
    min_count = std::min(min_count, by_band[b].size());
  }
  const auto quota =
      static_cast<std::size_t>(std::llround(static_cast<double>(min_count) * factor));

  Rng rng = Rng::seeded(seed);
  std::vector<VowelGroup> out;
  for (int b = 0; b < 4; ++b) {
    auto& idx = by_band[b];
    if (idx.size() >= quota) {
      rng.shuffle(idx);
      idx.resize(quota);
      std::sort(idx.begin(), idx.end());  // keep input order within band
      for (std::size_t i : idx) out.push_back(groups[i]);
    } else {
      for (std::size_t i : idx) out.push_back(groups[i]);
      for (std::size_t k = idx.size(); k < quota; ++k)
        out.push_back(groups[idx[rng.index(idx.size())]]);
    }
  }
  return out;
}

}  // namespace vgan::aug
