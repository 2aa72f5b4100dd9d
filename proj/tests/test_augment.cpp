#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "vgan/augment.hpp"
#include "vgan/errors.hpp"
#include "vgan/util.hpp"

using namespace vgan;
using namespace vgan::aug;

namespace {

SyllableObservation obs(const std::string& subject, const std::string& syllable,
                        double start) {
  SyllableObservation o;
  o.subject_id = subject;
  o.recording_id = subject + "_r";
  o.start = start;
  o.end = start + 0.4;
  o.syllable_text = syllable;
  return o;
}

// Pools of sizes (3,5,4,6,3,2) for a,o,e,i,u,v.
std::vector<SyllableObservation> pool_observations(const std::string& subject) {
  std::vector<SyllableObservation> out;
  double t = 0.0;
  auto add = [&](const std::string& syllable, int count) {
    for (int i = 0; i < count; ++i) {
      out.push_back(obs(subject, syllable, t));
      t += 0.5;
    }
  };
  add("ba", 3);
  add("bo", 5);
  add("ge", 4);
  add("mi", 6);
  add("mu", 3);
  add("nv", 2);
  return out;
}

}  // namespace

TEST_CASE("categorize") {
  SUBCASE("single-vowel syllables land in one category") {
    const auto cats = categorize({obs("s1", "ma", 0.0)});
    CHECK(cats.pool(VowelClass::A).size() == 1);
    CHECK(cats.pool(VowelClass::O).empty());
  }
  SUBCASE("multi-vowel syllables land in every matching category") {
    const auto cats = categorize({obs("s1", "miao", 0.0)});
    CHECK(cats.pool(VowelClass::I).size() == 1);
    CHECK(cats.pool(VowelClass::A).size() == 1);
    CHECK(cats.pool(VowelClass::O).size() == 1);
    CHECK(cats.pool(VowelClass::E).empty());
  }
  SUBCASE("ju goes to the u-umlaut category, not u") {
    const auto cats = categorize({obs("s1", "ju", 0.0)});
    CHECK(cats.pool(VowelClass::V).size() == 1);
    CHECK(cats.pool(VowelClass::U).empty());
  }
  SUBCASE("vowel-less syllables are counted and skipped") {
    const auto cats = categorize({obs("s1", "hm", 0.0), obs("s1", "ma", 1.0)});
    CHECK(cats.skipped_vowelless == 1);
    CHECK(cats.pool(VowelClass::A).size() == 1);
  }
  SUBCASE("order independence: permuted input yields identical category multisets") {
    auto observations = pool_observations("s1");
    const auto base = categorize(observations);
    Rng rng = Rng::seeded(8);
    rng.shuffle(observations);
    const auto shuffled = categorize(observations);
    for (VowelClass v : kVowelOrder) {
      auto keys_of = [&](const VowelCategories& c) {
        std::multiset<std::string> keys;
        for (const auto& o : c.pool(v)) keys.insert(o.key());
        return keys;
      };
      CHECK(keys_of(base) == keys_of(shuffled));
    }
  }
  SUBCASE("mixed subjects are rejected") {
    CHECK_THROWS_AS(categorize({obs("s1", "ma", 0.0), obs("s2", "mo", 1.0)}),
                    VganError);
  }
}

TEST_CASE("build_groups") {
  const FdaTarget target{FdaKind::total, 90.0};
  const auto cats = categorize(pool_observations("s1"));

  SUBCASE("zip truncates to the shortest category") {
    GroupingOptions opt;
    opt.mode = GroupMode::zip;
    opt.seed = 4;
    const auto groups = build_groups(cats, target, opt);
    CHECK(groups.size() == 2);  // min(3,5,4,6,3,2)
  }
  SUBCASE("zip uses no observation twice per category position") {
    GroupingOptions opt;
    opt.mode = GroupMode::zip;
    opt.seed = 4;
    const auto groups = build_groups(cats, target, opt);
    for (int v = 0; v < kVowelCount; ++v) {
      std::set<std::string> seen;
      for (const auto& g : groups) CHECK(seen.insert(g.members[v].key()).second);
    }
  }
  SUBCASE("random mode yields exactly n groups, reproducibly") {
    GroupingOptions opt;
    opt.mode = GroupMode::random;
    opt.n = 100;
    opt.seed = 12345;
    const auto a = build_groups(cats, target, opt);
    const auto b = build_groups(cats, target, opt);
    REQUIRE(a.size() == 100);
    REQUIRE(b.size() == 100);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (int v = 0; v < kVowelCount; ++v)
        CHECK(a[i].members[v].key() == b[i].members[v].key());
    }
  }
  SUBCASE("every group has one member per vowel from the same subject") {
    GroupingOptions opt;
    opt.mode = GroupMode::random;
    opt.n = 50;
    opt.seed = 3;
    for (const auto& g : build_groups(cats, target, opt)) {
      CHECK(g.subject_id == "s1");
      for (int v = 0; v < kVowelCount; ++v) {
        CHECK(g.members[v].subject_id == "s1");
        CHECK(g.members[v].vowel_classes.count(kVowelOrder[v]) == 1);
      }
    }
  }
  SUBCASE("empty categories are named in the error") {
    const auto partial = categorize({obs("s1", "ma", 0.0), obs("s1", "mi", 1.0)});
    GroupingOptions opt;
    try {
      build_groups(partial, target, opt);
      FAIL("expected empty-category error");
    } catch (const VganError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("o") != std::string::npos);
      CHECK(msg.find("e") != std::string::npos);
      CHECK(msg.find("u") != std::string::npos);
      CHECK(msg.find("v") != std::string::npos);
    }
  }
}

namespace {

std::vector<VowelGroup> groups_for(const std::string& subject, double total, int n,
                                   std::uint64_t seed) {
  const auto cats = categorize(pool_observations(subject));
  GroupingOptions opt;
  opt.mode = GroupMode::random;
  opt.n = static_cast<std::size_t>(n);
  opt.seed = seed;
  return build_groups(cats, {FdaKind::total, total}, opt);
}

}  // namespace

TEST_CASE("balance_by_severity") {
  // Four subjects, one per band: counts (100, 80, 60, 40).
  std::vector<VowelGroup> all;
  std::vector<double> totals;
  const double scores[4] = {116.0, 100.0, 70.0, 45.0};
  const int counts[4] = {100, 80, 60, 40};
  for (int b = 0; b < 4; ++b) {
    const auto gs = groups_for("s" + std::to_string(b), scores[b], counts[b], b + 1);
    for (const auto& g : gs) {
      all.push_back(g);
      totals.push_back(scores[b]);
    }
  }

  SUBCASE("counts equalize to the minimum band") {
    const auto balanced = balance_by_severity(all, totals, 9, 1.0);
    CHECK(balanced.size() == 4 * 40);
    std::map<std::string, int> per_subject;
    for (const auto& g : balanced) per_subject[g.subject_id]++;
    for (const auto& [sid, count] : per_subject) CHECK(count == 40);
  }
  SUBCASE("already balanced input is identity up to order") {
    std::vector<VowelGroup> equal;
    std::vector<double> equal_totals;
    for (int b = 0; b < 4; ++b) {
      const auto gs = groups_for("t" + std::to_string(b), scores[b], 25, b + 11);
      for (const auto& g : gs) {
        equal.push_back(g);
        equal_totals.push_back(scores[b]);
      }
    }
    const auto balanced = balance_by_severity(equal, equal_totals, 21, 1.0);
    REQUIRE(balanced.size() == equal.size());
    auto key_multiset = [](const std::vector<VowelGroup>& gs) {
      std::multiset<std::string> keys;
      for (const auto& g : gs) {
        std::string k = g.subject_id;
        for (const auto& m : g.members) k += "|" + m.key();
        keys.insert(k);
      }
      return keys;
    };
    CHECK(key_multiset(balanced) == key_multiset(equal));
  }
  SUBCASE("fixed seed reproduces the selection") {
    const auto a = balance_by_severity(all, totals, 77, 1.0);
    const auto b = balance_by_severity(all, totals, 77, 1.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(a[i].members[0].key() == b[i].members[0].key());
  }
  SUBCASE("an empty band is an error naming the band") {
    std::vector<VowelGroup> three;
    std::vector<double> three_totals;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (totals[i] < 50.0) continue;  // drop Severe
      three.push_back(all[i]);
      three_totals.push_back(totals[i]);
    }
    try {
      balance_by_severity(three, three_totals, 5, 1.0);
      FAIL("expected error");
    } catch (const VganError& e) {
      CHECK(std::string(e.what()).find("Severe") != std::string::npos);
    }
  }
  SUBCASE("oversampling with a factor above one draws with replacement") {
    const auto balanced = balance_by_severity(all, totals, 13, 1.5);
    CHECK(balanced.size() == 4 * 60);
  }
}

TEST_CASE("grouping error paths") {
  CHECK_THROWS_AS(group_mode_from_name("banana"), VganError);
  const auto cats = categorize(pool_observations("s1"));
  GroupingOptions opt;
  opt.mode = GroupMode::random;
  opt.n = 0;
  CHECK_THROWS_AS(build_groups(cats, {FdaKind::total, 90.0}, opt), VganError);
  CHECK_THROWS_AS(balance_by_severity({}, {}, 1, 0.0), VganError);
}
