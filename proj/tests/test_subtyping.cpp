#include <gtest/gtest.h>

#include <random>
#include <set>

#include "families.hpp"
#include "mpst/subtyping.hpp"
#include "random_terms.hpp"
#include "support.hpp"

using namespace mpst;

TEST(Subsort, Table) {
  EXPECT_TRUE(subsort(Sort::Nat, Sort::Int));
  EXPECT_TRUE(subsort(Sort::Bool, Sort::Bool));
  EXPECT_FALSE(subsort(Sort::Int, Sort::Nat));
  EXPECT_FALSE(subsort(Sort::Bool, Sort::Int));
  EXPECT_EQ(sort_lub(Sort::Nat, Sort::Int), Sort::Int);
  EXPECT_EQ(sort_lub(Sort::Nat, Sort::Bool), std::nullopt);
}

TEST(Subtype, Examples) {
  World w;
  auto e = w.t("end");
  EXPECT_TRUE(subtype(w.store, e, e));
  EXPECT_TRUE(subtype(w.store, w.t("q (+) { l0(int). end }"),
                      w.t("q (+) { l0(int). end, l1(int). end }")));
  auto wide = w.t("q & { l0(int). end }");
  auto narrow = w.t("q & { l0(nat). end }");
  EXPECT_TRUE(subtype(w.store, wide, narrow));
  auto r = check_subtype(w.store, narrow, wide);
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->first, narrow);
  // The swap also fails under the bounded inductive oracle.
  EXPECT_FALSE(subtype_bounded(w.store, narrow, wide, 2));
}

TEST(Subtype, HeadsAndPeers) {
  World w;
  EXPECT_FALSE(subtype(w.store, w.t("q (+) { l0(int). end }"), w.t("q & { l0(int). end }")));
  EXPECT_FALSE(subtype(w.store, w.t("q (+) { l0(int). end }"), w.t("r (+) { l0(int). end }")));
  EXPECT_FALSE(subtype(w.store, w.t("end"), w.t("q (+) { l0(int). end }")));
  // Receive offering more labels is smaller.
  EXPECT_TRUE(subtype(w.store, w.t("q & { l0(int). end, l1(int). end }"), w.t("q & { l0(int). end }")));
  EXPECT_FALSE(subtype(w.store, w.t("q & { l0(int). end }"), w.t("q & { l0(int). end, l1(int). end }")));
  // Infinite types relate coinductively.
  EXPECT_TRUE(subtype(w.store, w.t("rec X . q (+) { l0(nat). X }"),
                      w.t("rec X . q (+) { l0(int). X, l1(int). end }")));
  EXPECT_FALSE(subtype(w.store, w.t("rec X . q (+) { l0(int). X }"),
                       w.t("rec X . q (+) { l0(int). q (+) { l0(nat). X } }")));
}

TEST(SubtypeProperty, Reflexive) {
  std::mt19937 rng(5);
  World w;
  for (int i = 0; i < 500; ++i) {
    auto h = w.store.intern_local(testgen::random_type(rng, false, 4, 0, 0));
    ASSERT_TRUE(check_subtype(w.store, h, h).holds) << w.show(h);
  }
}

TEST(SubtypeProperty, TransitiveOnFamilyTriples) {
  World w;
  std::vector<TreeHandle> fam;
  for (const auto& s : testgen::local_type_family()) fam.push_back(w.t(s));
  // Triples are drawn so that the premises actually hold often enough to matter.
  std::mt19937 rng(13);
  int nontrivial = 0, drawn = 0;
  while (drawn < 200) {
    auto a = fam[rng() % fam.size()];
    std::vector<TreeHandle> above_a, above_b;
    for (auto x : fam)
      if (subtype(w.store, a, x)) above_a.push_back(x);
    auto b = above_a[rng() % above_a.size()];
    for (auto x : fam)
      if (subtype(w.store, b, x)) above_b.push_back(x);
    auto c = above_b[rng() % above_b.size()];
    ++drawn;
    nontrivial += (a != b && b != c);
    ASSERT_TRUE(subtype(w.store, a, c)) << w.show(a) << " / " << w.show(b) << " / " << w.show(c);
  }
  EXPECT_GT(nontrivial, 20);
}

TEST(SubtypeProperty, LabelSetVariance) {
  World w;
  std::vector<TreeHandle> fam;
  for (const auto& s : testgen::local_type_family()) fam.push_back(w.t(s));
  auto labels = [&](TreeHandle h) {
    std::set<Label> out;
    for (const auto& b : w.store.node(h).branches) out.insert(b.label);
    return out;
  };
  for (auto a : fam) {
    for (auto b : fam) {
      if (!subtype(w.store, a, b)) continue;
      const auto& na = w.store.node(a);
      const auto& nb = w.store.node(b);
      ASSERT_EQ(na.head, nb.head);
      auto la = labels(a), lb = labels(b);
      if (na.head == Head::Send)
        EXPECT_TRUE(std::includes(lb.begin(), lb.end(), la.begin(), la.end()));
      if (na.head == Head::Recv)
        EXPECT_TRUE(std::includes(la.begin(), la.end(), lb.begin(), lb.end()));
    }
  }
}

TEST(SubtypeProperty, AgreesWithBoundedOracleOnRandomPairs) {
  std::mt19937 rng(31);
  World w;
  for (int i = 0; i < 3000; ++i) {
    auto a = w.store.intern_local(testgen::random_type(rng, false, 3, 0, 0));
    auto b = w.store.intern_local(testgen::random_type(rng, false, 3, 0, 0));
    if (i % 3 == 0) b = a;
    auto k = w.store.reachable(a).size() * w.store.reachable(b).size() + 1;
    ASSERT_EQ(subtype(w.store, a, b), subtype_bounded(w.store, a, b, k))
        << w.show(a) << " <= " << w.show(b);
  }
}
