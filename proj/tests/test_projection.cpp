#include <gtest/gtest.h>

#include <deque>
#include <random>
#include <set>

#include "mpst/projection.hpp"
#include "random_terms.hpp"
#include "support.hpp"

using namespace mpst;

namespace {

// Checks the projection rules directly: the pairs (global node, local node)
// demanded from (g, t) must all be locally consistent.
bool is_projection(const TypeStore& s, TreeHandle g, Participant r, TreeHandle t) {
  std::set<std::pair<TreeHandle, TreeHandle>> seen{{g, t}};
  std::deque<std::pair<TreeHandle, TreeHandle>> todo{{g, t}};
  while (!todo.empty()) {
    auto [x, y] = todo.front();
    todo.pop_front();
    const auto& gn = s.node(x);
    const auto& tn = s.node(y);
    std::vector<std::pair<TreeHandle, TreeHandle>> next;
    if (!s.has_participant(x, r)) {
      if (tn.head != Head::End) return false;
      continue;
    }
    if (gn.from == r || gn.to == r) {
      Head want = gn.from == r ? Head::Send : Head::Recv;
      Participant peer = gn.from == r ? gn.to : gn.from;
      if (tn.head != want || tn.peer() != peer || tn.branches.size() != gn.branches.size())
        return false;
      for (std::size_t i = 0; i < gn.branches.size(); ++i) {
        if (gn.branches[i].label != tn.branches[i].label || gn.branches[i].sort != tn.branches[i].sort)
          return false;
        next.emplace_back(gn.branches[i].child, tn.branches[i].child);
      }
    } else {
      for (const auto& b : gn.branches) next.emplace_back(b.child, y);
    }
    for (auto& n : next)
      if (seen.insert(n).second) todo.push_back(n);
  }
  return true;
}

}  // namespace

TEST(Project, RunningExample) {
  World w;
  auto gex = w.g(fixtures::kGex);
  EXPECT_EQ(project(w.store, gex, w.p("r")), w.t(fixtures::kTr));
  EXPECT_EQ(project(w.store, gex, w.p("p")), w.t(fixtures::kTp));
  EXPECT_EQ(project(w.store, gex, w.p("q")), w.t(fixtures::kTq));
  EXPECT_EQ(w.show(*project(w.store, gex, w.p("r"))), "q & { l2(int). end }");
  EXPECT_TRUE(projectable_all(w.store, gex));
}

TEST(Project, EndAndMergeFailure) {
  World w;
  EXPECT_EQ(project(w.store, w.g("end"), w.p("p")), w.t("end"));
  EXPECT_TRUE(projectable_all(w.store, w.g("end")));
  auto bad = w.g("p -> q { l0(int). q -> r { l2(int). end }, l1(int). end }");
  EXPECT_EQ(project(w.store, bad, w.p("r")), std::nullopt);
  EXPECT_FALSE(projectable_all(w.store, bad));
  // Non-participants project to end even through infinite r-free loops.
  EXPECT_EQ(project(w.store, w.g("rec X . p -> q { l0(int). X }"), w.p("r")), w.t("end"));
}

TEST(Project, MergeOfEqualBranches) {
  World w;
  auto g = w.g("p -> q { l0(int). q -> r { l2(int). end }, l1(nat). q -> r { l2(int). end } }");
  EXPECT_EQ(project(w.store, g, w.p("r")), w.t("q & { l2(int). end }"));
  EXPECT_EQ(project(w.store, g, w.p("q")),
            w.t("p & { l0(int). r (+) { l2(int). end }, l1(nat). r (+) { l2(int). end } }"));
}

TEST(Project, BalancedRunningVariant) {
  World w;
  auto g = w.g(fixtures::kGbal);
  EXPECT_TRUE(balanced(w.store, g));
  EXPECT_TRUE(projectable_all(w.store, g));
  EXPECT_EQ(project(w.store, g, w.p("r")), w.t("rec X . q & { l2(int). X }"));
  // The loop-only-on-l0 variant is not projectable onto r under plain merge.
  auto h = w.g("rec X . p -> q { l0(int). q -> r { l2(int). X }, l1(int). q -> r { l2(int). end } }");
  EXPECT_EQ(project(w.store, h, w.p("r")), std::nullopt);
}

TEST(Assoc, Examples) {
  World w;
  auto gex = w.g(fixtures::kGex);
  auto gamma = intern_env(w.store, parse_env(fixtures::kGammaEx, w.roles));
  try {
    associated(w.store, gamma, gex);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionViolation);
    EXPECT_NE(std::string(e.what()).find("NotBalanced"), std::string::npos);
  }
  EXPECT_TRUE(associated(w.store, gamma, gex, /*strict=*/false));

  TypeEnv only_p{{w.p("p"), w.t("end")}};
  EXPECT_TRUE(associated(w.store, only_p, w.g("end")));

  auto g2 = w.g("p -> q { l0(int). end, l1(int). end }");
  auto env2 = intern_env(w.store, parse_env("p : q (+) { l0(int). end }\n"
                                            "q : p & { l0(int). end, l1(int). end }",
                                            w.roles));
  EXPECT_TRUE(associated(w.store, env2, g2));

  // Missing participant, or a non-participant that is not end.
  TypeEnv partial{{w.p("p"), w.t("q (+) { l0(int). end }")}};
  EXPECT_FALSE(associated(w.store, partial, g2));
  auto extra = env2;
  extra.emplace(w.p("s"), w.t("p (+) { l0(int). end }"));
  EXPECT_FALSE(associated(w.store, extra, g2));

  auto bad = w.g("p -> q { l0(int). q -> r { l2(int). end }, l1(int). end }");
  try {
    associated(w.store, {}, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("NotProjectable"), std::string::npos);
  }
}

TEST(ProjectProperty, ResultSatisfiesRules) {
  std::mt19937 rng(41);
  World w;
  w.p("p");
  w.p("q");
  w.p("r");
  int some = 0, none = 0;
  for (int i = 0; i < 2000; ++i) {
    auto g = w.store.intern_global(testgen::random_type(rng, true, 4, 0, 0));
    for (std::uint32_t id = 0; id < 3; ++id) {
      Participant r{id};
      auto t = project(w.store, g, r);
      if (!t) {
        ++none;
        continue;
      }
      ++some;
      ASSERT_TRUE(is_projection(w.store, g, r, *t)) << w.show(g);
      // Deterministic: a second run yields the same tree.
      ASSERT_EQ(project(w.store, g, r), t);
      // Projection commutes with unfolding every head of g.
      for (const auto& b : w.store.node(g).branches) {
        if (!w.store.node(g).involves(r) && w.store.has_participant(g, r))
          ASSERT_EQ(project(w.store, b.child, r), t);
      }
    }
  }
  EXPECT_GT(some, 1000);
  EXPECT_GT(none, 50);
}

TEST(ProjectProperty, ProjectedEnvIsAssociated) {
  std::mt19937 rng(43);
  World w;
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    auto g = w.store.intern_global(testgen::random_type(rng, true, 4, 0, 0));
    if (!balanced(w.store, g) || !projectable_all(w.store, g)) continue;
    ++checked;
    auto env = projected_env(w.store, g);
    ASSERT_TRUE(associated(w.store, env, g)) << w.show(g);
  }
  EXPECT_GT(checked, 300);
}
