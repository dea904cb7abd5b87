#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "mpst/equirec.hpp"
#include "random_terms.hpp"
#include "support.hpp"

using namespace mpst;

TEST(Intern, UnfoldingEquivalentTermsShareId) {
  World w;
  auto a = w.g("rec X . p -> q { l0(int). X }");
  auto b = w.g("rec X . p -> q { l0(int). p -> q { l0(int). X } }");
  EXPECT_EQ(a, b);
  EXPECT_EQ(w.g("end"), w.store.end(Domain::Global));
  EXPECT_NE(w.t("end"), w.g("end"));
  EXPECT_EQ(w.t("rec X . q & { l0(int). X }"), w.t("rec X . q & { l0(int). q & { l0(int). X } }"));
}

TEST(Intern, TpHasTwoSubtrees) {
  World w;
  auto tp = w.t(fixtures::kTp);
  auto all = w.store.reachable(tp);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0], tp);
  EXPECT_EQ(all[1], w.store.end(Domain::Local));
}

TEST(Intern, Idempotent) {
  World w;
  auto a = w.g(fixtures::kGex);
  auto size = w.store.size();
  EXPECT_EQ(w.g(fixtures::kGex), a);
  EXPECT_EQ(w.store.size(), size);
  EXPECT_EQ(w.store.intern_global(w.store.to_syntax(a)), a);
}

TEST(Intern, CycleThroughAnExistingNodeIsNotDuplicated) {
  World w;
  auto y = w.g("rec Y . p -> q { l0(int). Y, l1(int). Y }");
  auto size = w.store.size();
  EXPECT_EQ(w.g("rec X . p -> q { l0(int). X, l1(int). rec Y . p -> q { l0(int). Y, l1(int). Y } }"), y);
  EXPECT_EQ(w.g("rec X . p -> q { l0(int). rec Z . p -> q { l0(int). Z, l1(int). X }, l1(int). X }"), y);
  EXPECT_EQ(w.store.size(), size);
}

TEST(UnfoldHead, Fixtures) {
  World w;
  auto tp = w.t(fixtures::kTp);
  const auto& n = w.store.unfold_head(tp);
  EXPECT_EQ(n.head, Head::Send);
  EXPECT_EQ(n.peer(), w.p("q"));
  ASSERT_EQ(n.branches.size(), 2u);
  EXPECT_EQ(n.branches[0].label, Label{0});
  EXPECT_EQ(n.branches[0].sort, Sort::Int);
  EXPECT_EQ(n.branches[0].child, tp);
  EXPECT_EQ(n.branches[1].child, w.store.end(Domain::Local));

  EXPECT_EQ(w.store.unfold_head(w.store.end(Domain::Local)).head, Head::End);

  auto gex = w.g(fixtures::kGex);
  const auto& m = w.store.unfold_head(gex);
  EXPECT_EQ(m.head, Head::Comm);
  EXPECT_EQ(m.from, w.p("p"));
  EXPECT_EQ(m.to, w.p("q"));
  EXPECT_EQ(m.branches[0].child, gex);
  EXPECT_EQ(m.branches[1].child, w.g("q -> r { l2(int). end }"));
}

TEST(Bisim, Examples) {
  World w;
  auto tp = w.t(fixtures::kTp);
  auto tq = w.t(fixtures::kTq);
  EXPECT_TRUE(w.store.bisim(tp, tp));
  EXPECT_FALSE(w.store.bisim(tp, tq));
  EXPECT_TRUE(w.store.bisim(w.t("rec X . q & { l0(int). X }"),
                            w.t("rec X . q & { l0(int). q & { l0(int). X } }")));
  try {
    w.store.bisim(tp, w.g("end"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KindMismatch);
  }
  RoleNames roles;
  EXPECT_FALSE(syntactic_bisim(parse_local(fixtures::kTp, roles), parse_local(fixtures::kTq, roles)));
}

TEST(BisimProperty, AgreesWithSyntacticOracle) {
  // Ids are equal exactly when the coinductive pair exploration says so.
  std::mt19937 rng(17);
  World w;
  w.p("p");
  w.p("q");
  w.p("r");
  int equal = 0;
  for (int i = 0; i < 1000; ++i) {
    bool global = i % 2 == 0;
    auto d = global ? Domain::Global : Domain::Local;
    auto a = testgen::random_type(rng, global, 3, 0, 0);
    SynType b = a;
    switch (rng() % 3) {
      case 0: b = testgen::random_type(rng, global, 3, 0, 0); break;
      case 1:
        // Unfold once at the top, or re-derive through the arena.
        if (a.kind() == SynType::Kind::Rec) b = substitute_top(a.body(), a);
        break;
      default: b = w.store.to_syntax(w.store.intern(a, d)); break;
    }
    auto ha = w.store.intern(a, d);
    auto hb = w.store.intern(b, d);
    bool oracle = syntactic_bisim(a, b);
    ASSERT_EQ(ha == hb, oracle) << render(a, w.roles) << " vs " << render(b, w.roles);
    equal += oracle;
  }
  EXPECT_GT(equal, 100);
}

TEST(Participants, Examples) {
  World w;
  EXPECT_TRUE(w.store.participants(w.g("end")).empty());
  auto ps = w.store.participants(w.g(fixtures::kGex));
  EXPECT_EQ(ps, (std::vector<Participant>{w.p("p"), w.p("q"), w.p("r")}));
  EXPECT_EQ(w.store.participants(w.g("p -> q { l0(int). end }")),
            (std::vector<Participant>{w.p("p"), w.p("q")}));
}

TEST(Balanced, Examples) {
  World w;
  EXPECT_FALSE(balanced(w.store, w.g(fixtures::kGex)));
  EXPECT_TRUE(balanced(w.store, w.g("end")));
  EXPECT_TRUE(balanced(w.store, w.g("p -> q { l0(int). end, l1(bool). end }")));
  EXPECT_TRUE(balanced(w.store, w.g(fixtures::kGbal)));
}

TEST(BalancedProperty, AgreesWithPathOracle) {
  std::mt19937 rng(23);
  World w;
  int checked = 0, unbalanced = 0;
  for (int i = 0; i < 3000 && checked < 800; ++i) {
    auto g = w.store.intern_global(testgen::random_type(rng, true, 4, 0, 0));
    if (w.store.reachable(g).size() > 12) continue;
    ++checked;
    bool fast = balanced(w.store, g);
    unbalanced += !fast;
    ASSERT_EQ(fast, balanced_by_paths(w.store, g)) << w.show(g);
  }
  EXPECT_GT(checked, 300);
  EXPECT_GT(unbalanced, 10);
}

TEST(Graft, Examples) {
  World w;
  auto gex = w.g(fixtures::kGex);
  EXPECT_EQ(graft(w.store, GContext::make_hole(0), {{0, gex}}), gex);

  GContext c;
  c.kind = GContext::Kind::Comm;
  c.from = w.p("p");
  c.to = w.p("q");
  c.branches.push_back({Label{0}, Sort::Int, GContext::make_hole(0)});
  EXPECT_EQ(graft(w.store, c, {{0, w.g("end")}}), w.g("p -> q { l0(int). end }"));
  try {
    graft(w.store, c, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingHole);
  }
}

TEST(PGrafting, Examples) {
  World w;
  auto qr = w.g("q -> r { l2(int). end }");
  auto r = w.p("r");
  auto a = p_grafting(w.store, qr, r);
  EXPECT_EQ(a.context.kind, GContext::Kind::Hole);
  EXPECT_EQ(a.holes, (HoleAssignment{{0, qr}}));

  auto g = w.g("p -> q { l0(int). q -> r { l2(int). end } }");
  auto b = p_grafting(w.store, g, r);
  ASSERT_EQ(b.context.kind, GContext::Kind::Comm);
  EXPECT_EQ(b.context.from, w.p("p"));
  ASSERT_EQ(b.context.branches.size(), 1u);
  EXPECT_EQ(b.context.branches[0].ctx.kind, GContext::Kind::Hole);
  EXPECT_EQ(b.holes, (HoleAssignment{{0, qr}}));
  EXPECT_EQ(graft(w.store, b.context, b.holes), g);

  auto code = [&](TreeHandle h, Participant x) {
    try {
      p_grafting(w.store, h, x);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Truncated;
  };
  EXPECT_EQ(code(w.g(fixtures::kGex), r), ErrorCode::NotBalanced);
  EXPECT_EQ(code(g, w.p("s")), ErrorCode::NotAParticipant);
}

TEST(PGraftingProperty, RoundTripAndAvoidance) {
  std::mt19937 rng(29);
  World w;
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    auto g = w.store.intern_global(testgen::random_type(rng, true, 4, 0, 0));
    if (!balanced(w.store, g)) continue;
    for (auto r : w.store.participants(g)) {
      auto pg = p_grafting(w.store, g, r);
      ++checked;
      ASSERT_EQ(graft(w.store, pg.context, pg.holes), g);
      EXPECT_FALSE(context_mentions(pg.context, r));
      for (const auto& [j, h] : pg.holes) {
        const auto& n = w.store.node(h);
        EXPECT_TRUE(n.head == Head::End || n.involves(r));
      }
    }
  }
  EXPECT_GT(checked, 200);
}

TEST(ContextHeight, Examples) {
  World w;
  EXPECT_EQ(context_height(GContext::make_hole(0)), 0u);
  GContext c;
  c.kind = GContext::Kind::Comm;
  c.from = w.p("p");
  c.to = w.p("q");
  c.branches.push_back({Label{0}, Sort::Int, GContext::make_hole(0)});
  EXPECT_EQ(context_height(c), 1u);

  // Depth-3 finite tree: the cut for s sits below three s-free layers.
  auto g = w.g(
      "p -> q { l0(int). q -> p { l1(int). p -> q { l2(int). r -> s { l3(int). end } }, "
      "l2(int). r -> s { l3(int). end } } }");
  auto pg = p_grafting(w.store, g, w.p("s"));
  // Oracle: longest path of s-free Comm nodes from the root.
  std::function<std::size_t(TreeHandle)> longest = [&](TreeHandle h) -> std::size_t {
    const auto& n = w.store.node(h);
    if (n.head == Head::End || n.involves(w.p("s"))) return 0;
    std::size_t best = 0;
    for (const auto& b : n.branches) best = std::max(best, longest(b.child));
    return best + 1;
  };
  EXPECT_EQ(longest(g), 3u);
  EXPECT_EQ(context_height(pg.context), 3u);
}

TEST(Dot, ListsReachableNodes) {
  World w;
  auto dot = to_dot(w.store, w.g(fixtures::kGex), w.roles);
  EXPECT_NE(dot.find("p -> q"), std::string::npos);
  EXPECT_NE(dot.find("q -> r"), std::string::npos);
  EXPECT_NE(dot.find("l2(int)"), std::string::npos);
}
