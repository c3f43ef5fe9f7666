#include <gtest/gtest.h>

#include "rgame/builtins.hpp"
#include "rgame/game.hpp"

using namespace rgame;

namespace {

// Independent successor rule for the lattice game, written from the
// transition description rather than the generator.
std::set<StateId> latticeReach(long depth) {
  std::set<std::pair<long, long>> seen{{0, 0}}, layer{{0, 0}};
  for (long d = 0; d < depth; ++d) {
    std::set<std::pair<long, long>> next;
    for (auto [x, y] : layer) {
      if (y == -1 || y == x + 1) continue;
      if (y == 0) {
        next.insert({x + 1, 0});
        next.insert({x, -1});
        next.insert({x, 1});
      } else {
        next.insert({x, y + 1});
      }
    }
    for (auto p : next) seen.insert(p);
    layer = next;
  }
  std::set<StateId> out;
  for (auto [x, y] : seen) out.insert(latticeState(x, y));
  return out;
}

}  // namespace

TEST(Validate, MassDeficitIsReported) {
  RecursiveGame g;
  g.addActive("x", {"a"}, {"b"});
  g.addAbsorbing("y", 0);
  g.setTransition("x", 0, 0, {{"y", Rational(9, 10)}});
  auto d = validate(g);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].detail, "transition mass 0.9 ≠ 1 at (x,a,b)");
}

TEST(Validate, PayoffOutOfRange) {
  RecursiveGame g;
  g.addAbsorbing("k", Rational(3, 2));
  auto d = validate(g);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NE(d[0].detail.find("out of [-1,1]"), std::string::npos);
}

TEST(Validate, LatticeGameIsClean) {
  LehrerSorinGame g(40);
  auto states = reachable(g, "(0,0)", 60);
  std::vector<StateId> inDomain;
  for (const auto& s : states)
    if (g.contains(s)) inDomain.push_back(s);
  EXPECT_TRUE(validate(g, inDomain).empty());
}

TEST(Validate, BundledGamesAreClean) {
  EXPECT_TRUE(validate(*quittingSimple()).empty());
  EXPECT_TRUE(validate(*ladderGame()).empty());
}

TEST(Validate, UnknownSuccessor) {
  RecursiveGame g;
  g.addActive("x", {"a"}, {"b"});
  g.setTransition("x", 0, 0, {{"nowhere", 1}});
  auto d = validate(g);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NE(d[0].detail.find("unknown successor"), std::string::npos);
}

TEST(Reachable, LatticeDepthTwo) {
  LehrerSorinGame g(3000);
  std::set<StateId> expected{"(0,0)", "(1,0)", "(2,0)", "(0,-1)", "(0,1)", "(1,-1)", "(1,1)"};
  EXPECT_EQ(reachable(g, "(0,0)", 2), expected);
  for (int d = 0; d <= 12; ++d) EXPECT_EQ(reachable(g, "(0,0)", d), latticeReach(d)) << d;
}

TEST(Reachable, DepthZeroAndAbsorbing) {
  auto g = quittingSimple();
  EXPECT_EQ(reachable(*g, "s", 0), std::set<StateId>{"s"});
  RecursiveGame single;
  single.addAbsorbing("k", 1);
  EXPECT_EQ(reachable(single, "k", 10), std::set<StateId>{"k"});
  EXPECT_THROW(reachable(*g, "nope", 1), Error);
}

TEST(Reachable, MonotoneAndStabilizes) {
  auto g = quittingSimple();
  std::size_t prev = 0;
  for (int d = 0; d < 6; ++d) {
    auto r = reachable(*g, "s", d);
    EXPECT_GE(r.size(), prev);
    prev = r.size();
  }
  EXPECT_EQ(prev, 4u);
}

TEST(Explore, FrontierAndSorting) {
  auto g = std::make_shared<LehrerSorinGame>(3);
  auto e = explore(g, {"(0,0)"}, 3);
  EXPECT_TRUE(std::is_sorted(e.states.begin(), e.states.end()));
  EXPECT_EQ(e.kind[e.at("(3,0)")], ExploredGame::Kind::Frontier);
  EXPECT_EQ(e.kind[e.at("(0,1)")], ExploredGame::Kind::Absorbing);
  EXPECT_DOUBLE_EQ(e.payoff[e.at("(0,1)")], -2.0);
  EXPECT_EQ(e.depth[e.at("(1,1)")], 2);
  EXPECT_DOUBLE_EQ(e.low, -2.0);
  EXPECT_DOUBLE_EQ(e.high, 1.0);
  // Coordinate bound: (4,0) lies outside the domain.
  auto wide = explore(g, {"(0,0)"}, 10);
  EXPECT_EQ(wide.kind[wide.at("(4,0)")], ExploredGame::Kind::Frontier);
  EXPECT_EQ(wide.kind[wide.at("(3,0)")], ExploredGame::Kind::Active);
}

TEST(Explore, CapIsEnforced) {
  auto g = std::make_shared<LehrerSorinGame>(3000);
  EXPECT_THROW(explore(g, {"(0,0)"}, -1, 100), CapExceeded);
}

TEST(Lattice, Labels) {
  EXPECT_EQ(latticeState(3, -1), "(3,-1)");
  auto p = parseLattice("(12,5)");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->first, 12);
  EXPECT_EQ(p->second, 5);
  EXPECT_FALSE(parseLattice("s"));
  EXPECT_FALSE(parseLattice("(1,2"));
}
