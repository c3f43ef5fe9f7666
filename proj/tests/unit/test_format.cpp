#include <gtest/gtest.h>

#include "rgame/builtins.hpp"
#include "rgame/format.hpp"

using namespace rgame;

namespace {

const char* kLattice = R"(# two columns of the lattice game, closed off by hand
[states]
start = (0,0)
payoff_bound = 2
active = (0,0), (1,0), (1,1)
(0,-1) = 1
(0,1) = -2
(1,-1) = 1
(1,2) = -2
(2,0) = 0
[actions]
(0,0): A = R, J; B = -
(1,0): A = R, J; B = -
(1,1): A = C; B = -
[transitions]
(0,0) R -> 1 (1,0)
(0,0) J -> 1/2 (0,-1), 1/2 (0,1)
(1,0) R -> 1 (2,0)
(1,0) J -> 1/2 (1,-1), 1/2 (1,1)
(1,1) C -> 1 (1,2)
)";

}  // namespace

TEST(Format, JumpRuleMatchesLatticeGame) {
  auto g = loadGame(kLattice);
  LehrerSorinGame ref(10);
  for (const char* s : {"(0,0)", "(1,0)"}) {
    auto d = g->transition(s, 1, 0);
    auto r = ref.transition(s, 1, 0);
    ASSERT_EQ(d.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_EQ(d[i].state, r[i].state);
      EXPECT_EQ(d[i].prob, Rational(1, 2));
    }
  }
  EXPECT_EQ(g->payoff("(0,1)"), -2);
  EXPECT_EQ(*g->initialState(), "(0,0)");
}

TEST(Format, RoundTripIsIdentity) {
  auto g = loadGame(kLattice);
  std::string saved = saveGame(*g);
  auto g2 = loadGame(saved);
  EXPECT_EQ(saveGame(*g2), saved);
  for (auto game : {GamePtr(quittingSimple()), GamePtr(ladderGame())}) {
    std::string s = saveGame(*game);
    EXPECT_EQ(saveGame(*loadGame(s)), s);
  }
}

TEST(Format, ProbabilitiesRoundTripExactly) {
  auto g = loadGame(
      "[states]\nactive = s\nk = -1/3\n[actions]\ns: A = a; B = b\n"
      "[transitions]\ns a b -> 1/7 s, 6/7 k\n");
  auto d = loadGame(saveGame(*g))->transition("s", 0, 0);
  EXPECT_EQ(d[0].prob, Rational(1, 7));
  EXPECT_EQ(d[1].prob, Rational(6, 7));
}

TEST(Format, TrivialGame) {
  auto g = loadGame("[states]\nk = 1/2\n");
  EXPECT_TRUE(g->isAbsorbing("k"));
  EXPECT_EQ(g->payoff("k"), Rational(1, 2));
}

TEST(Format, ProbabilityAboveOneIsAParseError) {
  try {
    loadGame("[states]\nactive = s\nk = 0\n[actions]\ns: A = a; B = b\n"
             "[transitions]\ns a b -> 3/2 k\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7);
    EXPECT_EQ(e.column(), 10);
  }
}

TEST(Format, MalformedInputReportsPosition) {
  try {
    loadGame("[states]\nactive = s\n[actions]\ns: A = a; B = b\n[transitions]\ns a b -> 1/x s\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6);
    EXPECT_EQ(e.column(), 10);
  }
  EXPECT_THROW(loadGame("[bogus]\n"), ParseError);
  EXPECT_THROW(loadGame("x = 1\n"), ParseError);
}

TEST(Format, ValidationFailureIsReported) {
  try {
    loadGame("[states]\nactive = s\nk = 0\n[actions]\ns: A = a; B = b\n"
             "[transitions]\ns a b -> 1/2 k\n");
    FAIL();
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.diagnostics().size(), 1u);
  }
  EXPECT_THROW(loadGame("[states]\nk = 2\n"), ValidationError);
  EXPECT_NO_THROW(loadGame("[states]\npayoff_bound = 2\nk = 2\n"));
}

TEST(Format, BuiltinDeclaration) {
  auto g = loadGame("# lattice\nbuiltin lehrer_sorin bound=3000\n");
  EXPECT_EQ(g->name(), "lehrer_sorin");
  EXPECT_EQ(saveGame(*g), "builtin lehrer_sorin bound=3000\n");
  EXPECT_FALSE(g->contains("(3001,0)"));
  EXPECT_THROW(loadGame("builtin nope\n"), ParseError);
}
