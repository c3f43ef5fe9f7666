#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rgame/builtins.hpp"
#include "rgame/simulate.hpp"

using namespace rgame;

namespace {

std::shared_ptr<RecursiveGame> deterministicAbsorb() {
  auto g = std::make_shared<RecursiveGame>();
  g->addActive("a", {"go"}, {"-"});
  g->addAbsorbing("w", 1);
  g->setTransition("a", 0, 0, {{"w", 1}});
  return g;
}

std::shared_ptr<RecursiveGame> loop() {
  auto g = std::make_shared<RecursiveGame>();
  g->addActive("a", {"x", "y"}, {"-"});
  g->addActive("b", {"x"}, {"-"});
  g->setTransition("a", 0, 0, {{"b", 1}});
  g->setTransition("a", 1, 0, {{"a", 1}});
  g->setTransition("b", 0, 0, {{"a", 1}});
  return g;
}

// quit wins at once; continue stays w.p. 1/2 and draws otherwise.
std::shared_ptr<RecursiveGame> soloQuit() {
  auto g = std::make_shared<RecursiveGame>();
  g->addActive("s", {"quit", "continue"}, {"-"});
  g->addAbsorbing("win", 1);
  g->addAbsorbing("draw", 0);
  g->setTransition("s", 0, 0, {{"win", 1}});
  g->setTransition("s", 1, 0, {{"s", Rational(1, 2)}, {"draw", Rational(1, 2)}});
  return g;
}

std::shared_ptr<RecursiveGame> randomTwoPlayer(std::mt19937_64& rng, int m) {
  auto g = std::make_shared<RecursiveGame>();
  std::uniform_int_distribution<int> pick(0, m + 2), num(1, 7);
  auto label = [](int i) { return "t" + std::to_string(i); };
  for (int i = 0; i < m; ++i) g->addActive(label(i), {"u", "d"}, {"l", "r"});
  g->addAbsorbing(label(m), 1);
  g->addAbsorbing(label(m + 1), -1);
  g->addAbsorbing(label(m + 2), Rational(1, 3));
  for (int i = 0; i < m; ++i)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        int u = pick(rng), v = pick(rng);
        if (u == v) v = (u + 1) % (m + 3);
        Rational p(num(rng), 8);
        g->setTransition(label(i), a, b, {{label(u), p}, {label(v), 1 - p}});
      }
  return g;
}

// Right until stage m, then jump; single action elsewhere.
StrategyPtr jumpAt(int m) {
  return scheduledStrategy("jump" + std::to_string(m), 1, [m](int t, const StateId& x) {
    auto c = parseLattice(x);
    if (c && c->second == 0) return t < m ? Mixed{1, 0} : Mixed{0, 1};
    return Mixed{1};
  });
}

// Jump at stage m in the n-stage lattice game: +1 from stage m+1 w.p. 1/2,
// otherwise the climb hits -2 at stage 2m.
double jumpPayoff(long m, long n) {
  double up = static_cast<double>(n - m) / n;
  double down = 2 * m <= n ? -2.0 * (n - 2 * m + 1) / n : 0;
  return 0.5 * up + 0.5 * down;
}

const Synthesis& ladder() {
  static const Synthesis s = [] {
    SynthesisOptions opt;
    opt.eps = 0.05;
    opt.horizon = 600;
    return synthesize(ladderGame(), "high", opt);
  }();
  return s;
}

}  // namespace

TEST(Rng, KeyedDrawsAreStable) {
  double a = uniformDraw(1, 2, 3, 4, 5, Purpose::Action);
  EXPECT_EQ(a, uniformDraw(1, 2, 3, 4, 5, Purpose::Action));
  EXPECT_NE(a, uniformDraw(1, 2, 3, 4, 6, Purpose::Action));
  EXPECT_NE(a, uniformDraw(1, 2, 3, 4, 5, Purpose::Nature));
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    double u = uniformDraw(9, i, 0, 0, 0, Purpose::Nature);
    ASSERT_GE(u, 0);
    ASSERT_LT(u, 1);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 4 * std::sqrt(1.0 / 12 / 100000));
  EXPECT_EQ(streamId("sigma-bar"), streamId("sigma-bar"));
  EXPECT_NEAR(normalQuantile(0.975), 1.959963985, 1e-8);
  EXPECT_NEAR(normalQuantile(0.995), 2.575829304, 1e-8);
}

TEST(Play, HorizonZeroAndDeterminism) {
  auto g = loop();
  auto a = uniformAgent(g, 1), b = uniformAgent(g, 2);
  auto t0 = play(g, "a", a, b, 0, 5);
  ASSERT_EQ(t0.states.size(), 1u);
  EXPECT_EQ(t0.states[0], "a");
  auto t1 = play(g, "a", a, b, 50, 5, 3), t2 = play(g, "a", a, b, 50, 5, 3);
  EXPECT_EQ(t1.states, t2.states);
  EXPECT_EQ(t1.actionsA, t2.actionsA);
  EXPECT_EQ(t1.states.size(), 51u);

  auto det = deterministicAbsorb();
  auto d1 = play(det, "a", uniformAgent(det, 1), uniformAgent(det, 2), 10, 1);
  auto d2 = play(det, "a", uniformAgent(det, 1), uniformAgent(det, 2), 10, 99);
  EXPECT_EQ(d1.states, d2.states);
  EXPECT_EQ(d1.absorbedAt, 2);
  EXPECT_EQ(d1.stateAt(9), "w");
}

TEST(Play, RejectsIllegalMass) {
  auto g = quittingSimple();
  auto bad = stationaryAgent("bad", 1, {{"s", Mixed{0.7, 0.7}}});
  EXPECT_THROW(play(g, "s", bad, uniformAgent(g, 2), 3, 1), Error);
  auto wrongSize = stationaryAgent("short", 1, {{"s", Mixed{1}}});
  EXPECT_THROW(play(g, "s", wrongSize, uniformAgent(g, 2), 3, 1), Error);
}

TEST(Play, LehrerJumpSplitsInHalf) {
  auto g = std::make_shared<LehrerSorinGame>(100);
  const int m = 7, runs = 4000;
  int up = 0;
  for (int r = 0; r < runs; ++r) {
    auto tr = play(g, latticeState(0, 0), automatonAgent(jumpAt(m)), uniformAgent(g, 2), 40, 3, r);
    ASSERT_GT(tr.absorbedAt, 0);
    const auto& z = tr.states.back();
    if (z == latticeState(m - 1, -1)) {
      EXPECT_EQ(tr.absorbedAt, m + 1);
      ++up;
    } else {
      EXPECT_EQ(z, latticeState(m - 1, m));
      EXPECT_EQ(tr.absorbedAt, 2 * m);
    }
  }
  EXPECT_NEAR(up / static_cast<double>(runs), 0.5, 3 * std::sqrt(0.25 / runs));
}

TEST(Gamma, DeterministicAndLoop) {
  auto g = deterministicAbsorb();
  auto e = estimateGamma(g, "a", uniformAgent(g, 1), uniformAgent(g, 2), 4, 20, 1);
  EXPECT_DOUBLE_EQ(e.mean, 0.75);  // (0 + 1 + 1 + 1) / 4
  EXPECT_EQ(e.sd, 0);
  auto l = loop();
  EXPECT_EQ(estimateGamma(l, "a", uniformAgent(l, 1), uniformAgent(l, 2), 30, 50, 1).mean, 0);
  EXPECT_THROW(estimateGamma(l, "a", uniformAgent(l, 1), uniformAgent(l, 2), 30, 0, 1), Error);
}

TEST(Gamma, LehrerHalfThenJump) {
  auto g = std::make_shared<LehrerSorinGame>(3000);
  const long n = 1000;
  auto e = estimateGamma(g, latticeState(0, 0), automatonAgent(jumpAt(n / 2)), uniformAgent(g, 2),
                         n, 4000, 11);
  double exact = jumpPayoff(n / 2, n);
  EXPECT_NEAR(exact, 0.249, 1e-12);
  EXPECT_NEAR(e.mean, exact, 3 * e.stderr_() + 1e-12);
}

TEST(BestResponse, MarkovProfileGivesVn) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 4; ++trial) {
    auto g = randomTwoPlayer(rng, 4);
    DepthPolicy pol;
    pol.recordProfiles = true;
    const int n = 6;
    auto seq = computeVn(g, "t0", n, pol);
    for (int owner : {1, 2}) {
      auto p = std::make_shared<const MarkovProfile>(markovOptimal(seq, n, owner));
      BestResponse br(g, markovStrategy(p), n);
      auto v = br.value("t0");
      ASSERT_TRUE(v.has_value());
      EXPECT_NEAR(*v, seq.value(n, "t0"), 1e-9);
    }
  }
  EXPECT_NO_THROW(BestResponse(quittingSimple(), jumpAt(3), 12));
  EXPECT_THROW(BestResponse(quittingSimple(), jumpAt(3), 13), Error);
}

TEST(BestResponse, NoChoiceMatchesMonteCarlo) {
  auto g = soloQuit();
  SynthesisOptions opt;
  opt.eps = 0.1;
  opt.horizon = 200;
  auto s = synthesize(g, "s", opt);
  const int n = 9;
  BestResponse br(s.gammaEps, s.block, n);
  auto v = br.value("s");
  ASSERT_TRUE(v.has_value());
  auto e = estimateGamma(s.gammaEps, "s", automatonAgent(s.block), uniformAgent(s.gammaEps, 2), n,
                         20000, 4);
  EXPECT_NEAR(e.mean, *v, 3 * e.stderr_() + 1e-12);
}

TEST(BestResponse, AgentRealizesTheValue) {
  const auto& s = ladder();
  const int n = 8;
  BestResponse br(ladderGame(), s.sigma, n);
  auto v = br.value("high");
  ASSERT_TRUE(v.has_value());
  auto e = estimateGamma(ladderGame(), "high", automatonAgent(s.sigma), br.agent(), n, 6000, 8);
  EXPECT_NEAR(e.mean, *v, 3.5 * e.stderr_());
  // Any other reply does at least as well for player 1.
  auto u = estimateGamma(ladderGame(), "high", automatonAgent(s.sigma),
                         uniformAgent(ladderGame(), 2), n, 6000, 8);
  EXPECT_GE(u.mean + 3 * u.stderr_(), *v);
}

TEST(BestResponse, CapIsReported) {
  const auto& s = ladder();
  BestResponseOptions opt;
  opt.infoStateCap = 3;
  BestResponse br(ladderGame(), s.sigma, 10, opt);
  EXPECT_FALSE(br.value("high").has_value());
  EXPECT_TRUE(br.exhausted());
}

TEST(Filter, BayesUpdateOnBlocks) {
  const auto& s = ladder();
  NodeFilter f(s.sigma);
  f.reset("high");
  const int n = s.cert.n.at("high");
  ASSERT_EQ(static_cast<int>(f.dist().size()), n);
  // Every first-stage node plays the same action, so observing it is
  // uninformative: k = 1 re-anchors, k >= 2 moves to j = 2.
  Mixed m = f.marginal("high");
  int a = m[0] > 0 ? 0 : 1;
  f.update("high", a, "high");
  double total = 0, moved = 0;
  for (const auto& [node, w] : f.dist()) {
    total += w;
    if (node.j == 2) moved += w;
  }
  EXPECT_NEAR(total, 1, 1e-12);
  EXPECT_NEAR(moved, (n - 1.0) / n, 1e-12);
}

TEST(Adversary, MyopicAndMenu) {
  auto g = quittingSimple();
  auto cont = scheduledStrategy("continue", 1, [](int, const StateId&) { return Mixed{0, 1}; });
  ValueFunction v;
  v.set("s", 1.0 / 3);
  v.set("win", 1);
  v.set("lose", -1);
  v.set("draw", 0);
  AdversarySpec my;
  auto agent = makeAdversary(my, g, cont, v, "s")();
  agent->begin("s", {});
  // allow: E[v] = 1/6, block: 2/3.
  EXPECT_EQ(agent->act(1, "s"), (Mixed{1, 0}));
  for (const auto& spec : adversaryMenu()) {
    auto f = makeAdversary(spec, g, cont, v, "s");
    auto tr = play(g, "s", automatonAgent(cont), f, 50, 2);
    EXPECT_GT(tr.absorbedAt, 0) << spec.name();
  }
}

TEST(Adversary, DiscountedIsStationaryOptimal) {
  auto g = quittingSimple();
  AdversarySpec d;
  d.kind = AdversarySpec::Kind::Discounted;
  d.lambda = 0.1;
  auto cont = scheduledStrategy("c", 1, [](int, const StateId&) { return Mixed{0, 1}; });
  auto agent = makeAdversary(d, g, cont, {}, "s")();
  Mixed y = agent->act(1, "s");
  // Against y, both rows of the one-shot game give the same discounted value.
  auto dv = computeVLambda(g, "s", 0.1, 1e-12);
  double w = dv.value("s"), beta = 0.9;
  double quit = beta * (y[0] * 1 + y[1] * -1);
  double goOn = beta * (y[0] * (w / 2) + y[1] * (w / 2 + 0.5));
  EXPECT_NEAR(quit, goOn, 1e-8);
}

TEST(Stats, TrivialUpcrossingCases) {
  auto g = quittingSimple();
  auto sStarAll = scheduledStrategy("s", 1, [](int, const StateId&) { return Mixed{0.2, 0.8}; });
  SimOptions opt;
  opt.runs = 200;
  opt.horizon = 100;
  // No automaton phases: N = 0 and no switching values.
  auto st = collectStats(g, "s", automatonAgent(sStarAll), uniformAgent(g, 2), nullptr, opt);
  EXPECT_EQ(st.upcrossings.mean, 0);
  EXPECT_EQ(st.oddFrequency.mean, 0);
  long total = 0;
  for (const auto& [stage, c] : st.absorption) total += c;
  EXPECT_EQ(total, opt.runs);

  // sigma-bar on quitting: v(s) = 1/3 > 2 eps, so exactly one odd phase.
  SynthesisOptions so;
  so.eps = 0.1;
  so.horizon = 300;
  auto s = synthesize(g, "s", so);
  auto st2 = collectStats(g, "s", automatonAgent(s.sigma), uniformAgent(g, 2), &s.v, opt);
  EXPECT_EQ(st2.upcrossings.mean, 1);
  EXPECT_EQ(st2.upcrossings.sd, 0);
  auto rows = submartingaleCheck(st2, 0.1);
  for (const auto& r : rows) EXPECT_TRUE(r.pass) << r.name;
}

TEST(Stats, LadderLemmaChecks) {
  const auto& s = ladder();
  const double eps = s.eps;
  SimOptions opt;
  opt.runs = 3000;
  opt.horizon = 2000;
  opt.seed = 17;
  std::vector<CheckRow> rows;
  for (const auto& spec : adversaryMenu()) {
    auto adv = makeAdversary(spec, ladderGame(), s.sigma, s.v, "high");
    auto st = collectStats(ladderGame(), "low", automatonAgent(s.sigma), adv, &s.v, opt);
    for (auto& r : submartingaleCheck(st, eps)) rows.push_back(r);
    rows.push_back(upcrossingCheck(st, eps));
    rows.push_back(phaseFrequencyCheck(st, eps));
    rows.push_back(guaranteeCheck(st, s.v.at("low"), eps));
  }
  for (const auto& r : rows) EXPECT_TRUE(r.pass) << r.name << " " << r.estimate << " " << r.bound;
  auto text = formatRows(rows);
  EXPECT_NE(text.find("upcrossings E[N]"), std::string::npos);
}

TEST(Stats, SwitchesHappenOnLadder) {
  const auto& s = ladder();
  SimOptions opt;
  opt.runs = 500;
  opt.horizon = 500;
  auto st = collectStats(ladderGame(), "low", automatonAgent(s.sigma),
                         uniformAgent(ladderGame(), 2), &s.v, opt);
  // From low the uniform opponent pulls half the time, so some runs reach high.
  EXPECT_GT(st.upcrossings.mean, 0);
  bool crossed = false;
  for (const auto& sw : st.switchValues)
    if (!sw.empty()) {
      crossed = true;
      EXPECT_GT(sw.front(), 2 * s.eps);
    }
  EXPECT_TRUE(crossed);
}
