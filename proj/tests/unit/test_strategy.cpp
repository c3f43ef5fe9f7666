#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "rgame/builtins.hpp"
#include "rgame/strategy.hpp"

using namespace rgame;

namespace {

// n-stage guarantee of a Markov profile, recomputed on the Game itself.
double markovGuarantee(const Game& g, const MarkovProfile& p, const StateId& x, int k,
                       std::map<std::pair<int, StateId>, double>& memo) {
  if (g.isAbsorbing(x)) return toDouble(g.payoff(x));
  if (k == 1) return 0;
  auto key = std::make_pair(k, x);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  Mixed m = p.action(k, x);
  int replies = static_cast<int>(p.owner() == 1 ? g.actionsB(x).size() : g.actionsA(x).size());
  double best = p.owner() == 1 ? 1e300 : -1e300;
  for (int r = 0; r < replies; ++r) {
    double v = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      int a = p.owner() == 1 ? static_cast<int>(i) : r;
      int b = p.owner() == 1 ? r : static_cast<int>(i);
      for (const auto& o : g.transition(x, a, b))
        v += m[i] * toDouble(o.prob) * markovGuarantee(g, p, o.state, k - 1, memo);
    }
    best = p.owner() == 1 ? std::min(best, v) : std::max(best, v);
  }
  return memo[key] = (k - 1.0) / k * best;
}

double onePlayerTotal(const Game& g, const StateId& x, int n,
                      std::map<std::pair<int, StateId>, double>& memo) {
  if (n == 0) return 0;
  if (g.isAbsorbing(x)) return n * toDouble(g.payoff(x));
  auto key = std::make_pair(n, x);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  double best = -1e300;
  for (std::size_t a = 0; a < g.actionsA(x).size(); ++a) {
    double e = 0;
    for (const auto& o : g.transition(x, static_cast<int>(a), 0))
      e += toDouble(o.prob) * onePlayerTotal(g, o.state, n - 1, memo);
    best = std::max(best, e);
  }
  return memo[key] = best;
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

std::shared_ptr<RecursiveGame> chain() {
  auto g = std::make_shared<RecursiveGame>();
  g->addActive("a", {"go"}, {"-"});
  g->addActive("b", {"go"}, {"-"});
  g->addAbsorbing("c", 1);
  g->setTransition("a", 0, 0, {{"b", 1}});
  g->setTransition("b", 0, 0, {{"c", 1}});
  return g;
}

DepthPolicy withProfiles() {
  DepthPolicy p;
  p.recordProfiles = true;
  return p;
}

const Synthesis& ladderSynthesis() {
  static const Synthesis s = [] {
    SynthesisOptions opt;
    opt.eps = 0.05;
    opt.horizon = 600;
    return synthesize(ladderGame(), "high", opt);
  }();
  return s;
}

}  // namespace

TEST(Markov, GuaranteeMatchesValueOnRandomGames) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto g = randomTwoPlayer(rng, 5);
    auto seq = computeVn(g, "t0", 12, withProfiles());
    for (int owner : {1, 2}) {
      auto p = markovOptimal(seq, 12, owner);
      std::map<std::pair<int, StateId>, double> memo;
      for (int i = 0; i < 5; ++i) {
        StateId x = "t" + std::to_string(i);
        if (seq.explored().find(x) < 0) continue;
        EXPECT_NEAR(markovGuarantee(*g, p, x, 12, memo), seq.value(12, x), 1e-9) << x;
        EXPECT_NEAR(profileGuarantee(p)[seq.explored().at(x)], seq.value(12, x), 1e-9);
      }
    }
  }
}

TEST(Markov, LehrerSorinPlaysAnOptimalAction) {
  auto g = std::make_shared<LehrerSorinGame>(200);
  DepthPolicy pol = withProfiles();
  pol.mode = DepthPolicy::Mode::Targeted;
  const int N = 40;
  auto seq = computeVn(g, latticeState(0, 0), N, pol);
  auto p = markovOptimal(seq, N, 1);
  std::map<std::pair<int, StateId>, double> memo;
  int checked = 0;
  for (long x : {0L, 3L, 7L})
    for (int k = 2; k <= N - x; ++k) {
      StateId s = latticeState(x, 0);
      double right = onePlayerTotal(*g, latticeState(x + 1, 0), k - 1, memo);
      double jump = 0.5 * onePlayerTotal(*g, latticeState(x, -1), k - 1, memo) +
                    0.5 * onePlayerTotal(*g, latticeState(x, 1), k - 1, memo);
      Mixed m = p.action(k, s);
      ASSERT_EQ(m.size(), 2u);
      if (std::fabs(right - jump) < 1e-9) continue;
      EXPECT_NEAR(m[right > jump ? 0 : 1], 1.0, 1e-9) << s << " k=" << k;
      ++checked;
    }
  EXPECT_GT(checked, 60);
  // With many stages left the profile moves right; at (1,0) with two stages
  // left the jump pays 1/2 while (0,0) must not jump into (0,1).
  EXPECT_NEAR(p.action(N, latticeState(0, 0))[0], 1.0, 1e-9);
  EXPECT_NEAR(p.action(2, latticeState(0, 0))[0], 1.0, 1e-9);
  EXPECT_NEAR(p.action(2, latticeState(1, 0))[1], 1.0, 1e-9);
}

TEST(Markov, NeedsRecordedProfiles) {
  auto seq = computeVn(quittingSimple(), "s", 5);
  EXPECT_THROW(markovOptimal(seq, 5, 1), MissingValue);
  auto withP = computeVn(quittingSimple(), "s", 5, withProfiles());
  EXPECT_THROW(markovOptimal(withP, 6, 1), Error);
  EXPECT_THROW(markovOptimal(withP, 5, 3), Error);
}

TEST(Markov, StrategyPlaysRemainingStageTable) {
  auto g = std::make_shared<LehrerSorinGame>(100);
  DepthPolicy pol = withProfiles();
  pol.mode = DepthPolicy::Mode::Targeted;
  auto seq = computeVn(g, latticeState(0, 0), 10, pol);
  auto p = std::make_shared<const MarkovProfile>(markovOptimal(seq, 10, 1));
  auto s = markovStrategy(p);
  History h;
  for (int t = 0; t < 4; ++t) h.states.push_back(latticeState(t, 0));
  auto acts = replay(*s, h, std::vector<double>(4, 0.5));
  for (int t = 0; t < 4; ++t) EXPECT_EQ(acts[t], p->action(10 - t, h.states[t]));
}

TEST(SStar, QuittingClosedForm) {
  auto g = quittingSimple();
  ValueFunction v;
  v.set("s", 1.0 / 3);
  v.set("win", 1);
  v.set("lose", -1);
  v.set("draw", 0);
  auto s = sStar(*g, v, 1e-9);
  ASSERT_EQ(s.entries.size(), 1u);
  const auto& e = s.entries.at("s");
  // Row indifference on [[1, -1], [v/2, v/2 + 1/2]] gives quit w.p. 1/5.
  EXPECT_NEAR(e.action[0], 0.2, 1e-9);
  EXPECT_NEAR(e.oneShotValue, 1.0 / 3, 1e-9);
  EXPECT_NEAR(e.slack, 0, 1e-9);
  EXPECT_TRUE(s.violations.empty());
}

TEST(SStar, FlagsValuesAboveTheOneShotGame) {
  auto g = quittingSimple();
  ValueFunction v;
  v.set("s", 0.6);
  v.set("win", 1);
  v.set("lose", -1);
  v.set("draw", 0);
  auto s = sStar(*g, v, 1e-6);
  ASSERT_EQ(s.violations.size(), 1u);
  EXPECT_LT(s.minSlack(), 0);
  ValueFunction partial;
  partial.set("s", 0.3);
  EXPECT_THROW(sStar(*g, partial, 1e-6), MissingValue);
}

TEST(Certificate, QuittingSmallestHorizon) {
  auto seq = computeVn(quittingSimple(), "s", 20);
  auto c = positiveCertificate(seq, 0.099, 20);
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(c.n.at("s"), 2);  // v_1 = 0, v_2 = 1/10
  auto strict = positiveCertificate(seq, 0.11, 20);
  EXPECT_GT(strict.n.at("s"), 2);
  EXPECT_FALSE(positiveCertificate(seq, 0.4, 20).ok());
}

TEST(Certificate, LehrerSorinClimbStatesFail) {
  auto g = std::make_shared<LehrerSorinGame>(50);
  DepthPolicy pol;
  pol.depth = 40;
  auto seq = computeVn(g, latticeState(0, 0), 30, pol);
  auto c = positiveCertificate(seq, 0.1, 30);
  EXPECT_FALSE(c.ok());
  std::set<StateId> failed(c.failures.begin(), c.failures.end());
  for (long x = 1; x < 6; ++x) EXPECT_TRUE(failed.count(latticeState(x, 1))) << x;
  EXPECT_FALSE(failed.count(latticeState(0, 0)));
}

TEST(Certificate, TargetRaisesTheThreshold) {
  auto seq = computeVn(quittingSimple(), "s", 200);
  ValueFunction v;
  v.set("s", 1.0 / 3);
  auto c = positiveCertificate(seq, 0.1, 200, &v, 0.01);
  ASSERT_TRUE(c.ok());
  int n = c.n.at("s");
  EXPECT_GE(seq.value(n, "s"), 1.0 / 3 - 0.01);
  EXPECT_LT(seq.value(n - 1, "s"), 1.0 / 3 - 0.01);
}

TEST(Certificate, BlocksNeeded) {
  for (double M : {0.5, 0.1, 0.025})
    for (double d : {0.5, 0.1, 1e-3, 1.25e-4}) {
      int l = blocksNeeded(M, d);
      EXPECT_LE(std::pow(1 - M, l), d * (1 + 1e-12));
      if (l > 1) EXPECT_GT(std::pow(1 - M, l - 1), d);
    }
  EXPECT_EQ(blocksNeeded(0.5, 0.25), 2);
  EXPECT_THROW(blocksNeeded(0, 0.1), Error);
}

TEST(Auxiliary, NoStoppingKeepsValues) {
  std::mt19937_64 rng(5);
  auto g = randomTwoPlayer(rng, 4);
  ValueFunction v;
  for (int i = 0; i < 7; ++i) v.set("t" + std::to_string(i), 0.0);
  auto aux = auxiliaryGame(g, v, [](const StateId&) { return false; });
  auto a = computeVn(g, "t0", 15), b = computeVn(aux, "t0", 15);
  for (int i = 0; i < 4; ++i) {
    StateId x = "t" + std::to_string(i);
    if (a.explored().find(x) < 0) continue;
    EXPECT_DOUBLE_EQ(a.value(15, x), b.value(15, x));
  }
}

TEST(Auxiliary, StoppingEverywhereFreezesV) {
  auto g = ladderGame();
  ValueFunction v;
  v.set("high", 0.2);
  v.set("low", -0.1);
  auto aux = auxiliaryGame(g, v, [](const StateId&) { return true; });
  EXPECT_TRUE(aux->stopped("high"));
  EXPECT_FALSE(aux->stopped("win"));
  EXPECT_TRUE(aux->isAbsorbing("low"));
  EXPECT_EQ(aux->payoff("win"), Rational(1));
  EXPECT_NEAR(toDouble(aux->payoff("high")), 0.2, 1e-15);
  EXPECT_THROW(aux->actionsA("high"), Error);
  auto seq = computeVn(aux, "high", 5);
  EXPECT_NEAR(seq.value(5, "high"), 0.2, 1e-15);

  ValueFunction big;
  big.set("high", 1.5);
  EXPECT_THROW(auxiliaryGame(g, big, [](const StateId&) { return true; }), Error);
}

TEST(Auxiliary, ThetaBelow) {
  ValueFunction v;
  v.set("a", 0.04);
  v.set("b", 0.05);
  auto theta = thetaBelow(v, 0.05);
  EXPECT_TRUE(theta("a"));
  EXPECT_FALSE(theta("b"));
}

TEST(SwapRoles, NegatesValues) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 4; ++trial) {
    auto g = randomTwoPlayer(rng, 4);
    auto a = computeVn(g, "t0", 10), b = computeVn(swapRoles(g), "t0", 10);
    for (int i = 0; i < 4; ++i) {
      StateId x = "t" + std::to_string(i);
      if (a.explored().find(x) < 0) continue;
      EXPECT_NEAR(a.value(10, x), -b.value(10, x), 1e-9);
    }
  }
}

TEST(Synthesis, LadderPipeline) {
  const auto& s = ladderSynthesis();
  // val [[1, -1], [v/2, v/2 + 1/4]] = v at high gives 1/5; player 2 pushes at low.
  EXPECT_NEAR(s.v.at("high"), 0.2, 5e-3);
  EXPECT_NEAR(s.v.at("low"), 0.0, 5e-3);
  EXPECT_TRUE(s.gammaEps->stopped("low"));
  EXPECT_FALSE(s.gammaEps->stopped("high"));
  ASSERT_TRUE(s.cert.ok());
  EXPECT_EQ(s.cert.n.count("low"), 0u);
  EXPECT_GE(s.l3, s.lStar);
  EXPECT_EQ(s.N1, static_cast<long>(s.n0) * s.l3);
  EXPECT_GE(s.sStar.minSlack(), -1e-5);
  EXPECT_LE(std::pow(1 - s.M, s.lStar), s.eps * (1 + 1e-12));
}

TEST(SigmaBar, PhasesFollowThresholds) {
  const auto& s = ladderSynthesis();
  const auto& sigma = *s.sigma;
  auto hi = sigma.start("high");
  ASSERT_EQ(hi.size(), static_cast<std::size_t>(s.cert.n.at("high")));
  double total = 0;
  for (const auto& [node, p] : hi) {
    EXPECT_EQ(node.phase, 1);
    EXPECT_EQ(node.phaseIndex, 1);
    EXPECT_EQ(node.j, 1);
    EXPECT_NEAR(p, 1.0 / hi.size(), 1e-15);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  auto lo = sigma.start("low");
  ASSERT_EQ(lo.size(), 1u);
  EXPECT_EQ(lo[0].first.phase, 0);

  // Even phase at low plays s*; moving to high opens the second phase.
  Node even = lo[0].first;
  EXPECT_EQ(sigma.act(even, "low"), s.sStar.action("low"));
  auto up = sigma.advance(even, "high");
  EXPECT_EQ(up.front().first.phase, 1);
  EXPECT_EQ(up.front().first.phaseIndex, 2);
  // Falling to low ends the odd phase.
  auto down = sigma.advance(hi.front().first, "low");
  ASSERT_EQ(down.size(), 1u);
  EXPECT_EQ(down[0].first.phase, 0);
  EXPECT_EQ(down[0].first.phaseIndex, 2);
  EXPECT_TRUE(sigma.act(even, "win").empty());
}

TEST(SigmaBar, BlockReanchorsAfterK) {
  const auto& s = ladderSynthesis();
  const auto& sigma = *s.sigma;
  int n = s.cert.n.at("high");
  Node node = sigma.start("high").front().first;  // k = 1
  ASSERT_EQ(node.k, 1);
  EXPECT_EQ(sigma.act(node, "high"), s.profiles->action(n, "high"));
  auto next = sigma.advance(node, "high");
  EXPECT_EQ(next.size(), static_cast<std::size_t>(n));
  Node longBlock = sigma.start("high").back().first;  // k = n
  auto cont = sigma.advance(longBlock, "high");
  ASSERT_EQ(cont.size(), 1u);
  EXPECT_EQ(cont[0].first.j, 2);
  EXPECT_EQ(sigma.act(cont[0].first, "high"), s.profiles->action(n - 1, "high"));
}

TEST(SigmaBar, BlindToActions) {
  const auto& s = ladderSynthesis();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    History h1, h2;
    std::vector<double> us;
    for (int t = 0; t < 30; ++t) {
      h1.states.push_back(u(rng) < 0.6 ? "high" : "low");
      us.push_back(u(rng));
    }
    h2.states = h1.states;
    for (int t = 0; t + 1 < 30; ++t) {
      h1.actionsA.push_back(0);
      h1.actionsB.push_back(0);
      h2.actionsA.push_back(static_cast<int>(rng() % 2));
      h2.actionsB.push_back(static_cast<int>(rng() % 2));
    }
    EXPECT_EQ(replay(*s.sigma, h1, us), replay(*s.sigma, h2, us));
  }
}

TEST(SigmaBar, DescribeIsDeterministic) {
  const auto& s = ladderSynthesis();
  auto a = describe(*s.sigma), b = describe(*s.sigma);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("mode = alternating"), std::string::npos);
  EXPECT_NE(a.find("[s_star]"), std::string::npos);
  EXPECT_NE(describe(*s.block).find("mode = block-terminating"), std::string::npos);
}

TEST(SigmaBar, RejectsBadInputs) {
  const auto& s = ladderSynthesis();
  EXPECT_THROW(sigmaBar(ladderGame(), s.v, 0.7, s.block, s.sStar), Error);
  EXPECT_THROW(sigmaBar(ladderGame(), s.v, 0.05, s.sigma, s.sStar), Error);
  Certificate bad;
  bad.failures.push_back("x");
  EXPECT_THROW(blockStrategy(s.gammaEps, bad, s.profiles), Error);
}

TEST(StoppingTime, SingleStage) {
  auto g = quittingSimple();
  StateHistoryStrategy sigma = [](const std::vector<StateId>&) { return Mixed{0.5, 0.5}; };
  auto t = pureStoppingTime(*g, sigma, "s", 1);
  EXPECT_TRUE(t.stops({"s"}));
  EXPECT_EQ(t.stopValue, 0);
  EXPECT_EQ(t.averageValue, 0);
}

TEST(StoppingTime, ChainStopsAtTheEnd) {
  auto g = chain();
  StateHistoryStrategy sigma = [](const std::vector<StateId>&) { return Mixed{1.0}; };
  auto t = pureStoppingTime(*g, sigma, "a", 3);
  EXPECT_FALSE(t.stops({"a"}));
  EXPECT_FALSE(t.stops({"a", "b"}));
  EXPECT_EQ(t.stage({"a", "b", "c"}), 3);
  EXPECT_DOUBLE_EQ(t.stopValue, 1.0);
  EXPECT_DOUBLE_EQ(t.averageValue, 1.0 / 3);
}

// Against s* on quitting_simple the only non-absorbed prefix at stage t is
// (s, ..., s), so player 2's pure strategies are the 2^(n-1) block/allow
// patterns along it. Enumerating them gives both minima exactly.
TEST(StoppingTime, StopValueDominatesAverageOnQuitting) {
  auto g = quittingSimple();
  StateHistoryStrategy sigma = [](const std::vector<StateId>& h) {
    return h.size() % 2 ? Mixed{0.2, 0.8} : Mixed{0.5, 0.5};
  };
  for (int n = 1; n <= 6; ++n) {
    auto t = pureStoppingTime(*g, sigma, "s", n);
    double minAvg = 1e300, minStop = 1e300;
    for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
      // Walk the distribution over (alive at s, absorbed payoff) stage by stage.
      double alive = 1, avg = 0, stopped = 0;
      std::map<double, double> absorbed;  // payoff -> mass
      std::vector<StateId> prefix{"s"};
      bool aliveStopped = false;
      for (int stage = 1; stage <= n; ++stage) {
        for (const auto& [pay, mass] : absorbed) avg += pay * mass;
        if (!aliveStopped && t.stops(prefix)) {
          aliveStopped = true;  // g(s) = 0
        }
        if (stage == n) break;
        int b = (mask >> (stage - 1)) & 1;
        Mixed m = sigma(prefix);
        double quit = m[0] * alive, cont = m[1] * alive;
        double toS = cont * 0.5;
        std::map<double, double> fresh;
        if (b == 0) {
          fresh[1] += quit;
          fresh[0] += cont * 0.5;
        } else {
          fresh[-1] += quit;
          fresh[1] += cont * 0.5;
        }
        for (const auto& [pay, mass] : fresh) {
          absorbed[pay] += mass;
          if (!aliveStopped) {
            // The stopping rule at an absorbed prefix always stops there.
            stopped += pay * mass;
          }
        }
        alive = toS;
        prefix.push_back("s");
      }
      minAvg = std::min(minAvg, avg / n);
      minStop = std::min(minStop, stopped);
    }
    EXPECT_NEAR(t.averageValue, minAvg, 1e-12) << n;
    EXPECT_NEAR(t.stopValue, minStop, 1e-12) << n;
    EXPECT_GE(t.stopValue, t.averageValue - 1e-12) << n;
  }
}

TEST(ReduceTau, StateLawIsExact) {
  auto g = ladderGame();
  using Q = Rational;
  std::function<std::vector<Q>(const std::vector<StateId>&)> sigma =
      [](const std::vector<StateId>& h) -> std::vector<Q> {
    if (h.back() == "high") return {Q(1, 3), Q(2, 3)};
    return {Q(1)};
  };
  // Depends on past actions of both players and the stage.
  std::function<std::vector<Q>(const History&)> tau = [](const History& h) -> std::vector<Q> {
    if (h.actionsA.empty()) return {Q(1, 2), Q(1, 2)};
    if (h.actionsA.back() == 1 && h.actionsB.back() == 0) return {Q(1, 5), Q(4, 5)};
    if (h.states.size() % 2) return {Q(3, 4), Q(1, 4)};
    return {Q(1), Q(0)};
  };
  const int horizon = 6;
  auto reduced = reduceTau<Q>(*g, sigma, tau, "high", horizon);
  std::function<std::vector<Q>(const History&)> tauHat = [&](const History& h) {
    return reduced.table.at(h.states);
  };
  auto lawA = stateLaw<Q>(*g, sigma, tau, "high", horizon);
  auto lawB = stateLaw<Q>(*g, sigma, tauHat, "high", horizon);
  EXPECT_EQ(lawA, lawB);
  Q total = 0;
  for (const auto& [h, p] : lawA)
    if (h.size() == horizon) total += p;
  EXPECT_EQ(total, Q(1));
  // tau itself is not a state-prefix strategy, so the table has mixed rows.
  bool nontrivial = false;
  for (const auto& [h, row] : reduced.table)
    if (row[0] != Q(1, 2) && row[0] != Q(1, 5) && row[0] != Q(3, 4) && row[0] != Q(1))
      nontrivial = true;
  EXPECT_TRUE(nontrivial);
}
