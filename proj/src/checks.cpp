#include "rgame/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "rgame/builtins.hpp"
#include "rgame/matrix.hpp"
#include "rgame/signals.hpp"
#include "rgame/values.hpp"

namespace rgame {

namespace {

using R = Rational;

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Deterministic row: estimate against bound, pass decided by the caller.
CheckRow row(std::string name, double bound, double estimate, bool lowerBound, bool pass,
             std::string note = {}) {
  CheckRow r;
  r.name = std::move(name);
  r.bound = bound;
  r.estimate = estimate;
  r.lowerBound = lowerBound;
  r.pass = pass;
  r.note = std::move(note);
  return r;
}

CheckRow atMost(std::string name, double bound, double estimate, std::string note = {}) {
  return row(std::move(name), bound, estimate, false, estimate <= bound, std::move(note));
}

CheckRow atLeast(std::string name, double bound, double estimate, std::string note = {}) {
  return row(std::move(name), bound, estimate, true, estimate >= bound, std::move(note));
}

bool allPass(const std::vector<CheckRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

GamePtr lattice(long bound) { return std::make_shared<LehrerSorinGame>(bound); }

// ------------------------------------------------------------ lattice game

Criterion counterexampleValues(const CheckConfig& cfg) {
  Criterion c;
  const int N = cfg.lsHorizon;
  DepthPolicy pol;
  pol.mode = DepthPolicy::Mode::Targeted;
  pol.keepHistory = false;
  auto seq = computeVn(lattice(cfg.lsBound), "(0,0)", N, pol, {"(0,0)"});
  double lo = seq.watchedLower(0, N), hi = seq.watchedUpper(0, N);
  c.rows.push_back(atMost("|v_n(0,0) - 1/4|", 0.02, std::fabs(lo - 0.25)));
  c.rows.push_back(atMost("bracket width", 1e-6, hi - lo));
  c.summary = "v_" + std::to_string(N) + "(0,0) in [" + fmt(lo, "%.9f") + ", " + fmt(hi, "%.9f") +
              "], x <= " + std::to_string(cfg.lsBound);
  return c;
}

// Jumping at stage m: +1 from stage m+1 w.p. 1/2, -2 from stage 2m otherwise.
double jumpDiscounted(double lambda) {
  double beta = 1 - lambda, best = 0;
  for (int m = 1; m < 20000; ++m) best = std::max(best, 0.5 * std::pow(beta, m) - std::pow(beta, 2 * m - 1));
  return best;
}

Criterion discountedCounterexample(const CheckConfig& cfg) {
  Criterion c;
  for (double lambda : {0.1, 0.01}) {
    auto d = computeVLambda(lattice(cfg.lsBound), "(0,0)", lambda, 1e-10);
    auto [lo, hi] = d.bracket("(0,0)");
    double target = (2 - lambda) / 16, closed = jumpDiscounted(lambda);
    std::string l = fmt(lambda);
    c.rows.push_back(atMost("|v_l(0,0) - (2-l)/16| l=" + l, 0.01, std::fabs(lo - target),
                            "(2-l)/16 = " + fmt(target)));
    c.rows.push_back(atMost("|v_l(0,0) - max_m jump(m)| l=" + l, 1e-8, std::fabs(lo - closed),
                            "independent closed form"));
    c.rows.push_back(atMost("bracket width l=" + l, 1e-8, hi - lo));
    c.summary += (c.summary.empty() ? "" : "; ") + std::string("v_") + l + "(0,0) = " +
                 fmt(lo, "%.6f") + " vs (2-l)/16 = " + fmt(target, "%.6f");
  }
  return c;
}

Criterion nonUniformWitness(const CheckConfig& cfg) {
  Criterion c;
  const int N = 1000;
  auto g = lattice(cfg.lsBound);
  for (long x : {10L, 100L}) {
    StateId s = latticeState(x, 1);
    auto seq = computeVn(g, s, N);
    double worst = 0;
    for (int n = 1; n <= N; ++n) {
      double expect = n >= x ? -2.0 * (n - x) / n : 0.0;
      worst = std::max(worst, std::fabs(seq.value(n, s) - expect));
    }
    double vx = seq.value(static_cast<int>(x), s);
    c.rows.push_back(row("v_x(x,1) = 0, x=" + std::to_string(x), 0, vx, false, vx == 0.0, "exact"));
    c.rows.push_back(atMost("max_n |v_n(x,1) + 2(n-x)/n|, x=" + std::to_string(x), 1e-9, worst,
                            "n <= " + std::to_string(N)));
  }
  std::size_t prev = 0;
  std::string sizes;
  bool grows = true;
  for (int xbar : {10, 20, 50, 100}) {
    std::vector<StateId> subset;
    for (int x = 0; x <= xbar; ++x) subset.push_back(latticeState(x, 1));
    auto seq = computeVn(g, subset, N);
    std::size_t size = epsilonNet(seq, 0.5, subset).representatives.size();
    grows = grows && size > prev;
    prev = size;
    sizes += (sizes.empty() ? "" : ", ") + std::to_string(xbar) + ":" + std::to_string(size);
  }
  c.rows.push_back(row("eps-net size at eps=0.5 strictly increasing", 0, static_cast<double>(prev),
                       true, grows, "x-range:size " + sizes));
  c.summary = "net sizes " + sizes;
  return c;
}

}  // namespace

std::vector<CheckRow> driftRows(const std::vector<std::string>& builtins, int horizon) {
  std::vector<CheckRow> rows;
  for (const auto& name : builtins) {
    GamePtr g = makeBuiltin(name);
    StateId x0 = g->initialState().value();
    DepthPolicy pol;
    if (name == "lehrer_sorin") {
      pol.mode = DepthPolicy::Mode::Targeted;
      pol.depth = horizon;
    }
    pol.keepHistory = false;
    auto seq = computeVn(g, x0, horizon, pol);
    double ratio = 0;
    for (int n = 1; n < horizon; ++n) ratio = std::max(ratio, seq.drift(n) * (n + 1) / 2);
    rows.push_back(atMost("drift violations " + name, 0,
                          static_cast<double>(seq.driftViolations().size()),
                          "max (n+1)/2 |v_n - v_{n+1}| = " + fmt(ratio) + ", n < " +
                              std::to_string(horizon)));
  }
  return rows;
}

namespace {

Criterion shapleyDrift(const CheckConfig&) {
  Criterion c;
  c.rows = driftRows(builtinGameNames(), 1000);
  long total = 0;
  for (const auto& r : c.rows) total += static_cast<long>(r.estimate);
  c.summary = std::to_string(total) + " violations over " + std::to_string(c.rows.size()) + " games";
  return c;
}

// ------------------------------------------------------------ strategies

Synthesis quitting(double eps) {
  SynthesisOptions opt;
  opt.eps = eps;
  opt.horizon = 1000;
  return synthesize(quittingSimple(), "s", opt);
}

Criterion blockTermination(const CheckConfig& cfg) {
  Criterion c;
  const double eps = 0.1;
  auto s = quitting(eps);
  const long deadline = static_cast<long>(s.n0) * s.lStar;
  SimOptions opt;
  opt.horizon = deadline;
  opt.runs = cfg.runs;
  opt.seed = cfg.seed;
  double worst = 1;
  for (const auto& spec : adversaryMenu()) {
    auto adv = makeAdversary(spec, s.gammaEps, s.block, s.v, "s");
    auto st = collectStats(s.gammaEps, "s", automatonAgent(s.block), adv, nullptr, opt);
    auto e = st.absorbedBy(deadline);
    worst = std::min(worst, e.mean);
    auto r = lowerCheck("P(rho <= n0 l*) vs " + spec.name(), 1 - eps, e, 3);
    r.note = std::to_string(cfg.runs) + " runs";
    c.rows.push_back(r);
  }
  c.summary = "n0 = " + std::to_string(s.n0) + ", l* = " + std::to_string(s.lStar) +
              ", min P = " + fmt(worst) + " vs 1 - eps = " + fmt(1 - eps);
  return c;
}

Criterion sStarSlack(const CheckConfig&) {
  Criterion c;
  auto s = quitting(0.1);
  auto g = quittingSimple();
  c.rows.push_back(atMost("tail drift of v", 1e-6, s.tailDrift));
  c.rows.push_back(atLeast("min slack (library)", -1e-5, s.sStar.minSlack()));
  // Slack recomputed from the kernel against every pure b.
  double worst = 1e300;
  for (const auto& [x, entry] : s.sStar.entries) {
    if (g->isAbsorbing(x)) continue;
    for (int b = 0; b < static_cast<int>(g->actionsB(x).size()); ++b) {
      double ev = 0;
      for (int a = 0; a < static_cast<int>(entry.action.size()); ++a)
        for (const auto& o : g->transition(x, a, b)) ev += entry.action[a] * o.prob.get_d() * s.v.at(o.state);
      worst = std::min(worst, ev - s.v.at(x));
    }
  }
  c.rows.push_back(atLeast("min_x,b E[v(x2)] - v(x1) (recomputed)", -1e-5, worst,
                           std::to_string(s.sStar.entries.size()) + " states"));
  c.summary = "min slack " + fmt(worst) + ", tail drift " + fmt(s.tailDrift);
  return c;
}

struct SigmaBarRuns {
  Synthesis s;
  std::vector<std::pair<std::string, PlayStats>> stats;
};

// Criteria 7 and 8 read the same runs.
const SigmaBarRuns& sigmaBarRuns(const CheckConfig& cfg) {
  static std::map<std::pair<std::uint64_t, int>, SigmaBarRuns> cache;
  auto key = std::make_pair(cfg.seed, cfg.runs);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  SigmaBarRuns out;
  out.s = quitting(0.05);
  GamePtr g = quittingSimple();
  SimOptions opt;
  opt.horizon = out.s.N1;
  opt.runs = cfg.runs;
  opt.seed = cfg.seed;
  for (const auto& spec : adversaryMenu()) {
    auto adv = makeAdversary(spec, g, out.s.sigma, out.s.v, "s");
    out.stats.push_back({spec.name(), collectStats(g, "s", automatonAgent(out.s.sigma), adv, &out.s.v, opt)});
  }
  return cache.emplace(key, std::move(out)).first->second;
}

Criterion sigmaBarGuarantee(const CheckConfig& cfg) {
  Criterion c;
  const auto& runs = sigmaBarRuns(cfg);
  const auto& s = runs.s;
  const double eps = s.eps, v1 = s.v.at("s"), bound = v1 - 25 * eps;
  GamePtr g = quittingSimple();
  double worstDp = 1e300;
  int feasible = 0;
  for (int n = 1; n <= BestResponseOptions{}.hMax; ++n) {
    BestResponse br(g, s.sigma, n);
    auto v = br.value("s");
    if (!v) break;
    ++feasible;
    worstDp = std::min(worstDp, *v);
  }
  c.rows.push_back(atLeast("best-response DP min over n <= " + std::to_string(feasible), bound, worstDp,
                           "exact, v(x1) = " + fmt(v1)));
  double worstMc = 1e300;
  for (const auto& [name, st] : runs.stats) {
    auto r = guaranteeCheck(st, v1, eps);
    r.name += " vs " + name;
    r.note = "n = N1 = " + std::to_string(s.N1);
    worstMc = std::min(worstMc, st.gamma.mean);
    c.rows.push_back(r);
  }
  c.summary = "v(x1) - 25 eps = " + fmt(bound) + ", DP min " + fmt(worstDp) + ", MC min " + fmt(worstMc);
  return c;
}

Criterion phaseBounds(const CheckConfig& cfg) {
  Criterion c;
  const auto& runs = sigmaBarRuns(cfg);
  const double eps = runs.s.eps;
  double maxN = 0, maxFreq = 0;
  for (const auto& [name, st] : runs.stats) {
    auto u = upcrossingCheck(st, eps);
    u.name += " vs " + name;
    auto f = phaseFrequencyCheck(st, eps);
    f.name += " vs " + name;
    c.rows.push_back(u);
    c.rows.push_back(f);
    for (auto& r : submartingaleCheck(st, eps)) {
      r.name += " vs " + name;
      c.rows.push_back(r);
    }
    maxN = std::max(maxN, st.upcrossings.mean);
    maxFreq = std::max(maxFreq, st.oddFrequency.mean);
  }
  c.summary = "max E[N] = " + fmt(maxN) + " (bound " + fmt(1 / (eps - eps * eps)) +
              "), max odd frequency " + fmt(maxFreq) + " (bound " + fmt(5 * eps) + ")";
  return c;
}

// min over player 2 of E[g(x_theta)] and E[(1/n) sum g(x_t)], by walking the
// full tree of states and action pairs.
struct TreeValues {
  double stop, average;
};

TreeValues treeValues(const Game& g, const StateHistoryStrategy& sigma, const PureStoppingTime& theta,
                      std::vector<StateId>& prefix, int n, bool stopped) {
  const StateId x = prefix.back();  // prefix grows below
  const int m = static_cast<int>(prefix.size());
  double gx = g.isAbsorbing(x) ? g.payoff(x).get_d() : 0.0;
  bool stopNow = !stopped && theta.stops(prefix);
  double stopHere = stopNow ? gx : 0.0;
  stopped = stopped || stopNow;
  if (m == n) return {stopHere, gx / n};
  if (g.isAbsorbing(x)) {
    prefix.push_back(x);
    auto t = treeValues(g, sigma, theta, prefix, n, stopped);
    prefix.pop_back();
    return {stopHere + t.stop, gx / n + t.average};
  }
  Mixed a = sigma(prefix);
  const int nb = static_cast<int>(g.actionsB(x).size());
  double bestStop = 1e300, bestAvg = 1e300;
  for (int b = 0; b < nb; ++b) {
    double st = 0, av = 0;
    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
      if (a[i] == 0) continue;
      for (const auto& o : g.transition(x, i, b)) {
        prefix.push_back(o.state);
        auto t = treeValues(g, sigma, theta, prefix, n, stopped);
        prefix.pop_back();
        st += a[i] * o.prob.get_d() * t.stop;
        av += a[i] * o.prob.get_d() * t.average;
      }
    }
    bestStop = std::min(bestStop, st);
    bestAvg = std::min(bestAvg, av);
  }
  return {stopHere + bestStop, gx / n + bestAvg};
}

Criterion pureStopping(const CheckConfig&) {
  Criterion c;
  double worstGap = 1e300, worstDiff = 0;
  int cases = 0;
  for (const auto& name : builtinGameNames()) {
    GamePtr g = name == "lehrer_sorin" ? lattice(20) : makeBuiltin(name);
    StateId x1 = g->initialState().value();
    for (int n = 1; n <= 6; ++n) {
      DepthPolicy pol;
      pol.recordProfiles = true;
      auto seq = computeVn(g, x1, n, pol);
      auto profile = std::make_shared<const MarkovProfile>(markovOptimal(seq, n, 1));
      StateHistoryStrategy uniform = [g](const std::vector<StateId>& h) -> Mixed {
        if (g->isAbsorbing(h.back())) return {};
        auto k = g->actionsA(h.back()).size();
        return Mixed(k, 1.0 / k);
      };
      for (const auto& sigma : {asStateHistory(profile), uniform}) {
        auto theta = pureStoppingTime(*g, sigma, x1, n);
        std::vector<StateId> prefix{x1};
        auto t = treeValues(*g, sigma, theta, prefix, n, false);
        worstDiff = std::max({worstDiff, std::fabs(t.stop - theta.stopValue),
                              std::fabs(t.average - theta.averageValue)});
        worstGap = std::min(worstGap, t.stop - t.average);
        ++cases;
      }
    }
  }
  c.rows.push_back(atLeast("min E[g(x_theta)] - min (1/n) sum E[g(x_t)]", -1e-9, worstGap,
                           std::to_string(cases) + " cases, n <= 6"));
  c.rows.push_back(atMost("|DP - tree enumeration|", 1e-9, worstDiff));
  c.summary = "min gap " + fmt(worstGap) + " over " + std::to_string(cases) + " (game, n, sigma)";
  return c;
}

Criterion matrixOracle(const CheckConfig& cfg) {
  Criterion c;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  for (int t = 0; t < cfg.matrixGames; ++t) {
    int m = 2 + (t % 2), n = 2 + (t / 2) % 2;
    MatrixGame g(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = u(rng);
    worst = std::max(worst, std::fabs(solve(g).value - oracleSolve(g, cfg.grid)));
  }
  const double bound = 1e-9 + 2.0 / cfg.grid;
  c.rows.push_back(atMost("max |LP - grid|", bound, worst,
                          std::to_string(cfg.matrixGames) + " games, grid " + std::to_string(cfg.grid)));
  c.summary = "max deviation " + fmt(worst) + " (bound " + fmt(bound) + ")";
  return c;
}

// ------------------------------------------------------------ signals

R weight(std::mt19937_64& rng, int den) {
  R w(static_cast<long>(rng() % den) + 1, den);
  w.canonicalize();
  return w;
}

std::vector<R> simplex(std::mt19937_64& rng, int n, int den) {
  std::vector<R> w;
  R total = 0;
  for (int i = 0; i < n; ++i) {
    w.push_back(weight(rng, den));
    total += w.back();
  }
  for (auto& v : w) v /= total;
  return w;
}

SecondOrderBelief<R> randomSecond(std::mt19937_64& rng, int numK, const std::vector<int>& support,
                                  int maxAtoms) {
  SecondOrderBelief<R> x;
  int n = 1 + static_cast<int>(rng() % maxAtoms);
  auto w = simplex(rng, n, 5);
  for (int a = 0; a < n; ++a) {
    Belief<R> p;
    p.p.assign(numK, 0);
    auto q = simplex(rng, static_cast<int>(support.size()), 7);
    for (std::size_t s = 0; s < support.size(); ++s) p.p[support[s]] = q[s];
    x.atoms.push_back({p, w[a]});
  }
  canonicalize(x.atoms);
  return x;
}

std::vector<R> hashed(const SignalHistory& h, int n, unsigned long salt) {
  unsigned long seed = salt;
  for (int c : h) seed = seed * 1000003UL + static_cast<unsigned long>(c + 1);
  std::mt19937_64 rng(seed);
  return simplex(rng, n, 4);
}

// Mass of every (h1, h2) pair of length t under (pi, sigma, tau), with the
// state k_t.
struct Play {
  SignalHistory h1, h2;
  int k;
  R prob;
};

std::vector<Play> plays(const SignalGame& g, const Joint<R>& pi, const Strategy1<R>& sigma,
                        const Strategy2<R>& tau, int t) {
  std::vector<Play> cur;
  for (const auto& e : pi.entries) cur.push_back({{e.c}, {e.d}, e.k, e.w});
  for (int s = 1; s < t; ++s) {
    std::vector<Play> next;
    for (const auto& p : cur) {
      auto a = sigma(p.h1), b = tau(p.h2);
      for (int i = 0; i < g.numI(); ++i)
        for (int j = 0; j < g.numJ(); ++j)
          for (const auto& o : g.law(p.k, i, j)) {
            R w = p.prob * a[i] * b[j] * o.w;
            if (w == 0) continue;
            Play q = p;
            q.h1.push_back(o.c);
            q.h2.push_back(o.d);
            q.k = o.k;
            q.prob = w;
            next.push_back(std::move(q));
          }
    }
    cur = std::move(next);
  }
  return cur;
}

// L(P(k_t | h1) | h2) read off the play list.
SecondOrderBelief<R> secondOrderOf(const std::vector<Play>& ps, int numK, const SignalHistory& h2) {
  std::map<SignalHistory, std::vector<R>> byH1;
  R total = 0;
  for (const auto& p : ps)
    if (p.h2 == h2) {
      auto& m = byH1[p.h1];
      m.resize(numK, 0);
      m[p.k] += p.prob;
      total += p.prob;
    }
  SecondOrderBelief<R> x;
  for (auto& [h1, m] : byH1) {
    R mass = 0;
    for (const auto& v : m) mass += v;
    Belief<R> b;
    for (const auto& v : m) b.p.push_back(v / mass);
    x.atoms.push_back({b, mass / total});
  }
  canonicalize(x.atoms);
  return x;
}

// The given games, or the bundled ones when none are given.
std::vector<SignalGamePtr> signalGames(const std::vector<SignalGamePtr>& games = {}) {
  if (!games.empty()) return games;
  std::vector<SignalGamePtr> out;
  for (const auto& name : signalBuiltinNames()) out.push_back(makeSignalBuiltin(name));
  return out;
}

template <class T>
void signalValueRowsFor(const SignalGamePtr& g, int maxN, std::vector<CheckRow>& rows) {
  auto pi = initialLaw<T>(*g);
  auto z = image(pi);
  BeliefGame<T> bg(g);
  // A second law with the same image: every signal split in two halves.
  Joint<T> split{pi.numK, {}};
  for (const auto& e : pi.entries) {
    split.entries.push_back({e.k, 2 * e.c, e.d, e.w / 2});
    split.entries.push_back({e.k, 2 * e.c + 1, e.d, e.w / 2});
  }
  auto canonical = canonicalPi(z, g->numK()).pi;
  bool sameImage = image(split) == z && image(canonical) == z;
  double worstW = 0, worstPhi = 0;
  std::string values;
  for (int n = 1; n <= maxN; ++n) {
    double d = directVn(*g, pi, n);
    double w = beliefValue(bg, z, n);
    worstW = std::max(worstW, std::fabs(w - d));
    worstPhi = std::max({worstPhi, std::fabs(directVn(*g, split, n) - d),
                         std::fabs(directVn(*g, canonical, n) - d)});
    values += (values.empty() ? "" : ", ") + std::string("v_") + std::to_string(n) + " = " + fmt(d, "%.9f");
  }
  rows.push_back(atMost("|w_n(Phi(pi)) - directVn(pi, n)|, " + g->name(), 1e-6, worstW, values));
  rows.push_back(row("|directVn(pi) - directVn(pi')|, same image, " + g->name(), 1e-9, worstPhi, false,
                     sameImage && worstPhi <= 1e-9,
                     sameImage ? "split signals and canonical law" : "images differ"));
}

}  // namespace

std::vector<CheckRow> signalIdentityRows(const CheckConfig& cfg, const std::vector<SignalGamePtr>& games) {
  std::vector<CheckRow> rows;
  std::mt19937_64 rng(cfg.seed);

  const int K = 3;
  std::vector<int> all{0, 1, 2};
  int bad = 0;
  for (int t = 0; t < cfg.imageSamples; ++t) {
    ImageDistribution<R> eta;
    int n = 1 + static_cast<int>(rng() % 3);
    auto w = simplex(rng, n, 5);
    for (int a = 0; a < n; ++a) eta.atoms.push_back({randomSecond(rng, K, all, 3), w[a]});
    canonicalize(eta.atoms);
    if (!(image(canonicalPi(eta, K).pi) == eta)) ++bad;
  }
  rows.push_back(atMost("Phi(canonicalPi(eta)) != eta", 0, bad,
                        std::to_string(cfg.imageSamples) + " random eta, exact"));

  for (const auto& g : signalGames(games)) {
    auto pi = initialLaw<R>(*g);
    Strategy1<R> sigma = [n = g->numI()](const SignalHistory& h) { return hashed(h, n, 9); };
    std::vector<std::vector<Play>> runs;
    for (unsigned long salt : {10UL, 20UL}) {
      Strategy2<R> tau = [n = g->numJ(), salt](const SignalHistory& h) { return hashed(h, n, salt); };
      runs.push_back(plays(*g, pi, sigma, tau, 2));
    }
    std::set<SignalHistory> h2s;
    for (const auto& r : runs)
      for (const auto& p : r) h2s.insert(p.h2);
    int mismatches = 0;
    for (const auto& h2 : h2s) {
      auto x = updateX(*g, pi, sigma, h2);
      for (const auto& r : runs)
        if (!(x == secondOrderOf(r, g->numK(), h2))) ++mismatches;
    }
    rows.push_back(atMost("updateX depends on tau, " + g->name(), 0, mismatches,
                          std::to_string(h2s.size()) + " two-stage h2, two tau"));
  }

  for (const auto& g : signalGames(games)) {
    BeliefGame<R> bg(g);
    std::vector<int> active;
    for (int k = 0; k < g->numK(); ++k)
      if (!g->isAbsorbing(k)) active.push_back(k);
    int fails = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
      auto x = randomSecond(rng, g->numK(), active, 3);
      std::vector<std::vector<R>> a;
      for (std::size_t at = 0; at < x.atoms.size(); ++at) a.push_back(simplex(rng, g->numI(), 4));
      auto b1 = simplex(rng, g->numJ(), 4), b2 = simplex(rng, g->numJ(), 4);
      R lam = weight(rng, 5);
      std::vector<R> mix;
      for (int j = 0; j < g->numJ(); ++j) mix.push_back(lam * b1[j] + (1 - lam) * b2[j]);
      ImageDistribution<R> rhs;
      for (auto [y, w] : bg.transition(x, a, b1).atoms) rhs.atoms.push_back({y, lam * w});
      for (auto [y, w] : bg.transition(x, a, b2).atoms) rhs.atoms.push_back({y, (1 - lam) * w});
      canonicalize(rhs.atoms);
      if (!(bg.transition(x, a, mix) == rhs)) ++fails;
    }
    rows.push_back(atMost("l not linear in b, " + g->name(), 0, fails,
                          std::to_string(trials) + " random (x, a, b, b'), exact"));
  }
  return rows;
}

std::vector<CheckRow> signalValueRows(int maxN, bool exact, const std::vector<SignalGamePtr>& games) {
  std::vector<CheckRow> rows;
  for (const auto& g : signalGames(games)) {
    if (exact) signalValueRowsFor<R>(g, maxN, rows);
    else signalValueRowsFor<double>(g, maxN, rows);
  }
  return rows;
}

std::vector<CheckRow> lipschitzRows(const CheckConfig& cfg, const std::vector<SignalGamePtr>& games) {
  std::vector<CheckRow> rows;
  std::mt19937_64 rng(cfg.seed + 13);
  // Depth 4 is the first where the exact operator differs from the pure
  // lower bound on signal_2x2, and it gives enough reachable pairs.
  const int N = 4;
  for (const auto& g : signalGames(games)) {
    BeliefGame<R> bg(g);
    std::vector<SecondOrderBelief<R>> roots;
    for (const auto& [x, w] : image(initialLaw<R>(*g)).atoms) roots.push_back(x);
    auto vals = beliefValueIteration(bg, roots, N);
    const std::size_t S = vals.states.size();
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    const std::size_t possible = S * (S - 1) / 2;
    const std::size_t want = std::min<std::size_t>(cfg.lipschitzPairs, possible);
    while (pairs.size() < want) {
      std::size_t a = rng() % S, b = rng() % S;
      if (a != b) pairs.insert({std::min(a, b), std::max(a, b)});
    }
    double worst = -1e300;
    for (auto [a, b] : pairs) {
      double d = wasserstein(vals.states[a], vals.states[b]).get_d();
      for (int m = 1; m <= N; ++m) worst = std::max(worst, std::fabs(vals.w[m - 1][a] - vals.w[m - 1][b]) - d);
    }
    rows.push_back(atMost("max |w_n(x) - w_n(y)| - W(x, y), " + g->name(), 1e-9, worst,
                          std::to_string(pairs.size()) + " reachable pairs of " + std::to_string(S) +
                              " states, n <= " + std::to_string(N)));
  }
  return rows;
}

namespace {

Criterion signalIdentities(const CheckConfig& cfg) {
  Criterion c;
  c.rows = signalIdentityRows(cfg);
  long bad = 0;
  for (const auto& r : c.rows) bad += static_cast<long>(r.estimate);
  c.summary = std::to_string(bad) + " exact mismatches";
  return c;
}

Criterion signalValues(const CheckConfig&) {
  Criterion c;
  c.rows = signalValueRows(3);
  double worst = 0;
  for (const auto& r : c.rows) worst = std::max(worst, r.estimate);
  c.summary = "max deviation " + fmt(worst) + ", n <= 3";
  return c;
}

Criterion lipschitz(const CheckConfig& cfg) {
  Criterion c;
  c.rows = lipschitzRows(cfg);
  double worst = -1e300;
  for (const auto& r : c.rows) worst = std::max(worst, r.estimate);
  c.summary = "max excess " + fmt(worst);
  return c;
}

struct Entry {
  const char* name;
  Criterion (*run)(const CheckConfig&);
};

const std::vector<Entry>& table() {
  static const std::vector<Entry> t = {
      {"counterexample v_n(0,0) -> 1/4", counterexampleValues},
      {"discounted v_l(0,0) ~ (2-l)/16", discountedCounterexample},
      {"non-uniform convergence witness", nonUniformWitness},
      {"Shapley drift bound", shapleyDrift},
      {"block strategy termination", blockTermination},
      {"s* slack", sStarSlack},
      {"sigma-bar guarantee v(x1) - 25 eps", sigmaBarGuarantee},
      {"upcrossing and phase bounds", phaseBounds},
      {"pure stopping time", pureStopping},
      {"matrix solver vs grid oracle", matrixOracle},
      {"signal identities", signalIdentities},
      {"belief value agreement", signalValues},
      {"Lipschitz in Wasserstein", lipschitz},
  };
  return t;
}

}  // namespace

std::vector<int> criterionIds() {
  std::vector<int> ids;
  for (int i = 1; i <= static_cast<int>(table().size()); ++i) ids.push_back(i);
  return ids;
}

std::string criterionName(int id) {
  if (id < 1 || id > static_cast<int>(table().size())) throw Error("no criterion " + std::to_string(id));
  return table()[id - 1].name;
}

Criterion runCriterion(int id, const CheckConfig& cfg) {
  Criterion c;
  std::string name = criterionName(id);
  try {
    c = table()[id - 1].run(cfg);
    c.pass = !c.rows.empty() && allPass(c.rows);
  } catch (const std::exception& e) {
    c.pass = false;
    c.summary = std::string("error: ") + e.what();
  }
  c.id = id;
  c.name = name;
  return c;
}

std::string formatCriterion(const Criterion& c) {
  return std::string(c.pass ? "PASS" : "FAIL") + " " + std::to_string(c.id) + " " + c.name + ": " +
         c.summary;
}

}  // namespace rgame
