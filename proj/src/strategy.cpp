#include "rgame/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rgame/matrix.hpp"

namespace rgame {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double cellValue(const ExploredGame& e, std::size_t c, const std::vector<double>& f) {
  double v = 0;
  for (std::size_t k = e.cellSucc[c]; k < e.cellSucc[c + 1]; ++k)
    v += e.succProb[k] * f[e.succState[k]];
  return v;
}

double expectation(const Game& g, const StateId& x, int a, int b, const ValueFunction& f) {
  double v = 0;
  for (const auto& o : g.transition(x, a, b)) {
    if (o.prob == 0) continue;
    if (!f.contains(o.state))
      throw MissingValue("target undefined at successor " + o.state + " of state " + x);
    v += toDouble(o.prob) * f.at(o.state);
  }
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string mixedText(const Mixed& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? " " : "") + fmt(m[i]);
  return s;
}

}  // namespace

// ---------------------------------------------------------------- Markov

bool MarkovProfile::has(int k, int s) const {
  if (k < 1 || k > horizon_ || s < 0 || s >= static_cast<int>(explored_->size())) return false;
  if (!explored_->isActive(s)) return false;
  return !std::isnan(table_[k][offset_[s]]);
}

Mixed MarkovProfile::action(int k, int s) const {
  if (!has(k, s))
    throw MissingValue("no profile record for " + std::to_string(k) + " remaining stages at " +
                       (s >= 0 && s < static_cast<int>(explored_->size()) ? explored_->states[s]
                                                                          : std::string("?")));
  std::size_t n = static_cast<std::size_t>(owner_ == 1 ? explored_->nA[s] : explored_->nB[s]);
  const double* p = table_[k].data() + offset_[s];
  return Mixed(p, p + n);
}

Mixed MarkovProfile::action(int k, const StateId& x) const {
  int s = explored_->find(x);
  if (s < 0) throw MissingValue("state " + x + " outside the profile's explored set");
  return action(k, s);
}

std::vector<double> profileGuarantee(const MarkovProfile& p) {
  const auto& e = p.explored();
  std::vector<double> w(e.size(), kNaN);
  for (std::size_t s = 0; s < e.size(); ++s)
    if (e.kind[s] != ExploredGame::Kind::Frontier) w[s] = e.payoff[s];  // W_1 = g
  for (int k = 2; k <= p.horizon(); ++k) {
    std::vector<double> next(e.size(), kNaN);
    for (std::size_t s = 0; s < e.size(); ++s) {
      int si = static_cast<int>(s);
      if (e.kind[s] == ExploredGame::Kind::Absorbing) {
        next[s] = e.payoff[s];
        continue;
      }
      if (!p.has(k, si)) continue;
      Mixed m = p.action(k, si);
      const int nA = e.nA[s], nB = e.nB[s];
      double best = p.owner() == 1 ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
      int replies = p.owner() == 1 ? nB : nA;
      for (int r = 0; r < replies; ++r) {
        double v = 0;
        for (std::size_t i = 0; i < m.size(); ++i) {
          if (m[i] == 0) continue;
          int a = p.owner() == 1 ? static_cast<int>(i) : r;
          int b = p.owner() == 1 ? r : static_cast<int>(i);
          v += m[i] * cellValue(e, e.cellStart[s] + a * nB + b, w);
        }
        best = p.owner() == 1 ? std::min(best, v) : std::max(best, v);
      }
      next[s] = static_cast<double>(k - 1) / k * best;
    }
    w = std::move(next);
  }
  return w;
}

MarkovProfile markovOptimal(const ValueSequence& seq, int n, int owner, double tol) {
  if (owner != 1 && owner != 2) throw Error("owner must be 1 or 2");
  if (!seq.hasProfiles()) throw MissingValue("value sequence was computed without profiles");
  if (n < 1 || n > seq.horizon()) throw Error("profile horizon outside [1, N]");
  const auto& e = seq.explored();
  MarkovProfile p;
  p.explored_ = seq.exploredPtr();
  p.horizon_ = n;
  p.owner_ = owner;
  p.offset_.assign(e.size() + 1, 0);
  for (std::size_t s = 0; s < e.size(); ++s)
    p.offset_[s + 1] = p.offset_[s] + (owner == 1 ? e.nA[s] : e.nB[s]);
  p.table_.assign(n + 1, {});
  for (int k = 1; k <= n; ++k) {
    p.table_[k].assign(p.offset_.back(), kNaN);
    for (std::size_t s = 0; s < e.size(); ++s) {
      int si = static_cast<int>(s);
      if (!e.isActive(si) || !seq.valid(k, si)) continue;
      auto src = owner == 1 ? seq.rowProfile(k, si) : seq.colProfile(k, si);
      std::copy(src.begin(), src.end(), p.table_[k].begin() + p.offset_[s]);
    }
  }
  auto w = profileGuarantee(p);
  for (std::size_t s = 0; s < e.size(); ++s) {
    int si = static_cast<int>(s);
    if (!e.isActive(si) || !seq.valid(n, si) || std::isnan(w[s])) continue;
    double gap = w[s] - seq.value(n, si);
    if (owner == 1 ? gap < -tol : gap > tol)
      throw SolverError("Markov profile misses v_" + std::to_string(n) + " at " + e.states[s] +
                        " by " + fmt(std::fabs(gap)));
  }
  return p;
}

// ---------------------------------------------------------------- s*

Mixed StationaryProfile::action(const StateId& x) const {
  auto it = entries.find(x);
  if (it == entries.end()) throw MissingValue("s* undefined at " + x);
  return it->second.action;
}

double StationaryProfile::minSlack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [x, e] : entries) m = std::min(m, e.slack);
  return m;
}

StationaryProfile sStar(const Game& game, const ValueFunction& v, double tol,
                        const std::vector<StateId>& states) {
  std::vector<StateId> todo = states;
  if (todo.empty())
    for (const auto& [x, val] : v.values())
      if (game.contains(x) && !game.isAbsorbing(x)) todo.push_back(x);
  StationaryProfile out;
  out.tol = tol;
  for (const auto& x : todo) {
    if (game.isAbsorbing(x)) continue;
    int nA = static_cast<int>(game.actionsA(x).size());
    int nB = static_cast<int>(game.actionsB(x).size());
    MatrixGame m(nA, nB);
    for (int a = 0; a < nA; ++a)
      for (int b = 0; b < nB; ++b) m(a, b) = expectation(game, x, a, b, v);
    auto sol = solve(m);
    StationaryProfile::Entry en;
    en.action = sol.rowStrategy;
    en.oneShotValue = sol.value;
    double worst = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nB; ++b) {
      double pay = 0;
      for (int a = 0; a < nA; ++a) pay += en.action[a] * m(a, b);
      worst = std::min(worst, pay);
    }
    en.slack = worst - v.at(x);
    if (en.slack < -tol) out.violations.push_back(x);
    out.entries[x] = std::move(en);
  }
  return out;
}

// ---------------------------------------------------------------- certificate

int Certificate::maxN() const {
  int m = 0;
  for (const auto& [x, k] : n) m = std::max(m, k);
  return m;
}

Certificate positiveCertificate(const ValueSequence& seq, double M, int n0,
                                const ValueFunction* target, double slack) {
  if (n0 < 1 || n0 > seq.horizon()) throw Error("n0 outside [1, N]");
  if (!seq.hasHistory()) throw Error("certificate needs the full value history");
  Certificate c;
  c.M = M;
  c.n0 = n0;
  const auto& e = seq.explored();
  for (std::size_t s = 0; s < e.size(); ++s) {
    int si = static_cast<int>(s);
    if (!e.isActive(si) || !seq.valid(n0, si)) continue;
    double threshold = M;
    if (target) threshold = std::max(M, target->at(e.states[s]) - slack);
    int found = 0;
    for (int n = 1; n <= n0 && !found; ++n)
      if (seq.lower(n, si) >= threshold) found = n;
    if (found) c.n[e.states[s]] = found;
    else c.failures.push_back(e.states[s]);
  }
  return c;
}

int blocksNeeded(double M, double delta) {
  if (!(M > 0) || !(delta > 0)) throw Error("blocksNeeded needs M > 0 and delta > 0");
  if (M >= 1 || delta >= 1) return 1;
  return std::max(1, static_cast<int>(std::ceil(std::log(delta) / std::log(1 - M) - 1e-12)));
}

// ---------------------------------------------------------------- adapters

namespace {

class MarkovStrategy : public StateStrategy {
 public:
  explicit MarkovStrategy(std::shared_ptr<const MarkovProfile> p) : p_(std::move(p)) {}
  std::string id() const override { return "markov-" + std::to_string(p_->horizon()); }
  int owner() const override { return p_->owner(); }
  NodeDist start(const StateId&) const override {
    Node n;
    n.t = 1;
    return {{n, 1.0}};
  }
  Mixed act(const Node& node, const StateId& x) const override {
    int s = p_->explored().find(x);
    if (s >= 0 && p_->explored().kind[s] == ExploredGame::Kind::Absorbing) return {};
    return p_->action(std::max(1, p_->horizon() - node.t + 1), x);
  }
  NodeDist advance(const Node& node, const StateId&) const override {
    Node n = node;
    ++n.t;
    return {{n, 1.0}};
  }

 private:
  std::shared_ptr<const MarkovProfile> p_;
};

class StationaryStrategy : public StateStrategy {
 public:
  StationaryStrategy(GamePtr g, std::shared_ptr<const StationaryProfile> p, int owner)
      : g_(std::move(g)), p_(std::move(p)), owner_(owner) {}
  std::string id() const override { return "stationary"; }
  int owner() const override { return owner_; }
  NodeDist start(const StateId&) const override { return {{Node{}, 1.0}}; }
  Mixed act(const Node&, const StateId& x) const override {
    if (g_->isAbsorbing(x)) return {};
    return p_->action(x);
  }
  NodeDist advance(const Node& node, const StateId&) const override { return {{node, 1.0}}; }

 private:
  GamePtr g_;
  std::shared_ptr<const StationaryProfile> p_;
  int owner_;
};

}  // namespace

StrategyPtr markovStrategy(std::shared_ptr<const MarkovProfile> profile) {
  return std::make_shared<MarkovStrategy>(std::move(profile));
}

StrategyPtr stationaryStrategy(GamePtr game, std::shared_ptr<const StationaryProfile> profile,
                               int owner) {
  return std::make_shared<StationaryStrategy>(std::move(game), std::move(profile), owner);
}

// ---------------------------------------------------------------- concatenation

double ConcatenatedStrategy::target(const StateId& x) const {
  if (!target_) throw Error("block strategy has no target function");
  return target_->at(x);
}

NodeDist ConcatenatedStrategy::anchorAt(Node node, const StateId& x) const {
  node.anchor = x;
  node.j = 1;
  node.k = 0;
  if (blockGame_->isAbsorbing(x)) return {{node, 1.0}};
  auto it = cert_->n.find(x);
  if (it == cert_->n.end()) throw Error("anchor " + x + " outside the certificate domain");
  NodeDist d;
  for (int k = 1; k <= it->second; ++k) {
    node.k = k;
    d.emplace_back(node, 1.0 / it->second);
  }
  return d;
}

NodeDist ConcatenatedStrategy::start(const StateId& x1) const {
  Node n;
  n.phaseIndex = 1;
  if (mode_ == Mode::BlockTerminating || target(x1) > 2 * eps_) {
    n.phase = 1;
    return anchorAt(n, x1);
  }
  return {{n, 1.0}};
}

Mixed ConcatenatedStrategy::act(const Node& node, const StateId& x) const {
  if (game_->isAbsorbing(x)) return {};
  if (mode_ == Mode::Alternating && node.phase == 0) return sStar_->action(x);
  if (node.k == 0) throw Error("block strategy has no live block at " + x);
  int remaining = cert_->n.at(node.anchor) - node.j + 1;
  return profiles_->action(remaining, x);
}

NodeDist ConcatenatedStrategy::advance(const Node& node, const StateId& next) const {
  if (mode_ == Mode::Alternating) {
    double v = target(next);
    if (node.phase == 0) {
      if (!(v > 2 * eps_)) return {{node, 1.0}};
      Node n;
      n.phase = 1;
      n.phaseIndex = node.phaseIndex + 1;
      return anchorAt(n, next);
    }
    if (v < eps_) {
      Node n;
      n.phaseIndex = node.phaseIndex + 1;
      return {{n, 1.0}};
    }
  }
  if (blockGame_->isAbsorbing(next) || node.k == 0) return {{node, 1.0}};
  if (node.j + 1 > node.k) return anchorAt(node, next);
  Node n = node;
  ++n.j;
  return {{n, 1.0}};
}

std::shared_ptr<ConcatenatedStrategy> blockStrategy(GamePtr game, Certificate cert,
                                                    std::shared_ptr<const MarkovProfile> profiles) {
  if (!cert.ok()) throw Error("certificate failed at " + cert.failures.front());
  if (!profiles || profiles->horizon() < cert.maxN())
    throw Error("profiles shorter than the certificate's largest n(x)");
  if (profiles->owner() != 1) throw Error("block strategy needs player-1 profiles");
  auto s = std::make_shared<ConcatenatedStrategy>();
  s->mode_ = ConcatenatedStrategy::Mode::BlockTerminating;
  s->id_ = "block";
  s->game_ = game;
  s->blockGame_ = game;
  s->cert_ = std::make_shared<const Certificate>(std::move(cert));
  s->profiles_ = std::move(profiles);
  return s;
}

std::shared_ptr<ConcatenatedStrategy> sigmaBar(GamePtr game, const ValueFunction& v, double eps,
                                               std::shared_ptr<const ConcatenatedStrategy> block,
                                               StationaryProfile sStarProfile) {
  if (!(eps > 0 && eps <= 0.5)) throw Error("eps must lie in (0, 1/2]");
  if (!block || block->mode() != ConcatenatedStrategy::Mode::BlockTerminating)
    throw Error("sigma-bar needs a block-terminating strategy on Gamma^eps");
  auto s = std::make_shared<ConcatenatedStrategy>();
  s->mode_ = ConcatenatedStrategy::Mode::Alternating;
  s->id_ = "sigma-bar";
  s->game_ = std::move(game);
  s->blockGame_ = block->blockGame_;
  s->cert_ = block->cert_;
  s->profiles_ = block->profiles_;
  s->target_ = std::make_shared<const ValueFunction>(v);
  s->sStar_ = std::make_shared<const StationaryProfile>(std::move(sStarProfile));
  s->eps_ = eps;
  return s;
}

// ---------------------------------------------------------------- Gamma^theta

AuxiliaryGame::AuxiliaryGame(GamePtr base, ValueFunction v,
                             std::function<bool(const StateId&)> theta)
    : base_(std::move(base)), v_(std::move(v)), theta_(std::move(theta)) {
  double bound = toDouble(base_->payoffBound());
  for (const auto& [x, val] : v_.values())
    if (std::fabs(val) > bound)
      throw Error("target value " + fmt(val) + " at " + x + " out of [-" + fmt(bound) + "," +
                  fmt(bound) + "]");
}

bool AuxiliaryGame::stopped(const StateId& x) const {
  return base_->contains(x) && !base_->isAbsorbing(x) && theta_(x);
}

bool AuxiliaryGame::isAbsorbing(const StateId& x) const {
  return base_->isAbsorbing(x) || theta_(x);
}

Rational AuxiliaryGame::payoff(const StateId& x) const {
  if (base_->isAbsorbing(x)) return base_->payoff(x);
  if (theta_(x)) return fromDouble(v_.at(x));
  return 0;
}

std::vector<std::string> AuxiliaryGame::actionsA(const StateId& x) const {
  if (stopped(x)) throw Error("no actions at stopped state " + x);
  return base_->actionsA(x);
}

std::vector<std::string> AuxiliaryGame::actionsB(const StateId& x) const {
  if (stopped(x)) throw Error("no actions at stopped state " + x);
  return base_->actionsB(x);
}

Distribution AuxiliaryGame::transition(const StateId& x, int a, int b) const {
  if (stopped(x)) throw Error("transition from stopped state " + x);
  return base_->transition(x, a, b);
}

std::shared_ptr<AuxiliaryGame> auxiliaryGame(GamePtr base, const ValueFunction& v,
                                             std::function<bool(const StateId&)> theta) {
  return std::make_shared<AuxiliaryGame>(std::move(base), v, std::move(theta));
}

std::function<bool(const StateId&)> thetaBelow(const ValueFunction& v, double eps) {
  return [v, eps](const StateId& x) { return v.at(x) < eps; };
}

namespace {

class SwappedGame : public Game {
 public:
  explicit SwappedGame(GamePtr g) : g_(std::move(g)) {}
  bool contains(const StateId& x) const override { return g_->contains(x); }
  bool isAbsorbing(const StateId& x) const override { return g_->isAbsorbing(x); }
  Rational payoff(const StateId& x) const override { return -g_->payoff(x); }
  std::vector<std::string> actionsA(const StateId& x) const override { return g_->actionsB(x); }
  std::vector<std::string> actionsB(const StateId& x) const override { return g_->actionsA(x); }
  Distribution transition(const StateId& x, int a, int b) const override {
    return g_->transition(x, b, a);
  }
  Rational payoffBound() const override { return g_->payoffBound(); }
  Rational payoffLow() const override { return -g_->payoffHigh(); }
  Rational payoffHigh() const override { return -g_->payoffLow(); }
  std::optional<StateId> initialState() const override { return g_->initialState(); }
  std::string name() const override { return g_->name() + "^swapped"; }

 private:
  GamePtr g_;
};

}  // namespace

GamePtr swapRoles(GamePtr game) { return std::make_shared<SwappedGame>(std::move(game)); }

// ---------------------------------------------------------------- Sigma-hat views

StateHistoryStrategy asStateHistory(std::shared_ptr<const MarkovProfile> p) {
  return [p](const std::vector<StateId>& prefix) -> Mixed {
    const auto& x = prefix.back();
    int s = p->explored().find(x);
    if (s >= 0 && p->explored().kind[s] == ExploredGame::Kind::Absorbing) return {};
    int t = static_cast<int>(prefix.size());
    return p->action(std::max(1, p->horizon() - t + 1), x);
  };
}

StateHistoryStrategy asStateHistory(GamePtr game, std::shared_ptr<const StationaryProfile> sp) {
  return [game, sp](const std::vector<StateId>& prefix) -> Mixed {
    if (game->isAbsorbing(prefix.back())) return {};
    return sp->action(prefix.back());
  };
}

// ------------------------------------------------------ pure stopping time

bool PureStoppingTime::stops(const std::vector<StateId>& prefix) const {
  auto it = decision.find(prefix);
  if (it == decision.end()) throw Error("prefix not reachable within the stopping-time table");
  return it->second;
}

int PureStoppingTime::stage(const std::vector<StateId>& states) const {
  std::vector<StateId> prefix;
  for (std::size_t t = 0; t < states.size() && static_cast<int>(t) < horizon; ++t) {
    prefix.push_back(states[t]);
    if (stops(prefix)) return static_cast<int>(t) + 1;
  }
  throw Error("state sequence ends before the stopping time");
}

namespace {

struct StopSolver {
  const Game& game;
  const StateHistoryStrategy& sigma;
  int n;
  std::map<std::vector<StateId>, double> avgMemo, stopMemo;
  std::map<std::vector<StateId>, bool> decision;

  // Successor law of the current state under sigma(h) and pure b.
  std::vector<std::pair<StateId, double>> successors(const std::vector<StateId>& h, int b) {
    const auto& x = h.back();
    if (game.isAbsorbing(x)) return {{x, 1.0}};
    Mixed s = sigma(h);
    std::vector<std::pair<StateId, double>> out;
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (s[a] == 0) continue;
      for (const auto& o : game.transition(x, static_cast<int>(a), b))
        if (o.prob > 0) out.emplace_back(o.state, s[a] * toDouble(o.prob));
    }
    return out;
  }

  int replies(const StateId& x) {
    return game.isAbsorbing(x) ? 1 : static_cast<int>(game.actionsB(x).size());
  }

  // min over tau of E[(1/m) sum of the next m payoffs], m = n - |h| + 1.
  double average(const std::vector<StateId>& h) {
    if (auto it = avgMemo.find(h); it != avgMemo.end()) return it->second;
    int m = n - static_cast<int>(h.size()) + 1;
    double g = game.isAbsorbing(h.back()) ? toDouble(game.payoff(h.back())) : 0.0;
    double r = m == 1 ? g : g / m + static_cast<double>(m - 1) / m * w(h);
    return avgMemo[h] = r;
  }

  // w_{m-1}(sigma, x): the opponent's best reply against the continuation average.
  double w(const std::vector<StateId>& h) {
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < replies(h.back()); ++b) {
      double v = 0;
      for (const auto& [y, p] : successors(h, b)) {
        auto h2 = h;
        h2.push_back(y);
        v += p * average(h2);
      }
      best = std::min(best, v);
    }
    return best;
  }

  // min over tau of E[g(x_theta)] from h onward.
  double stopped(const std::vector<StateId>& h) {
    if (auto it = stopMemo.find(h); it != stopMemo.end()) return it->second;
    int m = n - static_cast<int>(h.size()) + 1;
    bool stop = m == 1 || 0 >= w(h);
    decision[h] = stop;
    double r;
    if (stop) {
      r = game.isAbsorbing(h.back()) ? toDouble(game.payoff(h.back())) : 0.0;
    } else {
      r = std::numeric_limits<double>::infinity();
      for (int b = 0; b < replies(h.back()); ++b) {
        double v = 0;
        for (const auto& [y, p] : successors(h, b)) {
          auto h2 = h;
          h2.push_back(y);
          v += p * stopped(h2);
        }
        r = std::min(r, v);
      }
    }
    return stopMemo[h] = r;
  }
};

}  // namespace

PureStoppingTime pureStoppingTime(const Game& game, const StateHistoryStrategy& sigma,
                                  const StateId& x1, int n) {
  if (n < 1) throw Error("stopping-time horizon must be >= 1");
  if (!game.contains(x1)) throw Error("unknown initial state " + x1);
  StopSolver solver{game, sigma, n, {}, {}, {}};
  PureStoppingTime out;
  out.horizon = n;
  out.stopValue = solver.stopped({x1});
  out.averageValue = solver.average({x1});
  // Record decisions on every reachable prefix, including those past a stop.
  std::vector<std::vector<StateId>> frontier{{x1}};
  while (!frontier.empty()) {
    auto h = frontier.back();
    frontier.pop_back();
    int m = n - static_cast<int>(h.size()) + 1;
    if (!solver.decision.count(h)) solver.decision[h] = m == 1 || 0 >= solver.w(h);
    if (m == 1) continue;
    for (int b = 0; b < solver.replies(h.back()); ++b)
      for (const auto& [y, p] : solver.successors(h, b)) {
        auto h2 = h;
        h2.push_back(y);
        if (!solver.decision.count(h2)) frontier.push_back(h2);
      }
  }
  out.decision = std::move(solver.decision);
  return out;
}

// --------------------------------------------------- state-history reduction

namespace {

template <class T>
T convertProb(const Rational& r);
template <>
double convertProb<double>(const Rational& r) {
  return toDouble(r);
}
template <>
Rational convertProb<Rational>(const Rational& r) {
  return r;
}

// Calls visit(history, probability) on every positive-probability history
// with 1..horizon states.
template <class T, class Visit>
void enumerate(const Game& game,
               const std::function<std::vector<T>(const std::vector<StateId>&)>& sigma,
               const std::function<std::vector<T>(const History&)>& tau, History& h, const T& p,
               int horizon, Visit& visit) {
  visit(h, p);
  if (static_cast<int>(h.states.size()) >= horizon) return;
  const StateId x = h.states.back();
  if (game.isAbsorbing(x)) {
    h.states.push_back(x);
    h.actionsA.push_back(-1);
    h.actionsB.push_back(-1);
    enumerate(game, sigma, tau, h, p, horizon, visit);
    h.states.pop_back();
    h.actionsA.pop_back();
    h.actionsB.pop_back();
    return;
  }
  auto s = sigma(h.states);
  auto t = tau(h);
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (s[a] == 0) continue;
    for (std::size_t b = 0; b < t.size(); ++b) {
      if (t[b] == 0) continue;
      for (const auto& o : game.transition(x, static_cast<int>(a), static_cast<int>(b))) {
        if (o.prob == 0) continue;
        T q = p * s[a] * t[b] * convertProb<T>(o.prob);
        h.states.push_back(o.state);
        h.actionsA.push_back(static_cast<int>(a));
        h.actionsB.push_back(static_cast<int>(b));
        enumerate(game, sigma, tau, h, q, horizon, visit);
        h.states.pop_back();
        h.actionsA.pop_back();
        h.actionsB.pop_back();
      }
    }
  }
}

}  // namespace

template <class T>
StateLaw<T> stateLaw(const Game& game,
                     const std::function<std::vector<T>(const std::vector<StateId>&)>& sigma,
                     const std::function<std::vector<T>(const History&)>& tau,
                     const StateId& x1, int horizon) {
  StateLaw<T> law;
  History h{{x1}, {}, {}};
  auto visit = [&](const History& hist, const T& p) { law[hist.states] += p; };
  enumerate<T>(game, sigma, tau, h, T(1), horizon, visit);
  return law;
}

template <class T>
ReducedTau<T> reduceTau(const Game& game,
                        const std::function<std::vector<T>(const std::vector<StateId>&)>& sigma,
                        const std::function<std::vector<T>(const History&)>& tau,
                        const StateId& x1, int horizon) {
  std::map<std::vector<StateId>, std::vector<T>> num;
  std::map<std::vector<StateId>, T> den;
  History h{{x1}, {}, {}};
  auto visit = [&](const History& hist, const T& p) {
    if (static_cast<int>(hist.states.size()) >= horizon) return;
    if (game.isAbsorbing(hist.states.back())) return;
    auto t = tau(hist);
    auto& acc = num[hist.states];
    if (acc.empty()) acc.assign(t.size(), T(0));
    for (std::size_t b = 0; b < t.size(); ++b) acc[b] += p * t[b];
    den[hist.states] += p;
  };
  enumerate<T>(game, sigma, tau, h, T(1), horizon, visit);
  ReducedTau<T> out;
  for (auto& [s, acc] : num) {
    const T& d = den[s];
    if (d == 0) continue;
    for (auto& v : acc) v /= d;
    out.table[s] = acc;
  }
  return out;
}

template StateLaw<double> stateLaw<double>(
    const Game&, const std::function<std::vector<double>(const std::vector<StateId>&)>&,
    const std::function<std::vector<double>(const History&)>&, const StateId&, int);
template StateLaw<Rational> stateLaw<Rational>(
    const Game&, const std::function<std::vector<Rational>(const std::vector<StateId>&)>&,
    const std::function<std::vector<Rational>(const History&)>&, const StateId&, int);
template ReducedTau<double> reduceTau<double>(
    const Game&, const std::function<std::vector<double>(const std::vector<StateId>&)>&,
    const std::function<std::vector<double>(const History&)>&, const StateId&, int);
template ReducedTau<Rational> reduceTau<Rational>(
    const Game&, const std::function<std::vector<Rational>(const std::vector<StateId>&)>&,
    const std::function<std::vector<Rational>(const History&)>&, const StateId&, int);

// ---------------------------------------------------------------- audit

namespace {

const Node& sample(const NodeDist& d, double u) {
  double acc = 0;
  for (const auto& [node, p] : d) {
    acc += p;
    if (u < acc) return node;
  }
  return d.back().first;
}

}  // namespace

std::vector<Mixed> replay(const StateStrategy& s, const History& h,
                          const std::vector<double>& uniforms) {
  if (h.states.empty()) return {};
  if (uniforms.size() < h.states.size()) throw Error("replay needs one uniform per stage");
  std::vector<Mixed> out;
  Node node = sample(s.start(h.states[0]), uniforms[0]);
  for (std::size_t t = 0; t < h.states.size(); ++t) {
    out.push_back(s.act(node, h.states[t]));
    if (t + 1 < h.states.size()) node = sample(s.advance(node, h.states[t + 1]), uniforms[t + 1]);
  }
  return out;
}

std::string describe(const ConcatenatedStrategy& s) {
  std::ostringstream o;
  const bool alt = s.mode() == ConcatenatedStrategy::Mode::Alternating;
  o << "[strategy]\n";
  o << "id = " << s.id() << "\n";
  o << "mode = " << (alt ? "alternating" : "block-terminating") << "\n";
  o << "game = " << s.game()->name() << "\n";
  o << "block_game = " << s.blockGame()->name() << "\n";
  if (alt) {
    o << "eps = " << fmt(s.eps()) << "\n";
    o << "odd_when = v > " << fmt(2 * s.eps()) << "\n";
    o << "even_when = v < " << fmt(s.eps()) << "\n";
  }
  const auto& c = s.certificate();
  o << "\n[certificate]\n";
  o << "M = " << fmt(c.M) << "\n";
  o << "n0 = " << c.maxN() << "\n";
  for (const auto& [x, n] : c.n) o << x << " = " << n << "\n";
  if (alt) {
    o << "\n[target]\n";
    for (const auto& [x, v] : s.target().values()) o << x << " = " << fmt(v) << "\n";
    o << "\n[s_star]\n";
    for (const auto& [x, e] : s.stationary().entries)
      o << x << " = " << mixedText(e.action) << "  # slack " << fmt(e.slack) << "\n";
  }
  o << "\n[profiles]\n";
  const auto& p = s.profiles();
  const auto& e = p.explored();
  for (int k = 1; k <= c.maxN(); ++k)
    for (std::size_t st = 0; st < e.size(); ++st)
      if (p.has(k, static_cast<int>(st)))
        o << k << " " << e.states[st] << " = " << mixedText(p.action(k, static_cast<int>(st)))
          << "\n";
  return o.str();
}

// ---------------------------------------------------------------- pipeline

Synthesis synthesize(GamePtr game, const StateId& x0, const SynthesisOptions& opt) {
  if (!(opt.eps > 0 && opt.eps <= 0.5)) throw Error("eps must lie in (0, 1/2]");
  Synthesis out;
  out.eps = opt.eps;
  out.M = opt.eps / 2;
  out.eta = opt.eps / 8;
  out.horizon = opt.horizon;

  DepthPolicy closure;
  closure.stateCap = opt.stateCap;
  auto seq = computeVn(game, x0, opt.horizon, closure);
  if (seq.hasFrontier()) throw Error("synthesis needs a finite reachable closure");
  out.v = estimateLimsup(seq, opt.tailWindow);
  for (int n = opt.horizon - opt.tailWindow + 1; n < opt.horizon; ++n)
    out.tailDrift = std::max(out.tailDrift, seq.drift(n));

  out.gammaEps = auxiliaryGame(game, out.v, thetaBelow(out.v, opt.eps));
  std::vector<StateId> roots;
  for (const auto& [x, val] : out.v.values()) roots.push_back(x);
  DepthPolicy withProfiles = closure;
  withProfiles.recordProfiles = true;
  auto seqEps = computeVn(out.gammaEps, roots, opt.horizon, withProfiles);
  out.cert = positiveCertificate(seqEps, out.M, opt.horizon, &out.v, 4 * out.eta);
  if (!out.cert.ok())
    throw Error("Gamma^eps is not positive-valued within the horizon at " +
                out.cert.failures.front());
  out.n0 = std::max(1, out.cert.maxN());
  out.lStar = blocksNeeded(out.M, opt.eps);
  out.l3 = blocksNeeded(out.M, opt.eps * opt.eps * opt.eps);
  out.N1 = static_cast<long>(out.n0) * out.l3;
  out.profiles = std::make_shared<const MarkovProfile>(markovOptimal(seqEps, out.n0, 1));
  out.block = blockStrategy(out.gammaEps, out.cert, out.profiles);
  out.sStar = sStar(*game, out.v, opt.sStarTol);
  out.sigma = sigmaBar(game, out.v, opt.eps, out.block, out.sStar);
  return out;
}

}  // namespace rgame
