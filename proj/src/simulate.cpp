#include "rgame/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace rgame {

// ---------------------------------------------------------------- randomness

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t streamId(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double uniformDraw(std::uint64_t seed, std::uint64_t run, std::uint64_t stream,
                   std::uint64_t phaseIndex, std::uint64_t stage, Purpose purpose) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ run);
  h = splitmix(h ^ stream);
  h = splitmix(h ^ phaseIndex);
  h = splitmix(h ^ stage);
  h = splitmix(h ^ static_cast<std::uint64_t>(purpose));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

int sampleIndex(const std::vector<double>& p, double u) {
  double acc = 0;
  int last = -1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    acc += p[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  if (last < 0) throw Error("cannot sample from an empty distribution");
  return last;
}

// ---------------------------------------------------------------- agents

namespace {

const Node& pickNode(const NodeDist& d, double u) {
  double acc = 0;
  for (const auto& [node, p] : d) {
    acc += p;
    if (u < acc) return node;
  }
  return d.back().first;
}

class AutomatonAgent : public Agent {
 public:
  explicit AutomatonAgent(StrategyPtr s) : s_(std::move(s)), stream_(streamId(s_->id())) {}
  std::string id() const override { return s_->id(); }
  int owner() const override { return s_->owner(); }
  void begin(const StateId& x1, const RunContext& ctx) override {
    ctx_ = ctx;
    draw(s_->start(x1), 1);
  }
  Mixed act(int, const StateId& x) override { return s_->act(node_, x); }
  void observe(int t, const StateId&, int, int, const StateId& next) override {
    draw(s_->advance(node_, next), t + 1);
  }
  std::optional<Node> node() const override { return node_; }

 private:
  void draw(const NodeDist& d, int stage) {
    if (d.size() == 1) {
      node_ = d.front().first;
      return;
    }
    node_ = pickNode(d, uniformDraw(ctx_.seed, ctx_.run, stream_ + 7, d.front().first.phaseIndex,
                                    stage, Purpose::Node));
  }
  StrategyPtr s_;
  std::uint64_t stream_;
  RunContext ctx_;
  Node node_;
};

class TableAgent : public Agent {
 public:
  TableAgent(std::string id, int owner, std::shared_ptr<const std::map<StateId, Mixed>> t)
      : id_(std::move(id)), owner_(owner), table_(std::move(t)) {}
  std::string id() const override { return id_; }
  int owner() const override { return owner_; }
  void begin(const StateId&, const RunContext&) override {}
  Mixed act(int, const StateId& x) override {
    auto it = table_->find(x);
    if (it == table_->end()) throw MissingValue(id_ + " has no action at " + x);
    return it->second;
  }
  void observe(int, const StateId&, int, int, const StateId&) override {}

 private:
  std::string id_;
  int owner_;
  std::shared_ptr<const std::map<StateId, Mixed>> table_;
};

class UniformAgent : public Agent {
 public:
  UniformAgent(GamePtr g, int owner) : g_(std::move(g)), owner_(owner) {}
  std::string id() const override { return "uniform"; }
  int owner() const override { return owner_; }
  void begin(const StateId&, const RunContext&) override {}
  Mixed act(int, const StateId& x) override {
    auto n = (owner_ == 1 ? g_->actionsA(x) : g_->actionsB(x)).size();
    return Mixed(n, 1.0 / static_cast<double>(n));
  }
  void observe(int, const StateId&, int, int, const StateId&) override {}

 private:
  GamePtr g_;
  int owner_;
};

class ScheduledStrategy : public StateStrategy {
 public:
  ScheduledStrategy(std::string id, int owner, std::function<Mixed(int, const StateId&)> rule)
      : id_(std::move(id)), owner_(owner), rule_(std::move(rule)) {}
  std::string id() const override { return id_; }
  int owner() const override { return owner_; }
  NodeDist start(const StateId&) const override {
    Node n;
    n.t = 1;
    return {{n, 1.0}};
  }
  Mixed act(const Node& node, const StateId& x) const override { return rule_(node.t, x); }
  NodeDist advance(const Node& node, const StateId&) const override {
    Node n = node;
    ++n.t;
    return {{n, 1.0}};
  }

 private:
  std::string id_;
  int owner_;
  std::function<Mixed(int, const StateId&)> rule_;
};

void checkLegal(const Game& g, const StateId& x, const Mixed& p, int owner, const std::string& who) {
  auto n = (owner == 1 ? g.actionsA(x) : g.actionsB(x)).size();
  double sum = 0;
  bool ok = p.size() == n;
  for (double q : p) {
    if (!(q >= -1e-12)) ok = false;
    sum += q;
  }
  if (!ok || std::fabs(sum - 1) > 1e-9)
    throw Error(who + " emits mass off the legal action set at " + x);
}

}  // namespace

AgentFactory automatonAgent(StrategyPtr strategy) {
  return [strategy] { return std::make_unique<AutomatonAgent>(strategy); };
}

AgentFactory stationaryAgent(std::string id, int owner, std::map<StateId, Mixed> table) {
  auto t = std::make_shared<const std::map<StateId, Mixed>>(std::move(table));
  return [id, owner, t] { return std::make_unique<TableAgent>(id, owner, t); };
}

AgentFactory uniformAgent(GamePtr game, int owner) {
  return [game, owner] { return std::make_unique<UniformAgent>(game, owner); };
}

StrategyPtr scheduledStrategy(std::string id, int owner,
                              std::function<Mixed(int t, const StateId& x)> rule) {
  return std::make_shared<ScheduledStrategy>(std::move(id), owner, std::move(rule));
}

// ---------------------------------------------------------------- play

const StateId& Trajectory::stateAt(long t) const {
  if (t >= 1 && t <= static_cast<long>(states.size())) return states[t - 1];
  if (absorbedAt > 0 && t > 0) return states.back();
  throw Error("stage " + std::to_string(t) + " outside the trajectory");
}

Trajectory play(GamePtr game, const StateId& x1, const AgentFactory& a, const AgentFactory& b,
                long horizon, std::uint64_t seed, std::uint64_t run) {
  if (!game->contains(x1)) throw Error("unknown initial state " + x1);
  Trajectory tr;
  tr.horizon = horizon;
  auto A = a(), B = b();
  if (A->owner() != 1 || B->owner() != 2) throw Error("agents must be player 1 then player 2");
  RunContext ctx{seed, run};
  A->begin(x1, ctx);
  B->begin(x1, ctx);
  const std::uint64_t sa = streamId(A->id()) + 1, sb = streamId(B->id()) + 2;
  auto record = [&](const StateId& x) {
    tr.states.push_back(x);
    auto n = A->node();
    tr.phases.push_back(n ? n->phase : -1);
    tr.phaseIndex.push_back(n ? n->phaseIndex : 0);
  };
  record(x1);
  for (long t = 1;; ++t) {
    const StateId x = tr.states.back();
    if (game->isAbsorbing(x)) {
      tr.absorbedAt = t;
      break;
    }
    if (t > horizon) break;
    Mixed pa = A->act(static_cast<int>(t), x), pb = B->act(static_cast<int>(t), x);
    checkLegal(*game, x, pa, 1, A->id());
    checkLegal(*game, x, pb, 2, B->id());
    auto phA = A->node() ? A->node()->phaseIndex : 0;
    auto phB = B->node() ? B->node()->phaseIndex : 0;
    int ia = sampleIndex(pa, uniformDraw(seed, run, sa, phA, t, Purpose::Action));
    int ib = sampleIndex(pb, uniformDraw(seed, run, sb, phB, t, Purpose::Action));
    auto dist = game->transition(x, ia, ib);
    std::vector<double> q;
    q.reserve(dist.size());
    for (const auto& o : dist) q.push_back(toDouble(o.prob));
    const StateId& next = dist[sampleIndex(q, uniformDraw(seed, run, 0, 0, t, Purpose::Nature))].state;
    A->observe(static_cast<int>(t), x, ia, ib, next);
    B->observe(static_cast<int>(t), x, ia, ib, next);
    tr.actionsA.push_back(ia);
    tr.actionsB.push_back(ib);
    record(next);
  }
  return tr;
}

// ---------------------------------------------------------------- estimates

namespace {

struct Welford {
  long n = 0;
  double mean = 0, m2 = 0;
  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  Estimate done() const {
    Estimate e;
    e.count = n;
    e.mean = mean;
    e.sd = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0;
    return e;
  }
};

double averagePayoff(const Game& g, const Trajectory& tr, long n) {
  if (tr.absorbedAt == 0 || tr.absorbedAt > n) return 0;
  return toDouble(g.payoff(tr.states.back())) * static_cast<double>(n - tr.absorbedAt + 1) /
         static_cast<double>(n);
}

}  // namespace

double Estimate::stderr_() const {
  return count > 0 ? sd / std::sqrt(static_cast<double>(count)) : 0;
}

double Estimate::halfWidth(double level) const {
  return normalQuantile(0.5 + level / 2) * stderr_();
}

double normalQuantile(double p) {
  if (!(p > 0 && p < 1)) throw Error("normal quantile needs p in (0, 1)");
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    double mid = (lo + hi) / 2;
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) lo = mid;
    else hi = mid;
  }
  return (lo + hi) / 2;
}

Estimate estimateGamma(GamePtr game, const StateId& x1, const AgentFactory& a,
                       const AgentFactory& b, long n, int runs, std::uint64_t seed) {
  if (runs < 1) throw Error("estimateGamma needs runs >= 1");
  if (n < 1) throw Error("estimateGamma needs n >= 1");
  Welford w;
  for (int r = 0; r < runs; ++r) w.add(averagePayoff(*game, play(game, x1, a, b, n - 1, seed, r), n));
  return w.done();
}

// ---------------------------------------------------------------- posterior

void NodeFilter::reset(const StateId& x1) { dist_ = s_->start(x1); }

Mixed NodeFilter::marginal(const StateId& x) const {
  Mixed m;
  for (const auto& [node, w] : dist_) {
    Mixed a = s_->act(node, x);
    if (m.empty()) m.assign(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) m[i] += w * a[i];
  }
  return m;
}

NodeDist NodeFilter::next(const NodeDist& prior, const StateId& x, int ownAction,
                          const StateId& y) const {
  std::map<Node, double> acc;
  double total = 0;
  for (const auto& [node, w] : prior) {
    double p = s_->act(node, x).at(ownAction);
    if (p <= 0) continue;
    for (const auto& [n2, q] : s_->advance(node, y)) {
      acc[n2] += w * p * q;
      total += w * p * q;
    }
  }
  NodeDist out;
  if (total <= 0) return out;
  for (const auto& [node, w] : acc)
    if (w / total > 1e-15) out.emplace_back(node, w / total);
  return out;
}

void NodeFilter::update(const StateId& x, int ownAction, const StateId& y) {
  auto d = next(dist_, x, ownAction, y);
  if (d.empty()) throw Error("observed action has zero probability under " + s_->id());
  dist_ = std::move(d);
}

// ---------------------------------------------------------------- best response

namespace {

struct CapHit {};

std::string memoKey(int t, const StateId& x, const NodeDist& d) {
  std::ostringstream o;
  o << t << '|' << x;
  for (const auto& [n, w] : d)
    o << '|' << n.phase << ',' << n.phaseIndex << ',' << n.anchor << ',' << n.j << ',' << n.k
      << ',' << n.t << ':' << std::llround(w * 1e12);
  return o.str();
}

}  // namespace

BestResponse::BestResponse(GamePtr game, StrategyPtr strategy, int horizon,
                           BestResponseOptions opt)
    : game_(std::move(game)), s_(strategy), filter_(strategy), n_(horizon), opt_(opt) {
  if (horizon < 1) throw Error("best-response horizon must be >= 1");
  if (horizon > opt_.hMax)
    throw Error("best-response horizon " + std::to_string(horizon) + " exceeds H_max " +
                std::to_string(opt_.hMax));
}

double BestResponse::actionValue(int t, const StateId& x, const NodeDist& d, int r) {
  const int own = s_->owner();
  Mixed m;
  for (const auto& [node, w] : d) {
    Mixed a = s_->act(node, x);
    if (m.empty()) m.assign(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) m[i] += w * a[i];
  }
  double v = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] <= 0) continue;
    int a = own == 1 ? static_cast<int>(i) : r;
    int b = own == 1 ? r : static_cast<int>(i);
    for (const auto& o : game_->transition(x, a, b)) {
      if (o.prob == 0) continue;
      auto post = filter_.next(d, x, static_cast<int>(i), o.state);
      v += m[i] * toDouble(o.prob) * total(t + 1, o.state, post);
    }
  }
  return v;
}

double BestResponse::total(int t, const StateId& x, const NodeDist& d) {
  if (game_->isAbsorbing(x)) return toDouble(game_->payoff(x)) * (n_ - t + 1);
  if (t >= n_) return 0;
  auto key = memoKey(t, x, d);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  if (memo_.size() >= opt_.infoStateCap) {
    exhausted_ = true;
    throw CapHit{};
  }
  const bool minimize = s_->owner() == 1;
  int replies = static_cast<int>(minimize ? game_->actionsB(x).size() : game_->actionsA(x).size());
  double best = minimize ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
  for (int r = 0; r < replies; ++r) {
    double v = actionValue(t, x, d, r);
    best = minimize ? std::min(best, v) : std::max(best, v);
  }
  return memo_[key] = best;
}

std::optional<double> BestResponse::value(const StateId& x1) {
  try {
    return total(1, x1, s_->start(x1)) / n_;
  } catch (const CapHit&) {
    return std::nullopt;
  }
}

int BestResponse::choose(int t, const StateId& x, const NodeDist& d) {
  t = std::min(t, n_ - 1);
  const bool minimize = s_->owner() == 1;
  int replies = static_cast<int>(minimize ? game_->actionsB(x).size() : game_->actionsA(x).size());
  int best = 0;
  double bestV = 0;
  for (int r = 0; r < replies; ++r) {
    double v = t >= 1 ? actionValue(t, x, d, r) : 0;
    if (r == 0 || (minimize ? v < bestV - 1e-12 : v > bestV + 1e-12)) {
      best = r;
      bestV = v;
    }
  }
  return best;
}

namespace {

class ResponderAgent : public Agent {
 public:
  ResponderAgent(std::shared_ptr<BestResponse> br, GamePtr g, StrategyPtr s)
      : br_(std::move(br)), g_(std::move(g)), filter_(s), own_(s->owner()) {}
  std::string id() const override { return "best-response"; }
  int owner() const override { return own_ == 1 ? 2 : 1; }
  void begin(const StateId& x1, const RunContext&) override { filter_.reset(x1); }
  Mixed act(int t, const StateId& x) override {
    int r = br_->choose(t, x, filter_.dist());
    auto n = (own_ == 1 ? g_->actionsB(x) : g_->actionsA(x)).size();
    Mixed m(n, 0.0);
    m[r] = 1;
    return m;
  }
  void observe(int, const StateId& x, int a, int b, const StateId& next) override {
    filter_.update(x, own_ == 1 ? a : b, next);
  }

 private:
  std::shared_ptr<BestResponse> br_;
  GamePtr g_;
  NodeFilter filter_;
  int own_;
};

}  // namespace

AgentFactory BestResponse::agent() {
  auto self = std::make_shared<BestResponse>(*this);
  GamePtr g = game_;
  StrategyPtr s = s_;
  return [self, g, s] { return std::make_unique<ResponderAgent>(self, g, s); };
}

// ---------------------------------------------------------------- adversaries

std::string AdversarySpec::name() const {
  char buf[48];
  switch (kind) {
    case Kind::Myopic: return "myopic";
    case Kind::Uniform: return "uniform";
    case Kind::Discounted:
      std::snprintf(buf, sizeof buf, "discounted(%g)", lambda);
      return buf;
    case Kind::Window: return "window(" + std::to_string(window) + ")";
  }
  return "?";
}

std::vector<AdversarySpec> adversaryMenu() {
  AdversarySpec my, un, d1, d2, win;
  my.kind = AdversarySpec::Kind::Myopic;
  un.kind = AdversarySpec::Kind::Uniform;
  d1.kind = d2.kind = AdversarySpec::Kind::Discounted;
  d1.lambda = 0.1;
  d2.lambda = 0.01;
  win.kind = AdversarySpec::Kind::Window;
  return {my, un, d1, d2, win};
}

namespace {

// Player 2 agent that looks `depth` stages ahead against player 1's
// posterior: minimizes the payoff over the window plus v at its end.
class LookaheadAgent : public Agent {
 public:
  LookaheadAgent(std::string id, GamePtr g, StrategyPtr p1, std::shared_ptr<const ValueFunction> v,
                 int depth, bool windowPayoff)
      : id_(std::move(id)), g_(std::move(g)), filter_(std::move(p1)), v_(std::move(v)),
        depth_(depth), windowPayoff_(windowPayoff) {}
  std::string id() const override { return id_; }
  int owner() const override { return 2; }
  void begin(const StateId& x1, const RunContext&) override { filter_.reset(x1); }
  Mixed act(int, const StateId& x) override {
    int nB = static_cast<int>(g_->actionsB(x).size());
    int best = 0;
    double bestV = 0;
    for (int b = 0; b < nB; ++b) {
      double v = reply(x, filter_.dist(), b, depth_);
      if (b == 0 || v < bestV - 1e-12) {
        best = b;
        bestV = v;
      }
    }
    Mixed m(nB, 0.0);
    m[best] = 1;
    return m;
  }
  void observe(int, const StateId& x, int a, int, const StateId& next) override {
    filter_.update(x, a, next);
  }

 private:
  double target(const StateId& x) const {
    if (v_->contains(x)) return v_->at(x);
    if (g_->isAbsorbing(x)) return toDouble(g_->payoff(x));
    throw MissingValue("adversary target undefined at " + x);
  }
  double stagePay(const StateId& x) const {
    return windowPayoff_ && g_->isAbsorbing(x) ? toDouble(g_->payoff(x)) : 0.0;
  }
  double look(const StateId& x, const NodeDist& d, int left) const {
    if (left == 0) return target(x);
    if (g_->isAbsorbing(x)) return stagePay(x) * left + target(x);
    int nB = static_cast<int>(g_->actionsB(x).size());
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nB; ++b) best = std::min(best, reply(x, d, b, left));
    return best;
  }
  double reply(const StateId& x, const NodeDist& d, int b, int left) const {
    NodeFilter local = filter_;
    local.setDist(d);
    Mixed m = local.marginal(x);
    double v = 0;
    for (std::size_t a = 0; a < m.size(); ++a) {
      if (m[a] <= 0) continue;
      for (const auto& o : g_->transition(x, static_cast<int>(a), b)) {
        if (o.prob == 0) continue;
        double p = m[a] * toDouble(o.prob);
        if (left == 1) {
          v += p * (stagePay(o.state) + target(o.state));
        } else {
          auto post = filter_.next(d, x, static_cast<int>(a), o.state);
          v += p * (stagePay(o.state) + look(o.state, post, left - 1));
        }
      }
    }
    return v;
  }

  std::string id_;
  GamePtr g_;
  NodeFilter filter_;
  std::shared_ptr<const ValueFunction> v_;
  int depth_;
  bool windowPayoff_;
};

}  // namespace

AgentFactory makeAdversary(const AdversarySpec& spec, GamePtr game, StrategyPtr player1,
                           const ValueFunction& v, const StateId& x1) {
  if (player1->owner() != 1) throw Error("adversaries respond to a player-1 strategy");
  auto vp = std::make_shared<const ValueFunction>(v);
  switch (spec.kind) {
    case AdversarySpec::Kind::Myopic:
      return [=] { return std::make_unique<LookaheadAgent>("myopic", game, player1, vp, 1, false); };
    case AdversarySpec::Kind::Uniform:
      return uniformAgent(game, 2);
    case AdversarySpec::Kind::Window: {
      if (spec.window < 1) throw Error("window adversary needs window >= 1");
      std::string id = spec.name();
      int w = spec.window;
      return [=] { return std::make_unique<LookaheadAgent>(id, game, player1, vp, w, true); };
    }
    case AdversarySpec::Kind::Discounted: {
      auto dv = computeVLambda(game, x1, spec.lambda, 1e-10);
      const auto& e = *dv.explored;
      std::map<StateId, Mixed> table;
      for (std::size_t s = 0; s < e.size(); ++s) {
        if (!e.isActive(static_cast<int>(s))) continue;
        auto sol = solve(oneShotMatrix(e, static_cast<int>(s), dv.lower));
        table[e.states[s]] = sol.colStrategy;
      }
      return stationaryAgent(spec.name(), 2, std::move(table));
    }
  }
  throw Error("unknown adversary kind");
}

// ---------------------------------------------------------------- lemma statistics

Estimate PlayStats::absorbedBy(long m) const {
  long hit = 0;
  for (const auto& [stage, count] : absorption)
    if (stage > 0 && stage <= m) hit += count;
  Estimate e;
  e.count = runs;
  e.mean = runs ? static_cast<double>(hit) / runs : 0;
  e.sd = runs > 1 ? std::sqrt(e.mean * (1 - e.mean) * runs / (runs - 1.0)) : 0;
  return e;
}

PlayStats collectStats(GamePtr game, const StateId& x1, const AgentFactory& a,
                       const AgentFactory& b, const ValueFunction* v, const SimOptions& opt) {
  if (opt.runs < 1 || opt.horizon < 1) throw Error("collectStats needs runs >= 1 and horizon >= 1");
  PlayStats st;
  st.runs = opt.runs;
  st.horizon = opt.horizon;
  st.level = opt.level;
  const long n = opt.horizon;
  Welford gamma, ups, odd;
  std::vector<Welford> inc;
  // Per run: v(x_min(rho,u_l)) for the observed switches, and whether the run absorbed.
  std::vector<std::pair<std::vector<double>, bool>> stopped;
  std::size_t lmax = 1;
  for (int r = 0; r < opt.runs; ++r) {
    Trajectory tr = play(game, x1, a, b, n - 1, opt.seed, static_cast<std::uint64_t>(r));
    const long rho = tr.absorbedAt;
    gamma.add(averagePayoff(*game, tr, n));
    st.absorption[rho] += 1;
    if (rho == 0) ++st.censored;

    std::vector<long> u;
    int prev = 0;
    for (std::size_t t = 0; t < tr.phases.size(); ++t) {
      int ph = std::max(tr.phases[t], 0);
      if (ph != prev) u.push_back(static_cast<long>(t) + 1);
      prev = ph;
    }
    long starts = 0;
    for (std::size_t l = 0; l < u.size(); l += 2) ++starts;
    ups.add(static_cast<double>(starts));

    long oddStages = 0;
    for (std::size_t t = 0; t < tr.phases.size() && static_cast<long>(t) < n; ++t)
      if (tr.phases[t] == 1 && (rho == 0 || static_cast<long>(t) + 1 < rho)) ++oddStages;
    odd.add(static_cast<double>(oddStages) / static_cast<double>(n));

    if (v) {
      std::vector<double> sw, atStop;
      for (long ul : u) {
        sw.push_back(v->at(tr.stateAt(ul)));
        atStop.push_back(v->at(tr.stateAt(rho > 0 ? std::min(rho, ul) : ul)));
      }
      st.switchValues.push_back(std::move(sw));
      if (rho > 0) atStop.push_back(v->at(tr.states.back()));
      lmax = std::max(lmax, u.size());
      stopped.emplace_back(std::move(atStop), rho > 0);
    }
    if (opt.keepTrajectories) st.trajectories.push_back(std::move(tr));
  }
  if (v) {
    inc.resize(lmax);
    for (const auto& [vals, absorbed] : stopped) {
      // vals[l-1] = v(x_min(rho,u_l)) for observed switches; after absorption
      // the process is frozen at its last entry.
      for (std::size_t l = 1; l <= lmax; ++l) {
        if (vals.empty()) break;
        bool haveL = l <= vals.size(), haveNext = l + 1 <= vals.size();
        if (!absorbed && !haveNext) break;  // censored
        double cur = haveL ? vals[l - 1] : vals.back();
        double nxt = haveNext ? vals[l] : vals.back();
        inc[l - 1].add(nxt - cur);
      }
    }
    for (const auto& w : inc) st.increments.push_back(w.done());
  }
  st.gamma = gamma.done();
  st.upcrossings = ups.done();
  st.oddFrequency = odd.done();
  return st;
}

// ---------------------------------------------------------------- check table

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

CheckRow lowerCheck(std::string name, double bound, const Estimate& e, double sigmas) {
  CheckRow r;
  r.name = std::move(name);
  r.bound = bound;
  r.estimate = e.mean;
  r.ci = sigmas * e.stderr_();
  r.lowerBound = true;
  r.pass = e.mean + r.ci >= bound;
  return r;
}

CheckRow upperCheck(std::string name, double bound, const Estimate& e, double sigmas) {
  CheckRow r;
  r.name = std::move(name);
  r.bound = bound;
  r.estimate = e.mean;
  r.ci = sigmas * e.stderr_();
  r.lowerBound = false;
  r.pass = e.mean - r.ci <= bound;
  return r;
}

std::string formatRows(const std::vector<CheckRow>& rows) {
  std::string out = "name\tbound\testimate\tci\tresult\tnote\n";
  for (const auto& r : rows)
    out += r.name + "\t" + (r.lowerBound ? ">= " : "<= ") + num(r.bound) + "\t" +
           num(r.estimate) + "\t" + num(r.ci) + "\t" + (r.pass ? "PASS" : "FAIL") + "\t" +
           r.note + "\n";
  return out;
}

std::vector<CheckRow> submartingaleCheck(const PlayStats& s, double eps, double sigmas) {
  std::vector<CheckRow> rows;
  for (std::size_t l = 0; l < s.increments.size(); ++l) {
    const auto& e = s.increments[l];
    if (e.count == 0) continue;
    auto r = lowerCheck("submartingale l=" + std::to_string(l + 1), -eps * eps, e, sigmas);
    if (e.count < 30) r.note = "few events (" + std::to_string(e.count) + ")";
    rows.push_back(std::move(r));
  }
  if (rows.empty()) {
    CheckRow r;
    r.name = "submartingale";
    r.bound = -eps * eps;
    r.pass = true;
    r.note = "vacuous: no switching stage observed";
    rows.push_back(r);
  }
  return rows;
}

CheckRow upcrossingCheck(const PlayStats& s, double eps, double sigmas) {
  auto r = upperCheck("upcrossings E[N]", 1 / (eps - eps * eps), s.upcrossings, sigmas);
  if (s.censored) r.note = std::to_string(s.censored) + " runs unabsorbed at the horizon";
  return r;
}

CheckRow phaseFrequencyCheck(const PlayStats& s, double eps, double sigmas) {
  return upperCheck("odd-phase frequency", 5 * eps, s.oddFrequency, sigmas);
}

CheckRow guaranteeCheck(const PlayStats& s, double vx1, double eps, double sigmas) {
  return lowerCheck("gamma_n >= v(x1) - 25 eps", vx1 - 25 * eps, s.gamma, sigmas);
}

}  // namespace rgame
