#include "rgame/game.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <numeric>

namespace rgame {

void RecursiveGame::addActive(const StateId& x, std::vector<std::string> actionsA,
                              std::vector<std::string> actionsB) {
  if (absorbing_.count(x) || active_.count(x))
    throw Error("duplicate state " + x);
  if (actionsA.empty() || actionsB.empty())
    throw Error("empty action set at " + x);
  Active st;
  st.cells.resize(actionsA.size() * actionsB.size());
  st.actionsA = std::move(actionsA);
  st.actionsB = std::move(actionsB);
  active_.emplace(x, std::move(st));
}

void RecursiveGame::addAbsorbing(const StateId& x, const Rational& payoff) {
  if (absorbing_.count(x) || active_.count(x))
    throw Error("duplicate state " + x);
  absorbing_.emplace(x, payoff);
}

void RecursiveGame::setTransition(const StateId& x, int a, int b, Distribution d) {
  auto it = active_.find(x);
  if (it == active_.end()) throw Error("transition from non-active state " + x);
  auto& st = it->second;
  if (a < 0 || b < 0 || a >= static_cast<int>(st.actionsA.size()) ||
      b >= static_cast<int>(st.actionsB.size()))
    throw Error("action index out of range at " + x);
  st.cells[a * st.actionsB.size() + b] = std::move(d);
}

void RecursiveGame::setTransition(const StateId& x, const std::string& a,
                                  const std::string& b, Distribution d) {
  const auto& st = activeAt(x);
  auto ia = std::find(st.actionsA.begin(), st.actionsA.end(), a);
  auto ib = std::find(st.actionsB.begin(), st.actionsB.end(), b);
  if (ia == st.actionsA.end() || ib == st.actionsB.end())
    throw Error("unknown action at " + x);
  setTransition(x, static_cast<int>(ia - st.actionsA.begin()),
                static_cast<int>(ib - st.actionsB.begin()), std::move(d));
}

const RecursiveGame::Active& RecursiveGame::activeAt(const StateId& x) const {
  auto it = active_.find(x);
  if (it == active_.end()) throw Error("not an active state: " + x);
  return it->second;
}

bool RecursiveGame::contains(const StateId& x) const {
  return active_.count(x) || absorbing_.count(x);
}

bool RecursiveGame::isAbsorbing(const StateId& x) const {
  return absorbing_.count(x) > 0;
}

Rational RecursiveGame::payoff(const StateId& x) const {
  auto it = absorbing_.find(x);
  if (it != absorbing_.end()) return it->second;
  if (active_.count(x)) return 0;
  throw Error("unknown state " + x);
}

std::vector<std::string> RecursiveGame::actionsA(const StateId& x) const {
  return activeAt(x).actionsA;
}

std::vector<std::string> RecursiveGame::actionsB(const StateId& x) const {
  return activeAt(x).actionsB;
}

Distribution RecursiveGame::transition(const StateId& x, int a, int b) const {
  const auto& st = activeAt(x);
  return st.cells.at(a * st.actionsB.size() + b);
}

Rational RecursiveGame::payoffLow() const {
  Rational lo = 0;
  for (const auto& [x, g] : absorbing_) lo = std::min(lo, g);
  return lo;
}

Rational RecursiveGame::payoffHigh() const {
  Rational hi = 0;
  for (const auto& [x, g] : absorbing_) hi = std::max(hi, g);
  return hi;
}

namespace {

std::string cellLabel(const StateId& x, const std::string& a, const std::string& b) {
  return "(" + x + "," + a + "," + b + ")";
}

void checkCell(const Game& game, const StateId& x, const std::string& a,
               const std::string& b, const Distribution& d, bool requireKnown,
               std::vector<Diagnostic>& out) {
  if (d.empty()) {
    out.push_back({x, "missing transition at " + cellLabel(x, a, b)});
    return;
  }
  Rational mass = 0;
  std::set<StateId> seen;
  for (const auto& o : d) {
    if (o.prob < 0)
      out.push_back({x, "negative probability " + toString(o.prob) + " at " +
                            cellLabel(x, a, b)});
    if (!seen.insert(o.state).second)
      out.push_back({x, "repeated successor " + o.state + " at " + cellLabel(x, a, b)});
    if (requireKnown && !game.contains(o.state))
      out.push_back({x, "unknown successor " + o.state + " at " + cellLabel(x, a, b)});
    mass += o.prob;
  }
  if (mass != 1) {
    std::string shown = toString(mass);
    if (mass.get_den() != 1) {
      // Decimal form reads better for the common 9/10 case.
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", mass.get_d());
      shown = buf;
    }
    out.push_back({x, "transition mass " + shown + " ≠ 1 at " + cellLabel(x, a, b)});
  }
}

void checkState(const Game& game, const StateId& x, bool requireKnown,
                std::vector<Diagnostic>& out) {
  if (!game.contains(x)) {
    out.push_back({x, "unknown state " + x});
    return;
  }
  if (game.isAbsorbing(x)) {
    Rational g = game.payoff(x);
    Rational bound = game.payoffBound();
    if (g > bound || g < -bound)
      out.push_back({x, "payoff " + toString(g) + " out of [-" + toString(bound) +
                            "," + toString(bound) + "] at " + x});
    return;
  }
  auto A = game.actionsA(x);
  auto B = game.actionsB(x);
  if (A.empty() || B.empty()) {
    out.push_back({x, "empty action set at " + x});
    return;
  }
  for (std::size_t a = 0; a < A.size(); ++a)
    for (std::size_t b = 0; b < B.size(); ++b)
      checkCell(game, x, A[a], B[b],
                game.transition(x, static_cast<int>(a), static_cast<int>(b)),
                requireKnown, out);
}

}  // namespace

std::vector<Diagnostic> validate(const RecursiveGame& game) {
  std::vector<Diagnostic> out;
  for (const auto& [x, st] : game.active()) checkState(game, x, true, out);
  for (const auto& [x, g] : game.absorbing()) checkState(game, x, true, out);
  if (auto x0 = game.initialState(); x0 && !game.contains(*x0))
    out.push_back({*x0, "unknown initial state " + *x0});
  return out;
}

std::vector<Diagnostic> validate(const Game& game, const std::vector<StateId>& states) {
  std::vector<Diagnostic> out;
  for (const auto& x : states) checkState(game, x, false, out);
  return out;
}

std::set<StateId> reachable(const Game& game, const StateId& x0, int depthBound) {
  if (!game.contains(x0)) throw Error("unknown initial state " + x0);
  if (depthBound < 0) throw Error("negative depth bound");
  std::set<StateId> seen{x0};
  std::vector<StateId> layer{x0};
  for (int d = 0; d < depthBound && !layer.empty(); ++d) {
    std::vector<StateId> next;
    for (const auto& x : layer) {
      if (!game.contains(x) || game.isAbsorbing(x)) continue;
      int nA = static_cast<int>(game.actionsA(x).size());
      int nB = static_cast<int>(game.actionsB(x).size());
      for (int a = 0; a < nA; ++a)
        for (int b = 0; b < nB; ++b)
          for (const auto& o : game.transition(x, a, b))
            if (o.prob > 0 && seen.insert(o.state).second) next.push_back(o.state);
    }
    layer = std::move(next);
  }
  return seen;
}

int ExploredGame::find(const StateId& x) const {
  auto it = index.find(x);
  return it == index.end() ? -1 : it->second;
}

int ExploredGame::at(const StateId& x) const {
  int s = find(x);
  if (s < 0) throw Error("state " + x + " outside the explored set");
  return s;
}

std::size_t ExploredGame::frontierCount() const {
  return static_cast<std::size_t>(std::count(kind.begin(), kind.end(), Kind::Frontier));
}

ExploredGame explore(GamePtr game, const std::vector<StateId>& roots, int depthBound,
                     std::size_t stateCap) {
  if (!game) throw Error("null game");
  // Discovery pass with temporary indices.
  std::unordered_map<StateId, int> tmpIndex;
  std::vector<StateId> tmpStates;
  std::vector<int> tmpDepth;
  std::vector<ExploredGame::Kind> tmpKind;
  std::vector<double> tmpPayoff;
  std::vector<int> tmpA, tmpB;
  std::vector<std::size_t> tmpCellBegin, tmpCellEnd;  // into tmpCells
  std::vector<std::pair<std::size_t, std::size_t>> tmpCells;  // into tmpSucc
  std::vector<std::pair<int, double>> tmpSucc;

  auto discover = [&](const StateId& x, int d) {
    auto [it, inserted] = tmpIndex.emplace(x, static_cast<int>(tmpStates.size()));
    if (inserted) {
      if (tmpStates.size() >= stateCap)
        throw CapExceeded("state explosion: more than " + std::to_string(stateCap) +
                          " states reachable");
      tmpStates.push_back(x);
      tmpDepth.push_back(d);
    }
    return it->second;
  };
  for (const auto& r : roots) {
    if (!game->contains(r)) throw Error("unknown initial state " + r);
    discover(r, 0);
  }
  for (std::size_t s = 0; s < tmpStates.size(); ++s) {
    StateId x = tmpStates[s];
    int d = tmpDepth[s];
    ExploredGame::Kind k;
    double g = 0;
    int nA = 0, nB = 0;
    std::size_t cb = tmpCells.size();
    if (!game->contains(x)) {
      k = ExploredGame::Kind::Frontier;
    } else if (game->isAbsorbing(x)) {
      k = ExploredGame::Kind::Absorbing;
      g = toDouble(game->payoff(x));
    } else if (depthBound >= 0 && d >= depthBound) {
      k = ExploredGame::Kind::Frontier;
    } else {
      k = ExploredGame::Kind::Active;
      nA = static_cast<int>(game->actionsA(x).size());
      nB = static_cast<int>(game->actionsB(x).size());
      for (int a = 0; a < nA; ++a)
        for (int b = 0; b < nB; ++b) {
          std::size_t sb = tmpSucc.size();
          for (const auto& o : game->transition(x, a, b)) {
            if (o.prob <= 0) continue;
            int t = discover(o.state, d + 1);
            tmpSucc.emplace_back(t, toDouble(o.prob));
          }
          tmpCells.emplace_back(sb, tmpSucc.size());
        }
    }
    tmpKind.push_back(k);
    tmpPayoff.push_back(g);
    tmpA.push_back(nA);
    tmpB.push_back(nB);
    tmpCellBegin.push_back(cb);
    tmpCellEnd.push_back(tmpCells.size());
  }

  // Sort by label for deterministic iteration.
  std::size_t n = tmpStates.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return tmpStates[a] < tmpStates[b]; });
  std::vector<int> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = static_cast<int>(i);

  ExploredGame e;
  e.game = game;
  e.depthBound = depthBound;
  e.low = std::min(0.0, toDouble(game->payoffLow()));
  e.high = std::max(0.0, toDouble(game->payoffHigh()));
  e.states.reserve(n);
  e.index.reserve(n);
  e.kind.reserve(n);
  e.payoff.reserve(n);
  e.depth.reserve(n);
  e.nA.reserve(n);
  e.nB.reserve(n);
  e.cellStart.reserve(n + 1);
  e.cellSucc.reserve(tmpCells.size() + 1);
  e.succState.reserve(tmpSucc.size());
  e.succProb.reserve(tmpSucc.size());
  for (std::size_t i = 0; i < n; ++i) {
    int s = order[i];
    e.states.push_back(std::move(tmpStates[s]));
    e.index.emplace(e.states.back(), static_cast<int>(i));
    e.kind.push_back(tmpKind[s]);
    e.payoff.push_back(tmpPayoff[s]);
    e.depth.push_back(tmpDepth[s]);
    e.nA.push_back(tmpA[s]);
    e.nB.push_back(tmpB[s]);
    e.cellStart.push_back(e.cellSucc.size());
    for (std::size_t c = tmpCellBegin[s]; c < tmpCellEnd[s]; ++c) {
      e.cellSucc.push_back(e.succState.size());
      for (std::size_t j = tmpCells[c].first; j < tmpCells[c].second; ++j) {
        e.succState.push_back(rank[tmpSucc[j].first]);
        e.succProb.push_back(tmpSucc[j].second);
      }
    }
  }
  e.cellStart.push_back(e.cellSucc.size());
  e.cellSucc.push_back(e.succState.size());
  return e;
}

StateId latticeState(long x, long y) {
  return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

std::optional<std::pair<long, long>> parseLattice(const StateId& s) {
  if (s.size() < 5 || s.front() != '(' || s.back() != ')') return std::nullopt;
  auto comma = s.find(',');
  if (comma == std::string::npos) return std::nullopt;
  long x = 0, y = 0;
  const char* b = s.data() + 1;
  const char* m = s.data() + comma;
  const char* e = s.data() + s.size() - 1;
  auto r1 = std::from_chars(b, m, x);
  auto r2 = std::from_chars(m + 1, e, y);
  if (r1.ec != std::errc() || r1.ptr != m || r2.ec != std::errc() || r2.ptr != e)
    return std::nullopt;
  return std::make_pair(x, y);
}

}  // namespace rgame
