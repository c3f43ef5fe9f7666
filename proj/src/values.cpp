#include "rgame/values.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rgame {

double ValueFunction::at(const StateId& x) const {
  auto it = values_.find(x);
  if (it == values_.end()) throw MissingValue("no value for state " + x);
  return it->second;
}

double ValueFunction::supDistance(const ValueFunction& other) const {
  double d = 0;
  for (const auto& [x, v] : values_)
    if (other.contains(x)) d = std::max(d, std::fabs(v - other.at(x)));
  return d;
}

ValueFunction shapleyStep(const Game& game, const ValueFunction& vPrev, int n) {
  if (n < 0) throw Error("shapleyStep: negative n");
  ValueFunction out;
  for (const auto& [x, unused] : vPrev.values()) {
    (void)unused;
    if (!game.contains(x)) throw Error("state " + x + " not in game");
    if (game.isAbsorbing(x)) {
      out.set(x, toDouble(game.payoff(x)));
      continue;
    }
    int nA = static_cast<int>(game.actionsA(x).size());
    int nB = static_cast<int>(game.actionsB(x).size());
    MatrixGame m(nA, nB);
    for (int a = 0; a < nA; ++a)
      for (int b = 0; b < nB; ++b) {
        double v = 0;
        for (const auto& o : game.transition(x, a, b)) {
          if (o.prob == 0) continue;
          if (!vPrev.contains(o.state))
            throw MissingValue("missing successor value " + o.state + " of state " + x);
          v += toDouble(o.prob) * vPrev.at(o.state);
        }
        m(a, b) = v;
      }
    out.set(x, static_cast<double>(n) / (n + 1) * solve(m).value);
  }
  return out;
}

MatrixGame oneShotMatrix(const ExploredGame& e, int s, std::span<const double> f) {
  if (!e.isActive(s)) throw Error("one-shot game at a non-active state " + e.states[s]);
  MatrixGame m(e.nA[s], e.nB[s]);
  std::size_t c = e.cellStart[s];
  for (int a = 0; a < e.nA[s]; ++a)
    for (int b = 0; b < e.nB[s]; ++b, ++c) {
      double v = 0;
      for (std::size_t k = e.cellSucc[c]; k < e.cellSucc[c + 1]; ++k)
        v += e.succProb[k] * f[e.succState[k]];
      m(a, b) = v;
    }
  return m;
}

namespace {

// Copy of the explored transition structure in processing order: the
// listed active states first, then every other state. Contiguous layout keeps
// long sweeps over a million states cache friendly.
struct Kernel {
  std::vector<int> toGlobal, toLocal;
  std::vector<int> nA, nB;
  std::vector<std::size_t> cellStart, cellSucc;
  std::vector<int> succ;
  std::vector<double> prob;

  Kernel(const ExploredGame& e, const std::vector<int>& active) {
    toLocal.assign(e.size(), -1);
    toGlobal = active;
    for (std::size_t i = 0; i < active.size(); ++i) toLocal[active[i]] = static_cast<int>(i);
    for (std::size_t s = 0; s < e.size(); ++s)
      if (toLocal[s] < 0) {
        toLocal[s] = static_cast<int>(toGlobal.size());
        toGlobal.push_back(static_cast<int>(s));
      }
    cellStart.push_back(0);
    cellSucc.push_back(0);
    for (int s : active) {
      nA.push_back(e.nA[s]);
      nB.push_back(e.nB[s]);
      for (std::size_t c = e.cellStart[s]; c < e.cellStart[s + 1]; ++c) {
        for (std::size_t k = e.cellSucc[c]; k < e.cellSucc[c + 1]; ++k) {
          succ.push_back(toLocal[e.succState[k]]);
          prob.push_back(e.succProb[k]);
        }
        cellSucc.push_back(succ.size());
      }
      cellStart.push_back(cellSucc.size() - 1);
    }
  }

  double cell(std::size_t c, const double* prev) const {
    double v = 0;
    for (std::size_t k = cellSucc[c]; k < cellSucc[c + 1]; ++k) v += prob[k] * prev[succ[k]];
    return v;
  }

  // val of the stage game at local state i against continuation prev;
  // optionally records the optimal mixed actions.
  double stageValue(int i, const double* prev, double* rowOut, double* colOut) const {
    const int a_ = nA[i], b_ = nB[i];
    const std::size_t c0 = cellStart[i];
    if (a_ == 1 && b_ == 1 && !rowOut) return cell(c0, prev);
    if (b_ == 1 || a_ == 1) {
      // One player moves: maximize over rows or minimize over columns.
      const bool rows = b_ == 1;
      const int count = rows ? a_ : b_;
      int best = 0;
      double bv = cell(c0, prev);
      for (int j = 1; j < count; ++j) {
        double v = cell(c0 + j, prev);
        if (rows ? v > bv : v < bv) {
          bv = v;
          best = j;
        }
      }
      if (rowOut) {
        std::fill(rowOut, rowOut + a_, 0.0);
        std::fill(colOut, colOut + b_, 0.0);
        (rows ? rowOut : colOut)[best] = 1;
        (rows ? colOut : rowOut)[0] = 1;
      }
      return bv;
    }
    MatrixGame m(a_, b_);
    for (int a = 0; a < a_; ++a)
      for (int b = 0; b < b_; ++b) m(a, b) = cell(c0 + a * b_ + b, prev);
    auto sol = solve(m);
    if (rowOut) {
      std::copy(sol.rowStrategy.begin(), sol.rowStrategy.end(), rowOut);
      std::copy(sol.colStrategy.begin(), sol.colStrategy.end(), colOut);
    }
    return sol.value;
  }

  std::vector<double> initialValues(const ExploredGame& e, double frontierValue) const {
    std::vector<double> v(toGlobal.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      int s = toGlobal[i];
      if (e.kind[s] == ExploredGame::Kind::Absorbing) v[i] = e.payoff[s];
      if (e.kind[s] == ExploredGame::Kind::Frontier) v[i] = frontierValue;
    }
    return v;
  }

  std::vector<double> global(const std::vector<double>& local) const {
    std::vector<double> g(local.size());
    for (std::size_t i = 0; i < local.size(); ++i) g[toGlobal[i]] = local[i];
    return g;
  }
};

constexpr double kDriftSlack = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

bool ValueSequence::valid(int n, int s) const {
  if (n < 0 || n > horizon_) return false;
  const auto& e = *explored_;
  if (e.kind[s] == ExploredGame::Kind::Absorbing) return true;
  if (mode_ == DepthPolicy::Mode::Sweep) return true;
  if (e.kind[s] == ExploredGame::Kind::Frontier) return false;
  return e.depth[s] <= depthBound_ - n;
}

double ValueSequence::lower(int n, int s) const {
  if (!hasHistory()) throw Error("value history not kept; use watched states");
  if (!valid(n, s)) throw MissingValue("v_" + std::to_string(n) + " not computed at " + explored_->states[s]);
  return lower_[n][s];
}

double ValueSequence::upper(int n, int s) const {
  if (!hasHistory()) throw Error("value history not kept; use watched states");
  if (!valid(n, s)) throw MissingValue("v_" + std::to_string(n) + " not computed at " + explored_->states[s]);
  return upper_.empty() ? lower_[n][s] : upper_[n][s];
}

ValueFunction ValueSequence::function(int n) const {
  ValueFunction f;
  for (std::size_t s = 0; s < explored_->size(); ++s)
    if (valid(n, static_cast<int>(s))) f.set(explored_->states[s], lower(n, static_cast<int>(s)));
  return f;
}

std::span<const double> ValueSequence::rowProfile(int n, int s) const {
  if (!hasProfiles() || n < 1 || n > horizon_ || !explored_->isActive(s) || !valid(n, s))
    throw MissingValue("no recorded profile for n=" + std::to_string(n) + " at " +
                       explored_->states[s]);
  return {rowProf_[n].data() + rowOff_[s], static_cast<std::size_t>(explored_->nA[s])};
}

std::span<const double> ValueSequence::colProfile(int n, int s) const {
  if (!hasProfiles() || n < 1 || n > horizon_ || !explored_->isActive(s) || !valid(n, s))
    throw MissingValue("no recorded profile for n=" + std::to_string(n) + " at " +
                       explored_->states[s]);
  return {colProf_[n].data() + colOff_[s], static_cast<std::size_t>(explored_->nB[s])};
}

ValueSequence computeVn(GamePtr game, const std::vector<StateId>& roots, int N,
                        const DepthPolicy& policy, const std::vector<StateId>& watch) {
  if (N < 1) throw Error("computeVn: N must be >= 1");
  const bool targeted = policy.mode == DepthPolicy::Mode::Targeted;
  int depth = policy.depth;
  if (targeted && depth < 0) depth = N;
  auto e = std::make_shared<ExploredGame>(explore(game, roots, depth, policy.stateCap));

  ValueSequence seq;
  seq.explored_ = e;
  seq.horizon_ = N;
  seq.mode_ = policy.mode;
  seq.depthBound_ = depth;
  seq.watch_ = watch;
  std::vector<int> watchIdx;
  for (const auto& w : watch) watchIdx.push_back(e->at(w));

  // Active states in processing order; targeted mode uses a depth prefix.
  std::vector<int> order;
  for (std::size_t s = 0; s < e->size(); ++s)
    if (e->isActive(static_cast<int>(s))) order.push_back(static_cast<int>(s));
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return e->depth[a] < e->depth[b]; });
  auto prefix = [&](int n) -> std::size_t {
    if (!targeted) return order.size();
    int limit = depth - n;
    return static_cast<std::size_t>(
        std::upper_bound(order.begin(), order.end(), limit,
                         [&](int lim, int s) { return lim < e->depth[s]; }) -
        order.begin());
  };

  if (policy.recordProfiles) {
    seq.rowOff_.assign(e->size() + 1, 0);
    seq.colOff_.assign(e->size() + 1, 0);
    for (std::size_t s = 0; s < e->size(); ++s) {
      seq.rowOff_[s + 1] = seq.rowOff_[s] + e->nA[s];
      seq.colOff_[s + 1] = seq.colOff_[s] + e->nB[s];
    }
    seq.rowProf_.resize(N + 1);
    seq.colProf_.resize(N + 1);
  }
  seq.drift_.assign(N + 1, 0.0);

  const Kernel kernel(*e, order);
  const bool twoRuns = e->frontierCount() > 0;
  for (int run = 0; run < (twoRuns ? 2 : 1); ++run) {
    const bool low = run == 0;
    auto& hist = low ? seq.lower_ : seq.upper_;
    auto& wHist = low ? seq.watchLower_ : seq.watchUpper_;
    std::vector<double> cur = kernel.initialValues(*e, low ? e->low : e->high);
    std::vector<double> next = cur;
    wHist.assign(watch.size(), std::vector<double>(N + 1, kNaN));
    auto recordWatch = [&](int n, const std::vector<double>& v) {
      for (std::size_t w = 0; w < watchIdx.size(); ++w)
        if (seq.valid(n, watchIdx[w])) wHist[w][n] = v[kernel.toLocal[watchIdx[w]]];
    };
    if (policy.keepHistory) hist.push_back(kernel.global(cur));
    recordWatch(0, cur);
    for (int n = 1; n <= N; ++n) {
      const std::size_t len = prefix(n);
      const double factor = static_cast<double>(n - 1) / n;
      const bool record = policy.recordProfiles && low;
      if (record) {
        seq.rowProf_[n].assign(seq.rowOff_.back(), 0.0);
        seq.colProf_[n].assign(seq.colOff_.back(), 0.0);
      }
      double drift = 0;
      int worst = -1;
      for (std::size_t i = 0; i < len; ++i) {
        int s = order[i];
        double v = factor * kernel.stageValue(
                                static_cast<int>(i), cur.data(),
                                record ? seq.rowProf_[n].data() + seq.rowOff_[s] : nullptr,
                                record ? seq.colProf_[n].data() + seq.colOff_[s] : nullptr);
        if (n >= 2) {
          double d = std::fabs(v - cur[i]);
          if (d > drift) {
            drift = d;
            worst = s;
          }
        }
        next[i] = v;
      }
      if (n >= 2) {
        // ||v_{n-1} - v_n|| <= 2/n
        double bound = 2.0 / n;
        if (low) seq.drift_[n - 1] = drift;
        else seq.drift_[n - 1] = std::max(seq.drift_[n - 1], drift);
        if (drift > bound + kDriftSlack) {
          seq.violations_.push_back({n - 1, e->states[worst], drift, bound});
          if (policy.strictDrift)
            throw Error("drift bound violated at n=" + std::to_string(n - 1) + ", state " +
                        e->states[worst]);
        }
      }
      std::swap(cur, next);
      if (policy.keepHistory) hist.push_back(kernel.global(cur));
      recordWatch(n, cur);
    }
  }
  if (!twoRuns) seq.watchUpper_ = seq.watchLower_;
  return seq;
}

ValueFunction DiscountedValues::function() const {
  ValueFunction f;
  for (std::size_t s = 0; s < explored->size(); ++s)
    if (explored->kind[s] != ExploredGame::Kind::Frontier) f.set(explored->states[s], lower[s]);
  return f;
}

std::pair<double, double> DiscountedValues::bracket(const StateId& x) const {
  int s = explored->at(x);
  return {lower[s], upper[s]};
}

DiscountedValues computeVLambda(GamePtr game, const StateId& x0, double lambda, double tol,
                                int depth, std::size_t stateCap) {
  if (!(lambda > 0 && lambda <= 1)) throw Error("lambda must lie in (0,1]");
  if (!(tol > 0)) throw Error("tol must be positive");
  double range = std::max(1e-300, toDouble(game->payoffHigh()) - toDouble(game->payoffLow()));
  if (depth < 0) {
    depth = lambda >= 1 ? 1
                        : static_cast<int>(std::ceil(std::log(tol / range) / std::log(1 - lambda)));
    depth = std::max(depth, 1);
  }
  auto e = std::make_shared<ExploredGame>(explore(game, {x0}, depth, stateCap));
  DiscountedValues out;
  out.explored = e;
  out.lambda = lambda;

  std::vector<int> order;
  for (std::size_t s = 0; s < e->size(); ++s)
    if (e->isActive(static_cast<int>(s))) order.push_back(static_cast<int>(s));
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return e->depth[a] > e->depth[b]; });

  const Kernel kernel(*e, order);
  const int m = static_cast<int>(order.size());
  const double beta = 1 - lambda;
  const int maxSweeps =
      lambda >= 1 ? 4 : 10 + static_cast<int>(20 * std::log(tol / range) / std::log(beta));
  for (int run = 0; run < 2; ++run) {
    std::vector<double> w = kernel.initialValues(*e, run == 0 ? e->low : e->high);
    int sweeps = 0;
    double residual = std::numeric_limits<double>::infinity();
    while (true) {
      double change = 0;
      for (int i = 0; i < m; ++i) {
        double v = beta * kernel.stageValue(i, w.data(), nullptr, nullptr);
        change = std::max(change, std::fabs(v - w[i]));
        w[i] = v;
      }
      ++sweeps;
      if (change <= tol) {
        residual = 0;
        for (int i = 0; i < m; ++i)
          residual = std::max(residual,
                              std::fabs(beta * kernel.stageValue(i, w.data(), nullptr, nullptr) - w[i]));
        if (residual <= tol) break;
      }
      if (sweeps > maxSweeps)
        throw SolverError("discounted iteration did not converge (solver bug)");
    }
    out.sweeps = std::max(out.sweeps, sweeps);
    out.residual = std::max(out.residual, residual);
    (run == 0 ? out.lower : out.upper) = kernel.global(w);
  }
  return out;
}

EpsilonNet epsilonNet(const ValueSequence& seq, double eps, const std::vector<StateId>& states) {
  if (!seq.hasHistory()) throw Error("epsilonNet needs the full value history");
  const auto& e = seq.explored();
  std::vector<int> idx;
  if (states.empty()) {
    for (std::size_t s = 0; s < e.size(); ++s)
      if (seq.valid(seq.horizon(), static_cast<int>(s))) idx.push_back(static_cast<int>(s));
  } else {
    for (const auto& x : states) idx.push_back(e.at(x));
  }
  EpsilonNet net;
  net.eps = eps;
  auto dist = [&](int n, int m) {
    double d = 0;
    for (int s : idx) d = std::max(d, std::fabs(seq.lower(n, s) - seq.lower(m, s)));
    return d;
  };
  for (int n = 1; n <= seq.horizon(); ++n) {
    int found = -1;
    for (std::size_t r = 0; r < net.representatives.size(); ++r)
      if (dist(n, net.representatives[r]) <= eps) {
        found = static_cast<int>(r);
        break;
      }
    if (found < 0) {
      found = static_cast<int>(net.representatives.size());
      net.representatives.push_back(n);
    }
    net.assignment.push_back(found);
  }
  return net;
}

ValueFunction estimateLimsup(const ValueSequence& seq, int tailWindow) {
  const int N = seq.horizon();
  if (tailWindow < 1 || tailWindow > N) throw Error("tail window must lie in [1, horizon]");
  ValueFunction f;
  const auto& e = seq.explored();
  if (seq.hasHistory()) {
    for (std::size_t s = 0; s < e.size(); ++s) {
      int si = static_cast<int>(s);
      if (!seq.valid(N, si)) continue;
      double m = -std::numeric_limits<double>::infinity();
      for (int n = N - tailWindow + 1; n <= N; ++n) m = std::max(m, seq.lower(n, si));
      f.set(e.states[s], m);
    }
    return f;
  }
  for (std::size_t w = 0; w < seq.watched().size(); ++w) {
    double m = -std::numeric_limits<double>::infinity();
    for (int n = N - tailWindow + 1; n <= N; ++n) {
      double v = seq.watchedLower(static_cast<int>(w), n);
      if (std::isnan(v)) throw MissingValue("watched state lacks v_" + std::to_string(n));
      m = std::max(m, v);
    }
    f.set(seq.watched()[w], m);
  }
  return f;
}

ValueFunction estimateLimsup(const std::vector<ValueFunction>& seq, int tailWindow) {
  const int N = static_cast<int>(seq.size());
  if (tailWindow < 1 || tailWindow > N) throw Error("tail window must lie in [1, horizon]");
  ValueFunction f;
  for (const auto& [x, v0] : seq[N - tailWindow].values()) {
    double m = v0;
    bool everywhere = true;
    for (int n = N - tailWindow + 1; n < N && everywhere; ++n) {
      if (!seq[n].contains(x)) everywhere = false;
      else m = std::max(m, seq[n].at(x));
    }
    if (everywhere) f.set(x, m);
  }
  return f;
}

}  // namespace rgame
