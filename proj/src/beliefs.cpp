#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "rgame/lp.hpp"
#include "rgame/matrix.hpp"
#include "rgame/signals.hpp"

namespace rgame {

template <>
Rational scalar<Rational>(const Rational& r) {
  return r;
}
template <>
double scalar<double>(const Rational& r) {
  return r.get_d();
}

namespace {

double asDouble(const Rational& r) { return r.get_d(); }
double asDouble(double d) { return d; }

constexpr double kMergeGrid = 1e12;

bool isZero(const Rational& r) { return sgn(r) == 0; }
bool isZero(double d) { return std::abs(d) * kMergeGrid < 0.5; }

std::string show(const Rational& r) { return toString(r); }
std::string show(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", d);
  return buf;
}

template <class T>
T l1(const Belief<T>& a, const Belief<T>& b) {
  T s = 0;
  for (std::size_t k = 0; k < a.p.size(); ++k) {
    T d = a.p[k] - b.p[k];
    s += d < 0 ? T(-d) : d;
  }
  return s;
}

}  // namespace

template <>
int compareScalar<Rational>(const Rational& a, const Rational& b) {
  int c = cmp(a, b);
  return (c > 0) - (c < 0);
}

template <>
int compareScalar<double>(const double& a, const double& b) {
  long long x = std::llround(a * kMergeGrid), y = std::llround(b * kMergeGrid);
  return (x > y) - (x < y);
}

template <class T>
int compare(const Belief<T>& a, const Belief<T>& b) {
  if (a.p.size() != b.p.size()) return a.p.size() < b.p.size() ? -1 : 1;
  for (std::size_t k = 0; k < a.p.size(); ++k)
    if (int c = compareScalar(a.p[k], b.p[k])) return c;
  return 0;
}

namespace {

template <class A, class T>
int compareAtoms(const std::vector<std::pair<A, T>>& a, const std::vector<std::pair<A, T>>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (int c = compare(a[i].first, b[i].first)) return c;
    if (int c = compareScalar(a[i].second, b[i].second)) return c;
  }
  return 0;
}

}  // namespace

template <class T>
int compare(const SecondOrderBelief<T>& a, const SecondOrderBelief<T>& b) {
  return compareAtoms(a.atoms, b.atoms);
}

template <class T>
int compare(const ImageDistribution<T>& a, const ImageDistribution<T>& b) {
  return compareAtoms(a.atoms, b.atoms);
}

template <class A, class T>
void canonicalize(std::vector<std::pair<A, T>>& atoms) {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const auto& x, const auto& y) { return compare(x.first, y.first) < 0; });
  std::vector<std::pair<A, T>> out;
  for (auto& a : atoms) {
    if (!out.empty() && compare(out.back().first, a.first) == 0) out.back().second += a.second;
    else out.push_back(std::move(a));
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const auto& a) { return isZero(a.second); }),
            out.end());
  atoms = std::move(out);
}

namespace {

template <class T>
std::string showBelief(const Belief<T>& p) {
  std::string s = "[";
  for (std::size_t k = 0; k < p.p.size(); ++k) s += (k ? ", " : "") + show(p.p[k]);
  return s + "]";
}

template <class T>
std::string showSecond(const SecondOrderBelief<T>& x) {
  std::string s = "{";
  for (std::size_t i = 0; i < x.atoms.size(); ++i)
    s += (i ? ", " : "") + show(x.atoms[i].second) + ": " + showBelief(x.atoms[i].first);
  return s + "}";
}

template <class T>
std::string showImage(const ImageDistribution<T>& z) {
  std::string s = "<";
  for (std::size_t i = 0; i < z.atoms.size(); ++i)
    s += (i ? ", " : "") + show(z.atoms[i].second) + ": " + showSecond(z.atoms[i].first);
  return s + ">";
}

}  // namespace

std::string toString(const Belief<Rational>& p) { return showBelief(p); }
std::string toString(const Belief<double>& p) { return showBelief(p); }
std::string toString(const SecondOrderBelief<Rational>& x) { return showSecond(x); }
std::string toString(const SecondOrderBelief<double>& x) { return showSecond(x); }
std::string toString(const ImageDistribution<Rational>& z) { return showImage(z); }
std::string toString(const ImageDistribution<double>& z) { return showImage(z); }

SecondOrderBelief<double> toDouble(const SecondOrderBelief<Rational>& x) {
  SecondOrderBelief<double> out;
  for (const auto& [p, w] : x.atoms) {
    Belief<double> q;
    for (const auto& v : p.p) q.p.push_back(v.get_d());
    out.atoms.push_back({q, w.get_d()});
  }
  canonicalize(out.atoms);
  return out;
}

template <class T>
SecondOrderBelief<T> dirac(const Belief<T>& p) {
  return {{{p, T(1)}}};
}

template <class T>
Joint<T> initialLaw(const SignalGame& g) {
  Joint<T> out;
  out.numK = g.numK();
  for (const auto& o : g.initial()) out.entries.push_back({o.k, o.c, o.d, scalar<T>(o.w)});
  return out;
}

// ---------------------------------------------------------------------------
// Image and canonical law

template <class T>
ImageDistribution<T> image(const Joint<T>& pi) {
  std::map<int, int> dOf;
  std::map<int, std::map<int, std::vector<T>>> mass;  // d -> c -> k
  for (const auto& e : pi.entries) {
    if (isZero(e.w)) continue;
    if (e.w < 0) throw Error("negative weight in initial law");
    auto [it, fresh] = dOf.emplace(e.c, e.d);
    if (!fresh && it->second != e.d)
      throw Error("law outside Delta^1: signal " + std::to_string(e.c) + " occurs with two d'");
    auto& v = mass[e.d][e.c];
    if (v.empty()) v.assign(pi.numK, T(0));
    v.at(e.k) += e.w;
  }
  ImageDistribution<T> out;
  T total = 0;
  for (const auto& [d, byC] : mass) {
    SecondOrderBelief<T> x;
    T pd = 0;
    for (const auto& [c, v] : byC)
      for (const auto& w : v) pd += w;
    for (const auto& [c, v] : byC) {
      T pc = 0;
      for (const auto& w : v) pc += w;
      Belief<T> p;
      for (const auto& w : v) p.p.push_back(w / pc);
      x.atoms.push_back({std::move(p), pc / pd});
    }
    canonicalize(x.atoms);
    out.atoms.push_back({std::move(x), pd});
    total += pd;
  }
  if (out.atoms.empty()) throw Error("empty initial law");
  for (auto& a : out.atoms) a.second /= total;
  canonicalize(out.atoms);
  return out;
}

template <class T>
CanonicalLaw<T> canonicalPi(const ImageDistribution<T>& eta, int numK) {
  CanonicalLaw<T> out;
  out.pi.numK = numK;
  for (std::size_t e = 0; e < eta.atoms.size(); ++e) {
    const auto& [x, wx] = eta.atoms[e];
    for (std::size_t a = 0; a < x.atoms.size(); ++a) {
      const auto& [p, wp] = x.atoms[a];
      int c = static_cast<int>(out.cLabels.size());
      out.cLabels.push_back({static_cast<int>(e), static_cast<int>(a)});
      for (int k = 0; k < numK; ++k)
        if (!isZero(p.p.at(k))) out.pi.entries.push_back({k, c, static_cast<int>(e), wx * wp * p.p[k]});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wasserstein distance

template <class T>
T wasserstein(const SecondOrderBelief<T>& x, const SecondOrderBelief<T>& y) {
  const int m = static_cast<int>(x.atoms.size()), n = static_cast<int>(y.atoms.size());
  LinearProgram<T> lp;
  std::vector<std::vector<int>> v(m, std::vector<int>(n));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < n; ++b) v[a][b] = lp.addVar(-l1(x.atoms[a].first, y.atoms[b].first));
  for (int a = 0; a < m; ++a) {
    std::vector<std::pair<int, T>> row;
    for (int b = 0; b < n; ++b) row.push_back({v[a][b], T(1)});
    lp.addRow(row, Sense::EQ, x.atoms[a].second);
  }
  // One marginal constraint is implied by the others; dropping it keeps the
  // double tableau away from a redundant row that rounding makes infeasible.
  for (int b = 0; b + 1 < n; ++b) {
    std::vector<std::pair<int, T>> row;
    for (int a = 0; a < m; ++a) row.push_back({v[a][b], T(1)});
    lp.addRow(row, Sense::EQ, y.atoms[b].second);
  }
  auto r = solveLp(lp);
  if (r.status != LpStatus::Optimal)
    throw SolverError(std::string("transport LP: ") + toString(r.status));
  T d = -r.objective;
  return d < 0 ? T(0) : d;
}

template <class T>
T wassersteinDual(const SecondOrderBelief<T>& x, const SecondOrderBelief<T>& y) {
  std::vector<std::pair<Belief<T>, T>> pts;  // point, x(point) - y(point)
  for (const auto& [p, w] : x.atoms) pts.push_back({p, w});
  for (const auto& [p, w] : y.atoms) pts.push_back({p, -w});
  canonicalize(pts);
  // Points where the masses cancel are dropped: any 1-Lipschitz f on the
  // rest extends to them inside [-1, 1].
  const int n = static_cast<int>(pts.size());
  if (n == 0) return T(0);
  LinearProgram<T> lp;
  for (int u = 0; u < n; ++u) lp.addVar(pts[u].second, true);
  for (int u = 0; u < n; ++u) {
    lp.addRow({{u, T(1)}}, Sense::LE, T(1));
    lp.addRow({{u, T(1)}}, Sense::GE, T(-1));
    for (int w = 0; w < n; ++w)
      if (w != u) lp.addRow({{u, T(1)}, {w, T(-1)}}, Sense::LE, l1(pts[u].first, pts[w].first));
  }
  auto r = solveLp(lp);
  if (r.status != LpStatus::Optimal)
    throw SolverError(std::string("dual transport LP: ") + toString(r.status));
  return r.objective;
}

// ---------------------------------------------------------------------------
// Belief updates

template <class T>
Belief<T> updateP(const SignalGame& g, const Joint<T>& pi, const SignalHistory& h1,
                  const Strategy1<T>* sigma) {
  if (h1.empty()) throw Error("empty history");
  std::vector<T> alpha(g.numK(), T(0));
  for (const auto& e : pi.entries)
    if (e.c == h1[0]) alpha.at(e.k) += e.w;
  for (std::size_t s = 1; s < h1.size(); ++s) {
    int c = h1[s];
    if (c < 0 || c >= g.numC()) throw Error("signal out of range in history");
    int i = g.iHat(c), d = g.dHat(c), j = g.jHat(d);
    if (i < 0 || j < 0) throw ZeroProbability("initial-only signal after stage 1");
    if (sigma) {
      auto mix = (*sigma)(SignalHistory(h1.begin(), h1.begin() + s));
      if (isZero(mix.at(i))) throw ZeroProbability("history uses an action sigma never plays");
    }
    std::vector<T> next(g.numK(), T(0));
    for (int k = 0; k < g.numK(); ++k) {
      if (isZero(alpha[k])) continue;
      for (const auto& o : g.law(k, i, j))
        if (o.c == c) next[o.k] += alpha[k] * scalar<T>(o.w);
    }
    alpha = std::move(next);
  }
  T total = 0;
  for (const auto& a : alpha) total += a;
  if (isZero(total)) throw ZeroProbability("history has probability 0");
  Belief<T> p;
  for (const auto& a : alpha) p.p.push_back(a / total);
  return p;
}

template <class T>
SecondOrderBelief<T> updateX(const SignalGame& g, const Joint<T>& pi, const Strategy1<T>& sigma,
                             const SignalHistory& h2) {
  if (h2.empty()) throw Error("empty history");
  SecondOrderBelief<T> x;
  SignalHistory h1;
  // alpha carries pi, q and sigma along h1; tau is common to every h1
  // consistent with h2 and cancels.
  std::function<void(const std::vector<T>&)> walk = [&](const std::vector<T>& alpha) {
    std::size_t s = h1.size();
    if (s == h2.size()) {
      T total = 0;
      for (const auto& a : alpha) total += a;
      if (isZero(total)) return;
      Belief<T> p;
      for (const auto& a : alpha) p.p.push_back(a / total);
      x.atoms.push_back({std::move(p), total});
      return;
    }
    int d = h2[s], j = g.jHat(d);
    if (j < 0) return;
    auto mix = sigma(h1);
    for (int c = 0; c < g.numC(); ++c) {
      if (g.dHat(c) != d || g.iHat(c) < 0) continue;
      int i = g.iHat(c);
      if (isZero(mix.at(i))) continue;
      std::vector<T> next(g.numK(), T(0));
      bool any = false;
      for (int k = 0; k < g.numK(); ++k) {
        if (isZero(alpha[k])) continue;
        for (const auto& o : g.law(k, i, j))
          if (o.c == c) {
            next[o.k] += mix[i] * alpha[k] * scalar<T>(o.w);
            any = true;
          }
      }
      if (!any) continue;
      h1.push_back(c);
      walk(next);
      h1.pop_back();
    }
  };
  std::map<int, std::vector<T>> first;
  for (const auto& e : pi.entries) {
    if (e.d != h2[0] || isZero(e.w)) continue;
    auto& v = first[e.c];
    if (v.empty()) v.assign(g.numK(), T(0));
    v.at(e.k) += e.w;
  }
  for (const auto& [c, alpha] : first) {
    h1 = {c};
    walk(alpha);
  }
  T total = 0;
  for (const auto& a : x.atoms) total += a.second;
  if (isZero(total)) throw ZeroProbability("player 2 history has probability 0");
  for (auto& a : x.atoms) a.second /= total;
  canonicalize(x.atoms);
  return x;
}

// ---------------------------------------------------------------------------
// Belief game

template <class T>
BeliefGame<T>::BeliefGame(SignalGamePtr g) : g_(std::move(g)) {
  g_->check();
  q_.resize(static_cast<std::size_t>(g_->numK()) * g_->numI() * g_->numJ());
  for (int k = 0; k < g_->numK(); ++k)
    for (int i = 0; i < g_->numI(); ++i)
      for (int j = 0; j < g_->numJ(); ++j) {
        auto& cell = q_[(static_cast<std::size_t>(k) * g_->numI() + i) * g_->numJ() + j];
        for (const auto& o : g_->law(k, i, j))
          if (o.w != 0) cell.push_back({o.k, o.c, o.d, scalar<T>(o.w)});
      }
}

template <class T>
const std::vector<typename BeliefGame<T>::Move>& BeliefGame<T>::moves(int k, int i, int j) const {
  return q_[(static_cast<std::size_t>(k) * g_->numI() + i) * g_->numJ() + j];
}

template <class T>
std::optional<int> BeliefGame<T>::absorbingState(const SecondOrderBelief<T>& x) const {
  if (x.atoms.size() != 1) return std::nullopt;
  const auto& p = x.atoms[0].first.p;
  for (int k = 0; k < g_->numK(); ++k)
    if (g_->isAbsorbing(k) && compareScalar(p.at(k), T(1)) == 0) return k;
  return std::nullopt;
}

template <class T>
T BeliefGame<T>::payoff(const Belief<T>& p) const {
  T s = 0;
  for (int k = 0; k < g_->numK(); ++k)
    if (g_->isAbsorbing(k)) s += p.p.at(k) * scalar<T>(g_->payoff(k));
  return s;
}

template <class T>
T BeliefGame<T>::payoff(const SecondOrderBelief<T>& x) const {
  T s = 0;
  for (const auto& [p, w] : x.atoms) s += w * payoff(p);
  return s;
}

template <class T>
Joint<T> BeliefGame<T>::stageLaw(const SecondOrderBelief<T>& x, const std::vector<std::vector<T>>& a,
                                 const std::vector<T>& b) const {
  if (a.size() != x.atoms.size()) throw Error("action map must cover every atom of x");
  if (static_cast<int>(b.size()) != g_->numJ()) throw Error("mixed action of player 2 has wrong size");
  std::map<std::tuple<int, int, int>, T> mass;
  for (std::size_t at = 0; at < x.atoms.size(); ++at) {
    const auto& [p, xw] = x.atoms[at];
    if (static_cast<int>(a[at].size()) != g_->numI()) throw Error("mixed action of player 1 has wrong size");
    for (int k = 0; k < g_->numK(); ++k) {
      if (isZero(p.p[k])) continue;
      for (int i = 0; i < g_->numI(); ++i) {
        if (isZero(a[at][i])) continue;
        for (int j = 0; j < g_->numJ(); ++j) {
          if (isZero(b[j])) continue;
          T w = xw * p.p[k] * a[at][i] * b[j];
          for (const auto& m : moves(k, i, j))
            mass[{m.k, static_cast<int>(at) * g_->numC() + m.c, m.d}] += w * m.w;
        }
      }
    }
  }
  Joint<T> out;
  out.numK = g_->numK();
  for (const auto& [key, w] : mass) out.entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), w});
  return out;
}

template <class T>
ImageDistribution<T> BeliefGame<T>::transition(const SecondOrderBelief<T>& x,
                                               const std::vector<std::vector<T>>& a,
                                               const std::vector<T>& b) const {
  return image(stageLaw(x, a, b));
}

template <class T>
long BeliefGame<T>::numPureMaps(const SecondOrderBelief<T>& x) const {
  long n = 1;
  for (std::size_t i = 0; i < x.atoms.size(); ++i) {
    n *= g_->numI();
    if (n > 100'000'000) throw CapExceeded("too many pure action maps");
  }
  return n;
}

template <class T>
std::vector<int> BeliefGame<T>::pureMap(const SecondOrderBelief<T>& x, long index) const {
  std::vector<int> m;
  for (std::size_t i = 0; i < x.atoms.size(); ++i) {
    m.push_back(static_cast<int>(index % g_->numI()));
    index /= g_->numI();
  }
  return m;
}

template <class T>
std::vector<std::vector<T>> BeliefGame<T>::asMixed(const std::vector<int>& map) const {
  std::vector<std::vector<T>> a;
  for (int i : map) {
    std::vector<T> v(g_->numI(), T(0));
    v.at(i) = 1;
    a.push_back(std::move(v));
  }
  return a;
}

template <class T>
ImageDistribution<T> BeliefGame<T>::transitionPure(const SecondOrderBelief<T>& x, long map, int j) const {
  std::vector<T> b(g_->numJ(), T(0));
  b.at(j) = 1;
  return transition(x, asMixed(pureMap(x, map)), b);
}

template <class T>
std::vector<typename BeliefGame<T>::Step> BeliefGame<T>::step(const Belief<T>& p, int i, int j) const {
  std::map<std::pair<int, int>, std::vector<T>> mass;
  for (int k = 0; k < g_->numK(); ++k) {
    if (isZero(p.p.at(k))) continue;
    for (const auto& m : moves(k, i, j)) {
      auto& v = mass[{m.c, m.d}];
      if (v.empty()) v.assign(g_->numK(), T(0));
      v[m.k] += p.p[k] * m.w;
    }
  }
  std::vector<Step> out;
  for (auto& [cd, v] : mass) {
    T total = 0;
    for (const auto& w : v) total += w;
    if (isZero(total)) continue;
    Belief<T> next;
    for (const auto& w : v) next.p.push_back(w / total);
    out.push_back({cd.first, cd.second, std::move(next), total});
  }
  return out;
}

// ---------------------------------------------------------------------------
// n-stage values of the belief game

namespace {

// Affine expression over LP variables.
struct Affine {
  std::vector<std::pair<int, double>> terms;
  double constant = 0;
};

// Builds max u_root where, on a node with atom masses m (affine in the
// variables) and r stages left,
//   u <= G(m) + sum_{d : j_hat(d) = j} u_child(d)   for every j,
// the children's masses are linear in y(atom, i) >= 0, and
// sum_i y(atom, i) = m(atom). u_root / n is w_n.
template <class T>
class BeliefTreeLp {
 public:
  BeliefTreeLp(const BeliefGame<T>& bg, std::size_t cap) : bg_(bg), cap_(cap) {}

  double solve(const SecondOrderBelief<T>& x, int n) {
    std::vector<std::pair<Belief<T>, Affine>> atoms;
    for (const auto& [p, w] : x.atoms) atoms.push_back({p, Affine{{}, asDouble(w)}});
    int root = node(atoms, n);
    lp_.objective[root] = 1;
    auto r = solveLp(lp_);
    if (r.status != LpStatus::Optimal)
      throw SolverError(std::string("belief value LP: ") + toString(r.status));
    return r.objective / n;
  }

 private:
  int var(double obj, bool isFree) {
    if (static_cast<std::size_t>(lp_.numVars()) >= cap_) throw CapExceeded("belief value LP too large");
    return lp_.addVar(obj, isFree);
  }

  // Row  coef * u - sum(expr) <= 0 with expr's constant moved to the rhs.
  void bound(int u, const Affine& payoff, const std::vector<int>& children) {
    std::vector<std::pair<int, double>> row{{u, 1.0}};
    for (const auto& [v, c] : payoff.terms) row.push_back({v, -c});
    for (int ch : children) row.push_back({ch, -1.0});
    lp_.addRow(std::move(row), Sense::LE, payoff.constant);
  }

  int node(const std::vector<std::pair<Belief<T>, Affine>>& atoms, int r) {
    const SignalGame& g = bg_.signalGame();
    int u = var(0, true);
    Affine stage;
    for (const auto& [p, m] : atoms) {
      double gp = asDouble(bg_.payoff(p));
      if (gp == 0) continue;
      for (const auto& [v, c] : m.terms) stage.terms.push_back({v, gp * c});
      stage.constant += gp * m.constant;
    }
    // Absorbed: every atom is the same point mass on K*.
    if (atoms.size() == 1) {
      SecondOrderBelief<T> x{{{atoms[0].first, T(1)}}};
      if (bg_.absorbingState(x)) {
        Affine total = stage;
        for (auto& t : total.terms) t.second *= r;
        total.constant *= r;
        bound(u, total, {});
        return u;
      }
    }
    if (r == 1) {
      bound(u, stage, {});
      return u;
    }
    // y(atom, i) splits each atom's mass over player 1's actions.
    std::vector<std::vector<int>> y(atoms.size());
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      std::vector<std::pair<int, double>> row;
      for (int i = 0; i < g.numI(); ++i) {
        y[a].push_back(var(0, false));
        row.push_back({y[a].back(), 1.0});
      }
      for (const auto& [v, c] : atoms[a].second.terms) row.push_back({v, -c});
      lp_.addRow(std::move(row), Sense::EQ, atoms[a].second.constant);
    }
    for (int j = 0; j < g.numJ(); ++j) {
      std::map<int, std::map<Belief<T>, Affine>> children;  // d -> next belief -> mass
      for (std::size_t a = 0; a < atoms.size(); ++a)
        for (int i = 0; i < g.numI(); ++i)
          for (const auto& st : bg_.step(atoms[a].first, i, j))
            children[st.d][st.next].terms.push_back({y[a][i], asDouble(st.prob)});
      std::vector<int> us;
      for (const auto& [d, byBelief] : children) {
        std::vector<std::pair<Belief<T>, Affine>> next(byBelief.begin(), byBelief.end());
        us.push_back(node(next, r - 1));
      }
      bound(u, stage, us);
    }
    return u;
  }

  const BeliefGame<T>& bg_;
  std::size_t cap_;
  LinearProgram<double> lp_;
};

}  // namespace

template <class T>
double beliefValue(const BeliefGame<T>& bg, const SecondOrderBelief<T>& x, int n, std::size_t lpCap) {
  if (n < 1) throw Error("horizon must be at least 1");
  if (n == 1) return asDouble(bg.payoff(x));
  return BeliefTreeLp<T>(bg, lpCap).solve(x, n);
}

template <class T>
double beliefValue(const BeliefGame<T>& bg, const ImageDistribution<T>& z, int n, std::size_t lpCap) {
  double s = 0;
  for (const auto& [x, w] : z.atoms) s += asDouble(w) * beliefValue(bg, x, n, lpCap);
  return s;
}

template <class T>
int BeliefValues<T>::index(const SecondOrderBelief<T>& x) const {
  for (std::size_t s = 0; s < states.size(); ++s)
    if (compare(states[s], x) == 0) return static_cast<int>(s);
  return -1;
}

template <class T>
BeliefValues<T> beliefValueIteration(const BeliefGame<T>& bg, const std::vector<SecondOrderBelief<T>>& roots,
                                     int N, const BeliefValueOptions& opt) {
  if (N < 1) throw Error("horizon must be at least 1");
  const SignalGame& g = bg.signalGame();
  BeliefValues<T> out;
  std::map<SecondOrderBelief<T>, int> index;
  auto add = [&](const SecondOrderBelief<T>& x, int depth) {
    auto [it, fresh] = index.emplace(x, static_cast<int>(out.states.size()));
    if (fresh) {
      if (out.states.size() >= opt.stateCap) throw CapExceeded("belief state cap exceeded");
      out.states.push_back(x);
      out.depth.push_back(depth);
    }
    return it->second;
  };
  for (const auto& x : roots) add(x, 0);
  // kids[s][(map, j)] = law over state indices.
  std::vector<std::map<std::pair<long, int>, std::vector<std::pair<int, double>>>> kids;
  for (std::size_t s = 0; s < out.states.size(); ++s) {
    kids.emplace_back();
    if (out.depth[s] >= N - 1 || bg.absorbingState(out.states[s])) continue;
    SecondOrderBelief<T> x = out.states[s];
    int depth = out.depth[s];
    long maps = bg.numPureMaps(x);
    for (long m = 0; m < maps; ++m)
      for (int j = 0; j < g.numJ(); ++j) {
        auto law = bg.transitionPure(x, m, j);
        std::vector<std::pair<int, double>> row;
        for (const auto& [x2, w] : law.atoms) row.push_back({add(x2, depth + 1), asDouble(w)});
        kids[s][{m, j}] = std::move(row);
      }
  }
  const std::size_t S = out.states.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.w.assign(N, std::vector<double>(S, nan));
  out.pureLower.assign(N, std::vector<double>(S, nan));
  for (std::size_t s = 0; s < S; ++s) {
    double G = asDouble(bg.payoff(out.states[s]));
    bool absorbed = bg.absorbingState(out.states[s]).has_value();
    for (int m = 1; m <= N; ++m)
      out.w[m - 1][s] = (m == 1 || absorbed) ? G : beliefValue(bg, out.states[s], m, opt.lpCap);
    out.pureLower[0][s] = G;
    if (absorbed)
      for (int m = 1; m <= N; ++m) out.pureLower[m - 1][s] = G;
  }
  if (opt.pureLower) {
    for (int m = 2; m <= N; ++m)
      for (std::size_t s = 0; s < S; ++s) {
        if (kids[s].empty() || bg.absorbingState(out.states[s])) continue;
        long maps = bg.numPureMaps(out.states[s]);
        MatrixGame M(static_cast<int>(maps), g.numJ());
        bool ok = true;
        for (const auto& [key, law] : kids[s]) {
          double e = 0;
          for (const auto& [t, w] : law) e += w * out.pureLower[m - 2][t];
          if (std::isnan(e)) ok = false;
          M(static_cast<int>(key.first), key.second) = e;
        }
        if (!ok) continue;
        double G = asDouble(bg.payoff(out.states[s]));
        out.pureLower[m - 1][s] = G / m + (m - 1.0) / m * solve(M).value;
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sequence-form value of the signal game

namespace {

template <class T>
class SequenceForm {
 public:
  SequenceForm(const SignalGame& g, const Joint<T>& pi, int n, const DirectOptions& opt)
      : g_(g), pi_(pi), n_(n), opt_(opt) {}

  double solve() {
    seq1_.push_back({-1, -1});
    seq2_.push_back({-1, -1});
    for (const auto& e : pi_.entries) {
      if (isZero(e.w)) continue;
      expand(e.k, {e.c}, {e.d}, 0, 0, asDouble(e.w), 1, 0.0);
    }
    return lp() / n_;
  }

 private:
  struct Info {
    int parent;  // parent sequence
    int first;   // first child sequence
  };

  int info(std::map<SignalHistory, int>& ids, std::vector<Info>& infos, std::vector<std::pair<int, int>>& seqs,
           const SignalHistory& h, int parent, int actions) {
    auto [it, fresh] = ids.emplace(h, static_cast<int>(infos.size()));
    if (fresh) {
      infos.push_back({parent, static_cast<int>(seqs.size())});
      for (int a = 0; a < actions; ++a) seqs.push_back({it->second, a});
    } else if (infos[it->second].parent != parent) {
      throw Error("signal histories do not give perfect recall");
    }
    return it->second;
  }

  void leaf(int s1, int s2, double w) {
    if (++leaves_ > opt_.maxLeaves) throw CapExceeded("sequence-form game tree too large");
    payoff_[{s1, s2}] += w;
  }

  void expand(int k, const SignalHistory& h1, const SignalHistory& h2, int s1, int s2, double chance, int t,
              double acc) {
    if (g_.isAbsorbing(k)) {
      leaf(s1, s2, chance * (acc + (n_ - t + 1) * asDouble(g_.payoff(k))));
      return;
    }
    if (t == n_) {
      leaf(s1, s2, chance * acc);
      return;
    }
    int I1 = info(ids1_, info1_, seq1_, h1, s1, g_.numI());
    int I2 = info(ids2_, info2_, seq2_, h2, s2, g_.numJ());
    for (int i = 0; i < g_.numI(); ++i)
      for (int j = 0; j < g_.numJ(); ++j)
        for (const auto& o : g_.law(k, i, j)) {
          if (o.w == 0) continue;
          SignalHistory n1 = h1, n2 = h2;
          n1.push_back(o.c);
          n2.push_back(o.d);
          expand(o.k, n1, n2, info1_[I1].first + i, info2_[I2].first + j, chance * o.w.get_d(), t + 1, acc);
        }
  }

  // max_{r1, v} v_0 subject to player 1's realization constraints and, for
  // every sequence s2 of player 2, (F^T v)[s2] <= (A^T r1)[s2].
  double lp() {
    LinearProgram<double> lp;
    const int S1 = static_cast<int>(seq1_.size()), S2 = static_cast<int>(seq2_.size());
    for (int s = 0; s < S1; ++s) lp.addVar(0, false);
    const int v0 = lp.addVar(1, true);
    std::vector<int> vInfo;
    for (std::size_t I = 0; I < info2_.size(); ++I) vInfo.push_back(lp.addVar(0, true));
    lp.addRow({{0, 1.0}}, Sense::EQ, 1.0);
    for (const auto& I : info1_) {
      std::vector<std::pair<int, double>> row{{I.parent, -1.0}};
      for (int i = 0; i < g_.numI(); ++i) row.push_back({I.first + i, 1.0});
      lp.addRow(std::move(row), Sense::EQ, 0.0);
    }
    std::vector<std::vector<std::pair<int, double>>> rows(S2);
    rows[0].push_back({v0, 1.0});
    for (std::size_t I = 0; I < info2_.size(); ++I) {
      for (int j = 0; j < g_.numJ(); ++j) rows[info2_[I].first + j].push_back({vInfo[I], 1.0});
      rows[info2_[I].parent].push_back({vInfo[I], -1.0});
    }
    for (const auto& [key, w] : payoff_) rows[key.second].push_back({key.first, -w});
    for (auto& row : rows) lp.addRow(std::move(row), Sense::LE, 0.0);
    auto r = solveLp(lp);
    if (r.status != LpStatus::Optimal) throw SolverError(std::string("sequence-form LP: ") + toString(r.status));
    return r.objective;
  }

  const SignalGame& g_;
  const Joint<T>& pi_;
  int n_;
  DirectOptions opt_;
  std::size_t leaves_ = 0;
  std::map<SignalHistory, int> ids1_, ids2_;
  std::vector<Info> info1_, info2_;
  std::vector<std::pair<int, int>> seq1_, seq2_;  // (info set, action); 0 is the empty sequence
  std::map<std::pair<int, int>, double> payoff_;
};

}  // namespace

template <class T>
double directVn(const SignalGame& g, const Joint<T>& pi, int n, const DirectOptions& opt) {
  if (n < 1) throw Error("horizon must be at least 1");
  if (n > opt.maxStages) throw CapExceeded("directVn is limited to " + std::to_string(opt.maxStages) + " stages");
  g.check();
  image(pi);  // rejects laws outside Delta^1
  return SequenceForm<T>(g, pi, n, opt).solve();
}

// ---------------------------------------------------------------------------
// Mimicking strategy

namespace {

template <class T>
struct Mimic {
  SignalGamePtr g;
  Joint<T> pi;
  BeliefStrategy<T> sigmaHat;
  std::map<SignalHistory, std::vector<T>> acts;
  std::map<SignalHistory, SecondOrderBelief<T>> xs;

  std::vector<T> act(const SignalHistory& h1) {
    if (auto it = acts.find(h1); it != acts.end()) return it->second;
    if (h1.empty()) throw Error("empty history");
    int d1 = -1;
    for (const auto& e : pi.entries)
      if (e.c == h1[0] && !isZero(e.w)) d1 = e.d;
    if (d1 < 0) throw ZeroProbability("initial signal has probability 0");
    SignalHistory h2{d1};
    for (std::size_t s = 1; s < h1.size(); ++s) h2.push_back(g->dHat(h1[s]));
    Strategy1<T> self = [this](const SignalHistory& h) { return act(h); };
    std::vector<SecondOrderBelief<T>> path;
    for (std::size_t s = 1; s <= h2.size(); ++s) {
      SignalHistory prefix(h2.begin(), h2.begin() + s);
      auto it = xs.find(prefix);
      if (it == xs.end()) it = xs.emplace(prefix, updateX(*g, pi, self, prefix)).first;
      path.push_back(it->second);
    }
    Belief<T> p = updateP(*g, pi, h1, &self);
    const auto& x = path.back();
    auto a = sigmaHat(path);
    if (a.size() != x.atoms.size()) throw Error("belief strategy returned the wrong number of actions");
    for (std::size_t at = 0; at < x.atoms.size(); ++at)
      if (compare(x.atoms[at].first, p) == 0) return acts[h1] = a[at];
    throw Error("player 1's belief is not in the support of x_t");
  }
};

}  // namespace

template <class T>
Strategy1<T> mimicStrategy(SignalGamePtr g, Joint<T> pi, BeliefStrategy<T> sigmaHat) {
  auto m = std::make_shared<Mimic<T>>();
  m->g = std::move(g);
  m->pi = std::move(pi);
  m->sigmaHat = std::move(sigmaHat);
  return [m](const SignalHistory& h1) { return m->act(h1); };
}

// ---------------------------------------------------------------------------

#define RGAME_SIGNALS_INSTANTIATE(T)                                                                       \
  template int compare(const Belief<T>&, const Belief<T>&);                                                \
  template int compare(const SecondOrderBelief<T>&, const SecondOrderBelief<T>&);                          \
  template int compare(const ImageDistribution<T>&, const ImageDistribution<T>&);                          \
  template void canonicalize(std::vector<std::pair<Belief<T>, T>>&);                                       \
  template void canonicalize(std::vector<std::pair<SecondOrderBelief<T>, T>>&);                            \
  template SecondOrderBelief<T> dirac(const Belief<T>&);                                                   \
  template Joint<T> initialLaw(const SignalGame&);                                                         \
  template ImageDistribution<T> image(const Joint<T>&);                                                    \
  template CanonicalLaw<T> canonicalPi(const ImageDistribution<T>&, int);                                  \
  template T wasserstein(const SecondOrderBelief<T>&, const SecondOrderBelief<T>&);                        \
  template T wassersteinDual(const SecondOrderBelief<T>&, const SecondOrderBelief<T>&);                    \
  template Belief<T> updateP(const SignalGame&, const Joint<T>&, const SignalHistory&, const Strategy1<T>*); \
  template SecondOrderBelief<T> updateX(const SignalGame&, const Joint<T>&, const Strategy1<T>&,            \
                                        const SignalHistory&);                                             \
  template class BeliefGame<T>;                                                                            \
  template double beliefValue(const BeliefGame<T>&, const SecondOrderBelief<T>&, int, std::size_t);        \
  template double beliefValue(const BeliefGame<T>&, const ImageDistribution<T>&, int, std::size_t);        \
  template struct BeliefValues<T>;                                                                         \
  template BeliefValues<T> beliefValueIteration(const BeliefGame<T>&, const std::vector<SecondOrderBelief<T>>&, \
                                                int, const BeliefValueOptions&);                           \
  template double directVn(const SignalGame&, const Joint<T>&, int, const DirectOptions&);                 \
  template Strategy1<T> mimicStrategy(SignalGamePtr, Joint<T>, BeliefStrategy<T>);

RGAME_SIGNALS_INSTANTIATE(Rational)
RGAME_SIGNALS_INSTANTIATE(double)

}  // namespace rgame
