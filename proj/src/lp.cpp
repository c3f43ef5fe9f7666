#include "rgame/lp.hpp"

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>

namespace rgame {

const char* toString(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration limit";
  }
  return "?";
}

namespace {

template <class T>
struct Num;

template <>
struct Num<double> {
  static constexpr double eps = 1e-11;
  static bool pos(double x) { return x > eps; }
  static bool zero(double x) { return std::fabs(x) <= eps; }
  static double abs(double x) { return std::fabs(x); }
};

template <>
struct Num<Rational> {
  static bool pos(const Rational& x) { return sgn(x) > 0; }
  static bool zero(const Rational& x) { return sgn(x) == 0; }
  static Rational abs(const Rational& x) { return ::abs(x); }
};

template <class T>
class Tableau {
 public:
  // With `shadow`, column n + 1 carries an unperturbed copy of the
  // right-hand side through every pivot.
  Tableau(int m, int n, bool shadow)
      : m_(m), n_(n), w_(n + (shadow ? 2 : 1)), a_(static_cast<std::size_t>(m) * w_), obj_(w_), basis_(m, -1),
        banned_(n, false) {}

  T& at(int i, int j) { return a_[static_cast<std::size_t>(i) * w_ + j]; }
  T& rhs(int i) { return at(i, n_); }
  T& exact(int i) { return at(i, w_ - 1); }
  bool hasShadow() const { return w_ == n_ + 2; }

  // Replaces the working right-hand side by the exact one plus a small
  // positive jitter. This is B^-1 of a nearby b, so any basis optimal for
  // it is dual feasible for the original and degenerate ties disappear.
  void perturb(std::uint64_t salt) {
    if constexpr (!std::is_same_v<T, double>) return;
    for (int i = 0; i < m_; ++i) {
      salt = salt * 6364136223846793005ULL + 1442695040888963407ULL;
      double u = static_cast<double>(salt >> 11) / 9007199254740992.0;
      T e = exact(i);
      rhs(i) = std::max(e, T(0)) + 1e-9 * (1 + u) * (1 + Num<T>::abs(e));
    }
  }
  std::vector<T>& obj() { return obj_; }
  std::vector<int>& basis() { return basis_; }
  std::vector<bool>& banned() { return banned_; }
  int rows() const { return m_; }
  int cols() const { return n_; }

  // Sets reduced costs for cost vector c given the current basis.
  void price(const std::vector<T>& c) {
    for (int j = 0; j < n_; ++j) obj_[j] = c[j];
    for (int j = n_; j < w_; ++j) obj_[j] = T(0);
    for (int i = 0; i < m_; ++i) {
      const T& cb = c[basis_[i]];
      if (Num<T>::zero(cb)) continue;
      for (int j = 0; j < w_; ++j) obj_[j] -= cb * at(i, j);
    }
  }

  void pivot(int p, int q) {
    T piv = at(p, q);
    for (int j = 0; j < w_; ++j) at(p, j) /= piv;
    at(p, q) = T(1);
    for (int i = 0; i < m_; ++i) {
      if (i == p) continue;
      T f = at(i, q);
      if (Num<T>::zero(f)) {
        if constexpr (std::is_same_v<T, double>) at(i, q) = 0.0;
        continue;
      }
      for (int j = 0; j < w_; ++j) at(i, j) -= f * at(p, j);
      at(i, q) = T(0);
    }
    T f = obj_[q];
    if (!Num<T>::zero(f))
      for (int j = 0; j < w_; ++j) obj_[j] -= f * at(p, j);
    obj_[q] = T(0);
    basis_[p] = q;
  }

  // Runs simplex iterations maximizing the priced objective.
  LpStatus optimize(int& pivots, int maxPivots) {
    int degenerate = 0;
    bool bland = false;
    while (true) {
      int q = -1;
      for (int j = 0; j < n_; ++j) {
        if (banned_[j] || !Num<T>::pos(obj_[j])) continue;
        if (q < 0) {
          q = j;
          if (bland) break;
        } else if (obj_[j] > obj_[q]) {
          q = j;
        }
      }
      if (q < 0) return LpStatus::Optimal;
      int p = -1;
      T best{};
      for (int i = 0; i < m_; ++i) {
        const T& aiq = at(i, q);
        if (!Num<T>::pos(aiq)) continue;
        T ratio = rhs(i) / aiq;
        if (p < 0 || ratio < best) {
          p = i;
          best = ratio;
        } else if (ratio == best || (std::is_same_v<T, double> && Num<T>::zero(ratio - best))) {
          bool better = bland ? basis_[i] < basis_[p] : Num<T>::abs(aiq) > Num<T>::abs(at(p, q));
          if (better) {
            p = i;
            best = ratio;
          }
        }
      }
      if (p < 0) return LpStatus::Unbounded;
      if (++pivots > maxPivots) return LpStatus::IterationLimit;
      // Near-degenerate steps in double mode can reset a run of degenerate
      // pivots without making progress, so count them in total.
      if (Num<T>::zero(rhs(p)) && ++degenerate > 50) bland = true;
      pivot(p, q);
      if constexpr (std::is_same_v<T, double>) {
        for (int i = 0; i < m_; ++i)
          if (rhs(i) < 0 && rhs(i) > -Num<T>::eps) rhs(i) = 0.0;
      }
    }
  }

 private:
  int m_, n_, w_;
  std::vector<T> a_;
  std::vector<T> obj_;
  std::vector<int> basis_;
  std::vector<bool> banned_;
};

// One two-phase run. `perturbed` only applies to double; it returns
// nullopt when the final basis is not feasible for the exact data.
template <class T>
std::optional<LpResult<T>> attempt(const LinearProgram<T>& lp, int maxPivots, bool perturbed) {
  const int nv = lp.numVars();
  // Column layout: split structural vars, then slacks/surplus, then artificials.
  std::vector<int> posCol(nv), negCol(nv, -1);
  int col = 0;
  for (int v = 0; v < nv; ++v) {
    posCol[v] = col++;
    if (lp.freeVar[v]) negCol[v] = col++;
  }
  const int m = static_cast<int>(lp.rows.size());
  std::vector<int> slackCol(m, -1), artCol(m, -1);
  std::vector<bool> flip(m, false);
  std::vector<Sense> sense(m);
  for (int i = 0; i < m; ++i) {
    const auto& r = lp.rows[i];
    flip[i] = r.rhs < T(0);
    sense[i] = r.sense;
    if (flip[i] && r.sense != Sense::EQ) sense[i] = r.sense == Sense::LE ? Sense::GE : Sense::LE;
    if (sense[i] != Sense::EQ) slackCol[i] = col++;
  }
  for (int i = 0; i < m; ++i)
    if (sense[i] != Sense::LE) artCol[i] = col++;
  const int n = col;

  Tableau<T> tab(m, n, perturbed);
  for (int i = 0; i < m; ++i) {
    const auto& r = lp.rows[i];
    T sign = flip[i] ? T(-1) : T(1);
    for (const auto& [v, c] : r.coeffs) {
      tab.at(i, posCol[v]) += sign * c;
      if (negCol[v] >= 0) tab.at(i, negCol[v]) -= sign * c;
    }
    tab.rhs(i) = sign * r.rhs;
    if (perturbed) tab.exact(i) = tab.rhs(i);
    if (sense[i] == Sense::LE) {
      tab.at(i, slackCol[i]) = T(1);
      tab.basis()[i] = slackCol[i];
    } else {
      if (sense[i] == Sense::GE) tab.at(i, slackCol[i]) = T(-1);
      tab.at(i, artCol[i]) = T(1);
      tab.basis()[i] = artCol[i];
    }
  }

  LpResult<T> res;
  bool anyArt = false;
  for (int i = 0; i < m; ++i) anyArt = anyArt || artCol[i] >= 0;
  if (anyArt) {
    std::vector<T> c1(n, T(0));
    for (int i = 0; i < m; ++i)
      if (artCol[i] >= 0) c1[artCol[i]] = T(-1);
    tab.price(c1);
    if (perturbed) tab.perturb(1);
    LpStatus st = tab.optimize(res.pivots, maxPivots);
    if (st == LpStatus::IterationLimit) {
      res.status = st;
      return res;
    }
    // Phase-one optimum is -(sum of artificials).
    T infeas = tab.obj()[perturbed ? n + 1 : n];
    T scale(1);
    for (int i = 0; i < m; ++i) scale = std::max(scale, Num<T>::abs(lp.rows[i].rhs));
    bool infeasible;
    if constexpr (std::is_same_v<T, double>) infeasible = std::fabs(infeas) > 1e-9 * scale;
    else infeasible = sgn(infeas) != 0;
    if (infeasible) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    std::vector<bool> isArt(n, false);
    for (int i = 0; i < m; ++i)
      if (artCol[i] >= 0) isArt[artCol[i]] = true;
    for (int i = 0; i < m; ++i) {
      if (!isArt[tab.basis()[i]]) continue;
      int q = -1;
      for (int j = 0; j < n; ++j) {
        if (isArt[j] || Num<T>::zero(tab.at(i, j))) continue;
        if (q < 0 || Num<T>::abs(tab.at(i, j)) > Num<T>::abs(tab.at(i, q))) q = j;
      }
      if (q >= 0) tab.pivot(i, q);
    }
    for (int j = 0; j < n; ++j)
      if (isArt[j]) tab.banned()[j] = true;
  }

  std::vector<T> c2(n, T(0));
  for (int v = 0; v < nv; ++v) {
    c2[posCol[v]] = lp.objective[v];
    if (negCol[v] >= 0) c2[negCol[v]] = -lp.objective[v];
  }
  tab.price(c2);
  if (perturbed) tab.perturb(2);
  res.status = tab.optimize(res.pivots, maxPivots);
  if (res.status != LpStatus::Optimal) return res;

  std::vector<T> colVal(n, T(0));
  for (int i = 0; i < m; ++i) {
    T v = perturbed ? tab.exact(i) : tab.rhs(i);
    if (perturbed) {
      if (v < -1e-9) return std::nullopt;
      if (v < T(0)) v = T(0);
    }
    colVal[tab.basis()[i]] = v;
  }
  res.x.assign(nv, T(0));
  for (int v = 0; v < nv; ++v) {
    res.x[v] = colVal[posCol[v]];
    if (negCol[v] >= 0) res.x[v] -= colVal[negCol[v]];
  }
  res.objective = T(0);
  for (int v = 0; v < nv; ++v) res.objective += lp.objective[v] * res.x[v];
  return res;
}

}  // namespace

template <class T>
LpResult<T> solveLp(const LinearProgram<T>& lp, int maxPivots) {
  if constexpr (std::is_same_v<T, double>) {
    if (auto r = attempt(lp, maxPivots, true)) return *r;
  }
  return *attempt(lp, maxPivots, false);
}

template LpResult<double> solveLp(const LinearProgram<double>&, int);
template LpResult<Rational> solveLp(const LinearProgram<Rational>&, int);

}  // namespace rgame
