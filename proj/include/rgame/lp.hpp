#pragma once

#include <utility>
#include <vector>

#include "rgame/rational.hpp"

namespace rgame {

enum class Sense { LE, GE, EQ };
enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* toString(LpStatus s);

// maximize c'x subject to rows, x >= 0 unless marked free.
template <class T>
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, T>> coeffs;
    Sense sense;
    T rhs;
  };

  std::vector<T> objective;
  std::vector<bool> freeVar;
  std::vector<Row> rows;

  int addVar(T obj = T(0), bool isFree = false) {
    objective.push_back(obj);
    freeVar.push_back(isFree);
    return static_cast<int>(objective.size()) - 1;
  }
  void addRow(std::vector<std::pair<int, T>> coeffs, Sense sense, T rhs) {
    rows.push_back({std::move(coeffs), sense, std::move(rhs)});
  }
  int numVars() const { return static_cast<int>(objective.size()); }
};

template <class T>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  T objective = T(0);
  std::vector<T> x;
  int pivots = 0;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

// Dense two-phase tableau simplex. Dantzig pricing, switching to Bland's
// rule after a run of degenerate pivots so cycling cannot occur. The
// double instantiation uses absolute tolerance 1e-11 and first solves a
// right-hand side jittered by about 1e-9, reading the solution off the
// exact right-hand side at the final basis; Rational is exact.
template <class T>
LpResult<T> solveLp(const LinearProgram<T>& lp, int maxPivots = 200000);

extern template LpResult<double> solveLp(const LinearProgram<double>&, int);
extern template LpResult<Rational> solveLp(const LinearProgram<Rational>&, int);

}  // namespace rgame
