#include "rgame/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace rgame {

MatrixGame::MatrixGame(int rows, int cols, double fill)
    : m_(rows), n_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows < 1 || cols < 1) throw Error("matrix game needs at least one row and column");
}

MatrixGame::MatrixGame(const std::vector<std::vector<double>>& entries)
    : MatrixGame(static_cast<int>(entries.size()),
                 entries.empty() ? 0 : static_cast<int>(entries[0].size())) {
  for (int i = 0; i < m_; ++i) {
    if (static_cast<int>(entries[i].size()) != n_) throw Error("ragged matrix");
    for (int j = 0; j < n_; ++j) {
      if (!std::isfinite(entries[i][j])) throw Error("non-finite matrix entry");
      (*this)(i, j) = entries[i][j];
    }
  }
}

double MatrixGame::minEntry() const { return *std::min_element(a_.begin(), a_.end()); }
double MatrixGame::maxEntry() const { return *std::max_element(a_.begin(), a_.end()); }

MatrixGame MatrixGame::transposedNegated() const {
  MatrixGame t(n_, m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < n_; ++j) t(j, i) = -(*this)(i, j);
  return t;
}

double payoff(const MatrixGame& g, const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) s += x[i] * g(i, j) * y[j];
  return s;
}

std::optional<std::pair<int, int>> hasPureSaddle(const MatrixGame& g) {
  std::vector<double> rowMin(g.rows(), std::numeric_limits<double>::infinity());
  std::vector<double> colMax(g.cols(), -std::numeric_limits<double>::infinity());
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      rowMin[i] = std::min(rowMin[i], g(i, j));
      colMax[j] = std::max(colMax[j], g(i, j));
    }
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      if (g(i, j) == rowMin[i] && g(i, j) == colMax[j]) return std::make_pair(i, j);
  return std::nullopt;
}

namespace {

void guarantees(const MatrixGame& g, MatrixSolution& s) {
  s.rowGuarantee = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.cols(); ++j) {
    double v = 0;
    for (int i = 0; i < g.rows(); ++i) v += s.rowStrategy[i] * g(i, j);
    s.rowGuarantee = std::min(s.rowGuarantee, v);
  }
  s.colGuarantee = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.rows(); ++i) {
    double v = 0;
    for (int j = 0; j < g.cols(); ++j) v += g(i, j) * s.colStrategy[j];
    s.colGuarantee = std::max(s.colGuarantee, v);
  }
}

std::vector<double> cleaned(std::vector<double> p) {
  double total = 0;
  for (double& v : p) {
    if (v < 0) v = 0;
    total += v;
  }
  if (total <= 0) throw SolverError("degenerate strategy from LP");
  for (double& v : p) v /= total;
  return p;
}

}  // namespace

MatrixSolution solve(const MatrixGame& g, double tol) {
  MatrixSolution s;
  const int m = g.rows(), n = g.cols();
  if (auto saddle = hasPureSaddle(g)) {
    s.pureRow = saddle->first;
    s.pureCol = saddle->second;
    s.rowStrategy.assign(m, 0.0);
    s.colStrategy.assign(n, 0.0);
    s.rowStrategy[saddle->first] = 1;
    s.colStrategy[saddle->second] = 1;
    s.value = g(saddle->first, saddle->second);
    s.rowGuarantee = s.colGuarantee = s.value;
    return s;
  }
  const double shift = 1.0 - g.minEntry();

  LinearProgram<double> row;
  for (int i = 0; i < m; ++i) row.addVar();
  int z = row.addVar(1.0);
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<int, double>> c;
    for (int i = 0; i < m; ++i) c.emplace_back(i, g(i, j) + shift);
    c.emplace_back(z, -1.0);
    row.addRow(std::move(c), Sense::GE, 0.0);
  }
  {
    std::vector<std::pair<int, double>> c;
    for (int i = 0; i < m; ++i) c.emplace_back(i, 1.0);
    row.addRow(std::move(c), Sense::EQ, 1.0);
  }

  LinearProgram<double> col;
  for (int j = 0; j < n; ++j) col.addVar();
  int w = col.addVar(-1.0);
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> c;
    for (int j = 0; j < n; ++j) c.emplace_back(j, g(i, j) + shift);
    c.emplace_back(w, -1.0);
    col.addRow(std::move(c), Sense::LE, 0.0);
  }
  {
    std::vector<std::pair<int, double>> c;
    for (int j = 0; j < n; ++j) c.emplace_back(j, 1.0);
    col.addRow(std::move(c), Sense::EQ, 1.0);
  }

  auto r1 = solveLp(row);
  auto r2 = solveLp(col);
  if (r1.status != LpStatus::Optimal || r2.status != LpStatus::Optimal)
    throw SolverError(std::string("matrix game LP failed: ") + toString(r1.status) + "/" +
                      toString(r2.status));
  s.rowStrategy = cleaned(std::vector<double>(r1.x.begin(), r1.x.begin() + m));
  s.colStrategy = cleaned(std::vector<double>(r2.x.begin(), r2.x.begin() + n));
  guarantees(g, s);
  s.value = 0.5 * (s.rowGuarantee + s.colGuarantee);
  if (s.rowGuarantee < s.value - tol || s.colGuarantee > s.value + tol)
    throw SolverError("matrix game guarantees miss the value: row " +
                      std::to_string(s.rowGuarantee) + ", col " + std::to_string(s.colGuarantee));
  return s;
}

namespace {

// Calls f on every point of the simplex grid with the given resolution.
void forEachGridPoint(int dim, int res, const std::function<void(const std::vector<double>&)>& f) {
  std::vector<double> p(dim);
  if (dim == 1) {
    p[0] = 1;
    f(p);
  } else if (dim == 2) {
    for (int k = 0; k <= res; ++k) {
      p[0] = static_cast<double>(k) / res;
      p[1] = static_cast<double>(res - k) / res;
      f(p);
    }
  } else {
    for (int a = 0; a <= res; ++a)
      for (int b = 0; a + b <= res; ++b) {
        p[0] = static_cast<double>(a) / res;
        p[1] = static_cast<double>(b) / res;
        p[2] = static_cast<double>(res - a - b) / res;
        f(p);
      }
  }
}

}  // namespace

double oracleSolve(const MatrixGame& g, int gridResolution) {
  if (g.rows() > 3 || g.cols() > 3) throw Error("oracleSolve supports at most 3x3");
  if (gridResolution < 1) throw Error("grid resolution must be positive");
  double lower = -std::numeric_limits<double>::infinity();
  forEachGridPoint(g.rows(), gridResolution, [&](const std::vector<double>& x) {
    double worst = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.cols(); ++j) {
      double v = 0;
      for (int i = 0; i < g.rows(); ++i) v += x[i] * g(i, j);
      worst = std::min(worst, v);
    }
    lower = std::max(lower, worst);
  });
  double upper = std::numeric_limits<double>::infinity();
  forEachGridPoint(g.cols(), gridResolution, [&](const std::vector<double>& y) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.rows(); ++i) {
      double v = 0;
      for (int j = 0; j < g.cols(); ++j) v += g(i, j) * y[j];
      worst = std::max(worst, v);
    }
    upper = std::min(upper, worst);
  });
  return 0.5 * (lower + upper);
}

}  // namespace rgame
