#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rgame/lp.hpp"

namespace rgame {

// Row player maximizes.
class MatrixGame {
 public:
  MatrixGame(int rows, int cols, double fill = 0.0);
  explicit MatrixGame(const std::vector<std::vector<double>>& entries);

  int rows() const { return m_; }
  int cols() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double minEntry() const;
  double maxEntry() const;
  MatrixGame transposedNegated() const;

 private:
  int m_, n_;
  std::vector<double> a_;
};

struct MatrixSolution {
  double value = 0;
  std::vector<double> rowStrategy, colStrategy;
  std::optional<int> pureRow, pureCol;
  double rowGuarantee = 0;  // min_j x'A e_j
  double colGuarantee = 0;  // max_i e_i'A y
};

constexpr double kDefaultTol = 1e-9;

// Value and optimal strategies. Pure saddles short-circuit the LP. Throws
// SolverError if the LP fails or the returned strategies miss the value by
// more than tol.
MatrixSolution solve(const MatrixGame& g, double tol = kDefaultTol);

// Smallest (row, col) saddle point, if any.
std::optional<std::pair<int, int>> hasPureSaddle(const MatrixGame& g);

// Independent grid search over mixed strategies (m, n <= 3). Returns the
// midpoint of the best grid maximin and the best grid minimax.
double oracleSolve(const MatrixGame& g, int gridResolution);

// Expected payoff of mixed strategies.
double payoff(const MatrixGame& g, const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rgame
