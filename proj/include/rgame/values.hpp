#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgame/game.hpp"
#include "rgame/matrix.hpp"

namespace rgame {

class MissingValue : public Error {
 public:
  using Error::Error;
};

// Partial map from states to reals.
class ValueFunction {
 public:
  void set(const StateId& x, double v) { values_[x] = v; }
  bool contains(const StateId& x) const { return values_.count(x) > 0; }
  double at(const StateId& x) const;
  std::size_t size() const { return values_.size(); }
  const std::map<StateId, double>& values() const { return values_; }
  double supDistance(const ValueFunction& other) const;  // over the common domain

 private:
  std::map<StateId, double> values_;
};

// One Shapley step on an arbitrary game: for every active state of vPrev's
// domain, v(x) = n/(n+1) * val E_q[vPrev]; absorbing states get g. Throws
// MissingValue naming the state whose successor is undefined.
ValueFunction shapleyStep(const Game& game, const ValueFunction& vPrev, int n);

struct DepthPolicy {
  enum class Mode { Sweep, Targeted };
  // Sweep: every explored state is updated each step and frontier states are
  // pinned at the pessimistic/optimistic payoff (two runs bracket the truth).
  // Targeted: v_n is only computed where depth <= D - n, which makes the
  // horizon-N value at the roots exact for the depth-D truncation.
  Mode mode = Mode::Sweep;
  int depth = -1;  // exploration depth; -1 = closure (sweep) or N (targeted)
  std::size_t stateCap = 5'000'000;
  bool keepHistory = true;      // store v_n on all states for every n
  bool recordProfiles = false;  // store per-step optimal mixed actions
  bool strictDrift = false;     // throw on a drift-bound violation
};

struct DriftViolation {
  int n;
  StateId state;
  double drift, bound;
};

class ValueSequence {
 public:
  int horizon() const { return horizon_; }
  DepthPolicy::Mode mode() const { return mode_; }
  const ExploredGame& explored() const { return *explored_; }
  std::shared_ptr<const ExploredGame> exploredPtr() const { return explored_; }
  bool hasHistory() const { return !lower_.empty(); }
  bool hasProfiles() const { return !rowProf_.empty(); }

  // Whether v_n(s) is computed (targeted mode restricts by depth).
  bool valid(int n, int s) const;
  double lower(int n, int s) const;
  double upper(int n, int s) const;
  double value(int n, int s) const { return lower(n, s); }
  double value(int n, const StateId& x) const { return lower(n, explored_->at(x)); }
  // Values of v_n at valid states (lower run).
  ValueFunction function(int n) const;

  // Watched-state trajectories, available in every mode.
  const std::vector<StateId>& watched() const { return watch_; }
  double watchedLower(int w, int n) const { return watchLower_[w][n]; }
  double watchedUpper(int w, int n) const { return watchUpper_[w][n]; }

  // Optimal first-stage mixed actions of the n-stage game at s.
  std::span<const double> rowProfile(int n, int s) const;
  std::span<const double> colProfile(int n, int s) const;

  // drift(n) = sup |v_n - v_{n+1}| over states valid for both, n >= 1.
  double drift(int n) const { return drift_.at(n); }
  const std::vector<DriftViolation>& driftViolations() const { return violations_; }
  bool hasFrontier() const { return explored_->frontierCount() > 0; }

 private:
  friend ValueSequence computeVn(GamePtr, const std::vector<StateId>&, int, const DepthPolicy&,
                                 const std::vector<StateId>&);
  std::shared_ptr<const ExploredGame> explored_;
  int horizon_ = 0;
  DepthPolicy::Mode mode_ = DepthPolicy::Mode::Sweep;
  int depthBound_ = -1;
  std::vector<std::vector<double>> lower_, upper_;  // [n][s] when keepHistory
  std::vector<StateId> watch_;
  std::vector<std::vector<double>> watchLower_, watchUpper_;  // [w][n]
  std::vector<std::size_t> rowOff_, colOff_;
  std::vector<std::vector<double>> rowProf_, colProf_;  // [n][offset]
  std::vector<double> drift_;
  std::vector<DriftViolation> violations_;
};

// Iterates the Shapley operator from v_0 = (payoffs on absorbing, 0 on
// active) for n = 1..N. The roots seed the exploration; watched states must
// lie in the explored set.
ValueSequence computeVn(GamePtr game, const std::vector<StateId>& roots, int N,
                        const DepthPolicy& policy = {}, const std::vector<StateId>& watch = {});
inline ValueSequence computeVn(GamePtr game, const StateId& x0, int N,
                               const DepthPolicy& policy = {},
                               const std::vector<StateId>& watch = {}) {
  return computeVn(std::move(game), std::vector<StateId>{x0}, N, policy, watch);
}

struct DiscountedValues {
  std::shared_ptr<const ExploredGame> explored;
  double lambda = 0;
  std::vector<double> lower, upper;  // frontier pinned low / high
  double residual = 0;               // sup-norm residual after return
  int sweeps = 0;

  ValueFunction function() const;
  double value(const StateId& x) const { return lower[explored->at(x)]; }
  std::pair<double, double> bracket(const StateId& x) const;
};

// Fixed point of w = (1 - lambda) val E_q[w] on active states, w = g on
// absorbing ones, by Gauss-Seidel sweeps in decreasing depth order until the
// Jacobi residual is <= tol. depth < 0 picks the smallest depth at which the
// frontier's discounted weight (1 - lambda)^D (high - low) drops below tol.
DiscountedValues computeVLambda(GamePtr game, const StateId& x0, double lambda, double tol,
                                int depth = -1, std::size_t stateCap = 5'000'000);

struct EpsilonNet {
  double eps = 0;
  std::vector<int> representatives;  // horizons n of the chosen v_n
  std::vector<int> assignment;       // assignment[n-1] = index into representatives
};

// Greedy cover of {v_1..v_N} in sup norm over the given states (default: all
// explored states). Needs the full history.
EpsilonNet epsilonNet(const ValueSequence& seq, double eps,
                      const std::vector<StateId>& states = {});

// Per-state max of the last tailWindow computed values.
ValueFunction estimateLimsup(const ValueSequence& seq, int tailWindow = 100);
// Same on an explicit list v_1..v_N; states missing from any of the window's
// functions are skipped.
ValueFunction estimateLimsup(const std::vector<ValueFunction>& seq, int tailWindow = 100);

// Value of the one-shot game at explored active state s with payoffs E_q[f].
MatrixGame oneShotMatrix(const ExploredGame& e, int s, std::span<const double> f);

}  // namespace rgame
