#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rgame/game.hpp"
#include "rgame/values.hpp"

namespace rgame {

// Probability vector over the owner's action list at a state. Empty at
// absorbing states, where no action is played.
using Mixed = std::vector<double>;

// Per-stage optimal mixed actions assembled from a ValueSequence: the owner
// plays action(k, x) when k stages remain (including the current one).
class MarkovProfile {
 public:
  int horizon() const { return horizon_; }
  int owner() const { return owner_; }
  const ExploredGame& explored() const { return *explored_; }
  std::shared_ptr<const ExploredGame> exploredPtr() const { return explored_; }
  bool has(int stagesRemaining, int s) const;
  Mixed action(int stagesRemaining, const StateId& x) const;
  Mixed action(int stagesRemaining, int s) const;

 private:
  friend MarkovProfile markovOptimal(const ValueSequence&, int, int, double);
  std::shared_ptr<const ExploredGame> explored_;
  int horizon_ = 0, owner_ = 1;
  std::vector<std::size_t> offset_;
  std::vector<std::vector<double>> table_;  // [k][offset]; NaN where not recorded
};

// Exact guarantee of a Markov profile in the horizon-stage game from every
// explored state: the opponent's best reply by backward induction. Entries
// are NaN where the profile lacks records.
std::vector<double> profileGuarantee(const MarkovProfile& profile);

// Needs a sequence computed with recordProfiles. owner 1 uses the row
// strategies, owner 2 the column strategies. Throws when the re-verified
// guarantee misses v_n by more than tol at a valid active state.
MarkovProfile markovOptimal(const ValueSequence& seq, int n, int owner, double tol = 1e-8);

// s*: row strategies of the one-shot games G^v.
struct StationaryProfile {
  struct Entry {
    Mixed action;
    double oneShotValue = 0;  // val G^v at the state
    double slack = 0;         // min_b E_{q(x,s*,b)}[v] - v(x)
  };
  std::map<StateId, Entry> entries;
  double tol = 0;
  std::vector<StateId> violations;  // states with slack < -tol

  Mixed action(const StateId& x) const;
  double minSlack() const;
};

// Solves G^v at every active state of `states` (default: every active state
// of v's domain). v must be defined on their successors.
StationaryProfile sStar(const Game& game, const ValueFunction& v, double tol,
                        const std::vector<StateId>& states = {});

struct Certificate {
  double M = 0;
  int n0 = 0;  // requested search bound
  std::map<StateId, int> n;  // smallest n <= n0 with v_n(x) >= M
  std::vector<StateId> failures;
  bool ok() const { return failures.empty(); }
  int maxN() const;
};

// Over every explored active state valid up to n0 (lower bracket values).
// With a target, the threshold at x becomes max(M, target(x) - slack).
Certificate positiveCertificate(const ValueSequence& seq, double M, int n0,
                                const ValueFunction* target = nullptr, double slack = 0);

// l* = ceil(ln(delta) / ln(1 - M)): blocks needed so that (1 - M)^l* <= delta.
int blocksNeeded(double M, double delta);

// Internal state of a state-driven strategy automaton.
struct Node {
  int phase = 0;       // alternating mode: 0 even (s*), 1 odd (block)
  int phaseIndex = 0;  // phases started so far
  StateId anchor;      // block anchor
  int j = 0;           // stage within the current block, from 1
  int k = 0;           // sampled block length
  int t = 0;           // absolute stage (Markov adapters only)
  auto operator<=>(const Node&) const = default;
};
using NodeDist = std::vector<std::pair<Node, double>>;

// A strategy that depends on the history only through the sequence of states
// and its own randomness. Actions never enter start/advance, which makes the
// strategy blind to both players' actions by construction.
class StateStrategy {
 public:
  virtual ~StateStrategy() = default;
  virtual std::string id() const = 0;
  virtual int owner() const { return 1; }
  virtual NodeDist start(const StateId& x1) const = 0;
  virtual Mixed act(const Node& node, const StateId& x) const = 0;
  virtual NodeDist advance(const Node& node, const StateId& next) const = 0;
};
using StrategyPtr = std::shared_ptr<const StateStrategy>;

// Plays profile.action(horizon - t + 1, x) at stage t (the last table once
// the horizon is exceeded).
StrategyPtr markovStrategy(std::shared_ptr<const MarkovProfile> profile);
StrategyPtr stationaryStrategy(GamePtr game, std::shared_ptr<const StationaryProfile> profile,
                               int owner = 1);

class ConcatenatedStrategy : public StateStrategy {
 public:
  enum class Mode { BlockTerminating, Alternating };

  Mode mode() const { return mode_; }
  const Certificate& certificate() const { return *cert_; }
  const MarkovProfile& profiles() const { return *profiles_; }
  GamePtr game() const { return game_; }
  GamePtr blockGame() const { return blockGame_; }
  // Alternating mode only.
  const ValueFunction& target() const { return *target_; }
  const StationaryProfile& stationary() const { return *sStar_; }
  double eps() const { return eps_; }
  double target(const StateId& x) const;

  std::string id() const override { return id_; }
  NodeDist start(const StateId& x1) const override;
  Mixed act(const Node& node, const StateId& x) const override;
  NodeDist advance(const Node& node, const StateId& next) const override;

 private:
  friend std::shared_ptr<ConcatenatedStrategy> blockStrategy(GamePtr, Certificate,
                                                             std::shared_ptr<const MarkovProfile>);
  friend std::shared_ptr<ConcatenatedStrategy> sigmaBar(GamePtr, const ValueFunction&, double,
                                                        std::shared_ptr<const ConcatenatedStrategy>,
                                                        StationaryProfile);
  NodeDist anchorAt(Node node, const StateId& x) const;

  Mode mode_ = Mode::BlockTerminating;
  std::string id_;
  GamePtr game_, blockGame_;
  std::shared_ptr<const Certificate> cert_;
  std::shared_ptr<const MarkovProfile> profiles_;
  std::shared_ptr<const ValueFunction> target_;
  std::shared_ptr<const StationaryProfile> sStar_;
  double eps_ = 0;
};

// sigma*: at each anchor x samples k uniform on {1..n(x)}, plays the n(x)-stage
// profile for k stages, then re-anchors at the current state.
std::shared_ptr<ConcatenatedStrategy> blockStrategy(GamePtr game, Certificate cert,
                                                    std::shared_ptr<const MarkovProfile> profiles);

// sigma-bar: s* in even phases, the block strategy of Gamma^eps in odd phases;
// odd starts when v(x) > 2 eps, even starts when v(x) < eps.
std::shared_ptr<ConcatenatedStrategy> sigmaBar(GamePtr game, const ValueFunction& v, double eps,
                                               std::shared_ptr<const ConcatenatedStrategy> block,
                                               StationaryProfile sStar);

// Gamma^theta: active states with theta(x) = 1 become absorbing with payoff v(x).
class AuxiliaryGame : public Game {
 public:
  AuxiliaryGame(GamePtr base, ValueFunction v, std::function<bool(const StateId&)> theta);

  bool contains(const StateId& x) const override { return base_->contains(x); }
  bool isAbsorbing(const StateId& x) const override;
  Rational payoff(const StateId& x) const override;
  std::vector<std::string> actionsA(const StateId& x) const override;
  std::vector<std::string> actionsB(const StateId& x) const override;
  Distribution transition(const StateId& x, int a, int b) const override;
  Rational payoffBound() const override { return base_->payoffBound(); }
  Rational payoffLow() const override { return base_->payoffLow(); }
  Rational payoffHigh() const override { return base_->payoffHigh(); }
  std::optional<StateId> initialState() const override { return base_->initialState(); }
  std::string name() const override { return base_->name() + "^theta"; }

  bool stopped(const StateId& x) const;  // active in the base game and theta(x) = 1
  GamePtr base() const { return base_; }

 private:
  GamePtr base_;
  ValueFunction v_;
  std::function<bool(const StateId&)> theta_;
};

std::shared_ptr<AuxiliaryGame> auxiliaryGame(GamePtr base, const ValueFunction& v,
                                             std::function<bool(const StateId&)> theta);
// theta_eps(x) = 1 iff v(x) < eps.
std::function<bool(const StateId&)> thetaBelow(const ValueFunction& v, double eps);

// Player 2's view as a maximizer: payoffs negated and action roles swapped.
GamePtr swapRoles(GamePtr game);

// Behavior strategies that read only the state prefix (Sigma-hat) or the
// full history.
using StateHistoryStrategy = std::function<Mixed(const std::vector<StateId>&)>;
struct History {
  std::vector<StateId> states;
  std::vector<int> actionsA, actionsB;  // one fewer than states
};
using HistoryStrategy = std::function<Mixed(const History&)>;

StateHistoryStrategy asStateHistory(std::shared_ptr<const MarkovProfile> profile);
StateHistoryStrategy asStateHistory(GamePtr game, std::shared_ptr<const StationaryProfile> s);

// theta from the backward induction "stop iff 0 >= w_{m-1}(sigma, x)", always
// stopping once one stage remains.
struct PureStoppingTime {
  int horizon = 0;
  std::map<std::vector<StateId>, bool> decision;  // reachable prefixes
  double stopValue = 0;     // min over tau of E[g(x_theta)]
  double averageValue = 0;  // min over tau of E[(1/n) sum_t g(x_t)]
  bool stops(const std::vector<StateId>& prefix) const;
  int stage(const std::vector<StateId>& states) const;  // first stop, 1-based
};

PureStoppingTime pureStoppingTime(const Game& game, const StateHistoryStrategy& sigma,
                                  const StateId& x1, int n);

// State-history reduction: tau-hat(s_t) = sum_h P(h | s_t) tau(h), over every
// positive-probability state prefix up to horizon - 1.
template <class T>
using StateLaw = std::map<std::vector<StateId>, T>;
template <class T>
struct ReducedTau {
  std::map<std::vector<StateId>, std::vector<T>> table;
};

template <class T>
ReducedTau<T> reduceTau(const Game& game,
                        const std::function<std::vector<T>(const std::vector<StateId>&)>& sigma,
                        const std::function<std::vector<T>(const History&)>& tau,
                        const StateId& x1, int horizon);

// Law of (x_1..x_t) for t = 1..horizon under (sigma, tau) by full enumeration.
template <class T>
StateLaw<T> stateLaw(const Game& game,
                     const std::function<std::vector<T>(const std::vector<StateId>&)>& sigma,
                     const std::function<std::vector<T>(const History&)>& tau,
                     const StateId& x1, int horizon);

// Drives the automaton along a played history with a fixed stream of
// uniforms; returns the mixed action emitted at every stage. Actions are
// accepted only to make the blindness check explicit.
std::vector<Mixed> replay(const StateStrategy& s, const History& h,
                          const std::vector<double>& uniforms);

// Text description: automaton parameters, certificate, s* and profile tables.
std::string describe(const ConcatenatedStrategy& s);

// Full sigma-bar pipeline on a game with a finite reachable closure: v from the
// tail of v_n, Gamma^eps, its certificate with M = eps/2 and eta = eps/8, the
// block strategy, s* and sigma-bar.
struct SynthesisOptions {
  double eps = 0.1;
  int horizon = 1000;
  int tailWindow = 100;
  double sStarTol = 1e-5;
  std::size_t stateCap = 1'000'000;
};

struct Synthesis {
  double eps = 0, M = 0, eta = 0;
  int horizon = 0;
  ValueFunction v;
  double tailDrift = 0;  // max drift over the tail window
  std::shared_ptr<AuxiliaryGame> gammaEps;
  Certificate cert;
  int lStar = 0;  // blocks for P(rho > n0 l*) <= eps
  int l3 = 0;     // blocks for P(rho > N1) <= eps^3
  int n0 = 0;     // max n(x)
  long N1 = 0;    // n0 * l3
  std::shared_ptr<const MarkovProfile> profiles;
  StationaryProfile sStar;
  std::shared_ptr<ConcatenatedStrategy> block, sigma;
};

Synthesis synthesize(GamePtr game, const StateId& x0, const SynthesisOptions& opt);

}  // namespace rgame
