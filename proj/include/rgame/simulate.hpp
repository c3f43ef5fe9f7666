#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rgame/strategy.hpp"

namespace rgame {

// Counter-based randomness: every draw is splitmix64 applied to a key, so a
// draw depends only on (seed, run, stream, phase index, stage, purpose) and
// never on how many draws came before it.
enum class Purpose : std::uint64_t { Action = 1, Node = 2, Nature = 3 };
std::uint64_t streamId(const std::string& name);  // FNV-1a 64
double uniformDraw(std::uint64_t seed, std::uint64_t run, std::uint64_t stream,
                   std::uint64_t phaseIndex, std::uint64_t stage, Purpose purpose);

// Index drawn from a probability vector with one uniform.
int sampleIndex(const std::vector<double>& p, double u);

struct RunContext {
  std::uint64_t seed = 0, run = 0;
};

// One player's behaviour during a single play. Agents are stateful; the
// engine creates a fresh one per run through an AgentFactory.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string id() const = 0;
  virtual int owner() const = 0;
  virtual void begin(const StateId& x1, const RunContext& ctx) = 0;
  virtual Mixed act(int t, const StateId& x) = 0;  // t is 1-based
  virtual void observe(int t, const StateId& x, int a, int b, const StateId& next) = 0;
  // Automaton node after the last begin/observe, when the agent has one.
  virtual std::optional<Node> node() const { return std::nullopt; }
};
using AgentPtr = std::unique_ptr<Agent>;
using AgentFactory = std::function<AgentPtr()>;

// Drives a StateStrategy, drawing nodes from its own keyed stream.
AgentFactory automatonAgent(StrategyPtr strategy);
// Plays the mixed actions of a fixed table; states outside the table get the
// uniform action.
AgentFactory stationaryAgent(std::string id, int owner, std::map<StateId, Mixed> table);
AgentFactory uniformAgent(GamePtr game, int owner);

// Strategy given by a function of (stage, state). Useful for scripted plays
// such as "move right until stage m, then jump".
StrategyPtr scheduledStrategy(std::string id, int owner,
                              std::function<Mixed(int t, const StateId& x)> rule);

struct Trajectory {
  std::vector<StateId> states;  // x_1.. up to absorption or the horizon
  std::vector<int> actionsA, actionsB;
  std::vector<int> phases;      // player 1's node phase at each stored stage, -1 if none
  std::vector<int> phaseIndex;  // player 1's node phase index, 0 if none
  long horizon = 0;             // transitions requested
  long absorbedAt = 0;          // stage of the first absorbing state, 0 if none
  // Absorbing states self-loop, so later stages repeat the last state.
  const StateId& stateAt(long t) const;
};

// Samples the play measure for `horizon` transitions; stops storing once an
// absorbing state is reached. Throws when a strategy puts mass off the
// legal action set.
Trajectory play(GamePtr game, const StateId& x1, const AgentFactory& a, const AgentFactory& b,
                long horizon, std::uint64_t seed, std::uint64_t run = 0);

struct Estimate {
  double mean = 0, sd = 0;
  long count = 0;
  double stderr_() const;
  double halfWidth(double level) const;  // two-sided normal interval
};
double normalQuantile(double p);  // inverse standard normal CDF

// gamma_n = E[(1/n) sum_{t=1..n} g(x_t)] by Monte Carlo; absorbed runs are
// completed analytically.
Estimate estimateGamma(GamePtr game, const StateId& x1, const AgentFactory& a,
                       const AgentFactory& b, long n, int runs, std::uint64_t seed);

// Posterior over a StateStrategy's automaton node given the observed states
// and the owner's actions.
class NodeFilter {
 public:
  explicit NodeFilter(StrategyPtr s) : s_(std::move(s)) {}
  void reset(const StateId& x1);
  Mixed marginal(const StateId& x) const;  // owner's mixed action at x
  void update(const StateId& x, int ownAction, const StateId& next);
  const NodeDist& dist() const { return dist_; }
  void setDist(NodeDist d) { dist_ = std::move(d); }
  const StateStrategy& strategy() const { return *s_; }
  // Posterior after (x, ownAction, next) from an explicit prior; empty when
  // the action has zero probability.
  NodeDist next(const NodeDist& prior, const StateId& x, int ownAction,
                const StateId& next) const;

 private:
  StrategyPtr s_;
  NodeDist dist_;
};

struct BestResponseOptions {
  int hMax = 12;
  std::size_t infoStateCap = 2'000'000;
};

// Exact finite-horizon response to a StateStrategy by dynamic programming
// over (stage, state, posterior over the strategy's node). The responder
// minimizes when the strategy belongs to player 1 and maximizes otherwise.
class BestResponse {
 public:
  BestResponse(GamePtr game, StrategyPtr strategy, int horizon, BestResponseOptions opt = {});
  int horizon() const { return n_; }
  // Expected n-stage average payoff from x1 under the best reply; nullopt
  // when the information-state cap was hit.
  std::optional<double> value(const StateId& x1);
  std::size_t infoStates() const { return memo_.size(); }
  bool exhausted() const { return exhausted_; }
  // Responder's pure action at stage t, state x, posterior d.
  int choose(int t, const StateId& x, const NodeDist& d);
  // Agent that plays the DP action along the play.
  AgentFactory agent();

 private:
  double total(int t, const StateId& x, const NodeDist& d);
  double actionValue(int t, const StateId& x, const NodeDist& d, int r);
  GamePtr game_;
  StrategyPtr s_;
  NodeFilter filter_;
  int n_;
  BestResponseOptions opt_;
  bool exhausted_ = false;
  std::map<std::string, double> memo_;
};

// Player 2 adversaries for horizons beyond exact DP, each aware of player 1's
// strategy through a NodeFilter.
struct AdversarySpec {
  enum class Kind { Myopic, Uniform, Discounted, Window };
  Kind kind = Kind::Myopic;
  double lambda = 0.1;  // Discounted
  int window = 3;       // Window
  std::string name() const;
};
std::vector<AdversarySpec> adversaryMenu();
// Myopic: minimizes E[v(x_{t+1})]. Discounted: player 2's optimal stationary
// strategy in the lambda-discounted game. Window: exact DP over the next
// `window` stages on the payoff sum plus v at the window's end.
AgentFactory makeAdversary(const AdversarySpec& spec, GamePtr game, StrategyPtr player1,
                           const ValueFunction& v, const StateId& x1);

// Per-run quantities of sigma-bar's proofs, aggregated over runs.
struct PlayStats {
  int runs = 0;
  long horizon = 0;
  double level = 0.99;
  Estimate gamma;          // n-stage average payoff
  Estimate upcrossings;    // N: odd phases started
  Estimate oddFrequency;   // (1/n) sum_k 1{A_k}
  std::map<long, long> absorption;  // absorption stage -> runs (0: not absorbed)
  std::vector<Estimate> increments;  // D_l = v(x_min(rho,u_{l+1})) - v(x_min(rho,u_l))
  std::vector<std::vector<double>> switchValues;  // per run, v(x_{u_l})
  long censored = 0;  // runs still active at the horizon
  std::vector<Trajectory> trajectories;
  // Fraction of runs absorbed by stage m.
  Estimate absorbedBy(long m) const;
};

struct SimOptions {
  long horizon = 1000;
  int runs = 1000;
  std::uint64_t seed = 1;
  double level = 0.99;
  bool keepTrajectories = false;
};

// Phases come from player 1's automaton node (phase 1 = odd); v is needed
// for the switching values and may be null otherwise.
PlayStats collectStats(GamePtr game, const StateId& x1, const AgentFactory& a,
                       const AgentFactory& b, const ValueFunction* v, const SimOptions& opt);

// One line of the flat check table.
struct CheckRow {
  std::string name;
  double bound = 0, estimate = 0, ci = 0;
  bool lowerBound = true;  // estimate + ci >= bound when true, estimate - ci <= bound otherwise
  bool pass = false;
  std::string note;
};
std::string formatRows(const std::vector<CheckRow>& rows);
CheckRow lowerCheck(std::string name, double bound, const Estimate& e, double sigmas);
CheckRow upperCheck(std::string name, double bound, const Estimate& e, double sigmas);

// Submartingale increments of v at the phase switches, one row per switching
// index; vacuous when nothing switched.
std::vector<CheckRow> submartingaleCheck(const PlayStats& s, double eps, double sigmas = 3);
CheckRow upcrossingCheck(const PlayStats& s, double eps, double sigmas = 3);
CheckRow phaseFrequencyCheck(const PlayStats& s, double eps, double sigmas = 3);
CheckRow guaranteeCheck(const PlayStats& s, double vx1, double eps, double sigmas = 3);

}  // namespace rgame
