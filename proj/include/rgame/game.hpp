#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "rgame/rational.hpp"

namespace rgame {

// States are labelled by strings; lattice states use "(x,y)".
using StateId = std::string;

struct Outcome {
  StateId state;
  Rational prob;
};
using Distribution = std::vector<Outcome>;

// A recursive game: zero stage payoff on active states, a state-only payoff
// on absorbing states. Implementations must be immutable once built.
class Game {
 public:
  virtual ~Game() = default;

  virtual bool contains(const StateId& x) const = 0;
  virtual bool isAbsorbing(const StateId& x) const = 0;
  virtual Rational payoff(const StateId& x) const = 0;
  virtual std::vector<std::string> actionsA(const StateId& x) const = 0;
  virtual std::vector<std::string> actionsB(const StateId& x) const = 0;
  virtual Distribution transition(const StateId& x, int a, int b) const = 0;

  // Absorbing payoffs must satisfy |g| <= payoffBound().
  virtual Rational payoffBound() const { return 1; }
  virtual std::optional<StateId> initialState() const { return std::nullopt; }
  // Short text used by save() for generator games ("builtin ..." line).
  virtual std::optional<std::string> builtinSpec() const { return std::nullopt; }
  virtual std::string name() const { return "game"; }
  // Lowest and highest absorbing payoff the game can produce, used for
  // truncation brackets. Defaults to +-payoffBound().
  virtual Rational payoffLow() const { return -payoffBound(); }
  virtual Rational payoffHigh() const { return payoffBound(); }
};

using GamePtr = std::shared_ptr<const Game>;

// Eager finite representation.
class RecursiveGame : public Game {
 public:
  struct Active {
    std::vector<std::string> actionsA, actionsB;
    std::vector<Distribution> cells;  // row-major a * |B| + b
  };

  void addActive(const StateId& x, std::vector<std::string> actionsA,
                 std::vector<std::string> actionsB);
  void addAbsorbing(const StateId& x, const Rational& payoff);
  void setTransition(const StateId& x, int a, int b, Distribution d);
  void setTransition(const StateId& x, const std::string& a,
                     const std::string& b, Distribution d);
  void setPayoffBound(const Rational& bound) { bound_ = bound; }
  void setInitialState(const StateId& x) { initial_ = x; }
  void setName(std::string name) { name_ = std::move(name); }

  bool contains(const StateId& x) const override;
  bool isAbsorbing(const StateId& x) const override;
  Rational payoff(const StateId& x) const override;
  std::vector<std::string> actionsA(const StateId& x) const override;
  std::vector<std::string> actionsB(const StateId& x) const override;
  Distribution transition(const StateId& x, int a, int b) const override;
  Rational payoffBound() const override { return bound_; }
  Rational payoffLow() const override;
  Rational payoffHigh() const override;
  std::optional<StateId> initialState() const override { return initial_; }
  std::string name() const override { return name_; }

  const std::map<StateId, Active>& active() const { return active_; }
  const std::map<StateId, Rational>& absorbing() const { return absorbing_; }

 private:
  const Active& activeAt(const StateId& x) const;

  std::map<StateId, Active> active_;
  std::map<StateId, Rational> absorbing_;
  Rational bound_ = 1;
  std::optional<StateId> initial_;
  std::string name_ = "game";
};

struct Diagnostic {
  StateId state;
  std::string detail;
};

// Empty iff every invariant holds on the eager game.
std::vector<Diagnostic> validate(const RecursiveGame& game);
// Checks the listed states of any game. Successors outside contains() are
// allowed here: generators legitimately reach past their coordinate bound.
std::vector<Diagnostic> validate(const Game& game,
                                 const std::vector<StateId>& states);

// States reachable from x0 in at most depthBound positive-probability steps.
std::set<StateId> reachable(const Game& game, const StateId& x0, int depthBound);

// Integer-indexed snapshot of a depth-bounded reachable set, in double
// precision. States are sorted by label. Frontier states are those not
// expanded: either at the depth bound or outside the game's domain.
struct ExploredGame {
  enum class Kind : std::uint8_t { Active, Absorbing, Frontier };

  GamePtr game;
  std::vector<StateId> states;
  std::unordered_map<StateId, int> index;
  std::vector<Kind> kind;
  std::vector<double> payoff;  // absorbing payoff, 0 otherwise
  std::vector<int> depth;      // BFS distance from the roots
  std::vector<int> nA, nB;     // action counts (active states only)
  std::vector<std::size_t> cellStart;  // per state, into cellSucc; size n+1
  std::vector<std::size_t> cellSucc;   // per cell, into succ arrays; size cells+1
  std::vector<int> succState;
  std::vector<double> succProb;
  double low = -1, high = 1;  // payoff range used for frontier brackets
  int depthBound = 0;

  std::size_t size() const { return states.size(); }
  int find(const StateId& x) const;  // -1 if absent
  int at(const StateId& x) const;    // throws if absent
  bool isActive(int s) const { return kind[s] == Kind::Active; }
  std::size_t frontierCount() const;
};

// depthBound < 0 means "until closure". Throws CapExceeded when more than
// stateCap states would be discovered.
ExploredGame explore(GamePtr game, const std::vector<StateId>& roots,
                     int depthBound, std::size_t stateCap = 5'000'000);

class CapExceeded : public Error {
 public:
  using Error::Error;
};

// Label helpers for lattice states "(x,y)".
StateId latticeState(long x, long y);
std::optional<std::pair<long, long>> parseLattice(const StateId& s);

}  // namespace rgame
