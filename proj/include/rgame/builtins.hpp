#pragma once

#include <map>
#include <string>
#include <vector>

#include "rgame/game.hpp"

namespace rgame {

// The lattice game: active states (x,y) with 0 <= y <= x; absorbing (x,-1)
// pays +1 and (x,x+1) pays -2. At (x,0) player 1 chooses R -> (x+1,0) or
// J -> (x,-1) or (x,1) with probability 1/2 each; from (x,y), y >= 1, the
// state climbs to (x,y+1). Player 2 has a single dummy action.
// States with x > bound are outside the domain (frontier).
class LehrerSorinGame final : public Game {
 public:
  explicit LehrerSorinGame(long bound) : bound_(bound) {}

  bool contains(const StateId& x) const override;
  bool isAbsorbing(const StateId& x) const override;
  Rational payoff(const StateId& x) const override;
  std::vector<std::string> actionsA(const StateId& x) const override;
  std::vector<std::string> actionsB(const StateId& x) const override;
  Distribution transition(const StateId& x, int a, int b) const override;
  Rational payoffBound() const override { return 2; }
  Rational payoffLow() const override { return -2; }
  Rational payoffHigh() const override { return 1; }
  std::optional<StateId> initialState() const override { return latticeState(0, 0); }
  std::optional<std::string> builtinSpec() const override;
  std::string name() const override { return "lehrer_sorin"; }

  long bound() const { return bound_; }

 private:
  std::pair<long, long> coords(const StateId& x) const;
  long bound_;
};

// Synthetic: one active state s, player 1 quits or continues, player 2
// allows or blocks. Value 1/3.
std::shared_ptr<RecursiveGame> quittingSimple();

// Synthetic fixture with two active states whose limit values straddle the
// sigma-bar thresholds, so both phases get exercised.
std::shared_ptr<RecursiveGame> ladderGame();

// Builtin recursive games by name; params like {"bound": "3000"}.
GamePtr makeBuiltin(const std::string& name,
                    const std::map<std::string, std::string>& params = {});
std::vector<std::string> builtinGameNames();
bool isSynthetic(const std::string& builtinName);

}  // namespace rgame
