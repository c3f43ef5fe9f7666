#include "rgame/builtins.hpp"

#include <algorithm>

namespace rgame {

std::pair<long, long> LehrerSorinGame::coords(const StateId& x) const {
  auto c = parseLattice(x);
  if (!c) throw Error("not a lattice state: " + x);
  return *c;
}

bool LehrerSorinGame::contains(const StateId& s) const {
  auto c = parseLattice(s);
  if (!c) return false;
  auto [x, y] = *c;
  return x >= 0 && x <= bound_ && y >= -1 && y <= x + 1;
}

bool LehrerSorinGame::isAbsorbing(const StateId& s) const {
  auto [x, y] = coords(s);
  return y == -1 || y == x + 1;
}

Rational LehrerSorinGame::payoff(const StateId& s) const {
  auto [x, y] = coords(s);
  if (y == -1) return 1;
  if (y == x + 1) return -2;
  return 0;
}

std::vector<std::string> LehrerSorinGame::actionsA(const StateId& s) const {
  auto [x, y] = coords(s);
  if (y == 0) return {"R", "J"};
  return {"C"};
}

std::vector<std::string> LehrerSorinGame::actionsB(const StateId&) const {
  return {"-"};
}

Distribution LehrerSorinGame::transition(const StateId& s, int a, int b) const {
  auto [x, y] = coords(s);
  if (b != 0 || y < 0 || y > x) throw Error("bad transition query at " + s);
  if (y == 0) {
    if (a == 0) return {{latticeState(x + 1, 0), 1}};
    if (a == 1)
      return {{latticeState(x, -1), Rational(1, 2)}, {latticeState(x, 1), Rational(1, 2)}};
    throw Error("bad action at " + s);
  }
  if (a != 0) throw Error("bad action at " + s);
  return {{latticeState(x, y + 1), 1}};
}

std::optional<std::string> LehrerSorinGame::builtinSpec() const {
  return "builtin lehrer_sorin bound=" + std::to_string(bound_);
}

std::shared_ptr<RecursiveGame> quittingSimple() {
  auto g = std::make_shared<RecursiveGame>();
  g->setName("quitting_simple");
  g->addActive("s", {"quit", "continue"}, {"allow", "block"});
  g->addAbsorbing("win", 1);
  g->addAbsorbing("lose", -1);
  g->addAbsorbing("draw", 0);
  Rational h(1, 2);
  g->setTransition("s", "quit", "allow", {{"win", 1}});
  g->setTransition("s", "quit", "block", {{"lose", 1}});
  g->setTransition("s", "continue", "allow", {{"s", h}, {"draw", h}});
  g->setTransition("s", "continue", "block", {{"s", h}, {"win", h}});
  g->setInitialState("s");
  return g;
}

std::shared_ptr<RecursiveGame> ladderGame() {
  auto g = std::make_shared<RecursiveGame>();
  g->setName("ladder");
  g->addActive("high", {"quit", "continue"}, {"allow", "block"});
  g->addActive("low", {"wait"}, {"push", "pull"});
  g->addAbsorbing("win", 1);
  g->addAbsorbing("lose", -1);
  g->addAbsorbing("draw", 0);
  Rational h(1, 2), q(1, 4), e(1, 8);
  g->setTransition("high", "quit", "allow", {{"win", 1}});
  g->setTransition("high", "quit", "block", {{"lose", 1}});
  g->setTransition("high", "continue", "allow", {{"high", h}, {"draw", q}, {"low", q}});
  g->setTransition("high", "continue", "block", {{"high", h}, {"win", q}, {"low", q}});
  g->setTransition("low", "wait", "push", {{"low", h}, {"draw", h}});
  g->setTransition("low", "wait", "pull", {{"low", h}, {"draw", Rational(3, 8)}, {"high", e}});
  g->setInitialState("high");
  return g;
}

GamePtr makeBuiltin(const std::string& name,
                    const std::map<std::string, std::string>& params) {
  auto param = [&](const std::string& key, long def) {
    auto it = params.find(key);
    if (it == params.end()) return def;
    try {
      return std::stol(it->second);
    } catch (const std::exception&) {
      throw Error("bad value for " + key + ": " + it->second);
    }
  };
  for (const auto& [k, v] : params)
    if (!(name == "lehrer_sorin" && k == "bound"))
      throw Error("unknown parameter '" + k + "' for builtin " + name);
  if (name == "lehrer_sorin") {
    long bound = param("bound", 3000);
    if (bound < 0) throw Error("bound must be nonnegative");
    return std::make_shared<LehrerSorinGame>(bound);
  }
  if (name == "quitting_simple") return quittingSimple();
  if (name == "ladder") return ladderGame();
  throw Error("unknown builtin game '" + name + "'");
}

std::vector<std::string> builtinGameNames() {
  return {"lehrer_sorin", "quitting_simple", "ladder"};
}

bool isSynthetic(const std::string& builtinName) {
  return builtinName != "lehrer_sorin";
}

}  // namespace rgame
