#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rgame/format.hpp"
#include "rgame/game.hpp"

namespace rgame {

// Recursive game with signals in which player 1 is more informed: the state
// k and the signals (c, d) are drawn jointly by q(k, i, j), c determines d
// through d_hat, and each signal determines its receiver's own last action
// through i_hat and j_hat. Stage payoffs are 0 on active states and g(k) on
// absorbing ones.
//
// Absorption is public. Every absorbing state k owns one C signal and one D
// signal per action pair, both naming (k, i, j); these are the only signals
// that may accompany a draw of k, and k loops on them.
class SignalGame {
 public:
  struct Outcome {
    int k, c, d;
    Rational w;
  };

  SignalGame(std::vector<std::string> actionsI, std::vector<std::string> actionsJ);

  int addActive(const std::string& name);
  int addAbsorbing(const std::string& name, const Rational& payoff);
  // iHat = -1 marks a signal that only occurs in the initial draw.
  int addSignalC(const std::string& name, int iHat, int dHat);
  int addSignalD(const std::string& name, int jHat);
  // Outcomes into an absorbing state may leave c and d at -1; they are
  // replaced by that state's absorption signals for (i, j).
  void setTransition(int k, int i, int j, std::vector<Outcome> law);
  void setInitial(std::vector<Outcome> pi);
  void setName(std::string name) { name_ = std::move(name); }

  // Empty iff the game is well formed; check() throws ValidationError.
  std::vector<Diagnostic> validate() const;
  void check() const;

  int numK() const { return static_cast<int>(states_.size()); }
  int numI() const { return static_cast<int>(actI_.size()); }
  int numJ() const { return static_cast<int>(actJ_.size()); }
  int numC() const { return static_cast<int>(sigC_.size()); }
  int numD() const { return static_cast<int>(sigD_.size()); }
  const std::string& stateName(int k) const { return states_[k].name; }
  const std::string& actionI(int i) const { return actI_[i]; }
  const std::string& actionJ(int j) const { return actJ_[j]; }
  const std::string& signalC(int c) const { return sigC_[c].name; }
  const std::string& signalD(int d) const { return sigD_[d].name; }
  bool isAbsorbing(int k) const { return states_[k].absorbing; }
  const Rational& payoff(int k) const { return states_[k].payoff; }
  int iHat(int c) const { return sigC_[c].act; }
  int dHat(int c) const { return sigC_[c].d; }
  int jHat(int d) const { return sigD_[d].act; }
  // Absorbing state announced by a signal, -1 for ordinary signals.
  int absorbedIn(int c) const { return sigC_[c].absorbed; }
  int absorbedInD(int d) const { return sigD_[d].absorbed; }
  int absorptionC(int k, int i, int j) const;
  int absorptionD(int k, int i, int j) const;
  const std::vector<Outcome>& law(int k, int i, int j) const;
  const std::vector<Outcome>& initial() const { return pi_; }
  const std::string& name() const { return name_; }
  // Name-based lookups; -1 when absent.
  int findState(const std::string& s) const;
  int findI(const std::string& s) const;
  int findJ(const std::string& s) const;
  int findC(const std::string& s) const;
  int findD(const std::string& s) const;
  // True when d_hat is a bijection: both players see the same signals.
  bool symmetric() const;

 private:
  struct State {
    std::string name;
    bool absorbing;
    Rational payoff;
  };
  struct Signal {
    std::string name;
    int act;
    int d;
    int absorbed;
  };
  std::size_t cell(int k, int i, int j) const;
  std::vector<Outcome> fill(int i, int j, std::vector<Outcome> law) const;

  std::vector<std::string> actI_, actJ_;
  std::vector<State> states_;
  std::vector<Signal> sigC_, sigD_;
  std::vector<std::vector<Outcome>> q_;
  std::vector<bool> set_;
  std::vector<Outcome> pi_;
  std::string name_ = "signal_game";
};

using SignalGamePtr = std::shared_ptr<const SignalGame>;

// Signal-game text format:
//
//   [states]
//   active = a, b
//   win = 1
//   [actions]
//   I = T, B
//   J = L, R
//   [signals]
//   C = c0, cT, cB
//   D = d0, dL
//   [maps i_hat, j_hat, d_hat]
//   c0 -> -, d0        # initial-only signal
//   cT -> T, dL
//   dL -> L
//   [transitions]
//   a T L -> 1/2 (a, cT, dL), 1/2 win
//   [pi]
//   1/2 (a, c0, d0), 1/2 (b, c0, d0)
//
// A bare absorbing state on the right of a transition stands for its
// absorption signals. "builtin NAME" loads a bundled game.
std::shared_ptr<SignalGame> loadSignalGame(std::string_view text);
std::shared_ptr<SignalGame> loadSignalGameFile(const std::string& path);
std::string saveSignalGame(const SignalGame& game);

// Synthetic: player 1 privately and noisily (3:1) observes a persistent
// state a or b. Playing T at a or B at b gambles: it wins with probability
// 1/2 against the matching column (L at a, R at b) and loses with
// probability 1/4 against the other. The other row passes. Both players
// see the action pair after every continuation, so player 2 learns from
// player 1's moves. v_1 = 0 and v_n grows with n.
std::shared_ptr<SignalGame> signal2x2();
// Synthetic, symmetric information: both players share noisy public
// observations of a persistent state; player 1 guesses or waits, player 2
// taxes waiting or leaves it free.
std::shared_ptr<SignalGame> symmetric2();
std::shared_ptr<SignalGame> makeSignalBuiltin(const std::string& name);
std::vector<std::string> signalBuiltinNames();

// ---------------------------------------------------------------------------
// Beliefs. T is Rational (exact) or double; in double mode atoms whose
// coordinates agree after rounding to 1e-12 are merged.

template <class T>
T scalar(const Rational& r);
template <>
Rational scalar<Rational>(const Rational& r);
template <>
double scalar<double>(const Rational& r);

template <class T>
struct Belief {
  std::vector<T> p;  // over K
};

template <class T>
struct SecondOrderBelief {
  std::vector<std::pair<Belief<T>, T>> atoms;  // sorted, merged, positive weights
};

template <class T>
struct ImageDistribution {
  std::vector<std::pair<SecondOrderBelief<T>, T>> atoms;
};

template <class T>
int compareScalar(const T& a, const T& b);
template <>
int compareScalar<Rational>(const Rational& a, const Rational& b);
template <>
int compareScalar<double>(const double& a, const double& b);
template <class T>
int compare(const Belief<T>& a, const Belief<T>& b);
template <class T>
int compare(const SecondOrderBelief<T>& a, const SecondOrderBelief<T>& b);
template <class T>
int compare(const ImageDistribution<T>& a, const ImageDistribution<T>& b);

#define RGAME_BELIEF_ORDER(Type)                                                   \
  template <class T>                                                               \
  bool operator<(const Type<T>& a, const Type<T>& b) { return compare(a, b) < 0; } \
  template <class T>                                                               \
  bool operator==(const Type<T>& a, const Type<T>& b) { return compare(a, b) == 0; }
RGAME_BELIEF_ORDER(Belief)
RGAME_BELIEF_ORDER(SecondOrderBelief)
RGAME_BELIEF_ORDER(ImageDistribution)
#undef RGAME_BELIEF_ORDER

// Sorts atoms, merges equal ones and drops zero weights.
template <class A, class T>
void canonicalize(std::vector<std::pair<A, T>>& atoms);

std::string toString(const Belief<Rational>& p);
std::string toString(const Belief<double>& p);
std::string toString(const SecondOrderBelief<Rational>& x);
std::string toString(const SecondOrderBelief<double>& x);
std::string toString(const ImageDistribution<Rational>& z);
std::string toString(const ImageDistribution<double>& z);

SecondOrderBelief<double> toDouble(const SecondOrderBelief<Rational>& x);

template <class T>
SecondOrderBelief<T> dirac(const Belief<T>& p);

// Finite joint law of (k, c', d') with arbitrary integer signal labels.
template <class T>
struct Joint {
  struct Entry {
    int k, c, d;
    T w;
  };
  int numK = 0;
  std::vector<Entry> entries;
};

// The game's own initial law.
template <class T>
Joint<T> initialLaw(const SignalGame& g);

// Phi(pi) = sum_d pi(d) delta_{ sum_c pi(c|d) delta_{pi(.|c,d)} }. Throws
// Error when some c' occurs with two d' (pi outside Delta^1).
template <class T>
ImageDistribution<T> image(const Joint<T>& pi);

// pi(eta)(k, (p, x), x') = eta(x) x(p) p(k) if x = x', else 0. Signal
// labels: d' indexes eta's atoms, c' indexes the pairs (x, p) in order.
template <class T>
struct CanonicalLaw {
  Joint<T> pi;
  std::vector<std::pair<int, int>> cLabels;  // c' -> (atom of eta, atom of x)
};
template <class T>
CanonicalLaw<T> canonicalPi(const ImageDistribution<T>& eta, int numK);

// Optimal transport between the finite supports with ground cost ||p - p'||_1.
template <class T>
T wasserstein(const SecondOrderBelief<T>& x, const SecondOrderBelief<T>& y);
// The same distance from the other side: sup over f on the union of the
// supports, f in [-1, 1] and 1-Lipschitz, of int f dx - int f dy.
template <class T>
T wassersteinDual(const SecondOrderBelief<T>& x, const SecondOrderBelief<T>& y);

// ---------------------------------------------------------------------------
// Histories. h1 = (c'_1, c_2, ..., c_t) and h2 = (d'_1, d_2, ..., d_t); the
// first entry is a label of the initial law, later ones are signals of the
// game.
using SignalHistory = std::vector<int>;

template <class T>
using Strategy1 = std::function<std::vector<T>(const SignalHistory& h1)>;
template <class T>
using Strategy2 = std::function<std::vector<T>(const SignalHistory& h2)>;

class ZeroProbability : public Error {
 public:
  using Error::Error;
};

// p_t = P(k_t | h1), from the products of pi and q alone. When sigma is
// given it is only used to reject histories it plays with probability 0.
template <class T>
Belief<T> updateP(const SignalGame& g, const Joint<T>& pi, const SignalHistory& h1,
                  const Strategy1<T>* sigma = nullptr);

// x_t = P(p_t | h2): sums over the h1 consistent with h2, weighted by pi, q
// and sigma. Player 2's strategy cancels.
template <class T>
SecondOrderBelief<T> updateX(const SignalGame& g, const Joint<T>& pi, const Strategy1<T>& sigma,
                             const SignalHistory& h2);

// ---------------------------------------------------------------------------
// The auxiliary game on second-order beliefs. States are x in
// Delta_f(Delta(K^0)) plus delta_{delta_k} for absorbing k; player 1's
// action maps each atom of x to a mixed action, player 2's is a mixed
// action.
template <class T>
class BeliefGame {
 public:
  explicit BeliefGame(SignalGamePtr g);

  const SignalGame& signalGame() const { return *g_; }
  SignalGamePtr signalGamePtr() const { return g_; }

  std::optional<int> absorbingState(const SecondOrderBelief<T>& x) const;
  T payoff(const Belief<T>& p) const;  // sum_k p(k) g(k), 0 on K^0
  T payoff(const SecondOrderBelief<T>& x) const;

  // One step of the canonical game from x: the joint law of
  // (k_2, (atom, c_2), d_2), with c' = atom * numC + c_2.
  Joint<T> stageLaw(const SecondOrderBelief<T>& x, const std::vector<std::vector<T>>& a,
                    const std::vector<T>& b) const;
  // l(x, a, b) = Phi(stageLaw(x, a, b)).
  ImageDistribution<T> transition(const SecondOrderBelief<T>& x,
                                  const std::vector<std::vector<T>>& a,
                                  const std::vector<T>& b) const;

  // Pure maps supp(x) -> I in mixed radix, atom 0 least significant.
  long numPureMaps(const SecondOrderBelief<T>& x) const;
  std::vector<int> pureMap(const SecondOrderBelief<T>& x, long index) const;
  std::vector<std::vector<T>> asMixed(const std::vector<int>& map) const;
  ImageDistribution<T> transitionPure(const SecondOrderBelief<T>& x, long map, int j) const;

  // Law of (c, d, next belief) from first-order belief p under (i, j).
  struct Step {
    int c, d;
    Belief<T> next;
    T prob;
  };
  std::vector<Step> step(const Belief<T>& p, int i, int j) const;

 private:
  struct Move {
    int k, c, d;
    T w;
  };
  const std::vector<Move>& moves(int k, int i, int j) const;
  SignalGamePtr g_;
  std::vector<std::vector<Move>> q_;  // the kernel in T
};

struct BeliefValueOptions {
  std::size_t stateCap = 20000;  // reachable belief states
  std::size_t lpCap = 4000;      // variables of one value LP
  bool pureLower = true;
};

// w_n(x) of the n-stage belief game. Player 1's behavioural map is
// linearized by the joint weights y(atom, i) = x(atom) a(atom)[i], which
// turns the recursion over d-histories into one LP.
template <class T>
double beliefValue(const BeliefGame<T>& bg, const SecondOrderBelief<T>& x, int n,
                   std::size_t lpCap = 4000);
// Linear extension to distributions over states.
template <class T>
double beliefValue(const BeliefGame<T>& bg, const ImageDistribution<T>& z, int n,
                   std::size_t lpCap = 4000);

template <class T>
struct BeliefValues {
  std::vector<SecondOrderBelief<T>> states;  // reachable, roots first
  std::vector<int> depth;
  // w[m-1][s] for m = 1..N.
  std::vector<std::vector<double>> w;
  // Value of the recursion that mixes over pure maps only, which lets
  // player 2 see the realized map; NaN where the children run past the
  // expanded depth.
  std::vector<std::vector<double>> pureLower;
  int index(const SecondOrderBelief<T>& x) const;  // -1 when absent
};

// States reachable from the roots in at most N-1 steps of l under pure maps
// and pure actions of player 2, with w_1..w_N on each. Throws CapExceeded
// past opt.stateCap.
template <class T>
BeliefValues<T> beliefValueIteration(const BeliefGame<T>& bg,
                                     const std::vector<SecondOrderBelief<T>>& roots, int N,
                                     const BeliefValueOptions& opt = {});

struct DirectOptions {
  int maxStages = 4;
  std::size_t maxLeaves = 500000;
};

// v_n(pi) of the signal game itself, by the sequence-form LP over both
// players' signal histories. Absorbed plays are cut off with their
// remaining payoff.
template <class T>
double directVn(const SignalGame& g, const Joint<T>& pi, int n, const DirectOptions& opt = {});

// Player 1 strategy in the belief game: maps the states x_1..x_t to one
// mixed action per atom of x_t.
template <class T>
using BeliefStrategy =
    std::function<std::vector<std::vector<T>>(const std::vector<SecondOrderBelief<T>>& xs)>;

// sigma*(h1) = sigmaHat(x_1..x_t)[p_t], where p_t and x_t are the beliefs
// player 1 can compute along h1.
template <class T>
Strategy1<T> mimicStrategy(SignalGamePtr g, Joint<T> pi, BeliefStrategy<T> sigmaHat);

}  // namespace rgame
