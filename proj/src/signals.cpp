#include "rgame/signals.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rgame {

SignalGame::SignalGame(std::vector<std::string> actionsI, std::vector<std::string> actionsJ)
    : actI_(std::move(actionsI)), actJ_(std::move(actionsJ)) {
  if (actI_.empty() || actJ_.empty()) throw Error("signal game needs actions for both players");
}

std::size_t SignalGame::cell(int k, int i, int j) const {
  return (static_cast<std::size_t>(k) * actI_.size() + i) * actJ_.size() + j;
}

int SignalGame::findState(const std::string& s) const {
  for (int k = 0; k < numK(); ++k)
    if (states_[k].name == s) return k;
  return -1;
}

int SignalGame::findI(const std::string& s) const {
  auto it = std::find(actI_.begin(), actI_.end(), s);
  return it == actI_.end() ? -1 : static_cast<int>(it - actI_.begin());
}

int SignalGame::findJ(const std::string& s) const {
  auto it = std::find(actJ_.begin(), actJ_.end(), s);
  return it == actJ_.end() ? -1 : static_cast<int>(it - actJ_.begin());
}

int SignalGame::findC(const std::string& s) const {
  for (int c = 0; c < numC(); ++c)
    if (sigC_[c].name == s) return c;
  return -1;
}

int SignalGame::findD(const std::string& s) const {
  for (int d = 0; d < numD(); ++d)
    if (sigD_[d].name == s) return d;
  return -1;
}

int SignalGame::addActive(const std::string& name) {
  if (findState(name) >= 0) throw Error("duplicate state '" + name + "'");
  states_.push_back({name, false, 0});
  q_.resize(states_.size() * actI_.size() * actJ_.size());
  set_.resize(q_.size(), false);
  return numK() - 1;
}

int SignalGame::addAbsorbing(const std::string& name, const Rational& payoff) {
  if (findState(name) >= 0) throw Error("duplicate state '" + name + "'");
  states_.push_back({name, true, payoff});
  states_.back().payoff.canonicalize();
  int k = numK() - 1;
  q_.resize(states_.size() * actI_.size() * actJ_.size());
  set_.resize(q_.size(), false);
  for (int i = 0; i < numI(); ++i)
    for (int j = 0; j < numJ(); ++j) {
      std::string s = name + "." + actI_[i] + "." + actJ_[j];
      if (findC(s) >= 0 || findD(s) >= 0) throw Error("signal name clash: " + s);
      sigD_.push_back({s, j, -1, k});
      sigC_.push_back({s, i, numD() - 1, k});
      q_[cell(k, i, j)] = {{k, numC() - 1, numD() - 1, 1}};
      set_[cell(k, i, j)] = true;
    }
  return k;
}

int SignalGame::absorptionC(int k, int i, int j) const {
  if (k < 0 || k >= numK() || !states_[k].absorbing) throw Error("not an absorbing state");
  return q_[cell(k, i, j)].front().c;
}

int SignalGame::absorptionD(int k, int i, int j) const {
  if (k < 0 || k >= numK() || !states_[k].absorbing) throw Error("not an absorbing state");
  return q_[cell(k, i, j)].front().d;
}

int SignalGame::addSignalC(const std::string& name, int iHat, int dHat) {
  if (findC(name) >= 0 || findD(name) >= 0) throw Error("duplicate signal '" + name + "'");
  if (iHat < -1 || iHat >= numI()) throw Error("i_hat out of range for " + name);
  if (dHat < 0 || dHat >= numD()) throw Error("d_hat out of range for " + name);
  sigC_.push_back({name, iHat, dHat, -1});
  return numC() - 1;
}

int SignalGame::addSignalD(const std::string& name, int jHat) {
  if (findC(name) >= 0 || findD(name) >= 0) throw Error("duplicate signal '" + name + "'");
  if (jHat < -1 || jHat >= numJ()) throw Error("j_hat out of range for " + name);
  sigD_.push_back({name, jHat, -1, -1});
  return numD() - 1;
}

std::vector<SignalGame::Outcome> SignalGame::fill(int i, int j, std::vector<Outcome> law) const {
  for (auto& o : law) {
    o.w.canonicalize();
    if (o.c >= 0 && o.d >= 0) continue;
    if (o.k < 0 || o.k >= numK() || !states_[o.k].absorbing)
      throw Error("signals may only be omitted on absorbing outcomes");
    o.c = absorptionC(o.k, i, j);
    o.d = absorptionD(o.k, i, j);
  }
  return law;
}

void SignalGame::setTransition(int k, int i, int j, std::vector<Outcome> law) {
  if (k < 0 || k >= numK() || i < 0 || i >= numI() || j < 0 || j >= numJ())
    throw Error("transition index out of range");
  if (states_[k].absorbing) throw Error("absorbing state " + states_[k].name + " loops on itself");
  q_[cell(k, i, j)] = fill(i, j, std::move(law));
  set_[cell(k, i, j)] = true;
}

void SignalGame::setInitial(std::vector<Outcome> pi) {
  for (auto& o : pi) o.w.canonicalize();
  pi_ = std::move(pi);
}

const std::vector<SignalGame::Outcome>& SignalGame::law(int k, int i, int j) const {
  return q_[cell(k, i, j)];
}

bool SignalGame::symmetric() const {
  if (numC() != numD()) return false;
  std::vector<int> hits(numD(), 0);
  for (const auto& s : sigC_) ++hits[s.d];
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

std::vector<Diagnostic> SignalGame::validate() const {
  std::vector<Diagnostic> out;
  if (states_.empty()) out.push_back({"", "no states"});
  for (const auto& s : states_)
    if (s.absorbing && (s.payoff < -1 || s.payoff > 1))
      out.push_back({s.name, "payoff " + toString(s.payoff) + " outside [-1,1]"});

  // Checks one outcome; i and j are -1 for the initial draw.
  auto outcome = [&](const std::string& where, const Outcome& o, int i, int j) {
    if (o.k < 0 || o.k >= numK() || o.c < 0 || o.c >= numC() || o.d < 0 || o.d >= numD()) {
      out.push_back({where, "outcome index out of range"});
      return;
    }
    if (o.w < 0) out.push_back({where, "negative probability"});
    if (o.w == 0) return;
    const auto& c = sigC_[o.c];
    const auto& d = sigD_[o.d];
    if (c.d != o.d)
      out.push_back({where, "signal " + c.name + " comes with " + d.name + ", not d_hat(c)"});
    if (i >= 0 && c.act != i)
      out.push_back({where, "signal " + c.name + " does not recover player 1's action"});
    if (j >= 0 && d.act != j)
      out.push_back({where, "signal " + d.name + " does not recover player 2's action"});
    int expect = states_[o.k].absorbing ? o.k : -1;
    if (c.absorbed != expect || d.absorbed != expect)
      out.push_back({where, "absorption into " + states_[o.k].name + " is not announced publicly"});
  };

  for (int k = 0; k < numK(); ++k) {
    for (int i = 0; i < numI(); ++i)
      for (int j = 0; j < numJ(); ++j) {
        std::string where = states_[k].name + " " + actI_[i] + " " + actJ_[j];
        if (!set_[cell(k, i, j)]) {
          out.push_back({where, "missing transition"});
          continue;
        }
        Rational total = 0;
        for (const auto& o : law(k, i, j)) {
          outcome(where, o, i, j);
          total += o.w;
        }
        if (total != 1) out.push_back({where, "probabilities sum to " + toString(total)});
        if (states_[k].absorbing)
          for (const auto& o : law(k, i, j))
            if (o.w != 0 && o.k != k) out.push_back({where, "absorbing state leaves itself"});
      }
  }
  if (pi_.empty()) out.push_back({"pi", "missing initial law"});
  Rational total = 0;
  for (const auto& o : pi_) {
    outcome("pi", o, -1, -1);
    total += o.w;
  }
  if (!pi_.empty() && total != 1) out.push_back({"pi", "probabilities sum to " + toString(total)});
  return out;
}

void SignalGame::check() const {
  auto d = validate();
  if (!d.empty()) throw ValidationError(std::move(d));
}

// ---------------------------------------------------------------------------
// Text format

namespace {

using fmt_detail::splitTop;
using fmt_detail::Token;
using fmt_detail::trim;
using fmt_detail::words;

struct Line {
  int no;
  std::string text;
};

class SignalParser {
 public:
  explicit SignalParser(std::string_view text) : text_(text) {}

  std::shared_ptr<SignalGame> run() {
    std::istringstream in{std::string(text_)};
    std::string raw, section;
    int lineNo = 0;
    std::map<std::string, std::vector<Line>> sections;
    std::shared_ptr<SignalGame> builtin;
    bool sawContent = false;
    while (std::getline(in, raw)) {
      ++lineNo;
      std::string line = fmt_detail::stripComment(raw);
      std::string t = trim(line);
      if (t.empty()) continue;
      int col = static_cast<int>(line.find(t[0])) + 1;
      if (t.rfind("builtin", 0) == 0 && (t.size() == 7 || std::isspace(static_cast<unsigned char>(t[7])))) {
        if (sawContent) throw ParseError(lineNo, col, "builtin line must stand alone");
        auto ws = words(t, col);
        if (ws.size() != 2) throw ParseError(lineNo, col, "expected 'builtin NAME'");
        try {
          builtin = makeSignalBuiltin(ws[1].text);
        } catch (const Error& e) {
          throw ParseError(lineNo, ws[1].column, e.what());
        }
        sawContent = true;
        continue;
      }
      if (builtin) throw ParseError(lineNo, col, "content after builtin declaration");
      sawContent = true;
      if (t.front() == '[') {
        if (t.back() != ']') throw ParseError(lineNo, col, "unterminated section header");
        section = trim(t.substr(1, t.size() - 2));
        static const std::set<std::string> known = {
            "states", "actions", "signals", "maps i_hat, j_hat, d_hat", "transitions", "pi"};
        if (!known.count(section)) throw ParseError(lineNo, col + 1, "unknown section '" + section + "'");
        continue;
      }
      if (section.empty()) throw ParseError(lineNo, col, "content outside any section");
      sections[section].push_back({lineNo, line});
    }
    if (builtin) return builtin;

    for (const auto& l : sections["actions"]) actionLine(l);
    if (I_.empty() || J_.empty()) throw ParseError(lineNo, 1, "both I and J must be declared");
    g_ = std::make_shared<SignalGame>(I_, J_);
    for (const auto& l : sections["states"]) stateLine(l);
    for (const auto& l : sections["signals"]) signalLine(l);
    declareSignals(sections["maps i_hat, j_hat, d_hat"]);
    for (const auto& l : sections["transitions"]) transitionLine(l);
    std::vector<SignalGame::Outcome> pi;
    for (const auto& l : sections["pi"])
      for (const auto& term : splitTop(l.text, ',', 1)) pi.push_back(triple(term, l.no, true));
    g_->setInitial(std::move(pi));
    g_->check();
    return g_;
  }

 private:
  std::pair<Token, Token> keyValue(const Line& l) {
    auto kv = splitTop(l.text, '=', 1);
    if (kv.size() != 2) throw ParseError(l.no, kv[0].column, "expected 'key = value'");
    return {kv[0], kv[1]};
  }

  std::vector<std::string> names(const Token& list, int lineNo) {
    std::vector<std::string> out;
    for (const auto& tok : splitTop(list.text, ',', list.column)) {
      if (tok.text.empty() || words(tok.text, 0).size() != 1 || tok.text.find('(') != std::string::npos)
        throw ParseError(lineNo, tok.column, "bad name '" + tok.text + "'");
      out.push_back(tok.text);
    }
    return out;
  }

  void actionLine(const Line& l) {
    auto [k, v] = keyValue(l);
    if (k.text == "I") I_ = names(v, l.no);
    else if (k.text == "J") J_ = names(v, l.no);
    else throw ParseError(l.no, k.column, "expected 'I = ...' or 'J = ...'");
  }

  void stateLine(const Line& l) {
    auto [k, v] = keyValue(l);
    try {
      if (k.text == "active") {
        for (const auto& s : names(v, l.no)) g_->addActive(s);
      } else {
        if (words(k.text, 0).size() != 1) throw ParseError(l.no, k.column, "bad state name");
        Rational pay;
        try {
          pay = parseRational(v.text);
        } catch (const Error& e) {
          throw ParseError(l.no, v.column, e.what());
        }
        g_->addAbsorbing(k.text, pay);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(l.no, k.column, e.what());
    }
  }

  void signalLine(const Line& l) {
    auto [k, v] = keyValue(l);
    auto& target = k.text == "C" ? C_ : k.text == "D" ? D_ : throw ParseError(l.no, k.column, "expected 'C = ...' or 'D = ...'");
    for (const auto& s : names(v, l.no)) target.push_back({s, l.no});
  }

  void declareSignals(const std::vector<Line>& maps) {
    std::map<std::string, std::pair<std::vector<Token>, int>> targets;
    for (const auto& l : maps) {
      auto arrow = l.text.find("->");
      if (arrow == std::string::npos) throw ParseError(l.no, 1, "expected 'signal -> action[, d]'");
      std::string name = trim(l.text.substr(0, arrow));
      auto rhs = splitTop(l.text.substr(arrow + 2), ',', static_cast<int>(arrow) + 3);
      if (!targets.emplace(name, std::make_pair(rhs, l.no)).second)
        throw ParseError(l.no, 1, "duplicate map for " + name);
    }
    auto lookup = [&](const std::string& s, int lineNo) -> std::pair<std::vector<Token>, int> {
      auto it = targets.find(s);
      if (it == targets.end()) throw ParseError(lineNo, 1, "no map line for signal " + s);
      auto r = it->second;
      targets.erase(it);
      return r;
    };
    auto act = [&](const Token& t, int lineNo, bool forI) {
      if (t.text == "-") return -1;
      int a = forI ? g_->findI(t.text) : g_->findJ(t.text);
      if (a < 0) throw ParseError(lineNo, t.column, "unknown action '" + t.text + "'");
      return a;
    };
    try {
      for (const auto& [s, declLine] : D_) {
        auto [rhs, lineNo] = lookup(s, declLine);
        if (rhs.size() != 1) throw ParseError(lineNo, 1, "a D signal maps to one action of J");
        g_->addSignalD(s, act(rhs[0], lineNo, false));
      }
      for (const auto& [s, declLine] : C_) {
        auto [rhs, lineNo] = lookup(s, declLine);
        if (rhs.size() != 2) throw ParseError(lineNo, 1, "a C signal maps to an action of I and a D signal");
        int d = g_->findD(rhs[1].text);
        if (d < 0) throw ParseError(lineNo, rhs[1].column, "unknown D signal '" + rhs[1].text + "'");
        g_->addSignalC(s, act(rhs[0], lineNo, true), d);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(0, 0, e.what());
    }
    if (!targets.empty())
      throw ParseError(targets.begin()->second.second, 1,
                       "map for undeclared signal " + targets.begin()->first);
  }

  // "p (k, c, d)" or, on transitions, "p k" for an absorbing k.
  SignalGame::Outcome triple(const Token& term, int lineNo, bool initial) {
    std::string t = trim(term.text);
    auto sp = t.find_first_of(" \t(");
    if (sp == std::string::npos) throw ParseError(lineNo, term.column, "expected 'probability (k, c, d)'");
    Rational w;
    try {
      w = parseRational(t.substr(0, sp));
    } catch (const Error& e) {
      throw ParseError(lineNo, term.column, e.what());
    }
    std::string rest = trim(t.substr(sp));
    int col = term.column + static_cast<int>(t.find(rest, sp));
    if (rest.front() != '(') {
      int k = g_->findState(rest);
      if (k < 0 || initial || !g_->isAbsorbing(k))
        throw ParseError(lineNo, col, "expected '(k, c, d)' or an absorbing state");
      return {k, -1, -1, w};
    }
    if (rest.back() != ')') throw ParseError(lineNo, col, "unterminated tuple");
    auto parts = splitTop(rest.substr(1, rest.size() - 2), ',', col + 1);
    if (parts.size() != 3) throw ParseError(lineNo, col, "expected '(k, c, d)'");
    int k = g_->findState(parts[0].text), c = g_->findC(parts[1].text), d = g_->findD(parts[2].text);
    if (k < 0) throw ParseError(lineNo, parts[0].column, "unknown state '" + parts[0].text + "'");
    if (c < 0) throw ParseError(lineNo, parts[1].column, "unknown C signal '" + parts[1].text + "'");
    if (d < 0) throw ParseError(lineNo, parts[2].column, "unknown D signal '" + parts[2].text + "'");
    return {k, c, d, w};
  }

  void transitionLine(const Line& l) {
    auto arrow = l.text.find("->");
    if (arrow == std::string::npos) throw ParseError(l.no, 1, "expected '->'");
    auto lhs = words(l.text.substr(0, arrow), 1);
    if (lhs.size() != 3) throw ParseError(l.no, 1, "expected 'state i j ->'");
    int k = g_->findState(lhs[0].text), i = g_->findI(lhs[1].text), j = g_->findJ(lhs[2].text);
    if (k < 0) throw ParseError(l.no, lhs[0].column, "unknown state '" + lhs[0].text + "'");
    if (i < 0) throw ParseError(l.no, lhs[1].column, "unknown action '" + lhs[1].text + "'");
    if (j < 0) throw ParseError(l.no, lhs[2].column, "unknown action '" + lhs[2].text + "'");
    std::vector<SignalGame::Outcome> law;
    for (const auto& term : splitTop(l.text.substr(arrow + 2), ',', static_cast<int>(arrow) + 3))
      law.push_back(triple(term, l.no, false));
    try {
      g_->setTransition(k, i, j, std::move(law));
    } catch (const Error& e) {
      throw ParseError(l.no, lhs[0].column, e.what());
    }
  }

  std::string_view text_;
  std::vector<std::string> I_, J_;
  std::vector<std::pair<std::string, int>> C_, D_;
  std::shared_ptr<SignalGame> g_;
};

std::string joinNames(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
  return out;
}

}  // namespace

std::shared_ptr<SignalGame> loadSignalGame(std::string_view text) { return SignalParser(text).run(); }

std::shared_ptr<SignalGame> loadSignalGameFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto g = loadSignalGame(ss.str());
  if (g->name() == "signal_game") g->setName(std::filesystem::path(path).stem().string());
  return g;
}

std::string saveSignalGame(const SignalGame& g) {
  std::ostringstream out;
  std::vector<std::string> names;
  auto collect = [&](auto count, auto get) {
    names.clear();
    for (int x = 0; x < count; ++x) names.push_back(get(x));
    return joinNames(names);
  };
  out << "[actions]\n";
  out << "I = " << collect(g.numI(), [&](int i) { return g.actionI(i); }) << "\n";
  out << "J = " << collect(g.numJ(), [&](int j) { return g.actionJ(j); }) << "\n";
  out << "[states]\n";
  names.clear();
  for (int k = 0; k < g.numK(); ++k)
    if (!g.isAbsorbing(k)) names.push_back(g.stateName(k));
  if (!names.empty()) out << "active = " << joinNames(names) << "\n";
  for (int k = 0; k < g.numK(); ++k)
    if (g.isAbsorbing(k)) out << g.stateName(k) << " = " << toString(g.payoff(k)) << "\n";
  std::vector<int> cs, ds;
  for (int c = 0; c < g.numC(); ++c)
    if (g.absorbedIn(c) < 0) cs.push_back(c);
  for (int d = 0; d < g.numD(); ++d)
    if (g.absorbedInD(d) < 0) ds.push_back(d);
  out << "[signals]\n";
  names.clear();
  for (int c : cs) names.push_back(g.signalC(c));
  if (!names.empty()) out << "C = " << joinNames(names) << "\n";
  names.clear();
  for (int d : ds) names.push_back(g.signalD(d));
  if (!names.empty()) out << "D = " << joinNames(names) << "\n";
  out << "[maps i_hat, j_hat, d_hat]\n";
  for (int c : cs)
    out << g.signalC(c) << " -> " << (g.iHat(c) < 0 ? "-" : g.actionI(g.iHat(c))) << ", "
        << g.signalD(g.dHat(c)) << "\n";
  for (int d : ds) out << g.signalD(d) << " -> " << (g.jHat(d) < 0 ? "-" : g.actionJ(g.jHat(d))) << "\n";
  auto term = [&](const SignalGame::Outcome& o) {
    return toString(o.w) + " (" + g.stateName(o.k) + ", " + g.signalC(o.c) + ", " + g.signalD(o.d) + ")";
  };
  out << "[transitions]\n";
  for (int k = 0; k < g.numK(); ++k) {
    if (g.isAbsorbing(k)) continue;
    for (int i = 0; i < g.numI(); ++i)
      for (int j = 0; j < g.numJ(); ++j) {
        out << g.stateName(k) << " " << g.actionI(i) << " " << g.actionJ(j) << " ->";
        bool first = true;
        for (const auto& o : g.law(k, i, j)) {
          out << (first ? " " : ", ");
          first = false;
          if (g.isAbsorbing(o.k) && o.c == g.absorptionC(o.k, i, j) && o.d == g.absorptionD(o.k, i, j))
            out << toString(o.w) << " " << g.stateName(o.k);
          else
            out << term(o);
        }
        out << "\n";
      }
  }
  out << "[pi]\n";
  for (const auto& o : g.initial()) out << term(o) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Bundled games

std::shared_ptr<SignalGame> signal2x2() {
  auto g = std::make_shared<SignalGame>(std::vector<std::string>{"T", "B"},
                                        std::vector<std::string>{"L", "R"});
  g->setName("signal_2x2");
  const int a = g->addActive("a"), b = g->addActive("b");
  const int win = g->addAbsorbing("win", 1), lose = g->addAbsorbing("lose", -1);
  const int T = 0, B = 1, L = 0, R = 1;
  const int d0 = g->addSignalD("d0", -1);
  const int ia = g->addSignalC("ia", -1, d0), ib = g->addSignalC("ib", -1, d0);
  // After a continuation both players see the action pair.
  int seen[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::string s = g->actionI(i) + "." + g->actionJ(j);
      seen[i][j] = g->addSignalC("c." + s, i, g->addSignalD("d." + s, j));
    }
  auto stay = [&](int k, int i, int j, const Rational& w) {
    return SignalGame::Outcome{k, seen[i][j], g->dHat(seen[i][j]), w};
  };
  const Rational half(1, 2), quarter(1, 4);
  // The matching action (T at a, B at b) gambles: L pays off at a and R at
  // b, the other column punishes it. The other action is a safe pass.
  g->setTransition(a, T, L, {{win, -1, -1, half}, stay(a, T, L, half)});
  g->setTransition(a, T, R, {{lose, -1, -1, quarter}, stay(a, T, R, 1 - quarter)});
  g->setTransition(b, B, R, {{win, -1, -1, half}, stay(b, B, R, half)});
  g->setTransition(b, B, L, {{lose, -1, -1, quarter}, stay(b, B, L, 1 - quarter)});
  for (int j : {L, R}) {
    g->setTransition(a, B, j, {stay(a, B, j, 1)});
    g->setTransition(b, T, j, {stay(b, T, j, 1)});
  }
  g->setInitial({{a, ia, d0, Rational(3, 8)},
                 {a, ib, d0, Rational(1, 8)},
                 {b, ib, d0, Rational(3, 8)},
                 {b, ia, d0, Rational(1, 8)}});
  g->check();
  return g;
}

std::shared_ptr<SignalGame> symmetric2() {
  auto g = std::make_shared<SignalGame>(std::vector<std::string>{"ga", "gb", "w"},
                                        std::vector<std::string>{"free", "tax"});
  g->setName("symmetric_2");
  const int a = g->addActive("a"), b = g->addActive("b");
  const int win = g->addAbsorbing("win", 1), lose = g->addAbsorbing("lose", -1);
  const int draw = g->addAbsorbing("draw", 0);
  const int W = 2;
  // Every signal is public: C and D are copies of each other.
  auto publicSignal = [&](const std::string& s, int i, int j) {
    int d = g->addSignalD("d." + s, j);
    return std::make_pair(g->addSignalC("c." + s, i, d), d);
  };
  auto s0a = publicSignal("s0a", -1, -1), s0b = publicSignal("s0b", -1, -1);
  std::pair<int, int> read[2][2];  // read[j][s]
  for (int j = 0; j < 2; ++j)
    for (int s = 0; s < 2; ++s)
      read[j][s] = publicSignal("w." + g->actionJ(j) + (s == 0 ? ".sa" : ".sb"), W, j);
  for (int k : {a, b}) {
    int right = k == a ? 0 : 1;
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) {
        bool correct = i == right;
        g->setTransition(k, i, j, {{correct ? win : (j == 0 ? lose : draw), -1, -1, 1}});
      }
      const auto& ok = read[j][right];
      const auto& wrong = read[j][1 - right];
      if (j == 0)
        g->setTransition(k, W, j, {{k, ok.first, ok.second, Rational(2, 3)},
                                   {k, wrong.first, wrong.second, Rational(1, 3)}});
      else
        g->setTransition(k, W, j, {{lose, -1, -1, Rational(1, 4)},
                                   {k, ok.first, ok.second, Rational(1, 2)},
                                   {k, wrong.first, wrong.second, Rational(1, 4)}});
    }
  }
  g->setInitial({{a, s0a.first, s0a.second, Rational(1, 3)},
                 {a, s0b.first, s0b.second, Rational(1, 6)},
                 {b, s0b.first, s0b.second, Rational(1, 3)},
                 {b, s0a.first, s0a.second, Rational(1, 6)}});
  g->check();
  return g;
}

std::shared_ptr<SignalGame> makeSignalBuiltin(const std::string& name) {
  if (name == "signal_2x2") return signal2x2();
  if (name == "symmetric_2") return symmetric2();
  throw Error("unknown signal builtin '" + name + "'");
}

std::vector<std::string> signalBuiltinNames() { return {"signal_2x2", "symmetric_2"}; }

}  // namespace rgame
