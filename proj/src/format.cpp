#include "rgame/format.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "rgame/builtins.hpp"

namespace rgame {

ValidationError::ValidationError(std::vector<Diagnostic> diags)
    : Error([&] {
        std::string msg = "validation failed:";
        for (const auto& d : diags) msg += "\n  " + d.detail;
        return msg;
      }()),
      diags_(std::move(diags)) {}

namespace fmt_detail {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string stripComment(const std::string& line) {
  auto p = line.find('#');
  return p == std::string::npos ? line : line.substr(0, p);
}

std::vector<Token> splitTop(const std::string& s, char sep, int baseColumn) {
  std::vector<Token> out;
  int depth = 0;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    std::string piece = s.substr(start, end - start);
    std::size_t lead = 0;
    while (lead < piece.size() && std::isspace(static_cast<unsigned char>(piece[lead]))) ++lead;
    out.push_back({trim(piece), baseColumn + static_cast<int>(start + lead)});
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')') --depth;
    else if (s[i] == sep && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  flush(s.size());
  return out;
}

std::vector<Token> words(const std::string& s, int baseColumn) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t b = i;
    std::string text;
    int depth = 0;
    while (i < s.size() && (depth > 0 || !std::isspace(static_cast<unsigned char>(s[i])))) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (!std::isspace(static_cast<unsigned char>(s[i]))) text += s[i];
      ++i;
    }
    out.push_back({text, baseColumn + static_cast<int>(b)});
  }
  return out;
}

}  // namespace fmt_detail

namespace {

using fmt_detail::Token;
using fmt_detail::splitTop;
using fmt_detail::trim;
using fmt_detail::words;

std::string normalizeState(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

bool validStateName(const std::string& s) {
  if (s.empty()) return false;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    else if (c == ')') {
      if (--depth < 0) return false;
    } else if (depth == 0 && (c == ',' || c == '=' || c == ';' || c == ':' || c == '#'))
      return false;
  }
  return depth == 0 && s.find("->") == std::string::npos;
}

struct PendingTransition {
  int line, column;
  StateId state;
  std::string a, b;
  bool hasB;
  Distribution dist;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  GamePtr run() {
    std::istringstream in{std::string(text_)};
    std::string raw;
    int lineNo = 0;
    std::string section;
    bool sawContent = false;
    while (std::getline(in, raw)) {
      ++lineNo;
      std::string line = fmt_detail::stripComment(raw);
      std::string t = trim(line);
      if (t.empty()) continue;
      int col = static_cast<int>(line.find(t[0])) + 1;
      if (t.rfind("builtin", 0) == 0 && (t.size() == 7 || std::isspace(static_cast<unsigned char>(t[7])))) {
        if (sawContent) throw ParseError(lineNo, col, "builtin line must stand alone");
        builtin_ = parseBuiltin(t, lineNo, col);
        sawContent = true;
        continue;
      }
      if (builtin_) throw ParseError(lineNo, col, "content after builtin declaration");
      sawContent = true;
      if (t.front() == '[') {
        if (t.back() != ']') throw ParseError(lineNo, col, "unterminated section header");
        section = trim(t.substr(1, t.size() - 2));
        if (section != "states" && section != "actions" && section != "transitions")
          throw ParseError(lineNo, col + 1, "unknown section '" + section + "'");
        continue;
      }
      if (section == "states") parseStateLine(line, lineNo);
      else if (section == "actions") parseActionLine(line, lineNo);
      else if (section == "transitions") parseTransitionLine(line, lineNo);
      else throw ParseError(lineNo, col, "content outside any section");
    }
    if (builtin_) return builtin_;
    return finish();
  }

 private:
  GamePtr parseBuiltin(const std::string& t, int line, int col) {
    auto ws = words(t, col);
    if (ws.size() < 2) throw ParseError(line, col, "builtin needs a name");
    std::map<std::string, std::string> params;
    for (std::size_t i = 2; i < ws.size(); ++i) {
      auto eq = ws[i].text.find('=');
      if (eq == std::string::npos) throw ParseError(line, ws[i].column, "expected key=value");
      params[ws[i].text.substr(0, eq)] = ws[i].text.substr(eq + 1);
    }
    try {
      return makeBuiltin(ws[1].text, params);
    } catch (const Error& e) {
      throw ParseError(line, ws[1].column, e.what());
    }
  }

  void parseStateLine(const std::string& line, int lineNo) {
    auto parts = splitTop(line, '=', 1);
    if (parts.size() != 2) throw ParseError(lineNo, parts[0].column, "expected 'key = value'");
    const std::string& key = parts[0].text;
    const Token& val = parts[1];
    if (key == "active") {
      for (const auto& tok : splitTop(val.text, ',', val.column)) {
        std::string s = normalizeState(tok.text);
        if (!validStateName(s)) throw ParseError(lineNo, tok.column, "bad state name '" + tok.text + "'");
        declare(s, lineNo, tok.column);
        activeOrder_.push_back(s);
      }
    } else if (key == "start") {
      std::string s = normalizeState(val.text);
      if (!validStateName(s)) throw ParseError(lineNo, val.column, "bad state name");
      start_ = s;
    } else if (key == "payoff_bound") {
      bound_ = rational(val, lineNo);
      if (bound_ < 0) throw ParseError(lineNo, val.column, "negative payoff bound");
    } else {
      std::string s = normalizeState(key);
      if (!validStateName(s)) throw ParseError(lineNo, parts[0].column, "bad state name '" + key + "'");
      declare(s, lineNo, parts[0].column);
      absorbing_.emplace_back(s, rational(val, lineNo));
    }
  }

  void parseActionLine(const std::string& line, int lineNo) {
    auto colon = splitTop(line, ':', 1);
    if (colon.size() != 2) throw ParseError(lineNo, colon[0].column, "expected 'state: A = ...; B = ...'");
    std::string s = normalizeState(colon[0].text);
    if (!actionSets_.count(s) && !isActive(s))
      throw ParseError(lineNo, colon[0].column, "actions for undeclared active state '" + s + "'");
    if (actionSets_.count(s)) throw ParseError(lineNo, colon[0].column, "duplicate actions for " + s);
    std::vector<std::string> A, B;
    for (const auto& part : splitTop(colon[1].text, ';', colon[1].column)) {
      auto kv = splitTop(part.text, '=', part.column);
      if (kv.size() != 2 || (kv[0].text != "A" && kv[0].text != "B"))
        throw ParseError(lineNo, part.column, "expected 'A = ...' or 'B = ...'");
      auto& target = kv[0].text == "A" ? A : B;
      for (const auto& a : splitTop(kv[1].text, ',', kv[1].column)) {
        if (a.text.empty() || words(a.text, 0).size() != 1)
          throw ParseError(lineNo, a.column, "bad action name");
        target.push_back(a.text);
      }
    }
    if (A.empty() || B.empty()) throw ParseError(lineNo, colon[1].column, "both A and B are required");
    actionSets_[s] = {A, B};
  }

  void parseTransitionLine(const std::string& line, int lineNo) {
    auto arrow = line.find("->");
    if (arrow == std::string::npos) throw ParseError(lineNo, 1, "expected '->'");
    auto lhs = words(line.substr(0, arrow), 1);
    if (lhs.size() != 2 && lhs.size() != 3)
      throw ParseError(lineNo, lhs.empty() ? 1 : lhs[0].column, "expected 'state a [b] ->'");
    PendingTransition p;
    p.line = lineNo;
    p.column = lhs[0].column;
    p.state = normalizeState(lhs[0].text);
    p.a = lhs[1].text;
    p.hasB = lhs.size() == 3;
    if (p.hasB) p.b = lhs[2].text;
    int base = static_cast<int>(arrow) + 3;
    for (const auto& term : splitTop(line.substr(arrow + 2), ',', base)) {
      auto ws = words(term.text, term.column);
      if (ws.size() != 2) throw ParseError(lineNo, term.column, "expected 'probability state'");
      Rational pr = rational(ws[0], lineNo);
      if (pr < 0 || pr > 1)
        throw ParseError(lineNo, ws[0].column, "probability " + toString(pr) + " outside [0,1]");
      std::string s = normalizeState(ws[1].text);
      if (!validStateName(s)) throw ParseError(lineNo, ws[1].column, "bad state name");
      p.dist.push_back({s, pr});
    }
    pending_.push_back(std::move(p));
  }

  Rational rational(const Token& tok, int lineNo) {
    try {
      return parseRational(tok.text);
    } catch (const Error& e) {
      throw ParseError(lineNo, tok.column, e.what());
    }
  }

  void declare(const std::string& s, int line, int col) {
    if (!declared_.insert(s).second) throw ParseError(line, col, "duplicate state '" + s + "'");
  }

  bool isActive(const std::string& s) const {
    return std::find(activeOrder_.begin(), activeOrder_.end(), s) != activeOrder_.end();
  }

  GamePtr finish() {
    auto g = std::make_shared<RecursiveGame>();
    g->setPayoffBound(bound_);
    for (const auto& s : activeOrder_) {
      auto it = actionSets_.find(s);
      if (it == actionSets_.end()) throw ParseError(0, 0, "no actions declared for " + s);
      g->addActive(s, it->second.first, it->second.second);
    }
    for (const auto& [s, pay] : absorbing_) g->addAbsorbing(s, pay);
    for (auto& p : pending_) {
      if (!isActive(p.state))
        throw ParseError(p.line, p.column, "transition from non-active state '" + p.state + "'");
      const auto& [A, B] = actionSets_[p.state];
      std::string b = p.b;
      if (!p.hasB) {
        if (B.size() != 1)
          throw ParseError(p.line, p.column, "B action required at " + p.state);
        b = B[0];
      }
      if (std::find(A.begin(), A.end(), p.a) == A.end() ||
          std::find(B.begin(), B.end(), b) == B.end())
        throw ParseError(p.line, p.column, "unknown action at " + p.state);
      g->setTransition(p.state, p.a, b, std::move(p.dist));
    }
    if (start_) g->setInitialState(*start_);
    auto diags = validate(*g);
    if (!diags.empty()) throw ValidationError(std::move(diags));
    return g;
  }

  std::string_view text_;
  GamePtr builtin_;
  std::set<std::string> declared_;
  std::vector<std::string> activeOrder_;
  std::vector<std::pair<std::string, Rational>> absorbing_;
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> actionSets_;
  std::vector<PendingTransition> pending_;
  std::optional<std::string> start_;
  Rational bound_ = 1;
};

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

}  // namespace

GamePtr loadGame(std::string_view text) { return Parser(text).run(); }

GamePtr loadGameFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto g = loadGame(ss.str());
  // Files carry no name; use the file's stem. The parser built the game
  // non-const, so casting the pointer back is sound.
  if (auto rg = std::dynamic_pointer_cast<const RecursiveGame>(g); rg && rg->name() == "game")
    std::const_pointer_cast<RecursiveGame>(rg)->setName(std::filesystem::path(path).stem().string());
  return g;
}

std::string saveGame(const Game& game) {
  if (auto spec = game.builtinSpec()) return *spec + "\n";
  const auto* rg = dynamic_cast<const RecursiveGame*>(&game);
  if (!rg) throw Error("saveGame: only eager games and builtins can be serialized");
  std::ostringstream out;
  out << "[states]\n";
  if (auto s = rg->initialState()) out << "start = " << *s << "\n";
  if (rg->payoffBound() != 1) out << "payoff_bound = " << toString(rg->payoffBound()) << "\n";
  std::vector<std::string> active;
  for (const auto& [x, st] : rg->active()) active.push_back(x);
  if (!active.empty()) out << "active = " << join(active, ", ") << "\n";
  for (const auto& [x, g] : rg->absorbing()) out << x << " = " << toString(g) << "\n";
  if (!active.empty()) {
    out << "[actions]\n";
    for (const auto& [x, st] : rg->active())
      out << x << ": A = " << join(st.actionsA, ", ") << "; B = " << join(st.actionsB, ", ")
          << "\n";
    out << "[transitions]\n";
    for (const auto& [x, st] : rg->active())
      for (std::size_t a = 0; a < st.actionsA.size(); ++a)
        for (std::size_t b = 0; b < st.actionsB.size(); ++b) {
          out << x << " " << st.actionsA[a] << " " << st.actionsB[b] << " ->";
          const auto& d = st.cells[a * st.actionsB.size() + b];
          for (std::size_t i = 0; i < d.size(); ++i)
            out << (i ? ", " : " ") << toString(d[i].prob) << " " << d[i].state;
          out << "\n";
        }
  }
  return out.str();
}

}  // namespace rgame
