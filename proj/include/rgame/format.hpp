#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rgame/game.hpp"

namespace rgame {

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) +
              ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

// Game text format:
//
//   # comment
//   [states]
//   start = s
//   active = s, (0,0)
//   win = 1
//   [actions]
//   s: A = quit, continue; B = allow, block
//   [transitions]
//   s continue allow -> 1/2 s, 1/2 win
//
// A transition may omit the B action when B(x) is a singleton. A file may
// instead consist of one line "builtin NAME key=value ...". The optional
// "payoff_bound = r" line in [states] widens the payoff range check.
GamePtr loadGame(std::string_view text);
GamePtr loadGameFile(const std::string& path);
std::string saveGame(const Game& game);

// Shared lexical helpers, also used by the signal-game format.
namespace fmt_detail {

struct Token {
  std::string text;
  int column;  // 1-based
};

// Splits on the separator at parenthesis depth 0, trimming blanks.
std::vector<Token> splitTop(const std::string& s, char sep, int baseColumn);
std::string trim(const std::string& s);
std::string stripComment(const std::string& line);
// Whitespace tokenization that keeps "(a, b)" groups whole.
std::vector<Token> words(const std::string& s, int baseColumn);

}  // namespace fmt_detail

}  // namespace rgame
