#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgame/signals.hpp"
#include "rgame/simulate.hpp"

namespace rgame {

// Sizes of the acceptance checks. Defaults are the acceptance settings;
// smaller values give a quick smoke run with the same code paths.
struct CheckConfig {
  std::uint64_t seed = 1;
  int lsHorizon = 2000;     // v_n(0,0) horizon
  long lsBound = 3000;      // lattice truncation x <= bound
  int runs = 10000;         // Monte Carlo runs per adversary
  int matrixGames = 1000;
  int grid = 200;
  int imageSamples = 100;   // random eta for the round trip
  int lipschitzPairs = 100;
};

struct Criterion {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;  // the headline numbers
  std::vector<CheckRow> rows;
};

std::vector<int> criterionIds();  // 1..13
std::string criterionName(int id);
Criterion runCriterion(int id, const CheckConfig& cfg);

// The pieces the CLI also runs on their own.
std::vector<CheckRow> driftRows(const std::vector<std::string>& builtins, int horizon);
// The signal rows run on `games`, or on the bundled signal games when empty.
std::vector<CheckRow> signalIdentityRows(const CheckConfig& cfg, const std::vector<SignalGamePtr>& games = {});
std::vector<CheckRow> signalValueRows(int maxN, bool exact = true, const std::vector<SignalGamePtr>& games = {});
std::vector<CheckRow> lipschitzRows(const CheckConfig& cfg, const std::vector<SignalGamePtr>& games = {});

// Criterion as a single line: "[PASS] 3 name: summary".
std::string formatCriterion(const Criterion& c);

}  // namespace rgame
