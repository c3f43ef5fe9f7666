// rgame: command-line front end for the recursive-game library.
//
// Exit status: 0 when every executed check passed, 1 when a check failed,
// 2 for an invalid configuration or a computation error. Reports contain no
// timings, so the same flags and seed give byte-identical output.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rgame/builtins.hpp"
#include "rgame/checks.hpp"
#include "rgame/format.hpp"
#include "rgame/signals.hpp"
#include "rgame/simulate.hpp"
#include "rgame/strategy.hpp"
#include "rgame/values.hpp"

namespace {

using namespace rgame;

class ConfigError : public Error {
 public:
  using Error::Error;
};

std::string num(double v, const char* spec = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::uint64_t defaultSeed() {
  const char* s = std::getenv("RGAME_SEED");
  if (!s || !*s) return 1;
  char* end = nullptr;
  auto v = std::strtoull(s, &end, 10);
  if (*end) throw ConfigError(std::string("RGAME_SEED is not an integer: ") + s);
  return v;
}

void checkLambda(double l) {
  if (!(l > 0 && l <= 1)) throw ConfigError("lambda must lie in (0, 1], got " + num(l));
}

void checkEps(double e) {
  if (!(e > 0 && e <= 0.5)) throw ConfigError("eps must lie in (0, 1/2], got " + num(e));
}

void checkPositive(const char* what, long v) {
  if (v < 1) throw ConfigError(std::string(what) + " must be at least 1");
}

// Report text to stdout or --out; flat table to --table when asked.
struct Output {
  std::string out, table;

  void add(CLI::App* app) {
    app->add_option("--out", out, "Write the report here instead of stdout");
    app->add_option("--table", table, "Write the flat tab-separated table here");
  }

  static void write(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
  }

  void emit(const std::string& report, const std::string& flat) const {
    if (out.empty()) std::cout << report;
    else write(out, report);
    if (!table.empty()) write(table, flat);
  }
};

struct GameOptions {
  std::string builtin, path, start;
  std::vector<std::string> params;

  void add(CLI::App* app, const std::string& defaultBuiltin) {
    builtin = defaultBuiltin;
    app->add_option("--builtin", builtin, "Bundled game")->capture_default_str();
    app->add_option("--game", path, "Game file; overrides --builtin");
    app->add_option("--param", params, "Builtin parameter key=value, e.g. bound=3000");
    app->add_option("--start", start, "Initial state (default: the game's own)");
  }

  GamePtr load() const {
    if (!path.empty()) return loadGameFile(path);
    std::map<std::string, std::string> kv;
    for (const auto& p : params) {
      auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects key=value, got '" + p + "'");
      kv[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return makeBuiltin(builtin, kv);
  }

  StateId initial(const Game& g) const {
    if (!start.empty()) {
      if (!g.contains(start)) throw ConfigError("state " + start + " is not in " + g.name());
      return start;
    }
    if (auto s = g.initialState()) return *s;
    throw ConfigError(g.name() + " has no initial state; pass --start");
  }
};

struct Caps {
  int depth = -1;
  std::size_t stateCap = 5'000'000;

  void add(CLI::App* app) {
    app->add_option("--depth", depth, "Exploration depth (-1: closure, or N when targeted)");
    app->add_option("--state-cap", stateCap, "Maximum explored states")->capture_default_str();
  }
};

std::string header(const std::string& section, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string s = "[" + section + "]\n";
  for (const auto& [k, v] : kv) s += k + " = " + v + "\n";
  return s;
}

// ------------------------------------------------------------------ values

struct ValuesCmd {
  GameOptions game;
  Caps caps;
  Output output;
  int n = 0, every = 0;
  std::string mode = "sweep";
  std::vector<std::string> watch;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("values", "n-stage values v_n with truncation brackets");
    game.add(app, "lehrer_sorin");
    caps.add(app);
    output.add(app);
    app->add_option("--n", n, "Horizon N")->required();
    app->add_option("--watch", watch, "States to tabulate (default: the start state)");
    app->add_option("--every", every, "Table stride in n (default: about 20 rows)");
    app->add_option("--mode", mode, "sweep or targeted")->check(CLI::IsMember({"sweep", "targeted"}));
    app->callback([this] { run(); });
  }

  int status = 0;

  void run() {
    checkPositive("--n", n);
    auto g = game.load();
    StateId x0 = game.initial(*g);
    if (watch.empty()) watch.push_back(x0);
    DepthPolicy pol;
    pol.mode = mode == "targeted" ? DepthPolicy::Mode::Targeted : DepthPolicy::Mode::Sweep;
    pol.depth = caps.depth;
    pol.stateCap = caps.stateCap;
    pol.keepHistory = false;
    std::vector<StateId> roots{x0};
    for (const auto& x : watch) {
      if (!g->contains(x)) throw ConfigError("state " + x + " is not in " + g->name());
      if (std::find(roots.begin(), roots.end(), x) == roots.end()) roots.push_back(x);
    }
    auto seq = computeVn(g, roots, n, pol, watch);
    const int stride = every > 0 ? every : std::max(1, n / 20);

    std::string flat = "n\tstate\tlower\tupper\n";
    for (int k = 1; k <= n; ++k) {
      if (k != 1 && k % stride != 0 && k != n) continue;
      for (std::size_t w = 0; w < watch.size(); ++w)
        flat += std::to_string(k) + "\t" + watch[w] + "\t" + num(seq.watchedLower(w, k)) + "\t" +
                num(seq.watchedUpper(w, k)) + "\n";
    }
    const auto& viol = seq.driftViolations();
    std::string report = header("values", {{"game", g->name()},
                                           {"start", x0},
                                           {"n", std::to_string(n)},
                                           {"mode", mode},
                                           {"states", std::to_string(seq.explored().size())},
                                           {"frontier", std::to_string(seq.explored().frontierCount())},
                                           {"drift_violations", std::to_string(viol.size())}});
    for (const auto& v : viol)
      report += "# drift " + num(v.drift) + " > 2/(n+1) = " + num(v.bound) + " at n = " + std::to_string(v.n) +
                ", " + v.state + "\n";
    report += "\n[table]\n" + flat;
    output.emit(report, flat);
    status = viol.empty() ? 0 : 1;
  }
};

// -------------------------------------------------------------- discounted

struct DiscountedCmd {
  GameOptions game;
  Caps caps;
  Output output;
  std::vector<double> lambdas;
  double tol = 1e-10;
  std::vector<std::string> watch;
  int status = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("discounted", "discounted values v_lambda with truncation brackets");
    game.add(app, "lehrer_sorin");
    caps.add(app);
    output.add(app);
    app->add_option("--lambda", lambdas, "Discount factor(s) in (0, 1]")->required();
    app->add_option("--tol", tol, "Value-iteration tolerance")->capture_default_str();
    app->add_option("--watch", watch, "States to tabulate (default: the start state)");
    app->callback([this] { run(); });
  }

  void run() {
    for (double l : lambdas) checkLambda(l);
    if (!(tol > 0)) throw ConfigError("--tol must be positive");
    auto g = game.load();
    StateId x0 = game.initial(*g);
    if (watch.empty()) watch.push_back(x0);
    std::string flat = "lambda\tstate\tlower\tupper\tresidual\tsweeps\n";
    for (double l : lambdas) {
      auto d = computeVLambda(g, x0, l, tol, caps.depth, caps.stateCap);
      for (const auto& x : watch) {
        auto [lo, hi] = d.bracket(x);
        flat += num(l) + "\t" + x + "\t" + num(lo) + "\t" + num(hi) + "\t" + num(d.residual) + "\t" +
                std::to_string(d.sweeps) + "\n";
      }
    }
    std::string report = header("discounted", {{"game", g->name()}, {"start", x0}, {"tol", num(tol)}});
    report += "\n[table]\n" + flat;
    output.emit(report, flat);
  }
};

// --------------------------------------------------------------------- net

struct NetCmd {
  GameOptions game;
  Caps caps;
  Output output;
  int n = 0;
  std::vector<double> eps{0.5};
  std::vector<std::string> states;
  int status = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("net", "size of an eps-net of {v_1..v_N} in sup norm");
    game.add(app, "lehrer_sorin");
    caps.add(app);
    output.add(app);
    app->add_option("--n", n, "Horizon N")->required();
    app->add_option("--eps", eps, "Net radius, in (0, 1/2]")->capture_default_str();
    app->add_option("--states", states, "Roots and norm domain (default: the start state's closure)");
    app->callback([this] { run(); });
  }

  void run() {
    checkPositive("--n", n);
    for (double e : eps) checkEps(e);
    auto g = game.load();
    std::vector<StateId> roots = states;
    if (roots.empty()) roots.push_back(game.initial(*g));
    for (const auto& x : roots)
      if (!g->contains(x)) throw ConfigError("state " + x + " is not in " + g->name());
    DepthPolicy pol;
    pol.depth = caps.depth;
    pol.stateCap = caps.stateCap;
    auto seq = computeVn(g, roots, n, pol);
    std::string flat = "eps\tsize\trepresentatives\n";
    for (double e : eps) {
      auto net = epsilonNet(seq, e, states);
      std::string reps;
      for (int r : net.representatives) reps += (reps.empty() ? "" : ",") + std::to_string(r);
      flat += num(e) + "\t" + std::to_string(net.representatives.size()) + "\t" + reps + "\n";
    }
    std::string report = header("net", {{"game", g->name()},
                                        {"n", std::to_string(n)},
                                        {"roots", std::to_string(roots.size())},
                                        {"states", std::to_string(seq.explored().size())}});
    report += "\n[table]\n" + flat;
    output.emit(report, flat);
  }
};

// ------------------------------------------------------ synthesis commands

struct SynthesisFlags {
  double eps = 0.1;
  int horizon = 1000, tailWindow = 100;
  std::size_t stateCap = 1'000'000;

  void add(CLI::App* app) {
    app->add_option("--eps", eps, "Target accuracy, in (0, 1/2]")->capture_default_str();
    app->add_option("--n", horizon, "Horizon used to estimate v")->capture_default_str();
    app->add_option("--tail-window", tailWindow, "Window for the limit estimate")->capture_default_str();
    app->add_option("--state-cap", stateCap, "Maximum explored states")->capture_default_str();
  }

  Synthesis run(GamePtr g, const StateId& x0) const {
    checkEps(eps);
    checkPositive("--n", horizon);
    checkPositive("--tail-window", tailWindow);
    if (tailWindow > horizon) throw ConfigError("--tail-window exceeds --n");
    SynthesisOptions opt;
    opt.eps = eps;
    opt.horizon = horizon;
    opt.tailWindow = tailWindow;
    opt.stateCap = stateCap;
    return synthesize(std::move(g), x0, opt);
  }
};

std::string synthesisSummary(const Synthesis& s, const StateId& x0) {
  return header("synthesis", {{"eps", num(s.eps)},
                              {"M", num(s.M)},
                              {"eta", num(s.eta)},
                              {"horizon", std::to_string(s.horizon)},
                              {"v(start)", num(s.v.at(x0))},
                              {"tail_drift", num(s.tailDrift)},
                              {"n0", std::to_string(s.n0)},
                              {"l_star", std::to_string(s.lStar)},
                              {"l3", std::to_string(s.l3)},
                              {"N1", std::to_string(s.N1)},
                              {"certificate", s.cert.ok() ? "ok" : "failed"},
                              {"s_star_violations", std::to_string(s.sStar.violations.size())}});
}

struct SynthesizeCmd {
  GameOptions game;
  Output output;
  SynthesisFlags flags;
  std::string strategyPath;
  int status = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("synthesize", "build the eps-optimal strategy and its certificate");
    game.add(app, "quitting_simple");
    output.add(app);
    flags.add(app);
    app->add_option("--strategy-out", strategyPath, "Write the serialized strategy here");
    app->callback([this] { run(); });
  }

  void run() {
    auto g = game.load();
    StateId x0 = game.initial(*g);
    auto s = flags.run(g, x0);
    std::string strategy = describe(*s.sigma);
    if (!strategyPath.empty()) Output::write(strategyPath, strategy);
    std::string flat = "state\tn(x)\n";
    for (const auto& [x, k] : s.cert.n) flat += x + "\t" + std::to_string(k) + "\n";
    std::string report = synthesisSummary(s, x0);
    for (const auto& x : s.cert.failures) report += "# no certificate at " + x + "\n";
    for (const auto& x : s.sStar.violations) report += "# s* slack below tolerance at " + x + "\n";
    report += "\n" + strategy;
    output.emit(report, flat);
    status = s.cert.ok() && s.sStar.violations.empty() ? 0 : 1;
  }
};

struct PlayFlags {
  int runs = 1000;
  long horizon = 0;
  std::uint64_t seed = 0;
  double level = 0.99;
  std::string adversary = "all";

  void add(CLI::App* app) {
    seed = defaultSeed();
    app->add_option("--runs", runs, "Monte Carlo runs per adversary")->capture_default_str();
    app->add_option("--horizon", horizon, "Stages per run (default: N1)");
    app->add_option("--seed", seed, "Seed (default: RGAME_SEED or 1)");
    app->add_option("--level", level, "Confidence level of the intervals")->capture_default_str();
    app->add_option("--adversary", adversary, "Menu adversary name, or all")->capture_default_str();
  }

  std::vector<AdversarySpec> menu() const {
    checkPositive("--runs", runs);
    if (!(level > 0 && level < 1)) throw ConfigError("--level must lie in (0, 1)");
    std::vector<AdversarySpec> out;
    std::string names;
    for (const auto& a : adversaryMenu()) {
      names += (names.empty() ? "" : ", ") + a.name();
      if (adversary == "all" || adversary == a.name()) out.push_back(a);
    }
    if (out.empty()) throw ConfigError("unknown adversary '" + adversary + "' (menu: " + names + ")");
    return out;
  }

  SimOptions options(const Synthesis& s) const {
    SimOptions o;
    o.horizon = horizon > 0 ? horizon : s.N1;
    o.runs = runs;
    o.seed = seed;
    o.level = level;
    return o;
  }
};

std::string statsRow(const std::string& adversary, const PlayStats& st) {
  auto est = [&](const Estimate& e) { return num(e.mean) + "\t" + num(e.halfWidth(st.level)); };
  auto absorbed = st.absorbedBy(st.horizon);
  return adversary + "\t" + std::to_string(st.runs) + "\t" + std::to_string(st.horizon) + "\t" + est(st.gamma) +
         "\t" + est(st.upcrossings) + "\t" + est(st.oddFrequency) + "\t" + num(absorbed.mean) + "\t" +
         std::to_string(st.censored) + "\n";
}

const char* kStatsHeader =
    "adversary\truns\thorizon\tgamma\tgamma_hw\tupcrossings\tupcrossings_hw\todd_frequency\todd_frequency_hw\t"
    "absorbed\tcensored\n";

struct SimulateCmd {
  GameOptions game;
  Output output;
  SynthesisFlags flags;
  PlayFlags play;
  int status = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("simulate", "play the synthesized strategy against the adversary menu");
    game.add(app, "quitting_simple");
    output.add(app);
    flags.add(app);
    play.add(app);
    app->callback([this] { run(); });
  }

  void run() {
    auto menu = play.menu();
    auto g = game.load();
    StateId x0 = game.initial(*g);
    auto s = flags.run(g, x0);
    auto opt = play.options(s);
    std::string flat = kStatsHeader;
    for (const auto& spec : menu) {
      auto adv = makeAdversary(spec, g, s.sigma, s.v, x0);
      auto st = collectStats(g, x0, automatonAgent(s.sigma), adv, &s.v, opt);
      flat += statsRow(spec.name(), st);
    }
    std::string report = synthesisSummary(s, x0) + "\n" +
                         header("simulate", {{"seed", std::to_string(opt.seed)}, {"level", num(opt.level)}}) +
                         "\n[table]\n" + flat;
    output.emit(report, flat);
  }
};

// ------------------------------------------------------------------ verify

CheckRow makeRow(std::string name, double bound, double estimate, bool lowerBound, std::string note = {}) {
  CheckRow r;
  r.name = std::move(name);
  r.bound = bound;
  r.estimate = estimate;
  r.lowerBound = lowerBound;
  r.pass = lowerBound ? estimate >= bound : estimate <= bound;
  r.note = std::move(note);
  return r;
}

bool allPass(const std::vector<CheckRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

struct VerifyCmd {
  GameOptions game;
  Output output;
  SynthesisFlags flags;
  PlayFlags play;
  double sigmas = 3;
  int hMax = BestResponseOptions{}.hMax;
  int status = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("verify", "lemma checks for the synthesized strategy");
    game.add(app, "quitting_simple");
    output.add(app);
    flags.add(app);
    play.add(app);
    app->add_option("--sigmas", sigmas, "Monte Carlo slack in standard errors")->capture_default_str();
    app->add_option("--h-max", hMax, "Largest horizon for the exact best response")->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() {
    auto menu = play.menu();
    if (!(sigmas >= 0)) throw ConfigError("--sigmas must be nonnegative");
    auto g = game.load();
    StateId x0 = game.initial(*g);
    auto s = flags.run(g, x0);
    const double eps = s.eps, v1 = s.v.at(x0);
    std::vector<CheckRow> rows;

    rows.push_back(makeRow("certificate covers every explored active state", 0,
                           static_cast<double>(s.cert.failures.size()), false));
    rows.push_back(makeRow("min s* slack", -flags.eps * 1e-4, s.sStar.minSlack(), true));

    // Exact best response for short horizons.
    BestResponseOptions bro;
    bro.hMax = hMax;
    double worstDp = 1e300;
    int reached = 0;
    for (int k = 1; k <= hMax; ++k) {
      BestResponse br(g, s.sigma, k, bro);
      auto v = br.value(x0);
      if (!v) break;
      reached = k;
      worstDp = std::min(worstDp, *v);
    }
    if (reached > 0)
      rows.push_back(makeRow("best-response DP min over n <= " + std::to_string(reached), v1 - 25 * eps, worstDp,
                             true, "exact"));

    auto opt = play.options(s);
    for (const auto& spec : menu) {
      auto adv = makeAdversary(spec, g, s.sigma, s.v, x0);
      auto st = collectStats(g, x0, automatonAgent(s.sigma), adv, &s.v, opt);
      auto tag = [&](CheckRow r) {
        r.name += " vs " + spec.name();
        rows.push_back(std::move(r));
      };
      tag(guaranteeCheck(st, v1, eps, sigmas));
      tag(upcrossingCheck(st, eps, sigmas));
      tag(phaseFrequencyCheck(st, eps, sigmas));
      for (auto& r : submartingaleCheck(st, eps, sigmas)) tag(std::move(r));
    }

    // Tauberian comparison: where a uniform value exists, v_n and v_lambda
    // share the limit, so at n = 1/lambda they should be close.
    const double lambda = 1.0 / s.horizon;
    auto d = computeVLambda(g, x0, lambda, 1e-10, -1, flags.stateCap);
    auto [lo, hi] = d.bracket(x0);
    rows.push_back(makeRow("|v_n(x1) - v_lambda(x1)|, n = 1/lambda = " + std::to_string(s.horizon), eps,
                           std::fabs(v1 - lo), false,
                           "v_n = " + num(v1) + ", v_lambda in [" + num(lo) + ", " + num(hi) + "]"));

    std::string flat = formatRows(rows);
    std::string report = synthesisSummary(s, x0) + "\n[checks]\n" + flat;
    report += std::string("\nresult = ") + (allPass(rows) ? "pass" : "fail") + "\n";
    output.emit(report, flat);
    status = allPass(rows) ? 0 : 1;
  }
};

// ----------------------------------------------------------------- signals

struct SignalsCmd {
  std::string builtin, path, numeric = "exact";
  int n = 3;
  CheckConfig cfg;
  Output output;
  int status = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("signals", "image, round-trip, linearity and value-agreement checks");
    app->add_option("--builtin", builtin, "Bundled signal game (default: all bundled)");
    app->add_option("--game", path, "Signal-game file; overrides --builtin");
    app->add_option("--n", n, "Largest horizon for the value agreement")->capture_default_str();
    app->add_option("--numeric", numeric, "exact or double")->check(CLI::IsMember({"exact", "double"}));
    cfg.seed = defaultSeed();
    app->add_option("--seed", cfg.seed, "Seed (default: RGAME_SEED or 1)");
    app->add_option("--samples", cfg.imageSamples, "Random images for the round trip")->capture_default_str();
    app->add_option("--pairs", cfg.lipschitzPairs, "Belief pairs for the Lipschitz check")->capture_default_str();
    output.add(app);
    app->callback([this] { run(); });
  }

  void run() {
    checkPositive("--n", n);
    if (n > 4) throw ConfigError("--n is capped at 4 (directVn cost)");
    checkPositive("--samples", cfg.imageSamples);
    checkPositive("--pairs", cfg.lipschitzPairs);
    std::vector<SignalGamePtr> games;
    if (!path.empty()) games.push_back(loadSignalGameFile(path));
    else if (!builtin.empty()) games.push_back(makeSignalBuiltin(builtin));
    else
      for (const auto& name : signalBuiltinNames()) games.push_back(makeSignalBuiltin(name));

    std::string report;
    for (const auto& g : games) {
      auto z = image(initialLaw<Rational>(*g));
      report += header("game", {{"name", g->name()},
                                {"states", std::to_string(g->numK())},
                                {"image", toString(z)}}) +
                "\n";
    }
    std::vector<CheckRow> rows = signalIdentityRows(cfg, games);
    for (auto& r : signalValueRows(n, numeric == "exact", games)) rows.push_back(std::move(r));
    for (auto& r : lipschitzRows(cfg, games)) rows.push_back(std::move(r));
    std::string flat = formatRows(rows);
    report += "[checks]\n" + flat;
    report += std::string("\nresult = ") + (allPass(rows) ? "pass" : "fail") + "\n";
    output.emit(report, flat);
    status = allPass(rows) ? 0 : 1;
  }
};

// ------------------------------------------------------------------ report

struct ReportCmd {
  std::vector<int> only;
  CheckConfig cfg;
  Output output;
  int status = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("report", "acceptance summary, one line per criterion");
    app->add_option("--only", only, "Criterion ids to run (default: all)");
    cfg.seed = defaultSeed();
    app->add_option("--seed", cfg.seed, "Seed (default: RGAME_SEED or 1)");
    app->add_option("--runs", cfg.runs, "Monte Carlo runs per adversary")->capture_default_str();
    output.add(app);
    app->callback([this] { run(); });
  }

  void run() {
    checkPositive("--runs", cfg.runs);
    auto ids = only.empty() ? criterionIds() : only;
    for (int id : ids) criterionName(id);  // rejects unknown ids before any work
    std::string lines, details, flat = "criterion\t" + formatRows({});
    int failed = 0;
    for (int id : ids) {
      auto c = runCriterion(id, cfg);
      failed += c.pass ? 0 : 1;
      lines += formatCriterion(c) + "\n";
      details += "\n[criterion " + std::to_string(id) + "]\n" + formatRows(c.rows);
      std::istringstream rows(formatRows(c.rows));
      std::string line;
      std::getline(rows, line);  // header
      while (std::getline(rows, line)) flat += std::to_string(id) + "\t" + line + "\n";
    }
    std::string report = lines + details + "\n" + std::to_string(ids.size() - failed) + " of " +
                         std::to_string(ids.size()) + " criteria pass\n";
    output.emit(report, flat);
    status = failed == 0 ? 0 : 1;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive games: values, strategies and verification"};
  app.require_subcommand(1);
  ValuesCmd values;
  DiscountedCmd discounted;
  NetCmd net;
  SynthesizeCmd synth;
  SimulateCmd simulate;
  VerifyCmd verify;
  SignalsCmd signals;
  ReportCmd report;
  try {
    values.add(app);
    discounted.add(app);
    net.add(app);
    synth.add(app);
    simulate.add(app);
    verify.add(app);
    signals.add(app);
    report.add(app);
  } catch (const ConfigError& e) {
    std::cerr << "rgame: " << e.what() << "\n";
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "rgame: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rgame: error: " << e.what() << "\n";
    return 2;
  }
  return values.status | discounted.status | net.status | synth.status | simulate.status | verify.status |
         signals.status | report.status;
}
