// Python bindings. Games cross the boundary as opaque handles; results come
// back as plain floats, lists and dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rgame/builtins.hpp"
#include "rgame/checks.hpp"
#include "rgame/format.hpp"
#include "rgame/signals.hpp"
#include "rgame/simulate.hpp"
#include "rgame/strategy.hpp"
#include "rgame/values.hpp"

namespace py = pybind11;
using namespace rgame;

namespace {

StateId startOf(const Game& g, const std::optional<StateId>& start) {
  if (start) return *start;
  if (auto s = g.initialState()) return *s;
  throw Error(g.name() + " has no initial state; pass start");
}

py::dict rowDict(const CheckRow& r) {
  py::dict d;
  d["name"] = r.name;
  d["bound"] = r.bound;
  d["estimate"] = r.estimate;
  d["ci"] = r.ci;
  d["lower_bound"] = r.lowerBound;
  d["passed"] = r.pass;
  d["note"] = r.note;
  return d;
}

SignalGamePtr signalGame(const std::string& nameOrPath) {
  for (const auto& n : signalBuiltinNames())
    if (n == nameOrPath) return makeSignalBuiltin(n);
  return loadSignalGameFile(nameOrPath);
}

// v_n(0..N) at the watched states as (lower, upper) pairs.
std::map<StateId, std::vector<std::pair<double, double>>> values(GamePtr g, int n,
                                                                  std::optional<StateId> start,
                                                                  std::vector<StateId> watch,
                                                                  const std::string& mode, int depth) {
  StateId x0 = startOf(*g, start);
  if (watch.empty()) watch.push_back(x0);
  if (mode != "sweep" && mode != "targeted") throw Error("mode must be 'sweep' or 'targeted'");
  DepthPolicy pol;
  pol.mode = mode == "targeted" ? DepthPolicy::Mode::Targeted : DepthPolicy::Mode::Sweep;
  pol.depth = depth;
  pol.keepHistory = false;
  std::vector<StateId> roots{x0};
  for (const auto& x : watch)
    if (x != x0) roots.push_back(x);
  auto seq = computeVn(g, roots, n, pol, watch);
  std::map<StateId, std::vector<std::pair<double, double>>> out;
  for (std::size_t w = 0; w < watch.size(); ++w) {
    auto& col = out[watch[w]];
    for (int k = 1; k <= n; ++k) col.emplace_back(seq.watchedLower(w, k), seq.watchedUpper(w, k));
  }
  return out;
}

Synthesis synth(GamePtr g, std::optional<StateId> start, double eps, int horizon) {
  if (!(eps > 0 && eps <= 0.5)) throw Error("eps must lie in (0, 1/2]");
  SynthesisOptions opt;
  opt.eps = eps;
  opt.horizon = horizon;
  StateId x0 = startOf(*g, start);
  return synthesize(std::move(g), x0, opt);
}

}  // namespace

PYBIND11_MODULE(_rgame, m) {
  m.doc() = "Recursive games: values, strategy synthesis and verification";

  py::register_exception<Error>(m, "RGameError", PyExc_ValueError);

  py::class_<Game, std::shared_ptr<Game>>(m, "Game")
      .def_property_readonly("name", &Game::name)
      .def_property_readonly("initial_state", &Game::initialState)
      .def("contains", &Game::contains)
      .def("is_absorbing", &Game::isAbsorbing)
      .def("payoff", [](const Game& g, const StateId& x) { return g.payoff(x).get_d(); })
      .def("actions_a", &Game::actionsA)
      .def("actions_b", &Game::actionsB)
      .def("transition",
           [](const Game& g, const StateId& x, int a, int b) {
             std::vector<std::pair<StateId, double>> out;
             for (const auto& o : g.transition(x, a, b)) out.emplace_back(o.state, o.prob.get_d());
             return out;
           })
      .def("to_text", [](const Game& g) { return saveGame(g); })
      .def("__repr__", [](const Game& g) { return "<rgame.Game " + g.name() + ">"; });

  auto mutableGame = [](GamePtr g) { return std::const_pointer_cast<Game>(std::move(g)); };
  m.def("builtin_names", &builtinGameNames);
  m.def("builtin",
        [mutableGame](const std::string& name, const std::map<std::string, std::string>& params) {
          return mutableGame(makeBuiltin(name, params));
        },
        py::arg("name"), py::arg("params") = std::map<std::string, std::string>{});
  m.def("load_game", [mutableGame](const std::string& path) { return mutableGame(loadGameFile(path)); });
  m.def("parse_game", [mutableGame](const std::string& text) { return mutableGame(loadGame(text)); });

  m.def("values",
        [](std::shared_ptr<Game> g, int n, std::optional<StateId> start, std::vector<StateId> watch,
           const std::string& mode, int depth) { return values(g, n, start, watch, mode, depth); },
        py::arg("game"), py::arg("n"), py::arg("start") = std::nullopt,
        py::arg("watch") = std::vector<StateId>{}, py::arg("mode") = "sweep", py::arg("depth") = -1,
        py::call_guard<py::gil_scoped_release>(),
        "v_1..v_n at each watched state as (lower, upper) truncation brackets.");

  m.def("discounted",
        [](std::shared_ptr<Game> g, double lambda, std::optional<StateId> start, double tol) {
          StateId x0 = startOf(*g, start);
          return computeVLambda(g, x0, lambda, tol).bracket(x0);
        },
        py::arg("game"), py::arg("lam"), py::arg("start") = std::nullopt, py::arg("tol") = 1e-10,
        py::call_guard<py::gil_scoped_release>(), "(lower, upper) bracket of v_lambda at the start state.");

  m.def("synthesize",
        [](std::shared_ptr<Game> g, double eps, int horizon, std::optional<StateId> start) {
          StateId x0 = startOf(*g, start);
          Synthesis s;
          {
            py::gil_scoped_release release;
            s = synth(g, start, eps, horizon);
          }
          py::dict d;
          d["eps"] = s.eps;
          d["M"] = s.M;
          d["v_start"] = s.v.at(x0);
          d["tail_drift"] = s.tailDrift;
          d["n0"] = s.n0;
          d["l_star"] = s.lStar;
          d["N1"] = s.N1;
          d["certificate_ok"] = s.cert.ok();
          d["strategy"] = describe(*s.sigma);
          return d;
        },
        py::arg("game"), py::arg("eps") = 0.1, py::arg("horizon") = 1000, py::arg("start") = std::nullopt);

  m.def("simulate",
        [](std::shared_ptr<Game> g, double eps, int runs, std::uint64_t seed, long horizon,
           std::optional<StateId> start) {
          if (runs < 1) throw Error("runs must be at least 1");
          StateId x0 = startOf(*g, start);
          std::vector<std::pair<std::string, PlayStats>> stats;
          {
            py::gil_scoped_release release;
            auto s = synth(g, start, eps, 1000);
            SimOptions opt;
            opt.runs = runs;
            opt.seed = seed;
            opt.horizon = horizon > 0 ? horizon : s.N1;
            for (const auto& spec : adversaryMenu()) {
              auto adv = makeAdversary(spec, g, s.sigma, s.v, x0);
              stats.emplace_back(spec.name(), collectStats(g, x0, automatonAgent(s.sigma), adv, &s.v, opt));
            }
          }
          py::dict out;
          for (const auto& [name, st] : stats) {
            py::dict d;
            d["gamma"] = st.gamma.mean;
            d["gamma_half_width"] = st.gamma.halfWidth(st.level);
            d["upcrossings"] = st.upcrossings.mean;
            d["odd_frequency"] = st.oddFrequency.mean;
            d["absorbed"] = st.absorbedBy(st.horizon).mean;
            d["horizon"] = st.horizon;
            out[py::str(name)] = d;
          }
          return out;
        },
        py::arg("game"), py::arg("eps") = 0.1, py::arg("runs") = 1000, py::arg("seed") = 1,
        py::arg("horizon") = 0, py::arg("start") = std::nullopt,
        "Plays the synthesized strategy against each menu adversary.");

  m.def("criterion_ids", &criterionIds);
  m.def("criterion",
        [](int id, std::uint64_t seed, int runs) {
          CheckConfig cfg;
          cfg.seed = seed;
          cfg.runs = runs;
          Criterion c;
          {
            py::gil_scoped_release release;
            c = runCriterion(id, cfg);
          }
          py::dict d;
          d["id"] = c.id;
          d["name"] = c.name;
          d["passed"] = c.pass;
          d["summary"] = c.summary;
          py::list rows;
          for (const auto& r : c.rows) rows.append(rowDict(r));
          d["rows"] = rows;
          return d;
        },
        py::arg("id"), py::arg("seed") = 1, py::arg("runs") = 10000);

  m.def("signal_builtin_names", &signalBuiltinNames);
  m.def("signal_values",
        [](const std::string& game, int n) {
          auto g = signalGame(game);
          auto pi = initialLaw<Rational>(*g);
          auto z = image(pi);
          BeliefGame<Rational> bg(g);
          std::vector<std::pair<double, double>> out;
          for (int k = 1; k <= n; ++k) out.emplace_back(directVn(*g, pi, k), beliefValue(bg, z, k));
          return out;
        },
        py::arg("game"), py::arg("n") = 3, py::call_guard<py::gil_scoped_release>(),
        "(directVn, w_n(Phi(pi))) for n = 1..N on a bundled signal game or a signal-game file.");
  m.def("signal_image", [](const std::string& game) {
    return toString(image(initialLaw<Rational>(*signalGame(game))));
  });
  m.def("wasserstein",
        [](const std::vector<std::pair<double, std::vector<double>>>& x,
           const std::vector<std::pair<double, std::vector<double>>>& y) {
          auto build = [](const std::vector<std::pair<double, std::vector<double>>>& atoms) {
            SecondOrderBelief<double> s;
            for (const auto& [w, p] : atoms) s.atoms.push_back({Belief<double>{p}, w});
            canonicalize(s.atoms);
            return s;
          };
          return wasserstein(build(x), build(y));
        },
        py::arg("x"), py::arg("y"),
        "Distance between finite laws on beliefs, each a list of (weight, belief) pairs.");

#ifdef RGAME_VERSION
  m.attr("__version__") = RGAME_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
