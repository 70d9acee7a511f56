// Command-line front door: parse, validate, normalize, classify, reduce,
// uniformize, solve, verify, simulate, generate, replay.
//
// Exit codes: 0 pass/solved, 1 fail/counterexample, 2 usage error or
// inconclusive result.

#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mbgg/formats.hpp"
#include "mbgg/gadgets.hpp"
#include "mbgg/reduction.hpp"
#include "mbgg/solver.hpp"
#include "mbgg/strategy.hpp"

using namespace mbgg;

namespace {

GadgetLibrary load_library(const std::string& flag_path) {
  if (!flag_path.empty()) return parse_gadget_library_file(flag_path);
  if (const char* env = std::getenv("MBGG_GADGET_LIB"); env && *env)
    return parse_gadget_library_file(env);
  return builtin_library();
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

std::string line_names(const Position& p, const std::vector<SquareId>& line) {
  std::string s;
  for (SquareId sq : line) {
    if (!s.empty()) s += ' ';
    s += p.h.table->name(sq);
  }
  return s;
}

std::map<std::string, std::string> parse_choices(const std::string& arg) {
  std::map<std::string, std::string> choices;
  std::istringstream is(arg);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("bad --choices entry '" + item + "', want vertex=successor");
    choices[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return choices;
}

int cmd_validate(const std::string& path, bool planar) {
  GGInstance inst = parse_gg_file(path);
  auto rep = validate_convertible(inst, planar);
  std::cout << (rep.ok ? "PASS" : "FAIL") << '\n';
  for (const auto& v : rep.violations) std::cout << v << '\n';
  return rep.ok ? 0 : 1;
}

int cmd_normalize(const std::string& path, const std::string& out) {
  GGInstance inst = parse_gg_file(path);
  std::ofstream f;
  write_gg(open_output(f, out), normalize_start(inst));
  return 0;
}

int cmd_classify(const std::string& path) {
  GGInstance inst = parse_gg_file(path);
  auto bip = bipartition_from_start(inst);
  for (VertexId v = 0; v < inst.graph.vertex_count(); ++v)
    std::cout << inst.graph.names[v] << ' ' << to_string(classify_vertex(inst, bip, v)) << ' '
              << (bip.is_a(v) ? "A" : "B") << '\n';
  return 0;
}

int cmd_reduce(const std::string& path, const std::string& lib_path, bool uniform5,
               const std::string& map_path, const std::string& out) {
  GGInstance inst = parse_gg_file(path);
  AssociatedGame ag = build_associated_game(inst, load_library(lib_path));
  if (!map_path.empty()) {
    std::ofstream mf(map_path);
    if (!mf) throw std::runtime_error("cannot write " + map_path);
    write_reduction_map(mf, ag);
  }
  GameSpec spec = uniform5 ? uniformize5(ag.spec) : ag.spec;
  Position p{spec.h, {}, {}, spec.to_move};
  std::ofstream f;
  write_mbh(open_output(f, out), p);
  return 0;
}

int cmd_solve_gg(const std::string& path, bool revised) {
  GGInstance inst = parse_gg_file(path);
  auto res = solve_gg(inst, revised ? Ruleset::revised : Ruleset::original);
  std::string line;
  for (VertexId v : res.principal_line) {
    if (!line.empty()) line += ' ';
    line += inst.graph.names[v];
  }
  std::cout << "winner=" << to_string(res.winner) << " nodes=" << res.nodes << " line=" << line
            << '\n';
  return 0;
}

int cmd_solve_mb(const std::string& path, uint64_t max_nodes, double max_seconds,
                 const std::string& certify) {
  Position p = parse_mbh_file(path);
  auto res = solve_mb_position(p, SolveLimits{max_nodes, max_seconds});
  if (!res.conclusive) {
    std::cout << "INCONCLUSIVE\nnodes=" << res.nodes << '\n';
    return 2;
  }
  std::cout << "winner=" << to_string(res.winner) << " nodes=" << res.nodes
            << " line=" << line_names(p, res.principal_line) << '\n';
  if (!certify.empty()) {
    std::ofstream f(certify);
    if (!f) throw std::runtime_error("cannot write " + certify);
    if (res.winner == MBWinner::breaker && res.breaker_certificate) {
      for (const auto& pr : res.breaker_certificate->pairs)
        f << "pair " << p.h.table->name(pr[0]) << ' ' << p.h.table->name(pr[1]) << '\n';
    } else {
      f << "line " << line_names(p, res.principal_line) << '\n';
    }
  }
  return 0;
}

int cmd_verify_equivalence(const std::string& path, const std::string& lib_path, bool uniform5,
                           uint64_t max_nodes, double max_seconds) {
  GGInstance inst = parse_gg_file(path);
  auto rep = verify_equivalence(inst, load_library(lib_path), SolveLimits{max_nodes, max_seconds},
                                uniform5);
  if (!rep.complete) {
    std::cout << "INCONCLUSIVE\n";
    return 2;
  }
  bool pass = rep.equivalent && (!uniform5 || rep.uniformized_equivalent);
  std::cout << (pass ? "PASS" : "FAIL") << '\n';
  std::cout << "geography=" << to_string(rep.gg_winner)
            << " maker-breaker=" << to_string(rep.mb_winner) << " gg-nodes=" << rep.gg_nodes
            << " mb-nodes=" << rep.mb_nodes << '\n';
  if (rep.checked_uniformized)
    std::cout << "uniformized=" << (rep.uniformized_equivalent ? "same-winner" : "WINNER-CHANGED")
              << '\n';
  return pass ? 0 : 1;
}

int cmd_check_gadgets(const std::string& lib_path) {
  GadgetLibrary lib = load_library(lib_path);
  auto rep = validate_library(lib);
  bool ok = rep.ok();
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  for (const auto& [cls, gr] : rep.by_class) {
    for (const auto& c : gr.checks) {
      std::cout << to_string(cls) << ' ' << c.name << ' ' << (c.pass ? "ok" : "FAIL");
      if (!c.detail.empty()) std::cout << "  (" << c.detail << ')';
      std::cout << '\n';
    }
  }
  if (rep.by_class.size() != 6) std::cout << "library does not define all six classes\n";
  return ok ? 0 : 1;
}

int cmd_synth_gadgets(int budget, uint64_t seed, const std::string& out) {
  try {
    GadgetLibrary lib = synthesize_gadgets(budget, seed);
    std::ofstream f;
    write_gadget_library(open_output(f, out), lib);
    return 0;
  } catch (const SynthesisFailure& e) {
    std::cout << "FAIL\n" << e.what() << '\n';
    for (const auto& [cls, gr] : e.best_report.by_class)
      for (const auto& c : gr.checks)
        if (!c.pass) std::cout << to_string(cls) << ' ' << c.name << ": " << c.detail << '\n';
    return 1;
  }
}

// Drives regular play, resolving M12/B12 choices from a vertex=successor map.
std::pair<RegularPlayState, Position> run_regular(const AssociatedGame& ag,
                                                  const std::map<std::string, std::string>& choices) {
  const Digraph& graph = ag.instance.graph;
  RegularPlayState rps = regular_start();
  Position pos{ag.spec.h, {}, {}, Turn::maker};
  while (rps.finished == FinishedReason::none) {
    std::optional<std::string> choice;
    if (rps.started() && rps.at_activation_boundary(ag)) {
      VertexId w = rps.pending_vertex(ag);
      VertexClass wc = ag.map.classes[static_cast<size_t>(w)];
      bool fresh = true;
      for (const auto& act : rps.history) fresh &= act.vertex != w;
      if (fresh && (wc == VertexClass::M12 || wc == VertexClass::B12)) {
        auto it = choices.find(graph.names[w]);
        if (it == choices.end())
          throw std::runtime_error("no --choices entry for vertex " + graph.names[w]);
        std::optional<char> role;
        for (const auto& [r, a] : ag.map.role_arc[static_cast<size_t>(w)]) {
          auto [f, t] = graph.arcs[static_cast<size_t>(a)];
          if (f == w && graph.names[t] == it->second) role = r;
        }
        if (!role) throw std::runtime_error(it->second + " is not a successor of " + it->first);
        choice = std::string(1, *role);
      }
    }
    RegularStep step = regular_step(ag, rps, pos, choice);
    if (step.move) pos = apply_move(pos, *step.move);
    rps = step.state;
  }
  return {rps, pos};
}

int cmd_simulate_regular(const std::string& path, const std::string& lib_path,
                         const std::string& choices_arg, const std::string& trace_path) {
  GGInstance inst = parse_gg_file(path);
  AssociatedGame ag = build_associated_game(inst, load_library(lib_path));
  auto choices = parse_choices(choices_arg);
  auto [rps, pos] = run_regular(ag, choices);
  MBWinner winner = simulate_theorem4(ag, choices);
  std::cout << "winner=" << to_string(winner) << " moves=" << rps.log.size()
            << " finished=" << to_string(rps.finished) << '\n';
  if (!trace_path.empty()) {
    std::ofstream f(trace_path);
    if (!f) throw std::runtime_error("cannot write " + trace_path);
    f << trace_log(ag, rps);
  }
  return 0;
}

int cmd_check_deviations(const std::string& path, const std::string& lib_path, int lemma,
                         bool solve, uint64_t max_nodes, double max_seconds) {
  GGInstance inst = parse_gg_file(path);
  AssociatedGame ag = build_associated_game(inst, load_library(lib_path));
  SweepReport rep;
  if (lemma == 5) {
    Lemma5Options opts;
    opts.solve_deviations = solve;
    opts.limits = SolveLimits{max_nodes, max_seconds};
    rep = verify_lemma5(ag, opts);
  } else {
    rep = verify_lemma8(ag);
  }
  std::cout << (rep.ok ? "PASS" : "FAIL") << '\n';
  std::cout << "positions=" << rep.positions << " checks=" << rep.checks << '\n';
  for (const auto& f : rep.failures) std::cout << f << '\n';
  return rep.ok ? 0 : 1;
}

int cmd_gen(int vertices, uint64_t seed, const std::string& out) {
  GGInstance inst = gen_convertible(vertices, seed);
  std::ofstream f;
  write_gg(open_output(f, out), inst);
  return 0;
}

// Re-validates a recorded trace: legality, regular/deviation tags, and the
// play invariants along the way. Variants are taken from the activate lines.
int cmd_replay(const std::string& gg_path, const std::string& trace_path,
               const std::string& lib_path) {
  GGInstance inst = parse_gg_file(gg_path);
  AssociatedGame ag = build_associated_game(inst, load_library(lib_path));
  std::ifstream f(trace_path);
  if (!f) throw std::runtime_error("cannot open " + trace_path);

  std::deque<std::string> variants;  // from activate lines, in order
  std::vector<std::pair<Turn, std::pair<std::string, bool>>> moves;  // (mover, (square, regular))
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> t;
    std::string tok;
    while (ls >> tok) {
      if (tok[0] == '#') break;  // comments start at a token boundary
      t.push_back(tok);
    }
    if (t.empty()) continue;
    if (t[0] == "activate" && t.size() == 6 && t[4] == "variant") {
      variants.push_back(t[5]);
    } else if (t[0] == "move" && t.size() == 5) {
      moves.emplace_back(t[2] == "maker" ? Turn::maker : Turn::breaker,
                         std::make_pair(t[3], t[4] == "regular"));
    } else if (t[0] == "finished") {
      // informational
    } else {
      throw ParseError(trace_path + ":" + std::to_string(lineno) + ": unrecognized trace line");
    }
  }

  bool ok = true;
  std::vector<std::string> problems;
  RegularPlayState rps = regular_start();
  Position pos{ag.spec.h, {}, {}, Turn::maker};
  int applied = 0;
  for (const auto& [mover, sq_tag] : moves) {
    const auto& [sq_name, regular] = sq_tag;
    auto sq = pos.h.table->lookup(sq_name);
    if (!sq) {
      ok = false;
      problems.push_back("unknown square " + sq_name);
      break;
    }
    if (mover != pos.to_move) {
      ok = false;
      problems.push_back("mover out of turn at move " + std::to_string(applied + 1));
    }
    if (regular) {
      SquareSet expect = regular_move_squares(ag, rps, pos);
      if (!expect.contains(*sq)) {
        ok = false;
        problems.push_back(sq_name + " is not a regular move at move " + std::to_string(applied + 1));
        break;
      }
      std::optional<std::string> choice;
      if (rps.started() && rps.at_activation_boundary(ag)) {
        VertexId w = rps.pending_vertex(ag);
        VertexClass wc = ag.map.classes[static_cast<size_t>(w)];
        bool fresh = true;
        for (const auto& act : rps.history) fresh &= act.vertex != w;
        if (fresh && (wc == VertexClass::M12 || wc == VertexClass::B12)) {
          // the pending activation's variant comes from its activate line
          std::string want =
              rps.history.size() < variants.size() ? variants[rps.history.size()] : "choose-b";
          choice = want == "choose-c" ? "c" : "b";
        }
      }
      RegularStep step = regular_step(ag, rps, pos, choice);
      if (step.move && *step.move != *sq) {
        ok = false;
        problems.push_back("script expects " + pos.h.table->name(*step.move) + " at move " +
                           std::to_string(applied + 1));
      }
      rps = step.state;
    }
    pos = apply_move(pos, *sq);
    ++applied;
    auto inv = check_invariants(ag, rps, pos);
    if (!inv.ok) {
      ok = false;
      for (const auto& v : inv.violations)
        problems.push_back("after move " + std::to_string(applied) + ": " + v);
    }
  }
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  std::cout << "moves=" << applied << '\n';
  for (const auto& p : problems) std::cout << p << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maker-Breaker games and Generalized Geography reductions"};
  app.require_subcommand(1);

  std::string input, trace, out, map_path, lib_path, choices, certify;
  bool planar = false, revised = false, uniform5 = false, solve_devs = false;
  uint64_t max_nodes = UINT64_MAX, seed = 1;
  double max_seconds = 1e18;
  int lemma = 0, vertices = 6, budget = 4000;

  auto add_lib = [&](CLI::App* c) {
    c->add_option("--lib", lib_path, "gadget library file (default: built-in or MBGG_GADGET_LIB)");
  };
  auto add_limits = [&](CLI::App* c) {
    c->add_option("--max-nodes", max_nodes, "node budget before giving up");
    c->add_option("--max-seconds", max_seconds, "time budget before giving up");
  };

  auto* validate = app.add_subcommand("validate", "check convertibility of a Geography instance");
  validate->add_option("input", input)->required();
  validate->add_flag("--planar", planar, "also require planarity");

  auto* normalize = app.add_subcommand("normalize", "rewrite a degree-2 start to out-degree 1");
  normalize->add_option("input", input)->required();
  normalize->add_option("-o,--output", out);

  auto* classify = app.add_subcommand("classify", "print the class of every vertex");
  classify->add_option("input", input)->required();

  auto* reduce = app.add_subcommand("reduce", "build the associated Maker-Breaker game");
  reduce->add_option("input", input)->required();
  reduce->add_flag("--uniform5", uniform5, "5-uniformize the output");
  reduce->add_option("--map", map_path, "write the square map sidecar");
  reduce->add_option("-o,--output", out);
  add_lib(reduce);

  auto* sgg = app.add_subcommand("solve-gg", "solve a Geography instance exactly");
  sgg->add_option("input", input)->required();
  sgg->add_flag("--revised", revised, "play under revised rules");

  auto* smb = app.add_subcommand("solve-mb", "solve a Maker-Breaker game exactly");
  smb->add_option("input", input)->required();
  smb->add_option("--certify", certify, "write a winner certificate");
  add_limits(smb);

  auto* veq = app.add_subcommand("verify-equivalence", "Geography winner vs Maker-Breaker winner");
  veq->add_option("input", input)->required();
  veq->add_flag("--uniform5", uniform5, "also check the 5-uniformized game");
  add_lib(veq);
  add_limits(veq);

  auto* chk = app.add_subcommand("check-gadgets", "run the gadget library validator");
  chk->add_option("input", lib_path, "library file (default: built-in)");

  auto* synth = app.add_subcommand("synth-gadgets", "search for a valid gadget library");
  synth->add_option("--budget", budget, "validator-call budget");
  synth->add_option("--seed", seed, "search seed");
  synth->add_option("-o,--output", out);

  auto* sim = app.add_subcommand("simulate-regular", "play regular play against Geography");
  sim->add_option("input", input)->required();
  sim->add_option("--choices", choices, "comma list vertex=successor for M12/B12 activations");
  sim->add_option("--trace", trace, "write the move trace");
  add_lib(sim);

  auto* dev = app.add_subcommand("check-deviations", "verify deviation handling");
  dev->add_option("input", input)->required();
  dev->add_option("--lemma", lemma, "5 or 8")->required()->check(CLI::IsMember({5, 8}));
  dev->add_flag("--solve", solve_devs, "also solve each Breaker deviation exactly");
  add_lib(dev);
  add_limits(dev);

  auto* gen = app.add_subcommand("gen", "generate a random convertible instance");
  gen->add_option("--vertices", vertices, "vertex budget");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("-o,--output", out);

  auto* replay = app.add_subcommand("replay", "re-validate a recorded trace");
  replay->add_option("input", input)->required();
  replay->add_option("trace", trace)->required();
  add_lib(replay);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(input, planar);
    if (app.got_subcommand(normalize)) return cmd_normalize(input, out);
    if (app.got_subcommand(classify)) return cmd_classify(input);
    if (app.got_subcommand(reduce)) return cmd_reduce(input, lib_path, uniform5, map_path, out);
    if (app.got_subcommand(sgg)) return cmd_solve_gg(input, revised);
    if (app.got_subcommand(smb)) return cmd_solve_mb(input, max_nodes, max_seconds, certify);
    if (app.got_subcommand(veq))
      return cmd_verify_equivalence(input, lib_path, uniform5, max_nodes, max_seconds);
    if (app.got_subcommand(chk)) return cmd_check_gadgets(lib_path);
    if (app.got_subcommand(synth)) return cmd_synth_gadgets(budget, seed, out);
    if (app.got_subcommand(sim)) return cmd_simulate_regular(input, lib_path, choices, trace);
    if (app.got_subcommand(dev))
      return cmd_check_deviations(input, lib_path, lemma, solve_devs, max_nodes, max_seconds);
    if (app.got_subcommand(gen)) return cmd_gen(vertices, seed, out);
    if (app.got_subcommand(replay)) return cmd_replay(input, trace, lib_path);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
