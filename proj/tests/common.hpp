#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// here (plain minimax, play-out Geography, instance enumeration) deliberately
// avoid the library's solver internals.

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mbgg/core.hpp"
#include "mbgg/formats.hpp"
#include "mbgg/geography.hpp"
#include "mbgg/solver.hpp"

namespace mbgg::testing {

inline Position make_position(const std::vector<std::vector<std::string>>& combos,
                              const std::vector<std::string>& maker = {},
                              const std::vector<std::string>& breaker = {},
                              Turn to_move = Turn::maker,
                              const std::vector<std::string>& extra_squares = {}) {
  Position p;
  p.h.table = std::make_shared<SquareTable>();
  auto add = [&](const std::string& n) {
    SquareId s = p.h.table->intern(n);
    p.h.squares.insert(s);
    return s;
  };
  for (const auto& c : combos) {
    SquareSet cs;
    for (const auto& n : c) cs.insert(add(n));
    p.h.combos.push_back(cs);
  }
  for (const auto& n : extra_squares) add(n);
  p.h.normalize();
  for (const auto& n : maker) p.maker_set.insert(add(n));
  for (const auto& n : breaker) p.breaker_set.insert(add(n));
  p.to_move = to_move;
  return p;
}

inline GameSpec make_game(const std::vector<std::vector<std::string>>& combos,
                          Turn to_move = Turn::maker,
                          const std::vector<std::string>& extra_squares = {}) {
  Position p = make_position(combos, {}, {}, to_move, extra_squares);
  return {p.h, p.to_move};
}

inline SquareId sq(const Position& p, const std::string& name) {
  auto id = p.h.table->lookup(name);
  if (!id) throw std::runtime_error("no square " + name);
  return *id;
}
inline SquareId sq(const GameSpec& g, const std::string& name) {
  auto id = g.h.table->lookup(name);
  if (!id) throw std::runtime_error("no square " + name);
  return *id;
}

inline SquareSet set_of(const Position& p, const std::vector<std::string>& names) {
  SquareSet s;
  for (const auto& n : names) s.insert(sq(p, n));
  return s;
}
inline SquareSet set_of(const GameSpec& g, const std::vector<std::string>& names) {
  SquareSet s;
  for (const auto& n : names) s.insert(sq(g, n));
  return s;
}

inline std::vector<std::string> names_of(const Hypergraph& h, const SquareSet& s) {
  std::vector<std::string> v;
  for (SquareId i : s.to_vector()) v.push_back(h.table->name(i));
  std::sort(v.begin(), v.end());
  return v;
}

// Maker-Breaker Tic-Tac-Toe.
inline GameSpec tic_tac_toe(Turn to_move = Turn::maker) {
  return make_game({{"1", "2", "3"},
                    {"4", "5", "6"},
                    {"7", "8", "9"},
                    {"1", "4", "7"},
                    {"2", "5", "8"},
                    {"3", "6", "9"},
                    {"1", "5", "9"},
                    {"3", "5", "7"}},
                   to_move);
}

// The sliding-window path family (X_n, F_n) and its odd-index pairing C_n.
inline GameSpec path_game(int n) {
  std::vector<std::vector<std::string>> combos;
  for (int k = 1; k + 2 <= n; ++k)
    combos.push_back(
        {std::to_string(k), std::to_string(k + 1), std::to_string(k + 2)});
  return make_game(combos);
}

inline Pairing path_pairing(const GameSpec& g, int n) {
  Pairing c;
  for (int i = 1; i + 1 <= n; i += 2) c.add(sq(g, std::to_string(i)), sq(g, std::to_string(i + 1)));
  c.normalize();
  return c;
}

// Reference minimax: no memo, no pruning, no move ordering.
inline MBWinner plain_minimax(const Position& p) {
  if (maker_has_won(p)) return MBWinner::maker;
  SquareSet moves = legal_moves(p);
  if (moves.empty()) return MBWinner::breaker;
  MBWinner mover = p.to_move == Turn::maker ? MBWinner::maker : MBWinner::breaker;
  MBWinner best = mover == MBWinner::maker ? MBWinner::breaker : MBWinner::maker;
  for (SquareId s : moves.to_vector())
    if (plain_minimax(apply_move(p, s)) == mover) return mover;
  return best;
}

// Reference Geography value by direct play-out over GGState (both rulesets).
inline GGPlayer plain_gg_winner(const GGInstance& inst, Ruleset rules) {
  struct Rec {
    const GGInstance& inst;
    Ruleset rules;
    // true when the player about to move from `st` wins
    bool mover_wins(GGState& st) {
      auto moves = legal_moves_gg(inst, st);
      if (moves.empty()) return false;
      for (VertexId w : moves) {
        st.marked.push_back(w);
        bool lost_now = false;
        if (rules == Ruleset::revised) {
          // moving onto a marked vertex loses immediately
          lost_now = std::count(st.marked.begin(), st.marked.end(), w) > 1;
        }
        bool opponent_wins = lost_now ? true : mover_wins(st);
        st.marked.pop_back();
        if (!opponent_wins) return true;
      }
      return false;
    }
  } rec{inst, rules};
  GGState st;
  st.rules = rules;
  st.marked.push_back(inst.start);
  // Alice made the forced first mark; Bob moves next
  return rec.mover_wins(st) ? GGPlayer::bob : GGPlayer::alice;
}

inline GGInstance gg_from_text(const std::string& text) {
  std::istringstream is(text);
  return parse_gg(is, "<test>");
}

inline const char* kE1 = "start s\nedge s v\nedge v w\nedge w v\n";
inline const char* kE2 = "start s\nedge s v\nedge v w\nedge w x\nedge x w\n";
inline const char* kE3 =
    "start s\nedge s v\nedge v w1\nedge v w2\nedge w1 x\nedge w2 x\nedge x w1\n";
inline const char* kE4 =
    "start s\nedge s a1\nedge a1 b1\nedge b1 a2\nedge b1 a3\nedge a2 b2\nedge b2 a2\n"
    "edge a3 b3\nedge b3 a4\nedge a4 b3\n";

// Every labeled convertible instance with exactly n vertices (start fixed as
// vertex 0). Exhaustive over out-neighbor assignments, filtered by the
// convertibility validator.
inline std::vector<GGInstance> enumerate_convertible(int n, bool start_degree_two = false) {
  std::vector<GGInstance> out;
  if (n < 2) return out;
  // out-neighbor option lists per vertex
  std::vector<std::vector<std::vector<int>>> options(static_cast<size_t>(n));
  {
    std::vector<int> targets;
    for (int t = 1; t < n; ++t) targets.push_back(t);
    auto& s_opts = options[0];
    if (!start_degree_two) {
      for (int t : targets) s_opts.push_back({t});
    } else {
      for (size_t i = 0; i < targets.size(); ++i)
        for (size_t j = i + 1; j < targets.size(); ++j)
          s_opts.push_back({targets[i], targets[j]});
    }
    for (int v = 1; v < n; ++v) {
      auto& opts = options[static_cast<size_t>(v)];
      std::vector<int> tg;
      for (int t = 1; t < n; ++t)
        if (t != v) tg.push_back(t);
      for (int t : tg) opts.push_back({t});
      for (size_t i = 0; i < tg.size(); ++i)
        for (size_t j = i + 1; j < tg.size(); ++j) opts.push_back({tg[i], tg[j]});
    }
  }
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  while (true) {
    GGInstance inst;
    inst.graph.add_vertex("s");
    for (int v = 1; v < n; ++v) inst.graph.add_vertex("v" + std::to_string(v));
    for (int v = 0; v < n; ++v)
      for (int t : options[static_cast<size_t>(v)][idx[static_cast<size_t>(v)]])
        inst.graph.add_arc(v, t);
    inst.graph.finalize();
    inst.start = 0;
    auto rep = validate_convertible(inst);
    bool accept = rep.ok;
    if (start_degree_two)
      // the out-degree-2 start must be the one and only complaint
      accept = rep.violations.size() == 1 &&
               rep.violations[0].find("clause 4: start out-degree is 2") != std::string::npos;
    if (accept) out.push_back(std::move(inst));
    // odometer
    int v = 0;
    for (; v < n; ++v) {
      if (++idx[static_cast<size_t>(v)] < options[static_cast<size_t>(v)].size()) break;
      idx[static_cast<size_t>(v)] = 0;
    }
    if (v == n) break;
  }
  return out;
}

}  // namespace mbgg::testing
