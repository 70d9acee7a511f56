#include "mbgg/solver.hpp"

#include <algorithm>
#include <chrono>

#include "mbgg/gadgets.hpp"
#include "mbgg/reduction.hpp"

namespace mbgg {

namespace {

struct LimitExceeded {};

struct MemoKey {
  SquareSet maker, breaker;
  bool maker_to_move;
  bool operator==(const MemoKey& o) const {
    return maker_to_move == o.maker_to_move && maker == o.maker && breaker == o.breaker;
  }
};

struct MemoKeyHash {
  size_t operator()(const MemoKey& k) const {
    return k.maker.hash() * 3 + k.breaker.hash() * 5 + (k.maker_to_move ? 1 : 0);
  }
};

class Searcher {
 public:
  Searcher(const GameSpec& g, const SolveLimits& limits, const PairingHook& hook)
      : game_(g), limits_(limits), hook_(hook), start_(std::chrono::steady_clock::now()) {}

  uint64_t nodes() const { return nodes_; }

  // Complete pairing of the reduced position, when the bounded search finds
  // one (used for root certificates).
  std::optional<Pairing> root_pairing(const SquareSet& maker, const SquareSet& breaker) {
    std::vector<SquareSet> frees;
    for (const auto& c : game_.h.combos) {
      if (c.intersects(breaker)) continue;
      frees.push_back(c - maker);
    }
    std::sort(frees.begin(), frees.end(),
              [](const SquareSet& a, const SquareSet& b) { return a.count() < b.count(); });
    if (!frees.empty() && frees.front().count() < 2) return std::nullopt;
    std::vector<SquareSet> chosen;
    int budget = 4000;
    if (!pair_dfs(frees, 0, chosen, budget)) return std::nullopt;
    Pairing p;
    for (const auto& pr : chosen) {
      auto v = pr.to_vector();
      p.add(v[0], v[1]);
    }
    p.normalize();
    return p;
  }

  bool maker_wins(const SquareSet& maker, const SquareSet& breaker, Turn to_move) {
    bump();
    MemoKey key{maker, breaker, to_move == Turn::maker};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool result = evaluate(maker, breaker, to_move);
    memo_.emplace(key, result);
    return result;
  }

 private:
  void bump() {
    if (++nodes_ >= limits_.max_nodes) throw LimitExceeded{};
    if ((nodes_ & 1023) == 0) {
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (secs > limits_.max_seconds) throw LimitExceeded{};
    }
  }

  // Exact terminal and threat analysis; falls through to full expansion.
  bool evaluate(const SquareSet& maker, const SquareSet& breaker, Turn to_move) {
    SquareSet claimed = maker | breaker;
    SquareSet singles;          // squares completing some combo immediately
    SquareSet relevant;         // squares of surviving combinations
    int unbroken = 0;
    bool maker_won = false;
    std::vector<SquareSet> frees;  // residual free parts of unbroken combos
    frees.reserve(game_.h.combos.size());
    for (const auto& c : game_.h.combos) {
      if (c.intersects(breaker)) continue;
      ++unbroken;
      SquareSet free = c - maker;
      int n = free.count();
      if (n == 0) maker_won = true;
      if (n == 1) singles.insert(free.first());
      relevant = relevant | free;
      frees.push_back(free);
    }
    if (maker_won) return true;
    if (unbroken == 0) return false;  // every combination broken: Breaker wins

    int nsingles = singles.count();
    if (to_move == Turn::maker) {
      if (nsingles > 0) return true;  // claim the completing square
      if (has_double_threat(frees)) return true;
      // A complete pairing of the reduced game settles it for Breaker.
      if (find_complete_pairing(frees)) return false;
    } else {
      if (nsingles >= 2) return true;  // Breaker cannot block two mates in one
    }

    if (hook_) {
      if (auto pairing = hook_(Position{game_.h, maker, breaker, to_move})) {
        if (pairing_cut_sound(*pairing, maker, breaker, claimed)) return false;
      }
    }

    // Squares outside every surviving combination help neither player;
    // claiming one is a dominated pass.
    SquareSet moves = relevant - claimed;
    if (moves.empty()) return false;
    if (to_move == Turn::breaker && nsingles == 1) moves = singles;  // forced block

    for (SquareId s : ordered(moves, frees)) {
      SquareSet m = maker, b = breaker;
      (to_move == Turn::maker ? m : b).insert(s);
      bool child = maker_wins(m, b, other(to_move));
      if (to_move == Turn::maker && child) return true;
      if (to_move == Turn::breaker && !child) return false;
    }
    return to_move == Turn::breaker;
  }

  // Bounded backtracking search for pairwise disjoint pairs blocking every
  // surviving combination. Finding one is an exact Breaker-win witness.
  bool find_complete_pairing(const std::vector<SquareSet>& frees) {
    std::vector<SquareSet> open = frees;
    std::sort(open.begin(), open.end(), [](const SquareSet& a, const SquareSet& b) {
      return a.count() < b.count();
    });
    if (!open.empty() && open.front().count() < 2) return false;  // mate threat is unpairable
    std::vector<SquareSet> chosen;
    int budget = 4000;
    return pair_dfs(open, 0, chosen, budget);
  }

  bool pair_dfs(const std::vector<SquareSet>& open, size_t i, std::vector<SquareSet>& chosen,
                int& budget) {
    auto blocked = [&](const SquareSet& f) {
      for (const auto& pr : chosen)
        if (pr.subset_of(f)) return true;
      return false;
    };
    while (i < open.size() && blocked(open[i])) ++i;
    if (i == open.size()) return true;
    if (--budget <= 0) return false;
    SquareSet used;
    for (const auto& pr : chosen) used = used | pr;
    auto sqs = (open[i] - used).to_vector();
    for (size_t a = 0; a < sqs.size(); ++a)
      for (size_t b = a + 1; b < sqs.size(); ++b) {
        chosen.push_back(SquareSet::of({sqs[a], sqs[b]}));
        if (pair_dfs(open, i + 1, chosen, budget)) return true;
        chosen.pop_back();
      }
    return false;
  }

  // Maker to move: a pivot whose claim leaves two distinct mates in one.
  static bool has_double_threat(const std::vector<SquareSet>& frees) {
    for (size_t i = 0; i < frees.size(); ++i) {
      if (frees[i].count() != 2) continue;
      for (size_t j = i + 1; j < frees.size(); ++j) {
        if (frees[j].count() != 2 || frees[i] == frees[j]) continue;
        if (frees[i].intersects(frees[j])) return true;
      }
    }
    return false;
  }

  // The hook is advisory; re-check that its pairing really blocks every
  // unbroken combination with a fully unclaimed pair.
  bool pairing_cut_sound(const Pairing& pairing, const SquareSet& maker, const SquareSet& breaker,
                         const SquareSet& claimed) const {
    for (const auto& pr : pairing.pairs)
      if (claimed.contains(pr[0]) || claimed.contains(pr[1])) return false;
    SquareSet seen;
    for (const auto& pr : pairing.pairs) {
      if (seen.contains(pr[0]) || seen.contains(pr[1]) || pr[0] == pr[1]) return false;
      seen.insert(pr[0]);
      seen.insert(pr[1]);
    }
    for (const auto& c : game_.h.combos) {
      if (c.intersects(breaker)) continue;
      bool blocked = false;
      for (const auto& pr : pairing.pairs)
        if (c.contains(pr[0]) && c.contains(pr[1])) {
          blocked = true;
          break;
        }
      if (!blocked) return false;
    }
    (void)maker;
    return true;
  }

  std::vector<SquareId> ordered(const SquareSet& moves, const std::vector<SquareSet>& frees) const {
    std::array<int, kMaxSquares> heat{};
    for (const auto& free : frees) {
      int n = free.count();
      int w = n <= 5 ? (1 << (6 - n)) : 1;
      for (SquareId s : free.to_vector()) heat[static_cast<size_t>(s)] += w;
    }
    auto v = moves.to_vector();
    std::stable_sort(v.begin(), v.end(), [&](SquareId a, SquareId b) {
      return heat[static_cast<size_t>(a)] > heat[static_cast<size_t>(b)];
    });
    return v;
  }

  const GameSpec& game_;
  SolveLimits limits_;
  PairingHook hook_;
  std::chrono::steady_clock::time_point start_;
  uint64_t nodes_ = 0;
  std::unordered_map<MemoKey, bool, MemoKeyHash> memo_;
};

}  // namespace

SolveResult solve_mb_position(const Position& p, const SolveLimits& limits,
                              const PairingHook& hook) {
  GameSpec g{p.h, p.to_move};
  Searcher searcher(g, limits, hook);
  SolveResult res;
  try {
    bool mw = searcher.maker_wins(p.maker_set, p.breaker_set, p.to_move);
    res.winner = mw ? MBWinner::maker : MBWinner::breaker;
  } catch (LimitExceeded&) {
    res.conclusive = false;
    res.nodes = searcher.nodes();
    return res;
  }

  // Root certificate when a complete pairing settles the whole game.
  if (res.winner == MBWinner::breaker) {
    if (hook) {
      if (auto pairing = hook(p)) {
        if (is_complete_pairing(*pairing, reduce_position(p))) res.breaker_certificate = *pairing;
      }
    }
    if (!res.breaker_certificate)
      res.breaker_certificate = searcher.root_pairing(p.maker_set, p.breaker_set);
    if (res.breaker_certificate) {
      // the pairing strategy is the whole story; no line to reconstruct
      res.nodes = searcher.nodes();
      return res;
    }
  }

  // Principal line by memoized replay.
  Position cur = p;
  bool root_maker = res.winner == MBWinner::maker;
  while (true) {
    if (maker_has_won(cur)) break;
    SquareSet moves = legal_moves(cur);
    if (moves.empty()) break;
    GameSpec red = reduce_position(cur);
    if (red.h.combos.empty()) break;  // everything broken, rest is noise
    // Under perfect play the mover either preserves the root value (winner)
    // or cannot escape it (loser), so the first value-preserving move works.
    std::optional<SquareId> chosen;
    for (SquareId s : moves.to_vector()) {
      Position nxt = apply_move(cur, s);
      bool child;
      try {
        child = searcher.maker_wins(nxt.maker_set, nxt.breaker_set, nxt.to_move);
      } catch (LimitExceeded&) {
        break;
      }
      if (child == root_maker) {
        chosen = s;
        break;
      }
    }
    if (!chosen) break;
    res.principal_line.push_back(*chosen);
    cur = apply_move(cur, *chosen);
    if (res.principal_line.size() > static_cast<size_t>(p.h.squares.count())) break;
  }
  res.nodes = searcher.nodes();
  return res;
}

SolveResult solve_mb(const GameSpec& g, const SolveLimits& limits, const PairingHook& hook) {
  Position p{g.h, {}, {}, g.to_move};
  return solve_mb_position(p, limits, hook);
}

namespace {

struct GGKey {
  uint64_t mask;
  VertexId last;
  bool operator==(const GGKey& o) const { return mask == o.mask && last == o.last; }
};
struct GGKeyHash {
  size_t operator()(const GGKey& k) const {
    return std::hash<uint64_t>()(k.mask * 1000003ull + static_cast<uint64_t>(k.last));
  }
};

class GGSearcher {
 public:
  explicit GGSearcher(const GGInstance& inst) : inst_(inst) {
    if (inst.graph.vertex_count() > 64)
      throw std::invalid_argument("solve_gg supports at most 64 vertices");
  }

  uint64_t nodes = 0;

  // True when the player to move (after `mask` marks, standing on `last`)
  // has a winning strategy. Both rulesets share this recursion: marking an
  // already marked vertex under revised rules is an immediate loss, so a
  // rational player revisits only when stuck, which loses either way.
  bool mover_wins(uint64_t mask, VertexId last) {
    ++nodes;
    GGKey key{mask, last};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool win = false;
    for (VertexId w : inst_.graph.out[last]) {
      if (mask & (1ull << w)) continue;
      if (!mover_wins(mask | (1ull << w), w)) {
        win = true;
        break;
      }
    }
    memo_.emplace(key, win);
    return win;
  }

 private:
  const GGInstance& inst_;
  std::unordered_map<GGKey, bool, GGKeyHash> memo_;
};

}  // namespace

GGSolveResult solve_gg(const GGInstance& inst, Ruleset rules) {
  (void)rules;  // the game value is ruleset-independent; see mover_wins
  GGSearcher s(inst);
  uint64_t mask0 = 1ull << inst.start;
  // After Alice's forced first mark it is Bob's turn.
  bool bob_wins = s.mover_wins(mask0, inst.start);
  GGSolveResult res;
  res.winner = bob_wins ? GGPlayer::bob : GGPlayer::alice;
  res.nodes = s.nodes;
  res.principal_line.push_back(inst.start);
  uint64_t mask = mask0;
  VertexId last = inst.start;
  bool mover_should_win = bob_wins;
  while (true) {
    // the mover wins iff some move hands the opponent a lost position, so a
    // value-consistent line continues with opp == !mover_should_win
    std::optional<VertexId> chosen;
    for (VertexId w : inst.graph.out[last]) {
      if (mask & (1ull << w)) continue;
      bool opp = s.mover_wins(mask | (1ull << w), w);
      if (opp == mover_should_win) continue;
      chosen = w;
      break;
    }
    if (!chosen) break;  // mover is stuck and loses here
    res.principal_line.push_back(*chosen);
    mask |= 1ull << *chosen;
    last = *chosen;
    mover_should_win = !mover_should_win;
  }
  return res;
}

EquivalenceReport verify_equivalence(const GGInstance& inst, const GadgetLibrary& lib,
                                     const SolveLimits& limits, bool check_uniformized) {
  EquivalenceReport rep;
  auto gg = solve_gg(inst);
  rep.gg_winner = gg.winner;
  rep.gg_nodes = gg.nodes;

  AssociatedGame ag = build_associated_game(inst, lib);
  PairingHook hook = make_joint_pairing_hook(ag);
  auto mb = solve_mb(ag.spec, limits, hook);
  rep.mb_nodes = mb.nodes;
  if (!mb.conclusive) {
    rep.complete = false;
    return rep;
  }
  rep.mb_winner = mb.winner;
  rep.equivalent = (gg.winner == GGPlayer::alice) == (mb.winner == MBWinner::maker);

  if (check_uniformized && rep.equivalent) {
    GameSpec uni = uniformize5(ag.spec);
    auto mbu = solve_mb(uni, limits, hook);
    if (!mbu.conclusive) {
      rep.complete = false;
      return rep;
    }
    rep.checked_uniformized = true;
    rep.uniformized_equivalent = mbu.winner == mb.winner;
  }
  return rep;
}

}  // namespace mbgg
