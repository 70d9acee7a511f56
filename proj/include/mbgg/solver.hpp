#pragma once

#include <functional>
#include <optional>

#include "mbgg/core.hpp"
#include "mbgg/geography.hpp"

namespace mbgg {

struct SolveLimits {
  uint64_t max_nodes = UINT64_MAX;
  double max_seconds = 1e18;
};

enum class MBWinner : uint8_t { maker, breaker };
inline const char* to_string(MBWinner w) { return w == MBWinner::maker ? "maker" : "breaker"; }

struct SolveResult {
  bool conclusive = true;  // false when limits were exceeded; winner then meaningless
  MBWinner winner = MBWinner::breaker;
  uint64_t nodes = 0;
  std::vector<SquareId> principal_line;
  // Breaker-win certificate, present only when a pairing hook produced the
  // root cutoff. Validated by is_complete_pairing.
  std::optional<Pairing> breaker_certificate;
};

// Returns a complete pairing of the position's reduced game when the caller
// knows one, nullopt otherwise. Soundness is re-checked inside the solver.
using PairingHook = std::function<std::optional<Pairing>(const Position&)>;

// Exact minimax with memoization, immediate-win and forced-reply pruning,
// mate-in-two cuts, and an optional pairing-certificate short-circuit.
// Never returns a wrong winner: resource exhaustion flips `conclusive`.
SolveResult solve_mb(const GameSpec& g, const SolveLimits& limits = {},
                     const PairingHook& hook = nullptr);
SolveResult solve_mb_position(const Position& p, const SolveLimits& limits = {},
                              const PairingHook& hook = nullptr);

struct GGSolveResult {
  GGPlayer winner = GGPlayer::alice;
  uint64_t nodes = 0;
  std::vector<VertexId> principal_line;  // mark sequence of one optimal play-out
};

GGSolveResult solve_gg(const GGInstance& inst, Ruleset rules = Ruleset::original);

struct GadgetLibrary;  // gadgets.hpp

struct EquivalenceReport {
  bool complete = true;  // false when a solver was inconclusive
  bool equivalent = false;
  GGPlayer gg_winner = GGPlayer::alice;
  MBWinner mb_winner = MBWinner::maker;
  bool checked_uniformized = false;
  bool uniformized_equivalent = false;
  uint64_t gg_nodes = 0, mb_nodes = 0;
};

// Theorem-9 oracle: Alice wins (G,s) iff Maker wins the associated game.
// With check_uniformized, repeats the Maker-Breaker solve after uniformize5.
EquivalenceReport verify_equivalence(const GGInstance& inst, const GadgetLibrary& lib,
                                     const SolveLimits& limits = {},
                                     bool check_uniformized = false);

}  // namespace mbgg
