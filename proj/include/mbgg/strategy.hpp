#pragma once

#include "mbgg/reduction.hpp"

namespace mbgg {

enum class FinishedReason : uint8_t { none, maker_won_m21, breaker_pairing_b21 };
const char* to_string(FinishedReason r);

struct Activation {
  VertexId vertex;
  int entry_arc;        // -1 for the start vertex
  std::string variant;  // sequence key
};

struct MoveRecord {
  Turn mover;
  SquareId square;
  VertexId active_vertex;
};

// Scripted regular play. `cursor` indexes into the active vertex's sequence;
// when it reaches the end the next step performs the activation handoff.
struct RegularPlayState {
  std::vector<Activation> history;
  size_t cursor = 0;
  FinishedReason finished = FinishedReason::none;
  std::vector<MoveRecord> log;

  bool started() const { return !history.empty(); }
  VertexId active() const { return history.back().vertex; }
  bool at_activation_boundary(const AssociatedGame& g) const;
  // Vertex that the pending activation hands control to (requires boundary).
  VertexId pending_vertex(const AssociatedGame& g) const;
};

struct RegularStep {
  std::optional<SquareId> move;  // empty exactly on the B21 second-activation halt
  RegularPlayState state;
};

// Emits the next scripted move. `choice` ("b" or "c") is consumed exactly at
// an M12 or B12 activation boundary; anywhere else it is a protocol error.
RegularStep regular_step(const AssociatedGame& g, const RegularPlayState& rps,
                         const Position& pos, std::optional<std::string> choice = std::nullopt);

RegularPlayState regular_start();

// The squares the mover would claim under regular play (two at an M12
// activation, where Maker picks the line; one everywhere else).
SquareSet regular_move_squares(const AssociatedGame& g, const RegularPlayState& rps,
                               const Position& pos);

// {{p_e,q_e} | both joints unclaimed}; complete on the reduced game after a
// breaker-pairing-B21 halt.
Pairing lemma3_pairing(const AssociatedGame& g, const Position& pos);

struct InvariantReport {
  bool ok = true;
  std::vector<std::string> violations;
  void violate(std::string v) {
    ok = false;
    violations.push_back(std::move(v));
  }
};

// Regular-play invariants 1-4: mover claim typing, untouched gadgets, broken
// gadgets behind the token, and the M21 three-square remainder.
InvariantReport check_invariants(const AssociatedGame& g, const RegularPlayState& rps,
                                 const Position& pos);

// Lemma-6 puzzle piece pairing for vertex v when Maker holds exactly {p}
// inside X(v) and Breaker holds nothing there.
Pairing puzzle_piece_pairing(const AssociatedGame& g, VertexId v, SquareId p, const Position& pos);

// ⋃ C(v) with shared joint pairs deduplicated; throws on trait violations.
Pairing union_pairing(const AssociatedGame& g, const std::map<VertexId, Pairing>& pieces);

struct DeviationReply {
  SquareId reply;
  Pairing certificate;  // complete pairing of the position after the reply
};

// Breaker's answer to a Maker deviation p (not a regular-play square) at a
// Maker turn of regular play, together with its Breaker-win certificate.
DeviationReply breaker_reply_to_deviation(const AssociatedGame& g, const RegularPlayState& rps,
                                          const Position& pos, SquareId p);

struct SweepReport {
  bool ok = true;
  int positions = 0;
  int checks = 0;
  std::vector<std::string> failures;
  void fail(std::string f) {
    ok = false;
    if (failures.size() < 32) failures.push_back(std::move(f));
  }
};

struct Lemma5Options {
  bool solve_deviations = false;  // exhaustively solve each deviation position
  SolveLimits limits;
};

// Breaker-side soundness of regular play: a unique mate-in-one block at
// every non-choice Breaker turn, the double-threat fork at B12 choice
// points, and (optionally) a solver check that every Breaker deviation
// hands Maker the game.
SweepReport verify_lemma5(const AssociatedGame& g, const Lemma5Options& opts = {});

// Maker-side soundness: every deviation at every reachable Maker turn gets
// a reply whose certificate passes is_complete_pairing.
SweepReport verify_lemma8(const AssociatedGame& g);

// Plays regular play and the revised-rules Geography game side by side with
// the given choices (vertex names of the chosen successors), asserts the
// winners coincide, and returns the Maker/Breaker outcome.
MBWinner simulate_theorem4(const AssociatedGame& g,
                           const std::map<std::string, std::string>& choices);

// Trace-log lines: `activate <vertex> via <arc|start> variant <key>` and
// `move <n> <maker|breaker> <square> <regular|deviation>`.
std::string trace_log(const AssociatedGame& g, const RegularPlayState& rps);

}  // namespace mbgg
