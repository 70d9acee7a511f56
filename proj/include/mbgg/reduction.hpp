#pragma once

#include "mbgg/core.hpp"
#include "mbgg/gadgets.hpp"
#include "mbgg/geography.hpp"
#include "mbgg/solver.hpp"

namespace mbgg {

// Global square bookkeeping for one associated game. Joint squares are
// shared between the two endpoint gadgets of their arc; interiors belong to
// exactly one vertex.
struct ReductionMap {
  std::vector<std::map<std::string, SquareId>> local_to_global;  // per vertex
  std::vector<std::array<SquareId, 2>> arc_joints;               // per arc: (p_e, q_e)
  std::vector<std::map<char, int>> role_arc;                     // per vertex: role -> arc id
  std::vector<VertexClass> classes;                              // per vertex

  SquareId global(VertexId v, const std::string& local_name) const;
  // Vertices owning a square (2 for joints, 1 for interiors).
  std::vector<VertexId> owners(SquareId s) const;
  // All squares of H(v).
  SquareSet gadget_squares(VertexId v) const;
  char role_of_arc(VertexId v, int arc) const;

  // built lazily by build_associated_game
  std::vector<SquareSet> gadget_squares_cache;
  std::vector<std::vector<VertexId>> owners_cache;
};

struct AssociatedGame {
  GameSpec spec;  // to_move = maker
  ReductionMap map;
  GGInstance instance;
  Bipartition bipartition;
  GadgetLibrary library;
  std::vector<std::vector<int>> combos_of_vertex;  // combo indices per vertex
};

// Instantiates one gadget per vertex, fusing joint squares along each arc.
// Square names: "<from>><to>#p", "<from>><to>#q", "<vertex>.x<i>".
AssociatedGame build_associated_game(const GGInstance& inst, const GadgetLibrary& lib);

// (X_P ∩ X(v), {F \ X_M : F ∈ F(v) not broken}) for a position of the game.
GameSpec restrict(const Position& p, VertexId v, const ReductionMap& m);

// One pair per arc; blocks every combination outside F(start).
Pairing global_joint_pairing(const AssociatedGame& g);

// Pairing-certificate hook for the solver: the fully-unclaimed joint pairs,
// offered whenever they block every surviving combination.
PairingHook make_joint_pairing_hook(const AssociatedGame& g);

// Repeatedly replaces each short combination F by F∪{y}, F∪{z} with fresh
// squares until the hypergraph is 5-uniform. Fresh squares: "u5#<n>".
GameSpec uniformize5(const GameSpec& g);

// Sidecar map file: `joint <from> <to> <p> <q>` / `interior <vertex> <local> <global>`.
void write_reduction_map(std::ostream& os, const AssociatedGame& g);

}  // namespace mbgg
