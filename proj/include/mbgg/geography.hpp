#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mbgg {

using VertexId = int;

struct Digraph {
  std::vector<std::string> names;                    // id -> token
  std::unordered_map<std::string, VertexId> index;   // token -> id
  std::vector<std::pair<VertexId, VertexId>> arcs;   // sorted, unique
  std::vector<std::vector<VertexId>> out, in;        // adjacency

  VertexId add_vertex(const std::string& name);
  std::optional<VertexId> lookup(const std::string& name) const;
  // Rejects self-loops and duplicates.
  void add_arc(VertexId from, VertexId to);
  void finalize();  // sorts arcs, rebuilds adjacency

  int vertex_count() const { return static_cast<int>(names.size()); }
  int arc_count() const { return static_cast<int>(arcs.size()); }
  int out_degree(VertexId v) const { return static_cast<int>(out[v].size()); }
  int in_degree(VertexId v) const { return static_cast<int>(in[v].size()); }
  int degree(VertexId v) const { return out_degree(v) + in_degree(v); }
  int arc_id(VertexId from, VertexId to) const;  // -1 when absent
  bool weakly_connected() const;
};

struct GGInstance {
  Digraph graph;
  VertexId start = 0;
};

enum class Ruleset : uint8_t { original, revised };

// marked[0] = start; consecutive marks follow arcs. Under revised rules the
// final mark may repeat an earlier one, which ends the game.
struct GGState {
  std::vector<VertexId> marked;
  Ruleset rules = Ruleset::original;
};

enum class GGPlayer : uint8_t { alice, bob };
inline const char* to_string(GGPlayer p) { return p == GGPlayer::alice ? "alice" : "bob"; }

// side per vertex: true = V_A, false = V_B (start is always in V_B).
struct Bipartition {
  std::vector<bool> in_side_a;
  bool is_a(VertexId v) const { return in_side_a[v]; }
};

enum class VertexClass : uint8_t { M12, M21, B12, B21, N11, B01 };
const char* to_string(VertexClass c);
std::optional<VertexClass> vertex_class_from_string(const std::string& s);

// Interior square count of each gadget class (Table-driven).
int interior_count(VertexClass c);
// in-degree / out-degree signature of the class.
int class_in_degree(VertexClass c);
int class_out_degree(VertexClass c);

struct ConvertibilityReport {
  bool ok = true;
  std::vector<std::string> violations;
  void violate(std::string v) {
    ok = false;
    violations.push_back(std::move(v));
  }
};

// --- operations ---

std::vector<VertexId> legal_moves_gg(const GGInstance& inst, const GGState& st);

// Loser when the game in st is over (stuck under original rules, or the last
// mark revisited under revised rules). Throws if the game is not over.
GGPlayer gg_loser_on_move(const GGInstance& inst, const GGState& st);

// Unique 2-coloring with start ∈ V_B. Throws NotBipartite on odd cycles.
struct NotBipartite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
Bipartition bipartition_from_start(const GGInstance& inst);

ConvertibilityReport validate_convertible(const GGInstance& inst, bool require_planar = false);

// Corollary-2 start normalization: splits a degree-2 start through two fresh
// vertices. Identity when the start already has out-degree 1.
GGInstance normalize_start(const GGInstance& inst);

VertexClass classify_vertex(const GGInstance& inst, const Bipartition& bip, VertexId v);

// Seeded random instance passing validate_convertible (planarity excluded).
GGInstance gen_convertible(int vertex_budget, uint64_t seed);

}  // namespace mbgg
