#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mbgg/core.hpp"
#include "mbgg/geography.hpp"

namespace mbgg {

// One shared joint pair of the gadget. Roles follow the class signature:
// M12/B12: in a, out b, out c; M21/B21: in a, in b, out c; N11: in a, out b;
// B01: out a. Joint names are "p_<role>" / "q_<role>".
struct PortSlot {
  char edge_role;
  bool is_in;
  std::string p_name, q_name;
};

struct SeqMove {
  Turn mover;
  std::string square;  // local name
  bool operator==(const SeqMove& o) const { return mover == o.mover && square == o.square; }
};

using Sequence = std::vector<SeqMove>;
using SequenceMap = std::map<std::string, Sequence>;  // variant key -> moves

struct GadgetSpec {
  VertexClass cls = VertexClass::N11;
  std::vector<std::string> interiors;  // x1..xk
  std::vector<PortSlot> ports;
  std::vector<std::vector<std::string>> combos;  // sorted name lists, sorted
  SequenceMap sequences;

  const PortSlot& port(char role) const;
  bool has_port(char role) const;
  // Variant keys: choose-b/choose-c, enter-a/enter-b, or only.
  static std::vector<std::string> variant_keys(VertexClass cls);
  // In-edge whose joints Maker holds when the variant's sequence starts
  // (0 for B01, which starts the game).
  static char entry_role(VertexClass cls, const std::string& variant);
  // Out-edge whose joints Maker claims during the variant's sequence.
  static char chosen_out_role(VertexClass cls, const std::string& variant);

  void sort_combos();
};

struct GadgetLibrary {
  std::map<VertexClass, GadgetSpec> specs;
  const GadgetSpec& spec(VertexClass c) const;
};

// Skeleton pieces fixed by the paper's table: ports, interior names and the
// regular play orders (movers alternate starting with Maker).
std::vector<PortSlot> builtin_ports(VertexClass cls);
std::vector<std::string> builtin_interiors(VertexClass cls);
SequenceMap builtin_sequences(VertexClass cls);

// {{p_e,q_e} | e ∈ ports} over a local instantiation of the spec.
struct LocalInstance {
  SquareTablePtr table;
  Hypergraph h;
  std::map<std::string, SquareId> id;
  SquareSet interiors, inputs, outputs;
  std::map<char, std::array<SquareId, 2>> role_joints;

  SquareId at(const std::string& name) const;
  std::string name(SquareId s) const { return table->name(s); }
};
LocalInstance instantiate_local(const GadgetSpec& spec);
Pairing joint_pairing(const LocalInstance& li);
Pairing joint_pairing(const GadgetSpec& spec, const LocalInstance& li);

// The Lemma-6 pairing construction on local names: joint pairing for an
// interior square, C* ∪ {q,x1} (M12 also {x2,x4}) for an input square,
// C* plus the class's fixed interior pair for an output square. Not defined
// for B01 (the start vertex is outside the lemma's scope).
std::vector<std::array<std::string, 2>> lemma6_pairs_local(const GadgetSpec& spec,
                                                           const std::string& p);

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct GadgetReport {
  VertexClass cls = VertexClass::N11;
  std::vector<CheckResult> checks;
  bool ok() const;
  const CheckResult* find(const std::string& name) const;
};

// Checks G1..G6 from the construction's textual constraints:
//   G1 rank/locality, G2 joint-pairing completeness (weaker clause for B01),
//   G3 sequence simulation and terminal residuals, G4 mate-in-one threat
//   chain and the B12 choice point, G5 Lemma-6 puzzle piece pairings,
//   G6 second-activation combinations for M21/B21.
GadgetReport validate_gadget(const GadgetSpec& spec);

struct LibraryReport {
  std::map<VertexClass, GadgetReport> by_class;
  bool ok() const;
};
LibraryReport validate_library(const GadgetLibrary& lib);

struct SynthesisFailure : std::runtime_error {
  explicit SynthesisFailure(const std::string& what, LibraryReport best = {})
      : std::runtime_error(what), best_report(std::move(best)) {}
  LibraryReport best_report;
};

// Seeded search over candidate combo sets. Candidates are derived from the
// threat chain each regular-play sequence must realize, pruned by the
// Lemma-6 blocking requirements; acceptance is validate_gadget plus an
// end-to-end equivalence gate on fixed small instances. Budget counts
// validator invocations.
GadgetLibrary synthesize_gadgets(int budget = 4000, uint64_t seed = 1);

// The library shipped with the tool (the default-seed synthesis output,
// frozen as text).
const GadgetLibrary& builtin_library();

// Sectioned text format (gadget/interior/port/combo/seq lines).
GadgetLibrary parse_gadget_library(std::istream& is, const std::string& source = "<lib>");
GadgetLibrary parse_gadget_library_file(const std::string& path);
void write_gadget_library(std::ostream& os, const GadgetLibrary& lib);
std::string to_text(const GadgetLibrary& lib);

}  // namespace mbgg
