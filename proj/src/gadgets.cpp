#include "mbgg/gadgets.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace mbgg {

const PortSlot& GadgetSpec::port(char role) const {
  for (const auto& p : ports)
    if (p.edge_role == role) return p;
  throw std::invalid_argument(std::string("no port with role ") + role);
}

bool GadgetSpec::has_port(char role) const {
  for (const auto& p : ports)
    if (p.edge_role == role) return true;
  return false;
}

std::vector<std::string> GadgetSpec::variant_keys(VertexClass cls) {
  switch (cls) {
    case VertexClass::M12:
    case VertexClass::B12: return {"choose-b", "choose-c"};
    case VertexClass::M21:
    case VertexClass::B21: return {"enter-a", "enter-b"};
    default: return {"only"};
  }
}

char GadgetSpec::entry_role(VertexClass cls, const std::string& variant) {
  switch (cls) {
    case VertexClass::B01: return 0;
    case VertexClass::M21:
    case VertexClass::B21: return variant == "enter-a" ? 'a' : 'b';
    default: return 'a';
  }
}

char GadgetSpec::chosen_out_role(VertexClass cls, const std::string& variant) {
  switch (cls) {
    case VertexClass::M12:
    case VertexClass::B12: return variant == "choose-b" ? 'b' : 'c';
    case VertexClass::M21:
    case VertexClass::B21: return 'c';
    case VertexClass::N11: return 'b';
    case VertexClass::B01: return 'a';
  }
  return 0;
}

void GadgetSpec::sort_combos() {
  for (auto& c : combos) std::sort(c.begin(), c.end());
  std::sort(combos.begin(), combos.end());
  combos.erase(std::unique(combos.begin(), combos.end()), combos.end());
}

const GadgetSpec& GadgetLibrary::spec(VertexClass c) const {
  auto it = specs.find(c);
  if (it == specs.end())
    throw std::invalid_argument(std::string("gadget library missing class ") + to_string(c));
  return it->second;
}

static PortSlot make_port(char role, bool is_in) {
  return {role, is_in, std::string("p_") + role, std::string("q_") + role};
}

std::vector<PortSlot> builtin_ports(VertexClass cls) {
  switch (cls) {
    case VertexClass::M12:
    case VertexClass::B12:
      return {make_port('a', true), make_port('b', false), make_port('c', false)};
    case VertexClass::M21:
    case VertexClass::B21:
      return {make_port('a', true), make_port('b', true), make_port('c', false)};
    case VertexClass::N11: return {make_port('a', true), make_port('b', false)};
    case VertexClass::B01: return {make_port('a', false)};
  }
  return {};
}

std::vector<std::string> builtin_interiors(VertexClass cls) {
  std::vector<std::string> v;
  for (int i = 1; i <= interior_count(cls); ++i) v.push_back("x" + std::to_string(i));
  return v;
}

namespace {

Sequence seq(std::initializer_list<const char*> squares) {
  Sequence s;
  Turn t = Turn::maker;
  for (const char* sq : squares) {
    s.push_back({t, sq});
    t = other(t);
  }
  return s;
}

}  // namespace

SequenceMap builtin_sequences(VertexClass cls) {
  switch (cls) {
    case VertexClass::M12:
      return {{"choose-b", seq({"x1", "x2", "p_b", "x3", "q_b", "x5"})},
              {"choose-c", seq({"x2", "x1", "p_c", "x4", "q_c", "x5"})}};
    case VertexClass::B12:
      return {{"choose-b", seq({"x1", "x3", "p_b", "x2", "q_b", "x4"})},
              {"choose-c", seq({"x1", "x2", "p_c", "x3", "q_c", "x4"})}};
    case VertexClass::M21:
      return {{"enter-a", seq({"p_c", "x1", "q_c", "x2"})},
              {"enter-b", seq({"q_c", "x1", "p_c", "x3"})}};
    case VertexClass::B21:
      return {{"enter-a", seq({"p_c", "x1", "q_c", "x2"})},
              {"enter-b", seq({"q_c", "x1", "p_c", "x2"})}};
    case VertexClass::N11: return {{"only", seq({"p_b", "x1", "q_b", "x2"})}};
    case VertexClass::B01: return {{"only", seq({"p_a", "x1", "q_a", "x2"})}};
  }
  return {};
}

SquareId LocalInstance::at(const std::string& name) const {
  auto it = id.find(name);
  if (it == id.end()) throw std::invalid_argument("unknown local square " + name);
  return it->second;
}

LocalInstance instantiate_local(const GadgetSpec& spec) {
  LocalInstance li;
  li.table = std::make_shared<SquareTable>();
  auto intern = [&](const std::string& n) {
    if (li.id.count(n)) throw std::invalid_argument("duplicate local square name " + n);
    SquareId s = li.table->intern(n);
    li.id[n] = s;
    li.h.squares.insert(s);
    return s;
  };
  for (const auto& p : spec.ports) {
    SquareId ps = intern(p.p_name), qs = intern(p.q_name);
    li.role_joints[p.edge_role] = {ps, qs};
    (p.is_in ? li.inputs : li.outputs).insert(ps);
    (p.is_in ? li.inputs : li.outputs).insert(qs);
  }
  for (const auto& n : spec.interiors) li.interiors.insert(intern(n));
  li.h.table = li.table;
  for (const auto& c : spec.combos) {
    SquareSet cs;
    for (const auto& n : c) cs.insert(li.at(n));
    li.h.combos.push_back(cs);
  }
  li.h.normalize();
  return li;
}

Pairing joint_pairing(const LocalInstance& li) {
  Pairing c;
  for (const auto& [role, pq] : li.role_joints) c.add(pq[0], pq[1]);
  c.normalize();
  return c;
}

Pairing joint_pairing(const GadgetSpec& spec, const LocalInstance& li) {
  (void)spec;
  return joint_pairing(li);
}

std::vector<std::array<std::string, 2>> lemma6_pairs_local(const GadgetSpec& spec,
                                                           const std::string& p) {
  if (spec.cls == VertexClass::B01)
    throw std::invalid_argument("Lemma 6 construction does not cover the start gadget");
  const PortSlot* owner = nullptr;
  for (const auto& port : spec.ports)
    if (port.p_name == p || port.q_name == p) owner = &port;
  std::vector<std::array<std::string, 2>> pairs;
  for (const auto& port : spec.ports)
    if (&port != owner) pairs.push_back({port.p_name, port.q_name});
  if (!owner) {  // interior: the joint pairing itself
    if (std::find(spec.interiors.begin(), spec.interiors.end(), p) == spec.interiors.end())
      throw std::invalid_argument("square " + p + " not in gadget");
    return pairs;
  }
  if (owner->is_in) {
    std::string q = owner->p_name == p ? owner->q_name : owner->p_name;
    pairs.push_back({q, "x1"});
    if (spec.cls == VertexClass::M12) pairs.push_back({"x2", "x4"});
    return pairs;
  }
  // output square
  if (spec.cls == VertexClass::B12) pairs.push_back({"x1", "x4"});
  if (spec.cls == VertexClass::M12)
    pairs.push_back(owner->edge_role == 'b' ? std::array<std::string, 2>{"x1", "x5"}
                                            : std::array<std::string, 2>{"x2", "x5"});
  return pairs;
}

// ---------------------------------------------------------------------------
// Sequence replay used by the validator and the synthesizer filters.

namespace {

struct ClaimEvent {
  Turn who;
  SquareId sq;
  bool in_sequence;  // false for the entry pre-claims
};

std::vector<ClaimEvent> variant_trace(const GadgetSpec& spec, const LocalInstance& li,
                                      const std::string& variant) {
  std::vector<ClaimEvent> ev;
  char entry = GadgetSpec::entry_role(spec.cls, variant);
  if (entry) {
    const auto& pq = li.role_joints.at(entry);
    ev.push_back({Turn::maker, pq[0], false});
    ev.push_back({Turn::maker, pq[1], false});
  }
  for (const auto& m : spec.sequences.at(variant)) ev.push_back({m.mover, li.at(m.square), true});
  return ev;
}

struct TracePoint {
  SquareSet maker, breaker;
  // set when the NEXT event is a Breaker sequence move
  std::optional<SquareId> breaker_regular;
  int breaker_turn_index = 0;  // 1-based among Breaker sequence moves
};

// Positions before each event plus the terminal position.
std::vector<TracePoint> trace_points(const std::vector<ClaimEvent>& ev) {
  std::vector<TracePoint> pts;
  SquareSet m, b;
  int bturn = 0;
  for (size_t i = 0; i <= ev.size(); ++i) {
    TracePoint tp{m, b, std::nullopt, 0};
    if (i < ev.size() && ev[i].in_sequence && ev[i].who == Turn::breaker) {
      tp.breaker_regular = ev[i].sq;
      tp.breaker_turn_index = ++bturn;
    }
    pts.push_back(tp);
    if (i < ev.size()) (ev[i].who == Turn::maker ? m : b).insert(ev[i].sq);
  }
  return pts;
}

SquareSet residual(const SquareSet& combo, const SquareSet& maker) { return combo - maker; }

// singleton squares of unbroken combos
SquareSet singles_of(const std::vector<SquareSet>& combos, const SquareSet& maker,
                     const SquareSet& breaker) {
  SquareSet s;
  for (const auto& c : combos) {
    if (c.intersects(breaker)) continue;
    SquareSet r = residual(c, maker);
    if (r.count() == 1) s.insert(r.first());
  }
  return s;
}

bool has_double_threat_local(const std::vector<SquareSet>& combos, const SquareSet& maker,
                             const SquareSet& breaker) {
  std::vector<SquareSet> twos;
  for (const auto& c : combos) {
    if (c.intersects(breaker)) continue;
    SquareSet r = residual(c, maker);
    if (r.count() == 2) twos.push_back(r);
  }
  for (size_t i = 0; i < twos.size(); ++i)
    for (size_t j = i + 1; j < twos.size(); ++j)
      if (twos[i] != twos[j] && twos[i].intersects(twos[j])) return true;
  return false;
}

std::string names_of(const LocalInstance& li, const SquareSet& s) {
  std::vector<std::string> v;
  for (SquareId i : s.to_vector()) v.push_back(li.name(i));
  std::sort(v.begin(), v.end());
  std::string out = "{";
  for (size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + v[i];
  return out + "}";
}

}  // namespace

// ---------------------------------------------------------------------------
// validate_gadget

namespace {

void check_g1(const GadgetSpec& spec, const LocalInstance& li, GadgetReport& rep) {
  CheckResult r{"G1", true, ""};
  if (static_cast<int>(spec.interiors.size()) != interior_count(spec.cls)) {
    r.pass = false;
    r.detail = "interior count " + std::to_string(spec.interiors.size()) + ", want " +
               std::to_string(interior_count(spec.cls));
  }
  auto want_ports = builtin_ports(spec.cls);
  if (spec.ports.size() != want_ports.size()) {
    r.pass = false;
    r.detail += " port count mismatch;";
  } else {
    for (size_t i = 0; i < want_ports.size(); ++i)
      if (spec.ports[i].edge_role != want_ports[i].edge_role ||
          spec.ports[i].is_in != want_ports[i].is_in) {
        r.pass = false;
        r.detail += " port signature mismatch;";
      }
  }
  if (spec.combos.empty()) {
    r.pass = false;
    r.detail += " no combinations;";
  }
  for (const auto& c : li.h.combos) {
    if (c.empty() || c.count() > 5) {
      r.pass = false;
      r.detail += " combo size " + std::to_string(c.count()) + " outside 1..5;";
    }
  }
  if (li.h.combos.size() != spec.combos.size()) {
    r.pass = false;
    r.detail += " duplicate combos;";
  }
  auto want_keys = GadgetSpec::variant_keys(spec.cls);
  for (const auto& k : want_keys)
    if (!spec.sequences.count(k)) {
      r.pass = false;
      r.detail += " missing sequence " + k + ";";
    }
  if (spec.sequences.size() != want_keys.size()) {
    r.pass = false;
    r.detail += " unexpected sequence keys;";
  }
  for (const auto& [key, sq] : spec.sequences)
    for (size_t i = 0; i < sq.size(); ++i)
      if (sq[i].mover != (i % 2 == 0 ? Turn::maker : Turn::breaker)) {
        r.pass = false;
        r.detail += " sequence " + key + " does not alternate from Maker;";
      }
  rep.checks.push_back(r);
}

void check_g2(const GadgetSpec& spec, const LocalInstance& li, GadgetReport& rep) {
  CheckResult r{"G2", true, ""};
  Pairing jp = joint_pairing(li);
  if (spec.cls != VertexClass::B01) {
    for (const auto& c : li.h.combos)
      if (!pairing_blocks(jp, c)) {
        r.pass = false;
        r.detail += " unblocked combo " + names_of(li, c) + ";";
      }
  } else {
    // weaker clause: unblocked combos must realize the opening threats
    for (const auto& c : li.h.combos) {
      if (pairing_blocks(jp, c)) continue;
      bool realizes = false;
      for (const auto& variant : GadgetSpec::variant_keys(spec.cls)) {
        for (const auto& tp : trace_points(variant_trace(spec, li, variant))) {
          if (!tp.breaker_regular) continue;
          if (c.intersects(tp.breaker)) continue;
          SquareSet res = residual(c, tp.maker);
          if (res.count() == 1 && res.first() == *tp.breaker_regular) realizes = true;
        }
      }
      if (!realizes) {
        r.pass = false;
        r.detail += " unblocked combo " + names_of(li, c) + " does not realize the opening;";
      }
    }
  }
  rep.checks.push_back(r);
}

void check_g3(const GadgetSpec& spec, const LocalInstance& li, GadgetReport& rep) {
  CheckResult r{"G3", true, ""};
  for (const auto& variant : GadgetSpec::variant_keys(spec.cls)) {
    auto ev = variant_trace(spec, li, variant);
    SquareSet claimed, maker, breaker, maker_seq_claims;
    for (const auto& e : ev) {
      if (claimed.contains(e.sq)) {
        r.pass = false;
        r.detail += " " + variant + ": square " + li.name(e.sq) + " claimed twice;";
      }
      claimed.insert(e.sq);
      (e.who == Turn::maker ? maker : breaker).insert(e.sq);
      if (!e.in_sequence) continue;
      if (e.who == Turn::maker) {
        maker_seq_claims.insert(e.sq);
        if (li.inputs.contains(e.sq)) {
          r.pass = false;
          r.detail += " " + variant + ": Maker claims input square " + li.name(e.sq) + ";";
        }
      } else if (!li.interiors.contains(e.sq)) {
        r.pass = false;
        r.detail += " " + variant + ": Breaker claims non-interior " + li.name(e.sq) + ";";
      }
    }
    // Maker's sequence claims: both joints of the chosen out-edge, rest interiors
    char chosen = GadgetSpec::chosen_out_role(spec.cls, variant);
    const auto& pq = li.role_joints.at(chosen);
    SquareSet chosen_pair = SquareSet::of({pq[0], pq[1]});
    if (!chosen_pair.subset_of(maker_seq_claims)) {
      r.pass = false;
      r.detail += " " + variant + ": Maker does not claim both joints of the chosen edge;";
    }
    if (!(maker_seq_claims - chosen_pair).subset_of(li.interiors)) {
      r.pass = false;
      r.detail += " " + variant + ": Maker claims joints outside the chosen edge;";
    }

    // terminal residuals
    std::vector<SquareSet> survivors;
    for (const auto& c : li.h.combos)
      if (!c.intersects(breaker)) survivors.push_back(residual(c, maker));
    if (spec.cls == VertexClass::M21) {
      char entry = GadgetSpec::entry_role(spec.cls, variant);
      char off = entry == 'a' ? 'b' : 'a';
      const auto& opq = li.role_joints.at(off);
      bool good = survivors.size() == 1 && survivors[0].count() == 3 &&
                  survivors[0].contains(opq[0]) && survivors[0].contains(opq[1]) &&
                  (survivors[0] - SquareSet::of({opq[0], opq[1]})).subset_of(li.interiors);
      if (!good) {
        r.pass = false;
        r.detail += " " + variant + ": residual is not the single off-edge 3-combo;";
      }
      if (good && survivors[0] != li.h.squares - claimed) {
        r.pass = false;
        r.detail += " " + variant + ": unclaimed squares differ from the residual combo;";
      }
    } else if (!survivors.empty()) {
      r.pass = false;
      r.detail += " " + variant + ": " + std::to_string(survivors.size()) +
                  " unbroken combos after the sequence;";
    }
  }
  rep.checks.push_back(r);
}

void check_g4(const GadgetSpec& spec, const LocalInstance& li, GadgetReport& rep) {
  CheckResult r{"G4", true, ""};
  for (const auto& variant : GadgetSpec::variant_keys(spec.cls)) {
    auto pts = trace_points(variant_trace(spec, li, variant));
    for (const auto& tp : pts) {
      if (!tp.breaker_regular) continue;
      bool choice_point = spec.cls == VertexClass::B12 && tp.breaker_turn_index == 1;
      SquareSet singles = singles_of(li.h.combos, tp.maker, tp.breaker);
      if (choice_point) {
        if (!singles.empty()) {
          r.pass = false;
          r.detail += " " + variant + ": mate-in-one at the choice point;";
        }
        // the two balanced interiors are exactly the surviving options
        SquareSet x2 = SquareSet::of({li.at("x2")}), x3 = SquareSet::of({li.at("x3")});
        SquareSet want[] = {SquareSet::of({li.role_joints.at('b')[0], li.at("x2")}),
                            x2 | x3,
                            SquareSet::of({li.at("x3"), li.role_joints.at('c')[0]})};
        for (const auto& target : want) {
          bool found = false;
          for (const auto& c : li.h.combos)
            if (!c.intersects(tp.breaker) && residual(c, tp.maker) == target) found = true;
          if (!found) {
            r.pass = false;
            r.detail += " " + variant + ": choice point misses residual " + names_of(li, target) + ";";
          }
        }
        SquareSet saviors;
        for (SquareId z : (li.h.squares - tp.maker - tp.breaker).to_vector()) {
          SquareSet b2 = tp.breaker;
          b2.insert(z);
          if (singles_of(li.h.combos, tp.maker, b2).empty() &&
              !has_double_threat_local(li.h.combos, tp.maker, b2))
            saviors.insert(z);
        }
        if (saviors != (x2 | x3)) {
          r.pass = false;
          r.detail += " " + variant + ": saviors " + names_of(li, saviors) + " != {x2 x3};";
        }
      } else {
        SquareSet want = SquareSet::of({*tp.breaker_regular});
        if (singles != want) {
          r.pass = false;
          r.detail += " " + variant + ": turn " + std::to_string(tp.breaker_turn_index) +
                      " threats " + names_of(li, singles) + " != " + names_of(li, want) + ";";
        }
        SquareSet b2 = tp.breaker;
        b2.insert(*tp.breaker_regular);
        if (!singles_of(li.h.combos, tp.maker, b2).empty()) {
          r.pass = false;
          r.detail += " " + variant + ": regular move fails to defuse the mate;";
        }
      }
    }
  }
  rep.checks.push_back(r);
}

void check_g5(const GadgetSpec& spec, const LocalInstance& li, GadgetReport& rep) {
  CheckResult r{"G5", true, ""};
  if (spec.cls == VertexClass::B01) {
    r.detail = "start gadget: construction not applicable";
    rep.checks.push_back(r);
    return;
  }
  for (SquareId p : li.h.squares.to_vector()) {
    std::string pname = li.name(p);
    Pairing c;
    try {
      for (const auto& pr : lemma6_pairs_local(spec, pname)) c.add(li.at(pr[0]), li.at(pr[1]));
      c.normalize();
    } catch (const std::invalid_argument& e) {
      r.pass = false;
      r.detail += " " + pname + ": " + e.what() + ";";
      continue;
    }
    if (c.covered().contains(p)) {
      r.pass = false;
      r.detail += " " + pname + ": pairing covers the claimed square;";
    }
    for (const auto& combo : li.h.combos) {
      SquareSet res = combo - SquareSet::of({p});
      if (!pairing_blocks(c, res)) {
        r.pass = false;
        r.detail += " " + pname + ": combo " + names_of(li, combo) + " unblocked;";
      }
    }
    // trait 2: joint pairs untouched by p stay in the pairing
    for (const auto& [role, pq] : li.role_joints) {
      if (pq[0] == p || pq[1] == p) continue;
      bool present = false;
      for (const auto& pr : c.pairs)
        if ((pr[0] == pq[0] && pr[1] == pq[1]) || (pr[0] == pq[1] && pr[1] == pq[0]))
          present = true;
      if (!present) {
        r.pass = false;
        r.detail += " " + pname + ": trait 2 misses pair of edge " + role + ";";
      }
    }
    // trait 3: an out-edge with a claimed joint stays uncovered
    for (const auto& port : spec.ports) {
      if (port.is_in) continue;
      const auto& pq = li.role_joints.at(port.edge_role);
      if (pq[0] != p && pq[1] != p) continue;
      SquareId co = pq[0] == p ? pq[1] : pq[0];
      if (c.covers(co)) {
        r.pass = false;
        r.detail += " " + pname + ": trait 3 covers " + li.name(co) + ";";
      }
    }
  }
  rep.checks.push_back(r);
}

void check_g6(const GadgetSpec& spec, const LocalInstance& li, GadgetReport& rep) {
  CheckResult r{"G6", true, ""};
  if (spec.cls != VertexClass::M21 && spec.cls != VertexClass::B21) {
    r.detail = "only defined for the two-input classes";
    rep.checks.push_back(r);
    return;
  }
  for (char entry : {'a', 'b'}) {
    char first = entry == 'a' ? 'b' : 'a';  // the edge the FIRST activation used
    std::string first_variant = std::string("enter-") + first;
    SquareSet breaker_claims;
    for (const auto& e : variant_trace(spec, li, first_variant))
      if (e.in_sequence && e.who == Turn::breaker) breaker_claims.insert(e.sq);
    const auto& epq = li.role_joints.at(entry);
    const auto& cpq = li.role_joints.at('c');
    SquareSet joints = SquareSet::of({epq[0], epq[1], cpq[0], cpq[1]});
    bool found = false;
    for (const auto& c : li.h.combos) {
      if (c.count() != 5 || !joints.subset_of(c)) continue;
      SquareSet x = c - joints;
      if (!x.subset_of(li.interiors)) continue;
      bool breaker_has_x = breaker_claims.contains(x.first());
      if (spec.cls == VertexClass::M21 ? !breaker_has_x : breaker_has_x) found = true;
    }
    if (!found) {
      r.pass = false;
      r.detail += std::string(" no second-activation combo for entry ") + entry + ";";
    }
  }
  rep.checks.push_back(r);
}

}  // namespace

bool GadgetReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const CheckResult* GadgetReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

GadgetReport validate_gadget(const GadgetSpec& spec) {
  GadgetReport rep;
  rep.cls = spec.cls;
  LocalInstance li;
  try {
    li = instantiate_local(spec);
  } catch (const std::exception& e) {
    rep.checks.push_back({"G1", false, e.what()});
    return rep;
  }
  check_g1(spec, li, rep);
  if (!rep.ok()) return rep;  // later checks assume a well-formed skeleton
  check_g2(spec, li, rep);
  check_g3(spec, li, rep);
  check_g4(spec, li, rep);
  check_g5(spec, li, rep);
  check_g6(spec, li, rep);
  return rep;
}

bool LibraryReport::ok() const {
  if (by_class.size() != 6) return false;
  for (const auto& [cls, rep] : by_class)
    if (!rep.ok()) return false;
  return true;
}

LibraryReport validate_library(const GadgetLibrary& lib) {
  LibraryReport rep;
  for (const auto& [cls, spec] : lib.specs) rep.by_class[cls] = validate_gadget(spec);
  return rep;
}

}  // namespace mbgg
