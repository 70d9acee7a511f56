#include "mbgg/strategy.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mbgg {

const char* to_string(FinishedReason r) {
  switch (r) {
    case FinishedReason::none: return "none";
    case FinishedReason::maker_won_m21: return "maker-won-M21";
    case FinishedReason::breaker_pairing_b21: return "breaker-pairing-B21";
  }
  return "?";
}

namespace {

VertexClass cls_of(const AssociatedGame& g, VertexId v) {
  return g.map.classes.at(static_cast<size_t>(v));
}

const GadgetSpec& spec_of(const AssociatedGame& g, VertexId v) {
  return g.library.spec(cls_of(g, v));
}

size_t seq_length(const AssociatedGame& g, const Activation& act) {
  if (act.variant == "second") return 1;
  return spec_of(g, act.vertex).sequences.at(act.variant).size();
}

int arc_head(const AssociatedGame& g, int arc) {
  return g.instance.graph.arcs.at(static_cast<size_t>(arc)).second;
}

bool was_active(const RegularPlayState& rps, VertexId v, size_t before = SIZE_MAX) {
  size_t n = std::min(before, rps.history.size());
  for (size_t i = 0; i < n; ++i)
    if (rps.history[i].vertex == v) return true;
  return false;
}

// Successor data for a finished sequence: the chosen out-arc and its head.
std::pair<int, VertexId> successor(const AssociatedGame& g, const Activation& act) {
  char role = GadgetSpec::chosen_out_role(cls_of(g, act.vertex), act.variant);
  int arc = g.map.role_arc.at(static_cast<size_t>(act.vertex)).at(role);
  return {arc, arc_head(g, arc)};
}

// Unique winning interior at an M21 second activation: the single
// mate-in-one square of the restriction.
SquareId m21_winning_square(const AssociatedGame& g, VertexId w, const Position& pos) {
  GameSpec res = restrict(pos, w, g.map);
  SquareSet singles = detect_mate_in_one(res);
  if (singles.count() != 1)
    throw std::logic_error("second M21 activation without a unique winning square");
  return singles.first();
}

SquareSet joint_pair_set(const AssociatedGame& g, int arc) {
  const auto& pq = g.map.arc_joints.at(static_cast<size_t>(arc));
  return SquareSet::of({pq[0], pq[1]});
}

}  // namespace

bool RegularPlayState::at_activation_boundary(const AssociatedGame& g) const {
  return started() && finished == FinishedReason::none && cursor >= seq_length(g, history.back());
}

VertexId RegularPlayState::pending_vertex(const AssociatedGame& g) const {
  if (!at_activation_boundary(g)) throw std::logic_error("no pending activation");
  return successor(g, history.back()).second;
}

RegularPlayState regular_start() { return {}; }

RegularStep regular_step(const AssociatedGame& g, const RegularPlayState& rps, const Position& pos,
                         std::optional<std::string> choice) {
  if (rps.finished != FinishedReason::none)
    throw std::invalid_argument("protocol-error: regular play already finished");
  RegularPlayState st = rps;

  bool consumed_choice = false;
  if (!st.started()) {
    if (cls_of(g, g.instance.start) != VertexClass::B01)
      throw std::invalid_argument("start vertex is not in class B01");
    st.history.push_back({g.instance.start, -1, "only"});
    st.cursor = 0;
  } else if (st.at_activation_boundary(g)) {
    auto [arc, w] = successor(g, st.history.back());
    if (was_active(st, w)) {
      // second activation: the class of w decides the game
      if (cls_of(g, w) == VertexClass::M21) {
        SquareId x = m21_winning_square(g, w, pos);
        st.history.push_back({w, arc, "second"});
        st.cursor = 1;
        st.finished = FinishedReason::maker_won_m21;
        st.log.push_back({Turn::maker, x, w});
        if (choice) throw std::invalid_argument("protocol-error: unexpected choice");
        return {x, st};
      }
      if (cls_of(g, w) == VertexClass::B21) {
        st.history.push_back({w, arc, "second"});
        st.cursor = 1;
        st.finished = FinishedReason::breaker_pairing_b21;
        if (choice) throw std::invalid_argument("protocol-error: unexpected choice");
        return {std::nullopt, st};
      }
      throw std::logic_error("revisited vertex is neither M21 nor B21");
    }
    VertexClass wc = cls_of(g, w);
    std::string variant;
    if (wc == VertexClass::M12 || wc == VertexClass::B12) {
      if (!choice || (*choice != "b" && *choice != "c"))
        throw std::invalid_argument("protocol-error: activation needs a choice of b or c");
      variant = "choose-" + *choice;
      consumed_choice = true;
    } else if (wc == VertexClass::M21 || wc == VertexClass::B21) {
      variant = std::string("enter-") + g.map.role_of_arc(w, arc);
    } else if (wc == VertexClass::N11) {
      variant = "only";
    } else {
      throw std::logic_error("start vertex cannot be re-entered");
    }
    st.history.push_back({w, arc, variant});
    st.cursor = 0;
  }
  if (choice && !consumed_choice)
    throw std::invalid_argument("protocol-error: choice supplied outside an activation point");

  const Activation& act = st.history.back();
  const Sequence& sq = spec_of(g, act.vertex).sequences.at(act.variant);
  const SeqMove& mv = sq.at(st.cursor);
  if (mv.mover != pos.to_move) throw std::logic_error("regular play out of step with the position");
  SquareId s = g.map.global(act.vertex, mv.square);
  st.cursor++;
  st.log.push_back({mv.mover, s, act.vertex});
  return {s, st};
}

SquareSet regular_move_squares(const AssociatedGame& g, const RegularPlayState& rps,
                               const Position& pos) {
  if (rps.finished != FinishedReason::none) return {};
  if (!rps.started()) {
    const GadgetSpec& spec = spec_of(g, g.instance.start);
    return SquareSet::of({g.map.global(g.instance.start, spec.sequences.at("only")[0].square)});
  }
  if (rps.at_activation_boundary(g)) {
    auto [arc, w] = successor(g, rps.history.back());
    if (was_active(rps, w)) {
      if (cls_of(g, w) == VertexClass::M21)
        return SquareSet::of({m21_winning_square(g, w, pos)});
      return {};  // B21 halt pending: no regular move
    }
    VertexClass wc = cls_of(g, w);
    const GadgetSpec& spec = spec_of(g, w);
    if (wc == VertexClass::M12) {
      SquareSet r;
      for (const auto& key : GadgetSpec::variant_keys(wc))
        r.insert(g.map.global(w, spec.sequences.at(key)[0].square));
      return r;
    }
    std::string variant = wc == VertexClass::B12
                              ? "choose-b"  // both variants open with the same Maker move
                              : (wc == VertexClass::N11
                                     ? "only"
                                     : std::string("enter-") + g.map.role_of_arc(w, arc));
    return SquareSet::of({g.map.global(w, spec.sequences.at(variant)[0].square)});
  }
  const Activation& act = rps.history.back();
  const Sequence& sq = spec_of(g, act.vertex).sequences.at(act.variant);
  return SquareSet::of({g.map.global(act.vertex, sq.at(rps.cursor).square)});
}

Pairing lemma3_pairing(const AssociatedGame& g, const Position& pos) {
  SquareSet claimed = pos.claimed();
  Pairing c;
  for (const auto& pq : g.map.arc_joints)
    if (!claimed.contains(pq[0]) && !claimed.contains(pq[1])) c.add(pq[0], pq[1]);
  c.normalize();
  return c;
}

InvariantReport check_invariants(const AssociatedGame& g, const RegularPlayState& rps,
                                 const Position& pos) {
  InvariantReport rep;
  if (rps.finished != FinishedReason::none) return rep;  // scoped to active play

  const Digraph& graph = g.instance.graph;
  // invariant 1: move typing, from the log
  for (const auto& mv : rps.log) {
    VertexId v = mv.active_vertex;
    SquareSet xv = g.map.gadget_squares(v);
    SquareSet inputs, outputs;
    for (const auto& [role, arc] : g.map.role_arc.at(static_cast<size_t>(v))) {
      bool is_in = graph.arcs[static_cast<size_t>(arc)].second == v;
      SquareSet pq = joint_pair_set(g, arc);
      (is_in ? inputs : outputs) = (is_in ? inputs : outputs) | pq;
    }
    SquareSet interiors = xv - inputs - outputs;
    if (mv.mover == Turn::maker) {
      if (!interiors.contains(mv.square) && !outputs.contains(mv.square))
        rep.violate("invariant 1: Maker claimed " + pos.h.table->name(mv.square) +
                    " which is not an interior or output square of the active gadget");
    } else if (!interiors.contains(mv.square)) {
      rep.violate("invariant 1: Breaker claimed " + pos.h.table->name(mv.square) +
                  " which is not an interior square of the active gadget");
    }
  }
  if (!rps.started()) return rep;

  VertexId active = rps.history.back().vertex;
  SquareSet claimed = pos.claimed();

  // invariant 2: untouched gadgets
  for (VertexId w = 0; w < graph.vertex_count(); ++w) {
    if (was_active(rps, w)) continue;
    for (SquareId s : (g.map.gadget_squares(w) & claimed).to_vector()) {
      bool allowed = false;
      if (pos.maker_set.contains(s)) {
        int arc = graph.arc_id(active, w);
        if (arc >= 0 && joint_pair_set(g, arc).contains(s)) allowed = true;
      }
      if (!allowed)
        rep.violate("invariant 2: square " + pos.h.table->name(s) + " of never-active vertex " +
                    graph.names[w] + " is claimed");
    }
  }

  // invariants 3 and 4: gadgets behind the token
  for (size_t i = 0; i + 1 < rps.history.size(); ++i) {
    VertexId u = rps.history[i].vertex;
    if (u == active) continue;
    GameSpec res = restrict(pos, u, g.map);
    if (cls_of(g, u) != VertexClass::M21) {
      if (!res.h.combos.empty())
        rep.violate("invariant 3: vertex " + graph.names[u] + " retains " +
                    std::to_string(res.h.combos.size()) + " unbroken combinations");
      continue;
    }
    int entry = rps.history[i].entry_arc;
    int off = -1;
    for (const auto& [role, arc] : g.map.role_arc.at(static_cast<size_t>(u)))
      if (graph.arcs[static_cast<size_t>(arc)].second == u && arc != entry) off = arc;
    SquareSet off_pair = joint_pair_set(g, off);
    SquareSet joints;
    for (const auto& [role, arc] : g.map.role_arc.at(static_cast<size_t>(u)))
      joints = joints | joint_pair_set(g, arc);
    SquareSet interiors_u = g.map.gadget_squares(u) - joints;
    // the {p_e', q_e', x} remainder; the active vertex may already hold a
    // shared joint of e' mid-sequence, which only shrinks the residual
    bool good = res.h.combos.size() == 1 && res.h.combos[0] == res.h.squares;
    if (good) {
      SquareSet r = res.h.combos[0];
      good = (r - off_pair).count() == 1 && (r - off_pair).subset_of(interiors_u) &&
             (off_pair - r).subset_of(pos.maker_set);
    }
    if (!good)
      rep.violate("invariant 4: vertex " + graph.names[u] +
                  " does not reduce to the off-edge remainder combo");
  }
  return rep;
}

namespace {

Pairing map_local_pairs(const AssociatedGame& g, VertexId v,
                        const std::vector<std::array<std::string, 2>>& local) {
  Pairing c;
  for (const auto& pr : local) c.add(g.map.global(v, pr[0]), g.map.global(v, pr[1]));
  c.normalize();
  return c;
}

// Lemma-6 piece with pairs touching claimed squares dropped.
Pairing lemma6_piece(const AssociatedGame& g, VertexId v, SquareId hypothetical_claim,
                     const SquareSet& claimed) {
  const GadgetSpec& spec = spec_of(g, v);
  std::string local;
  for (const auto& [nm, id] : g.map.local_to_global.at(static_cast<size_t>(v)))
    if (id == hypothetical_claim) local = nm;
  if (local.empty()) throw std::invalid_argument("square not in the vertex gadget");
  Pairing full = map_local_pairs(g, v, lemma6_pairs_local(spec, local));
  Pairing out;
  for (const auto& pr : full.pairs)
    if (!claimed.contains(pr[0]) && !claimed.contains(pr[1])) out.pairs.push_back(pr);
  out.normalize();
  return out;
}

// Fully-unclaimed joint pairs of the arcs incident to w.
Pairing unclaimed_joint_pairs(const AssociatedGame& g, VertexId w, const SquareSet& claimed) {
  Pairing c;
  for (const auto& [role, arc] : g.map.role_arc.at(static_cast<size_t>(w))) {
    const auto& pq = g.map.arc_joints.at(static_cast<size_t>(arc));
    if (!claimed.contains(pq[0]) && !claimed.contains(pq[1])) c.add(pq[0], pq[1]);
  }
  c.normalize();
  return c;
}

}  // namespace

Pairing puzzle_piece_pairing(const AssociatedGame& g, VertexId v, SquareId p, const Position& pos) {
  if (v == g.instance.start)
    throw std::invalid_argument("puzzle piece pairings are defined for non-start vertices");
  SquareSet xv = g.map.gadget_squares(v);
  if ((pos.maker_set & xv) != SquareSet::of({p}) || !(pos.breaker_set & xv).empty())
    throw std::invalid_argument("position does not match the single-claim precondition");
  Pairing c = lemma6_piece(g, v, p, pos.claimed() - SquareSet::of({p}));
  GameSpec res = restrict(pos, v, g.map);
  if (!is_complete_pairing(c, res))
    throw std::logic_error("Lemma 6 construction is not complete for this library");
  return c;
}

Pairing union_pairing(const AssociatedGame& g, const std::map<VertexId, Pairing>& pieces) {
  (void)g;
  Pairing out;
  for (const auto& [v, piece] : pieces)
    out.pairs.insert(out.pairs.end(), piece.pairs.begin(), piece.pairs.end());
  std::sort(out.pairs.begin(), out.pairs.end());
  out.pairs.erase(std::unique(out.pairs.begin(), out.pairs.end()), out.pairs.end());
  try {
    out.check_disjoint();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("invalid-pieces: ") + e.what());
  }
  return out;
}

namespace {

// Generic per-vertex piece for the active vertex: required joint pairs plus
// a small backtracking search for blocking pairs obeying trait 3.
std::optional<Pairing> active_vertex_piece(const AssociatedGame& g, VertexId v,
                                           const Position& after) {
  const Digraph& graph = g.instance.graph;
  SquareSet claimed = after.claimed();
  Pairing c = unclaimed_joint_pairs(g, v, claimed);
  SquareSet forbidden;  // unclaimed joints of half-claimed out-arcs (trait 3)
  for (const auto& [role, arc] : g.map.role_arc.at(static_cast<size_t>(v))) {
    if (graph.arcs[static_cast<size_t>(arc)].first != v) continue;
    const auto& pq = g.map.arc_joints.at(static_cast<size_t>(arc));
    bool pc = claimed.contains(pq[0]), qc = claimed.contains(pq[1]);
    if (pc != qc) forbidden.insert(pc ? pq[1] : pq[0]);
  }
  GameSpec res = restrict(after, v, g.map);
  std::vector<SquareSet> open;
  for (const auto& f : res.h.combos)
    if (!pairing_blocks(c, f)) open.push_back(f);

  std::function<bool(size_t, Pairing&)> solve = [&](size_t i, Pairing& acc) -> bool {
    while (i < open.size() && pairing_blocks(acc, open[i])) ++i;
    if (i == open.size()) return true;
    auto sqs = open[i].to_vector();
    SquareSet cov = acc.covered();
    for (size_t a = 0; a < sqs.size(); ++a)
      for (size_t b = a + 1; b < sqs.size(); ++b) {
        if (cov.contains(sqs[a]) || cov.contains(sqs[b])) continue;
        if (forbidden.contains(sqs[a]) || forbidden.contains(sqs[b])) continue;
        acc.pairs.push_back({std::min(sqs[a], sqs[b]), std::max(sqs[a], sqs[b])});
        if (solve(i + 1, acc)) return true;
        acc.pairs.pop_back();
      }
    return false;
  };
  if (!solve(0, c)) return std::nullopt;
  c.normalize();
  return c;
}

// Piece for a vertex the token left behind (categories 1 and 2).
Pairing previously_active_piece(const AssociatedGame& g, VertexId w, const Position& before,
                                SquareId p, SquareId q, const Position& after) {
  GameSpec res = restrict(before, w, g.map);
  if (res.h.combos.empty()) return unclaimed_joint_pairs(g, w, after.claimed());
  if (res.h.combos.size() != 1 || cls_of(g, w) != VertexClass::M21)
    throw std::logic_error("unexpected residual behind the token");
  SquareSet r = res.h.combos[0];
  if (r.contains(q)) return unclaimed_joint_pairs(g, w, after.claimed());
  if (r.contains(p)) {
    SquareSet rest = r - SquareSet::of({p});
    auto v2 = rest.to_vector();
    Pairing c;
    c.add(v2[0], v2[1]);
    return c;
  }
  // survivor untouched: block it with its own joint pair
  Pairing c;
  SquareSet joints;
  for (const auto& [role, arc] : g.map.role_arc.at(static_cast<size_t>(w))) {
    SquareSet pq = joint_pair_set(g, arc);
    if (pq.subset_of(r)) {
      auto v2 = pq.to_vector();
      c.add(v2[0], v2[1]);
      return c;
    }
  }
  throw std::logic_error("M21 residual without its joint pair");
}

// Piece for a never-active vertex (categories 3 and 4).
Pairing never_active_piece(const AssociatedGame& g, VertexId w, SquareId p, const Position& after) {
  SquareSet xw = g.map.gadget_squares(w);
  SquareSet claimed = after.claimed();
  if (xw.contains(p)) return lemma6_piece(g, w, p, claimed - SquareSet::of({p}));
  SquareSet maker_in_w = after.maker_set & xw;
  if (!maker_in_w.empty()) {
    SquareId x0 = maker_in_w.first();
    // which joint pair does x0 belong to?
    for (const auto& [role, arc] : g.map.role_arc.at(static_cast<size_t>(w))) {
      SquareSet pq = joint_pair_set(g, arc);
      if (!pq.contains(x0)) continue;
      SquareId co = (pq - SquareSet::of({x0})).first();
      if (!claimed.contains(co))  // Breaker's reply went elsewhere
        return lemma6_piece(g, w, x0, claimed);
      break;
    }
  }
  return unclaimed_joint_pairs(g, w, claimed);
}

struct ReplyContext {
  VertexId vertex;         // vertex owning the Maker turn (pending one at boundaries)
  int maker_moves_since;   // claims since its activation
  std::string variant;     // empty before the variant is fixed
  bool second_activation;
};

ReplyContext reply_context(const AssociatedGame& g, const RegularPlayState& rps,
                           const Position& pos) {
  if (!rps.started()) {
    return {g.instance.start, 0, "only", false};
  }
  if (rps.at_activation_boundary(g)) {
    auto [arc, w] = successor(g, rps.history.back());
    bool again = was_active(rps, w);
    std::string variant;
    VertexClass wc = cls_of(g, w);
    if (!again) {
      if (wc == VertexClass::M21 || wc == VertexClass::B21)
        variant = std::string("enter-") + g.map.role_of_arc(w, arc);
      else if (wc == VertexClass::N11)
        variant = "only";
      // M12/B12: the choice is not fixed yet
    }
    (void)pos;
    return {w, 0, variant, again};
  }
  const Activation& act = rps.history.back();
  return {act.vertex, static_cast<int>((rps.cursor + 1) / 2), act.variant, false};
}

}  // namespace

DeviationReply breaker_reply_to_deviation(const AssociatedGame& g, const RegularPlayState& rps,
                                          const Position& pos, SquareId p) {
  if (rps.finished != FinishedReason::none)
    throw std::invalid_argument("protocol-error: regular play already finished");
  if (pos.to_move != Turn::maker) throw std::invalid_argument("not a Maker turn");
  SquareSet regular = regular_move_squares(g, rps, pos);
  if (regular.empty())
    throw std::invalid_argument("protocol-error: no active vertex to deviate from");
  if (regular.contains(p)) throw std::invalid_argument("not-a-deviation");
  if (pos.claimed().contains(p)) throw std::invalid_argument("square already claimed");

  ReplyContext ctx = reply_context(g, rps, pos);
  VertexId v = ctx.vertex;
  VertexClass cls = cls_of(g, v);
  const Digraph& graph = g.instance.graph;

  bool starred = cls == VertexClass::M12 && ctx.maker_moves_since == 0 && !ctx.second_activation;
  SquareId q = -1;
  bool subversion = false;
  int chosen_arc = -1, offside_arc = -1;

  if (starred) {
    // two regular squares: prefer the one sharing a surviving combination
    GameSpec res = restrict(pos, v, g.map);
    auto rv = regular.to_vector();
    std::sort(rv.begin(), rv.end(), [&](SquareId a, SquareId b) {
      return pos.h.table->name(a) < pos.h.table->name(b);
    });
    auto shares = [&](SquareId r) {
      for (const auto& f : res.h.combos)
        if (f.contains(r) && f.contains(p)) return true;
      return false;
    };
    bool s0 = shares(rv[0]), s1 = shares(rv[1]);
    q = (s1 && !s0) ? rv[1] : rv[0];
  } else {
    SquareId reg = regular.first();
    if (cls == VertexClass::B12 && !ctx.variant.empty() && ctx.maker_moves_since >= 1) {
      // past the choice point: reg is a joint of the chosen out-edge
      char chosen_role = GadgetSpec::chosen_out_role(cls, ctx.variant);
      char off_role = chosen_role == 'b' ? 'c' : 'b';
      chosen_arc = g.map.role_arc.at(static_cast<size_t>(v)).at(chosen_role);
      offside_arc = g.map.role_arc.at(static_cast<size_t>(v)).at(off_role);
      if (joint_pair_set(g, offside_arc).contains(p)) {
        subversion = true;
        // the unclaimed interior sharing a combination with both offside joints
        SquareSet off_pair = joint_pair_set(g, offside_arc);
        SquareSet inputs_outputs;
        for (const auto& [role, arc] : g.map.role_arc.at(static_cast<size_t>(v)))
          inputs_outputs = inputs_outputs | joint_pair_set(g, arc);
        SquareId found = -1;
        for (int ci : g.combos_of_vertex.at(static_cast<size_t>(v))) {
          const SquareSet& f = g.spec.h.combos[static_cast<size_t>(ci)];
          if (!off_pair.subset_of(f)) continue;
          for (SquareId s : (f - off_pair - inputs_outputs).to_vector())
            if (!pos.claimed().contains(s) && s != p) found = s;
        }
        if (found < 0) throw std::logic_error("no unclaimed interior shares the offside pair");
        q = found;
      } else {
        q = reg;
      }
    } else {
      q = reg;
    }
  }

  Position p1 = apply_move(pos, p);
  Position p2 = apply_move(p1, q);

  bool special = subversion && ctx.maker_moves_since == 1;
  std::map<VertexId, Pairing> pieces;
  SquareSet claimed2 = p2.claimed();

  std::set<VertexId> prev;
  for (const auto& act : rps.history)
    if (act.vertex != v) prev.insert(act.vertex);

  if (special) {
    // the one shape without a puzzle piece at v: pair the surviving {x, p_e}
    GameSpec res = restrict(p2, v, g.map);
    if (res.h.combos.size() != 1 || res.h.combos[0].count() != 2)
      throw std::logic_error("subversion shape without the expected two-square survivor");
    auto sv = res.h.combos[0].to_vector();
    Pairing cv;
    cv.add(sv[0], sv[1]);
    pieces[v] = cv;
    // the chosen edge's joint stays reserved for that pair
    SquareId pe = (res.h.combos[0] & joint_pair_set(g, chosen_arc)).first();
    VertexId wprime = arc_head(g, chosen_arc);
    if (prev.count(wprime)) {
      GameSpec wres = restrict(pos, wprime, g.map);
      if (wres.h.combos.empty()) {
        pieces[wprime] = Pairing{};
      } else {
        SquareSet r = wres.h.combos[0];
        SquareSet rest = r - joint_pair_set(g, chosen_arc);
        SquareId qe = (joint_pair_set(g, chosen_arc) - SquareSet::of({pe})).first();
        Pairing cw;
        cw.add(qe, rest.first());
        pieces[wprime] = cw;
      }
    } else {
      pieces[wprime] = lemma6_piece(g, wprime, pe, claimed2);
    }
    for (VertexId w = 0; w < graph.vertex_count(); ++w) {
      if (w == v || w == wprime) continue;
      if (prev.count(w))
        pieces[w] = previously_active_piece(g, w, pos, p, q, p2);
      else
        pieces[w] = never_active_piece(g, w, p, p2);
    }
  } else {
    auto piece_v = active_vertex_piece(g, v, p2);
    if (!piece_v) throw std::logic_error("no puzzle piece for the active vertex");
    pieces[v] = *piece_v;
    for (VertexId w = 0; w < graph.vertex_count(); ++w) {
      if (w == v) continue;
      if (prev.count(w))
        pieces[w] = previously_active_piece(g, w, pos, p, q, p2);
      else
        pieces[w] = never_active_piece(g, w, p, p2);
    }
  }

  DeviationReply out;
  out.reply = q;
  out.certificate = union_pairing(g, pieces);
  return out;
}

// ---------------------------------------------------------------------------
// verification sweeps

namespace {

struct SweepNode {
  RegularPlayState rps;
  Position pos;
};

template <typename Visitor>
void sweep_regular_traces(const AssociatedGame& g, Visitor&& visit) {
  std::vector<SweepNode> stack;
  stack.push_back({regular_start(), Position{g.spec.h, {}, {}, Turn::maker}});
  while (!stack.empty()) {
    SweepNode node = std::move(stack.back());
    stack.pop_back();
    if (node.rps.finished != FinishedReason::none) {
      visit(node, true);
      continue;
    }
    visit(node, false);
    std::vector<std::optional<std::string>> choices{{std::nullopt}};
    if (node.rps.started() && node.rps.at_activation_boundary(g)) {
      auto [arc, w] = successor(g, node.rps.history.back());
      VertexClass wc = cls_of(g, w);
      if (!was_active(node.rps, w) && (wc == VertexClass::M12 || wc == VertexClass::B12))
        choices = {std::optional<std::string>("b"), std::optional<std::string>("c")};
    }
    for (const auto& choice : choices) {
      RegularStep step = regular_step(g, node.rps, node.pos, choice);
      Position next = step.move ? apply_move(node.pos, *step.move) : node.pos;
      stack.push_back({std::move(step.state), std::move(next)});
    }
  }
}

}  // namespace

SweepReport verify_lemma5(const AssociatedGame& g, const Lemma5Options& opts) {
  SweepReport rep;
  sweep_regular_traces(g, [&](const SweepNode& node, bool terminal) {
    if (terminal || node.pos.to_move != Turn::breaker) return;
    rep.positions++;
    VertexId v = node.rps.history.back().vertex;
    VertexClass cls = cls_of(g, v);
    bool choice_point = cls == VertexClass::B12 && node.rps.cursor == 1;
    GameSpec res = restrict(node.pos, v, g.map);
    SquareSet singles = detect_mate_in_one(res);
    SquareSet regular = regular_move_squares(g, node.rps, node.pos);
    rep.checks++;
    if (choice_point) {
      SquareId x2 = g.map.global(v, "x2"), x3 = g.map.global(v, "x3");
      if (!singles.empty()) rep.fail("mate-in-one at a B12 choice point");
      SquareId pb = g.map.arc_joints[static_cast<size_t>(
          g.map.role_arc.at(static_cast<size_t>(v)).at('b'))][0];
      SquareId pc = g.map.arc_joints[static_cast<size_t>(
          g.map.role_arc.at(static_cast<size_t>(v)).at('c'))][0];
      SquareSet want[] = {SquareSet::of({pb, x2}), SquareSet::of({x2, x3}),
                          SquareSet::of({x3, pc})};
      for (const auto& target : want) {
        if (std::find(res.h.combos.begin(), res.h.combos.end(), target) == res.h.combos.end())
          rep.fail("choice point misses one of the double-threat combinations");
      }
      // exactly x2/x3 survive the fork
      for (SquareId z : res.h.squares.to_vector()) {
        Position after = apply_move(node.pos, z);
        GameSpec res2 = restrict(after, v, g.map);
        bool safe = detect_mate_in_one(res2).empty() && detect_mate_in_two(res2).empty();
        if (safe != (z == x2 || z == x3))
          rep.fail("choice-point savior analysis mismatch at " + node.pos.h.table->name(z));
      }
    } else {
      if (singles != regular)
        rep.fail("vertex " + g.instance.graph.names[v] +
                 ": threatened squares do not match the regular move");
      if (!regular.empty()) {
        Position after = apply_move(node.pos, regular.first());
        if (!detect_mate_in_one(restrict(after, v, g.map)).empty())
          rep.fail("regular move fails to defuse the local mate");
      }
    }
    if (opts.solve_deviations) {
      PairingHook hook = make_joint_pairing_hook(g);
      for (SquareId z : legal_moves(node.pos).to_vector()) {
        if (regular.contains(z)) continue;
        if (choice_point) {
          SquareId x2 = g.map.global(v, "x2"), x3 = g.map.global(v, "x3");
          if (z == x2 || z == x3) continue;  // the other line of play, not a deviation
        }
        rep.checks++;
        auto sr = solve_mb_position(apply_move(node.pos, z), opts.limits, hook);
        if (!sr.conclusive)
          rep.fail("solver inconclusive on a Breaker deviation");
        else if (sr.winner != MBWinner::maker)
          rep.fail("Breaker deviation " + node.pos.h.table->name(z) + " is not Maker's win");
      }
    }
  });
  return rep;
}

SweepReport verify_lemma8(const AssociatedGame& g) {
  SweepReport rep;
  sweep_regular_traces(g, [&](const SweepNode& node, bool terminal) {
    if (terminal || node.pos.to_move != Turn::maker) return;
    SquareSet regular = regular_move_squares(g, node.rps, node.pos);
    if (regular.empty()) return;  // B21 halt pending: post-game
    rep.positions++;
    for (SquareId p : legal_moves(node.pos).to_vector()) {
      if (regular.contains(p)) continue;
      rep.checks++;
      try {
        DeviationReply reply = breaker_reply_to_deviation(g, node.rps, node.pos, p);
        Position p2 = apply_move(apply_move(node.pos, p), reply.reply);
        if (!is_complete_pairing(reply.certificate, reduce_position(p2)))
          rep.fail("certificate incomplete for deviation " + node.pos.h.table->name(p) +
                   " at vertex " + g.instance.graph.names[node.rps.started()
                                                              ? node.rps.history.back().vertex
                                                              : g.instance.start]);
      } catch (const std::exception& e) {
        rep.fail(std::string("deviation ") + node.pos.h.table->name(p) + ": " + e.what());
      }
    }
  });
  return rep;
}

MBWinner simulate_theorem4(const AssociatedGame& g,
                           const std::map<std::string, std::string>& choices) {
  const Digraph& graph = g.instance.graph;
  RegularPlayState rps = regular_start();
  Position pos{g.spec.h, {}, {}, Turn::maker};
  while (rps.finished == FinishedReason::none) {
    std::optional<std::string> choice;
    if (rps.started() && rps.at_activation_boundary(g)) {
      auto [arc, w] = successor(g, rps.history.back());
      VertexClass wc = cls_of(g, w);
      if (!was_active(rps, w) && (wc == VertexClass::M12 || wc == VertexClass::B12)) {
        auto it = choices.find(graph.names[w]);
        if (it == choices.end())
          throw std::invalid_argument("protocol-error: no choice supplied for vertex " +
                                      graph.names[w]);
        // translate a successor vertex name into an out-edge role
        std::optional<char> role;
        for (const auto& [r, a] : g.map.role_arc.at(static_cast<size_t>(w))) {
          if (graph.arcs[static_cast<size_t>(a)].first != w) continue;
          if (graph.names[arc_head(g, a)] == it->second) role = r;
        }
        if (!role)
          throw std::invalid_argument("protocol-error: " + it->second +
                                      " is not a successor of " + graph.names[w]);
        choice = std::string(1, *role) == "b" ? "b" : "c";
      }
    }
    RegularStep step = regular_step(g, rps, pos, choice);
    if (step.move) pos = apply_move(pos, *step.move);
    rps = step.state;
  }

  MBWinner mb;
  if (rps.finished == FinishedReason::maker_won_m21) {
    if (!maker_has_won(pos)) throw std::logic_error("M21 finish without a completed combination");
    mb = MBWinner::maker;
  } else {
    Pairing c = lemma3_pairing(g, pos);
    if (!is_complete_pairing(c, reduce_position(pos)))
      throw std::logic_error("B21 finish without a complete pairing");
    mb = MBWinner::breaker;
  }

  // revised-rules Geography over the activation sequence
  GGState st;
  st.rules = Ruleset::revised;
  for (const auto& act : rps.history) st.marked.push_back(act.vertex);
  GGPlayer loser = gg_loser_on_move(g.instance, st);
  GGPlayer gg_winner = loser == GGPlayer::alice ? GGPlayer::bob : GGPlayer::alice;
  if ((gg_winner == GGPlayer::alice) != (mb == MBWinner::maker))
    throw std::logic_error("regular play and Geography disagree on the winner");
  // color rule: the revisited vertex's side decides
  VertexId revisited = rps.history.back().vertex;
  bool side_a = g.bipartition.is_a(revisited);
  if (side_a != (mb == MBWinner::maker))
    throw std::logic_error("winner does not match the revisited vertex's side");
  return mb;
}

std::string trace_log(const AssociatedGame& g, const RegularPlayState& rps) {
  const Digraph& graph = g.instance.graph;
  std::ostringstream os;
  auto announce = [&](const Activation& act) {
    os << "activate " << graph.names[act.vertex] << " via ";
    if (act.entry_arc < 0) {
      os << "start";
    } else {
      auto [f, t] = graph.arcs[static_cast<size_t>(act.entry_arc)];
      os << graph.names[f] << ">" << graph.names[t];
    }
    os << " variant " << act.variant << '\n';
  };
  // consecutive activations never share a vertex, so a vertex change in the
  // move log marks the next activation
  size_t k = 0;
  VertexId current = -1;
  int move_no = 0;
  for (const auto& mv : rps.log) {
    if (k < rps.history.size() && mv.active_vertex != current) {
      announce(rps.history[k]);
      current = rps.history[k].vertex;
      ++k;
    }
    os << "move " << ++move_no << ' ' << to_string(mv.mover) << ' '
       << g.spec.h.table->name(mv.square) << " regular\n";
  }
  while (k < rps.history.size()) announce(rps.history[k++]);  // B21 halt has no move
  os << "finished " << to_string(rps.finished) << '\n';
  return os.str();
}

}  // namespace mbgg
