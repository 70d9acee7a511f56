#include "mbgg/core.hpp"

#include <algorithm>

namespace mbgg {

void Hypergraph::normalize() {
  for (const auto& c : combos)
    if (!c.subset_of(squares)) throw std::invalid_argument("combo not contained in square set");
  std::sort(combos.begin(), combos.end());
  combos.erase(std::unique(combos.begin(), combos.end()), combos.end());
}

void Pairing::add(SquareId a, SquareId b) {
  if (a == b) throw std::invalid_argument("pair elements must be distinct");
  if (a > b) std::swap(a, b);
  pairs.push_back({a, b});
}

bool Pairing::covers(SquareId s) const {
  for (const auto& p : pairs)
    if (p[0] == s || p[1] == s) return true;
  return false;
}

SquareSet Pairing::covered() const {
  SquareSet s;
  for (const auto& p : pairs) {
    s.insert(p[0]);
    s.insert(p[1]);
  }
  return s;
}

void Pairing::check_disjoint() const {
  SquareSet seen;
  for (const auto& p : pairs) {
    if (seen.contains(p[0]) || seen.contains(p[1]))
      throw std::invalid_argument("pairing pairs are not disjoint");
    seen.insert(p[0]);
    seen.insert(p[1]);
  }
}

void Pairing::normalize() {
  for (auto& p : pairs)
    if (p[0] > p[1]) std::swap(p[0], p[1]);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  check_disjoint();
}

int rank(const Hypergraph& h) {
  int r = 0;
  for (const auto& c : h.combos) r = std::max(r, c.count());
  return r;
}

bool is_broken(const SquareSet& combo, const Position& p) {
  if (std::find(p.h.combos.begin(), p.h.combos.end(), combo) == p.h.combos.end())
    throw std::invalid_argument("combo is not a winning combination of this hypergraph");
  return combo.intersects(p.breaker_set);
}

GameSpec reduce_position(const Position& p) {
  GameSpec g;
  g.h.table = p.h.table;
  g.h.squares = p.h.squares - p.maker_set - p.breaker_set;
  for (const auto& c : p.h.combos) {
    if (c.intersects(p.breaker_set)) continue;  // broken
    g.h.combos.push_back(c - p.maker_set);
  }
  g.h.normalize();
  g.to_move = p.to_move;
  return g;
}

bool maker_has_won(const GameSpec& g) {
  for (const auto& c : g.h.combos)
    if (c.empty()) return true;
  return false;
}

bool maker_has_won(const Position& p) {
  for (const auto& c : p.h.combos)
    if (c.subset_of(p.maker_set)) return true;
  return false;
}

SquareSet detect_mate_in_one(const GameSpec& g) {
  SquareSet threats;
  for (const auto& c : g.h.combos)
    if (c.count() == 1) threats.insert(c.first());
  return threats;
}

std::vector<MateInTwo> detect_mate_in_two(const GameSpec& g) {
  // collect residual pairs, bucket by member square
  std::vector<MateInTwo> out;
  std::vector<SquareSet> twos;
  for (const auto& c : g.h.combos)
    if (c.count() == 2) twos.push_back(c);
  SquareSet candidates;
  for (const auto& c : twos) candidates = candidates | c;
  for (SquareId p : candidates.to_vector()) {
    SquareSet wings;
    for (const auto& c : twos)
      if (c.contains(p)) wings = wings | (c - SquareSet::of({p}));
    if (wings.count() >= 2) out.push_back({p, wings});
  }
  return out;
}

bool pairing_blocks(const Pairing& c, const SquareSet& combo) {
  for (const auto& p : c.pairs)
    if (combo.contains(p[0]) && combo.contains(p[1])) return true;
  return false;
}

bool is_complete_pairing(const Pairing& c, const GameSpec& g) {
  for (const auto& f : g.h.combos)
    if (!pairing_blocks(c, f)) return false;
  return true;
}

std::optional<SquareId> pairing_strategy_reply(const Pairing& c, SquareId maker_move,
                                               const SquareSet& claimed) {
  // `claimed` is the position after Maker's move; only the partner's
  // availability matters
  for (const auto& p : c.pairs) {
    if (p[0] != maker_move && p[1] != maker_move) continue;
    SquareId q = p[0] == maker_move ? p[1] : p[0];
    if (!claimed.contains(q)) return q;
    return std::nullopt;  // partner taken
  }
  return std::nullopt;
}

SquareSet legal_moves(const Position& p) { return p.h.squares - p.maker_set - p.breaker_set; }

Position apply_move(const Position& p, SquareId s) {
  if (!p.h.squares.contains(s)) throw std::invalid_argument("move outside the square set");
  if (p.maker_set.contains(s) || p.breaker_set.contains(s))
    throw std::invalid_argument("square already claimed");
  Position q = p;
  (q.to_move == Turn::maker ? q.maker_set : q.breaker_set).insert(s);
  q.to_move = other(q.to_move);
  return q;
}

std::vector<Hypergraph> connected_components(const Hypergraph& h) {
  // union-find over squares, merging within each combo
  std::unordered_map<SquareId, SquareId> parent;
  for (SquareId s : h.squares.to_vector()) parent[s] = s;
  auto find = [&](SquareId s) {
    while (parent[s] != s) s = parent[s] = parent[parent[s]];
    return s;
  };
  for (const auto& c : h.combos) {
    auto v = c.to_vector();
    for (size_t i = 1; i < v.size(); ++i) {
      SquareId a = find(v[0]), b = find(v[i]);
      if (a != b) parent[b] = a;
    }
  }
  std::unordered_map<SquareId, size_t> comp_index;
  std::vector<Hypergraph> comps;
  for (SquareId s : h.squares.to_vector()) {
    SquareId r = find(s);
    if (!comp_index.count(r)) {
      comp_index[r] = comps.size();
      comps.push_back({h.table, {}, {}});
    }
    comps[comp_index[r]].squares.insert(s);
  }
  for (const auto& c : h.combos) {
    if (c.empty()) continue;
    comps[comp_index[find(c.first())]].combos.push_back(c);
  }
  for (auto& comp : comps) comp.normalize();
  return comps;
}

bool validate_position(const Position& p, std::string* why) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (p.maker_set.intersects(p.breaker_set)) return fail("maker and breaker sets overlap");
  if (!p.maker_set.subset_of(p.h.squares)) return fail("maker set outside squares");
  if (!p.breaker_set.subset_of(p.h.squares)) return fail("breaker set outside squares");
  int d = p.maker_set.count() - p.breaker_set.count();
  if (d != 0 && d != 1) return fail("claim counts inconsistent with Maker moving first");
  if (d == 1 && p.to_move == Turn::maker) return fail("turn inconsistent with claim counts");
  if (d == 0 && p.to_move == Turn::breaker) return fail("turn inconsistent with claim counts");
  return true;
}

GameSpec canonicalized(const GameSpec& g) {
  auto ids = g.h.squares.to_vector();
  std::vector<std::string> names;
  names.reserve(ids.size());
  for (SquareId i : ids) names.push_back(g.h.table->name(i));
  std::sort(names.begin(), names.end());

  GameSpec out;
  out.to_move = g.to_move;
  out.h.table = std::make_shared<SquareTable>();
  std::unordered_map<SquareId, SquareId> remap;
  for (const auto& n : names) out.h.table->intern(n);
  for (SquareId i : ids) remap[i] = *out.h.table->lookup(g.h.table->name(i));
  for (SquareId i : ids) out.h.squares.insert(remap[i]);
  for (const auto& c : g.h.combos) {
    SquareSet m;
    for (SquareId i : c.to_vector()) m.insert(remap.at(i));
    out.h.combos.push_back(m);
  }
  out.h.normalize();
  return out;
}

}  // namespace mbgg
