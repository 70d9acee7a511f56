#include "mbgg/geography.hpp"

#include <algorithm>
#include <deque>
#include <random>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

namespace mbgg {

VertexId Digraph::add_vertex(const std::string& name) {
  auto it = index.find(name);
  if (it != index.end()) return it->second;
  names.push_back(name);
  VertexId id = static_cast<int>(names.size()) - 1;
  index.emplace(name, id);
  out.emplace_back();
  in.emplace_back();
  return id;
}

std::optional<VertexId> Digraph::lookup(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

void Digraph::add_arc(VertexId from, VertexId to) {
  if (from == to) throw std::invalid_argument("self-loop " + names[from] + " -> " + names[to]);
  if (std::find(arcs.begin(), arcs.end(), std::make_pair(from, to)) != arcs.end())
    throw std::invalid_argument("duplicate arc " + names[from] + " -> " + names[to]);
  arcs.emplace_back(from, to);
}

void Digraph::finalize() {
  std::sort(arcs.begin(), arcs.end());
  out.assign(names.size(), {});
  in.assign(names.size(), {});
  for (auto [f, t] : arcs) {
    out[f].push_back(t);
    in[t].push_back(f);
  }
}

int Digraph::arc_id(VertexId from, VertexId to) const {
  auto it = std::lower_bound(arcs.begin(), arcs.end(), std::make_pair(from, to));
  if (it == arcs.end() || *it != std::make_pair(from, to)) return -1;
  return static_cast<int>(it - arcs.begin());
}

bool Digraph::weakly_connected() const {
  if (names.empty()) return true;
  std::vector<bool> seen(names.size(), false);
  std::deque<VertexId> q{0};
  seen[0] = true;
  int reached = 1;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop_front();
    auto visit = [&](VertexId w) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        q.push_back(w);
      }
    };
    for (VertexId w : out[v]) visit(w);
    for (VertexId w : in[v]) visit(w);
  }
  return reached == vertex_count();
}

const char* to_string(VertexClass c) {
  switch (c) {
    case VertexClass::M12: return "M12";
    case VertexClass::M21: return "M21";
    case VertexClass::B12: return "B12";
    case VertexClass::B21: return "B21";
    case VertexClass::N11: return "N11";
    case VertexClass::B01: return "B01";
  }
  return "?";
}

std::optional<VertexClass> vertex_class_from_string(const std::string& s) {
  for (VertexClass c : {VertexClass::M12, VertexClass::M21, VertexClass::B12, VertexClass::B21,
                        VertexClass::N11, VertexClass::B01})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

int interior_count(VertexClass c) {
  switch (c) {
    case VertexClass::M12: return 5;
    case VertexClass::B12: return 4;
    case VertexClass::M21: return 3;
    case VertexClass::B21: return 2;
    case VertexClass::N11: return 2;
    case VertexClass::B01: return 2;
  }
  return 0;
}

int class_in_degree(VertexClass c) {
  switch (c) {
    case VertexClass::M12: case VertexClass::B12: case VertexClass::N11: return 1;
    case VertexClass::M21: case VertexClass::B21: return 2;
    case VertexClass::B01: return 0;
  }
  return 0;
}

int class_out_degree(VertexClass c) {
  switch (c) {
    case VertexClass::M12: case VertexClass::B12: return 2;
    default: return 1;
  }
}

static void check_state(const GGInstance& inst, const GGState& st) {
  if (st.marked.empty()) return;
  if (st.marked[0] != inst.start) throw std::invalid_argument("state does not begin at start");
  std::vector<bool> seen(inst.graph.vertex_count(), false);
  seen[st.marked[0]] = true;
  for (size_t i = 1; i < st.marked.size(); ++i) {
    VertexId a = st.marked[i - 1], b = st.marked[i];
    if (inst.graph.arc_id(a, b) < 0) throw std::invalid_argument("consecutive marks not joined by an arc");
    bool revisit = seen[b];
    if (revisit) {
      if (st.rules == Ruleset::original) throw std::invalid_argument("revisit under original rules");
      if (i + 1 != st.marked.size()) throw std::invalid_argument("revisit before the final mark");
    }
    seen[b] = true;
  }
}

std::vector<VertexId> legal_moves_gg(const GGInstance& inst, const GGState& st) {
  check_state(inst, st);
  if (st.marked.empty()) return {inst.start};
  VertexId last = st.marked.back();
  std::vector<VertexId> moves;
  for (VertexId w : inst.graph.out[last]) {
    if (st.rules == Ruleset::original &&
        std::find(st.marked.begin(), st.marked.end(), w) != st.marked.end())
      continue;
    moves.push_back(w);
  }
  std::sort(moves.begin(), moves.end());
  return moves;
}

GGPlayer gg_loser_on_move(const GGInstance& inst, const GGState& st) {
  check_state(inst, st);
  size_t k = st.marked.size();
  if (st.rules == Ruleset::revised && k >= 2) {
    VertexId last = st.marked.back();
    if (std::find(st.marked.begin(), st.marked.end() - 1, last) != st.marked.end() - 1)
      return (k - 1) % 2 == 0 ? GGPlayer::alice : GGPlayer::bob;  // mover of the revisit
  }
  if (!legal_moves_gg(inst, st).empty()) throw std::invalid_argument("game is not over");
  return k % 2 == 0 ? GGPlayer::alice : GGPlayer::bob;  // player to move is stuck
}

Bipartition bipartition_from_start(const GGInstance& inst) {
  const Digraph& g = inst.graph;
  std::vector<int> color(g.vertex_count(), -1);  // 0 = V_B, 1 = V_A
  std::deque<VertexId> q{inst.start};
  color[inst.start] = 0;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop_front();
    auto visit = [&](VertexId w) {
      if (color[w] == -1) {
        color[w] = 1 - color[v];
        q.push_back(w);
      } else if (color[w] == color[v]) {
        throw NotBipartite("arc between " + g.names[v] + " and " + g.names[w] +
                           " closes an odd cycle");
      }
    };
    for (VertexId w : g.out[v]) visit(w);
    for (VertexId w : g.in[v]) visit(w);
  }
  for (int c : color)
    if (c == -1) throw std::invalid_argument("graph is not weakly connected");
  Bipartition bip;
  bip.in_side_a.resize(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) bip.in_side_a[v] = color[v] == 1;
  return bip;
}

static bool is_planar(const Digraph& g) {
  using BoostGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  BoostGraph bg(g.vertex_count());
  for (auto [f, t] : g.arcs) boost::add_edge(f, t, bg);
  return boost::boyer_myrvold_planarity_test(bg);
}

ConvertibilityReport validate_convertible(const GGInstance& inst, bool require_planar) {
  ConvertibilityReport rep;
  const Digraph& g = inst.graph;
  if (inst.start < 0 || inst.start >= g.vertex_count()) {
    rep.violate("start vertex missing");
    return rep;
  }
  if (!g.weakly_connected()) rep.violate("clause 1: not weakly connected");
  try {
    if (g.weakly_connected()) bipartition_from_start(inst);
  } catch (const NotBipartite& e) {
    rep.violate(std::string("clause 1: not bipartite (") + e.what() + ")");
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) > 3)
      rep.violate("clause 2: |delta(" + g.names[v] + ")| = " + std::to_string(g.degree(v)) + " > 3");
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (v == inst.start) continue;
    if (g.in_degree(v) < 1 || g.in_degree(v) > 2)
      rep.violate("clause 3: in-degree of " + g.names[v] + " is " + std::to_string(g.in_degree(v)));
    if (g.out_degree(v) < 1 || g.out_degree(v) > 2)
      rep.violate("clause 3: out-degree of " + g.names[v] + " is " +
                  std::to_string(g.out_degree(v)));
  }
  if (g.out_degree(inst.start) != 1)
    rep.violate("clause 4: start out-degree is " + std::to_string(g.out_degree(inst.start)) +
                ", want exactly 1");
  if (g.in_degree(inst.start) != 0)
    rep.violate("clause 4: start in-degree is " + std::to_string(g.in_degree(inst.start)) +
                ", want 0");
  if (require_planar && !is_planar(g)) rep.violate("planarity: graph is not planar");
  return rep;
}

static std::string fresh_name(const Digraph& g, const std::string& base) {
  std::string n = base;
  while (g.index.count(n)) n += "'";
  return n;
}

GGInstance normalize_start(const GGInstance& inst) {
  int d = inst.graph.out_degree(inst.start);
  if (d == 1) return inst;
  if (d != 2 || inst.graph.in_degree(inst.start) != 0)
    throw std::invalid_argument("start must have out-degree 1 or 2 and in-degree 0");

  GGInstance out;
  for (const auto& n : inst.graph.names) out.graph.add_vertex(n);
  VertexId x1 = out.graph.add_vertex(fresh_name(out.graph, "x1"));
  VertexId x2 = out.graph.add_vertex(fresh_name(out.graph, "x2"));
  for (auto [f, t] : inst.graph.arcs)
    if (f != inst.start) out.graph.add_arc(f, t);
  out.graph.add_arc(inst.start, x1);
  out.graph.add_arc(x1, x2);
  for (VertexId w : inst.graph.out[inst.start]) out.graph.add_arc(x2, w);
  out.graph.finalize();
  out.start = inst.start;
  return out;
}

VertexClass classify_vertex(const GGInstance& inst, const Bipartition& bip, VertexId v) {
  const Digraph& g = inst.graph;
  int din = g.in_degree(v), dout = g.out_degree(v);
  if (v == inst.start) {
    if (din == 0 && dout == 1) return VertexClass::B01;
    throw std::invalid_argument("start vertex degrees outside the six classes");
  }
  if (din == 1 && dout == 1) return VertexClass::N11;
  if (din == 1 && dout == 2) return bip.is_a(v) ? VertexClass::M12 : VertexClass::B12;
  if (din == 2 && dout == 1) return bip.is_a(v) ? VertexClass::M21 : VertexClass::B21;
  throw std::invalid_argument("vertex " + g.names[v] + " (in " + std::to_string(din) + ", out " +
                              std::to_string(dout) + ") outside the six classes");
}

GGInstance gen_convertible(int vertex_budget, uint64_t seed) {
  if (vertex_budget < 3) throw std::runtime_error("generation-failure: budget below 3");
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); };

  constexpr int kAttempts = 4000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    int n = vertex_budget;
    // side[0] = start in V_B (false = B, true = A)
    std::vector<bool> side(n, false);
    int count_a = 0;
    for (int v = 1; v < n; ++v) {
      side[v] = rng() & 1;
      if (side[v]) ++count_a;
    }
    // need an A vertex for the start arc and a non-start B vertex for A's out-arcs
    if (count_a == 0 || count_a == n - 1) continue;

    std::vector<std::vector<bool>> has(n, std::vector<bool>(n, false));
    std::vector<int> din(n, 0), dout(n, 0);
    auto deg = [&](int v) { return din[v] + dout[v]; };
    auto can_add = [&](int f, int t) {
      return f != t && t != 0 && side[f] != side[t] && !has[f][t] && dout[f] < 2 && din[t] < 2 &&
             deg(f) < 3 && deg(t) < 3;
    };
    auto add = [&](int f, int t) {
      has[f][t] = true;
      ++dout[f];
      ++din[t];
    };

    // start arc into a random A vertex
    {
      std::vector<int> as;
      for (int v = 1; v < n; ++v)
        if (side[v]) as.push_back(v);
      add(0, as[pick(static_cast<int>(as.size()))]);
    }

    bool dead = false;
    // out-degree >= 1 everywhere (games must end by revisiting, not by sinks)
    for (int v = 1; v < n && !dead; ++v) {
      if (dout[v] >= 1) continue;
      std::vector<int> cands;
      for (int w = 1; w < n; ++w)
        if (can_add(v, w)) cands.push_back(w);
      if (cands.empty()) {
        dead = true;
        break;
      }
      add(v, cands[pick(static_cast<int>(cands.size()))]);
    }
    if (dead) continue;
    // in-degree >= 1 for every non-start vertex
    for (int v = 1; v < n && !dead; ++v) {
      if (din[v] >= 1) continue;
      std::vector<int> cands;
      for (int u = 1; u < n; ++u)
        if (can_add(u, v)) cands.push_back(u);
      if (cands.empty()) {
        dead = true;
        break;
      }
      add(cands[pick(static_cast<int>(cands.size()))], v);
    }
    if (dead) continue;
    // sprinkle extra arcs for degree variety
    int extras = pick(n + 1);
    for (int k = 0; k < extras; ++k) {
      int f = 1 + pick(n - 1), t = 1 + pick(n - 1);
      if (can_add(f, t)) add(f, t);
    }

    GGInstance inst;
    inst.graph.add_vertex("s");
    for (int v = 1; v < n; ++v) inst.graph.add_vertex("v" + std::to_string(v));
    for (int f = 0; f < n; ++f)
      for (int t = 0; t < n; ++t)
        if (has[f][t]) inst.graph.add_arc(f, t);
    inst.graph.finalize();
    inst.start = 0;
    if (validate_convertible(inst).ok) return inst;
  }
  throw std::runtime_error("generation-failure: no convertible instance within retry budget");
}

}  // namespace mbgg
