#include "mbgg/reduction.hpp"

#include <algorithm>
#include <ostream>

namespace mbgg {

SquareId ReductionMap::global(VertexId v, const std::string& local_name) const {
  const auto& m = local_to_global.at(static_cast<size_t>(v));
  auto it = m.find(local_name);
  if (it == m.end())
    throw std::invalid_argument("vertex " + std::to_string(v) + " has no square " + local_name);
  return it->second;
}

std::vector<VertexId> ReductionMap::owners(SquareId s) const {
  return owners_cache.at(static_cast<size_t>(s));
}

SquareSet ReductionMap::gadget_squares(VertexId v) const {
  return gadget_squares_cache.at(static_cast<size_t>(v));
}

char ReductionMap::role_of_arc(VertexId v, int arc) const {
  for (const auto& [role, a] : role_arc.at(static_cast<size_t>(v)))
    if (a == arc) return role;
  throw std::invalid_argument("arc not incident to vertex");
}

AssociatedGame build_associated_game(const GGInstance& inst, const GadgetLibrary& lib) {
  auto conv = validate_convertible(inst);
  if (!conv.ok) {
    std::string msg = "instance is not convertible:";
    for (const auto& v : conv.violations) msg += " " + v + ";";
    throw std::invalid_argument(msg);
  }

  AssociatedGame g;
  g.instance = inst;
  g.library = lib;
  g.bipartition = bipartition_from_start(inst);
  const Digraph& graph = inst.graph;
  int n = graph.vertex_count();

  g.map.classes.resize(static_cast<size_t>(n));
  for (VertexId v = 0; v < n; ++v)
    g.map.classes[static_cast<size_t>(v)] = classify_vertex(inst, g.bipartition, v);

  auto table = std::make_shared<SquareTable>();
  g.spec.h.table = table;
  g.spec.to_move = Turn::maker;

  // one shared joint pair per arc
  g.map.arc_joints.resize(graph.arcs.size());
  for (size_t a = 0; a < graph.arcs.size(); ++a) {
    auto [f, t] = graph.arcs[a];
    std::string base = graph.names[f] + ">" + graph.names[t];
    SquareId p = table->intern(base + "#p"), q = table->intern(base + "#q");
    g.map.arc_joints[a] = {p, q};
    g.spec.h.squares.insert(p);
    g.spec.h.squares.insert(q);
  }

  // per-vertex instantiation: arcs sorted by id take roles in order
  g.map.local_to_global.resize(static_cast<size_t>(n));
  g.map.role_arc.resize(static_cast<size_t>(n));
  g.combos_of_vertex.resize(static_cast<size_t>(n));
  for (VertexId v = 0; v < n; ++v) {
    VertexClass cls = g.map.classes[static_cast<size_t>(v)];
    const GadgetSpec& spec = lib.spec(cls);

    std::vector<int> in_arcs, out_arcs;
    for (size_t a = 0; a < graph.arcs.size(); ++a) {
      if (graph.arcs[a].second == v) in_arcs.push_back(static_cast<int>(a));
      if (graph.arcs[a].first == v) out_arcs.push_back(static_cast<int>(a));
    }
    auto& names = g.map.local_to_global[static_cast<size_t>(v)];
    auto& roles = g.map.role_arc[static_cast<size_t>(v)];
    size_t next_in = 0, next_out = 0;
    for (const auto& port : spec.ports) {
      int arc = port.is_in ? in_arcs.at(next_in++) : out_arcs.at(next_out++);
      roles[port.edge_role] = arc;
      names[port.p_name] = g.map.arc_joints[static_cast<size_t>(arc)][0];
      names[port.q_name] = g.map.arc_joints[static_cast<size_t>(arc)][1];
    }
    if (next_in != in_arcs.size() || next_out != out_arcs.size())
      throw std::invalid_argument("gadget ports do not match vertex degrees (library mismatch)");
    for (const auto& x : spec.interiors) {
      SquareId s = table->intern(graph.names[v] + "." + x);
      names[x] = s;
      g.spec.h.squares.insert(s);
    }
    for (const auto& combo : spec.combos) {
      SquareSet cs;
      for (const auto& nm : combo) cs.insert(names.at(nm));
      g.combos_of_vertex[static_cast<size_t>(v)].push_back(static_cast<int>(g.spec.h.combos.size()));
      g.spec.h.combos.push_back(cs);
    }
  }
  // no normalize(): per-vertex combo indices stay aligned; gadget combos are
  // pairwise distinct by construction (interiors disambiguate)
  for (const auto& c : g.spec.h.combos)
    if (!c.subset_of(g.spec.h.squares)) throw std::logic_error("combo outside square set");
  if (rank(g.spec.h) > 5)
    throw std::invalid_argument("library produces combinations above rank 5");

  g.map.gadget_squares_cache.resize(static_cast<size_t>(n));
  for (VertexId v = 0; v < n; ++v) {
    SquareSet s;
    for (const auto& [nm, id] : g.map.local_to_global[static_cast<size_t>(v)]) s.insert(id);
    g.map.gadget_squares_cache[static_cast<size_t>(v)] = s;
  }
  g.map.owners_cache.assign(static_cast<size_t>(table->size()), {});
  for (VertexId v = 0; v < n; ++v)
    for (SquareId s : g.map.gadget_squares_cache[static_cast<size_t>(v)].to_vector())
      g.map.owners_cache[static_cast<size_t>(s)].push_back(v);
  return g;
}

GameSpec restrict(const Position& p, VertexId v, const ReductionMap& m) {
  if (v < 0 || static_cast<size_t>(v) >= m.local_to_global.size())
    throw std::invalid_argument("unknown vertex");
  GameSpec g;
  g.h.table = p.h.table;
  g.to_move = p.to_move;
  SquareSet xv = m.gadget_squares(v);
  g.h.squares = (p.h.squares - p.maker_set - p.breaker_set) & xv;
  for (const auto& c : p.h.combos) {
    if (!c.subset_of(xv)) continue;  // belongs to another gadget
    if (c.intersects(p.breaker_set)) continue;
    g.h.combos.push_back(c - p.maker_set);
  }
  g.h.normalize();
  return g;
}

Pairing global_joint_pairing(const AssociatedGame& g) {
  Pairing c;
  for (const auto& pq : g.map.arc_joints) c.add(pq[0], pq[1]);
  c.normalize();
  return c;
}

PairingHook make_joint_pairing_hook(const AssociatedGame& g) {
  auto joints = g.map.arc_joints;
  return [joints](const Position& p) -> std::optional<Pairing> {
    SquareSet claimed = p.maker_set | p.breaker_set;
    Pairing c;
    for (const auto& pq : joints)
      if (!claimed.contains(pq[0]) && !claimed.contains(pq[1])) c.add(pq[0], pq[1]);
    return c;  // the solver re-checks completeness before cutting
  };
}

GameSpec uniformize5(const GameSpec& g) {
  for (const auto& c : g.h.combos) {
    int n = c.count();
    if (n < 1) throw std::invalid_argument("uniformize5 requires combos of size >= 1");
    if (n > 5) throw std::invalid_argument("uniformize5 requires rank <= 5");
  }
  GameSpec out;
  out.to_move = g.to_move;
  auto table = std::make_shared<SquareTable>();
  // keep existing squares under their names
  std::unordered_map<SquareId, SquareId> remap;
  for (SquareId s : g.h.squares.to_vector()) {
    SquareId ns = table->intern(g.h.table->name(s));
    remap[s] = ns;
    out.h.squares.insert(ns);
  }
  out.h.table = table;

  std::vector<SquareSet> work;
  for (const auto& c : g.h.combos) {
    SquareSet m;
    for (SquareId s : c.to_vector()) m.insert(remap.at(s));
    work.push_back(m);
  }
  std::sort(work.begin(), work.end(), [](const SquareSet& a, const SquareSet& b) {
    int ca = a.count(), cb = b.count();
    return ca != cb ? ca < cb : a < b;
  });

  int fresh = 0;
  std::vector<SquareSet> done;
  for (auto combo : work) {
    std::vector<SquareSet> grow{combo};
    while (grow.front().count() < 5) {
      std::vector<SquareSet> next;
      for (const auto& f : grow) {
        SquareId y = table->intern("u5#" + std::to_string(fresh++));
        SquareId z = table->intern("u5#" + std::to_string(fresh++));
        out.h.squares.insert(y);
        out.h.squares.insert(z);
        SquareSet fy = f, fz = f;
        fy.insert(y);
        fz.insert(z);
        next.push_back(fy);
        next.push_back(fz);
      }
      grow = std::move(next);
    }
    done.insert(done.end(), grow.begin(), grow.end());
  }
  out.h.combos = std::move(done);
  out.h.normalize();
  return out;
}

void write_reduction_map(std::ostream& os, const AssociatedGame& g) {
  const Digraph& graph = g.instance.graph;
  for (size_t a = 0; a < graph.arcs.size(); ++a) {
    auto [f, t] = graph.arcs[a];
    os << "joint " << graph.names[f] << ' ' << graph.names[t] << ' '
       << g.spec.h.table->name(g.map.arc_joints[a][0]) << ' '
       << g.spec.h.table->name(g.map.arc_joints[a][1]) << '\n';
  }
  for (VertexId v = 0; v < graph.vertex_count(); ++v) {
    const GadgetSpec& spec = g.library.spec(g.map.classes[static_cast<size_t>(v)]);
    for (const auto& x : spec.interiors)
      os << "interior " << graph.names[v] << ' ' << x << ' '
         << g.spec.h.table->name(g.map.global(v, x)) << '\n';
  }
}

}  // namespace mbgg
