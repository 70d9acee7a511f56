#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "mbgg/geography.hpp"
#include "mbgg/solver.hpp"

using namespace mbgg;
using namespace mbgg::testing;

namespace {

GGState state_of(const GGInstance& inst, const std::vector<std::string>& marks,
                 Ruleset rules = Ruleset::original) {
  GGState st;
  st.rules = rules;
  for (const auto& m : marks) st.marked.push_back(*inst.graph.lookup(m));
  return st;
}

}  // namespace

TEST_CASE("legal_moves_gg on a forced path") {
  GGInstance inst = gg_from_text("start s\nedge s a\nedge a b\nedge b c\nedge c a\n");
  for (Ruleset r : {Ruleset::original, Ruleset::revised}) {
    auto moves = legal_moves_gg(inst, state_of(inst, {"s", "a", "b"}, r));
    REQUIRE(moves.size() == 1);
    CHECK(inst.graph.names[moves[0]] == "c");
  }
  CHECK(legal_moves_gg(inst, state_of(inst, {})) ==
        std::vector<VertexId>{inst.start});
}

TEST_CASE("legal_moves_gg on the two-cycle") {
  GGInstance inst = gg_from_text(kE1);
  CHECK(legal_moves_gg(inst, state_of(inst, {"s", "v", "w"})).empty());
  auto revised = legal_moves_gg(inst, state_of(inst, {"s", "v", "w"}, Ruleset::revised));
  REQUIRE(revised.size() == 1);
  CHECK(inst.graph.names[revised[0]] == "v");
}

TEST_CASE("gg_loser_on_move") {
  GGInstance path = gg_from_text("start s\nedge s a\nedge a b\nedge b c\nedge c a\n");
  // after [s,a,b,c] the mover must revisit a; under original rules they are stuck
  CHECK(gg_loser_on_move(path, state_of(path, {"s", "a", "b", "c"})) == GGPlayer::alice);

  GGInstance lux = gg_from_text(
      "start Luxembourg\nedge Luxembourg Germany\nedge Germany Yemen\nedge Yemen Norway\n"
      "edge Norway Yemen\n");
  CHECK(gg_loser_on_move(lux, state_of(lux, {"Luxembourg", "Germany", "Yemen", "Norway"})) ==
        GGPlayer::alice);

  GGInstance e1 = gg_from_text(kE1);
  CHECK(gg_loser_on_move(e1, state_of(e1, {"s", "v", "w"})) == GGPlayer::bob);
  CHECK(gg_loser_on_move(e1, state_of(e1, {"s", "v", "w", "v"}, Ruleset::revised)) ==
        GGPlayer::bob);
  CHECK_THROWS_AS(gg_loser_on_move(e1, state_of(e1, {"s", "v"})), std::invalid_argument);
}

TEST_CASE("bipartition_from_start") {
  GGInstance e1 = gg_from_text(kE1);
  auto bip = bipartition_from_start(e1);
  CHECK_FALSE(bip.is_a(*e1.graph.lookup("s")));
  CHECK(bip.is_a(*e1.graph.lookup("v")));
  CHECK_FALSE(bip.is_a(*e1.graph.lookup("w")));

  GGInstance tri = gg_from_text("start v\nedge v w\nedge w u\nedge u v\n");
  CHECK_THROWS_AS(bipartition_from_start(tri), NotBipartite);

  GGInstance one = gg_from_text("start s\nedge s v\n");
  auto b1 = bipartition_from_start(one);
  CHECK_FALSE(b1.is_a(*one.graph.lookup("s")));
  CHECK(b1.is_a(*one.graph.lookup("v")));
}

TEST_CASE("flipping the anchor color swaps the sides exactly") {
  for (const char* text : {kE1, kE2, kE3, kE4}) {
    GGInstance inst = gg_from_text(text);
    auto bip = bipartition_from_start(inst);
    // recolor with the start forced into the opposite side
    std::vector<int> color(inst.graph.vertex_count(), -1);
    std::vector<VertexId> stack{inst.start};
    color[inst.start] = 1;
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      auto visit = [&](VertexId w) {
        if (color[w] == -1) {
          color[w] = 1 - color[v];
          stack.push_back(w);
        }
      };
      for (VertexId w : inst.graph.out[v]) visit(w);
      for (VertexId w : inst.graph.in[v]) visit(w);
    }
    for (VertexId v = 0; v < inst.graph.vertex_count(); ++v)
      CHECK(bip.is_a(v) == (color[v] == 0));
  }
}

TEST_CASE("validate_convertible") {
  CHECK(validate_convertible(gg_from_text(kE1)).ok);
  CHECK(validate_convertible(gg_from_text(kE2)).ok);

  // degree-4 hub
  GGInstance hub = gg_from_text(
      "start s\nedge s h\nedge h a\nedge h b\nedge a h\nedge b a\nedge a b\n");
  auto rep = validate_convertible(hub);
  CHECK_FALSE(rep.ok);
  bool clause2 = false;
  for (const auto& v : rep.violations) clause2 |= v.find("clause 2") != std::string::npos;
  CHECK(clause2);

  // start with out-degree 2 violates clause 4 before normalization
  GGInstance wide = gg_from_text("start s\nedge s v\nedge s w\nedge v w\nedge w v\n");
  auto rep2 = validate_convertible(wide);
  CHECK_FALSE(rep2.ok);
  bool clause4 = false;
  for (const auto& v : rep2.violations)
    clause4 |= v.find("clause 4: start out-degree is 2") != std::string::npos;
  CHECK(clause4);
}

TEST_CASE("planarity is only checked behind the flag") {
  // directed K3,3: bipartite, nonplanar; degree clauses fail but the
  // planarity violation must appear independently
  std::string k33 = "start a1\n";
  for (const char* a : {"a1", "a2", "a3"})
    for (const char* b : {"b1", "b2", "b3"}) k33 += std::string("edge ") + a + " " + b + "\n";
  GGInstance inst = gg_from_text(k33);
  auto without = validate_convertible(inst, false);
  for (const auto& v : without.violations) CHECK(v.find("planarity") == std::string::npos);
  auto with = validate_convertible(inst, true);
  bool planarity = false;
  for (const auto& v : with.violations) planarity |= v.find("planarity") != std::string::npos;
  CHECK(planarity);
  // E1 is planar
  CHECK(validate_convertible(gg_from_text(kE1), true).ok);
}

TEST_CASE("normalize_start splits a degree-2 start") {
  GGInstance wide = gg_from_text("start s\nedge s v\nedge s w\nedge v w\nedge w v\n");
  GGInstance norm = normalize_start(wide);
  CHECK(norm.graph.vertex_count() == wide.graph.vertex_count() + 2);
  CHECK(norm.graph.out_degree(norm.start) == 1);
  VertexId x1 = norm.graph.out[norm.start][0];
  REQUIRE(norm.graph.out_degree(x1) == 1);
  VertexId x2 = norm.graph.out[x1][0];
  CHECK(norm.graph.out_degree(x2) == 2);
  std::vector<std::string> heads;
  for (VertexId t : norm.graph.out[x2]) heads.push_back(norm.graph.names[t]);
  std::sort(heads.begin(), heads.end());
  CHECK(heads == std::vector<std::string>{"v", "w"});

  GGInstance e1 = gg_from_text(kE1);
  GGInstance same = normalize_start(e1);
  CHECK(same.graph.arcs == e1.graph.arcs);

  GGInstance sink = gg_from_text("start s\nedge v s\nedge s v\n");  // start with in-degree 1
  CHECK(normalize_start(sink).graph.arcs == sink.graph.arcs);  // out-degree 1: identity
  GGInstance wide3 = gg_from_text(
      "start s\nedge s a\nedge s b\nedge s c\nedge a b\nedge b a\nedge c a\n");
  CHECK_THROWS_AS(normalize_start(wide3), std::invalid_argument);
}

TEST_CASE("normalize_start preserves the Geography winner") {
  int checked = 0;
  for (int n = 3; n <= 5; ++n) {
    for (const auto& inst : enumerate_convertible(n, /*start_degree_two=*/true)) {
      GGInstance norm = normalize_start(inst);
      CHECK(solve_gg(inst).winner == solve_gg(norm).winner);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("classify_vertex") {
  GGInstance e1 = gg_from_text(kE1);
  auto bip = bipartition_from_start(e1);
  CHECK(classify_vertex(e1, bip, *e1.graph.lookup("s")) == VertexClass::B01);
  CHECK(classify_vertex(e1, bip, *e1.graph.lookup("v")) == VertexClass::M21);
  CHECK(classify_vertex(e1, bip, *e1.graph.lookup("w")) == VertexClass::N11);

  GGInstance e3 = gg_from_text(kE3);
  auto bip3 = bipartition_from_start(e3);
  CHECK(classify_vertex(e3, bip3, *e3.graph.lookup("v")) == VertexClass::M12);
  CHECK(classify_vertex(e3, bip3, *e3.graph.lookup("w1")) == VertexClass::B21);
  CHECK(classify_vertex(e3, bip3, *e3.graph.lookup("w2")) == VertexClass::N11);
  CHECK(classify_vertex(e3, bip3, *e3.graph.lookup("x")) == VertexClass::M21);

  GGInstance e4 = gg_from_text(kE4);
  auto bip4 = bipartition_from_start(e4);
  CHECK(classify_vertex(e4, bip4, *e4.graph.lookup("b1")) == VertexClass::B12);

  // a sink vertex falls outside the six classes
  GGInstance sink = gg_from_text("start s\nedge s v\nedge v w\n");
  auto bs = bipartition_from_start(sink);
  CHECK_THROWS_AS(classify_vertex(sink, bs, *sink.graph.lookup("w")), std::invalid_argument);
}

TEST_CASE("classify_vertex is total on convertible instances") {
  for (int n = 3; n <= 5; ++n) {
    for (const auto& inst : enumerate_convertible(n)) {
      auto bip = bipartition_from_start(inst);
      for (VertexId v = 0; v < inst.graph.vertex_count(); ++v)
        CHECK_NOTHROW(classify_vertex(inst, bip, v));
    }
  }
}

TEST_CASE("gen_convertible determinism and validity") {
  GGInstance a = gen_convertible(8, 42);
  GGInstance b = gen_convertible(8, 42);
  CHECK(a.graph.arcs == b.graph.arcs);
  CHECK(a.graph.names == b.graph.names);

  int distinct = 0;
  auto base = gen_convertible(8, 0);
  for (uint64_t s = 1; s < 6; ++s)
    if (gen_convertible(8, s).graph.arcs != base.graph.arcs) ++distinct;
  CHECK(distinct > 0);

  for (uint64_t s = 0; s < 300; ++s) {
    GGInstance g = gen_convertible(10, s);
    CAPTURE(s);
    CHECK(validate_convertible(g).ok);
    for (VertexId v = 0; v < g.graph.vertex_count(); ++v) CHECK(g.graph.out_degree(v) >= 1);
  }

  CHECK_THROWS(gen_convertible(2, 1));
}

TEST_CASE("revised and original rules have the same winner") {
  // oracle-vs-oracle: direct play-out under both rulesets, then the solver
  for (int n = 3; n <= 5; ++n) {
    for (const auto& inst : enumerate_convertible(n)) {
      GGPlayer orig = plain_gg_winner(inst, Ruleset::original);
      GGPlayer rev = plain_gg_winner(inst, Ruleset::revised);
      CHECK(orig == rev);
      CHECK(solve_gg(inst, Ruleset::original).winner == orig);
      CHECK(solve_gg(inst, Ruleset::revised).winner == rev);
    }
  }
  for (int n = 6; n <= 8; ++n)
    for (uint64_t s = 0; s < 25; ++s) {
      GGInstance inst = gen_convertible(n, s);
      CHECK(plain_gg_winner(inst, Ruleset::original) == plain_gg_winner(inst, Ruleset::revised));
    }
}

TEST_CASE("every maximal original-rules play in a convertible instance ends on a revisit wall") {
  // out-degrees are >= 1 everywhere, so a stuck player always has an arc, just
  // no unmarked head
  for (uint64_t s = 0; s < 25; ++s) {
    GGInstance inst = gen_convertible(8, s);
    for (VertexId v = 0; v < inst.graph.vertex_count(); ++v)
      CHECK(inst.graph.out_degree(v) >= 1);
  }
}
