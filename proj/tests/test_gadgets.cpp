#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "common.hpp"
#include "mbgg/gadgets.hpp"

using namespace mbgg;
using namespace mbgg::testing;

namespace {

const std::vector<VertexClass> kAllClasses = {VertexClass::M12, VertexClass::B12,
                                              VertexClass::M21, VertexClass::B21,
                                              VertexClass::N11, VertexClass::B01};

}  // namespace

TEST_CASE("builtin sequences carry the fixed square orders with movers alternating") {
  auto n11 = builtin_sequences(VertexClass::N11).at("only");
  REQUIRE(n11.size() == 4);
  CHECK(n11[0] == SeqMove{Turn::maker, "p_b"});
  CHECK(n11[1] == SeqMove{Turn::breaker, "x1"});
  CHECK(n11[2] == SeqMove{Turn::maker, "q_b"});
  CHECK(n11[3] == SeqMove{Turn::breaker, "x2"});

  auto b01 = builtin_sequences(VertexClass::B01).at("only");
  CHECK(b01[0] == SeqMove{Turn::maker, "p_a"});
  CHECK(b01[2] == SeqMove{Turn::maker, "q_a"});

  auto b12c = builtin_sequences(VertexClass::B12).at("choose-c");
  REQUIRE(b12c.size() == 6);
  CHECK(b12c[0] == SeqMove{Turn::maker, "x1"});
  CHECK(b12c[1] == SeqMove{Turn::breaker, "x2"});
  CHECK(b12c[2] == SeqMove{Turn::maker, "p_c"});
  CHECK(b12c[3] == SeqMove{Turn::breaker, "x3"});
  CHECK(b12c[4] == SeqMove{Turn::maker, "q_c"});
  CHECK(b12c[5] == SeqMove{Turn::breaker, "x4"});

  auto m12b = builtin_sequences(VertexClass::M12).at("choose-b");
  CHECK(m12b[0] == SeqMove{Turn::maker, "x1"});
  CHECK(m12b[5] == SeqMove{Turn::breaker, "x5"});
}

TEST_CASE("joint pairings pair every port and no interior") {
  for (VertexClass cls : kAllClasses) {
    const GadgetSpec& spec = builtin_library().spec(cls);
    LocalInstance li = instantiate_local(spec);
    Pairing jp = joint_pairing(li);
    CHECK(static_cast<int>(jp.pairs.size()) == static_cast<int>(spec.ports.size()));
    CHECK(jp.covered() == (li.inputs | li.outputs));
    CHECK_FALSE(jp.covered().intersects(li.interiors));
  }
  CHECK(joint_pairing(instantiate_local(builtin_library().spec(VertexClass::M12))).pairs.size() ==
        3);
  CHECK(joint_pairing(instantiate_local(builtin_library().spec(VertexClass::B01))).pairs.size() ==
        1);
}

TEST_CASE("the shipped library passes every validator check") {
  auto rep = validate_library(builtin_library());
  CHECK(rep.ok());
  REQUIRE(rep.by_class.size() == 6);
  for (const auto& [cls, gr] : rep.by_class) {
    for (const auto& c : gr.checks) {
      CAPTURE(to_string(cls));
      CAPTURE(c.name);
      CAPTURE(c.detail);
      CHECK(c.pass);
    }
    for (const char* name : {"G1", "G2", "G3", "G4", "G5", "G6"})
      CHECK(gr.find(name) != nullptr);
  }
}

TEST_CASE("validator is deterministic and side-effect free") {
  const GadgetSpec& spec = builtin_library().spec(VertexClass::B12);
  auto a = validate_gadget(spec);
  auto b = validate_gadget(spec);
  REQUIRE(a.checks.size() == b.checks.size());
  for (size_t i = 0; i < a.checks.size(); ++i) {
    CHECK(a.checks[i].pass == b.checks[i].pass);
    CHECK(a.checks[i].detail == b.checks[i].detail);
  }
}

TEST_CASE("a single fat combination fails the sequence checks") {
  GadgetSpec bad;
  bad.cls = VertexClass::N11;
  bad.interiors = builtin_interiors(VertexClass::N11);
  bad.ports = builtin_ports(VertexClass::N11);
  bad.sequences = builtin_sequences(VertexClass::N11);
  bad.combos = {{"p_a", "q_a", "x1", "p_b", "q_b"}};
  bad.sort_combos();
  auto rep = validate_gadget(bad);
  CHECK_FALSE(rep.ok());
  bool g3_or_g4 = false;
  for (const char* name : {"G3", "G4"}) {
    const auto* c = rep.find(name);
    if (c && !c->pass) g3_or_g4 = true;
  }
  CHECK(g3_or_g4);
}

TEST_CASE("an oversized combination fails G1") {
  GadgetSpec bad = builtin_library().spec(VertexClass::M12);
  bad.combos.push_back({"p_a", "q_a", "x1", "x2", "x3", "x4"});
  bad.sort_combos();
  auto rep = validate_gadget(bad);
  const auto* g1 = rep.find("G1");
  REQUIRE(g1 != nullptr);
  CHECK_FALSE(g1->pass);
}

TEST_CASE("dropping the second-activation combo fails G6") {
  GadgetSpec bad = builtin_library().spec(VertexClass::M21);
  std::vector<std::vector<std::string>> kept;
  for (const auto& c : bad.combos)
    if (c.size() != 5) kept.push_back(c);
  bad.combos = kept;
  auto rep = validate_gadget(bad);
  const auto* g6 = rep.find("G6");
  REQUIRE(g6 != nullptr);
  CHECK_FALSE(g6->pass);
}

TEST_CASE("removing an input joint pair breaks completeness (minimality witness)") {
  for (VertexClass cls : kAllClasses) {
    if (cls == VertexClass::B01) continue;
    const GadgetSpec& spec = builtin_library().spec(cls);
    LocalInstance li = instantiate_local(spec);
    Pairing jp = joint_pairing(li);
    GameSpec local{li.h, Turn::maker};
    REQUIRE(is_complete_pairing(jp, local));
    // drop the pair of the first in-edge
    const auto& pq = li.role_joints.at('a');
    Pairing smaller;
    for (const auto& pr : jp.pairs)
      if (!(pr[0] == std::min(pq[0], pq[1]) && pr[1] == std::max(pq[0], pq[1])))
        smaller.pairs.push_back(pr);
    CAPTURE(to_string(cls));
    CHECK_FALSE(is_complete_pairing(smaller, local));
  }
}

TEST_CASE("lemma6_pairs_local follows the case table") {
  const GadgetLibrary& lib = builtin_library();
  using Pairs = std::vector<std::array<std::string, 2>>;

  auto sorted = [](Pairs p) {
    for (auto& pr : p)
      if (pr[0] > pr[1]) std::swap(pr[0], pr[1]);
    std::sort(p.begin(), p.end());
    return p;
  };

  // interior: the joint pairing
  CHECK(sorted(lemma6_pairs_local(lib.spec(VertexClass::N11), "x1")) ==
        sorted(Pairs{{"p_a", "q_a"}, {"p_b", "q_b"}}));
  // input: C* plus {co-joint, x1}
  CHECK(sorted(lemma6_pairs_local(lib.spec(VertexClass::N11), "p_a")) ==
        sorted(Pairs{{"p_b", "q_b"}, {"q_a", "x1"}}));
  CHECK(sorted(lemma6_pairs_local(lib.spec(VertexClass::N11), "q_a")) ==
        sorted(Pairs{{"p_b", "q_b"}, {"p_a", "x1"}}));
  // M12 input additionally pairs {x2,x4}
  CHECK(sorted(lemma6_pairs_local(lib.spec(VertexClass::M12), "p_a")) ==
        sorted(Pairs{{"p_b", "q_b"}, {"p_c", "q_c"}, {"q_a", "x1"}, {"x2", "x4"}}));
  // M21 output: C* alone
  CHECK(sorted(lemma6_pairs_local(lib.spec(VertexClass::M21), "p_c")) ==
        sorted(Pairs{{"p_a", "q_a"}, {"p_b", "q_b"}}));
  // B12 output adds {x1,x4}; M12 output adds {x1,x5} or {x2,x5}
  CHECK(sorted(lemma6_pairs_local(lib.spec(VertexClass::B12), "q_b")) ==
        sorted(Pairs{{"p_a", "q_a"}, {"p_c", "q_c"}, {"x1", "x4"}}));
  CHECK(sorted(lemma6_pairs_local(lib.spec(VertexClass::M12), "p_b")) ==
        sorted(Pairs{{"p_a", "q_a"}, {"p_c", "q_c"}, {"x1", "x5"}}));
  CHECK(sorted(lemma6_pairs_local(lib.spec(VertexClass::M12), "q_c")) ==
        sorted(Pairs{{"p_a", "q_a"}, {"p_b", "q_b"}, {"x2", "x5"}}));

  CHECK_THROWS_AS(lemma6_pairs_local(lib.spec(VertexClass::B01), "x1"), std::invalid_argument);
  CHECK_THROWS_AS(lemma6_pairs_local(lib.spec(VertexClass::N11), "nope"), std::invalid_argument);
}

TEST_CASE("synthesis reproduces the shipped library deterministically") {
  GadgetLibrary a = synthesize_gadgets();
  CHECK(to_text(a) == to_text(builtin_library()));
  GadgetLibrary b = synthesize_gadgets();
  CHECK(to_text(a) == to_text(b));
}

TEST_CASE("synthesis under other seeds still validates") {
  for (uint64_t seed : {7ull, 99ull}) {
    GadgetLibrary lib = synthesize_gadgets(4000, seed);
    CHECK(validate_library(lib).ok());
  }
}

TEST_CASE("an exhausted budget raises a synthesis failure") {
  CHECK_THROWS_AS(synthesize_gadgets(0, 1), SynthesisFailure);
}

TEST_CASE("library text round-trips") {
  std::string text = to_text(builtin_library());
  std::istringstream is(text);
  GadgetLibrary parsed = parse_gadget_library(is);
  CHECK(to_text(parsed) == text);
}

TEST_CASE("library parser reports malformed input with line numbers") {
  std::istringstream bad1("interior x1\n");
  CHECK_THROWS_AS(parse_gadget_library(bad1), ParseError);
  std::istringstream bad2("gadget Z99\n");
  CHECK_THROWS_AS(parse_gadget_library(bad2), ParseError);
  std::istringstream bad3("gadget N11\nport sideways a p q\n");
  CHECK_THROWS_AS(parse_gadget_library(bad3), ParseError);
}

TEST_CASE("interior counts match the class table") {
  CHECK(interior_count(VertexClass::M12) == 5);
  CHECK(interior_count(VertexClass::B12) == 4);
  CHECK(interior_count(VertexClass::M21) == 3);
  CHECK(interior_count(VertexClass::B21) == 2);
  CHECK(interior_count(VertexClass::N11) == 2);
  CHECK(interior_count(VertexClass::B01) == 2);
  for (VertexClass cls : kAllClasses)
    CHECK(static_cast<int>(builtin_library().spec(cls).interiors.size()) == interior_count(cls));
}

TEST_CASE("maker's sequence claims are one out-pair plus interiors; breaker's are interiors") {
  for (VertexClass cls : kAllClasses) {
    const GadgetSpec& spec = builtin_library().spec(cls);
    LocalInstance li = instantiate_local(spec);
    for (const auto& key : GadgetSpec::variant_keys(cls)) {
      SquareSet maker, breaker;
      for (const auto& mv : spec.sequences.at(key))
        (mv.mover == Turn::maker ? maker : breaker).insert(li.at(mv.square));
      CHECK(breaker.subset_of(li.interiors));
      char chosen = GadgetSpec::chosen_out_role(cls, key);
      const auto& pq = li.role_joints.at(chosen);
      SquareSet pair = SquareSet::of({pq[0], pq[1]});
      CHECK(pair.subset_of(maker));
      CHECK((maker - pair).subset_of(li.interiors));
    }
  }
}
