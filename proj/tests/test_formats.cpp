#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "common.hpp"
#include "mbgg/formats.hpp"

using namespace mbgg;
using namespace mbgg::testing;

TEST_CASE("mbh parsing") {
  std::istringstream is(
      "# a small game\n"
      "turn breaker\n"
      "combo a b c   # trailing comment\n"
      "combo b c d\n"
      "maker a\n"
      "breaker d\n"
      "square lonely\n");
  Position p = parse_mbh(is);
  CHECK(p.to_move == Turn::breaker);
  CHECK(p.h.squares.count() == 5);
  CHECK(p.h.combos.size() == 2);
  CHECK(p.maker_set == set_of(p, {"a"}));
  CHECK(p.breaker_set == set_of(p, {"d"}));
  CHECK(p.h.squares.contains(sq(p, "lonely")));
}

TEST_CASE("a hash inside a square name is literal") {
  std::istringstream is("turn maker\ncombo s>v#p s>v#q u5#0\n");
  Position p = parse_mbh(is);
  CHECK(p.h.squares.count() == 3);
  CHECK(p.h.table->lookup("s>v#p").has_value());
  CHECK(p.h.table->lookup("u5#0").has_value());
}

TEST_CASE("mbh parse errors carry line numbers") {
  std::istringstream no_turn("combo a b\n");
  CHECK_THROWS_AS(parse_mbh(no_turn), ParseError);

  std::istringstream bad_directive("turn maker\nwinning a b\n");
  try {
    parse_mbh(bad_directive, "game.mbh");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("game.mbh:2") != std::string::npos);
  }

  std::istringstream dup_turn("turn maker\nturn breaker\n");
  CHECK_THROWS_AS(parse_mbh(dup_turn), ParseError);

  std::istringstream overlap("turn maker\ncombo a b\nmaker a\nbreaker a\n");
  CHECK_THROWS_AS(parse_mbh(overlap), ParseError);

  std::istringstream empty_combo("turn maker\ncombo\n");
  CHECK_THROWS_AS(parse_mbh(empty_combo), ParseError);
}

TEST_CASE("mbh round trip is stable") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::vector<std::string>> combos;
    int ncombo = 1 + static_cast<int>(rng() % 6);
    for (int c = 0; c < ncombo; ++c) {
      std::vector<std::string> combo;
      int size = 1 + static_cast<int>(rng() % 5);
      for (int k = 0; k < size; ++k) combo.push_back("sq" + std::to_string(rng() % 12));
      std::sort(combo.begin(), combo.end());
      combo.erase(std::unique(combo.begin(), combo.end()), combo.end());
      combos.push_back(combo);
    }
    Position p = make_position(combos, {}, {}, rng() & 1 ? Turn::maker : Turn::breaker,
                               {"iso" + std::to_string(trial)});
    std::string text = to_mbh(p);
    std::istringstream is(text);
    Position q = parse_mbh(is);
    CHECK(to_mbh(q) == text);
    CHECK(names_of(q.h, q.h.squares) == names_of(p.h, p.h.squares));
    CHECK(q.h.combos.size() == p.h.combos.size());
  }
}

TEST_CASE("gg parsing and errors") {
  GGInstance e1 = gg_from_text(kE1);
  CHECK(e1.graph.vertex_count() == 3);
  CHECK(e1.graph.arc_count() == 3);
  CHECK(e1.graph.names[e1.start] == "s");

  std::istringstream no_start("edge a b\nedge b a\n");
  CHECK_THROWS_AS(parse_gg(no_start), ParseError);
  std::istringstream self_loop("start s\nedge s s\n");
  CHECK_THROWS_AS(parse_gg(self_loop), ParseError);
  std::istringstream dup("start s\nedge s v\nedge s v\n");
  CHECK_THROWS_AS(parse_gg(dup), ParseError);
  std::istringstream disconnected("start s\nedge s v\nedge a b\n");
  CHECK_THROWS_AS(parse_gg(disconnected), ParseError);
}

TEST_CASE("gg round trip") {
  for (const char* text : {kE1, kE2, kE3, kE4}) {
    GGInstance inst = gg_from_text(text);
    std::string out = to_gg(inst);
    GGInstance back = gg_from_text(out);
    CHECK(to_gg(back) == out);
    CHECK(back.graph.vertex_count() == inst.graph.vertex_count());
    CHECK(back.graph.arc_count() == inst.graph.arc_count());
  }
}
