#include "mbgg/formats.hpp"

#include <fstream>
#include <sstream>

namespace mbgg {

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

// A comment starts at a token whose first character is '#'. A '#' inside a
// token is literal: square names like "s>v#p" and "u5#0" carry one.
std::vector<Line> tokenize(std::istream& is) {
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(is, raw)) {
    ++number;
    std::istringstream ls(raw);
    Line line{number, {}};
    std::string tok;
    while (ls >> tok) {
      if (tok[0] == '#') break;
      line.tokens.push_back(tok);
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

Position parse_mbh(std::istream& is, const std::string& source) {
  auto table = std::make_shared<SquareTable>();
  SquareSet squares;
  std::vector<SquareSet> combos;
  SquareSet maker, breaker;
  std::optional<Turn> turn;

  auto square = [&](const std::string& tok) {
    SquareId id = table->intern(tok);
    squares.insert(id);
    return id;
  };

  for (const auto& line : tokenize(is)) {
    const auto& t = line.tokens;
    if (t[0] == "turn") {
      if (t.size() != 2 || (t[1] != "maker" && t[1] != "breaker"))
        fail(source, line.number, "expected 'turn maker' or 'turn breaker'");
      if (turn) fail(source, line.number, "duplicate turn line");
      turn = t[1] == "maker" ? Turn::maker : Turn::breaker;
    } else if (t[0] == "combo") {
      if (t.size() < 2) fail(source, line.number, "combo needs at least one square");
      SquareSet c;
      for (size_t i = 1; i < t.size(); ++i) c.insert(square(t[i]));
      combos.push_back(c);
    } else if (t[0] == "maker" || t[0] == "breaker" || t[0] == "square") {
      for (size_t i = 1; i < t.size(); ++i) {
        SquareId id = square(t[i]);
        if (t[0] == "maker") maker.insert(id);
        if (t[0] == "breaker") breaker.insert(id);
      }
    } else {
      fail(source, line.number, "unknown directive '" + t[0] + "'");
    }
  }
  if (!turn) throw ParseError(source + ": missing 'turn' line");
  if (maker.intersects(breaker)) throw ParseError(source + ": maker and breaker claims overlap");

  Position p;
  p.h.table = table;
  p.h.squares = squares;
  p.h.combos = std::move(combos);
  p.h.normalize();
  p.maker_set = maker;
  p.breaker_set = breaker;
  p.to_move = *turn;
  return p;
}

Position parse_mbh_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  return parse_mbh(f, path);
}

namespace {

// names in lexicographic order regardless of id order
std::vector<std::string> sorted_names(const Hypergraph& h, const SquareSet& s) {
  std::vector<std::string> names;
  for (SquareId i : s.to_vector()) names.push_back(h.table->name(i));
  std::sort(names.begin(), names.end());
  return names;
}

void write_set_line(std::ostream& os, const char* tag, const Hypergraph& h, const SquareSet& s) {
  if (s.empty()) return;
  os << tag;
  for (const auto& n : sorted_names(h, s)) os << ' ' << n;
  os << '\n';
}

}  // namespace

void write_mbh(std::ostream& os, const Position& p) {
  os << "turn " << to_string(p.to_move) << '\n';
  std::vector<std::vector<std::string>> combo_names;
  for (const auto& c : p.h.combos) combo_names.push_back(sorted_names(p.h, c));
  std::sort(combo_names.begin(), combo_names.end());
  SquareSet mentioned = p.maker_set | p.breaker_set;
  for (const auto& c : p.h.combos) mentioned = mentioned | c;
  for (const auto& c : combo_names) {
    os << "combo";
    for (const auto& n : c) os << ' ' << n;
    os << '\n';
  }
  write_set_line(os, "maker", p.h, p.maker_set);
  write_set_line(os, "breaker", p.h, p.breaker_set);
  write_set_line(os, "square", p.h, p.h.squares - mentioned);
}

std::string to_mbh(const Position& p) {
  std::ostringstream os;
  write_mbh(os, p);
  return os.str();
}

GGInstance parse_gg(std::istream& is, const std::string& source) {
  GGInstance inst;
  std::optional<std::string> start;
  for (const auto& line : tokenize(is)) {
    const auto& t = line.tokens;
    if (t[0] == "start") {
      if (t.size() != 2) fail(source, line.number, "expected 'start <vertex>'");
      if (start) fail(source, line.number, "duplicate start line");
      start = t[1];
      inst.graph.add_vertex(t[1]);
    } else if (t[0] == "edge") {
      if (t.size() != 3) fail(source, line.number, "expected 'edge <from> <to>'");
      VertexId f = inst.graph.add_vertex(t[1]);
      VertexId to = inst.graph.add_vertex(t[2]);
      try {
        inst.graph.add_arc(f, to);
      } catch (const std::invalid_argument& e) {
        fail(source, line.number, e.what());
      }
    } else {
      fail(source, line.number, "unknown directive '" + t[0] + "'");
    }
  }
  if (!start) throw ParseError(source + ": missing 'start' line");
  inst.graph.finalize();
  inst.start = *inst.graph.lookup(*start);
  if (!inst.graph.weakly_connected())
    throw ParseError(source + ": graph is not weakly connected");
  return inst;
}

GGInstance parse_gg_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  return parse_gg(f, path);
}

void write_gg(std::ostream& os, const GGInstance& inst) {
  os << "start " << inst.graph.names[inst.start] << '\n';
  std::vector<std::pair<std::string, std::string>> arcs;
  for (auto [f, t] : inst.graph.arcs) arcs.emplace_back(inst.graph.names[f], inst.graph.names[t]);
  std::sort(arcs.begin(), arcs.end());
  for (const auto& [f, t] : arcs) os << "edge " << f << ' ' << t << '\n';
}

std::string to_gg(const GGInstance& inst) {
  std::ostringstream os;
  write_gg(os, inst);
  return os.str();
}

}  // namespace mbgg
