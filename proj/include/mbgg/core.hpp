#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mbgg {

// Squares are interned names; a game never has more than kMaxSquares of them.
constexpr int kMaxSquares = 192;

using SquareId = int;

// Fixed-width bitset over square ids. Cheap to copy, hashable, totally
// ordered by the id order (which SquareTable keeps lexicographic).
class SquareSet {
 public:
  SquareSet() = default;

  static SquareSet of(std::initializer_list<SquareId> ids) {
    SquareSet s;
    for (SquareId i : ids) s.insert(i);
    return s;
  }

  void insert(SquareId i) { w_[word(i)] |= bit(i); }
  void erase(SquareId i) { w_[word(i)] &= ~bit(i); }
  bool contains(SquareId i) const { return (w_[word(i)] & bit(i)) != 0; }

  int count() const {
    int n = 0;
    for (auto w : w_) n += __builtin_popcountll(w);
    return n;
  }
  bool empty() const {
    for (auto w : w_)
      if (w) return false;
    return true;
  }

  bool intersects(const SquareSet& o) const {
    for (size_t k = 0; k < w_.size(); ++k)
      if (w_[k] & o.w_[k]) return true;
    return false;
  }
  bool subset_of(const SquareSet& o) const {
    for (size_t k = 0; k < w_.size(); ++k)
      if (w_[k] & ~o.w_[k]) return false;
    return true;
  }

  SquareSet operator|(const SquareSet& o) const {
    SquareSet r;
    for (size_t k = 0; k < w_.size(); ++k) r.w_[k] = w_[k] | o.w_[k];
    return r;
  }
  SquareSet operator&(const SquareSet& o) const {
    SquareSet r;
    for (size_t k = 0; k < w_.size(); ++k) r.w_[k] = w_[k] & o.w_[k];
    return r;
  }
  SquareSet operator-(const SquareSet& o) const {
    SquareSet r;
    for (size_t k = 0; k < w_.size(); ++k) r.w_[k] = w_[k] & ~o.w_[k];
    return r;
  }
  bool operator==(const SquareSet& o) const { return w_ == o.w_; }
  bool operator!=(const SquareSet& o) const { return !(*this == o); }
  bool operator<(const SquareSet& o) const { return w_ < o.w_; }

  // Lowest set id, or -1 when empty.
  SquareId first() const {
    for (size_t k = 0; k < w_.size(); ++k)
      if (w_[k]) return static_cast<int>(k) * 64 + __builtin_ctzll(w_[k]);
    return -1;
  }

  std::vector<SquareId> to_vector() const {
    std::vector<SquareId> v;
    for (size_t k = 0; k < w_.size(); ++k) {
      uint64_t w = w_[k];
      while (w) {
        v.push_back(static_cast<int>(k) * 64 + __builtin_ctzll(w));
        w &= w - 1;
      }
    }
    return v;
  }

  size_t hash() const {
    uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto w : w_) h = (h ^ w) * 0x100000001b3ull;
    return static_cast<size_t>(h);
  }

 private:
  static size_t word(SquareId i) { return static_cast<size_t>(i) / 64; }
  static uint64_t bit(SquareId i) { return 1ull << (static_cast<size_t>(i) % 64); }
  std::array<uint64_t, kMaxSquares / 64> w_{};
};

// Name interning. Ids follow insertion order; Hypergraph::canonicalized()
// remaps them to lexicographic name order so serialized output is stable.
class SquareTable {
 public:
  SquareId intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    if (static_cast<int>(names_.size()) >= kMaxSquares)
      throw std::length_error("too many squares (limit " + std::to_string(kMaxSquares) + ")");
    names_.push_back(name);
    SquareId id = static_cast<int>(names_.size()) - 1;
    index_.emplace(name, id);
    return id;
  }
  std::optional<SquareId> lookup(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const std::string& name(SquareId i) const { return names_.at(static_cast<size_t>(i)); }
  int size() const { return static_cast<int>(names_.size()); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, SquareId> index_;
};

using SquareTablePtr = std::shared_ptr<SquareTable>;

enum class Turn : uint8_t { maker, breaker };

inline Turn other(Turn t) { return t == Turn::maker ? Turn::breaker : Turn::maker; }
inline const char* to_string(Turn t) { return t == Turn::maker ? "maker" : "breaker"; }

struct Hypergraph {
  SquareTablePtr table;
  SquareSet squares;
  std::vector<SquareSet> combos;  // deduped; sorted for canonical output

  // Sorts and dedupes combos; checks combo ⊆ squares.
  void normalize();
  std::string square_name(SquareId i) const { return table->name(i); }
};

struct GameSpec {
  Hypergraph h;
  Turn to_move = Turn::maker;
};

struct Position {
  Hypergraph h;
  SquareSet maker_set;
  SquareSet breaker_set;
  Turn to_move = Turn::maker;

  SquareSet claimed() const { return maker_set | breaker_set; }
};

// Pairwise disjoint two-element square sets.
struct Pairing {
  std::vector<std::array<SquareId, 2>> pairs;  // each pair sorted, list sorted

  void add(SquareId a, SquareId b);
  bool covers(SquareId s) const;
  SquareSet covered() const;
  // Throws std::invalid_argument if two pairs overlap.
  void check_disjoint() const;
  void normalize();
  bool operator==(const Pairing& o) const { return pairs == o.pairs; }
};

struct MateInTwo {
  SquareId pivot;
  SquareSet wings;
  bool operator==(const MateInTwo& o) const { return pivot == o.pivot && wings == o.wings; }
};

// --- operations ---

// max |F|; 0 when there are no combos.
int rank(const Hypergraph& h);

// combo must be one of p.hypergraph's combos.
bool is_broken(const SquareSet& combo, const Position& p);

// The game (X\(X_M∪X_B), {F\X_M : F unbroken}, t). Empty residual combos
// (Maker already won) are kept.
GameSpec reduce_position(const Position& p);

bool maker_has_won(const GameSpec& g);
bool maker_has_won(const Position& p);

// Squares p with {p} ∈ combos.
SquareSet detect_mate_in_one(const GameSpec& g);

// All (p,{q,r}) with {p,q},{p,r} ∈ combos, p,q,r pairwise distinct.
std::vector<MateInTwo> detect_mate_in_two(const GameSpec& g);

bool pairing_blocks(const Pairing& c, const SquareSet& combo);
bool is_complete_pairing(const Pairing& c, const GameSpec& g);

// Partner of maker_move if its pair exists and the partner is unclaimed;
// nullopt = free choice.
std::optional<SquareId> pairing_strategy_reply(const Pairing& c, SquareId maker_move,
                                               const SquareSet& claimed);

SquareSet legal_moves(const Position& p);
Position apply_move(const Position& p, SquareId s);

std::vector<Hypergraph> connected_components(const Hypergraph& h);

// |maker|-|breaker| ∈ {0,1}, disjointness, containment. Not enforced by
// constructors: artificial positions are legitimate inputs elsewhere.
bool validate_position(const Position& p, std::string* why = nullptr);

// Rebuild with ids in lexicographic name order (used before serializing).
GameSpec canonicalized(const GameSpec& g);

}  // namespace mbgg
