#pragma once

#include <iosfwd>
#include <string>

#include "mbgg/core.hpp"
#include "mbgg/geography.hpp"

namespace mbgg {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// MBH: line-oriented Maker-Breaker game files.
//   turn maker|breaker
//   combo <sq> <sq> ...
//   maker <sq> ...      (optional pre-claimed squares)
//   breaker <sq> ...    (optional)
//   square <sq> ...     (optional isolated squares)
// '#' starts a comment; square set = declared ∪ mentioned.
Position parse_mbh(std::istream& is, const std::string& source = "<mbh>");
Position parse_mbh_file(const std::string& path);
void write_mbh(std::ostream& os, const Position& p);
std::string to_mbh(const Position& p);

// GG: start <vertex> / edge <from> <to>, '#' comments.
GGInstance parse_gg(std::istream& is, const std::string& source = "<gg>");
GGInstance parse_gg_file(const std::string& path);
void write_gg(std::ostream& os, const GGInstance& inst);
std::string to_gg(const GGInstance& inst);

}  // namespace mbgg
