#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "hiperm/bitstring.hpp"

namespace hiperm {

/// One answered query of a guessing history.
struct TranscriptEntry {
  BitString query;
  int score = 0;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

/// Ordered guessing history over instances of size n.
struct Transcript {
  std::size_t n = 0;
  std::vector<TranscriptEntry> entries;

  /// Appends after checking length and score range; throws DimensionError.
  void append(BitString query, int score);
  std::size_t size() const noexcept { return entries.size(); }

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

// JSON Lines, one {"q": "0101...", "s": 2} object per query.
void write_jsonl(std::ostream& out, const Transcript& t);
/// Reads a transcript. n is taken from the first line unless expected_n != 0;
/// an empty stream needs expected_n. Throws ParseError with the line number.
Transcript read_jsonl(std::istream& in, std::size_t expected_n = 0);

Transcript load_transcript(const std::string& path, std::size_t expected_n = 0);
void save_transcript(const std::string& path, const Transcript& t);

}  // namespace hiperm
