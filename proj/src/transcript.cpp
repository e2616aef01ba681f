#include "hiperm/transcript.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "hiperm/errors.hpp"

namespace hiperm {

void Transcript::append(BitString query, int score) {
  if (query.size() != n)
    throw DimensionError("query length " + std::to_string(query.size()) + " != n = " +
                         std::to_string(n));
  if (score < 0 || static_cast<std::size_t>(score) > n)
    throw DimensionError("score " + std::to_string(score) + " outside [0.." + std::to_string(n) +
                         "]");
  entries.push_back({std::move(query), score});
}

void write_jsonl(std::ostream& out, const Transcript& t) {
  for (const auto& e : t.entries) {
    nlohmann::json line = {{"q", e.query.to_string()}, {"s", e.score}};
    out << line.dump() << '\n';
  }
}

Transcript read_jsonl(std::istream& in, std::size_t expected_n) {
  Transcript t;
  t.n = expected_n;
  std::string line;
  std::size_t lineno = 0;
  bool sized = expected_n != 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    if (!j.is_object() || !j.contains("q") || !j.contains("s") || !j["q"].is_string() ||
        !j["s"].is_number_integer())
      throw ParseError("expected {\"q\": <0/1 string>, \"s\": <int>}", lineno);
    BitString q;
    try {
      q = BitString::from_string(j["q"].get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    if (!sized) {
      t.n = q.size();
      sized = true;
    }
    if (q.size() == 0) throw ParseError("empty query", lineno);
    try {
      t.append(std::move(q), j["s"].get<int>());
    } catch (const DimensionError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!sized) throw ParseError("empty transcript and no n given", 0);
  return t;
}

Transcript load_transcript(const std::string& path, std::size_t expected_n) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return read_jsonl(in, expected_n);
}

void save_transcript(const std::string& path, const Transcript& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_jsonl(out, t);
}

}  // namespace hiperm
