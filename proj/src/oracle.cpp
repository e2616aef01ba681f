#include "hiperm/oracle.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "hiperm/errors.hpp"

namespace hiperm {

Permutation::Permutation(std::vector<Position> images) : images_(std::move(images)) {
  const std::size_t n = images_.size();
  std::vector<bool> seen(n + 1, false);
  for (Position p : images_) {
    if (p < 1 || p > n)
      throw DimensionError("permutation image " + std::to_string(p) + " outside [1.." +
                           std::to_string(n) + "]");
    if (seen[p]) throw DimensionError("permutation repeats image " + std::to_string(p));
    seen[p] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<Position> images(n);
  std::iota(images.begin(), images.end(), Position{1});
  return Permutation(std::move(images));
}

std::vector<Position> Permutation::inverse() const {
  std::vector<Position> inv(images_.size());
  for (std::size_t j = 0; j < images_.size(); ++j) inv[images_[j] - 1] = static_cast<Position>(j + 1);
  return inv;
}

Secret::Secret(BitString z_, Permutation pi_) : z(std::move(z_)), pi(std::move(pi_)) {
  if (z.size() == 0) throw DimensionError("secret of size 0");
  if (z.size() != pi.size())
    throw DimensionError("z has length " + std::to_string(z.size()) + " but pi has size " +
                         std::to_string(pi.size()));
}

int score(const Secret& secret, const BitString& x) {
  const std::size_t n = secret.size();
  if (x.size() != n)
    throw DimensionError("query length " + std::to_string(x.size()) + " != n = " +
                         std::to_string(n));
  std::size_t j = 0;
  while (j < n) {
    const Position p = secret.pi.image(static_cast<Position>(j + 1));
    if (x.get(p) != secret.z.get(p)) break;
    ++j;
  }
  return static_cast<int>(j);
}

Position invert_position(const Secret& secret, Position i) {
  if (i < 1 || i > secret.size())
    throw DimensionError("position " + std::to_string(i) + " outside [1.." +
                         std::to_string(secret.size()) + "]");
  BitString x = secret.z;
  x.flip(i);
  return static_cast<Position>(score(secret, x) + 1);
}

namespace {

Permutation random_permutation(std::size_t n, RandomSource& rng) {
  std::vector<Position> images(n);
  std::iota(images.begin(), images.end(), Position{1});
  rng.sample_front(std::span<Position>(images), n);
  return Permutation(std::move(images));
}

}  // namespace

Secret gen_uniform(std::size_t n, RandomSource& rng) {
  if (n == 0) throw DimensionError("n must be >= 1");
  BitString z(n);
  for (std::size_t k = 1; k <= n; ++k) z.set(static_cast<Position>(k), rng.coin());
  return Secret(std::move(z), random_permutation(n, rng));
}

Secret gen_hard(std::size_t n, RandomSource& rng) {
  if (n == 0) throw DimensionError("n must be >= 1");
  Permutation pi = random_permutation(n, rng);
  BitString z(n);
  for (std::size_t i = 1; i <= n; ++i) z.set(pi.image(static_cast<Position>(i)), i % 2 == 1);
  return Secret(std::move(z), std::move(pi));
}

Secret generate(SecretDist dist, std::size_t n, RandomSource& rng) {
  return dist == SecretDist::hard ? gen_hard(n, rng) : gen_uniform(n, rng);
}

void write_secret(std::ostream& out, const Secret& s) {
  out << s.z.to_string() << '\n';
  for (std::size_t j = 0; j < s.pi.size(); ++j) {
    if (j) out << ' ';
    out << s.pi.images()[j];
  }
  out << '\n';
}

Secret read_secret(std::istream& in) {
  std::string zline, piline;
  if (!std::getline(in, zline)) throw ParseError("missing z line", 1);
  while (!zline.empty() && (zline.back() == '\r' || zline.back() == ' ')) zline.pop_back();
  BitString z;
  try {
    z = BitString::from_string(zline);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), 1);
  }
  if (z.size() == 0) throw ParseError("empty z line", 1);
  if (!std::getline(in, piline)) throw ParseError("missing permutation line", 2);
  std::istringstream fields(piline);
  std::vector<Position> images;
  std::string tok;
  while (fields >> tok) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || v == 0 || v > z.size())
      throw ParseError("bad permutation entry '" + tok + "'", 2);
    images.push_back(static_cast<Position>(v));
  }
  if (images.size() != z.size())
    throw ParseError("permutation has " + std::to_string(images.size()) + " entries, expected " +
                         std::to_string(z.size()),
                     2);
  try {
    return Secret(std::move(z), Permutation(std::move(images)));
  } catch (const DimensionError& e) {
    throw ParseError(e.what(), 2);
  }
}

Secret load_secret(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return read_secret(in);
}

OracleHandle::OracleHandle(std::size_t n, QueryFn fn, Transcript* sink, std::size_t cap)
    : n_(n), fn_(std::move(fn)), sink_(sink), cap_(cap) {
  if (sink_ && sink_->n == 0) sink_->n = n;
}

int OracleHandle::query(const BitString& x) {
  if (x.size() != n_)
    throw DimensionError("query length " + std::to_string(x.size()) + " != n = " +
                         std::to_string(n_));
  if (cap_ && queries_ >= cap_)
    throw RunawayError("query cap of " + std::to_string(cap_) + " exceeded");
  const int s = fn_(x);
  if (s < 0 || static_cast<std::size_t>(s) > n_)
    throw InconsistencyError("oracle returned score " + std::to_string(s) + " outside [0.." +
                             std::to_string(n_) + "]");
  ++queries_;
  if (sink_) sink_->append(x, s);
  return s;
}

SecretOracle::SecretOracle(Secret secret)
    : secret_(std::move(secret)),
      rank_(secret_.pi.inverse()),
      reference_(secret_.z),
      mismatch_(secret_.z.words().size(), 0) {}

int SecretOracle::evaluate(const BitString& x) {
  const std::size_t n = secret_.size();
  if (x.size() != n) throw DimensionError("query length mismatch");
  const auto xs = x.words();
  const auto rs = reference_.words();
  for (std::size_t w = 0; w < xs.size(); ++w) {
    BitString::Word delta = xs[w] ^ rs[w];
    while (delta) {
      const std::size_t p = w * BitString::kWordBits + std::countr_zero(delta);
      const std::size_t r = rank_[p] - 1;
      mismatch_[r / BitString::kWordBits] ^= BitString::Word{1} << (r % BitString::kWordBits);
      delta &= delta - 1;
    }
  }
  reference_ = x;
  for (std::size_t w = 0; w < mismatch_.size(); ++w)
    if (mismatch_[w])
      return static_cast<int>(w * BitString::kWordBits + std::countr_zero(mismatch_[w]));
  return static_cast<int>(n);
}

OracleHandle SecretOracle::handle(Transcript* sink, std::size_t cap) {
  return OracleHandle(secret_.size(), [this](const BitString& x) { return evaluate(x); }, sink,
                      cap);
}

}  // namespace hiperm
