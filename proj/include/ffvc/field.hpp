#pragma once

// Arithmetic in F_q and F_q^d for prime q, the diagonal quadratic form
// ||x|| = x_1^2 + ... + x_d^2, and dense point sets indexed by the
// row-major radix-q encoding of coordinates.

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffvc {

using Residue = std::uint32_t;
using Index = std::uint32_t;

inline constexpr int kMaxDim = 8;
// Upper limit on q^d; dense bitsets over the whole space stay below 2 MiB.
inline constexpr std::uint64_t kMaxSpaceSize = std::uint64_t{1} << 24;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

struct FieldParams {
  Residue q = 3;
  int d = 2;
  Residue t = 1;

  /// Builds validated parameters; throws InvalidArgument otherwise.
  static FieldParams make(std::uint64_t q, int d, std::uint64_t t) {
    FieldParams p;
    if (q < 3 || q % 2 == 0 || !is_prime(q) || q > 65521)
      throw InvalidArgument("q must be an odd prime below 2^16, got " + std::to_string(q));
    if (d < 2 || d > kMaxDim)
      throw InvalidArgument("d must lie in [2, " + std::to_string(kMaxDim) + "], got " + std::to_string(d));
    std::uint64_t size = 1;
    for (int i = 0; i < d; ++i) {
      size *= q;
      if (size > kMaxSpaceSize)
        throw InvalidArgument("q^d exceeds the supported space size 2^24");
    }
    if (t % q == 0) throw InvalidArgument("t must be nonzero mod q");
    p.q = static_cast<Residue>(q);
    p.d = d;
    p.t = static_cast<Residue>(t % q);
    return p;
  }

  FieldParams with_t(std::uint64_t new_t) const { return make(q, d, new_t); }

  /// q^d, the number of points of the ambient space.
  Index space_size() const {
    Index n = 1;
    for (int i = 0; i < d; ++i) n *= q;
    return n;
  }

  friend bool operator==(const FieldParams&, const FieldParams&) = default;
};

// Residue arithmetic, canonical representatives in [0, q).
inline Residue mod_add(Residue a, Residue b, Residue q) {
  Residue s = a + b;
  return s >= q ? s - q : s;
}
inline Residue mod_sub(Residue a, Residue b, Residue q) { return a >= b ? a - b : a + q - b; }
inline Residue mod_mul(Residue a, Residue b, Residue q) {
  return static_cast<Residue>((std::uint64_t{a} * b) % q);
}
inline Residue mod_neg(Residue a, Residue q) { return a == 0 ? 0 : q - a; }
inline Residue mod_pow(Residue a, std::uint64_t e, Residue q) {
  std::uint64_t r = 1 % q, b = a % q;
  while (e) {
    if (e & 1) r = r * b % q;
    b = b * b % q;
    e >>= 1;
  }
  return static_cast<Residue>(r);
}
inline Residue mod_inv(Residue a, Residue q) {
  if (a % q == 0) throw InvalidArgument("zero has no inverse");
  return mod_pow(a, q - 2, q);
}

/// A vector of F_q^d. Coordinates are stored reduced; the dimension is fixed
/// at construction.
class Point {
 public:
  Point() = default;
  explicit Point(int dim) : dim_(dim) {
    if (dim < 0 || dim > kMaxDim) throw InvalidArgument("point dimension out of range");
  }
  Point(std::initializer_list<Residue> coords) : Point(std::span<const Residue>(coords.begin(), coords.size())) {}
  explicit Point(std::span<const Residue> coords) : Point(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), coords_.begin());
  }

  int dim() const { return dim_; }
  Residue operator[](int i) const { return coords_[i]; }
  Residue& operator[](int i) { return coords_[i]; }
  std::span<const Residue> coords() const { return {coords_.data(), static_cast<std::size_t>(dim_)}; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.dim_ == b.dim_ && std::equal(a.coords_.begin(), a.coords_.begin() + a.dim_, b.coords_.begin());
  }
  friend auto operator<=>(const Point& a, const Point& b) {
    if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.coords_.begin(), a.coords_.begin() + a.dim_,
                                                  b.coords_.begin(), b.coords_.begin() + b.dim_);
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim_; ++i) os << (i ? "," : "") << coords_[i];
    os << ')';
    return os.str();
  }

 private:
  std::array<Residue, kMaxDim> coords_{};
  int dim_ = 0;
};

inline void check_point(const Point& p, const FieldParams& params) {
  if (p.dim() != params.d) throw InvalidArgument("point " + p.to_string() + " has wrong dimension");
  for (int i = 0; i < p.dim(); ++i)
    if (p[i] >= params.q) throw InvalidArgument("coordinate out of range in " + p.to_string());
}

inline Point add(const Point& a, const Point& b, const FieldParams& params) {
  Point r(params.d);
  for (int i = 0; i < params.d; ++i) r[i] = mod_add(a[i], b[i], params.q);
  return r;
}

inline Point sub(const Point& a, const Point& b, const FieldParams& params) {
  Point r(params.d);
  for (int i = 0; i < params.d; ++i) r[i] = mod_sub(a[i], b[i], params.q);
  return r;
}

inline Point scale(Residue c, const Point& a, const FieldParams& params) {
  Point r(params.d);
  for (int i = 0; i < params.d; ++i) r[i] = mod_mul(c, a[i], params.q);
  return r;
}

/// ||p|| = sum of squared coordinates mod q.
inline Residue norm(const Point& p, const FieldParams& params) {
  std::uint64_t s = 0;
  for (int i = 0; i < params.d; ++i) s += std::uint64_t{p[i]} * p[i];
  return static_cast<Residue>(s % params.q);
}

inline Residue dot(const Point& x, const Point& y, const FieldParams& params) {
  std::uint64_t s = 0;
  for (int i = 0; i < params.d; ++i) s += std::uint64_t{x[i]} * y[i];
  return static_cast<Residue>(s % params.q);
}

/// ||x - y||, the "distance" used throughout.
inline Residue distance(const Point& x, const Point& y, const FieldParams& params) {
  std::uint64_t s = 0;
  for (int i = 0; i < params.d; ++i) {
    std::uint64_t c = mod_sub(x[i], y[i], params.q);
    s += c * c;
  }
  return static_cast<Residue>(s % params.q);
}

inline Index point_index(const Point& p, const FieldParams& params) {
  check_point(p, params);
  Index idx = 0;
  for (int i = 0; i < params.d; ++i) idx = idx * params.q + p[i];
  return idx;
}

inline Point index_point(Index idx, const FieldParams& params) {
  if (idx >= params.space_size())
    throw InvalidArgument("index " + std::to_string(idx) + " outside [0, q^d)");
  Point p(params.d);
  for (int i = params.d - 1; i >= 0; --i) {
    p[i] = idx % params.q;
    idx /= params.q;
  }
  return p;
}

/// Fixed-size dynamic bitset with word-parallel set algebra.
class Bitset {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kBits = 64;

  Bitset() = default;
  explicit Bitset(std::size_t nbits) : nbits_(nbits), words_((nbits + kBits - 1) / kBits, 0) {}

  std::size_t size() const { return nbits_; }
  std::span<const Word> words() const { return words_; }

  void set(std::size_t i) { words_[i / kBits] |= Word{1} << (i % kBits); }
  void reset(std::size_t i) { words_[i / kBits] &= ~(Word{1} << (i % kBits)); }
  bool test(std::size_t i) const { return (words_[i / kBits] >> (i % kBits)) & 1U; }

  void set_all() {
    std::fill(words_.begin(), words_.end(), ~Word{0});
    trim();
  }
  void clear() { std::fill(words_.begin(), words_.end(), 0); }

  std::size_t count() const {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool any() const {
    return std::any_of(words_.begin(), words_.end(), [](Word w) { return w != 0; });
  }
  bool none() const { return !any(); }

  Bitset& operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  Bitset& operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  Bitset& operator^=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
  }
  Bitset& and_not(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  /// popcount(a & b) without materializing the intersection.
  friend std::size_t count_and(const Bitset& a, const Bitset& b) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      c += static_cast<std::size_t>(std::popcount(a.words_[i] & b.words_[i]));
    return c;
  }

  bool is_subset_of(const Bitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      Word bits = words_[w];
      while (bits) {
        f(w * kBits + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  friend bool operator==(const Bitset&, const Bitset&) = default;

 private:
  void trim() {
    if (nbits_ % kBits && !words_.empty()) words_.back() &= (Word{1} << (nbits_ % kBits)) - 1;
  }

  std::size_t nbits_ = 0;
  std::vector<Word> words_;
};

/// A subset E of F_q^d as a membership bitset over point indices.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(Index universe) : bits_(universe) {}
  explicit PointSet(const FieldParams& params) : bits_(params.space_size()) {}

  static PointSet full(const FieldParams& params) {
    PointSet s(params);
    s.bits_.set_all();
    s.size_ = params.space_size();
    return s;
  }

  static PointSet from_indices(const FieldParams& params, std::span<const Index> indices) {
    PointSet s(params);
    for (Index i : indices) s.insert(i);
    return s;
  }

  static PointSet from_points(const FieldParams& params, std::span<const Point> points) {
    PointSet s(params);
    for (const auto& p : points) s.insert(point_index(p, params));
    return s;
  }

  Index universe() const { return static_cast<Index>(bits_.size()); }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool contains(Index i) const { return i < bits_.size() && bits_.test(i); }

  /// Returns false if already present.
  bool insert(Index i) {
    if (i >= bits_.size()) throw InvalidArgument("index outside the point-set universe");
    if (bits_.test(i)) return false;
    bits_.set(i);
    ++size_;
    return true;
  }
  bool erase(Index i) {
    if (!contains(i)) return false;
    bits_.reset(i);
    --size_;
    return true;
  }

  PointSet& operator&=(const PointSet& o) {
    bits_ &= o.bits_;
    size_ = bits_.count();
    return *this;
  }
  PointSet& operator|=(const PointSet& o) {
    bits_ |= o.bits_;
    size_ = bits_.count();
    return *this;
  }
  PointSet& subtract(const PointSet& o) {
    bits_.and_not(o.bits_);
    size_ = bits_.count();
    return *this;
  }
  friend PointSet operator&(PointSet a, const PointSet& b) { return a &= b; }
  friend PointSet operator|(PointSet a, const PointSet& b) { return a |= b; }

  bool is_subset_of(const PointSet& o) const { return bits_.is_subset_of(o.bits_); }

  const Bitset& bits() const { return bits_; }

  template <class F>
  void for_each(F&& f) const {
    bits_.for_each([&](std::size_t i) { f(static_cast<Index>(i)); });
  }

  /// Members in ascending index order.
  std::vector<Index> indices() const {
    std::vector<Index> out;
    out.reserve(size_);
    for_each([&](Index i) { out.push_back(i); });
    return out;
  }

  friend bool operator==(const PointSet& a, const PointSet& b) { return a.bits_ == b.bits_; }

 private:
  Bitset bits_;
  std::size_t size_ = 0;
};

}  // namespace ffvc
