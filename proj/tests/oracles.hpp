#pragma once

// Brute-force reference implementations. Everything here works from the
// definitions with plain loops over points; no bitsets, caches or DP.

#include "ffvc/field.hpp"
#include "ffvc/prism.hpp"
#include "ffvc/vc.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace oracle {

using namespace ffvc;

inline bool at_t(Index a, Index b, const FieldParams& p) {
  return distance(index_point(a, p), index_point(b, p), p) == p.t;
}

/// Ordered (k+1)-tuples of E with consecutive entries at distance t.
inline std::uint64_t gamma(const std::vector<Index>& E, int k, const FieldParams& p) {
  std::uint64_t total = 0;
  std::vector<Index> walk;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(walk.size()) == k + 1) {
      ++total;
      return;
    }
    for (Index x : E) {
      if (!walk.empty() && !at_t(walk.back(), x, p)) continue;
      walk.push_back(x);
      self(self);
      walk.pop_back();
    }
  };
  rec(rec);
  return total;
}

/// Tuples (y, z, x_1..x_n) of pairwise distinct points of E with every x_i
/// at distance t from y and z.
inline std::uint64_t prism_count(const std::vector<Index>& E, int n, const FieldParams& p) {
  std::uint64_t total = 0;
  for (Index y : E)
    for (Index z : E) {
      if (y == z) continue;
      std::vector<Index> xs;
      auto rec = [&](auto&& self) -> void {
        if (static_cast<int>(xs.size()) == n) {
          ++total;
          return;
        }
        for (Index x : E) {
          if (x == y || x == z) continue;
          bool fresh = true;
          for (Index w : xs) fresh = fresh && w != x;
          if (!fresh || !at_t(x, y, p) || !at_t(x, z, p)) continue;
          xs.push_back(x);
          self(self);
          xs.pop_back();
        }
      };
      rec(rec);
    }
  return total;
}

/// Masks A over center positions with 1 <= |A| <= min(n, d) - 1 such that
/// every x in F_q^d at distance t from all of A is at distance t from some
/// center point outside A.
inline std::vector<std::uint64_t> bad_masks(const Prism& P, const FieldParams& p) {
  const std::size_t n = P.center.size();
  const std::size_t max_size = std::min<std::size_t>(n - 1, static_cast<std::size_t>(p.d - 1));
  std::vector<std::uint64_t> out;
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) > max_size) continue;
    bool bad = true;
    for (Index x = 0; x < p.space_size() && bad; ++x) {
      bool pole = true;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1U) pole = pole && at_t(x, P.center[i], p);
      if (!pole) continue;
      bool covered = false;
      for (std::size_t i = 0; i < n; ++i)
        if (!(mask >> i & 1U)) covered = covered || at_t(x, P.center[i], p);
      bad = covered;
    }
    if (bad) out.push_back(mask);
  }
  return out;
}

/// Distinct labelings of C realized by the class over E, by evaluating
/// every hypothesis on every point of C.
inline std::set<std::uint64_t> patterns(const std::vector<Index>& E, const std::vector<Index>& C, ClassKind kind, const FieldParams& p) {
  std::set<std::uint64_t> out;
  for (Index u : E)
    for (Index v : E) {
      if (kind == ClassKind::two_param ? u == v : u != v) continue;
      std::uint64_t m = 0;
      for (std::size_t i = 0; i < C.size(); ++i)
        if (at_t(C[i], u, p) && at_t(C[i], v, p)) m |= std::uint64_t{1} << i;
      out.insert(m);
    }
  return out;
}

inline bool shattered(const std::vector<Index>& E, const std::vector<Index>& C, ClassKind kind, const FieldParams& p) {
  return patterns(E, C, kind, p).size() == (std::uint64_t{1} << C.size());
}

}  // namespace oracle
