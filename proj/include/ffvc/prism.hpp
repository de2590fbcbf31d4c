#pragma once

// n-prisms (y, z, x^1..x^n): every center point x^i is at distance t from
// both tail points. Tails and centers are ordered in every count here, so
// one unordered configuration contributes 2 * n! prisms.

#include "ffvc/count.hpp"
#include "ffvc/field.hpp"
#include "ffvc/geometry.hpp"
#include "ffvc/graph.hpp"
#include "ffvc/parallel.hpp"
#include "ffvc/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ffvc {

struct Prism {
  Index y = 0;
  Index z = 0;
  std::vector<Index> center;

  std::size_t n() const { return center.size(); }
  std::vector<Point> center_points(const FieldParams& params) const {
    std::vector<Point> pts;
    pts.reserve(center.size());
    for (Index c : center) pts.push_back(index_point(c, params));
    return pts;
  }
  friend bool operator==(const Prism&, const Prism&) = default;
};

enum class PrismClass { degenerate, nondegenerate, affinely_nondegenerate };
enum class PrismFilter { nondegenerate, affinely_nondegenerate };

inline const char* to_string(PrismClass c) {
  switch (c) {
    case PrismClass::degenerate: return "degenerate";
    case PrismClass::nondegenerate: return "nondegenerate";
    case PrismClass::affinely_nondegenerate: return "affinely_nondegenerate";
  }
  return "?";
}

/// Throws InvalidArgument if some center point is not at distance t from
/// both tail points.
inline PrismClass classify_prism(const Prism& P, const FieldParams& params) {
  const Point y = index_point(P.y, params), z = index_point(P.z, params);
  const auto pts = P.center_points(params);
  for (const auto& x : pts)
    if (distance(x, y, params) != params.t || distance(x, z, params) != params.t)
      throw InvalidArgument("not a prism: center point " + x.to_string() + " is not at distance t from the tail");
  std::vector<Index> all = P.center;
  all.push_back(P.y);
  all.push_back(P.z);
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) return PrismClass::degenerate;
  if (pts.empty() || affinely_independent(pts, params)) return PrismClass::affinely_nondegenerate;
  return PrismClass::nondegenerate;
}

/// Σ_{x != y} k_{(x,y)} (k_{(x,y)} - 1) ... (k_{(x,y)} - n + 1): the number of
/// non-degenerate n-prisms with ordered tail and ordered center.
inline Count count_prisms_formula(const PairPathCounts& k, unsigned n) {
  const std::size_t order = k.order();
  std::vector<Count> rows(order);
  parallel_for(order, [&](std::size_t x) {
    Count s = 0;
    for (std::size_t y = 0; y < order; ++y)
      if (x != y) s += falling_factorial(k.at(static_cast<VertexId>(x), static_cast<VertexId>(y)), n);
    rows[x] = std::move(s);
  });
  Count total = 0;
  for (const auto& r : rows) total += r;
  return total;
}

inline Count count_prisms_formula(const DistanceGraph& g, unsigned n) { return count_prisms_formula(two_path_counts(g), n); }

namespace detail {

// Ordered n-tuples of distinct entries of `pool` in lexicographic order.
// Visitor returns false to stop; returns false if stopped.
template <class F>
bool for_each_arrangement(const std::vector<VertexId>& pool, std::size_t n, const DistanceGraph& g, bool require_independent,
                          std::vector<Index>& tuple, std::vector<Point>& points, std::vector<bool>& used, F& visit) {
  if (tuple.size() == n) return visit(static_cast<const std::vector<Index>&>(tuple));
  const auto& params = g.params();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (used[i]) continue;
    const Index idx = g.point_of(pool[i]);
    points.push_back(index_point(idx, params));
    if (require_independent && !affinely_independent(points, params)) {
      points.pop_back();
      continue;
    }
    used[i] = true;
    tuple.push_back(idx);
    const bool go_on = for_each_arrangement(pool, n, g, require_independent, tuple, points, used, visit);
    tuple.pop_back();
    points.pop_back();
    used[i] = false;
    if (!go_on) return false;
  }
  return true;
}

// Unordered n-subsets of `pool` (ascending), optionally pruned to affinely
// independent prefixes.
template <class F>
void for_each_combination(const std::vector<Point>& pool, std::size_t n, const FieldParams& params, bool require_independent,
                          std::size_t start, std::vector<std::size_t>& chosen, std::vector<Point>& points, F& visit) {
  if (chosen.size() == n) {
    visit(static_cast<const std::vector<std::size_t>&>(chosen));
    return;
  }
  for (std::size_t i = start; i + (n - chosen.size()) <= pool.size(); ++i) {
    points.push_back(pool[i]);
    if (!require_independent || affinely_independent(points, params)) {
      chosen.push_back(i);
      for_each_combination(pool, n, params, require_independent, i + 1, chosen, points, visit);
      chosen.pop_back();
    }
    points.pop_back();
  }
}

}  // namespace detail

/// Visits non-degenerate n-prisms of G in index-lexicographic order of
/// (y, z, x^1, ..., x^n). `visit(const Prism&)` returns false to stop early.
/// Returns the number of prisms visited; at most `limit`.
template <class F>
std::uint64_t for_each_prism(const DistanceGraph& g, unsigned n, PrismFilter filter, std::uint64_t limit, F&& visit) {
  std::uint64_t seen = 0;
  if (limit == 0 || n == 0) return 0;
  const bool affine = filter == PrismFilter::affinely_nondegenerate;
  Prism P;
  std::vector<Index> tuple;
  std::vector<Point> points;
  bool stopped = false;
  auto on_tuple = [&](const std::vector<Index>& center) {
    P.center = center;
    ++seen;
    if (!visit(static_cast<const Prism&>(P))) stopped = true;
    return !stopped && seen < limit;
  };
  for (VertexId y = 0; y < g.order(); ++y) {
    for (VertexId z = 0; z < g.order(); ++z) {
      if (y == z) continue;
      const auto pool = g.common_neighbor_list(y, z);
      if (pool.size() < n) continue;
      P.y = g.point_of(y);
      P.z = g.point_of(z);
      std::vector<bool> used(pool.size(), false);
      if (!detail::for_each_arrangement(pool, n, g, affine, tuple, points, used, on_tuple)) return seen;
    }
  }
  return seen;
}

inline std::vector<Prism> enumerate_prisms(const DistanceGraph& g, unsigned n, PrismFilter filter, std::uint64_t limit) {
  std::vector<Prism> out;
  for_each_prism(g, n, filter, limit, [&](const Prism& P) {
    out.push_back(P);
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------

struct AffineFraction {
  Count nondegenerate;           // N_d(E); exact in both modes
  Count affinely_nondegenerate;  // N'_d(E); exact mode only
  double ratio = 0;
  bool exact = false;
  std::uint64_t samples = 0;
  std::uint64_t sampled_hits = 0;
};

struct AffineFractionOptions {
  // Enumerate exactly when N_d(E) is at most this many prisms.
  std::uint64_t exact_limit = 20'000'000;
  std::uint64_t samples = 20'000;
  std::uint64_t seed = 1;
};

/// N'_d(E) / N_d(E) over d-prisms of G. Throws if there are no prisms.
inline AffineFraction affinely_nondegenerate_fraction(const DistanceGraph& g, const AffineFractionOptions& opt = {}) {
  const auto& params = g.params();
  const unsigned n = static_cast<unsigned>(params.d);
  const auto k = two_path_counts(g);
  AffineFraction r;
  r.nondegenerate = count_prisms_formula(k, n);
  if (r.nondegenerate == 0) throw InvalidArgument("affinely nondegenerate fraction undefined: no nondegenerate prisms");
  const std::uint64_t orderings = factorial_u64(n);
  const std::size_t order = g.order();

  if (r.nondegenerate <= opt.exact_limit) {
    std::vector<std::uint64_t> per_y(order, 0);
    parallel_for(order, [&](std::size_t y) {
      std::uint64_t hits = 0;
      for (VertexId z = 0; z < order; ++z) {
        if (z == y) continue;
        const auto pool_ids = g.common_neighbor_list(static_cast<VertexId>(y), z);
        if (pool_ids.size() < n) continue;
        std::vector<Point> pool;
        for (auto v : pool_ids) pool.push_back(index_point(g.point_of(v), params));
        std::vector<std::size_t> chosen;
        std::vector<Point> pts;
        auto count = [&](const std::vector<std::size_t>&) { ++hits; };
        detail::for_each_combination(pool, n, params, true, 0, chosen, pts, count);
      }
      per_y[y] = hits;
    });
    Count combos = 0;
    for (auto h : per_y) combos += h;
    r.affinely_nondegenerate = combos * orderings;
    r.ratio = static_cast<double>(to_long_double(r.affinely_nondegenerate) / to_long_double(r.nondegenerate));
    r.exact = true;
    return r;
  }

  // Weighted tail choice, then a uniform n-subset of the common neighbors.
  std::vector<std::uint64_t> cumulative;
  std::vector<std::pair<VertexId, VertexId>> pairs;
  std::uint64_t total = 0;
  for (VertexId y = 0; y < order; ++y)
    for (VertexId z = 0; z < order; ++z) {
      if (y == z) continue;
      const Count w = falling_factorial(k.at(y, z), n);
      if (w == 0) continue;
      const Count next = Count(total) + w;
      if (!fits_u64(next)) throw InvalidArgument("prism weights overflow 64 bits; instance too large to sample");
      total = next.convert_to<std::uint64_t>();
      cumulative.push_back(total);
      pairs.emplace_back(y, z);
    }
  Rng rng = make_rng(derive_seed(opt.seed, {0xaf}));
  for (std::uint64_t s = 0; s < opt.samples; ++s) {
    const std::uint64_t r0 = uniform_below(rng, total);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r0);
    const auto [y, z] = pairs[static_cast<std::size_t>(it - cumulative.begin())];
    auto pool = g.common_neighbor_list(y, z);
    std::vector<Point> pts;
    for (unsigned i = 0; i < n; ++i) {
      const std::size_t j = i + uniform_below(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
      pts.push_back(index_point(g.point_of(pool[i]), params));
    }
    if (affinely_independent(pts, params)) ++r.sampled_hits;
  }
  r.samples = opt.samples;
  r.ratio = static_cast<double>(r.sampled_hits) / static_cast<double>(opt.samples);
  return r;
}

// ---------------------------------------------------------------------------
// Bad sets: A ⊂ C(P) is P-bad when every full-space pole of A lies on a
// sphere around some point of C(P) \ A. An empty pole set is vacuously bad.

struct SubsetPoles {
  std::uint64_t mask = 0;  // bit i set <=> center[i] ∈ A
  std::vector<Index> members;
  std::uint64_t pole_count = 0;
  bool bad = false;
};

struct BadSetReport {
  Prism prism;
  std::vector<SubsetPoles> subsets;  // every tested A, ascending mask
  std::vector<std::uint64_t> bad_masks;
  bool admits_bad_set() const { return !bad_masks.empty(); }
};

inline BadSetReport find_bad_sets(const Prism& P, const SphereCache& cache) {
  const auto& params = cache.params();
  if (classify_prism(P, params) == PrismClass::degenerate) throw InvalidArgument("find_bad_sets requires a nondegenerate prism");
  const std::size_t n = P.n();
  if (n >= 63) throw InvalidArgument("prism center too large");
  const std::size_t max_size = std::min<std::size_t>(n - 1, static_cast<std::size_t>(params.d - 1));
  std::vector<PointSet> spheres;
  for (Index c : P.center) spheres.push_back(cache.sphere(c));

  BadSetReport report{P, {}, {}};
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t mask = 1; mask < all; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size > max_size) continue;
    PointSet pole = PointSet::full(params);
    PointSet cover(params);
    SubsetPoles entry;
    entry.mask = mask;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) {
        pole &= spheres[i];
        entry.members.push_back(P.center[i]);
      } else {
        cover |= spheres[i];
      }
    }
    entry.pole_count = pole.size();
    entry.bad = pole.is_subset_of(cover);
    if (entry.bad) report.bad_masks.push_back(mask);
    report.subsets.push_back(std::move(entry));
  }
  return report;
}

inline BadSetReport find_bad_sets(const Prism& P, const FieldParams& params) { return find_bad_sets(P, SphereCache(params)); }

/// Prisms of G (n = d) whose bad-set list is empty, in canonical order.
template <class F>
std::uint64_t prisms_admitting_no_bad_set(const DistanceGraph& g, PrismFilter filter, std::uint64_t limit, F&& visit) {
  const SphereCache cache(g.params());
  std::uint64_t emitted = 0;
  if (limit == 0) return 0;
  for_each_prism(g, static_cast<unsigned>(g.params().d), filter, ~std::uint64_t{0}, [&](const Prism& P) {
    if (find_bad_sets(P, cache).admits_bad_set()) return true;
    ++emitted;
    return visit(P) && emitted < limit;
  });
  return emitted;
}

// ---------------------------------------------------------------------------

struct BadCensus {
  int k = 0;                 // |B|
  Count count;               // ordered affinely nondegenerate prisms with B ⊆ C(P), B P-bad
  Count scale;               // q^{d^2 - kd - d + k - 1}
  double empirical_constant = 0;
  std::uint64_t pole_count = 0;     // |Pole(B)| over the full space
  Count max_pole_bound;             // 2 (d - k) q^{d-k-1}
  bool max_pole_bound_checked = false;  // some bad occurrence was seen
  bool max_pole_bound_holds = true;     // |Pole(B)| < bound at every bad occurrence
};

/// Exact census by enumeration over tails drawn from Pole(B) ∩ E.
inline BadCensus bad_prism_census(const DistanceGraph& g, std::span<const Index> B_in) {
  const auto& params = g.params();
  const int d = params.d;
  std::vector<Index> B(B_in.begin(), B_in.end());
  std::sort(B.begin(), B.end());
  if (B.empty() || static_cast<int>(B.size()) > d - 1) throw InvalidArgument("census requires 1 <= |B| <= d - 1");
  if (std::adjacent_find(B.begin(), B.end()) != B.end()) throw InvalidArgument("census set B has repeated points");
  for (Index b : B)
    if (b >= params.space_size()) throw InvalidArgument("census point out of range");

  BadCensus c;
  c.k = static_cast<int>(B.size());
  const int exp = d * d - c.k * d - d + c.k - 1;
  c.scale = exp >= 0 ? ipow(params.q, static_cast<unsigned>(exp)) : Count(1);
  c.max_pole_bound = 2 * (d - c.k) * ipow(params.q, static_cast<unsigned>(d - c.k - 1));

  const SphereCache cache(params);
  const PointSet pole = cache.poles(B);
  c.pole_count = pole.size();

  bool all_in_e = true;
  for (Index b : B) all_in_e = all_in_e && g.has_point(b);
  if (!all_in_e) return c;

  std::vector<Point> b_points;
  for (Index b : B) b_points.push_back(index_point(b, params));

  // Independence and badness depend only on the completion R, not the tail.
  std::map<std::vector<Index>, bool> qualifies;
  auto check = [&](const std::vector<Index>& R) {
    auto it = qualifies.find(R);
    if (it != qualifies.end()) return it->second;
    std::vector<Point> pts = b_points;
    for (Index r : R) pts.push_back(index_point(r, params));
    bool ok = affinely_independent(pts, params);
    if (ok) {
      PointSet cover(params);
      for (Index r : R) cover |= cache.sphere(r);
      ok = pole.is_subset_of(cover);
    }
    qualifies.emplace(R, ok);
    return ok;
  };

  const unsigned rest = static_cast<unsigned>(d - c.k);
  const std::uint64_t orderings = factorial_u64(static_cast<unsigned>(d));
  std::uint64_t combos = 0;
  const auto tails = (pole & g.vertices()).indices();
  for (Index y : tails)
    for (Index z : tails) {
      if (y == z) continue;
      std::vector<Point> pool;
      std::vector<Index> pool_idx;
      for (VertexId v : g.common_neighbor_list(g.vertex_of(y), g.vertex_of(z))) {
        const Index p = g.point_of(v);
        if (std::binary_search(B.begin(), B.end(), p)) continue;
        pool_idx.push_back(p);
        pool.push_back(index_point(p, params));
      }
      std::vector<std::size_t> chosen;
      std::vector<Point> pts;
      auto visit = [&](const std::vector<std::size_t>& sel) {
        std::vector<Index> R;
        for (auto i : sel) R.push_back(pool_idx[i]);
        if (check(R)) ++combos;
      };
      detail::for_each_combination(pool, rest, params, false, 0, chosen, pts, visit);
    }
  c.count = Count(combos) * orderings;
  if (combos > 0) {
    c.max_pole_bound_checked = true;
    c.max_pole_bound_holds = Count(c.pole_count) < c.max_pole_bound;
  }
  c.empirical_constant = static_cast<double>(to_long_double(c.count) / to_long_double(c.scale));
  return c;
}

/// Greedy construction of J ⊆ poles, |J| = a, with J ∪ {y, z} affinely
/// independent: each step takes the first pole outside the current span.
inline std::optional<std::vector<Index>> greedy_independent_poles(std::span<const Index> poles_list, Index y, Index z, int a,
                                                                  const FieldParams& params) {
  std::vector<Point> pts{index_point(y, params), index_point(z, params)};
  std::vector<Index> J;
  for (int step = 0; step < a; ++step) {
    bool found = false;
    for (Index p : poles_list) {
      if (p == y || p == z || std::find(J.begin(), J.end(), p) != J.end()) continue;
      pts.push_back(index_point(p, params));
      if (affinely_independent(pts, params)) {
        J.push_back(p);
        found = true;
        break;
      }
      pts.pop_back();
    }
    if (!found) return std::nullopt;
  }
  return J;
}

}  // namespace ffvc
