#pragma once

// The distance graph G_t(E): vertices are the points of E, x ~ y whenever
// ||x - y|| = t. Vertices carry local ids 0..|E|-1 in ascending point-index
// order; adjacency is one bitset row per vertex over local ids.

#include "ffvc/count.hpp"
#include "ffvc/field.hpp"
#include "ffvc/geometry.hpp"
#include "ffvc/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace ffvc {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

class DistanceGraph {
 public:
  const FieldParams& params() const { return params_; }
  const PointSet& vertices() const { return vertices_; }
  std::size_t order() const { return ids_.size(); }

  Index point_of(VertexId v) const { return ids_[v]; }
  VertexId vertex_of(Index point) const { return local_[point]; }
  bool has_point(Index point) const { return point < local_.size() && local_[point] != kNoVertex; }

  const Bitset& neighbor_bits(VertexId v) const { return adjacency_[v]; }
  const std::vector<VertexId>& neighbors(VertexId v) const { return neighbor_lists_[v]; }
  std::size_t degree(VertexId v) const { return neighbor_lists_[v].size(); }
  bool adjacent(VertexId a, VertexId b) const { return adjacency_[a].test(b); }

  /// Undirected edge count.
  std::uint64_t edge_count() const {
    std::uint64_t s = 0;
    for (const auto& n : neighbor_lists_) s += n.size();
    return s / 2;
  }

  /// k_{(x,y)} = |N(x) ∩ N(y)|.
  std::uint32_t common_neighbors(VertexId a, VertexId b) const {
    return static_cast<std::uint32_t>(count_and(adjacency_[a], adjacency_[b]));
  }

  std::vector<VertexId> common_neighbor_list(VertexId a, VertexId b) const {
    Bitset c = adjacency_[a];
    c &= adjacency_[b];
    std::vector<VertexId> out;
    c.for_each([&](std::size_t i) { out.push_back(static_cast<VertexId>(i)); });
    return out;
  }

  friend DistanceGraph build_graph(const PointSet& E, const FieldParams& params);

 private:
  FieldParams params_;
  PointSet vertices_;
  std::vector<Index> ids_;
  std::vector<VertexId> local_;
  std::vector<Bitset> adjacency_;
  std::vector<std::vector<VertexId>> neighbor_lists_;
};

inline DistanceGraph build_graph(const PointSet& E, const FieldParams& params) {
  if (E.universe() != params.space_size()) throw InvalidArgument("point set universe does not match q^d");
  if (E.empty()) throw InvalidArgument("distance graph of an empty set");
  DistanceGraph g;
  g.params_ = params;
  g.vertices_ = E;
  g.ids_ = E.indices();
  g.local_.assign(params.space_size(), kNoVertex);
  for (VertexId v = 0; v < g.ids_.size(); ++v) g.local_[g.ids_[v]] = v;

  const auto offsets = sphere_offsets(params);
  const std::size_t n = g.ids_.size();
  g.adjacency_.assign(n, Bitset(n));
  g.neighbor_lists_.assign(n, {});
  parallel_for(n, [&](std::size_t v) {
    const Point x = index_point(g.ids_[v], params);
    auto& row = g.adjacency_[v];
    for (const auto& o : offsets) {
      const Index y = point_index(add(x, o, params), params);
      if (g.local_[y] != kNoVertex) row.set(g.local_[y]);
    }
    row.for_each([&](std::size_t u) { g.neighbor_lists_[v].push_back(static_cast<VertexId>(u)); });
  });
  return g;
}

/// Γ_k: ordered (k+1)-tuples of E with consecutive distances t, repeats
/// allowed. Computed as k sparse matrix-vector steps on walk counts.
inline Count gamma_k(const DistanceGraph& g, int k) {
  if (k < 1) throw InvalidArgument("gamma_k requires k >= 1");
  const std::size_t n = g.order();
  std::vector<Count> walks(n, Count(1)), next(n);
  for (int step = 0; step < k; ++step) {
    parallel_for(n, [&](std::size_t v) {
      Count s = 0;
      for (VertexId u : g.neighbors(static_cast<VertexId>(v))) s += walks[u];
      next[v] = std::move(s);
    });
    walks.swap(next);
  }
  Count total = 0;
  for (const auto& w : walks) total += w;
  return total;
}

/// Dense table of k_{(x,y)} over local vertex ids, diagonal included
/// (k_{(x,x)} = deg x).
class PairPathCounts {
 public:
  PairPathCounts() = default;
  explicit PairPathCounts(std::size_t n) : n_(n), k_(n * n, 0) {}

  std::size_t order() const { return n_; }
  std::uint32_t at(VertexId x, VertexId y) const { return k_[std::size_t{x} * n_ + y]; }
  std::uint32_t& at(VertexId x, VertexId y) { return k_[std::size_t{x} * n_ + y]; }

  /// Σ over ordered x != y.
  Count off_diagonal_sum() const {
    Count s = 0;
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = 0; y < n_; ++y)
        if (x != y) s += k_[x * n_ + y];
    return s;
  }

  /// Σ over all ordered pairs including x = y; equals Γ_2.
  Count total_sum() const {
    Count s = 0;
    for (auto v : k_) s += v;
    return s;
  }

  std::uint32_t max_off_diagonal() const {
    std::uint32_t m = 0;
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = 0; y < n_; ++y)
        if (x != y) m = std::max(m, k_[x * n_ + y]);
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> k_;
};

inline PairPathCounts two_path_counts(const DistanceGraph& g) {
  const std::size_t n = g.order();
  PairPathCounts counts(n);
  parallel_for(n, [&](std::size_t x) {
    for (std::size_t y = 0; y < n; ++y)
      counts.at(static_cast<VertexId>(x), static_cast<VertexId>(y)) =
          g.common_neighbors(static_cast<VertexId>(x), static_cast<VertexId>(y));
  });
  return counts;
}

/// Γ_k against |E|^{k+1}/q^k with the discrepancy allowance
/// (2k / ln 2) q^{(d+1)/2} |E|^k / q^k.
struct GammaBoundReport {
  int k = 0;
  std::uint64_t set_size = 0;
  Count gamma;
  double main_term = 0;
  double discrepancy = 0;
  double allowance = 0;
  double size_threshold = 0;  // (2k / ln 2) q^{(d+1)/2}
  bool hypothesis_met = false;
  bool within_bound = false;
};

inline GammaBoundReport gamma_bound_check(const DistanceGraph& g, int k) {
  const auto& p = g.params();
  GammaBoundReport r;
  r.k = k;
  r.set_size = g.order();
  r.gamma = gamma_k(g, k);
  const Count qk = ipow(p.q, static_cast<unsigned>(k));
  const Count scaled = r.gamma * qk - ipow(r.set_size, static_cast<unsigned>(k + 1));  // q^k D_k, exact
  const long double c = 2.0L * k / std::log(2.0L);
  const long double root = std::pow(static_cast<long double>(p.q), (p.d + 1) / 2.0L);
  const long double e_pow_k = std::pow(static_cast<long double>(r.set_size), k);
  const long double allowance_scaled = c * root * e_pow_k;  // q^k times the allowance
  const long double abs_scaled = std::fabs(to_long_double(scaled));
  const long double qk_f = to_long_double(qk);
  r.main_term = static_cast<double>(std::pow(static_cast<long double>(r.set_size), k + 1) / qk_f);
  r.discrepancy = static_cast<double>(to_long_double(scaled) / qk_f);
  r.allowance = static_cast<double>(allowance_scaled / qk_f);
  r.size_threshold = static_cast<double>(c * root);
  r.hypothesis_met = static_cast<long double>(r.set_size) > c * root;
  r.within_bound = abs_scaled <= allowance_scaled;
  return r;
}

inline DistanceGraph build_full_graph(const FieldParams& params) { return build_graph(PointSet::full(params), params); }

}  // namespace ffvc
