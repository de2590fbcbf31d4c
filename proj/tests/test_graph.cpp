#include "ffvc/graph.hpp"
#include "ffvc/harness.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace ffvc;

TEST(BuildGraph, Examples) {
  const auto p = FieldParams::make(3, 2, 1);
  const auto g = build_full_graph(p);
  EXPECT_EQ(g.order(), 9u);
  for (VertexId v = 0; v < 9; ++v) EXPECT_EQ(g.degree(v), 4u);

  const std::vector<Point> edge{{0, 0}, {1, 0}};
  const auto g2 = build_graph(PointSet::from_points(p, edge), p);
  EXPECT_EQ(g2.edge_count(), 1u);
  EXPECT_TRUE(g2.adjacent(0, 1));

  const std::vector<Point> single{{0, 0}};
  EXPECT_EQ(build_graph(PointSet::from_points(p, single), p).edge_count(), 0u);
  EXPECT_THROW(build_graph(PointSet(p), p), InvalidArgument);
  EXPECT_THROW(build_graph(PointSet::full(FieldParams::make(5, 2, 1)), p), InvalidArgument);
}

TEST(BuildGraph, AdjacencyMatchesDistance) {
  for (Residue q : {3u, 5u, 7u}) {
    const auto p = FieldParams::make(q, 2, 2 % q);
    const auto E = sample_subset(p, p.space_size() / 2, q);
    const auto g = build_graph(E, p);
    for (VertexId a = 0; a < g.order(); ++a) {
      EXPECT_LE(g.degree(a), verify_sphere_size_bounds(p).entries[p.t - 1].size);
      for (VertexId b = 0; b < g.order(); ++b)
        ASSERT_EQ(g.adjacent(a, b), oracle::at_t(g.point_of(a), g.point_of(b), p));
    }
  }
}

TEST(Gamma, Examples) {
  const auto p = FieldParams::make(3, 2, 1);
  const auto g = build_full_graph(p);
  EXPECT_EQ(gamma_k(g, 1), 36);
  EXPECT_EQ(gamma_k(g, 2), 144);
  EXPECT_THROW(gamma_k(g, 0), InvalidArgument);
  const auto E = sample_subset(FieldParams::make(7, 2, 1), 20, 3);
  const auto h = build_graph(E, FieldParams::make(7, 2, 1));
  EXPECT_EQ(gamma_k(h, 1), 2 * h.edge_count());
}

TEST(Gamma, MatchesNaiveEnumeration) {
  const auto p = FieldParams::make(3, 2, 1);
  for (int s = -1; s < 20; ++s) {
    const PointSet E = s < 0 ? PointSet::full(p) : sample_subset(p, 1 + static_cast<std::uint64_t>(s) % 9, 77 + static_cast<std::uint64_t>(s));
    const auto g = build_graph(E, p);
    for (int k = 1; k <= 3; ++k) ASSERT_EQ(gamma_k(g, k), oracle::gamma(E.indices(), k, p)) << "set " << s << " k " << k;
  }
}

TEST(TwoPaths, Examples) {
  const auto p = FieldParams::make(3, 2, 1);
  const auto g = build_full_graph(p);
  const auto k = two_path_counts(g);
  auto at = [&](Point a, Point b) { return k.at(g.vertex_of(point_index(a, p)), g.vertex_of(point_index(b, p))); };
  EXPECT_EQ(at({0, 0}, {2, 0}), 1u);
  EXPECT_EQ(at({0, 0}, {1, 1}), 2u);
  EXPECT_EQ(at({0, 0}, {0, 0}), 4u);
  for (VertexId a = 0; a < 9; ++a)
    for (VertexId b = 0; b < 9; ++b) ASSERT_EQ(k.at(a, b), k.at(b, a));
}

TEST(TwoPaths, DiagonalConventionAndCommonNeighbors) {
  for (Residue q : {3u, 5u}) {
    const auto p = FieldParams::make(q, 3, 1);
    const auto g = build_full_graph(p);
    const auto k = two_path_counts(g);
    EXPECT_EQ(k.total_sum(), gamma_k(g, 2));
    for (VertexId a = 0; a < g.order(); a += 5)
      for (VertexId b = 0; b < g.order(); b += 3) {
        std::uint64_t naive = 0;
        for (VertexId m = 0; m < g.order(); ++m) naive += g.adjacent(a, m) && g.adjacent(m, b);
        ASSERT_EQ(k.at(a, b), naive);
        ASSERT_EQ(g.common_neighbors(a, b), naive);
        ASSERT_EQ(g.common_neighbor_list(a, b).size(), naive);
      }
  }
}

TEST(GammaBound, FullSpaceWithinBound) {
  for (Residue q : {3u, 5u})
    for (int d : {2, 3}) {
      const auto p = FieldParams::make(q, d, 1);
      const auto g = build_full_graph(p);
      for (int k = 1; k <= 3; ++k) {
        const auto r = gamma_bound_check(g, k);
        EXPECT_TRUE(r.within_bound) << "q=" << q << " d=" << d << " k=" << k;
        EXPECT_NEAR(r.main_term, std::pow(static_cast<double>(q), d * (k + 1) - k), 1e-6 * r.main_term);
      }
    }
  // q = 5, d = 2, k = 2: allowance (4 / ln 2) q^{3/2} |E|^2 / q^2.
  const auto p = FieldParams::make(5, 2, 1);
  const auto r = gamma_bound_check(build_full_graph(p), 2);
  EXPECT_NEAR(r.allowance, 4 / std::log(2.0) * std::pow(5.0, 1.5) * 625 / 25, 1e-6);
  EXPECT_LE(std::abs(r.discrepancy), r.allowance);
}

TEST(GammaBound, SmallSetIsHypothesisUnmet) {
  const auto p = FieldParams::make(7, 2, 1);
  const auto r = gamma_bound_check(build_graph(sample_subset(p, 10, 1), p), 2);
  EXPECT_FALSE(r.hypothesis_met);
  EXPECT_GT(r.size_threshold, 10.0);
}
