#include "ffvc/harness.hpp"
#include "ffvc/prism.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace ffvc;

TEST(PrismFormula, Examples) {
  const auto p = FieldParams::make(3, 2, 1);
  const auto g = build_full_graph(p);
  EXPECT_EQ(count_prisms_formula(g, 2), 72);
  EXPECT_EQ(count_prisms_formula(g, 1), two_path_counts(g).off_diagonal_sum());
  const std::vector<Point> edge{{0, 0}, {1, 0}};
  EXPECT_EQ(count_prisms_formula(build_graph(PointSet::from_points(p, edge), p), 1), 0);
  EXPECT_EQ(count_prisms_formula(g, 3), 0);
}

TEST(PrismFormula, MatchesNaiveEnumeration) {
  for (Residue q : {3u, 5u}) {
    const auto p = FieldParams::make(q, 2, 1);
    for (int s = -1; s < 10; ++s) {
      const PointSet E = s < 0 ? PointSet::full(p) : sample_subset(p, 3 + static_cast<std::uint64_t>(s) * p.space_size() / 12, 300 + static_cast<std::uint64_t>(s));
      const auto g = build_graph(E, p);
      for (int n = 1; n <= 2; ++n) {
        const std::uint64_t naive = oracle::prism_count(E.indices(), n, p);
        ASSERT_EQ(count_prisms_formula(g, static_cast<unsigned>(n)), naive) << "q=" << q << " set " << s << " n " << n;
        ASSERT_EQ(for_each_prism(g, static_cast<unsigned>(n), PrismFilter::nondegenerate, ~std::uint64_t{0}, [](const Prism&) { return true; }), naive);
      }
    }
  }
}

TEST(EnumeratePrisms, FullF3AndLimit) {
  const auto p = FieldParams::make(3, 2, 1);
  const auto g = build_full_graph(p);
  const auto all = enumerate_prisms(g, 2, PrismFilter::nondegenerate, 1000);
  ASSERT_EQ(all.size(), 72u);
  for (const auto& P : all) {
    EXPECT_EQ(classify_prism(P, p), PrismClass::affinely_nondegenerate);
    EXPECT_TRUE(oracle::at_t(P.y, P.center[0], p));
  }
  EXPECT_EQ(enumerate_prisms(g, 2, PrismFilter::affinely_nondegenerate, 1000).size(), 72u);
  const auto first5 = enumerate_prisms(g, 2, PrismFilter::nondegenerate, 5);
  ASSERT_EQ(first5.size(), 5u);
  EXPECT_TRUE(std::equal(first5.begin(), first5.end(), all.begin()));
  EXPECT_EQ(enumerate_prisms(g, 2, PrismFilter::nondegenerate, 5), first5);
  EXPECT_TRUE(enumerate_prisms(g, 3, PrismFilter::nondegenerate, 1000).empty());
}

TEST(ClassifyPrism, Cases) {
  const auto p = FieldParams::make(3, 2, 1);
  const Index y = point_index({0, 0}, p), z = point_index({1, 1}, p);
  const Index a = point_index({1, 0}, p), b = point_index({0, 1}, p);
  EXPECT_EQ(classify_prism({y, z, {a, b}}, p), PrismClass::affinely_nondegenerate);
  EXPECT_EQ(classify_prism({y, z, {a, a}}, p), PrismClass::degenerate);
  EXPECT_EQ(classify_prism({y, y, {a, b}}, p), PrismClass::degenerate);
  EXPECT_THROW(classify_prism({y, z, {a, point_index({2, 2}, p)}}, p), InvalidArgument);
}

TEST(ClassifyPrism, AffinelyDegenerateInDimensionFour) {
  const auto p = FieldParams::make(5, 4, 1);
  const auto g = build_full_graph(p);
  std::optional<Prism> found;
  for_each_prism(g, 4, PrismFilter::nondegenerate, ~std::uint64_t{0}, [&](const Prism& P) {
    if (classify_prism(P, p) == PrismClass::nondegenerate) {
      found = P;
      return false;
    }
    return true;
  });
  ASSERT_TRUE(found.has_value());
  EXPECT_LT(affine_rank(found->center_points(p), p), 3 + 1);
  EXPECT_FALSE(affinely_independent(found->center_points(p), p));
}

TEST(AffineFraction, Cases) {
  const auto p3 = FieldParams::make(3, 2, 1);
  const auto f = affinely_nondegenerate_fraction(build_full_graph(p3));
  EXPECT_TRUE(f.exact);
  EXPECT_EQ(f.ratio, 1.0);
  EXPECT_EQ(f.nondegenerate, 72);

  EXPECT_THROW(affinely_nondegenerate_fraction(build_full_graph(FieldParams::make(3, 3, 1))), InvalidArgument);

  const auto p4 = FieldParams::make(5, 4, 1);
  AffineFractionOptions opt;
  opt.exact_limit = 0;
  opt.samples = 4000;
  opt.seed = 11;
  const auto s = affinely_nondegenerate_fraction(build_full_graph(p4), opt);
  EXPECT_FALSE(s.exact);
  EXPECT_EQ(s.samples, 4000u);
  EXPECT_GT(s.ratio, 0.0);
  EXPECT_LE(s.ratio, 1.0);
}

TEST(AffineFraction, ExactMatchesClassification) {
  const auto p = FieldParams::make(3, 3, 2);
  const auto g = build_full_graph(p);
  std::uint64_t an = 0, all = 0;
  for_each_prism(g, 3, PrismFilter::nondegenerate, ~std::uint64_t{0}, [&](const Prism& P) {
    ++all;
    an += classify_prism(P, p) == PrismClass::affinely_nondegenerate;
    return true;
  });
  const auto f = affinely_nondegenerate_fraction(g);
  EXPECT_EQ(f.nondegenerate, all);
  EXPECT_EQ(f.affinely_nondegenerate, an);
  EXPECT_EQ(for_each_prism(g, 3, PrismFilter::affinely_nondegenerate, ~std::uint64_t{0}, [](const Prism&) { return true; }), an);
}

TEST(AffineFraction, DimensionThree) {
  // Without isotropic lines on the sphere every 3-prism is affinely
  // nondegenerate; with them, collinear centers appear.
  for (Residue t : {2u, 3u}) EXPECT_EQ(affinely_nondegenerate_fraction(build_full_graph(FieldParams::make(5, 3, t))).ratio, 1.0);
  const auto f = affinely_nondegenerate_fraction(build_full_graph(FieldParams::make(5, 3, 1)));
  EXPECT_EQ(f.nondegenerate, 4740000);
  EXPECT_EQ(f.affinely_nondegenerate, 3930000);
}

TEST(BadSets, MatchOracleOnFullF3) {
  const auto p = FieldParams::make(3, 2, 1);
  const SphereCache cache(p);
  const auto g = build_full_graph(p);
  std::size_t n = 0;
  for_each_prism(g, 2, PrismFilter::nondegenerate, ~std::uint64_t{0}, [&](const Prism& P) {
    ++n;
    EXPECT_EQ(find_bad_sets(P, cache).bad_masks, oracle::bad_masks(P, p));
    return true;
  });
  EXPECT_EQ(n, 72u);
}

TEST(BadSets, MatchOracleOnSampledF5Cube) {
  for (Residue t : {1u, 2u}) {
    const auto p = FieldParams::make(5, 3, t);
    const SphereCache cache(p);
    const auto g = build_full_graph(p);
    Rng rng = make_rng(t);
    int checked = 0;
    while (checked < 40) {
      const auto y = static_cast<VertexId>(uniform_below(rng, g.order()));
      const auto z = static_cast<VertexId>(uniform_below(rng, g.order()));
      auto pool = g.common_neighbor_list(y, z);
      if (y == z || pool.size() < 3) continue;
      Prism P{g.point_of(y), g.point_of(z), {}};
      for (std::size_t i = 0; i < 3; ++i) {
        std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
        P.center.push_back(g.point_of(pool[i]));
      }
      const auto rep = find_bad_sets(P, cache);
      ASSERT_EQ(rep.bad_masks, oracle::bad_masks(P, p));
      for (const auto& s : rep.subsets) ASSERT_EQ(s.pole_count, cache.poles(s.members).size());
      ++checked;
    }
  }
}

TEST(BadSets, CollinearCenterIsBad) {
  // Three collinear centers on an isotropic line inside S_1 + tail: any pair
  // of them has the whole line's poles, which the third also sees.
  const auto p = FieldParams::make(5, 3, 1);
  const Prism P{point_index({0, 0, 0}, p), point_index({0, 0, 2}, p),
                {point_index({0, 0, 1}, p), point_index({1, 2, 1}, p), point_index({2, 4, 1}, p)}};
  ASSERT_EQ(classify_prism(P, p), PrismClass::nondegenerate);
  const auto rep = find_bad_sets(P, p);
  EXPECT_TRUE(rep.admits_bad_set());
  EXPECT_EQ(rep.bad_masks, oracle::bad_masks(P, p));
}

TEST(BadSets, RequiresNondegeneratePrism) {
  const auto p = FieldParams::make(3, 2, 1);
  const Index y = point_index({0, 0}, p), z = point_index({1, 1}, p), a = point_index({1, 0}, p);
  EXPECT_THROW(find_bad_sets({y, z, {a, a}}, p), InvalidArgument);
}

TEST(BadSets, CleanPrismsExist) {
  const auto p = FieldParams::make(5, 2, 1);
  const auto g = build_full_graph(p);
  std::vector<Prism> clean;
  prisms_admitting_no_bad_set(g, PrismFilter::affinely_nondegenerate, 3, [&](const Prism& P) {
    clean.push_back(P);
    return true;
  });
  ASSERT_EQ(clean.size(), 3u);
  for (const auto& P : clean) EXPECT_TRUE(oracle::bad_masks(P, p).empty());
}

TEST(Census, SinglePointMatchesEnumeration) {
  const auto p = FieldParams::make(3, 2, 1);
  const auto g = build_full_graph(p);
  for (Index b = 0; b < p.space_size(); ++b) {
    std::uint64_t brute = 0;
    for_each_prism(g, 2, PrismFilter::affinely_nondegenerate, ~std::uint64_t{0}, [&](const Prism& P) {
      for (std::size_t i = 0; i < P.center.size(); ++i)
        if (P.center[i] == b) {
          const auto masks = oracle::bad_masks(P, p);
          brute += std::find(masks.begin(), masks.end(), std::uint64_t{1} << i) != masks.end();
        }
      return true;
    });
    const std::vector<Index> B{b};
    const auto c = bad_prism_census(g, B);
    EXPECT_EQ(c.count, brute);
    EXPECT_EQ(c.k, 1);
    EXPECT_EQ(c.pole_count, 4u);
  }
}

TEST(Census, AgreesWithSweepInFourDimensions) {
  const auto p = FieldParams::make(3, 4, 1);
  const auto g = build_full_graph(p);
  const std::vector<Index> B{point_index({0, 0, 0, 0}, p), point_index({0, 0, 0, 1}, p), point_index({0, 0, 1, 0}, p)};
  const auto c = bad_prism_census(g, B);
  // Count ordered prisms directly: tails from the poles of B, one more center.
  const SphereCache cache(p);
  const auto tails = cache.poles(B).indices();
  std::uint64_t direct = 0;
  for (Index y : tails)
    for (Index z : tails) {
      if (y == z) continue;
      for (Index x = 0; x < p.space_size(); ++x) {
        if (std::find(B.begin(), B.end(), x) != B.end() || x == y || x == z) continue;
        if (!oracle::at_t(x, y, p) || !oracle::at_t(x, z, p)) continue;
        const Prism P{y, z, {B[0], B[1], B[2], x}};
        if (classify_prism(P, p) != PrismClass::affinely_nondegenerate) continue;
        const auto masks = oracle::bad_masks(P, p);
        direct += std::find(masks.begin(), masks.end(), std::uint64_t{0b0111}) != masks.end();
      }
    }
  EXPECT_EQ(c.count, Count(direct) * 24);
  EXPECT_EQ(c.max_pole_bound, 2);
}

TEST(Census, EmptyWhenNoPrismContainsB) {
  const auto p = FieldParams::make(5, 2, 1);
  PointSet E(p);
  E.insert(0);
  E.insert(1);
  const auto g = build_graph(E, p);
  const std::vector<Index> B{0};
  EXPECT_EQ(bad_prism_census(g, B).count, 0);
  EXPECT_THROW(bad_prism_census(g, std::vector<Index>{}), InvalidArgument);
  EXPECT_THROW(bad_prism_census(g, std::vector<Index>{0, 1}), InvalidArgument);
}

TEST(GreedyPoles, ExtendsTailWhenPolesAreMany) {
  // For every bad set B with |Pole(B)| > 2 q^{a-1} and tail pair inside
  // Pole(B), greedy extension finds a poles with J ∪ {y, z} independent.
  const auto p = FieldParams::make(3, 4, 1);
  const SphereCache cache(p);
  const auto g = build_full_graph(p);
  std::uint64_t exercised = 0;
  for_each_prism(g, 4, PrismFilter::affinely_nondegenerate, 20000, [&](const Prism& P) {
    for (const auto& s : find_bad_sets(P, cache).subsets) {
      if (!s.bad) continue;
      const auto pole = cache.poles(s.members).indices();
      for (int a = 1; a + 2 <= p.d + 1; ++a) {
        if (Count(pole.size()) <= 2 * ipow(p.q, static_cast<unsigned>(a - 1))) continue;
        for (std::size_t i = 0; i < pole.size(); ++i)
          for (std::size_t j = i + 1; j < pole.size(); ++j) {
            const auto J = greedy_independent_poles(pole, pole[i], pole[j], a, p);
            ++exercised;
            EXPECT_TRUE(J.has_value());
            if (!J) continue;
            std::vector<Point> pts{index_point(pole[i], p), index_point(pole[j], p)};
            for (Index x : *J) pts.push_back(index_point(x, p));
            EXPECT_TRUE(affinely_independent(pts, p));
          }
      }
    }
    return true;
  });
  EXPECT_GT(exercised, 0u);
}
