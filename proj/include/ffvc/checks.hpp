#pragma once

// Audits of the sphere-slice and pole-count bounds over exhaustive or seeded
// random instances. Each audit records the worst instance it saw so that a
// violation comes with a concrete counterexample.

#include "ffvc/count.hpp"
#include "ffvc/field.hpp"
#include "ffvc/geometry.hpp"
#include "ffvc/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ffvc {

struct BoundAudit {
  std::string name;
  FieldParams params;
  int dim = 0;  // n (slice dimension) or k (tuple size)
  std::uint64_t instances = 0;
  std::uint64_t violations = 0;
  std::uint64_t max_observed = 0;
  Count bound;  // 2 q^{n-1} for slices, 2 q^{d-k} for poles
  std::string worst;  // description of the largest instance
  std::string first_violation;
  bool ok() const { return violations == 0; }
};

namespace detail {
inline std::string describe(const Point& base, const std::vector<Point>& basis) {
  std::string s = "base " + base.to_string() + " dirs";
  for (const auto& v : basis) s += " " + v.to_string();
  return s;
}
inline std::string describe(const std::vector<Point>& pts) {
  std::string s;
  for (const auto& p : pts) s += (s.empty() ? "" : " ") + p.to_string();
  return s;
}
inline Point random_point(Rng& rng, const FieldParams& params) {
  return index_point(static_cast<Index>(uniform_below(rng, params.space_size())), params);
}
}  // namespace detail

/// Every affine line of F_q^d against |L ∩ S_t| <= 2. Directions are taken
/// with leading coordinate 1, and each line once via its smallest point.
inline BoundAudit exhaustive_line_audit(const FieldParams& params) {
  BoundAudit a{"affine-slice lines (exhaustive)", params, 1, 0, 0, 0, Count(2), {}, {}};
  std::vector<Point> directions;
  for_each_point(params, [&](Index, const Point& v) {
    int lead = 0;
    while (lead < params.d && v[lead] == 0) ++lead;
    if (lead < params.d && v[lead] == 1) directions.push_back(v);
  });
  for_each_point(params, [&](Index bidx, const Point& b) {
    for (const auto& v : directions) {
      // Skip unless b is the minimum-index point of its line.
      bool canonical = true;
      for (Residue c = 1; c < params.q && canonical; ++c)
        canonical = point_index(add(b, scale(c, v, params), params), params) > bidx;
      if (!canonical) continue;
      const auto sub = AffineSubspace::make(b, {v}, params);
      const std::uint64_t size = affine_sphere_intersection(sub, params).size();
      ++a.instances;
      if (size > a.max_observed) {
        a.max_observed = size;
        a.worst = detail::describe(b, {v});
      }
      if (!within_affine_slice_bound(size, 1, params)) {
        if (a.violations++ == 0) a.first_violation = detail::describe(b, {v}) + " meets S_t in " + std::to_string(size) + " points";
      }
    }
  });
  return a;
}

/// Seeded random n-dimensional affine subspaces against |A ∩ S_t| <= 2 q^{n-1}.
inline BoundAudit random_slice_audit(const FieldParams& params, int n, std::uint64_t samples, std::uint64_t seed) {
  if (n < 1 || n > params.d) throw InvalidArgument("slice dimension must lie in [1, d]");
  BoundAudit a{"affine-slice random n=" + std::to_string(n), params, n, 0, 0, 0, 2 * ipow(params.q, static_cast<unsigned>(n - 1)), {}, {}};
  Rng rng = make_rng(derive_seed(seed, {0x51, params.q, static_cast<std::uint64_t>(params.d), static_cast<std::uint64_t>(n), params.t}));
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Point base = detail::random_point(rng, params);
    std::vector<Point> basis;
    while (static_cast<int>(basis.size()) < n) {
      basis.push_back(detail::random_point(rng, params));
      if (rank(basis, params) != static_cast<int>(basis.size())) basis.pop_back();
    }
    const auto sub = AffineSubspace::make(base, basis, params);
    const std::uint64_t size = affine_sphere_intersection(sub, params).size();
    ++a.instances;
    if (size > a.max_observed) {
      a.max_observed = size;
      a.worst = detail::describe(base, basis);
    }
    if (!within_affine_slice_bound(size, n, params) && a.violations++ == 0)
      a.first_violation = detail::describe(base, basis) + " meets S_t in " + std::to_string(size) + " points";
  }
  return a;
}

namespace detail {
inline void record_pole_instance(BoundAudit& a, const std::vector<Point>& pts, const FieldParams& params, const std::vector<Point>& offsets) {
  const PointSet full = PointSet::full(params);
  PointSet pole = full;
  for (const auto& x : pts) pole &= translated_sphere(x, offsets, params);
  const std::uint64_t size = pole.size();
  ++a.instances;
  if (size > a.max_observed) {
    a.max_observed = size;
    a.worst = describe(pts);
  }
  if (!within_pole_bound(size, a.dim, params) && a.violations++ == 0)
    a.first_violation = describe(pts) + " have " + std::to_string(size) + " common poles";
}
}  // namespace detail

/// Seeded random affinely independent k-tuples against
/// |∩ (S_t + a_i)| <= 2 q^{d-k}.
inline BoundAudit random_pole_audit(const FieldParams& params, int k, std::uint64_t samples, std::uint64_t seed) {
  if (k < 1 || k > params.d) throw InvalidArgument("tuple size must lie in [1, d]");
  BoundAudit a{"pole-count random k=" + std::to_string(k), params, k, 0, 0, 0,
               2 * ipow(params.q, static_cast<unsigned>(params.d - k)), {}, {}};
  const auto offsets = sphere_offsets(params);
  Rng rng = make_rng(derive_seed(seed, {0x52, params.q, static_cast<std::uint64_t>(params.d), static_cast<std::uint64_t>(k), params.t}));
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::vector<Point> pts;
    while (static_cast<int>(pts.size()) < k) {
      pts.push_back(detail::random_point(rng, params));
      if (!affinely_independent(pts, params)) pts.pop_back();
    }
    detail::record_pole_instance(a, pts, params, offsets);
  }
  return a;
}

/// Every affinely independent k-subset of F_q^d (ascending indices).
inline BoundAudit exhaustive_pole_audit(const FieldParams& params, int k) {
  if (k < 1 || k > params.d) throw InvalidArgument("tuple size must lie in [1, d]");
  BoundAudit a{"pole-count exhaustive k=" + std::to_string(k), params, k, 0, 0, 0,
               2 * ipow(params.q, static_cast<unsigned>(params.d - k)), {}, {}};
  const auto offsets = sphere_offsets(params);
  const Index n = params.space_size();
  std::vector<Point> pts;
  auto rec = [&](auto&& self, Index start) -> void {
    if (static_cast<int>(pts.size()) == k) {
      detail::record_pole_instance(a, pts, params, offsets);
      return;
    }
    for (Index i = start; i < n; ++i) {
      pts.push_back(index_point(i, params));
      if (affinely_independent(pts, params)) self(self, i + 1);
      pts.pop_back();
    }
  };
  rec(rec, 0);
  return a;
}

}  // namespace ffvc
