#pragma once

// Spheres S_t + c, affine rank over F_q, affine slices of spheres and pole
// sets. Everything is computed by enumeration; the quadratic-form bounds are
// exposed as separate checks rather than trusted by the algorithms.

#include "ffvc/count.hpp"
#include "ffvc/field.hpp"
#include "ffvc/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace ffvc {

/// Visits every point of F_q^d in index order as (index, point).
template <class F>
void for_each_point(const FieldParams& params, F&& f) {
  Point p(params.d);
  const Index n = params.space_size();
  for (Index idx = 0; idx < n; ++idx) {
    f(idx, static_cast<const Point&>(p));
    for (int i = params.d - 1; i >= 0; --i) {
      if (++p[i] < params.q) break;
      p[i] = 0;
    }
  }
}

/// Points of S_t centered at the origin, in index order.
inline std::vector<Point> sphere_offsets(const FieldParams& params) {
  std::vector<Point> out;
  for_each_point(params, [&](Index, const Point& p) {
    if (norm(p, params) == params.t) out.push_back(p);
  });
  return out;
}

/// S_t + center, by a full scan of the space.
inline PointSet sphere_points(const Point& center, const FieldParams& params) {
  check_point(center, params);
  PointSet s(params);
  for_each_point(params, [&](Index idx, const Point& p) {
    if (distance(p, center, params) == params.t) s.insert(idx);
  });
  return s;
}

/// S_t + center built by translating precomputed offsets; same set as
/// sphere_points but O(|S_t|) per sphere.
inline PointSet translated_sphere(const Point& center, std::span<const Point> offsets, const FieldParams& params) {
  PointSet s(params);
  for (const auto& o : offsets) s.insert(point_index(add(center, o, params), params));
  return s;
}

struct Sphere {
  Point center;
  Residue radius_param = 0;
  PointSet points;

  static Sphere make(const Point& center, const FieldParams& params) {
    return Sphere{center, params.t, sphere_points(center, params)};
  }
  bool contains(const Point& x, const FieldParams& params) const { return distance(x, center, params) == radius_param; }
};

// ---------------------------------------------------------------------------
// Sphere size bounds: q^{d-1} - q^{d/2} < |S_t| < q^{d-1} + q^{d/2}.

struct SphereSizeEntry {
  Residue t = 0;
  std::uint64_t size = 0;
  double lower = 0;  // q^{d-1} - q^{d/2}
  double upper = 0;  // q^{d-1} + q^{d/2}
  bool within = false;
};

struct SphereSizeReport {
  Residue q = 0;
  int d = 0;
  std::vector<SphereSizeEntry> entries;
  bool all_within() const {
    for (const auto& e : entries)
      if (!e.within) return false;
    return true;
  }
};

/// Exact test of q^{d-1} - q^{d/2} < size < q^{d-1} + q^{d/2} using only
/// integer arithmetic (compares squares against q^d).
inline bool sphere_size_within_bounds(std::uint64_t size, Residue q, int d) {
  const Count main = ipow(q, static_cast<unsigned>(d - 1));
  const Count qd = ipow(q, static_cast<unsigned>(d));
  const Count s = size;
  auto strictly_below_half_power = [&](const Count& a) { return a < 0 || a * a < qd; };
  return strictly_below_half_power(main - s) && strictly_below_half_power(s - main);
}

/// |S_t| for every t in [1, q), from one norm histogram of the space.
inline SphereSizeReport verify_sphere_size_bounds(const FieldParams& params) {
  std::vector<std::uint64_t> histogram(params.q, 0);
  for_each_point(params, [&](Index, const Point& p) { ++histogram[norm(p, params)]; });
  SphereSizeReport report{params.q, params.d, {}};
  const double main = std::pow(static_cast<double>(params.q), params.d - 1);
  const double half = std::pow(static_cast<double>(params.q), params.d / 2.0);
  for (Residue t = 1; t < params.q; ++t) {
    SphereSizeEntry e;
    e.t = t;
    e.size = histogram[t];
    e.lower = main - half;
    e.upper = main + half;
    e.within = sphere_size_within_bounds(e.size, params.q, params.d);
    report.entries.push_back(e);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Linear algebra over F_q.

/// Rank over F_q of the given vectors (rows), by Gaussian elimination.
inline int rank(std::span<const Point> vectors, const FieldParams& params) {
  std::vector<Point> rows(vectors.begin(), vectors.end());
  const Residue q = params.q;
  int r = 0;
  for (int col = 0; col < params.d && r < static_cast<int>(rows.size()); ++col) {
    int pivot = -1;
    for (int i = r; i < static_cast<int>(rows.size()); ++i)
      if (rows[i][col] != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[r], rows[pivot]);
    const Residue inv = mod_inv(rows[r][col], q);
    for (int j = 0; j < params.d; ++j) rows[r][j] = mod_mul(rows[r][j], inv, q);
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (i == r || rows[i][col] == 0) continue;
      const Residue f = rows[i][col];
      for (int j = 0; j < params.d; ++j) rows[i][j] = mod_sub(rows[i][j], mod_mul(f, rows[r][j], q), q);
    }
    ++r;
  }
  return r;
}

/// Rank of {p_i - p_0 : i >= 1}. k points are affinely independent iff this
/// equals k - 1.
inline int affine_rank(std::span<const Point> points, const FieldParams& params) {
  if (points.empty()) throw InvalidArgument("affine_rank of an empty point list");
  std::vector<Point> diffs;
  diffs.reserve(points.size() - 1);
  for (std::size_t i = 1; i < points.size(); ++i) diffs.push_back(sub(points[i], points[0], params));
  return rank(diffs, params);
}

inline bool affinely_independent(std::span<const Point> points, const FieldParams& params) {
  return affine_rank(points, params) == static_cast<int>(points.size()) - 1;
}

/// basepoint + span(basis), basis linearly independent.
class AffineSubspace {
 public:
  static AffineSubspace make(const Point& basepoint, std::vector<Point> basis, const FieldParams& params) {
    check_point(basepoint, params);
    for (const auto& v : basis) check_point(v, params);
    if (rank(basis, params) != static_cast<int>(basis.size()))
      throw InvalidArgument("affine subspace basis is linearly dependent");
    AffineSubspace a;
    a.basepoint_ = basepoint;
    a.basis_ = std::move(basis);
    return a;
  }

  /// The affine span of the given points.
  static AffineSubspace span_of(std::span<const Point> points, const FieldParams& params) {
    if (points.empty()) throw InvalidArgument("affine span of no points");
    std::vector<Point> basis;
    for (std::size_t i = 1; i < points.size(); ++i) {
      basis.push_back(sub(points[i], points[0], params));
      if (rank(basis, params) != static_cast<int>(basis.size())) basis.pop_back();
    }
    return make(points[0], std::move(basis), params);
  }

  const Point& basepoint() const { return basepoint_; }
  const std::vector<Point>& basis() const { return basis_; }
  int dimension() const { return static_cast<int>(basis_.size()); }

  /// Visits all q^n points b + sum c_i v_i, coefficients in odometer order.
  template <class F>
  void for_each_point(const FieldParams& params, F&& f) const {
    const int n = dimension();
    std::vector<Residue> c(n, 0);
    while (true) {
      Point p = basepoint_;
      for (int i = 0; i < n; ++i)
        if (c[i]) p = add(p, scale(c[i], basis_[i], params), params);
      f(static_cast<const Point&>(p));
      int i = n - 1;
      for (; i >= 0; --i) {
        if (++c[i] < params.q) break;
        c[i] = 0;
      }
      if (i < 0) break;
    }
  }

  PointSet points(const FieldParams& params) const {
    PointSet s(params);
    for_each_point(params, [&](const Point& p) { s.insert(point_index(p, params)); });
    return s;
  }

 private:
  Point basepoint_;
  std::vector<Point> basis_;
};

/// A ∩ S_t (sphere centered at the origin), by enumerating A.
inline PointSet affine_sphere_intersection(const AffineSubspace& sub, const FieldParams& params) {
  PointSet s(params);
  sub.for_each_point(params, [&](const Point& p) {
    if (norm(p, params) == params.t) s.insert(point_index(p, params));
  });
  return s;
}

/// size <= 2 q^{n-1}, the claimed bound on an n-dimensional affine slice of a
/// sphere (n >= 1).
inline bool within_affine_slice_bound(std::uint64_t size, int n, const FieldParams& params) {
  return Count(size) <= 2 * ipow(params.q, static_cast<unsigned>(n - 1));
}

/// size <= 2 q^{d-k}, the claimed bound on the common poles of k affinely
/// independent points; compared as size * q^k <= 2 q^d so k > d is exact too.
inline bool within_pole_bound(std::uint64_t size, int k, const FieldParams& params) {
  return Count(size) * ipow(params.q, static_cast<unsigned>(k)) <= 2 * ipow(params.q, static_cast<unsigned>(params.d));
}

/// {y in domain : ||y - x|| = t for all x in A}.
inline PointSet poles(std::span<const Point> A, const PointSet& domain, const FieldParams& params) {
  if (A.empty()) throw InvalidArgument("poles of the empty set are not defined here");
  if (domain.universe() != params.space_size()) throw InvalidArgument("domain universe does not match q^d");
  const auto offsets = sphere_offsets(params);
  PointSet result = domain;
  for (const auto& x : A) {
    result &= translated_sphere(x, offsets, params);
    if (result.empty()) break;
  }
  return result;
}

/// Caches S_t + x for repeated pole and cover computations.
class SphereCache {
 public:
  explicit SphereCache(const FieldParams& params) : params_(params), offsets_(sphere_offsets(params)) {}

  const FieldParams& params() const { return params_; }
  const std::vector<Point>& offsets() const { return offsets_; }

  PointSet sphere(Index center) const { return translated_sphere(index_point(center, params_), offsets_, params_); }

  /// Full-space poles of the given centers.
  PointSet poles(std::span<const Index> centers) const {
    PointSet r = PointSet::full(params_);
    for (Index c : centers) r &= sphere(c);
    return r;
  }

 private:
  FieldParams params_;
  std::vector<Point> offsets_;
};

}  // namespace ffvc
