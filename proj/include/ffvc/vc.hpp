#pragma once

// Sphere-intersection classifiers h_{u,v}(x) = [||x-u|| = ||x-v|| = t] and
// single-sphere classifiers h_y(x) = [||x-y|| = t], shattering, exact
// VC-dimension search and prism-based shatter witnesses.

#include "ffvc/field.hpp"
#include "ffvc/geometry.hpp"
#include "ffvc/graph.hpp"
#include "ffvc/prism.hpp"
#include "ffvc/rng.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

namespace ffvc {

enum class ClassKind { two_param, one_param };

inline const char* to_string(ClassKind k) { return k == ClassKind::two_param ? "two-param" : "one-param"; }

inline ClassKind parse_class_kind(const std::string& s) {
  if (s == "two-param" || s == "two_param") return ClassKind::two_param;
  if (s == "one-param" || s == "one_param") return ClassKind::one_param;
  throw InvalidArgument("unknown class kind '" + s + "'");
}

class Hypothesis {
 public:
  static Hypothesis two_param(Index u, Index v) {
    if (u == v) throw InvalidArgument("h_{u,v} requires u != v");
    return Hypothesis(ClassKind::two_param, u, v);
  }
  static Hypothesis one_param(Index y) { return Hypothesis(ClassKind::one_param, y, y); }

  ClassKind kind() const { return kind_; }
  Index u() const { return u_; }
  Index v() const { return v_; }

  bool operator()(const Point& x, const FieldParams& params) const {
    if (distance(x, index_point(u_, params), params) != params.t) return false;
    return kind_ == ClassKind::one_param || distance(x, index_point(v_, params), params) == params.t;
  }

  std::string to_string(const FieldParams& params) const {
    if (kind_ == ClassKind::one_param) return "h_" + index_point(u_, params).to_string();
    return "h_{" + index_point(u_, params).to_string() + "," + index_point(v_, params).to_string() + "}";
  }

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;

 private:
  Hypothesis(ClassKind kind, Index u, Index v) : kind_(kind), u_(u), v_(v) {}
  ClassKind kind_;
  Index u_, v_;
};

inline bool evaluate(const Hypothesis& h, const Point& x, const FieldParams& params) { return h(x, params); }
inline bool evaluate(const Hypothesis& h, Index x, const FieldParams& params) { return h(index_point(x, params), params); }

/// {x ∈ E : h(x) = 1}.
inline PointSet support(const Hypothesis& h, const PointSet& E, const SphereCache& cache) {
  PointSet s = cache.sphere(h.u()) & E;
  if (h.kind() == ClassKind::two_param) s &= cache.sphere(h.v());
  return s;
}

// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxPatternBits = 63;

struct PatternSet {
  std::size_t n = 0;
  std::vector<std::uint64_t> patterns;  // ascending; bit i = h(c_i)
  bool shattered() const { return patterns.size() == (std::uint64_t{1} << n); }
};

namespace detail {

inline void check_domain_subset(const PointSet& E, std::span<const Index> C) {
  if (C.size() > kMaxPatternBits) throw InvalidArgument("pattern encoding holds at most 63 points");
  std::vector<Index> sorted(C.begin(), C.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InvalidArgument("points of C must be distinct");
  for (Index c : C)
    if (!E.contains(c)) throw InvalidArgument("points of C must belong to E");
}

// mask[u] bit i <=> ||c_i - u|| = t, for u ∈ E; grouped as mask -> #u.
inline std::map<std::uint64_t, std::uint64_t> incidence_masks(const PointSet& E, std::span<const Index> C, const SphereCache& cache) {
  std::map<Index, std::uint64_t> touched;
  for (std::size_t i = 0; i < C.size(); ++i) {
    const PointSet s = cache.sphere(C[i]) & E;
    s.for_each([&](Index u) { touched[u] |= std::uint64_t{1} << i; });
  }
  std::map<std::uint64_t, std::uint64_t> groups;
  const std::uint64_t zero_count = E.size() - touched.size();
  if (zero_count) groups[0] = zero_count;
  for (const auto& [u, m] : touched) ++groups[m];
  return groups;
}

}  // namespace detail

/// Restrictions to C of every classifier in the class over E. Two-parameter
/// patterns are mask(u) & mask(v) over pairs u != v, taken over the distinct
/// incidence masks with multiplicity; stops once all 2^|C| patterns appear.
inline PatternSet dichotomy_patterns(const PointSet& E, std::span<const Index> C, ClassKind kind, const SphereCache& cache) {
  detail::check_domain_subset(E, C);
  PatternSet out;
  out.n = C.size();
  const std::uint64_t full = std::uint64_t{1} << C.size();
  const auto groups = detail::incidence_masks(E, C, cache);
  std::unordered_set<std::uint64_t> seen;
  if (kind == ClassKind::one_param) {
    for (const auto& [m, count] : groups) seen.insert(m);
  } else {
    for (auto a = groups.begin(); a != groups.end() && seen.size() < full; ++a) {
      if (a->second >= 2) seen.insert(a->first);
      for (auto b = std::next(a); b != groups.end(); ++b) {
        seen.insert(a->first & b->first);
        if (seen.size() == full) break;
      }
    }
  }
  out.patterns.assign(seen.begin(), seen.end());
  std::sort(out.patterns.begin(), out.patterns.end());
  return out;
}

inline bool is_shattered(const PointSet& E, std::span<const Index> C, ClassKind kind, const SphereCache& cache) {
  return dichotomy_patterns(E, C, kind, cache).shattered();
}

// ---------------------------------------------------------------------------
// Shatter witnesses from prisms: for A ⊊ C(P), A non-empty, a pole y(A) ∈ E of
// A at distance t from no point of C(P) \ A gives h_{y, y(A)} = 1_A on C(P);
// the tail pair gives the full set.

struct ShatterWitness {
  Prism prism;
  std::vector<Hypothesis> assignment;  // index = subset mask over center positions
};

struct WitnessFailure {
  std::uint64_t mask = 0;
  std::string reason;
};

using WitnessResult = std::variant<ShatterWitness, WitnessFailure>;

/// Direct re-evaluation of every subset indicator.
inline bool validate_assignment(const Prism& P, const std::vector<Hypothesis>& assignment, const FieldParams& params) {
  const std::size_t n = P.n();
  if (assignment.size() != (std::size_t{1} << n)) return false;
  const auto pts = P.center_points(params);
  for (std::uint64_t mask = 0; mask < assignment.size(); ++mask)
    for (std::size_t i = 0; i < n; ++i)
      if (assignment[mask](pts[i], params) != static_cast<bool>(mask >> i & 1U)) return false;
  return true;
}

inline bool validate_witness(const ShatterWitness& w, const FieldParams& params) {
  return validate_assignment(w.prism, w.assignment, params);
}

namespace detail {
inline std::vector<std::uint64_t> center_masks(const PointSet& E, const Prism& P, const SphereCache& cache, std::vector<Index>& members) {
  members = E.indices();
  std::vector<std::uint64_t> masks(members.size(), 0);
  std::vector<PointSet> spheres;
  for (Index c : P.center) spheres.push_back(cache.sphere(c));
  for (std::size_t j = 0; j < members.size(); ++j)
    for (std::size_t i = 0; i < spheres.size(); ++i)
      if (spheres[i].contains(members[j])) masks[j] |= std::uint64_t{1} << i;
  return masks;
}
}  // namespace detail

inline WitnessResult shatter_witness(const Prism& P, const PointSet& E, const SphereCache& cache) {
  const auto& params = cache.params();
  if (classify_prism(P, params) != PrismClass::affinely_nondegenerate)
    throw InvalidArgument("shatter_witness requires an affinely nondegenerate prism");
  if (!E.contains(P.y) || !E.contains(P.z)) throw InvalidArgument("prism tail must lie in E");
  for (Index c : P.center)
    if (!E.contains(c)) throw InvalidArgument("prism center must lie in E");
  const std::size_t n = P.n();
  if (n > 20) throw InvalidArgument("prism center too large for a witness table");

  std::vector<Index> members;
  const auto masks = detail::center_masks(E, P, cache, members);
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;

  // First pole in E realizing each exact incidence pattern.
  std::map<std::uint64_t, Index> first_with_mask;
  for (std::size_t j = 0; j < members.size(); ++j) first_with_mask.try_emplace(masks[j], members[j]);

  ShatterWitness w{P, {}};
  w.assignment.reserve(full + 1);
  for (std::uint64_t A = 0; A <= full; ++A) {
    if (A == full) {
      w.assignment.push_back(Hypothesis::two_param(P.y, P.z));
      continue;
    }
    if (A == 0) {
      std::optional<Hypothesis> found;
      for (std::size_t a = 0; a < members.size() && !found; ++a)
        for (std::size_t b = 0; b < members.size(); ++b)
          if (a != b && (masks[a] & masks[b]) == 0) {
            found = Hypothesis::two_param(members[a], members[b]);
            break;
          }
      if (!found) return WitnessFailure{A, "no pair (u,v) in E vanishes on the whole center"};
      w.assignment.push_back(*found);
      continue;
    }
    auto it = first_with_mask.find(A);
    if (it == first_with_mask.end()) return WitnessFailure{A, "no pole in E isolates this subset"};
    const Index pole = it->second;
    const Index partner = pole == P.y ? P.z : P.y;
    w.assignment.push_back(Hypothesis::two_param(partner, pole));
  }
  return w;
}

inline WitnessResult shatter_witness(const Prism& P, const PointSet& E, const FieldParams& params) {
  return shatter_witness(P, E, SphereCache(params));
}

/// One-parameter classifiers from the same poles: h_{y(A)} for proper
/// non-empty A, h_y for the full center, and a sphere in E missing the whole
/// center for A = ∅.
inline std::variant<std::vector<Hypothesis>, WitnessFailure> one_param_assignment(const ShatterWitness& w, const PointSet& E,
                                                                                  const SphereCache& cache) {
  const std::uint64_t full = w.assignment.size() - 1;
  std::vector<Hypothesis> out;
  std::vector<Index> members;
  const auto masks = detail::center_masks(E, w.prism, cache, members);
  for (std::uint64_t A = 0; A <= full; ++A) {
    if (A == full) {
      out.push_back(Hypothesis::one_param(w.prism.y));
    } else if (A == 0) {
      auto it = std::find(masks.begin(), masks.end(), std::uint64_t{0});
      if (it == masks.end()) return WitnessFailure{0, "every point of E is at distance t from the center"};
      out.push_back(Hypothesis::one_param(members[static_cast<std::size_t>(it - masks.begin())]));
    } else {
      out.push_back(Hypothesis::one_param(w.assignment[A].v()));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct VcOptions {
  std::uint64_t max_checks = 50'000'000;  // shatter tests in the exhaustive search
  std::uint64_t max_prisms = 1'000'000;   // prisms tried by the prism-guided search
  bool prism_guided = true;
};

struct VcResult {
  int value = 0;
  bool exact = false;       // false: only "VC >= value" is known (budget hit)
  bool degenerate = false;  // empty hypothesis class
  int cap = 0;              // structural upper bound used
  std::string method;       // "prism", "exhaustive", "degenerate"
  std::vector<Index> shattered_set;
  std::optional<ShatterWitness> witness;
  std::uint64_t checks = 0;
  std::uint64_t prisms_tried = 0;
};

namespace detail {

struct ShatterSearch {
  const PointSet& E;
  ClassKind kind;
  const SphereCache& cache;
  std::vector<Index> members;
  int target = 0;
  std::uint64_t budget = 0;
  std::uint64_t checks = 0;
  bool out_of_budget = false;
  std::vector<Index> best;
  std::vector<Index> current;

  // Depth-first over ascending sets whose every prefix is shattered; any
  // shattered set is reached since shattering passes to subsets.
  void run(std::size_t start) {
    if (current.size() > best.size()) best = current;
    if (static_cast<int>(best.size()) >= target || out_of_budget) return;
    for (std::size_t i = start; i < members.size(); ++i) {
      if (checks >= budget) {
        out_of_budget = true;
        return;
      }
      current.push_back(members[i]);
      ++checks;
      if (is_shattered(E, current, kind, cache)) run(i + 1);
      current.pop_back();
      if (static_cast<int>(best.size()) >= target || out_of_budget) return;
    }
  }
};

}  // namespace detail

/// Exact VC-dimension of the class over E, capped structurally at d
/// (two-parameter) or d + 1 (one-parameter).
inline VcResult vc_dimension(const PointSet& E, ClassKind kind, const FieldParams& params, const VcOptions& opt = {}) {
  if (E.empty()) throw InvalidArgument("vc_dimension requires a non-empty E");
  VcResult r;
  r.cap = kind == ClassKind::two_param ? params.d : params.d + 1;
  if (kind == ClassKind::two_param && E.size() < 2) {
    r.degenerate = true;
    r.exact = true;
    r.method = "degenerate";
    return r;
  }
  const SphereCache cache(params);

  if (kind == ClassKind::two_param && opt.prism_guided) {
    const auto g = build_graph(E, params);
    std::optional<ShatterWitness> found;
    r.prisms_tried = for_each_prism(g, static_cast<unsigned>(params.d), PrismFilter::affinely_nondegenerate, opt.max_prisms,
                                    [&](const Prism& P) {
                                      auto res = shatter_witness(P, E, cache);
                                      if (auto* w = std::get_if<ShatterWitness>(&res)) {
                                        found = std::move(*w);
                                        return false;
                                      }
                                      return true;
                                    });
    if (found) {
      r.value = params.d;
      r.exact = true;
      r.method = "prism";
      r.shattered_set = found->prism.center;
      r.witness = std::move(found);
      return r;
    }
  }

  detail::ShatterSearch search{E, kind, cache, E.indices(), r.cap, opt.max_checks, 0, false, {}, {}};
  search.run(0);
  r.value = static_cast<int>(search.best.size());
  r.shattered_set = search.best;
  r.checks = search.checks;
  r.exact = !search.out_of_budget;
  r.method = "exhaustive";
  return r;
}

// ---------------------------------------------------------------------------

struct AuditOptions {
  bool exhaustive = true;
  std::uint64_t budget = 100'000'000;  // shatter tests (exhaustive) or samples
  std::uint64_t seed = 1;
};

struct AuditReport {
  int n = 0;
  bool exhaustive = false;
  bool partial = false;  // budget exhausted before the search finished
  std::uint64_t subsets_checked = 0;
  std::uint64_t shattered_found = 0;
  std::vector<Index> first_shattered;
};

/// Looks for an n-subset of E shattered by the class. Exhaustive mode walks
/// only sets whose prefixes are shattered; sampled mode draws random n-sets.
inline AuditReport upper_bound_audit(const PointSet& E, int n, ClassKind kind, const FieldParams& params, const AuditOptions& opt = {}) {
  AuditReport rep;
  rep.n = n;
  rep.exhaustive = opt.exhaustive;
  const SphereCache cache(params);
  const auto members = E.indices();
  if (n <= 0 || static_cast<std::size_t>(n) > members.size()) return rep;

  if (opt.exhaustive) {
    std::vector<Index> current;
    auto dfs = [&](auto&& self, std::size_t start) -> void {
      for (std::size_t i = start; i < members.size() && !rep.partial; ++i) {
        if (rep.subsets_checked >= opt.budget) {
          rep.partial = true;
          return;
        }
        current.push_back(members[i]);
        ++rep.subsets_checked;
        if (is_shattered(E, current, kind, cache)) {
          if (static_cast<int>(current.size()) == n) {
            if (rep.shattered_found++ == 0) rep.first_shattered = current;
          } else {
            self(self, i + 1);
          }
        }
        current.pop_back();
      }
    };
    dfs(dfs, 0);
    return rep;
  }

  Rng rng = make_rng(derive_seed(opt.seed, {0xa0d17}));
  std::vector<Index> pool = members;
  for (std::uint64_t s = 0; s < opt.budget; ++s) {
    for (int i = 0; i < n; ++i) std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
    std::vector<Index> C(pool.begin(), pool.begin() + n);
    ++rep.subsets_checked;
    if (is_shattered(E, C, kind, cache) && rep.shattered_found++ == 0) {
      std::sort(C.begin(), C.end());
      rep.first_shattered = C;
    }
  }
  return rep;
}

}  // namespace ffvc
