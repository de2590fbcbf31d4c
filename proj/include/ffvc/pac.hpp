#pragma once

// Realizable PAC learning over E: labeled i.i.d. samples from a hidden
// classifier, empirical risk minimization by canonical scan, exact loss and
// Monte-Carlo sample-complexity sweeps.

#include "ffvc/field.hpp"
#include "ffvc/geometry.hpp"
#include "ffvc/parallel.hpp"
#include "ffvc/rng.hpp"
#include "ffvc/vc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace ffvc {

/// Uniform over E, or explicit weights aligned with E.indices().
struct Distribution {
  std::vector<double> weights;  // empty => uniform
  bool uniform() const { return weights.empty(); }
};

struct LabeledPoint {
  Index x = 0;
  bool label = false;
  friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

using Sample = std::vector<LabeledPoint>;

class LearningTask {
 public:
  static LearningTask make(const PointSet& E, ClassKind kind, const Hypothesis& target, const FieldParams& params,
                           Distribution dist = {}, std::uint64_t seed = 1) {
    if (E.empty()) throw InvalidArgument("learning task over an empty set");
    if (target.kind() != kind) throw InvalidArgument("target is not of the task's class kind");
    if (!E.contains(target.u()) || !E.contains(target.v())) throw InvalidArgument("target parameters must lie in E");
    LearningTask t(params);
    t.E_ = E;
    t.members_ = E.indices();
    t.kind_ = kind;
    t.target_ = target;
    t.seed_ = seed;
    if (!dist.uniform()) {
      if (dist.weights.size() != t.members_.size()) throw InvalidArgument("distribution weights must match |E|");
      double sum = 0;
      for (double w : dist.weights) {
        if (!(w >= 0)) throw InvalidArgument("distribution weights must be non-negative");
        sum += w;
      }
      if (std::fabs(sum - 1.0) > 1e-12) throw InvalidArgument("distribution weights must sum to 1");
      double acc = 0;
      for (double w : dist.weights) t.cumulative_.push_back(acc += w);
    }
    t.dist_ = std::move(dist);
    t.target_support_ = support(target, E, t.cache_);
    return t;
  }

  const FieldParams& params() const { return params_; }
  const PointSet& domain() const { return E_; }
  const std::vector<Index>& members() const { return members_; }
  ClassKind kind() const { return kind_; }
  const Hypothesis& target() const { return target_; }
  const Distribution& distribution() const { return dist_; }
  std::uint64_t seed() const { return seed_; }
  const SphereCache& cache() const { return cache_; }
  const PointSet& target_support() const { return target_support_; }

  Index draw_point(Rng& rng) const {
    if (dist_.uniform()) return members_[uniform_below(rng, members_.size())];
    const double u = uniform_unit(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return members_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

 private:
  explicit LearningTask(const FieldParams& params)
      : params_(params), cache_(params), target_(Hypothesis::one_param(0)) {}

  FieldParams params_;
  SphereCache cache_;
  PointSet E_;
  std::vector<Index> members_;
  ClassKind kind_ = ClassKind::two_param;
  Hypothesis target_;
  Distribution dist_;
  std::vector<double> cumulative_;
  std::uint64_t seed_ = 1;
  PointSet target_support_;
};

inline Sample draw_sample(const LearningTask& task, std::size_t m, Rng& rng) {
  Sample s;
  s.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Index x = task.draw_point(rng);
    s.push_back({x, task.target_support().contains(x)});
  }
  return s;
}

/// Deterministic in the task seed.
inline Sample draw_sample(const LearningTask& task, std::size_t m) {
  Rng rng = make_rng(derive_seed(task.seed(), {0x5a, m}));
  return draw_sample(task, m, rng);
}

/// P_{x~D}[c(x) != h(x)] by enumeration of E.
inline double true_loss(const Hypothesis& h, const LearningTask& task) {
  PointSet diff = support(h, task.domain(), task.cache());
  PointSet both = diff & task.target_support();
  diff |= task.target_support();
  diff.subtract(both);
  if (task.distribution().uniform()) return static_cast<double>(diff.size()) / static_cast<double>(task.members().size());
  const auto& members = task.members();
  const auto& w = task.distribution().weights;
  double loss = 0;
  for (std::size_t i = 0; i < members.size(); ++i)
    if (diff.contains(members[i])) loss += w[i];
  return loss;
}

/// Empirical loss estimate from `draws` fresh points.
inline double monte_carlo_loss(const Hypothesis& h, const LearningTask& task, std::uint64_t draws, std::uint64_t seed) {
  const PointSet hs = support(h, task.domain(), task.cache());
  Rng rng = make_rng(derive_seed(seed, {0x3c}));
  std::uint64_t wrong = 0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const Index x = task.draw_point(rng);
    wrong += hs.contains(x) != task.target_support().contains(x);
  }
  return static_cast<double>(wrong) / static_cast<double>(draws);
}

inline std::size_t empirical_errors(const Hypothesis& h, const Sample& sample, const PointSet& E, const SphereCache& cache) {
  const PointSet s = support(h, E, cache);
  std::size_t e = 0;
  for (const auto& lp : sample) e += s.contains(lp.x) != lp.label;
  return e;
}

/// Empirical risk minimizer; ties broken by the first (u, v) in ascending
/// scan order. Stops at the first zero-error hypothesis.
inline Hypothesis erm_learn(const Sample& sample, const PointSet& E, ClassKind kind, const SphereCache& cache) {
  const auto members = E.indices();
  if (members.empty() || (kind == ClassKind::two_param && members.size() < 2))
    throw InvalidArgument("ERM over an empty hypothesis class");
  const std::size_t m = sample.size();
  // row[u] bit i <=> sample point i lies on S_t + u.
  std::vector<Bitset> rows(members.size(), Bitset(m));
  Bitset labels(m);
  for (std::size_t i = 0; i < m; ++i)
    if (sample[i].label) labels.set(i);
  {
    std::vector<std::size_t> position(E.universe(), SIZE_MAX);
    for (std::size_t j = 0; j < members.size(); ++j) position[members[j]] = j;
    const auto& params = cache.params();
    for (std::size_t i = 0; i < m; ++i) {
      const Point x = index_point(sample[i].x, params);
      for (const auto& o : cache.offsets()) {
        const Index u = point_index(add(x, o, params), params);
        if (position[u] != SIZE_MAX) rows[position[u]].set(i);
      }
    }
  }
  auto errors_of = [&](const Bitset& predicted) {
    Bitset diff = predicted;
    diff ^= labels;
    return diff.count();
  };

  std::size_t best = SIZE_MAX;
  std::optional<Hypothesis> best_h;
  if (kind == ClassKind::one_param) {
    for (std::size_t a = 0; a < members.size() && best != 0; ++a) {
      const std::size_t e = errors_of(rows[a]);
      if (e < best) {
        best = e;
        best_h = Hypothesis::one_param(members[a]);
      }
    }
    return *best_h;
  }
  for (std::size_t a = 0; a < members.size() && best != 0; ++a)
    for (std::size_t b = 0; b < members.size(); ++b) {
      if (a == b) continue;
      Bitset predicted = rows[a];
      predicted &= rows[b];
      const std::size_t e = errors_of(predicted);
      if (e < best) {
        best = e;
        best_h = Hypothesis::two_param(members[a], members[b]);
        if (best == 0) break;
      }
    }
  return *best_h;
}

inline Hypothesis erm_learn(const Sample& sample, const PointSet& E, ClassKind kind, const FieldParams& params) {
  return erm_learn(sample, E, kind, SphereCache(params));
}

/// max over u != v in E of |S_t+u ∩ S_t+v ∩ E| (two-parameter) or
/// max |S_t+y ∩ E| (one-parameter).
inline std::uint64_t max_support_size(const PointSet& E, ClassKind kind, const SphereCache& cache) {
  const auto members = E.indices();
  std::vector<PointSet> spheres;
  spheres.reserve(members.size());
  for (Index u : members) spheres.push_back(cache.sphere(u) & E);
  std::vector<std::uint64_t> best(members.size(), 0);
  parallel_for(members.size(), [&](std::size_t a) {
    std::uint64_t m = 0;
    if (kind == ClassKind::one_param) {
      m = spheres[a].size();
    } else {
      for (std::size_t b = 0; b < members.size(); ++b)
        if (a != b) m = std::max<std::uint64_t>(m, count_and(spheres[a].bits(), spheres[b].bits()));
    }
    best[a] = m;
  });
  return best.empty() ? 0 : *std::max_element(best.begin(), best.end());
}

/// 2 * max support / |E|: no in-class h can have larger uniform loss.
inline double loss_ceiling(const PointSet& E, ClassKind kind, const SphereCache& cache) {
  return 2.0 * static_cast<double>(max_support_size(E, kind, cache)) / static_cast<double>(E.size());
}

// ---------------------------------------------------------------------------

struct SweepPoint {
  std::size_t m = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::uint64_t consistent = 0;  // trials whose ERM output had zero empirical error
  double frequency = 0;
  double lower_band = 0;  // Wilson lower bound at ~3 sigma; used only when requested
  double mean_loss = 0;
};

struct SampleComplexityCurve {
  double epsilon = 0;
  double delta = 0;
  bool confidence_band = false;
  std::vector<SweepPoint> points;
  std::optional<std::size_t> m_hat;  // nullopt: "> max(m_grid)"
};

struct SweepOptions {
  bool confidence_band = false;
};

inline double wilson_lower(std::uint64_t successes, std::uint64_t trials, double z = 3.0) {
  if (trials == 0) return 0;
  const double n = static_cast<double>(trials), p = static_cast<double>(successes) / n;
  const double denom = 1 + z * z / n;
  const double centre = p + z * z / (2 * n);
  const double spread = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return std::max(0.0, (centre - spread) / denom);
}

/// For each m: `trials` runs of draw -> ERM -> exact loss, seeded by
/// (task seed, m, trial). m̂ is the first grid value whose success
/// frequency reaches 1 - δ.
inline SampleComplexityCurve sample_complexity_sweep(const LearningTask& task, double epsilon, double delta,
                                                     const std::vector<std::size_t>& m_grid, std::uint64_t trials,
                                                     const SweepOptions& opt = {}) {
  if (!(epsilon > 0 && epsilon <= 1)) throw InvalidArgument("epsilon must lie in (0, 1]");
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("delta must lie in (0, 1)");
  if (trials < 100) throw InvalidArgument("a sweep needs at least 100 trials per grid point");
  SampleComplexityCurve curve;
  curve.epsilon = epsilon;
  curve.delta = delta;
  curve.confidence_band = opt.confidence_band;
  for (std::size_t m : m_grid) {
    std::vector<double> losses(trials);
    std::vector<char> consistent(trials);
    parallel_for(trials, [&](std::size_t trial) {
      Rng rng = make_rng(derive_seed(task.seed(), {m, trial}));
      const Sample s = draw_sample(task, m, rng);
      const Hypothesis h = erm_learn(s, task.domain(), task.kind(), task.cache());
      losses[trial] = true_loss(h, task);
      consistent[trial] = empirical_errors(h, s, task.domain(), task.cache()) == 0;
    });
    SweepPoint pt;
    pt.m = m;
    pt.trials = trials;
    double loss_sum = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      pt.successes += losses[i] <= epsilon;
      pt.consistent += consistent[i] != 0;
      loss_sum += losses[i];
    }
    pt.frequency = static_cast<double>(pt.successes) / static_cast<double>(trials);
    pt.lower_band = wilson_lower(pt.successes, trials);
    pt.mean_loss = loss_sum / static_cast<double>(trials);
    const double score = opt.confidence_band ? pt.lower_band : pt.frequency;
    if (!curve.m_hat && score >= 1 - delta) curve.m_hat = m;
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace ffvc
