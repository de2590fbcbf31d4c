#include "ffvc/harness.hpp"

#include <gtest/gtest.h>

using namespace ffvc;

namespace {

template <class F>
auto at_threads(int n, F&& f) {
  const int saved = thread_count();
  set_thread_count(n);
  auto out = f();
  set_thread_count(saved);
  return out;
}

}  // namespace

TEST(Determinism, ThreadCountFromEnvironment) { EXPECT_GE(thread_count(), 1); }

TEST(Determinism, ParallelForCoversEveryIndex) {
  std::vector<int> hits(1000, 0);
  at_threads(4, [&] {
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
    return 0;
  });
  for (int h : hits) ASSERT_EQ(h, 1);
  EXPECT_THROW(at_threads(4, [] {
                 parallel_for(100, [](std::size_t i) {
                   if (i == 37) throw InvalidArgument("boom");
                 });
                 return 0;
               }),
               InvalidArgument);
  set_thread_count(0);
  EXPECT_EQ(thread_count(), 1);
}

TEST(Determinism, GraphQuantities) {
  const auto p = FieldParams::make(7, 3, 2);
  const auto E = sample_subset(p, 200, 11);
  auto run = [&] {
    const auto g = build_graph(E, p);
    const auto k = two_path_counts(g);
    std::vector<std::string> out{gamma_k(g, 2).str(), gamma_k(g, 3).str(), k.total_sum().str(),
                                 count_prisms_formula(k, 3).str()};
    return out;
  };
  EXPECT_EQ(at_threads(1, run), at_threads(4, run));
}

TEST(Determinism, VcAndSweep) {
  const auto p = FieldParams::make(5, 2, 1);
  const auto E = sample_subset(p, 18, 2);
  auto vc = [&] {
    VcOptions opt;
    opt.prism_guided = false;
    return vc_dimension(E, ClassKind::one_param, p, opt).shattered_set;
  };
  EXPECT_EQ(at_threads(1, vc), at_threads(4, vc));
  const auto members = E.indices();
  const auto task = LearningTask::make(E, ClassKind::two_param, Hypothesis::two_param(members[0], members[1]), p, {}, 3);
  auto sweep = [&] {
    std::vector<double> losses;
    for (const auto& pt : sample_complexity_sweep(task, 0.1, 0.1, {0, 5, 20}, 150).points) losses.push_back(pt.mean_loss);
    return losses;
  };
  EXPECT_EQ(at_threads(1, sweep), at_threads(4, sweep));
}

TEST(Determinism, CommandPayloads) {
  for (const std::string command : {"gamma", "prisms", "vc-dim", "witness", "pac-sweep", "bad-sets"}) {
    ExperimentConfig cfg;
    cfg.command = command;
    cfg.params = FieldParams::make(7, 2, 1);
    cfg.set = SetSpec::parse("random:40:17");
    cfg.m_grid = {0, 10};
    cfg.trials = 100;
    cfg.max_prisms = 2000;
    auto run = [&] { return run_command(cfg).record.payload(); };
    EXPECT_EQ(at_threads(1, run), at_threads(4, run)) << command;
  }
}
