#include "camnet/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <queue>

namespace camnet {

namespace {

using Clock = std::chrono::steady_clock;

void check_k(int k, std::size_t m) {
  if (k < 1 || static_cast<std::size_t>(k) > m)
    throw InvalidArgument("k = " + std::to_string(k) + " out of range [1, " + std::to_string(m) + "]");
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void finish(OptimizerReport& report, const VisibilityMatrix& matrix, const EnvironmentPoints& points,
            const CandidateSet& candidates, int k, const QualityFunction& q, const Regularizer& reg,
            Clock::time_point start) {
  report.solution.k = k;
  report.objective = regularized_objective(matrix, points, report.solution.ids, q, reg, candidates);
  report.approximation_guarantee = !reg.active();
  report.wall_seconds = seconds_since(start);
}

}  // namespace

OptimizerReport greedy(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                       const CandidateSet& candidates, int k, const QualityFunction& q, const Regularizer& reg) {
  const auto start = Clock::now();
  check_k(k, matrix.m_cameras());
  IncrementalObjective state(matrix, points, q, reg, candidates);
  OptimizerReport report;
  report.algorithm = "greedy";
  const int m = static_cast<int>(matrix.m_cameras());
  for (int step = 0; step < k; ++step) {
    double best = -std::numeric_limits<double>::infinity();
    int best_id = -1;
    for (int v = 0; v < m; ++v) {
      if (state.contains(v)) continue;
      const double g = state.regularized_gain(v);
      ++report.evaluations;
      // Strict comparison keeps the lowest id among ties.
      if (g > best) {
        best = g;
        best_id = v;
      }
    }
    state.add(best_id);
    report.gains.push_back(best);
  }
  report.solution.ids = state.selected();
  finish(report, matrix, points, candidates, k, q, reg, start);
  return report;
}

OptimizerReport lazy_greedy(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                            const CandidateSet& candidates, int k, const QualityFunction& q, const Regularizer& reg) {
  const auto start = Clock::now();
  check_k(k, matrix.m_cameras());
  IncrementalObjective state(matrix, points, q, reg, candidates);
  OptimizerReport report;
  report.algorithm = "lazy_greedy";

  struct Entry {
    double bound;
    int id;
    int step;  // selection step at which `bound` was computed
  };
  // Top of the heap: largest bound, then lowest id. A fresh top therefore
  // beats every stale entry, whose true gain can only be lower than its bound.
  auto below = [](const Entry& a, const Entry& b) { return a.bound < b.bound || (a.bound == b.bound && a.id > b.id); };
  std::priority_queue<Entry, std::vector<Entry>, decltype(below)> heap(below);

  const int m = static_cast<int>(matrix.m_cameras());
  for (int v = 0; v < m; ++v) {
    heap.push({state.regularized_gain(v), v, 0});
    ++report.evaluations;
  }
  for (int step = 0; step < k; ++step) {
    while (true) {
      Entry top = heap.top();
      heap.pop();
      if (top.step == step) {
        state.add(top.id);
        report.gains.push_back(top.bound);
        break;
      }
      top.bound = state.regularized_gain(top.id);
      top.step = step;
      ++report.evaluations;
      heap.push(top);
    }
  }
  report.solution.ids = state.selected();
  finish(report, matrix, points, candidates, k, q, reg, start);
  return report;
}

long long binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long result = 1;
  for (long long i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step.
    if (result > std::numeric_limits<long long>::max() / (n - k + i)) return std::numeric_limits<long long>::max();
    result = result * (n - k + i) / i;
  }
  return result;
}

OptimizerReport brute_force(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                            const CandidateSet& candidates, int k, const QualityFunction& q, const Regularizer& reg,
                            long long budget) {
  const auto start = Clock::now();
  const std::size_t m = matrix.m_cameras();
  check_k(k, m);
  const long long subsets = binomial(static_cast<long long>(m), k);
  if (subsets > budget)
    throw BudgetExceeded("brute force needs " + std::to_string(subsets) + " subsets, budget is " +
                         std::to_string(budget));
  if (matrix.n_points() != points.size()) throw InvalidArgument("matrix rows do not match the point set");

  OptimizerReport report;
  report.algorithm = "brute_force";
  VisCounts counts(matrix.n_points(), 0);
  std::vector<int> current;
  std::vector<int> best_ids;
  double best = -std::numeric_limits<double>::infinity();

  auto value_of = [&] {
    double g = 0.0;
    for (std::size_t e = 0; e < counts.size(); ++e) g += points.weights[static_cast<Eigen::Index>(e)] * q.t(counts[e]);
    if (reg.active()) {
      double penalty = 0.0;
      for (std::size_t a = 0; a < current.size(); ++a)
        for (std::size_t b = a + 1; b < current.size(); ++b) penalty += reg.penalty(candidates, current[a], current[b]);
      g -= reg.alpha * penalty;
    }
    return g;
  };

  // Depth-first enumeration in lexicographic order of id tuples.
  auto recurse = [&](auto&& self, int next) -> void {
    if (static_cast<int>(current.size()) == k) {
      const double value = value_of();
      ++report.evaluations;
      if (value > best) {
        best = value;
        best_ids = current;
      }
      return;
    }
    const int remaining = k - static_cast<int>(current.size());
    for (int v = next; v <= static_cast<int>(m) - remaining; ++v) {
      const auto& col = matrix.column(static_cast<std::size_t>(v));
      col.for_each_set([&](std::size_t e) { ++counts[e]; });
      current.push_back(v);
      self(self, v + 1);
      current.pop_back();
      col.for_each_set([&](std::size_t e) { --counts[e]; });
    }
  };
  recurse(recurse, 0);

  IncrementalObjective replay(matrix, points, q, reg, candidates);
  for (const int v : best_ids) {
    report.gains.push_back(replay.regularized_gain(v));
    replay.add(v);
  }
  report.solution.ids = best_ids;
  finish(report, matrix, points, candidates, k, q, reg, start);
  return report;
}

Solution random_solution(std::size_t m, int k, std::uint64_t seed) {
  if (k < 0 || static_cast<std::size_t>(k) > m)
    throw InvalidArgument("k = " + std::to_string(k) + " out of range [0, " + std::to_string(m) + "]");
  std::vector<int> ids(m);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(seed);
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.index(m - static_cast<std::size_t>(i));
    std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(k));
  std::sort(ids.begin(), ids.end());
  return Solution{ids, k};
}

}  // namespace camnet
