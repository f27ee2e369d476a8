#pragma once

#include "camnet/objective.hpp"

#include <string>
#include <vector>

namespace camnet {

struct OptimizerReport {
  std::string algorithm;
  Solution solution;
  // Regularized marginal gain of each selected camera, in selection order.
  std::vector<double> gains;
  // Number of marginal-gain or objective evaluations.
  long long evaluations = 0;
  double wall_seconds = 0.0;
  // Regularized objective of the final solution.
  double objective = 0.0;
  // False when alpha > 0: the (1 - 1/e) guarantee does not apply.
  bool approximation_guarantee = true;
};

/// Naive greedy: every step evaluates every remaining candidate and adds the
/// one with the largest regularized gain, lowest id on ties.
OptimizerReport greedy(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                       const CandidateSet& candidates, int k, const QualityFunction& q,
                       const Regularizer& reg = {});

/// Lazy (priority-queue) greedy returning the same solution as greedy().
/// Gains only shrink as the selection grows, so stale upper bounds can be
/// skipped.
OptimizerReport lazy_greedy(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                            const CandidateSet& candidates, int k, const QualityFunction& q,
                            const Regularizer& reg = {});

inline constexpr long long kDefaultBruteForceBudget = 2'000'000;

class BudgetExceeded : public Error {
public:
  using Error::Error;
};

/// Exhaustive search over all k-subsets in lexicographic order; the first
/// maximum wins.
OptimizerReport brute_force(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                            const CandidateSet& candidates, int k, const QualityFunction& q,
                            const Regularizer& reg = {}, long long budget = kDefaultBruteForceBudget);

/// Uniform k-subset of [0, m), sorted ascending.
Solution random_solution(std::size_t m, int k, std::uint64_t seed);

long long binomial(long long n, long long k);

}  // namespace camnet
