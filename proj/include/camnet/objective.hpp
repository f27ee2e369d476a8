#pragma once

#include "camnet/discretize.hpp"
#include "camnet/visibility.hpp"

#include <span>
#include <string>
#include <vector>

namespace camnet {

/// Nonincreasing weights s_1 >= ... >= s_L >= 0 summing to one.
class QualityWeights {
public:
  explicit QualityWeights(std::vector<double> s);

  const std::vector<double>& values() const { return s_; }
  std::size_t levels() const { return s_.size(); }

  // Scaled copy without the unit-sum check; scaling cancels in ratio tables.
  std::vector<double> scaled(double factor) const;

private:
  std::vector<double> s_;
};

/// L iid uniforms, sorted descending, normalized to sum one.
QualityWeights sample_quality_weights(std::uint64_t seed, int levels = 6);

enum class QualityKind { Scp, Redundancy, ThresholdCount, CustomTable };

std::string to_string(QualityKind kind);

/// Per-point quality t(count). Stored as the increments t(c+1) - t(c), which
/// are nonincreasing for every constructible function, plus cumulative values.
class QualityFunction {
public:
  static QualityFunction scp();
  // Unnormalized weights are allowed here as long as they are nonincreasing
  // and nonnegative.
  static QualityFunction redundancy(const std::vector<double>& weights, std::uint64_t seed = 0);
  static QualityFunction redundancy(const QualityWeights& weights, std::uint64_t seed = 0);
  static QualityFunction threshold_count(int cap);
  // values[c] = t(c); values[0] must be 0 and increments nonincreasing.
  static QualityFunction custom_table(std::vector<double> values);

  QualityKind kind() const { return kind_; }
  // t(count); constant beyond the saturation count.
  double t(std::uint32_t count) const { return count < values_.size() ? values_[count] : values_.back(); }
  // t(count + 1) - t(count).
  double increment(std::uint32_t count) const { return count < increments_.size() ? increments_[count] : 0.0; }

  std::size_t saturation() const { return increments_.size(); }
  const std::vector<double>& increments() const { return increments_; }
  // Parameters as given: weights for redundancy, cap for threshold, table for custom.
  const std::vector<double>& parameters() const { return parameters_; }
  std::uint64_t seed() const { return seed_; }

private:
  QualityFunction(QualityKind kind, std::vector<double> increments, std::vector<double> parameters,
                  std::uint64_t seed);

  QualityKind kind_;
  std::vector<double> increments_;
  std::vector<double> values_;
  std::vector<double> parameters_;
  std::uint64_t seed_ = 0;
};

enum class RegularizerKind { None, Proximity, CustomMatrix };

/// Pairwise penalty r over viewpoints scaled by alpha.
struct Regularizer {
  double alpha = 0.0;
  RegularizerKind kind = RegularizerKind::None;
  double min_separation = 0.0;
  Eigen::MatrixXd matrix;

  static Regularizer none() { return {}; }
  static Regularizer proximity(double alpha, double min_separation);
  static Regularizer custom(double alpha, Eigen::MatrixXd matrix);

  bool active() const { return alpha > 0.0 && kind != RegularizerKind::None; }
  void validate(std::size_t m_cameras) const;
  // r(u, v), without alpha.
  double penalty(const CandidateSet& candidates, int u, int v) const;
};

/// Selected camera ids in selection order.
struct Solution {
  std::vector<int> ids;
  int k = 0;

  std::size_t size() const { return ids.size(); }
  friend bool operator==(const Solution&, const Solution&) = default;
};

void validate_subset(std::span<const int> subset, std::size_t m_cameras);

/// G(U) = sum_e w_e t(f(e, U)).
double G_eval(const VisibilityMatrix& matrix, const EnvironmentPoints& points, std::span<const int> subset,
              const QualityFunction& q);

double marginal_gain(const VisibilityMatrix& matrix, const EnvironmentPoints& points, std::span<const int> subset,
                     int v, const QualityFunction& q);

/// G(U) - alpha * sum over unordered pairs of r.
double regularized_objective(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                             std::span<const int> subset, const QualityFunction& q, const Regularizer& reg,
                             const CandidateSet& candidates);

/// Weighted fraction of points seen at least once.
double coverage(const VisibilityMatrix& matrix, const EnvironmentPoints& points, std::span<const int> subset);

/// Caller-owned cache of f(e, U) for a growing U. Gains are computed from the
/// cached counts and the candidate's column only.
class IncrementalObjective {
public:
  IncrementalObjective(const VisibilityMatrix& matrix, const EnvironmentPoints& points, const QualityFunction& q,
                       const Regularizer& reg, const CandidateSet& candidates);

  // Unregularized gain G(U + v) - G(U).
  double gain(int v) const;
  // Gain minus alpha * sum_{u in U} r(u, v).
  double regularized_gain(int v) const;
  void add(int v);

  const std::vector<int>& selected() const { return selected_; }
  bool contains(int v) const { return in_set_[static_cast<std::size_t>(v)]; }
  const VisCounts& counts() const { return counts_; }

private:
  const VisibilityMatrix& matrix_;
  const EnvironmentPoints& points_;
  const QualityFunction& q_;
  const Regularizer& reg_;
  const CandidateSet& candidates_;
  VisCounts counts_;
  std::vector<int> selected_;
  std::vector<bool> in_set_;
};

}  // namespace camnet
