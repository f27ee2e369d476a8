#include "camnet/objective.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace camnet {

QualityWeights::QualityWeights(std::vector<double> s) : s_(std::move(s)) {
  if (s_.empty()) throw InvalidArgument("quality weights need at least one level");
  for (std::size_t i = 0; i < s_.size(); ++i) {
    if (!(s_[i] >= 0.0)) throw InvalidArgument("quality weights must be nonnegative");
    if (i > 0 && s_[i] > s_[i - 1]) throw InvalidArgument("quality weights must be nonincreasing");
  }
  const double sum = std::accumulate(s_.begin(), s_.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("quality weights must sum to 1");
}

std::vector<double> QualityWeights::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  std::vector<double> out(s_);
  for (auto& v : out) v *= factor;
  return out;
}

QualityWeights sample_quality_weights(std::uint64_t seed, int levels) {
  if (levels < 1) throw InvalidArgument("levels must be at least 1");
  Rng rng(seed);
  std::vector<double> s(static_cast<std::size_t>(levels));
  for (auto& v : s) v = rng.uniform();
  std::sort(s.begin(), s.end(), std::greater<>());
  const double sum = std::accumulate(s.begin(), s.end(), 0.0);
  for (auto& v : s) v /= sum;
  return QualityWeights(std::move(s));
}

std::string to_string(QualityKind kind) {
  switch (kind) {
    case QualityKind::Scp: return "scp";
    case QualityKind::Redundancy: return "redundancy";
    case QualityKind::ThresholdCount: return "threshold_count";
    case QualityKind::CustomTable: return "custom_table";
  }
  return "unknown";
}

QualityFunction::QualityFunction(QualityKind kind, std::vector<double> increments, std::vector<double> parameters,
                                 std::uint64_t seed)
    : kind_(kind), increments_(std::move(increments)), parameters_(std::move(parameters)), seed_(seed) {
  // Trailing zero increments carry no information.
  while (!increments_.empty() && increments_.back() == 0.0) increments_.pop_back();
  for (std::size_t i = 0; i < increments_.size(); ++i) {
    if (!(increments_[i] >= 0.0)) throw InvalidArgument("quality function must be nondecreasing");
    if (i > 0 && increments_[i] > increments_[i - 1])
      throw InvalidArgument("quality function increments must be nonincreasing");
  }
  values_.resize(increments_.size() + 1);
  values_[0] = 0.0;
  for (std::size_t i = 0; i < increments_.size(); ++i) values_[i + 1] = values_[i] + increments_[i];
}

QualityFunction QualityFunction::scp() { return QualityFunction(QualityKind::Scp, {1.0}, {}, 0); }

QualityFunction QualityFunction::redundancy(const std::vector<double>& weights, std::uint64_t seed) {
  if (weights.empty()) throw InvalidArgument("redundancy weights must not be empty");
  return QualityFunction(QualityKind::Redundancy, weights, weights, seed);
}

QualityFunction QualityFunction::redundancy(const QualityWeights& weights, std::uint64_t seed) {
  return redundancy(weights.values(), seed);
}

QualityFunction QualityFunction::threshold_count(int cap) {
  if (cap < 1) throw InvalidArgument("threshold cap must be at least 1");
  return QualityFunction(QualityKind::ThresholdCount, std::vector<double>(static_cast<std::size_t>(cap), 1.0),
                         {static_cast<double>(cap)}, 0);
}

QualityFunction QualityFunction::custom_table(std::vector<double> values) {
  if (values.empty() || values.front() != 0.0) throw InvalidArgument("custom table must start with t(0) = 0");
  std::vector<double> inc(values.size() - 1);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) inc[i] = values[i + 1] - values[i];
  return QualityFunction(QualityKind::CustomTable, std::move(inc), std::move(values), 0);
}

Regularizer Regularizer::proximity(double alpha, double min_separation) {
  Regularizer r;
  r.alpha = alpha;
  r.kind = RegularizerKind::Proximity;
  r.min_separation = min_separation;
  r.validate(0);
  return r;
}

Regularizer Regularizer::custom(double alpha, Eigen::MatrixXd matrix) {
  Regularizer r;
  r.alpha = alpha;
  r.kind = RegularizerKind::CustomMatrix;
  r.matrix = std::move(matrix);
  r.validate(static_cast<std::size_t>(r.matrix.rows()));
  return r;
}

void Regularizer::validate(std::size_t m_cameras) const {
  if (!(alpha >= 0.0)) throw InvalidArgument("regularizer alpha must be nonnegative");
  if (kind == RegularizerKind::Proximity && !(min_separation >= 0.0))
    throw InvalidArgument("min_separation must be nonnegative");
  if (kind == RegularizerKind::CustomMatrix) {
    if (matrix.rows() != matrix.cols() || static_cast<std::size_t>(matrix.rows()) != m_cameras)
      throw InvalidArgument("regularizer matrix must be m x m");
    if ((matrix.array() < 0.0).any()) throw InvalidArgument("regularizer matrix must be nonnegative");
    if (matrix != matrix.transpose())
      throw InvalidArgument("regularizer matrix must be symmetric");
  }
}

double Regularizer::penalty(const CandidateSet& candidates, int u, int v) const {
  switch (kind) {
    case RegularizerKind::None: return 0.0;
    case RegularizerKind::Proximity: {
      const double d = (candidates[static_cast<std::size_t>(u)].pose.position() -
                        candidates[static_cast<std::size_t>(v)].pose.position())
                           .norm();
      return std::max(0.0, min_separation - d);
    }
    case RegularizerKind::CustomMatrix: return matrix(u, v);
  }
  return 0.0;
}

void validate_subset(std::span<const int> subset, std::size_t m_cameras) {
  std::vector<bool> seen(m_cameras, false);
  for (const int v : subset) {
    if (v < 0 || static_cast<std::size_t>(v) >= m_cameras)
      throw InvalidArgument("camera id " + std::to_string(v) + " out of range");
    if (seen[static_cast<std::size_t>(v)]) throw InvalidArgument("camera id " + std::to_string(v) + " repeated");
    seen[static_cast<std::size_t>(v)] = true;
  }
}

namespace {

void check_points(const VisibilityMatrix& matrix, const EnvironmentPoints& points) {
  if (matrix.n_points() != points.size()) throw InvalidArgument("matrix rows do not match the point set");
}

}  // namespace

double G_eval(const VisibilityMatrix& matrix, const EnvironmentPoints& points, std::span<const int> subset,
              const QualityFunction& q) {
  check_points(matrix, points);
  validate_subset(subset, matrix.m_cameras());
  const VisCounts counts = f_counts(matrix, subset);
  double total = 0.0;
  for (std::size_t e = 0; e < counts.size(); ++e) total += points.weights[static_cast<Eigen::Index>(e)] * q.t(counts[e]);
  return total;
}

double marginal_gain(const VisibilityMatrix& matrix, const EnvironmentPoints& points, std::span<const int> subset,
                     int v, const QualityFunction& q) {
  check_points(matrix, points);
  validate_subset(subset, matrix.m_cameras());
  if (v < 0 || static_cast<std::size_t>(v) >= matrix.m_cameras())
    throw InvalidArgument("camera id " + std::to_string(v) + " out of range");
  if (std::find(subset.begin(), subset.end(), v) != subset.end())
    throw InvalidArgument("camera " + std::to_string(v) + " is already in the set");
  const VisCounts counts = f_counts(matrix, subset);
  double gain = 0.0;
  matrix.column(static_cast<std::size_t>(v)).for_each_set([&](std::size_t e) {
    gain += points.weights[static_cast<Eigen::Index>(e)] * q.increment(counts[e]);
  });
  return gain;
}

double regularized_objective(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                             std::span<const int> subset, const QualityFunction& q, const Regularizer& reg,
                             const CandidateSet& candidates) {
  const double g = G_eval(matrix, points, subset, q);
  if (!reg.active()) return g;
  double penalty = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b) penalty += reg.penalty(candidates, subset[a], subset[b]);
  return g - reg.alpha * penalty;
}

double coverage(const VisibilityMatrix& matrix, const EnvironmentPoints& points, std::span<const int> subset) {
  check_points(matrix, points);
  const VisCounts counts = f_counts(matrix, subset);
  const double total = points.total_weight();
  if (!(total > 0.0)) return 0.0;
  double seen = 0.0;
  for (std::size_t e = 0; e < counts.size(); ++e)
    if (counts[e] > 0) seen += points.weights[static_cast<Eigen::Index>(e)];
  return seen / total;
}

IncrementalObjective::IncrementalObjective(const VisibilityMatrix& matrix, const EnvironmentPoints& points,
                                           const QualityFunction& q, const Regularizer& reg,
                                           const CandidateSet& candidates)
    : matrix_(matrix), points_(points), q_(q), reg_(reg), candidates_(candidates),
      counts_(matrix.n_points(), 0), in_set_(matrix.m_cameras(), false) {
  check_points(matrix, points);
  if (reg.active()) reg.validate(reg.kind == RegularizerKind::CustomMatrix ? matrix.m_cameras() : 0);
  if (reg.active() && reg.kind == RegularizerKind::Proximity && candidates.size() != matrix.m_cameras())
    throw InvalidArgument("proximity regularizer needs one candidate pose per matrix column");
}

double IncrementalObjective::gain(int v) const {
  double g = 0.0;
  matrix_.column(static_cast<std::size_t>(v)).for_each_set([&](std::size_t e) {
    g += points_.weights[static_cast<Eigen::Index>(e)] * q_.increment(counts_[e]);
  });
  return g;
}

double IncrementalObjective::regularized_gain(int v) const {
  const double g = gain(v);
  if (!reg_.active()) return g;
  double penalty = 0.0;
  for (const int u : selected_) penalty += reg_.penalty(candidates_, u, v);
  return g - reg_.alpha * penalty;
}

void IncrementalObjective::add(int v) {
  if (v < 0 || static_cast<std::size_t>(v) >= matrix_.m_cameras())
    throw InvalidArgument("camera id " + std::to_string(v) + " out of range");
  if (in_set_[static_cast<std::size_t>(v)]) throw InvalidArgument("camera " + std::to_string(v) + " already selected");
  matrix_.column(static_cast<std::size_t>(v)).for_each_set([&](std::size_t e) { ++counts_[e]; });
  in_set_[static_cast<std::size_t>(v)] = true;
  selected_.push_back(v);
}

}  // namespace camnet
