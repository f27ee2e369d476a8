#pragma once

#include "camnet/optimize.hpp"
#include "camnet/scenes.hpp"

#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

namespace camnet::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("camnet_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

// Random n x m visibility matrix with independent bits.
inline VisibilityMatrix random_matrix(std::size_t n, std::size_t m, double density, std::mt19937_64& gen) {
  VisibilityMatrix mat(n, m);
  std::bernoulli_distribution bit(density);
  for (std::size_t v = 0; v < m; ++v)
    for (std::size_t e = 0; e < n; ++e)
      if (bit(gen)) mat.set(e, v, true);
  return mat;
}

inline EnvironmentPoints unit_points(std::size_t n) { return EnvironmentPoints(Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(n))); }

inline EnvironmentPoints random_weighted_points(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> w(0.1, 2.0);
  Eigen::VectorXd weights(static_cast<Eigen::Index>(n));
  for (auto& x : weights) x = w(gen);
  return EnvironmentPoints(Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(n)), weights);
}

// Placeholder candidates for matrix-only tests.
inline CandidateSet dummy_candidates(std::size_t m) {
  CandidateSet c;
  for (std::size_t i = 0; i < m; ++i) {
    Viewpoint v;
    v.id = static_cast<int>(i);
    c.viewpoints.push_back(v);
  }
  return c;
}

// G(U) straight from the definition: per point, count the cameras in U that
// see it by reading single bits, then sum w_e * t(count).
inline double oracle_G(const VisibilityMatrix& mat, const EnvironmentPoints& pts, const std::vector<int>& subset,
                       const QualityFunction& q) {
  double total = 0.0;
  for (std::size_t e = 0; e < mat.n_points(); ++e) {
    std::uint32_t c = 0;
    for (const int v : subset) c += mat.bit(e, static_cast<std::size_t>(v)) ? 1u : 0u;
    total += pts.weights[static_cast<Eigen::Index>(e)] * q.t(c);
  }
  return total;
}

// Random quality function of one of the three core kinds.
inline QualityFunction random_quality(int kind, std::mt19937_64& gen) {
  switch (kind % 3) {
    case 0: return QualityFunction::scp();
    case 1: return QualityFunction::redundancy(sample_quality_weights(gen(), 1 + static_cast<int>(gen() % 6)));
    default: return QualityFunction::threshold_count(1 + static_cast<int>(gen() % 4));
  }
}

}  // namespace camnet::testing
