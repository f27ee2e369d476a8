#pragma once

#include "camnet/visibility.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

namespace camnet {

enum class TransferMode { Quality, UncoveredOnly, Custom };

TransferMode transfer_mode_from_string(const std::string& name);
std::string to_string(TransferMode mode);

struct ControlPoint {
  double value = 0.0;
  Eigen::Vector4d rgba = Eigen::Vector4d::Zero();
};

/// Color/opacity as a piecewise-linear function of the per-point count.
struct TransferFunction {
  TransferMode mode = TransferMode::Quality;
  std::vector<ControlPoint> points;

  static TransferFunction quality(double max_count);
  static TransferFunction uncovered_only();
  void validate() const;
  Eigen::Vector4d color(double value) const;
};

struct LiveCamera {
  int id = 0;
  CameraSpec spec;
  Pose pose;
};

/// Immutable state of one committed revision.
struct SessionSnapshot {
  std::uint64_t revision = 0;
  std::vector<LiveCamera> cameras;
  VisCounts counts;
  std::size_t covered = 0;
  // Weighted covered fraction.
  double coverage = 0.0;
};

struct UpdateSummary {
  std::uint64_t revision = 0;
  int camera_id = -1;
  std::size_t changed_points = 0;
  double recompute_ms = 0.0;
};

struct LatencyStats {
  std::vector<double> samples_ms;
  double mean_ms = 0.0;
  double max_ms = 0.0;

  std::size_t count() const { return samples_ms.size(); }
};

enum class VolumeEncoding : std::uint8_t { Counts16 = 0, Bitmask = 1 };

/// Wire frame: revision u64 LE, n_points u32 LE, encoding u8, payload.
/// Counts16 carries one u16 LE per point (saturated); Bitmask carries
/// ceil(n/8) bytes, bit e (LSB-first) set when point e is uncovered.
struct VolumeFrame {
  std::uint64_t revision = 0;
  std::uint32_t n_points = 0;
  VolumeEncoding encoding = VolumeEncoding::Counts16;
  std::vector<std::uint8_t> payload;

  static constexpr std::size_t kHeaderSize = 13;

  std::vector<std::uint8_t> encode() const;
  static VolumeFrame decode(std::span<const std::uint8_t> bytes);

  std::uint16_t count(std::size_t e) const;
  bool uncovered(std::size_t e) const;
};

VolumeFrame make_volume_frame(const SessionSnapshot& snapshot, TransferMode mode);

/// Camera poses and specs of one revision, consumable by the audit and the
/// external-solution evaluation.
struct SessionExport {
  std::uint64_t revision = 0;
  std::vector<LiveCamera> cameras;
  double coverage = 0.0;

  std::vector<Viewpoint> viewpoints() const;
};

class Session {
public:
  struct Options {
    VisibilityMethod method = VisibilityMethod::ZBuffer;
    // Negative: default_depth_bias from the scene bounds.
    double bias = -1.0;
    std::size_t latency_window = 4096;
  };

  Session(std::shared_ptr<const Scene> scene, EnvironmentPoints points, const std::vector<LiveCamera>& cameras,
          Options options);

  UpdateSummary move_camera(int id, const Pose& pose);
  UpdateSummary add_camera(const CameraSpec& spec, const Pose& pose);
  UpdateSummary remove_camera(int id);

  /// Latest committed revision. Never waits for an in-flight recompute.
  std::shared_ptr<const SessionSnapshot> snapshot() const;

  VolumeFrame get_volume(TransferMode mode) const;
  SessionExport export_solution() const;
  LatencyStats latency_stats() const;

  /// From-scratch counts over all live cameras, ignoring the cache.
  VisCounts recompute_counts() const;

  const EnvironmentPoints& points() const { return points_; }
  const Scene& scene() const { return *scene_; }
  double bias() const { return bias_; }

  TransferFunction transfer_function() const;
  void set_transfer_function(TransferFunction tf);

private:
  BitVector visibility(const CameraSpec& spec, const Pose& pose) const;
  std::shared_ptr<SessionSnapshot> next_snapshot() const;
  void commit(std::shared_ptr<SessionSnapshot> snap, UpdateSummary& summary,
              std::chrono::steady_clock::time_point start);
  void finish_counts(SessionSnapshot& snap) const;

  std::shared_ptr<const Scene> scene_;
  EnvironmentPoints points_;
  Options options_;
  double bias_;

  mutable std::mutex write_mutex_;
  std::map<int, BitVector> cache_;
  int next_id_ = 0;

  mutable std::mutex read_mutex_;
  std::shared_ptr<const SessionSnapshot> current_;
  std::deque<double> latency_ms_;
  TransferFunction transfer_;
};

/// Single-writer command queue in front of a Session. Commands run on a
/// worker thread; pending moves of the same camera are coalesced so that
/// only the latest pose is rendered.
class SessionRunner {
public:
  struct Command {
    enum class Type { Move, Add, Remove } type = Type::Move;
    int id = -1;
    CameraSpec spec;
    Pose pose;
  };

  struct Result {
    bool ok = true;
    std::string error;
    UpdateSummary summary;
  };

  using CommitCallback = std::function<void(const Result&, std::shared_ptr<const SessionSnapshot>)>;

  SessionRunner(Session& session, CommitCallback on_commit);
  ~SessionRunner();
  SessionRunner(const SessionRunner&) = delete;
  SessionRunner& operator=(const SessionRunner&) = delete;

  void submit(Command command);
  // Blocks until the queue is empty and no command is running.
  void wait_idle();
  void stop();

  std::size_t coalesced() const;

private:
  void run();

  Session& session_;
  CommitCallback on_commit_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<Command> queue_;
  bool busy_ = false;
  bool stopping_ = false;
  std::size_t coalesced_ = 0;
  std::thread worker_;
};

}  // namespace camnet
