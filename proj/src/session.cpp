#include "camnet/session.hpp"

#include "binary_io.hpp"

#include <algorithm>
#include <numeric>

namespace camnet {

TransferMode transfer_mode_from_string(const std::string& name) {
  if (name == "quality") return TransferMode::Quality;
  if (name == "uncovered_only") return TransferMode::UncoveredOnly;
  if (name == "custom") return TransferMode::Custom;
  throw InvalidArgument("unknown transfer mode '" + name + "' (expected quality, uncovered_only or custom)");
}

std::string to_string(TransferMode mode) {
  switch (mode) {
    case TransferMode::Quality: return "quality";
    case TransferMode::UncoveredOnly: return "uncovered_only";
    case TransferMode::Custom: return "custom";
  }
  return "unknown";
}

TransferFunction TransferFunction::quality(double max_count) {
  if (!(max_count > 0.0)) throw InvalidArgument("transfer function range must be positive");
  TransferFunction tf;
  tf.mode = TransferMode::Quality;
  tf.points = {{0.0, {0.85, 0.1, 0.1, 0.6}},
               {1.0, {0.95, 0.75, 0.1, 0.25}},
               {max_count, {0.1, 0.8, 0.2, 0.05}}};
  if (max_count <= 1.0) tf.points.erase(tf.points.begin() + 1);
  return tf;
}

TransferFunction TransferFunction::uncovered_only() {
  TransferFunction tf;
  tf.mode = TransferMode::UncoveredOnly;
  tf.points = {{0.0, {0.9, 0.1, 0.1, 0.8}}, {0.5, {0.9, 0.1, 0.1, 0.0}}};
  return tf;
}

void TransferFunction::validate() const {
  if (points.empty()) throw InvalidArgument("transfer function needs at least one control point");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && !(points[i].value > points[i - 1].value))
      throw InvalidArgument("transfer function control values must be strictly increasing");
    if ((points[i].rgba.array() < 0.0).any() || (points[i].rgba.array() > 1.0).any())
      throw InvalidArgument("transfer function colors must lie in [0, 1]");
  }
}

Eigen::Vector4d TransferFunction::color(double value) const {
  if (points.empty()) return Eigen::Vector4d::Zero();
  if (value <= points.front().value) return points.front().rgba;
  if (value >= points.back().value) return points.back().rgba;
  const auto hi = std::upper_bound(points.begin(), points.end(), value,
                                   [](double v, const ControlPoint& p) { return v < p.value; });
  const auto lo = hi - 1;
  const double t = (value - lo->value) / (hi->value - lo->value);
  return (1.0 - t) * lo->rgba + t * hi->rgba;
}

std::vector<std::uint8_t> VolumeFrame::encode() const {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + payload.size());
  detail::append_le(out, revision);
  detail::append_le(out, n_points);
  out.push_back(static_cast<std::uint8_t>(encoding));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

VolumeFrame VolumeFrame::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw InvalidArgument("volume frame shorter than its header");
  VolumeFrame f;
  f.revision = detail::load_le<std::uint64_t>(bytes.data());
  f.n_points = detail::load_le<std::uint32_t>(bytes.data() + 8);
  const std::uint8_t enc = bytes[12];
  if (enc > 1) throw InvalidArgument("unknown volume encoding " + std::to_string(enc));
  f.encoding = static_cast<VolumeEncoding>(enc);
  const std::size_t expected =
      f.encoding == VolumeEncoding::Counts16 ? std::size_t{f.n_points} * 2 : (std::size_t{f.n_points} + 7) / 8;
  if (bytes.size() != kHeaderSize + expected) throw InvalidArgument("volume frame payload has the wrong size");
  f.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
  return f;
}

std::uint16_t VolumeFrame::count(std::size_t e) const {
  if (encoding != VolumeEncoding::Counts16) throw InvalidArgument("frame does not carry counts");
  return detail::load_le<std::uint16_t>(payload.data() + 2 * e);
}

bool VolumeFrame::uncovered(std::size_t e) const {
  if (encoding == VolumeEncoding::Counts16) return count(e) == 0;
  return (payload[e >> 3] >> (e & 7)) & 1u;
}

VolumeFrame make_volume_frame(const SessionSnapshot& snapshot, TransferMode mode) {
  VolumeFrame f;
  f.revision = snapshot.revision;
  f.n_points = static_cast<std::uint32_t>(snapshot.counts.size());
  if (mode == TransferMode::UncoveredOnly) {
    f.encoding = VolumeEncoding::Bitmask;
    f.payload.assign((snapshot.counts.size() + 7) / 8, 0);
    for (std::size_t e = 0; e < snapshot.counts.size(); ++e)
      if (snapshot.counts[e] == 0) f.payload[e >> 3] |= static_cast<std::uint8_t>(1u << (e & 7));
  } else {
    f.encoding = VolumeEncoding::Counts16;
    f.payload.reserve(snapshot.counts.size() * 2);
    for (const auto c : snapshot.counts)
      detail::append_le(f.payload, static_cast<std::uint16_t>(std::min<std::uint32_t>(c, 0xffff)));
  }
  return f;
}

std::vector<Viewpoint> SessionExport::viewpoints() const {
  std::vector<Viewpoint> out;
  out.reserve(cameras.size());
  for (const auto& c : cameras) out.push_back(Viewpoint{c.spec, c.pose, c.id});
  return out;
}

Session::Session(std::shared_ptr<const Scene> scene, EnvironmentPoints points, const std::vector<LiveCamera>& cameras,
                 Options options)
    : scene_(std::move(scene)), points_(std::move(points)), options_(options), bias_(options.bias) {
  if (!scene_) throw InvalidArgument("session needs a scene");
  if (options_.latency_window == 0) throw InvalidArgument("latency window must be positive");
  transfer_ = TransferFunction::quality(std::max<double>(1.0, static_cast<double>(cameras.size())));

  auto snap = std::make_shared<SessionSnapshot>();
  snap->counts.assign(points_.size(), 0);
  std::vector<BitVector> columns(cameras.size());
  for (const auto& c : cameras) {
    c.spec.validate();
    if (c.id < 0) throw InvalidArgument("camera ids must be nonnegative");
    if (cache_.count(c.id)) throw InvalidArgument("duplicate camera id " + std::to_string(c.id));
    cache_[c.id] = BitVector();
  }
  parallel_for(cameras.size(), [&](std::size_t i) { columns[i] = visibility(cameras[i].spec, cameras[i].pose); });
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    columns[i].for_each_set([&](std::size_t e) { ++snap->counts[e]; });
    cache_[cameras[i].id] = std::move(columns[i]);
    next_id_ = std::max(next_id_, cameras[i].id + 1);
  }
  snap->cameras = cameras;
  finish_counts(*snap);
  current_ = std::move(snap);
}

BitVector Session::visibility(const CameraSpec& spec, const Pose& pose) const {
  const double bias = bias_ >= 0.0 ? bias_ : default_depth_bias(scene_->mesh.bounds(), spec);
  return compute_visibility(*scene_, Viewpoint{spec, pose, -1}, points_, options_.method, bias);
}

std::shared_ptr<SessionSnapshot> Session::next_snapshot() const {
  auto snap = std::make_shared<SessionSnapshot>(*snapshot());
  snap->revision += 1;
  return snap;
}

void Session::finish_counts(SessionSnapshot& snap) const {
  snap.covered = 0;
  double seen = 0.0;
  for (std::size_t e = 0; e < snap.counts.size(); ++e) {
    if (snap.counts[e] == 0) continue;
    ++snap.covered;
    seen += points_.weights[static_cast<Eigen::Index>(e)];
  }
  const double total = points_.total_weight();
  snap.coverage = total > 0.0 ? seen / total : 0.0;
}

void Session::commit(std::shared_ptr<SessionSnapshot> snap, UpdateSummary& summary,
                     std::chrono::steady_clock::time_point start) {
  finish_counts(*snap);
  summary.revision = snap->revision;
  summary.recompute_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::lock_guard lock(read_mutex_);
  current_ = std::move(snap);
  latency_ms_.push_back(summary.recompute_ms);
  while (latency_ms_.size() > options_.latency_window) latency_ms_.pop_front();
}

UpdateSummary Session::move_camera(int id, const Pose& pose) {
  const auto start = std::chrono::steady_clock::now();
  std::lock_guard lock(write_mutex_);
  auto it = cache_.find(id);
  if (it == cache_.end()) throw InvalidArgument("unknown camera id " + std::to_string(id));
  auto snap = next_snapshot();
  auto cam = std::find_if(snap->cameras.begin(), snap->cameras.end(), [&](const LiveCamera& c) { return c.id == id; });
  BitVector fresh = visibility(cam->spec, pose);

  UpdateSummary summary;
  summary.camera_id = id;
  const BitVector& old = it->second;
  for (std::size_t w = 0; w < fresh.word_count(); ++w) {
    const std::uint64_t a = old.word(w);
    const std::uint64_t b = fresh.word(w);
    std::uint64_t diff = a ^ b;
    summary.changed_points += static_cast<std::size_t>(std::popcount(diff));
    while (diff) {
      const int bit = std::countr_zero(diff);
      const std::size_t e = w * 64 + static_cast<std::size_t>(bit);
      if ((b >> bit) & 1u)
        ++snap->counts[e];
      else
        --snap->counts[e];
      diff &= diff - 1;
    }
  }
  cam->pose = pose;
  it->second = std::move(fresh);
  commit(std::move(snap), summary, start);
  return summary;
}

UpdateSummary Session::add_camera(const CameraSpec& spec, const Pose& pose) {
  const auto start = std::chrono::steady_clock::now();
  spec.validate();
  std::lock_guard lock(write_mutex_);
  auto snap = next_snapshot();
  BitVector fresh = visibility(spec, pose);
  UpdateSummary summary;
  summary.camera_id = next_id_++;
  fresh.for_each_set([&](std::size_t e) { ++snap->counts[e]; });
  summary.changed_points = fresh.count();
  snap->cameras.push_back(LiveCamera{summary.camera_id, spec, pose});
  cache_[summary.camera_id] = std::move(fresh);
  commit(std::move(snap), summary, start);
  return summary;
}

UpdateSummary Session::remove_camera(int id) {
  const auto start = std::chrono::steady_clock::now();
  std::lock_guard lock(write_mutex_);
  auto it = cache_.find(id);
  if (it == cache_.end()) throw InvalidArgument("unknown camera id " + std::to_string(id));
  auto snap = next_snapshot();
  UpdateSummary summary;
  summary.camera_id = id;
  it->second.for_each_set([&](std::size_t e) { --snap->counts[e]; });
  summary.changed_points = it->second.count();
  std::erase_if(snap->cameras, [&](const LiveCamera& c) { return c.id == id; });
  cache_.erase(it);
  commit(std::move(snap), summary, start);
  return summary;
}

std::shared_ptr<const SessionSnapshot> Session::snapshot() const {
  std::lock_guard lock(read_mutex_);
  return current_;
}

VolumeFrame Session::get_volume(TransferMode mode) const { return make_volume_frame(*snapshot(), mode); }

SessionExport Session::export_solution() const {
  const auto snap = snapshot();
  return SessionExport{snap->revision, snap->cameras, snap->coverage};
}

LatencyStats Session::latency_stats() const {
  LatencyStats stats;
  {
    std::lock_guard lock(read_mutex_);
    stats.samples_ms.assign(latency_ms_.begin(), latency_ms_.end());
  }
  if (!stats.samples_ms.empty()) {
    stats.mean_ms = std::accumulate(stats.samples_ms.begin(), stats.samples_ms.end(), 0.0) /
                    static_cast<double>(stats.samples_ms.size());
    stats.max_ms = *std::max_element(stats.samples_ms.begin(), stats.samples_ms.end());
  }
  return stats;
}

VisCounts Session::recompute_counts() const {
  const auto snap = snapshot();
  VisCounts counts(points_.size(), 0);
  std::vector<BitVector> columns(snap->cameras.size());
  parallel_for(columns.size(),
               [&](std::size_t i) { columns[i] = visibility(snap->cameras[i].spec, snap->cameras[i].pose); });
  for (const auto& col : columns) col.for_each_set([&](std::size_t e) { ++counts[e]; });
  return counts;
}

TransferFunction Session::transfer_function() const {
  std::lock_guard lock(read_mutex_);
  return transfer_;
}

void Session::set_transfer_function(TransferFunction tf) {
  tf.validate();
  std::lock_guard lock(read_mutex_);
  transfer_ = std::move(tf);
}

SessionRunner::SessionRunner(Session& session, CommitCallback on_commit)
    : session_(session), on_commit_(std::move(on_commit)) {
  worker_ = std::thread([this] { run(); });
}

SessionRunner::~SessionRunner() { stop(); }

void SessionRunner::submit(Command command) {
  {
    std::lock_guard lock(mutex_);
    if (stopping_) throw Error("session runner is stopped");
    if (command.type == Command::Type::Move && !queue_.empty()) {
      // Only the trailing run of the queue may be rewritten, so the relative
      // order of adds and removes is preserved.
      auto& last = queue_.back();
      if (last.type == Command::Type::Move && last.id == command.id) {
        last.pose = command.pose;
        ++coalesced_;
        return;
      }
    }
    queue_.push_back(std::move(command));
  }
  cv_.notify_one();
}

void SessionRunner::wait_idle() {
  std::unique_lock lock(mutex_);
  idle_cv_.wait(lock, [&] { return (queue_.empty() && !busy_) || stopping_; });
}

void SessionRunner::stop() {
  {
    std::lock_guard lock(mutex_);
    if (stopping_ && !worker_.joinable()) return;
    stopping_ = true;
  }
  cv_.notify_all();
  idle_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

std::size_t SessionRunner::coalesced() const {
  std::lock_guard lock(mutex_);
  return coalesced_;
}

void SessionRunner::run() {
  while (true) {
    Command cmd;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;  // stopping with nothing left
      cmd = std::move(queue_.front());
      queue_.pop_front();
      busy_ = true;
    }
    Result result;
    try {
      switch (cmd.type) {
        case Command::Type::Move: result.summary = session_.move_camera(cmd.id, cmd.pose); break;
        case Command::Type::Add: result.summary = session_.add_camera(cmd.spec, cmd.pose); break;
        case Command::Type::Remove: result.summary = session_.remove_camera(cmd.id); break;
      }
    } catch (const std::exception& e) {
      result.ok = false;
      result.error = e.what();
      result.summary.camera_id = cmd.id;
    }
    if (on_commit_) on_commit_(result, session_.snapshot());
    {
      std::lock_guard lock(mutex_);
      busy_ = false;
    }
    idle_cv_.notify_all();
  }
}

}  // namespace camnet
