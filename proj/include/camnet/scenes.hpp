#pragma once

#include "camnet/discretize.hpp"
#include "camnet/geometry.hpp"

#include <string>
#include <vector>

namespace camnet {

/// Appends an axis-aligned box with outward-facing triangles.
void append_box(TriangleMesh& mesh, const Vec3& lo, const Vec3& hi, const std::string& label = {});

/// Container yard with two elevated crane beams. Cameras ride on the beams.
struct HarbourLayout {
  TriangleMesh mesh;
  RoiBox roi;                      // region of interest over the yard
  std::vector<Aabbd> aisles;       // free space between container rows
  std::vector<Segment> beams;      // camera rails, just below each beam
  std::vector<Vec3> orientations;  // view directions offered at every rail position
};

HarbourLayout harbour_scene();

/// 40 m x 40 m x 3 m open-plan floor with partitions, desks and pillars.
TriangleMesh office_scene();

/// Undulating parking deck: heightfield with `cells` x `cells` quads plus
/// pillars and parked cars. cells = 230 gives just over 100k triangles.
TriangleMesh carpark_scene(int cells = 230);

/// Empty convex room seen from inside: no point in the interior can hide
/// another from a camera in the interior.
TriangleMesh room_scene(const Vec3& size = Vec3(10.0, 8.0, 3.0));

/// Random axis-aligned boxes on a ground plane.
TriangleMesh clutter_scene(int boxes, std::uint64_t seed, double extent = 20.0);

/// Generator by name: harbour, office, carpark, room, clutter.
TriangleMesh generate_scene(const std::string& name, std::uint64_t seed = 1);

}  // namespace camnet
