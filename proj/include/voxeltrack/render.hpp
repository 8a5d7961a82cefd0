#pragma once

#include <string>
#include <vector>

#include "voxeltrack/tracker.hpp"

namespace voxeltrack {

// Per-frame per-view skeleton plots (SVG, colored by track id) plus a
// top-down trajectory plot of the pelvis per track.
void render_tracks(const std::string& out_dir, const std::vector<TrackRecord>& records,
                   const std::vector<CameraParams>& cameras, const Vec3& space_extent);

std::string skeleton_svg(const std::vector<TrackRecord>& frame_records, const CameraParams& camera);
std::string trajectory_svg(const std::vector<TrackRecord>& records, const Vec3& space_extent);

}  // namespace voxeltrack
