#pragma once

#include "pregi/geom.hpp"
#include "pregi/image.hpp"

#include <map>
#include <string>
#include <vector>

namespace pregi {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// MHD-style two-file format: plain-text header plus raw little-endian
/// binary. Element types: MET_FLOAT (32-bit float) and MET_USHORT
/// (16-bit unsigned). Round trips are bit-exact.
void write_volume(const std::string& header_path, const Volume3D& vol);
Volume3D read_volume(const std::string& header_path);

void write_labels(const std::string& header_path, const LabelVolume& labels);
LabelVolume read_labels(const std::string& header_path);

void write_image(const std::string& header_path, const Image2D& img);
Image2D read_image(const std::string& header_path);

/// 4x4 homogeneous row-major matrix as plain text.
void write_pose(const std::string& path, const RigidPose& pose);
RigidPose read_pose(const std::string& path);

/// Named 3D points, one `name x y z` line each.
void write_named_points(const std::string& path, const std::vector<std::pair<std::string, Vec3>>& points);
std::vector<std::pair<std::string, Vec3>> read_named_points(const std::string& path);

/// Camera geometry as a small plain-text key-value file.
void write_camera(const std::string& path, const CameraModel& camera);
CameraModel read_camera(const std::string& path);

/// Consistent float formatting for text outputs (shortest round-trip-safe).
std::string format_double(double v);

}  // namespace pregi
