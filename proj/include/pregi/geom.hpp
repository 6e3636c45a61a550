#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace pregi {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rigid transform: x -> rotation * x + translation.
struct RigidPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidPose identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_vector(const Vec3& v) const { return rotation * v; }

  RigidPose inverse() const
  {
    RigidPose inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  Mat4 matrix() const
  {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  static RigidPose from_matrix(const Mat4& m)
  {
    RigidPose p;
    p.rotation = m.topLeftCorner<3, 3>();
    p.translation = m.topRightCorner<3, 1>();
    return p;
  }
};

/// compose(a, b): first apply b, then a.
inline RigidPose compose(const RigidPose& a, const RigidPose& b)
{
  RigidPose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

inline RigidPose operator*(const RigidPose& a, const RigidPose& b) { return compose(a, b); }

Mat3 rotation_exp(const Vec3& omega);
Vec3 rotation_log(const Mat3& rot);

/// Rotation about an arbitrary fixed point.
RigidPose rotation_about_point(const Mat3& rot, const Vec3& center);

/// 6-DOF parameterization of pose increments about a reference pose.
/// coords = (wx, wy, wz, tx, ty, tz); rotations in radians, translations in mm.
/// coords == 0 maps to the reference exactly. The exponential-map increment is
/// applied on the target-frame side of the reference, with the rotation taken
/// about `center_of_rotation` (expressed in the reference's target frame).
struct PoseParams {
  Vec6 coords = Vec6::Zero();
  RigidPose reference;
  Vec3 center_of_rotation = Vec3::Zero();
};

RigidPose se3_apply(const PoseParams& params);

struct PoseError {
  double rot_total_deg = 0.0;
  Vec3 rot_xyz_deg = Vec3::Zero();
  double trans_total_mm = 0.0;
  Vec3 trans_xyz_mm = Vec3::Zero();
};

/// Decomposes estimate * truth^-1 with the rotation taken about `center`.
/// Both poses map the object frame into the camera frame; per-axis rotation
/// components use an x-y-z Euler factorization of the relative rotation.
PoseError pose_error(const RigidPose& estimate, const RigidPose& truth, const Vec3& center);

/// Perspective projection geometry of a C-arm style imager.
/// Camera frame: source at origin, detector plane at z = source_to_detector.
/// 2D pixel coordinates are (x, y) = (column, row).
struct CameraModel {
  double source_to_detector = 0.0;  // mm
  int detector_rows = 0;
  int detector_cols = 0;
  double pixel_spacing = 0.0;  // mm / pixel, isotropic
  Vec2 principal_point = Vec2::Zero();  // pixels, (x, y)
  RigidPose extrinsic;  // world -> camera

  /// Geometry of the detector after block-downsampling by `factor`.
  CameraModel downsampled(int factor) const;
};

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // unit length

  Vec3 point_at(double t) const { return origin + t * direction; }
};

Vec2 project_point(const CameraModel& camera, const Vec3& p_world);
Ray pixel_ray(const CameraModel& camera, const Vec2& pixel);

/// Least-squares point minimizing the sum of squared perpendicular distances.
Vec3 triangulate(const std::vector<Ray>& rays);

/// Transform mapping frame-a coordinates to frame-b coordinates through the
/// shared object frame: pose_b * pose_a^-1.
inline RigidPose relative_pose(const RigidPose& pose_a, const RigidPose& pose_b)
{
  return compose(pose_b, pose_a.inverse());
}

inline double deg2rad(double d) { return d * M_PI / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / M_PI; }

}  // namespace pregi
