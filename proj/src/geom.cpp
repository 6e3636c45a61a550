#include "pregi/geom.hpp"

#include <cmath>

namespace pregi {

namespace {

Mat3 skew(const Vec3& v)
{
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace

Mat3 rotation_exp(const Vec3& omega)
{
  const double theta = omega.norm();
  const Mat3 k = skew(omega);
  if (theta < 1e-10)
  {
    // 2nd order series; exact to machine precision at this magnitude
    return Mat3::Identity() + k + 0.5 * (k * k);
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * k + b * (k * k);
}

Vec3 rotation_log(const Mat3& rot)
{
  const double tr = rot.trace();
  const double cos_theta = std::clamp((tr - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::acos(cos_theta);

  Vec3 axis_raw(rot(2, 1) - rot(1, 2), rot(0, 2) - rot(2, 0), rot(1, 0) - rot(0, 1));

  if (theta < 1e-8)
  {
    return 0.5 * axis_raw;
  }
  if (theta > M_PI - 1e-6)
  {
    // near pi: axis from the symmetric part
    const Mat3 s = 0.5 * (rot + Mat3::Identity());
    Vec3 axis(std::sqrt(std::max(0.0, s(0, 0))),
              std::sqrt(std::max(0.0, s(1, 1))),
              std::sqrt(std::max(0.0, s(2, 2))));
    int k = 0;
    axis.cwiseAbs().maxCoeff(&k);
    for (int i = 0; i < 3; ++i)
    {
      if (i != k && s(k, i) < 0.0) axis(i) = -axis(i);
    }
    if (axis_raw.dot(axis) < 0.0) axis = -axis;
    return theta * axis.normalized();
  }
  return (theta / (2.0 * std::sin(theta))) * axis_raw;
}

RigidPose rotation_about_point(const Mat3& rot, const Vec3& center)
{
  RigidPose p;
  p.rotation = rot;
  p.translation = center - rot * center;
  return p;
}

RigidPose se3_apply(const PoseParams& params)
{
  const Vec3 omega = params.coords.head<3>();
  const Vec3 t = params.coords.tail<3>();

  const Mat3 rot = rotation_exp(omega);

  // V-matrix of the SE(3) exponential maps the translation component.
  const double theta = omega.norm();
  const Mat3 k = skew(omega);
  Mat3 v;
  if (theta < 1e-10)
  {
    v = Mat3::Identity() + 0.5 * k + (1.0 / 6.0) * (k * k);
  }
  else
  {
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    const double c = (theta - std::sin(theta)) / (theta * theta * theta);
    v = Mat3::Identity() + b * k + c * (k * k);
  }

  RigidPose incr = rotation_about_point(rot, params.center_of_rotation);
  incr.translation += v * t;

  return compose(incr, params.reference);
}

namespace {

// XYZ Euler factorization: rot = Rx(a) * Ry(b) * Rz(c)
Vec3 euler_xyz(const Mat3& rot)
{
  const double sy = std::clamp(rot(0, 2), -1.0, 1.0);
  const double b = std::asin(sy);
  double a, c;
  if (std::abs(sy) < 1.0 - 1e-12)
  {
    a = std::atan2(-rot(1, 2), rot(2, 2));
    c = std::atan2(-rot(0, 1), rot(0, 0));
  }
  else
  {
    // gimbal lock: fold everything into a
    a = std::atan2(rot(2, 1), rot(1, 1));
    c = 0.0;
  }
  return Vec3(a, b, c);
}

}  // namespace

PoseError pose_error(const RigidPose& estimate, const RigidPose& truth, const Vec3& center)
{
  const RigidPose rel = compose(estimate, truth.inverse());

  PoseError err;
  err.rot_total_deg = rad2deg(rotation_log(rel.rotation).norm());
  err.rot_xyz_deg = rad2deg(1.0) * euler_xyz(rel.rotation);

  const Vec3 dt = rel.apply(center) - center;
  err.trans_total_mm = dt.norm();
  err.trans_xyz_mm = dt;
  return err;
}

CameraModel CameraModel::downsampled(int factor) const
{
  if (factor < 1) throw GeometryError("downsample factor must be >= 1");
  if (factor == 1) return *this;
  CameraModel c = *this;
  c.detector_rows = detector_rows / factor;
  c.detector_cols = detector_cols / factor;
  c.pixel_spacing = pixel_spacing * factor;
  // pixel-center mapping: x_ds = (x + 0.5)/factor - 0.5
  c.principal_point = (principal_point.array() + 0.5) / factor - 0.5;
  return c;
}

Vec2 project_point(const CameraModel& camera, const Vec3& p_world)
{
  const Vec3 p_cam = camera.extrinsic.apply(p_world);
  if (p_cam.z() <= 0.0)
  {
    throw GeometryError("project_point: point at non-positive depth");
  }
  const double scale = camera.source_to_detector / p_cam.z();
  return Vec2(p_cam.x() * scale / camera.pixel_spacing + camera.principal_point.x(),
              p_cam.y() * scale / camera.pixel_spacing + camera.principal_point.y());
}

Ray pixel_ray(const CameraModel& camera, const Vec2& pixel)
{
  const RigidPose cam_to_world = camera.extrinsic.inverse();
  const Vec3 detector_pt(
      (pixel.x() - camera.principal_point.x()) * camera.pixel_spacing,
      (pixel.y() - camera.principal_point.y()) * camera.pixel_spacing,
      camera.source_to_detector);

  Ray ray;
  ray.origin = cam_to_world.translation;  // source position in world
  ray.direction = (cam_to_world.apply(detector_pt) - ray.origin).normalized();
  return ray;
}

Vec3 triangulate(const std::vector<Ray>& rays)
{
  if (rays.size() < 2) throw GeometryError("triangulate: need at least 2 rays");

  Mat3 a = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (const Ray& r : rays)
  {
    const Vec3 d = r.direction.normalized();
    const Mat3 term = Mat3::Identity() - d * d.transpose();
    a += term;
    b += term * r.origin;
  }

  Eigen::SelfAdjointEigenSolver<Mat3> eig(a);
  if (eig.eigenvalues()(0) < 1e-9 * std::max(1.0, eig.eigenvalues()(2)))
  {
    throw GeometryError("triangulate: degenerate ray configuration (parallel rays)");
  }
  return eig.eigenvectors() *
         (eig.eigenvalues().cwiseInverse().asDiagonal() * (eig.eigenvectors().transpose() * b));
}

}  // namespace pregi
