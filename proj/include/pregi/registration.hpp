#pragma once

#include "pregi/optim.hpp"
#include "pregi/weights.hpp"

#include <string>

namespace pregi {

struct RegistrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MetricKind {
  GradNcc,         // single whole-image patch
  PGradNcc,        // complete patch grid, constant weights
  PGradNccVar,     // weights from fixed-image patch variance
  PGradNccPr,      // forward-projected weights, updated per iteration
  PGradNccPrR,     // projected weights with random patch subsets (coarse level)
};

std::string metric_name(MetricKind kind);
MetricKind parse_metric(const std::string& name);

enum class OptimizerKind {
  Population,      // CMA-ES with regularization
  LocalBounded,    // trust-region refinement with box constraints
};

struct LevelConfig {
  int downsample_factor = 8;
  int patch_radius = 5;
  OptimizerKind optimizer = OptimizerKind::Population;
  int population = 100;
  int max_iterations = 100;   // CMA-ES generations, or refiner evaluations
  double step_tol = 1e-4;     // CMA-ES mean-step stopping tolerance
  double step_length = 0.0;   // ray-march step, mm; 0 = half min voxel spacing
};

struct RegistrationConfig {
  MetricKind metric = MetricKind::GradNcc;
  std::vector<LevelConfig> levels;

  // quadratic regularization scales about the initialization (rad, rad, rad, mm, mm, mm)
  Vec6 regularizer_scales;
  // box-constraint half-widths for the local refinement level
  Vec6 bound_half_widths;
  // CMA-ES initial step sizes
  Vec6 cmaes_sigma0;

  int initial_random_patches = 10;
  WeightParams weight_params;
  int workers = 1;

  RegistrationConfig();
};

double regularizer(const PoseParams& params, const Vec6& scales);

struct LevelTraceEntry {
  int iteration = 0;
  double best_objective = 0.0;
  int active_patches = 0;
};

struct LevelReport {
  std::vector<LevelTraceEntry> trace;  // best-so-far, non-increasing
  double wall_time_s = 0.0;
  int optimizer_iterations = 0;  // generations, or accepted refinement steps
  int weight_updates = 0;        // compute_2d_weights invocations
};

struct RegistrationResult {
  RigidPose final_pose;
  std::vector<LevelReport> levels;
  double total_time_s = 0.0;
};

/// Pose minimizing paired-landmark reprojection error (pixels), from a
/// scale-matched coarse placement followed by Levenberg-Marquardt on se(3).
/// Landmarks are matched by name; at least 4 pairs required.
RigidPose landmark_init(const std::vector<std::pair<std::string, Vec3>>& landmarks3d,
                        const std::vector<std::pair<std::string, Vec2>>& landmarks2d,
                        const CameraModel& camera, double* reprojection_rms = nullptr);

/// Two-level intensity-based registration of `vol` to the fluoroscopic
/// image: population-based search with regularization at the coarse level,
/// bound-constrained refinement at the fine level. For the projected-weight
/// metrics the 2D patch weights are recomputed from the incumbent pose at
/// the start of every optimizer iteration.
RegistrationResult register_single_view(const Image2D& fluoro, const Volume3D& vol,
                                        const LabelVolume& labels, const WeightLUT& lut,
                                        const LabelSet& mismatch_labels,
                                        const LabelSet& surface_labels,
                                        const CameraModel& camera, const RigidPose& init,
                                        const RegistrationConfig& cfg, uint64_t seed);

struct ViewInput {
  Image2D fluoro;
  CameraModel camera;
  RigidPose init;  // volume frame -> view world frame
  std::vector<std::pair<std::string, Vec2>> detections;  // 2D landmark observations
};

struct MultiviewResult {
  std::vector<RegistrationResult> per_view;
  std::vector<std::pair<std::string, Vec3>> triangulated;  // object (pelvis) frame
};

/// Registers each view independently, maps detection rays into the common
/// object frame with the estimated poses, and triangulates each landmark
/// present in at least 2 views.
MultiviewResult register_multiview_triangulate(const std::vector<ViewInput>& views,
                                               const Volume3D& vol, const LabelVolume& labels,
                                               const WeightLUT& lut,
                                               const LabelSet& mismatch_labels,
                                               const LabelSet& surface_labels,
                                               const RegistrationConfig& cfg, uint64_t seed);

}  // namespace pregi
