#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace pregi {

struct OptimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using VecX = Eigen::VectorXd;

/// Scalar objective; minimized.
using ObjectiveFn = std::function<double(const VecX&)>;

/// Evaluates a whole population; candidates are independent and may be
/// evaluated in parallel. values is pre-sized to candidates.size().
using BatchObjectiveFn = std::function<void(const std::vector<VecX>&, std::vector<double>&)>;

struct CmaesOptions {
  int population = 100;
  int max_iterations = 300;
  double step_tol = 1e-4;       // stop when the mean moves less than this
  uint64_t seed = 0;
  /// Called before each generation is sampled, with the incumbent best.
  std::function<void(int iteration, const VecX& incumbent)> pre_generation;
  /// Called after each generation with the best-so-far value.
  std::function<void(int iteration, const VecX& best_x, double best_f)> post_generation;
};

struct CmaesResult {
  VecX best_x;
  double best_f = 0.0;
  int generations = 0;
};

/// Covariance matrix adaptation evolution strategy (weighted recombination,
/// rank-1 + rank-mu covariance update, cumulative step-size adaptation).
/// Deterministic for a given seed. Throws OptimError when an entire
/// generation evaluates non-finite.
CmaesResult cmaes_minimize(const BatchObjectiveFn& objective, const VecX& x0,
                           const VecX& sigma0, const CmaesOptions& opts);

/// Convenience wrapper for a scalar objective.
CmaesResult cmaes_minimize(const ObjectiveFn& objective, const VecX& x0, const VecX& sigma0,
                           const CmaesOptions& opts);

struct RefineOptions {
  int max_evals = 300;
  double initial_radius = 0.2;  // fraction of the bound half-widths
  double radius_tol = 1e-9;
  /// Called each time a lower objective value is accepted.
  std::function<void(int accepted_steps, const VecX& x, double f)> on_accept;
};

struct RefineResult {
  VecX x;
  double f = 0.0;
  int evals = 0;
  int accepted_steps = 0;
};

/// Derivative-free bound-constrained minimization: quadratic interpolation
/// models over the evaluated points, trust-region steps restricted to the
/// box. Result stays within bounds and never exceeds objective(x0).
RefineResult local_bound_refine(const ObjectiveFn& objective, const VecX& x0,
                                const VecX& lower, const VecX& upper,
                                const RefineOptions& opts);

}  // namespace pregi
