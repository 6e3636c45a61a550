#include "pregi/optim.hpp"

#include "pregi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pregi {

CmaesResult cmaes_minimize(const BatchObjectiveFn& objective, const VecX& x0,
                           const VecX& sigma0, const CmaesOptions& opts)
{
  const int n = static_cast<int>(x0.size());
  const int lambda = opts.population;
  if (lambda < 4) throw OptimError("cmaes_minimize: population must be >= 4");
  if (sigma0.size() != n || (sigma0.array() <= 0.0).any())
  {
    throw OptimError("cmaes_minimize: sigma0 must be positive and match x0");
  }

  // variables are pre-scaled by sigma0; the strategy runs with unit step
  const VecX scale = sigma0;

  const int mu = lambda / 2;
  VecX weights(mu);
  for (int i = 0; i < mu; ++i) weights(i) = std::log(0.5 * (lambda + 1)) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  const double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                              ((n + 2.0) * (n + 2.0) + mu_eff));
  const double chi_n = std::sqrt(static_cast<double>(n)) *
                       (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  VecX mean = VecX::Zero(n);  // scaled space; x = x0 + scale .* y
  double sigma = 1.0;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  VecX p_sigma = VecX::Zero(n);
  VecX p_c = VecX::Zero(n);

  Rng rng(opts.seed);

  CmaesResult result;
  result.best_x = x0;
  result.best_f = std::numeric_limits<double>::infinity();

  std::vector<VecX> cand_x(lambda);
  std::vector<VecX> cand_y(lambda);
  std::vector<double> values(lambda);

  const auto to_x = [&](const VecX& y) -> VecX { return x0 + scale.cwiseProduct(y); };

  bool best_initialized = false;

  for (int gen = 0; gen < opts.max_iterations; ++gen)
  {
    if (opts.pre_generation)
    {
      opts.pre_generation(gen, best_initialized ? result.best_x : x0);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    VecX d = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
    const Eigen::MatrixXd& b = eig.eigenvectors();

    for (int k = 0; k < lambda; ++k)
    {
      VecX z(n);
      for (int i = 0; i < n; ++i) z(i) = rng.normal();
      cand_y[k] = b * d.cwiseProduct(z);
      cand_x[k] = to_x(mean + sigma * cand_y[k]);
    }

    objective(cand_x, values);

    std::vector<int> order(lambda);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a2, int b2) {
      const double fa = std::isfinite(values[a2]) ? values[a2]
                                                  : std::numeric_limits<double>::infinity();
      const double fb = std::isfinite(values[b2]) ? values[b2]
                                                  : std::numeric_limits<double>::infinity();
      return fa < fb;
    });

    if (!std::isfinite(values[order[0]]))
    {
      throw OptimError("cmaes_minimize: entire generation evaluated non-finite");
    }

    if (values[order[0]] < result.best_f)
    {
      result.best_f = values[order[0]];
      result.best_x = cand_x[order[0]];
      best_initialized = true;
    }

    const VecX mean_old = mean;
    mean = VecX::Zero(n);
    for (int i = 0; i < mu; ++i) mean += weights(i) * (mean_old + sigma * cand_y[order[i]]);

    const VecX y_w = (mean - mean_old) / sigma;

    // C^(-1/2) * y_w
    const VecX c_inv_sqrt_yw = b * (b.transpose() * y_w).cwiseQuotient(d);
    p_sigma = (1.0 - c_sigma) * p_sigma +
              std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * c_inv_sqrt_yw;

    const double ps_norm = p_sigma.norm();
    const bool h_sigma =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (gen + 1))) <
        (1.4 + 2.0 / (n + 1.0)) * chi_n;

    p_c = (1.0 - c_c) * p_c;
    if (h_sigma) p_c += std::sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i)
    {
      rank_mu += weights(i) * (cand_y[order[i]] * cand_y[order[i]].transpose());
    }
    const double hs_correction = h_sigma ? 0.0 : c_c * (2.0 - c_c);
    cov = (1.0 - c_1 - c_mu) * cov +
          c_1 * (p_c * p_c.transpose() + hs_correction * cov) + c_mu * rank_mu;
    cov = 0.5 * (cov + cov.transpose().eval());

    sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));

    result.generations = gen + 1;

    if (opts.post_generation) opts.post_generation(gen, result.best_x, result.best_f);

    const double step = scale.cwiseProduct(mean - mean_old).norm();
    if (step < opts.step_tol && gen > 0) break;
    if (sigma * scale.maxCoeff() * d.maxCoeff() < 1e-14) break;
  }

  return result;
}

CmaesResult cmaes_minimize(const ObjectiveFn& objective, const VecX& x0, const VecX& sigma0,
                           const CmaesOptions& opts)
{
  const BatchObjectiveFn batch = [&](const std::vector<VecX>& xs, std::vector<double>& fs) {
    for (size_t i = 0; i < xs.size(); ++i) fs[i] = objective(xs[i]);
  };
  return cmaes_minimize(batch, x0, sigma0, opts);
}

namespace {

/// Quadratic model m(d) = c + g.d + 0.5 d'Hd fit by ridge least squares
/// over sample offsets expressed in trust-region units.
struct QuadModel {
  VecX g;
  Eigen::MatrixXd h;

  double value(const VecX& d) const { return g.dot(d) + 0.5 * d.dot(h * d); }
};

QuadModel fit_quadratic(const std::vector<VecX>& deltas, const std::vector<double>& fvals, int n)
{
  const int n_h = n * (n + 1) / 2;
  const int n_params = 1 + n + n_h;
  const int m = static_cast<int>(deltas.size());

  Eigen::MatrixXd a(m, n_params);
  VecX rhs(m);
  for (int k = 0; k < m; ++k)
  {
    const VecX& d = deltas[k];
    a(k, 0) = 1.0;
    for (int i = 0; i < n; ++i) a(k, 1 + i) = d(i);
    int col = 1 + n;
    for (int i = 0; i < n; ++i)
    {
      a(k, col++) = 0.5 * d(i) * d(i);
      for (int j = i + 1; j < n; ++j) a(k, col++) = d(i) * d(j);
    }
    rhs(k) = fvals[k];
  }

  Eigen::MatrixXd ata = a.transpose() * a;
  const double ridge = 1e-10 * (ata.trace() / n_params + 1.0);
  ata.diagonal().array() += ridge;
  const VecX sol = ata.ldlt().solve(a.transpose() * rhs);

  QuadModel model;
  model.g = sol.segment(1, n);
  model.h = Eigen::MatrixXd::Zero(n, n);
  int col = 1 + n;
  for (int i = 0; i < n; ++i)
  {
    model.h(i, i) = sol(col++);
    for (int j = i + 1; j < n; ++j)
    {
      model.h(i, j) = sol(col);
      model.h(j, i) = sol(col);
      ++col;
    }
  }
  return model;
}

/// Coordinate-descent minimization of the model over the box
/// [lo, hi] intersected with the inf-norm ball of radius 1.
VecX minimize_model_in_box(const QuadModel& model, const VecX& lo, const VecX& hi)
{
  const int n = static_cast<int>(lo.size());
  VecX d = VecX::Zero(n);
  for (int sweep = 0; sweep < 60; ++sweep)
  {
    double moved = 0.0;
    for (int i = 0; i < n; ++i)
    {
      const double lo_i = std::max(lo(i), -1.0);
      const double hi_i = std::min(hi(i), 1.0);
      // 1D restriction: m(d + t e_i) has slope g_i + (Hd)_i and curvature H_ii
      const double slope = model.g(i) + model.h.row(i).dot(d);
      const double curv = model.h(i, i);
      double t;
      if (curv > 1e-14)
      {
        t = std::clamp(d(i) - slope / curv, lo_i, hi_i) - d(i);
      }
      else
      {
        // non-convex direction: better endpoint
        const double t_lo = lo_i - d(i);
        const double t_hi = hi_i - d(i);
        const double f_lo = slope * t_lo + 0.5 * curv * t_lo * t_lo;
        const double f_hi = slope * t_hi + 0.5 * curv * t_hi * t_hi;
        t = f_lo < f_hi ? t_lo : t_hi;
        if (std::min(f_lo, f_hi) >= 0.0) t = 0.0;
      }
      d(i) += t;
      moved = std::max(moved, std::abs(t));
    }
    if (moved < 1e-15) break;
  }
  return d;
}

}  // namespace

RefineResult local_bound_refine(const ObjectiveFn& objective, const VecX& x0,
                                const VecX& lower, const VecX& upper,
                                const RefineOptions& opts)
{
  const int n = static_cast<int>(x0.size());
  if (lower.size() != n || upper.size() != n)
  {
    throw OptimError("local_bound_refine: bound dimensions do not match x0");
  }
  for (int i = 0; i < n; ++i)
  {
    if (lower(i) > upper(i)) throw OptimError("local_bound_refine: empty bounds");
    if (x0(i) < lower(i) || x0(i) > upper(i))
    {
      throw OptimError("local_bound_refine: x0 outside bounds");
    }
  }

  // work in coordinates scaled by the bound half-widths
  VecX scale(n);
  for (int i = 0; i < n; ++i)
  {
    scale(i) = 0.5 * (upper(i) - lower(i));
    if (scale(i) <= 0.0) scale(i) = 1.0;  // frozen coordinate
  }
  const auto to_x = [&](const VecX& z) -> VecX { return x0 + scale.cwiseProduct(z); };
  const VecX z_lo = (lower - x0).cwiseQuotient(scale);
  const VecX z_hi = (upper - x0).cwiseQuotient(scale);

  RefineResult res;
  res.x = x0;

  std::vector<VecX> pts;  // z-space sample points
  std::vector<double> vals;
  const auto eval = [&](const VecX& z) -> double {
    const double f = objective(to_x(z));
    pts.push_back(z);
    vals.push_back(f);
    ++res.evals;
    return f;
  };

  VecX z_best = VecX::Zero(n);
  double f_best = eval(z_best);
  res.f = f_best;

  double radius = std::clamp(opts.initial_radius, 1e-6, 1.0);

  // initial poised set: +/- radius along each coordinate, clipped to the box
  for (int i = 0; i < n && res.evals < opts.max_evals; ++i)
  {
    VecX zp = z_best;
    zp(i) = std::min(z_hi(i), z_best(i) + radius);
    if ((zp - z_best).norm() > 1e-14) eval(zp);
    VecX zm = z_best;
    zm(i) = std::max(z_lo(i), z_best(i) - radius);
    if ((zm - z_best).norm() > 1e-14 && res.evals < opts.max_evals) eval(zm);
  }

  const int max_fit_points = 3 * (1 + n + n * (n + 1) / 2);
  int refresh_axis = 0;

  while (res.evals < opts.max_evals && radius > opts.radius_tol)
  {
    // fit around the incumbent using nearby points, offsets in radius units
    std::vector<std::pair<double, int>> by_dist;
    by_dist.reserve(pts.size());
    for (size_t k = 0; k < pts.size(); ++k)
    {
      by_dist.emplace_back((pts[k] - z_best).norm(), static_cast<int>(k));
    }
    std::stable_sort(by_dist.begin(), by_dist.end());
    const int n_fit = std::min<int>(max_fit_points, static_cast<int>(by_dist.size()));
    std::vector<VecX> deltas(n_fit);
    std::vector<double> fvals(n_fit);
    for (int k = 0; k < n_fit; ++k)
    {
      deltas[k] = (pts[by_dist[k].second] - z_best) / radius;
      fvals[k] = vals[by_dist[k].second];
    }
    const QuadModel model = fit_quadratic(deltas, fvals, n);

    // box bounds in radius-scaled offset coordinates
    const VecX d_lo = (z_lo - z_best) / radius;
    const VecX d_hi = (z_hi - z_best) / radius;
    const VecX d_star = minimize_model_in_box(model, d_lo, d_hi);
    const double pred = -model.value(d_star);

    if (d_star.lpNorm<Eigen::Infinity>() < 0.05 || pred <= 0.0)
    {
      // model optimum is (numerically) here: resolve at a finer scale,
      // adding one geometry point so the next fit stays poised
      radius *= 0.5;
      VecX zg = z_best;
      const int ax = refresh_axis++ % n;
      const double up = z_hi(ax) - z_best(ax);
      const double dn = z_best(ax) - z_lo(ax);
      zg(ax) += (up >= dn) ? std::min(up, radius) : -std::min(dn, radius);
      if ((zg - z_best).norm() > 1e-14 && res.evals < opts.max_evals)
      {
        if (eval(zg) < f_best)
        {
          f_best = vals.back();
          z_best = zg;
          ++res.accepted_steps;
          if (opts.on_accept) opts.on_accept(res.accepted_steps, to_x(z_best), f_best);
        }
      }
      continue;
    }

    const VecX z_new = (z_best + radius * d_star).cwiseMax(z_lo).cwiseMin(z_hi);
    const double f_new = eval(z_new);
    const double actual = f_best - f_new;

    if (actual > 0.0)
    {
      z_best = z_new;
      f_best = f_new;
      ++res.accepted_steps;
      if (opts.on_accept) opts.on_accept(res.accepted_steps, to_x(z_best), f_best);
      const double ratio = actual / std::max(pred, 1e-300);
      if (ratio > 0.7 && d_star.lpNorm<Eigen::Infinity>() > 0.9)
      {
        radius = std::min(2.0 * radius, 1.0);
      }
      else if (ratio < 0.1)
      {
        radius *= 0.5;
      }
    }
    else
    {
      radius *= 0.5;
    }
  }

  res.x = to_x(z_best);
  res.f = f_best;
  return res;
}

}  // namespace pregi
