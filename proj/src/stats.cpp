#include "pregi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pregi {

std::vector<double> midranks(const std::vector<double>& pooled)
{
  const size_t n = pooled.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return pooled[a] < pooled[b]; });

  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n)
  {
    size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double r = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

bool next_combination(std::vector<size_t>& comb, size_t total)
{
  const size_t n = comb.size();
  size_t i = n;
  while (i > 0)
  {
    --i;
    if (comb[i] != i + total - n)
    {
      ++comb[i];
      for (size_t j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

MannWhitneyResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y)
{
  if (x.empty() || y.empty()) throw StatsError("mann_whitney_u: empty sample");

  const size_t n = x.size();
  const size_t m = y.size();
  const size_t total = n + m;

  std::vector<double> pooled;
  pooled.reserve(total);
  pooled.insert(pooled.end(), x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::vector<double> ranks = midranks(pooled);

  double rank_sum_x = 0.0;
  for (size_t i = 0; i < n; ++i) rank_sum_x += ranks[i];
  const double u_obs = rank_sum_x - 0.5 * static_cast<double>(n) * (n + 1);

  MannWhitneyResult res;
  res.u = u_obs;

  if (n * m <= 64)
  {
    // exact: U distribution over all C(n+m, n) group assignments,
    // conditional on the observed (tied) pooled values
    res.exact = true;
    const double base = 0.5 * static_cast<double>(n) * (n + 1);

    std::vector<size_t> comb(n);
    std::iota(comb.begin(), comb.end(), size_t{0});

    uint64_t count_le = 0;
    uint64_t count_total = 0;
    do
    {
      double rs = 0.0;
      for (size_t idx : comb) rs += ranks[idx];
      if (rs - base <= u_obs + 1e-9) ++count_le;
      ++count_total;
    } while (next_combination(comb, total));
    res.p_one_tailed = static_cast<double>(count_le) / static_cast<double>(count_total);
    return res;
  }

  // normal approximation with tie correction
  const double mean_u = 0.5 * static_cast<double>(n) * static_cast<double>(m);
  double tie_term = 0.0;
  {
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    size_t i = 0;
    while (i < sorted.size())
    {
      size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double nm = static_cast<double>(n) * static_cast<double>(m);
  const double nt = static_cast<double>(total);
  const double var_u = nm / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
  if (var_u <= 0.0)
  {
    res.p_one_tailed = 0.5;
    return res;
  }
  const double z = (u_obs - mean_u + 0.5) / std::sqrt(var_u);
  res.p_one_tailed = normal_cdf(z);
  return res;
}

double mean(const std::vector<double>& v)
{
  if (v.empty()) throw StatsError("mean: empty");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median(std::vector<double> v)
{
  if (v.empty()) throw StatsError("median: empty");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stddev(const std::vector<double>& v)
{
  const double mu = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace pregi
