#pragma once

#include <stdexcept>
#include <vector>

namespace pregi {

struct StatsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MannWhitneyResult {
  double u = 0.0;            // U statistic of the first sample (ties count 1/2)
  double p_one_tailed = 0.0; // alternative: median(x) < median(y)
  bool exact = false;        // enumeration used instead of normal approximation
};

/// One-tailed Mann-Whitney U test. Exact enumeration over all
/// C(n+m, n) group assignments when n*m <= 64, otherwise a normal
/// approximation with tie-corrected variance and continuity correction.
MannWhitneyResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

/// Midranks of the pooled sample (average rank across ties), 1-based.
std::vector<double> midranks(const std::vector<double>& pooled);

double mean(const std::vector<double>& v);
double median(std::vector<double> v);
double stddev(const std::vector<double>& v);  // population convention

}  // namespace pregi
