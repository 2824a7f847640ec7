#pragma once

#include <cmath>
#include <vector>

namespace fracgl {

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

// Sample mean and its standard error.
inline Estimate mean_estimate(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// Unbiased sample variance with the delta-method standard error sqrt((m4 - s^4) / N).
inline Estimate variance_estimate(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d2 = (x - mean) * (x - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double var = m2 / (n - 1.0);
  m4 /= n;
  const double biased = m2 / n;
  return {var, std::sqrt(std::max(m4 - biased * biased, 0.0) / n)};
}

}  // namespace fracgl
