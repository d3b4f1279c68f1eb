#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace treelimit::stats {

struct ChiSquareResult {
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of `observed` counts against `probabilities`.
/// Cells with zero expected count must have zero observed count.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probabilities);

/// Two-sample homogeneity test on a 2 x K contingency table. Columns empty
/// in both samples are dropped.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::size_t count = 0;
};

Moments moments(std::span<const double> xs);

/// Standard error of the mean, sqrt(variance / count).
double standard_error(const Moments& m);

}  // namespace treelimit::stats
