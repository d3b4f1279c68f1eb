#include "treelimit/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <stdexcept>

namespace treelimit::stats {

double chi_square_sf(double statistic, double dof) {
  if (dof <= 0.0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  const boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probabilities) {
  if (observed.size() != probabilities.size()) {
    throw std::invalid_argument("chi_square_gof: size mismatch");
  }
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  if (total == 0.0) throw std::invalid_argument("chi_square_gof: no observations");
  ChiSquareResult r;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = total * probabilities[i];
    if (expected <= 0.0) {
      if (observed[i] != 0) {
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
      }
      continue;
    }
    const double d = static_cast<double>(observed[i]) - expected;
    r.statistic += d * d / expected;
    ++cells;
  }
  r.degrees_of_freedom = cells > 0 ? static_cast<double>(cells - 1) : 0.0;
  r.p_value = chi_square_sf(r.statistic, r.degrees_of_freedom);
  return r;
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("chi_square_two_sample: empty sample");
  const double n = na + nb;
  ChiSquareResult r;
  std::size_t columns = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double col = static_cast<double>(a[i] + b[i]);
    if (col == 0.0) continue;
    ++columns;
    const double ea = col * na / n;
    const double eb = col * nb / n;
    const double da = static_cast<double>(a[i]) - ea;
    const double db = static_cast<double>(b[i]) - eb;
    r.statistic += da * da / ea + db * db / eb;
  }
  r.degrees_of_freedom = columns > 0 ? static_cast<double>(columns - 1) : 0.0;
  r.p_value = chi_square_sf(r.statistic, r.degrees_of_freedom);
  return r;
}

Moments moments(std::span<const double> xs) {
  Moments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const auto n = static_cast<double>(xs.size());
  if (xs.size() > 1) m.variance = m2 / (n - 1.0);
  const double pop_var = m2 / n;
  if (pop_var > 0.0) {
    m.skewness = (m3 / n) / std::pow(pop_var, 1.5);
    m.excess_kurtosis = (m4 / n) / (pop_var * pop_var) - 3.0;
  }
  return m;
}

double standard_error(const Moments& m) {
  if (m.count == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(m.variance / static_cast<double>(m.count));
}

}  // namespace treelimit::stats
