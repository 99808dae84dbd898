#include "esflow/chart.hpp"

#include <stdexcept>

namespace esflow::chart {

double to_p(double r) {
  if (!(r > 1.0)) throw std::domain_error("chart: r must exceed 1");
  return std::sqrt(1.0 - 1.0 / r);
}

double to_r_from_p(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("chart: p must lie in (0,1)");
  return 1.0 / (1.0 - p * p);
}

double to_s(double r) {
  if (!(r > 1.0)) throw std::domain_error("chart: r must exceed 1");
  if (r <= 2.0) return std::sqrt(1.0 - 1.0 / r);
  if (r >= 3.0) return r;
  const double t = r - 2.0;
  return kSq2i + kBlendSlope * t + kBlendC2 * t * t + kBlendC3 * t * t * t;
}

double s_deriv(double r) {
  if (!(r > 1.0)) throw std::domain_error("chart: r must exceed 1");
  if (r <= 2.0) {
    const double p = std::sqrt(1.0 - 1.0 / r);
    return 1.0 / (2.0 * p * r * r);
  }
  if (r >= 3.0) return 1.0;
  const double t = r - 2.0;
  return kBlendSlope + 2.0 * kBlendC2 * t + 3.0 * kBlendC3 * t * t;
}

double s_deriv2(double r) {
  if (!(r > 1.0)) throw std::domain_error("chart: r must exceed 1");
  if (r <= 2.0) {
    const double p = std::sqrt(1.0 - 1.0 / r);
    const double q = 1.0 / (2.0 * p * r * r);
    return -q * q / p - 2.0 * q / r;
  }
  if (r >= 3.0) return 0.0;
  const double t = r - 2.0;
  return 2.0 * kBlendC2 + 6.0 * kBlendC3 * t;
}

double s_inverse(double s) {
  if (!(s > 0.0)) throw std::domain_error("chart: s must be positive");
  if (s <= kSq2i) return 1.0 / (1.0 - s * s);
  if (s >= 3.0) return s;
  double r = 2.0 + (s - kSq2i) / kBlendDelta;
  for (int it = 0; it < 60; ++it) {
    const double g = to_s(r) - s;
    double r2 = r - g / s_deriv(r);
    r2 = std::min(std::max(r2, 2.0), 3.0);
    if (std::abs(r2 - r) < 1e-15) {
      r = r2;
      break;
    }
    r = r2;
  }
  return r;
}

double ChartPoint::r() const {
  switch (chart) {
    case Chart::R:
      if (!(value > 1.0)) throw std::domain_error("chart: r must exceed 1");
      return value;
    case Chart::P:
      return to_r_from_p(value);
    case Chart::S:
      return s_inverse(value);
  }
  throw std::logic_error("chart: bad enum");
}

}  // namespace esflow::chart
