#pragma once
#include <cmath>

// Radial charts on (1, inf):
//   p = (1 - 1/r)^{1/2}, the horizon-compactifying coordinate in (0,1)
//   s = p for r <= 2, s = r for r >= 3, monotone C^1 cubic Hermite blend on (2,3)
namespace esflow::chart {

inline const double kSq2i = std::sqrt(0.5);          // s at r = 2
inline const double kBlendSlope = 1.0 / (8.0 * kSq2i);  // ds/dr at r = 2 from the p-branch
inline const double kBlendDelta = 3.0 - kSq2i;
inline const double kBlendC2 = 3.0 * kBlendDelta - 2.0 * kBlendSlope - 1.0;
inline const double kBlendC3 = kBlendSlope + 1.0 - 2.0 * kBlendDelta;

double to_p(double r);
double to_r_from_p(double p);
double to_s(double r);
double s_deriv(double r);    // ds/dr
double s_deriv2(double r);   // d2s/dr2 (jumps at r=2 and r=3)
double s_inverse(double s);

enum class Chart { R, P, S };

struct ChartPoint {
  Chart chart;
  double value;
  double r() const;
  double p() const { return to_p(r()); }
  double s() const { return to_s(r()); }
  static ChartPoint from_r(double r) { return {Chart::R, r}; }
  static ChartPoint from_p(double p) { return {Chart::P, p}; }
  static ChartPoint from_s(double s) { return {Chart::S, s}; }
};

}  // namespace esflow::chart
