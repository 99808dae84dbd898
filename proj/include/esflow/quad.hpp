#pragma once
#include <array>
#include <cmath>
#include <utility>

// Adaptive Gauss-Kronrod 7/15 with relative acceptance and no tolerance
// halving on split; improper tails handled by the map r = a + u/(1-u).
namespace esflow::quad {

inline constexpr std::array<double, 15> kXk = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813};
inline constexpr std::array<double, 15> kWk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529};
inline constexpr std::array<double, 7> kWg = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

template <class F>
std::pair<double, double> gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  std::array<double, 15> fx;
  for (int i = 0; i < 15; ++i) fx[i] = f(c + hw * kXk[i]);
  double ik = 0.0;
  for (int i = 0; i < 15; ++i) ik += kWk[i] * fx[i];
  ik *= hw;
  double ig = 0.0;
  for (int i = 0; i < 7; ++i) ig += kWg[i] * fx[2 * i + 1];
  ig *= hw;
  return {ik, std::abs(ik - ig)};
}

template <class F>
double adaptive(F&& f, double a, double b, double rel_tol = 1e-12, int depth = 0,
                int max_depth = 24) {
  const auto [ik, err] = gk15(f, a, b);
  if (err <= rel_tol * std::max(1e-300, std::abs(ik)) || depth >= max_depth) return ik;
  const double m = 0.5 * (a + b);
  return adaptive(f, a, m, rel_tol, depth + 1, max_depth) +
         adaptive(f, m, b, rel_tol, depth + 1, max_depth);
}

// integral over [a, inf) via r = a + u/(1-u), dr = du/(1-u)^2
template <class F>
double adaptive_tail(F&& f, double a, double rel_tol = 1e-12) {
  auto g = [&](double u) {
    const double om = 1.0 - u;
    if (om <= 0.0) return 0.0;
    return f(a + u / om) / (om * om);
  };
  return adaptive(g, 0.0, 1.0, rel_tol);
}

}  // namespace esflow::quad
