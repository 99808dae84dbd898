#include "esflow/functional.hpp"

#include <cmath>
#include <stdexcept>

#include "esflow/defaults.hpp"
#include "esflow/geometry.hpp"
#include "esflow/quad.hpp"

namespace esflow::functional {

namespace {

const double kSq2 = std::sqrt(2.0);

double bq_form(double u0, double u1, double u2) {
  return u0 * u1 + u2 * u2 - u0 * u2 - u1 * u2;
}

}  // namespace

double mollifier(double z) {
  if (std::fabs(z) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - z * z));
}

RadialSymTensor random_bump_tensor(SplitMix64& rng, int n) {
  RadialSymTensor t = RadialSymTensor::zeros(n);
  const double h = 1.0 / n;
  for (int c = 0; c < 3; ++c) {
    std::vector<double>& u = t.comp(c);
    const int k = 1 + static_cast<int>(rng.next() % 3);
    for (int b = 0; b < k; ++b) {
      const double amp = rng.uniform(-1.0, 1.0);
      const double center = rng.uniform(0.15, 0.75);
      const double width = rng.uniform(0.05, 0.15);
      for (int i = 1; i < n; ++i)
        u[i - 1] += amp * mollifier((i * h - center) / width);
    }
  }
  return t;
}

HardyPair hardy_gap(const RadialSymTensor& t) {
  const int n = t.n;
  const double h = 1.0 / n;
  const auto m_c01 = gridfn::node_masses(n, gridfn::F_c01);
  const auto m_c12 = gridfn::node_masses(n, gridfn::F_c12);
  const auto m_hardy = gridfn::node_masses(n, gridfn::F_hardy);
  const auto w_grad = gridfn::grad_cell_weights(n);

  auto at = [&](int node, int c) -> double {  // zero-extended node values
    if (node == 0 || node == n) return 0.0;
    return t.comp(c)[node - 1];
  };
  double lhs = 0.0;
  for (int cell = 0; cell < n; ++cell) {
    const double d0 = (at(cell + 1, 0) - at(cell, 0)) / h;
    const double d1 = (at(cell + 1, 1) - at(cell, 1)) / h;
    const double d2 = (at(cell + 1, 2) - at(cell, 2)) / h;
    lhs += w_grad[cell] * (d0 * d0 + d1 * d1 + 2.0 * d2 * d2);
  }
  double rhs = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    const double d01 = t.u0[i] - t.u1[i];
    const double d12 = t.u1[i] - t.u2[i];
    lhs += m_c01[i] * d01 * d01 + m_c12[i] * d12 * d12;
    rhs += m_hardy[i] *
           (t.u0[i] * t.u0[i] + t.u1[i] * t.u1[i] + 2.0 * t.u2[i] * t.u2[i]);
  }
  return {lhs * kFullMeasure, rhs * kFullMeasure};
}

HardySweep hardy_sweep(int n, int count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  HardySweep out;
  out.worst_margin = HUGE_VAL;
  out.pairs.reserve(count);
  for (int i = 0; i < count; ++i) {
    const RadialSymTensor t = random_bump_tensor(rng, n);
    const HardyPair pr = hardy_gap(t);
    out.pairs.push_back(pr);
    const double margin = (pr.lhs - pr.rhs) / (1.0 + pr.lhs);
    out.worst_margin = std::min(out.worst_margin, margin);
  }
  return out;
}

double hhat_eta(int n, double r) {
  const double c = std::exp(2.0 * kSq2 / 3.0);
  if (r >= kSq2) return c * std::exp(-2.0 * r / 3.0);
  if (r < 1.0 + 1.0 / n) return n * (r - 1.0);
  return 1.0;
}

RadialSymTensor hhat_tensor(int n_profile, int grid_n) {
  RadialSymTensor t = RadialSymTensor::zeros(grid_n);
  t.has_horizon = true;
  t.a = 0.0;
  t.b = 0.0;
  const double h = 1.0 / grid_n;
  for (int i = 1; i < grid_n; ++i) {
    const double p = i * h;
    const double eta = hhat_eta(n_profile, 1.0 / (1.0 - p * p));
    t.u0[i - 1] = eta;
    t.u1[i - 1] = eta;
    t.u2[i - 1] = -eta;
  }
  return t;
}

double hhat_norm_sq(int n_profile) {
  const double n = n_profile;
  const double a = std::min(1.0 + 1.0 / n, kSq2);
  const double c = std::exp(2.0 * kSq2 / 3.0);
  const double tol = defaults::quad_rel_tol;
  const double v1 = quad::adaptive(
      [&](double r) {
        const double e = n * (r - 1.0);
        return e * e * r * r;
      },
      1.0, a, tol);
  const double v2 =
      kSq2 > a ? quad::adaptive([](double r) { return r * r; }, a, kSq2, tol) : 0.0;
  const double v3 =
      c * c * quad::adaptive_tail(
                  [](double r) { return std::exp(-4.0 * r / 3.0) * r * r; },
                  kSq2, tol);
  return 4.0 * (v1 + v2 + v3) * kFullMeasure;
}

double hhat_energy(int n_profile) {
  const double n = n_profile;
  const double a = std::min(1.0 + 1.0 / n, kSq2);
  const double c = std::exp(2.0 * kSq2 / 3.0);
  const double tol = defaults::quad_rel_tol;
  auto dens = [](double r, double eta, double detadr) {
    const double f = 1.0 - 1.0 / r;
    return (4.0 * f * detadr * detadr + 16.0 * (f / (r * r)) * eta * eta -
            16.0 * eta * eta / (r * r * r)) *
           r * r;
  };
  const double v1 = quad::adaptive(
      [&](double r) { return dens(r, n * (r - 1.0), n); }, 1.0, a, tol);
  const double v2 =
      kSq2 > a ? quad::adaptive([&](double r) { return dens(r, 1.0, 0.0); }, a,
                                kSq2, tol)
               : 0.0;
  const double v3 = quad::adaptive_tail(
      [&](double r) {
        const double e = c * std::exp(-2.0 * r / 3.0);
        return dens(r, e, -2.0 / 3.0 * e);
      },
      kSq2, tol);
  return (v1 + v2 + v3) * kFullMeasure;
}

Certificate negativity_certificate(int n) {
  if (n < 1) throw std::invalid_argument("negativity_certificate: need n >= 1");
  Certificate out;
  out.n = n;
  const double nn = n;
  const double a = std::min(1.0 + 1.0 / nn, kSq2);
  const double c = std::exp(2.0 * kSq2 / 3.0);
  const double c2 = c * c;
  const double tol = defaults::grid_weight_tol;
  auto eta1 = [&](double r) { return nn * (r - 1.0); };

  out.J[0] = 16.0 * quad::adaptive([&](double r) { return eta1(r) * eta1(r); },
                                   1.0, a, tol);
  out.J[1] = 16.0 * std::max(kSq2 - a, 0.0);
  out.J[2] = 16.0 * c2 *
             quad::adaptive_tail(
                 [](double r) { return std::exp(-4.0 * r / 3.0); }, kSq2, tol);
  out.J[3] = 4.0 * nn * nn *
             quad::adaptive([](double r) { return 1.0 - 1.0 / r; }, 1.0, a, tol);
  out.J[4] = 4.0 * c2 * (4.0 / 9.0) *
             quad::adaptive_tail(
                 [](double r) {
                   return std::exp(-4.0 * r / 3.0) * (1.0 - 1.0 / r);
                 },
                 kSq2, tol);
  out.J[5] = -32.0 * quad::adaptive(
                         [&](double r) { return eta1(r) * eta1(r) / r; }, 1.0,
                         a, tol);
  out.J[6] = kSq2 > a ? -32.0 * (std::log(kSq2) - std::log(a)) : 0.0;
  out.J[7] = -32.0 * c2 *
             quad::adaptive_tail(
                 [](double r) { return std::exp(-4.0 * r / 3.0) / r; }, kSq2,
                 tol);

  out.total = 0.0;
  for (double j : out.J) out.total += j;
  out.a_hat = kFullMeasure * out.total;
  out.sum_ramp = out.J[0] + out.J[5];
  out.sum_middle = out.J[1] + out.J[3] + out.J[6];
  out.sum_tail = out.J[2] + out.J[4] + out.J[7];
  out.holds_ramp = out.sum_ramp <= 0.0;
  out.holds_middle = out.sum_middle <= defaults::certificate_group_a;
  out.holds_tail = out.sum_tail <= defaults::certificate_group_b;
  out.holds_total = out.total < defaults::certificate_total_max;
  return out;
}

EnergyParts energy_parts(const RadialSymTensor& t) {
  const int n = t.n;
  const double h = 1.0 / n;
  const auto m_c01 = gridfn::node_masses(n, gridfn::F_c01);
  const auto m_c12 = gridfn::node_masses(n, gridfn::F_c12);
  const auto m_cQ = gridfn::node_masses(n, gridfn::F_cQ);
  const auto w_grad = gridfn::grad_cell_weights(n);
  const auto hm = gridfn::horizon_masses(n);

  auto at = [&](int node, int c) -> double {
    if (node == n) return 0.0;
    if (node == 0) {
      if (!t.has_horizon) return 0.0;
      return c == 2 ? t.b : t.a;
    }
    return t.comp(c)[node - 1];
  };
  EnergyParts out;
  for (int cell = 0; cell < n; ++cell) {
    const double d0 = (at(cell + 1, 0) - at(cell, 0)) / h;
    const double d1 = (at(cell + 1, 1) - at(cell, 1)) / h;
    const double d2 = (at(cell + 1, 2) - at(cell, 2)) / h;
    out.grad += w_grad[cell] * (d0 * d0 + d1 * d1 + 2.0 * d2 * d2);
  }
  for (int i = 0; i < n - 1; ++i) {
    const double d01 = t.u0[i] - t.u1[i];
    const double d12 = t.u1[i] - t.u2[i];
    out.c01 += m_c01[i] * d01 * d01;
    out.c12 += m_c12[i] * d12 * d12;
    out.curvature += m_cQ[i] * bq_form(t.u0[i], t.u1[i], t.u2[i]);
  }
  if (t.has_horizon) {
    const double dab = t.a - t.b;
    out.c12 += hm.c12 * dab * dab;
    out.curvature += hm.cQ * bq_form(t.a, t.a, t.b);
  }
  out.grad *= kFullMeasure;
  out.c01 *= kFullMeasure;
  out.c12 *= kFullMeasure;
  out.curvature *= kFullMeasure;
  out.total = out.grad + out.c01 + out.c12 - out.curvature;
  return out;
}

double energy(const RadialSymTensor& t) { return energy_parts(t).total; }

CurvatureBounds curvature_term_bounds(const RadialSymTensor& t) {
  const int n = t.n;
  const double h = 1.0 / n;
  const auto m_cQ = gridfn::node_masses(n, gridfn::F_cQ);
  const auto hm = gridfn::horizon_masses(n);
  const geometry::DiagonalRadialMetric g0 = geometry::schwarzschild();

  CurvatureBounds out{-HUGE_VAL, 0.0, 0.0};
  double lhs = 0.0, rhs = 0.0;
  for (int i = 1; i < n; ++i) {
    const double p = i * h;
    const double r = 1.0 / (1.0 - p * p);
    const geometry::CurvatureSet c = geometry::riemann(g0, chart::ChartPoint::from_r(r));
    const double u[4] = {t.u0[i - 1], t.u1[i - 1], t.u2[i - 1], t.u2[i - 1]};
    const double r3 = 1.0 / (r * r * r);
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        const double k = c.sectional_at(a, b);
        const double viol =
            std::fabs(k * u[a] * u[b]) - 0.5 * r3 * (u[a] * u[a] + u[b] * u[b]);
        out.max_pair_violation = std::max(out.max_pair_violation, viol);
      }
    }
    lhs += m_cQ[i - 1] * bq_form(u[0], u[1], u[2]);
    rhs += m_cQ[i - 1] * (u[0] * u[0] + u[1] * u[1] + 2.0 * u[2] * u[2]);
  }
  if (t.has_horizon) {
    lhs += hm.cQ * bq_form(t.a, t.a, t.b);
    rhs += hm.cQ * (2.0 * t.a * t.a + 2.0 * t.b * t.b);
  }
  out.integral_lhs = std::fabs(lhs) * kFullMeasure;
  out.integral_rhs = rhs * kFullMeasure;
  return out;
}

namespace {

// value and derivative of the cubic through 4 nodes
void lagrange4(const double* xs, const double* ys, double x, double& val,
               double& dval) {
  val = 0.0;
  dval = 0.0;
  for (int k = 0; k < 4; ++k) {
    double denom = 1.0, lk = 1.0, dlk = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (j == k) continue;
      denom *= xs[k] - xs[j];
      double term = 1.0;
      for (int m = 0; m < 4; ++m)
        if (m != k && m != j) term *= x - xs[m];
      dlk += term;
      lk *= x - xs[j];
    }
    val += ys[k] * lk / denom;
    dval += ys[k] * dlk / denom;
  }
}

}  // namespace

CovariantDeriv covariant_derivative(const RadialSymTensor& t,
                                    const chart::ChartPoint& x) {
  const int n = t.n;
  const double h = 1.0 / n;
  const double p = x.p();
  if (p < h || p > 1.0 - h)
    throw std::domain_error("covariant_derivative: point outside node hull");
  int j0 = static_cast<int>(std::floor(p / h)) - 2;
  j0 = std::min(std::max(j0, 0), n - 5);
  double xs[4], ys[4];
  for (int k = 0; k < 4; ++k) xs[k] = (j0 + 1 + k) * h;

  double u[3], up[3];
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < 4; ++k) ys[k] = t.comp(c)[j0 + k];
    lagrange4(xs, ys, p, u[c], up[c]);
  }
  const double r = 1.0 / (1.0 - p * p);
  const double dpdr = (1.0 - p * p) * (1.0 - p * p) / (2.0 * p);
  const double ur[3] = {up[0] * dpdr, up[1] * dpdr, up[2] * dpdr};

  const geometry::MetricJet j = geometry::schwarzschild().jet(r);
  CovariantDeriv out;
  out.d1_h00 = j.A * ur[0];
  out.d1_h11 = j.B * ur[1];
  out.d1_h22 = j.C * ur[2];
  out.d0_h01 = (j.Ap / 2.0) * (u[1] - u[0]);
  out.d2_h12 = (j.Cp / 2.0) * (u[1] - u[2]);
  const double f = j.A;
  const double d01 = u[0] - u[1];
  const double d12 = u[1] - u[2];
  out.norm_sq = f * (ur[0] * ur[0] + ur[1] * ur[1] + 2.0 * ur[2] * ur[2]) +
                d01 * d01 / (2.0 * f * r * r * r * r) +
                4.0 * f * d12 * d12 / (r * r);
  return out;
}

TraceDivergence trace_and_divergence(const RadialSymTensor& t) {
  const int n = t.n;
  const int N = n - 1;
  const double h = 1.0 / n;
  const auto m_rho = gridfn::node_masses(n, gridfn::F_rho);
  const geometry::DiagonalRadialMetric g0 = geometry::schwarzschild();

  auto at = [&](int node, int c) -> double {
    if (node == n) return 0.0;
    if (node == 0) {
      if (!t.has_horizon) return 0.0;
      return c == 2 ? t.b : t.a;
    }
    return t.comp(c)[node - 1];
  };

  TraceDivergence out;
  out.trace.resize(N);
  out.xi1.resize(N);
  double gap_sq = 0.0;
  for (int i = 1; i <= N; ++i) {
    const double p = i * h;
    const double r = 1.0 / (1.0 - p * p);
    const double q1p = 1.0 / (2.0 * p * r * r);
    const double q1pp = -q1p * q1p / p - 2.0 * q1p / r;
    double u[3], ur[3], urr[3];
    for (int c = 0; c < 3; ++c) {
      u[c] = at(i, c);
      const double up = (at(i + 1, c) - at(i - 1, c)) / (2.0 * h);
      const double upp = (at(i + 1, c) - 2.0 * at(i, c) + at(i - 1, c)) / (h * h);
      ur[c] = up * q1p;
      urr[c] = upp * q1p * q1p + up * q1pp;
    }
    const geometry::MetricJet j = g0.jet(r);
    const double coefA = j.Ap / (2.0 * j.A);
    const double coefA_r = j.App / (2.0 * j.A) - j.Ap * j.Ap / (2.0 * j.A * j.A);
    const double coefC = j.Cp / j.C;
    const double coefC_r = j.Cpp / j.C - j.Cp * j.Cp / (j.C * j.C);
    const double G111 = j.Bp / (2.0 * j.B);
    const double G100 = -j.Ap / (2.0 * j.B);
    const double G122 = -j.Cp / (2.0 * j.B);

    const double H = u[0] + u[1] + 2.0 * u[2];
    const double Hr = ur[0] + ur[1] + 2.0 * ur[2];
    const double Hrr = urr[0] + urr[1] + 2.0 * urr[2];
    const double xi1 =
        -(coefA * (u[1] - u[0]) + ur[1] + coefC * (u[1] - u[2]));
    const double xi1_r =
        -(coefA_r * (u[1] - u[0]) + coefA * (ur[1] - ur[0]) + urr[1] +
          coefC_r * (u[1] - u[2]) + coefC * (ur[1] - ur[2]));

    const double T11 = (Hrr - G111 * Hr) + 2.0 * (xi1_r - G111 * xi1);
    const double T00 = -G100 * Hr - 2.0 * G100 * xi1;
    const double T22 = -G122 * Hr - 2.0 * G122 * xi1;
    const double t0 = T00 / j.A;
    const double t1 = T11 / j.B;
    const double t2 = T22 / j.C;

    out.trace[i - 1] = H;
    out.xi1[i - 1] = xi1;
    gap_sq += m_rho[i - 1] * (t0 * t0 + t1 * t1 + 2.0 * t2 * t2);
  }
  out.gap_norm = std::sqrt(gap_sq);
  return out;
}

}  // namespace esflow::functional
