#include "esflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "esflow/chart.hpp"
#include "esflow/defaults.hpp"
#include "esflow/grid.hpp"
#include "esflow/spectral.hpp"

namespace esflow::flow {

Mode Mode::build(int n_eig) {
  const spectral::EigenResult er = spectral::solve_min(n_eig);
  if (!er.converged) throw std::runtime_error("Mode::build: eigensolve did not converge");
  Mode md;
  md.n_eig = n_eig;
  md.lambda = er.lambda;
  const double sc = 1.0 / std::sqrt(kFullMeasure);
  md.a_h = er.a * sc;
  md.b_h = er.b * sc;
  const double h = 1.0 / n_eig;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> vals(n_eig + 1);
    vals[0] = (c < 2 ? er.a : er.b) * sc;
    for (int i = 1; i < n_eig; ++i)
      vals[i] = er.v[spectral::dof_index(i, c)] * sc;
    vals[n_eig] = 0.0;
    md.sp_.push_back(CubicSpline::build(0.0, h, std::move(vals)));
  }
  return md;
}

void Mode::at_p(double p, double out[3], int deriv) const {
  for (int c = 0; c < 3; ++c) {
    if (deriv == 0)
      out[c] = sp_[c].eval(p);
    else if (deriv == 1)
      out[c] = sp_[c].deriv(p);
    else
      out[c] = sp_[c].deriv2(p);
  }
}

Background::Background(int m_, double s_max_, const Mode& mode, double eps_b_)
    : m(m_), s_max(s_max_), ds(s_max_ / m_), eps_b(eps_b_) {
  s.resize(m + 1);
  r.resize(m + 1);
  sdot.resize(m + 1);
  sddot.resize(m + 1);
  for (int j = 0; j <= m; ++j) {
    s[j] = j * ds;
    r[j] = j == 0 ? 1.0 : chart::s_inverse(s[j]);
  }
  sdot[0] = 0.5;   // limit of ds/dr at the horizon
  sddot[0] = 0.0;  // never used; the true limit diverges
  for (int j = 1; j <= m; ++j) {
    sdot[j] = chart::s_deriv(r[j]);
    sddot[j] = chart::s_deriv2(r[j]);
  }

  auto rs = [&](std::vector<double>& v) { v.resize(m); };
  rs(A); rs(Ap); rs(App); rs(B); rs(Bp); rs(Bpp); rs(C); rs(Cp); rs(Cpp);
  rs(G111); rs(K01); rs(K02); rs(K12); rs(K23);
  rs(P); rs(a0); rs(LA); rs(c0); rs(LC); rs(Pr);
  wbar.assign(3 * (m + 1), 1.0);
  const double e = eps_b;
  if (e != 0.0) {
    wbar[0] = 1.0 + e * mode.a_h;
    wbar[1] = 1.0 + e * mode.a_h;
    wbar[2] = 1.0 + e * mode.b_h;
  }
  for (int j = 1; j <= m; ++j) {
    const int i = j - 1;
    const double ri = r[j];
    const double p = std::sqrt(1.0 - 1.0 / ri);
    const double f = 1.0 - 1.0 / ri;
    const double fp = 1.0 / (ri * ri);
    const double fpp = -2.0 / (ri * ri * ri);
    double u[3] = {0, 0, 0}, ur[3] = {0, 0, 0}, urr[3] = {0, 0, 0};
    if (e != 0.0) {
      double up[3], upp[3];
      mode.at_p(p, u, 0);
      mode.at_p(p, up, 1);
      mode.at_p(p, upp, 2);
      const double q1p = 1.0 / (2.0 * p * ri * ri);
      const double q1pp = -q1p * q1p / p - 2.0 * q1p / ri;
      for (int c = 0; c < 3; ++c) {
        ur[c] = up[c] * q1p;
        urr[c] = upp[c] * q1p * q1p + up[c] * q1pp;
      }
    }
    const double w0 = 1.0 + e * u[0], w1 = 1.0 + e * u[1], w2 = 1.0 + e * u[2];
    A[i] = f * w0;
    Ap[i] = fp * w0 + f * e * ur[0];
    App[i] = fpp * w0 + 2.0 * fp * e * ur[0] + f * e * urr[0];
    B[i] = w1 / f;
    Bp[i] = e * ur[1] / f - w1 * fp / (f * f);
    Bpp[i] = e * urr[1] / f - 2.0 * e * ur[1] * fp / (f * f) -
             w1 * fpp / (f * f) + 2.0 * w1 * fp * fp / (f * f * f);
    C[i] = ri * ri * w2;
    Cp[i] = 2.0 * ri * w2 + ri * ri * e * ur[2];
    Cpp[i] = 2.0 * w2 + 4.0 * ri * e * ur[2] + ri * ri * e * urr[2];
    G111[i] = Bp[i] / (2.0 * B[i]);
    if (e == 0.0) {
      const double r3 = 1.0 / (ri * ri * ri);
      K01[i] = r3;
      K02[i] = -r3 / 2.0;
      K12[i] = -r3 / 2.0;
      K23[i] = r3;
    } else {
      K01[i] = -(App[i] - Ap[i] * Ap[i] / (2.0 * A[i]) -
                 Ap[i] * Bp[i] / (2.0 * B[i])) /
               (2.0 * A[i] * B[i]);
      K02[i] = -Ap[i] * Cp[i] / (4.0 * A[i] * B[i] * C[i]);
      K12[i] = -(Cpp[i] - Cp[i] * Cp[i] / (2.0 * C[i]) -
                 Cp[i] * Bp[i] / (2.0 * B[i])) /
               (2.0 * C[i] * B[i]);
      K23[i] = (1.0 - Cp[i] * Cp[i] / (4.0 * C[i] * B[i])) / C[i];
    }
    const double sd = sdot[j];
    P[i] = sd * sd / B[i];
    a0[i] = Ap[i] / (2.0 * A[i] * B[i]);
    LA[i] = Ap[i] / A[i];
    c0[i] = Cp[i] / (C[i] * B[i]);
    LC[i] = Cp[i] / C[i];
    Pr[i] = 1.0 / B[i];
    wbar[3 * j + 0] = w0;
    wbar[3 * j + 1] = w1;
    wbar[3 * j + 2] = w2;
  }

  d1.resize(3 * (m - 1));
  d2.resize(3 * (m - 1));
  for (int j = 1; j < m; ++j) {
    const int i = j - 1;
    const double hm = r[j] - r[j - 1];
    const double hp = r[j + 1] - r[j];
    d1[3 * i + 0] = -hp / (hm * (hm + hp));
    d1[3 * i + 1] = (hp - hm) / (hm * hp);
    d1[3 * i + 2] = hm / (hp * (hm + hp));
    d2[3 * i + 0] = 2.0 / (hm * (hm + hp));
    d2[3 * i + 1] = -2.0 / (hm * hp);
    d2[3 * i + 2] = 2.0 / (hp * (hm + hp));
  }

  auto ex = [](double z1, double z2) { return (4.0 * z1 - z2) / 3.0; };
  P0 = ex(P[0], P[1]);
  K01h = ex(K01[0], K01[1]);
  K02h = ex(K02[0], K02[1]);
  K12h = ex(K12[0], K12[1]);
  K23h = ex(K23[0], K23[1]);

  wq.assign(m + 1, 0.0);
  alg01.assign(m + 1, 0.0);
  alg12.assign(m + 1, 0.0);
  f.assign(m + 1, 0.0);
  for (int j = 1; j <= m; ++j) {
    const double ri = r[j];
    const double fj = 1.0 - 1.0 / ri;
    wq[j] = ri * ri / sdot[j] * ds;
    alg01[j] = 1.0 / (ri * ri * ri * ri) / (2.0 * fj);
    alg12[j] = 4.0 * fj / (ri * ri);
    f[j] = fj;
  }
  wq[m] *= 0.5;
}

namespace {

inline void rhs_direct_node(const Background& bg, const double* y, int j,
                            double* out) {
  const int i = j - 1;
  double yp[3], ypp[3];
  for (int c = 0; c < 3; ++c) {
    const double yl = y[3 * (j - 1) + c];
    const double yc = y[3 * j + c];
    const double yu = y[3 * (j + 1) + c];
    yp[c] = bg.d1[3 * i + 0] * yl + bg.d1[3 * i + 1] * yc + bg.d1[3 * i + 2] * yu;
    ypp[c] = bg.d2[3 * i + 0] * yl + bg.d2[3 * i + 1] * yc + bg.d2[3 * i + 2] * yu;
  }
  const double q0 = 1.0 + y[3 * j + 0];
  const double q1 = 1.0 + y[3 * j + 1];
  const double q2 = 1.0 + y[3 * j + 2];
  const double A = bg.A[i] * q0;
  const double Ap = bg.Ap[i] * q0 + bg.A[i] * yp[0];
  const double App = bg.App[i] * q0 + 2.0 * bg.Ap[i] * yp[0] + bg.A[i] * ypp[0];
  const double B = bg.B[i] * q1;
  const double Bp = bg.Bp[i] * q1 + bg.B[i] * yp[1];
  const double Bpp = bg.Bpp[i] * q1 + 2.0 * bg.Bp[i] * yp[1] + bg.B[i] * ypp[1];
  const double C = bg.C[i] * q2;
  const double Cp = bg.Cp[i] * q2 + bg.C[i] * yp[2];
  const double Cpp = bg.Cpp[i] * q2 + 2.0 * bg.Cp[i] * yp[2] + bg.C[i] * ypp[2];

  const double K01 = -(App - Ap * Ap / (2.0 * A) - Ap * Bp / (2.0 * B)) / (2.0 * A * B);
  const double K02 = -Ap * Cp / (4.0 * A * B * C);
  const double K12 = -(Cpp - Cp * Cp / (2.0 * C) - Cp * Bp / (2.0 * B)) / (2.0 * C * B);
  const double K23 = (1.0 - Cp * Cp / (4.0 * C * B)) / C;
  const double R0 = K01 + 2.0 * K02;
  const double R1 = K01 + 2.0 * K12;
  const double R2 = K02 + K12 + K23;

  const double Ab = bg.A[i], Apb = bg.Ap[i], Appb = bg.App[i];
  const double Bb = bg.B[i], Bpb = bg.Bp[i], Bppb = bg.Bpp[i];
  const double Cb = bg.C[i], Cpb = bg.Cp[i], Cppb = bg.Cpp[i];
  const double V1c = (-Ap / (2.0 * A * B) + Bp / (2.0 * B * B) - Cp / (B * C)) -
                     (-Apb / (2.0 * A * Bb) + Bpb / (2.0 * B * Bb) - Cpb / (Bb * C));
  const double V1p =
      (-App / (2.0 * A * B) + Ap * Ap / (2.0 * A * A * B) +
       Ap * Bp / (2.0 * A * B * B)) +
      (Bpp / (2.0 * B * B) - Bp * Bp / (B * B * B)) +
      (-Cpp / (B * C) + Cp * Bp / (B * B * C) + Cp * Cp / (B * C * C)) -
      (-Appb / (2.0 * A * Bb) + Apb * Ap / (2.0 * A * A * Bb) +
       Apb * Bpb / (2.0 * A * Bb * Bb)) -
      (Bppb / (2.0 * B * Bb) - Bpb * Bp / (2.0 * B * B * Bb) -
       Bpb * Bpb / (2.0 * B * Bb * Bb)) -
      (-Cppb / (Bb * C) + Cpb * Bpb / (Bb * Bb * C) + Cpb * Cp / (Bb * C * C));

  out[0] = -2.0 * q0 * R0 + (Ap / Ab) * V1c;
  out[1] = -2.0 * q1 * R1 + (2.0 * B * V1p + Bp * V1c) / Bb;
  out[2] = -2.0 * q2 * R2 + (Cp / Cb) * V1c;
}

}  // namespace

void rhs_direct(const Background& bg, const std::vector<double>& y,
                std::vector<double>& out, bool parallel) {
  const int m = bg.m;
  out.assign(3 * (m + 1), 0.0);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int j = 1; j < m; ++j) rhs_direct_node(bg, y.data(), j, &out[3 * j]);
  } else {
    for (int j = 1; j < m; ++j) rhs_direct_node(bg, y.data(), j, &out[3 * j]);
  }
  const double ta1 = 0.5 * (out[3 * 1 + 0] + out[3 * 1 + 1]);
  const double ta2 = 0.5 * (out[3 * 2 + 0] + out[3 * 2 + 1]);
  out[0] = (4.0 * ta1 - ta2) / 3.0;
  out[1] = out[0];
  out[2] = (4.0 * out[3 * 1 + 2] - out[3 * 2 + 2]) / 3.0;
}

void rhs_expanded(const Background& bg, const std::vector<double>& y,
                  std::vector<double>& out) {
  const int m = bg.m;
  out.assign(3 * (m + 1), 0.0);
  for (int j = 1; j < m; ++j) {
    const int i = j - 1;
    double yp[3], ypp[3];
    for (int c = 0; c < 3; ++c) {
      const double yl = y[3 * (j - 1) + c];
      const double yc = y[3 * j + c];
      const double yu = y[3 * (j + 1) + c];
      yp[c] = bg.d1[3 * i + 0] * yl + bg.d1[3 * i + 1] * yc + bg.d1[3 * i + 2] * yu;
      ypp[c] = bg.d2[3 * i + 0] * yl + bg.d2[3 * i + 1] * yc + bg.d2[3 * i + 2] * yu;
    }
    const double q0 = 1.0 + y[3 * j + 0];
    const double q1 = 1.0 + y[3 * j + 1];
    const double q2 = 1.0 + y[3 * j + 2];
    const double d01 = y[3 * j + 1] - y[3 * j + 0];
    const double d12 = y[3 * j + 1] - y[3 * j + 2];
    const double T0 = bg.Pr[i] * (ypp[0] - bg.G111[i] * yp[0]) / q1 +
                      (bg.a0[i] / q0) * (yp[0] + bg.LA[i] * d01) +
                      (bg.c0[i] / q2) * yp[0];
    const double T1 = bg.Pr[i] * (ypp[1] - bg.G111[i] * yp[1]) / q1 +
                      (bg.a0[i] / q0) * (yp[1] - bg.LA[i] * d01) +
                      (1.0 / q2) * (bg.c0[i] * yp[1] - bg.c0[i] * bg.LC[i] * d12);
    const double T2 = bg.Pr[i] * (ypp[2] - bg.G111[i] * yp[2]) / q1 +
                      (bg.a0[i] / q0) * yp[2] +
                      (1.0 / q2) * (bg.c0[i] * yp[2] + 0.5 * bg.c0[i] * bg.LC[i] * d12);
    const double A0 = -2.0 * q0 * (bg.K01[i] / q1 + 2.0 * bg.K02[i] / q2);
    const double A1 = -2.0 * q1 * (bg.K01[i] / q0 + 2.0 * bg.K12[i] / q2);
    const double A2 =
        -2.0 * q2 * (bg.K02[i] / q0 + bg.K12[i] / q1 + bg.K23[i] / q2);
    const double G1 = (0.5 / bg.B[i]) *
                      ((yp[0] / q0) * (yp[0] / q0) + (yp[1] / q1) * (yp[1] / q1) +
                       2.0 * (yp[2] / q2) * (yp[2] / q2));
    out[3 * j + 0] = T0 + A0;
    out[3 * j + 1] = T1 + A1 + G1;
    out[3 * j + 2] = T2 + A2;
  }
  // horizon: the t-r pair diffuses through its sum in the disk-polar limit
  const double a = y[0], b = y[2];
  const double qa = 1.0 + a, qb = 1.0 + b;
  const double ds2 = bg.ds * bg.ds;
  const double y0ss0 = 2.0 * (y[3 * 1 + 0] - a) / ds2;
  const double y1ss0 = 2.0 * (y[3 * 1 + 1] - a) / ds2;
  const double y2ss0 = 2.0 * (y[3 * 1 + 2] - b) / ds2;
  const double A0h = -2.0 * qa * (bg.K01h / qa + 2.0 * bg.K02h / qb);
  const double A1h = -2.0 * qa * (bg.K01h / qa + 2.0 * bg.K12h / qb);
  const double A2h = -2.0 * qb * (bg.K02h / qa + bg.K12h / qa + bg.K23h / qb);
  out[0] = bg.P0 / qa * (y0ss0 + y1ss0) + 0.5 * (A0h + A1h);
  out[1] = out[0];
  out[2] = 2.0 * bg.P0 / qa * y2ss0 + A2h;
}

namespace {

std::vector<double> grad_r(const Background& bg, const std::vector<double>& k) {
  const int m = bg.m;
  std::vector<double> kp(3 * (m + 1), 0.0);
  for (int j = 1; j < m; ++j) {
    const int i = j - 1;
    for (int c = 0; c < 3; ++c) {
      kp[3 * j + c] = bg.d1[3 * i + 0] * k[3 * (j - 1) + c] +
                      bg.d1[3 * i + 1] * k[3 * j + c] +
                      bg.d1[3 * i + 2] * k[3 * (j + 1) + c];
    }
  }
  const double dr = bg.r[m] - bg.r[m - 1];
  for (int c = 0; c < 3; ++c)
    kp[3 * m + c] = (k[3 * m + c] - k[3 * (m - 1) + c]) / dr;
  return kp;
}

}  // namespace

double l2_tensor(const Background& bg, const std::vector<double>& k) {
  double acc = 0.0;
  for (int j = 0; j <= bg.m; ++j) {
    const double v2 = k[3 * j + 0] * k[3 * j + 0] + k[3 * j + 1] * k[3 * j + 1] +
                      2.0 * k[3 * j + 2] * k[3 * j + 2];
    acc += bg.wq[j] * v2;
  }
  return std::sqrt(kFullMeasure * acc);
}

double w12_inner(const Background& bg, const std::vector<double>& k1,
                 const std::vector<double>& k2) {
  const std::vector<double> kp1 = grad_r(bg, k1);
  const std::vector<double> kp2 = grad_r(bg, k2);
  double acc = 0.0;
  for (int j = 0; j <= bg.m; ++j) {
    const double v = k1[3 * j + 0] * k2[3 * j + 0] + k1[3 * j + 1] * k2[3 * j + 1] +
                     2.0 * k1[3 * j + 2] * k2[3 * j + 2];
    const double g = bg.f[j] * (kp1[3 * j + 0] * kp2[3 * j + 0] +
                                kp1[3 * j + 1] * kp2[3 * j + 1] +
                                2.0 * kp1[3 * j + 2] * kp2[3 * j + 2]);
    const double alg =
        bg.alg01[j] * (k1[3 * j + 0] - k1[3 * j + 1]) * (k2[3 * j + 0] - k2[3 * j + 1]) +
        bg.alg12[j] * (k1[3 * j + 1] - k1[3 * j + 2]) * (k2[3 * j + 1] - k2[3 * j + 2]);
    acc += bg.wq[j] * (v + g + alg);
  }
  return kFullMeasure * acc;
}

double w12_tensor(const Background& bg, const std::vector<double>& k) {
  return std::sqrt(w12_inner(bg, k, k));
}

ConeReport cone_report(const Background& bg0, const std::vector<double>& v0,
                       const std::vector<double>& hvec) {
  const double cc = w12_inner(bg0, hvec, hvec);
  if (cc <= 0.0)
    throw std::invalid_argument("cone_report: reference direction vanishes");
  const double aa = w12_inner(bg0, v0, v0);
  const double bb = w12_inner(bg0, v0, hvec);
  if (aa <= 0.0) return {0.0, 0.0};
  if (bb <= 0.0) return {std::sqrt(cc), HUGE_VAL};
  const double val = cc - bb * bb / aa;
  return {std::sqrt(std::max(val, 0.0)), aa / bb};
}

namespace {

double background_eps(const std::string& background, double eps) {
  if (background == "g0_plus_eps_h") return eps;
  if (background == "g0") return 0.0;
  throw std::invalid_argument("Run: background must be g0 or g0_plus_eps_h");
}

}  // namespace

Run::Run(int m_, double s_max, const Mode& mode, double eps_,
         const std::string& background, double dt_fixed)
    : m(m_),
      eps(eps_),
      bg_(m_, s_max, mode, background_eps(background, eps_)) {
  if (bg_.eps_b != 0.0)
    bg0_ = std::make_unique<Background>(m, s_max, mode, 0.0);
  lambda = mode.lambda;

  double g11max = 0.0;
  for (int i = 0; i < m; ++i) g11max = std::max(g11max, 1.0 / bg_.B[i]);
  dt = dt_fixed > 0.0
           ? dt_fixed
           : std::min(defaults::flow_dt_max,
                      defaults::flow_cfl * bg_.ds * bg_.ds / g11max);

  uh_nodes.assign(3 * (m + 1), 0.0);
  uh_nodes[0] = mode.a_h;
  uh_nodes[1] = mode.a_h;
  uh_nodes[2] = mode.b_h;
  for (int j = 1; j < m; ++j) {
    const double p = std::sqrt(1.0 - 1.0 / bg_.r[j]);
    double u[3];
    mode.at_p(p, u, 0);
    for (int c = 0; c < 3; ++c) uh_nodes[3 * j + c] = u[c];
  }

  y.assign(3 * (m + 1), 0.0);
  for (int j = 0; j < m; ++j) {
    for (int c = 0; c < 3; ++c) {
      const double gfr = 1.0 + eps * uh_nodes[3 * j + c];
      y[3 * j + c] = gfr / bg_.wbar[3 * j + c] - 1.0;
    }
  }
  t0 = eps > 0.0 ? std::log(eps) / (-lambda) : 0.0;
  t = t0;

  // constant-coefficient implicit tridiagonal (I - dt Pr D2r) on j = 1..m-1
  const int ni = m - 1;
  std::vector<double> diag(ni), sup(ni);
  sub_.assign(ni, 0.0);
  for (int i = 0; i < ni; ++i) {
    const double W0 = dt * bg_.Pr[i] * bg_.d2[3 * i + 0];
    const double W1 = dt * bg_.Pr[i] * bg_.d2[3 * i + 1];
    const double W2 = dt * bg_.Pr[i] * bg_.d2[3 * i + 2];
    diag[i] = 1.0 - W1;
    sup[i] = -W2;
    sub_[i] = -W0;
    if (i == 0) rcoef0_ = W0;
  }
  denom_.assign(ni, 0.0);
  cp_.assign(ni, 0.0);
  denom_[0] = diag[0];
  cp_[0] = sup[0] / denom_[0];
  for (int i = 1; i < ni; ++i) {
    denom_[i] = diag[i] - sub_[i] * cp_[i - 1];
    cp_[i] = sup[i] / denom_[i];
  }
}

double Run::delta() const { return std::exp(-lambda * t); }

bool Run::step() {
  const int ni = m - 1;
  rhs_direct(bg_, y, full_, true);
  expl_ = full_;
  for (int j = 1; j < m; ++j) {
    const int i = j - 1;
    for (int c = 0; c < 3; ++c) {
      const double ypp = bg_.d2[3 * i + 0] * y[3 * (j - 1) + c] +
                         bg_.d2[3 * i + 1] * y[3 * j + c] +
                         bg_.d2[3 * i + 2] * y[3 * (j + 1) + c];
      expl_[3 * j + c] -= bg_.Pr[i] * ypp;
    }
  }
  double ynew0[3];
  for (int c = 0; c < 3; ++c) ynew0[c] = y[c] + dt * full_[c];
  ynew0[1] = ynew0[0];

  std::vector<double> rhs(ni);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < ni; ++i)
      rhs[i] = y[3 * (i + 1) + c] + dt * expl_[3 * (i + 1) + c];
    rhs[0] += rcoef0_ * ynew0[c];
    rhs[0] /= denom_[0];
    for (int i = 1; i < ni; ++i)
      rhs[i] = (rhs[i] - sub_[i] * rhs[i - 1]) / denom_[i];
    for (int i = ni - 2; i >= 0; --i) rhs[i] -= cp_[i] * rhs[i + 1];
    for (int i = 0; i < ni; ++i) y[3 * (i + 1) + c] = rhs[i];
  }
  for (int c = 0; c < 3; ++c) {
    y[c] = ynew0[c];
    y[3 * m + c] = 0.0;
  }
  t += dt;
  for (int j = 0; j <= m && !blown; ++j) {
    for (int c = 0; c < 3; ++c) {
      const double q = 1.0 + y[3 * j + c];
      if (q <= defaults::flow_pos_lo || q >= defaults::flow_pos_hi) {
        blown = true;
        break;
      }
    }
  }
  return !blown;
}

std::vector<double> Run::gfr() const {
  std::vector<double> out(3 * (m + 1));
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = bg_.wbar[i] * (1.0 + y[i]);
  return out;
}

Run::DiagOut Run::diag() const {
  DiagOut d;
  d.v0 = gfr();
  for (double& x : d.v0) x -= 1.0;
  const double del = delta();
  std::vector<double> w(d.v0.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = d.v0[i] - del * uh_nodes[i];
  d.norm_g = l2_tensor(bg0(), d.v0);
  d.norm_w = l2_tensor(bg0(), w);
  double gm = 0.0, tail = 0.0;
  const int j_tail = static_cast<int>(0.95 * (m + 1));
  for (int j = 0; j <= m; ++j) {
    const double absv = std::sqrt(d.v0[3 * j + 0] * d.v0[3 * j + 0] +
                                  d.v0[3 * j + 1] * d.v0[3 * j + 1] +
                                  2.0 * d.v0[3 * j + 2] * d.v0[3 * j + 2]);
    gm = std::max(gm, absv);
    if (j >= j_tail) tail = std::max(tail, absv);
  }
  d.farfield = gm > 0.0 ? tail / gm : 0.0;
  return d;
}

FlowResult run_flow(const Mode& mode, int m, double s_max, double eps,
                    const std::string& background, double t_end,
                    double dt_fixed, int sample_every) {
  Run run(m, s_max, mode, eps, background, dt_fixed);
  FlowResult res;
  res.dt = run.dt;
  res.t0 = run.t0;
  res.lambda = run.lambda;
  const double t_stop = run.t0 + t_end;
  int k = 0;
  while (run.t < t_stop - 1e-12) {
    if (!run.step()) {
      res.blown = true;
      break;
    }
    ++k;
    if (k % sample_every == 0) {
      const Run::DiagOut d = run.diag();
      const ConeReport cr = cone_report(run.bg0(), d.v0, run.uh_nodes);
      res.rows.push_back(
          {run.t, run.delta(), d.norm_g, d.norm_w, cr.opening, d.farfield});
      const double del = run.delta();
      res.max_w_over_delta = std::max(res.max_w_over_delta, d.norm_w / del);
      res.max_opening = std::max(res.max_opening, cr.opening);
      res.max_farfield = std::max(res.max_farfield, d.farfield);
    }
  }
  res.steps = k;
  bool fit_ok = res.rows.size() >= 2;
  for (const TrajectoryRow& row : res.rows)
    if (!(row.norm_g > 0.0)) fit_ok = false;
  if (fit_ok) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double nr = static_cast<double>(res.rows.size());
    for (const TrajectoryRow& row : res.rows) {
      const double ln = std::log(row.norm_g);
      st += row.t;
      sy += ln;
      stt += row.t * row.t;
      sty += row.t * ln;
    }
    res.slope = (nr * sty - st * sy) / (nr * stt - st * st);
  }
  return res;
}

AncientResult ancient_limit(const Mode& mode, int m, double s_max, int pow_min,
                            int pow_max) {
  if (pow_max < pow_min) throw std::invalid_argument("ancient_limit: bad powers");
  const int count = pow_max - pow_min + 1;
  AncientResult res;
  res.members.resize(count);
  const double eps0 = std::pow(2.0, -pow_min);
  res.t_common = std::log(eps0) / (-mode.lambda);
  const Background bg0(m, s_max, mode, 0.0);

#pragma omp parallel for schedule(dynamic, 1)
  for (int idx = 0; idx < count; ++idx) {
    const double eps = std::pow(2.0, -(pow_min + idx));
    Run probe(m, s_max, mode, eps, "g0");
    const int nst =
        static_cast<int>(std::llround((res.t_common - probe.t0) / probe.dt));
    Run run = nst > 0 ? Run(m, s_max, mode, eps, "g0",
                            (res.t_common - probe.t0) / nst)
                      : std::move(probe);
    for (int k = 0; k < nst; ++k)
      if (!run.step()) break;
    const Run::DiagOut d = run.diag();
    const ConeReport cr = cone_report(bg0, d.v0, run.uh_nodes);
    AncientMember& mem = res.members[idx];
    mem.eps = eps;
    mem.steps = nst;
    mem.norm_g = d.norm_g;
    mem.opening = cr.opening;
    mem.blown = run.blown;
    mem.gfr = run.gfr();
  }

  res.max_opening = 0.0;
  for (const AncientMember& mem : res.members)
    res.max_opening = std::max(res.max_opening, mem.opening);
  res.distances.resize(count - 1);
  for (int i = 0; i + 1 < count; ++i) {
    std::vector<double> k = res.members[i].gfr;
    for (std::size_t j = 0; j < k.size(); ++j) k[j] -= res.members[i + 1].gfr[j];
    res.distances[i] = w12_tensor(bg0, k);
  }
  res.strictly_decreasing = true;
  for (std::size_t i = 1; i < res.distances.size(); ++i)
    if (!(res.distances[i] < res.distances[i - 1])) res.strictly_decreasing = false;
  return res;
}

}  // namespace esflow::flow
