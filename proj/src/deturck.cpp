#include "esflow/deturck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "esflow/chart.hpp"
#include "esflow/defaults.hpp"

namespace esflow::deturck {

namespace {

// centered differences with one-sided second-order edges
std::vector<double> gradient(const std::vector<double>& y, double h) {
  const int n = static_cast<int>(y.size());
  std::vector<double> g(n);
  g[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
  for (int i = 1; i + 1 < n; ++i) g[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
  g[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
  return g;
}

// linear interpolation on the uniform s-grid with end clamping
double interp_s(const std::vector<double>& vals, double ds, double sq) {
  const int n = static_cast<int>(vals.size());
  if (sq <= 0.0) return vals[0];
  const double x = sq / ds;
  const int i = static_cast<int>(x);
  if (i >= n - 1) return vals[n - 1];
  const double w = x - i;
  return vals[i] * (1.0 - w) + vals[i + 1] * w;
}

// gauge field numerator V1(s) on the s-grid for one stored state
std::vector<double> cfield(const flow::Background& bg,
                           const std::vector<double>& y) {
  const int m = bg.m;
  std::vector<double> full(m + 1, 0.0);
  for (int j = 1; j < m; ++j) {
    const int i = j - 1;
    const double sd = bg.sdot[j];
    double yp[3];
    for (int c = 0; c < 3; ++c) {
      const double ys = (y[3 * (j + 1) + c] - y[3 * (j - 1) + c]) / (2.0 * bg.ds);
      yp[c] = ys * sd;
    }
    const double q0 = 1.0 + y[3 * j + 0];
    const double q1 = 1.0 + y[3 * j + 1];
    const double q2 = 1.0 + y[3 * j + 2];
    const double A = bg.A[i] * q0;
    const double Ap = bg.Ap[i] * q0 + bg.A[i] * yp[0];
    const double B = bg.B[i] * q1;
    const double Bp = bg.Bp[i] * q1 + bg.B[i] * yp[1];
    const double C = bg.C[i] * q2;
    const double Cp = bg.Cp[i] * q2 + bg.C[i] * yp[2];
    const double ri = bg.r[j];
    const double f = 1.0 - 1.0 / ri;
    const double fp = 1.0 / (ri * ri);
    const double A0p = fp;
    const double B0 = 1.0 / f;
    const double B0p = -fp / (f * f);
    const double C0p = 2.0 * ri;
    const double S = -Ap / (2.0 * A * B) + Bp / (2.0 * B * B) - Cp / (B * C);
    const double S0 = (1.0 / A) * (-A0p / (2.0 * B0)) +
                      (1.0 / B) * (B0p / (2.0 * B0)) +
                      (2.0 / C) * (-C0p / (2.0 * B0));
    full[j] = S - S0;
  }
  full[0] = (4.0 * full[1] - full[2]) / 3.0;
  return full;
}

struct Profiles {
  std::vector<double> A, B, C;
};

}  // namespace

Report recover(const flow::Mode& mode, int m, double s_max, double eps,
               const std::string& background, double delta_stop) {
  Report rep;
  flow::Run run(m, s_max, mode, eps, background);
  const double lam = run.lambda;
  const double t_end = std::log(delta_stop) / (-lam);
  rep.dt = run.dt;

  std::vector<double> snap_t{run.t};
  std::vector<std::vector<double>> snap_y{run.y};
  const int snap_every =
      std::max(1, static_cast<int>(std::llround(defaults::deturck_snap_interval / run.dt)));
  int k = 0;
  while (run.t < t_end - 1e-12) {
    if (!run.step()) {
      rep.blown = true;
      rep.steps = k;
      return rep;
    }
    ++k;
    if (k % snap_every == 0) {
      snap_t.push_back(run.t);
      snap_y.push_back(run.y);
    }
  }
  rep.steps = k;
  rep.snapshots = static_cast<int>(snap_t.size());
  const int ns = rep.snapshots;
  if (ns < 4) throw std::runtime_error("deturck: too few snapshots");
  rep.snap_t = snap_t;

  const flow::Background& bg = run.bg();
  std::vector<double> deltas(ns);
  for (int j = 0; j < ns; ++j) deltas[j] = std::exp(-lam * snap_t[j]);
  rep.deltas = deltas;

  std::vector<std::vector<double>> cf(ns);
  for (int j = 0; j < ns; ++j) cf[j] = cfield(bg, snap_y[j]);

  const int na = defaults::deturck_analysis_pts;
  std::vector<double> rA(na);
  const double hA = (defaults::deturck_r_hi - defaults::deturck_r_lo) / (na - 1);
  for (int i = 0; i < na; ++i) rA[i] = defaults::deturck_r_lo + i * hA;
  rep.r_grid = rA;

  // dX/ddelta = -c(X, delta) with c = V1 / (-lam delta); below the first
  // snapshot the field is frozen at its linear-regime value
  auto interp_c = [&](const std::vector<double>& X, double dq,
                      std::vector<double>& c) {
    int j = static_cast<int>(std::lower_bound(deltas.begin(), deltas.end(), dq) -
                             deltas.begin());
    j = std::min(std::max(j, 1), ns - 1);
    const double w = (dq - deltas[j - 1]) / (deltas[j] - deltas[j - 1]);
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double sq = chart::to_s(X[i]);
      const double v1 = interp_s(cf[j - 1], bg.ds, sq) * (1.0 - w) +
                        interp_s(cf[j], bg.ds, sq) * w;
      c[i] = v1 / (-lam * dq);
    }
  };

  std::vector<double> X = rA;
  std::vector<double> c(na);
  rep.maps.push_back(X);
  double dprev = 0.0;
  const int nsub = defaults::deturck_presteps;
  for (int step = 1; step <= nsub + ns - 1 && !rep.crossing; ++step) {
    const double dq =
        step <= nsub ? deltas[0] * step / nsub : deltas[step - nsub];
    const double dd = dq - dprev;
    const double mid = 0.5 * (dprev + dq);
    if (mid <= deltas[0]) {
      for (int i = 0; i < na; ++i) {
        const double v1 = interp_s(cf[0], bg.ds, chart::to_s(X[i]));
        c[i] = v1 / (-lam * deltas[0]);
      }
    } else {
      interp_c(X, mid, c);
    }
    for (int i = 0; i < na; ++i) X[i] -= dd * c[i];
    dprev = dq;
    for (int i = 0; i + 1 < na; ++i)
      if (X[i + 1] - X[i] <= 0.0) rep.crossing = true;
    if (step > nsub && !rep.crossing) rep.maps.push_back(X);
  }
  rep.monotone = !rep.crossing;
  for (int i = 0; i + 1 < na && rep.monotone; ++i)
    if (X[i + 1] - X[i] <= 0.0) rep.monotone = false;
  for (int i = 0; i < na; ++i)
    rep.max_abs_shift = std::max(rep.max_abs_shift, std::abs(X[i] - rA[i]));
  if (rep.crossing) return rep;

  // metric profiles of snapshot j at arbitrary radii
  const double e = bg.eps_b;
  auto gABC = [&](int j, const std::vector<double>& rq) {
    Profiles pr;
    const int n = static_cast<int>(rq.size());
    pr.A.resize(n);
    pr.B.resize(n);
    pr.C.resize(n);
    std::vector<double> col[3];
    for (int cdx = 0; cdx < 3; ++cdx) {
      col[cdx].resize(bg.m + 1);
      for (int jj = 0; jj <= bg.m; ++jj) col[cdx][jj] = snap_y[j][3 * jj + cdx];
    }
    for (int i = 0; i < n; ++i) {
      const double sq = chart::to_s(rq[i]);
      double yi[3];
      for (int cdx = 0; cdx < 3; ++cdx) yi[cdx] = interp_s(col[cdx], bg.ds, sq);
      const double f = 1.0 - 1.0 / rq[i];
      double w0 = 1.0, w1 = 1.0, w2 = 1.0;
      if (e != 0.0) {
        const double p = std::sqrt(1.0 - 1.0 / rq[i]);
        double u[3];
        mode.at_p(p, u, 0);
        w0 = 1.0 + e * u[0];
        w1 = 1.0 + e * u[1];
        w2 = 1.0 + e * u[2];
      }
      pr.A[i] = f * w0 * (1.0 + yi[0]);
      pr.B[i] = w1 / f * (1.0 + yi[1]);
      pr.C[i] = rq[i] * rq[i] * w2 * (1.0 + yi[2]);
    }
    return pr;
  };

  auto ric_frame = [&](const Profiles& g, std::vector<double>& R0,
                       std::vector<double>& R1, std::vector<double>& R2) {
    const std::vector<double> Ap = gradient(g.A, hA);
    const std::vector<double> App = gradient(Ap, hA);
    const std::vector<double> Bp = gradient(g.B, hA);
    const std::vector<double> Cp = gradient(g.C, hA);
    const std::vector<double> Cpp = gradient(Cp, hA);
    R0.resize(na);
    R1.resize(na);
    R2.resize(na);
    for (int i = 0; i < na; ++i) {
      const double K01 = -(App[i] - Ap[i] * Ap[i] / (2.0 * g.A[i]) -
                           Ap[i] * Bp[i] / (2.0 * g.B[i])) /
                         (2.0 * g.A[i] * g.B[i]);
      const double K02 = -Ap[i] * Cp[i] / (4.0 * g.A[i] * g.B[i] * g.C[i]);
      const double K12 = -(Cpp[i] - Cp[i] * Cp[i] / (2.0 * g.C[i]) -
                           Cp[i] * Bp[i] / (2.0 * g.B[i])) /
                         (2.0 * g.C[i] * g.B[i]);
      const double K23 = (1.0 - Cp[i] * Cp[i] / (4.0 * g.C[i] * g.B[i])) / g.C[i];
      R0[i] = K01 + 2.0 * K02;
      R1[i] = K01 + 2.0 * K12;
      R2[i] = K02 + K12 + K23;
    }
  };

  const int j = ns - 3;
  const double dt_sn = snap_t[j + 1] - snap_t[j - 1];
  const int wlo = 20, whi = na - 20;

  auto pull = [&](int jj) {
    Profiles pr = gABC(jj, rep.maps[jj]);
    const std::vector<double> Xp = gradient(rep.maps[jj], hA);
    for (int i = 0; i < na; ++i) pr.B[i] *= Xp[i] * Xp[i];
    return pr;
  };
  const Profiles gm = pull(j - 1);
  const Profiles gp = pull(j + 1);
  const Profiles g0 = pull(j);
  std::vector<double> R0, R1, R2;
  ric_frame(g0, R0, R1, R2);
  double acc = 0.0;
  for (int i = wlo; i < whi; ++i) {
    const double fA = 1.0 - 1.0 / rA[i];
    const double res0 = (gp.A[i] - gm.A[i]) / dt_sn + 2.0 * g0.A[i] * R0[i];
    const double res1 = (gp.B[i] - gm.B[i]) / dt_sn + 2.0 * g0.B[i] * R1[i];
    const double res2 = (gp.C[i] - gm.C[i]) / dt_sn + 2.0 * g0.C[i] * R2[i];
    const double num = (res0 / fA) * (res0 / fA) + (res1 * fA) * (res1 * fA) +
                       2.0 * (res2 / (rA[i] * rA[i])) * (res2 / (rA[i] * rA[i]));
    acc += num * rA[i] * rA[i] * hA;
  }
  rep.ricci_residual = std::sqrt(acc);

  // gauged evolution residual in the same norm, for scale
  const Profiles gu = gABC(j - 1, rA);
  const Profiles gv = gABC(j + 1, rA);
  const Profiles gw = gABC(j, rA);
  std::vector<double> R0w, R1w, R2w;
  ric_frame(gw, R0w, R1w, R2w);
  std::vector<double> Ab(na), Abp(na), Bb(na), Bbp(na), Cb(na), Cbp(na);
  for (int i = 0; i < na; ++i) {
    const double f = 1.0 - 1.0 / rA[i];
    const double fp = 1.0 / (rA[i] * rA[i]);
    if (e != 0.0) {
      const double p = std::sqrt(1.0 - 1.0 / rA[i]);
      double u[3], up[3];
      mode.at_p(p, u, 0);
      mode.at_p(p, up, 1);
      const double q1p = 1.0 / (2.0 * p * rA[i] * rA[i]);
      const double w0 = 1.0 + e * u[0], w1 = 1.0 + e * u[1], w2 = 1.0 + e * u[2];
      Ab[i] = f * w0;
      Abp[i] = fp * w0 + f * e * up[0] * q1p;
      Bb[i] = w1 / f;
      Bbp[i] = e * up[1] * q1p / f - w1 * fp / (f * f);
      Cb[i] = rA[i] * rA[i] * w2;
      Cbp[i] = 2.0 * rA[i] * w2 + rA[i] * rA[i] * e * up[2] * q1p;
    } else {
      Ab[i] = f;
      Abp[i] = fp;
      Bb[i] = 1.0 / f;
      Bbp[i] = -fp / (f * f);
      Cb[i] = rA[i] * rA[i];
      Cbp[i] = 2.0 * rA[i];
    }
  }
  const std::vector<double> Awp = gradient(gw.A, hA);
  const std::vector<double> Bwp = gradient(gw.B, hA);
  const std::vector<double> Cwp = gradient(gw.C, hA);
  std::vector<double> V1(na);
  for (int i = 0; i < na; ++i) {
    const double S = -Awp[i] / (2.0 * gw.A[i] * gw.B[i]) +
                     Bwp[i] / (2.0 * gw.B[i] * gw.B[i]) -
                     Cwp[i] / (gw.B[i] * gw.C[i]);
    const double Sb = (1.0 / gw.A[i]) * (-Abp[i] / (2.0 * Bb[i])) +
                      (1.0 / gw.B[i]) * (Bbp[i] / (2.0 * Bb[i])) +
                      (2.0 / gw.C[i]) * (-Cbp[i] / (2.0 * Bb[i]));
    V1[i] = S - Sb;
  }
  const std::vector<double> V1p = gradient(V1, hA);
  double acc2 = 0.0;
  for (int i = wlo; i < whi; ++i) {
    const double fA = 1.0 - 1.0 / rA[i];
    const double lv0 = Awp[i] * V1[i];
    const double lv1 = 2.0 * gw.B[i] * V1p[i] + Bwp[i] * V1[i];
    const double lv2 = Cwp[i] * V1[i];
    const double r0 = (gv.A[i] - gu.A[i]) / dt_sn + 2.0 * gw.A[i] * R0w[i] - lv0;
    const double r1 = (gv.B[i] - gu.B[i]) / dt_sn + 2.0 * gw.B[i] * R1w[i] - lv1;
    const double r2 = (gv.C[i] - gu.C[i]) / dt_sn + 2.0 * gw.C[i] * R2w[i] - lv2;
    const double num = (r0 / fA) * (r0 / fA) + (r1 * fA) * (r1 * fA) +
                       2.0 * (r2 / (rA[i] * rA[i])) * (r2 / (rA[i] * rA[i]));
    acc2 += num * rA[i] * rA[i] * hA;
  }
  rep.rdt_self_residual = std::sqrt(acc2);
  rep.ratio = rep.ricci_residual / rep.rdt_self_residual;
  return rep;
}

}  // namespace esflow::deturck
