#include "polytension/manifold.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace polytension {

ChartTarget::ChartTarget(int n) : n_(n) {
  if (n < 1 || n > kMaxTargetN)
    throw ConfigError("target dim " + std::to_string(n) + " outside [1," +
                      std::to_string(kMaxTargetN) + "]");
}

bool ChartTarget::in_domain(const double* y) const {
  double t = 0.0;
  for (int a = 0; a < n_; ++a) t += y[a] * y[a];
  return std::sqrt(t) <= chart_bound();
}

void ChartTarget::curvature(const double* y, double* R) const {
  double c = 0.0;
  if (!space_form(&c))
    throw Error("curvature components not implemented for target " + name());
  const int n = n_;
  double h[kMaxTargetN * kMaxTargetN];
  metric(y, h);
  // R^a_{bgd} = c (h_{db} delta^a_g - h_{gb} delta^a_d)
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) {
          double v = 0.0;
          if (a == g) v += c * h[d * n + b];
          if (a == d) v -= c * h[g * n + b];
          R[((a * n + b) * n + g) * n + d] = v;
        }
}

void ChartTarget::curvature_grad(const double* y, double* DR) const {
  double c = 0.0;
  if (!space_form(&c))
    throw Error("curvature gradient not implemented for target " + name());
  (void)y;
  std::memset(DR, 0, sizeof(double) * n_ * n_ * n_ * n_ * n_);
}

void ChartTarget::metric(const long double* y, long double* h) const {
  double yd[kMaxTargetN], hd[kMaxTargetN * kMaxTargetN];
  for (int a = 0; a < n_; ++a) yd[a] = (double)y[a];
  metric(yd, hd);
  for (int i = 0; i < n_ * n_; ++i) h[i] = hd[i];
}

void ChartTarget::christoffels(const long double* y, long double* G) const {
  double yd[kMaxTargetN];
  std::vector<double> Gd((std::size_t)n_ * n_ * n_);
  for (int a = 0; a < n_; ++a) yd[a] = (double)y[a];
  christoffels(yd, Gd.data());
  for (int i = 0; i < n_ * n_ * n_; ++i) G[i] = Gd[i];
}

void ChartTarget::curvature(const long double* y, long double* R) const {
  double c = 0.0;
  if (!space_form(&c))
    throw Error("extended curvature components not implemented for target " + name());
  const int n = n_;
  long double h[kMaxTargetN * kMaxTargetN];
  metric(y, h);
  long double cl = c;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) {
          long double v = 0;
          if (a == g) v += cl * h[d * n + b];
          if (a == d) v -= cl * h[g * n + b];
          R[((a * n + b) * n + g) * n + d] = v;
        }
}

EuclideanTarget::EuclideanTarget(int n) : ChartTarget(n) {}

double EuclideanTarget::chart_bound() const {
  return std::numeric_limits<double>::infinity();
}

void EuclideanTarget::metric(const double*, double* h) const {
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) h[a * n_ + b] = (a == b) ? 1.0 : 0.0;
}

void EuclideanTarget::christoffels(const double*, double* G) const {
  std::memset(G, 0, sizeof(double) * n_ * n_ * n_);
}

void EuclideanTarget::metric(const long double*, long double* h) const {
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) h[a * n_ + b] = (a == b) ? 1.0L : 0.0L;
}

void EuclideanTarget::christoffels(const long double*, long double* G) const {
  for (int i = 0; i < n_ * n_ * n_; ++i) G[i] = 0.0L;
}

SphereTarget::SphereTarget(int n, double radius) : ChartTarget(n), rho_(radius) {
  if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
}

void SphereTarget::metric(const double* y, double* h) const {
  double t = 0.0;
  for (int a = 0; a < n_; ++a) t += y[a] * y[a];
  double s = rho_ * rho_ + t;
  double f = 4.0 * rho_ * rho_ * rho_ * rho_ / (s * s);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) h[a * n_ + b] = (a == b) ? f : 0.0;
}

void SphereTarget::christoffels(const double* y, double* G) const {
  double t = 0.0;
  for (int a = 0; a < n_; ++a) t += y[a] * y[a];
  double q = -2.0 / (rho_ * rho_ + t);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int g = 0; g < n_; ++g) {
        double v = 0.0;
        if (a == b) v += y[g];
        if (a == g) v += y[b];
        if (b == g) v -= y[a];
        G[(a * n_ + b) * n_ + g] = q * v;
      }
}

void SphereTarget::metric(const long double* y, long double* h) const {
  long double t = 0, r2 = (long double)rho_ * rho_;
  for (int a = 0; a < n_; ++a) t += y[a] * y[a];
  long double s = r2 + t;
  long double f = 4 * r2 * r2 / (s * s);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) h[a * n_ + b] = (a == b) ? f : 0.0L;
}

void SphereTarget::christoffels(const long double* y, long double* G) const {
  long double t = 0, r2 = (long double)rho_ * rho_;
  for (int a = 0; a < n_; ++a) t += y[a] * y[a];
  long double q = -2 / (r2 + t);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int g = 0; g < n_; ++g) {
        long double v = 0;
        if (a == b) v += y[g];
        if (a == g) v += y[b];
        if (b == g) v -= y[a];
        G[(a * n_ + b) * n_ + g] = q * v;
      }
}

HyperbolicTarget::HyperbolicTarget(int n, double radius)
    : ChartTarget(n), rho_(radius) {
  if (!(radius > 0.0)) throw ConfigError("hyperbolic radius must be positive");
}

void HyperbolicTarget::metric(const double* y, double* h) const {
  double t = 0.0;
  for (int a = 0; a < n_; ++a) t += y[a] * y[a];
  double s = rho_ * rho_ - t;
  if (!(s > 0.0)) throw NumericalError("hyperbolic chart point outside Poincare ball");
  double f = 4.0 * rho_ * rho_ * rho_ * rho_ / (s * s);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) h[a * n_ + b] = (a == b) ? f : 0.0;
}

void HyperbolicTarget::christoffels(const double* y, double* G) const {
  double t = 0.0;
  for (int a = 0; a < n_; ++a) t += y[a] * y[a];
  double q = 2.0 / (rho_ * rho_ - t);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int g = 0; g < n_; ++g) {
        double v = 0.0;
        if (a == b) v += y[g];
        if (a == g) v += y[b];
        if (b == g) v -= y[a];
        G[(a * n_ + b) * n_ + g] = q * v;
      }
}

void HyperbolicTarget::metric(const long double* y, long double* h) const {
  long double t = 0, r2 = (long double)rho_ * rho_;
  for (int a = 0; a < n_; ++a) t += y[a] * y[a];
  long double s = r2 - t;
  if (!(s > 0))
    throw NumericalError("hyperbolic chart point outside Poincare ball");
  long double f = 4 * r2 * r2 / (s * s);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) h[a * n_ + b] = (a == b) ? f : 0.0L;
}

void HyperbolicTarget::christoffels(const long double* y, long double* G) const {
  long double t = 0, r2 = (long double)rho_ * rho_;
  for (int a = 0; a < n_; ++a) t += y[a] * y[a];
  long double q = 2 / (r2 - t);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int g = 0; g < n_; ++g) {
        long double v = 0;
        if (a == b) v += y[g];
        if (a == g) v += y[b];
        if (b == g) v -= y[a];
        G[(a * n_ + b) * n_ + g] = q * v;
      }
}

void spd_inverse_small(int n, const double* A, double* inv) {
  double L[kMaxTargetN * kMaxTargetN] = {0.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = A[i * n + j];
      for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) throw NumericalError("matrix not positive definite");
        L[i * n + i] = std::sqrt(s);
      } else {
        L[i * n + j] = s / L[j * n + j];
      }
    }
  for (int col = 0; col < n; ++col) {
    double y[kMaxTargetN];
    for (int i = 0; i < n; ++i) {
      double s = (i == col) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= L[i * n + k] * y[k];
      y[i] = s / L[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      for (int k = i + 1; k < n; ++k) s -= L[k * n + i] * inv[k * n + col];
      inv[i * n + col] = s / L[i * n + i];
    }
  }
}

GenericChartTarget::GenericChartTarget(int n, MetricFn fn, double bound,
                                       std::string label)
    : ChartTarget(n), fn_(std::move(fn)), bound_(bound), label_(std::move(label)) {}

void GenericChartTarget::metric(const double* y, double* h) const { fn_(y, h); }

void GenericChartTarget::gamma_and_grad(const double* y, double* G, double* dG) const {
  const int n = n_;
  const int nn = n * n;
  const double d = kMetricStep;
  std::vector<double> h(nn), hinv(nn), dh(n * nn), d2h(n * n * nn);
  std::vector<double> yp(n), hp(nn), hm(nn), hpp(nn), hpm(nn), hmp(nn), hmm(nn);

  fn_(y, h.data());
  spd_inverse_small(n, h.data(), hinv.data());

  // dh[e][*] and d2h[e][f][*] by centered differences of the metric itself.
  for (int e = 0; e < n; ++e) {
    for (int a = 0; a < n; ++a) yp[a] = y[a];
    yp[e] = y[e] + d; fn_(yp.data(), hp.data());
    yp[e] = y[e] - d; fn_(yp.data(), hm.data());
    for (int k = 0; k < nn; ++k) {
      dh[e * nn + k] = (hp[k] - hm[k]) / (2.0 * d);
      d2h[(e * n + e) * nn + k] = (hp[k] - 2.0 * h[k] + hm[k]) / (d * d);
    }
  }
  for (int e = 0; e < n; ++e)
    for (int f = e + 1; f < n; ++f) {
      for (int a = 0; a < n; ++a) yp[a] = y[a];
      yp[e] = y[e] + d; yp[f] = y[f] + d; fn_(yp.data(), hpp.data());
      yp[f] = y[f] - d; fn_(yp.data(), hpm.data());
      yp[e] = y[e] - d; fn_(yp.data(), hmm.data());
      yp[f] = y[f] + d; fn_(yp.data(), hmp.data());
      for (int k = 0; k < nn; ++k) {
        double v = (hpp[k] - hpm[k] - hmp[k] + hmm[k]) / (4.0 * d * d);
        d2h[(e * n + f) * nn + k] = v;
        d2h[(f * n + e) * nn + k] = v;
      }
    }

  auto christoffel_low = [&](const double* dhloc, int b, int g, int l) {
    // (d_b h_{gl} + d_g h_{bl} - d_l h_{bg}) with dhloc[e*nn + a*n + c] = d_e h_{ac}
    return dhloc[b * nn + g * n + l] + dhloc[g * nn + b * n + l] -
           dhloc[l * nn + b * n + g];
  };

  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += hinv[a * n + l] * christoffel_low(dh.data(), b, g, l);
        G[(a * n + b) * n + g] = 0.5 * s;
      }

  if (!dG) return;

  // d_e hinv = -hinv (d_e h) hinv
  std::vector<double> dhinv(n * nn);
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q)
            s += hinv[a * n + p] * dh[e * nn + p * n + q] * hinv[q * n + b];
        dhinv[e * nn + a * n + b] = -s;
      }

  // d_e Gamma^a_{bg} = 1/2 d_e hinv^{al} (...) + 1/2 hinv^{al} d_e(...)
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int g = 0; g < n; ++g) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            s += dhinv[e * nn + a * n + l] * christoffel_low(dh.data(), b, g, l);
            double dlow = d2h[(e * n + b) * nn + g * n + l] +
                          d2h[(e * n + g) * nn + b * n + l] -
                          d2h[(e * n + l) * nn + b * n + g];
            s += hinv[a * n + l] * dlow;
          }
          dG[((e * n + a) * n + b) * n + g] = 0.5 * s;
        }
}

void GenericChartTarget::christoffels(const double* y, double* G) const {
  gamma_and_grad(y, G, nullptr);
}

void GenericChartTarget::curvature_raw(const double* y, double* R, double* Gout) const {
  const int n = n_;
  std::vector<double> G(n * n * n), dG(n * n * n * n);
  gamma_and_grad(y, G.data(), dG.data());
  if (Gout) std::memcpy(Gout, G.data(), sizeof(double) * n * n * n);
  auto Gm = [&](int a, int b, int g) { return G[(a * n + b) * n + g]; };
  auto dGm = [&](int e, int a, int b, int g) { return dG[((e * n + a) * n + b) * n + g]; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) {
          double v = dGm(g, a, d, b) - dGm(d, a, g, b);
          for (int mu = 0; mu < n; ++mu)
            v += Gm(a, g, mu) * Gm(mu, d, b) - Gm(a, d, mu) * Gm(mu, g, b);
          R[((a * n + b) * n + g) * n + d] = v;
        }
  // Enforce antisymmetry in the last two slots exactly, so that R(X,X)Z
  // contracts to zero in floating point as well.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int d = g + 1; d < n; ++d) {
          double v = 0.5 * (R[((a * n + b) * n + g) * n + d] -
                            R[((a * n + b) * n + d) * n + g]);
          R[((a * n + b) * n + g) * n + d] = v;
          R[((a * n + b) * n + d) * n + g] = -v;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g) R[((a * n + b) * n + g) * n + g] = 0.0;
}

void GenericChartTarget::curvature(const double* y, double* R) const {
  curvature_raw(y, R, nullptr);
}

void GenericChartTarget::curvature_grad(const double* y, double* DR) const {
  const int n = n_;
  const int n4 = n * n * n * n;
  const double d = kCurvGradStep;
  std::vector<double> G(n * n * n), R0(n4), Rp(n4), Rm(n4), dR(n * n4);
  std::vector<double> yp(n);
  curvature_raw(y, R0.data(), G.data());
  for (int w = 0; w < n; ++w) {
    for (int a = 0; a < n; ++a) yp[a] = y[a];
    yp[w] = y[w] + d; curvature_raw(yp.data(), Rp.data(), nullptr);
    yp[w] = y[w] - d; curvature_raw(yp.data(), Rm.data(), nullptr);
    for (int k = 0; k < n4; ++k) dR[w * n4 + k] = (Rp[k] - Rm[k]) / (2.0 * d);
  }
  auto Gm = [&](int a, int b, int g) { return G[(a * n + b) * n + g]; };
  auto Rm0 = [&](int a, int b, int g, int dd) { return R0[((a * n + b) * n + g) * n + dd]; };
  for (int w = 0; w < n; ++w)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int g = 0; g < n; ++g)
          for (int e = 0; e < n; ++e) {
            double v = dR[w * n4 + ((a * n + b) * n + g) * n + e];
            for (int mu = 0; mu < n; ++mu) {
              v += Gm(a, w, mu) * Rm0(mu, b, g, e);
              v -= Gm(mu, w, b) * Rm0(a, mu, g, e);
              v -= Gm(mu, w, g) * Rm0(a, b, mu, e);
              v -= Gm(mu, w, e) * Rm0(a, b, g, mu);
            }
            DR[(((w * n + a) * n + b) * n + g) * n + e] = v;
          }
}

}  // namespace polytension
