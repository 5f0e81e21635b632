#include "polytension/tension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <type_traits>

namespace polytension {

namespace {

// Per-node curvature evaluation context: space forms use the closed form with
// the chart metric, anything else the component array.
template <class R>
struct CurvatureEval {
  const ChartTarget* tgt;
  double c = 0.0;
  bool sf;
  int n;
  std::vector<R> h;
  std::vector<R> Rcomp;

  explicit CurvatureEval(const ChartTarget& t)
      : tgt(&t), sf(t.space_form(&c)), n(t.n()), h((std::size_t)n * n),
        Rcomp(sf ? 0 : (std::size_t)n * n * n * n) {}

  void at(const R* y) {
    tgt->metric(y, h.data());
    if (!sf) tgt->curvature(y, Rcomp.data());
  }
  void apply(const R* X, const R* Y, const R* Z, R* out) const {
    apply_curvature(n, sf, c, h.data(), sf ? nullptr : Rcomp.data(), X, Y, Z, out);
  }
};

// out += sign * g^{jk} R(A, dphi_j) dphi_k with A of order 0
template <class R>
void add_R_A_dphi_dphi(const DomainMetric& gm, const MapFieldT<R>& phi,
                       const BundleTensorT<R>& dphi, const BundleTensorT<R>& A,
                       double sign, BundleTensorT<R>& out) {
  const int m = phi.grid->dim(), n = phi.n();
  const long nn = phi.grid->nn();
  const bool flat = gm.is_flat();
  CurvatureEval<R> Rv(*phi.target);
  std::vector<R> tmp(n);
  for (long node = 0; node < nn; ++node) {
    Rv.at(phi.at(node));
    const R* dp = &dphi.v[node * m * n];
    const R* An = &A.v[node * n];
    R* On = &out.v[node * n];
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double w = flat ? (j == k ? 1.0 : 0.0) : gm.ginv_at(node, j, k);
        if (w == 0.0) continue;
        Rv.apply(An, dp + j * n, dp + k * n, tmp.data());
        for (int al = 0; al < n; ++al) On[al] += R(sign * w) * tmp[al];
      }
  }
}

// out += sign * g^{jk} R(A_j, B) dphi_k with A of order 1, B of order 0
template <class R>
void add_R_Aj_B_dphi(const DomainMetric& gm, const MapFieldT<R>& phi,
                     const BundleTensorT<R>& dphi, const BundleTensorT<R>& A,
                     const BundleTensorT<R>& B, double sign, BundleTensorT<R>& out) {
  const int m = phi.grid->dim(), n = phi.n();
  const long nn = phi.grid->nn();
  const bool flat = gm.is_flat();
  CurvatureEval<R> Rv(*phi.target);
  std::vector<R> tmp(n);
  for (long node = 0; node < nn; ++node) {
    Rv.at(phi.at(node));
    const R* dp = &dphi.v[node * m * n];
    const R* An = &A.v[node * m * n];
    const R* Bn = &B.v[node * n];
    R* On = &out.v[node * n];
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double w = flat ? (j == k ? 1.0 : 0.0) : gm.ginv_at(node, j, k);
        if (w == 0.0) continue;
        Rv.apply(An + j * n, Bn, dp + k * n, tmp.data());
        for (int al = 0; al < n; ++al) On[al] += R(sign * w) * tmp[al];
      }
  }
}

// out += sign * g^{jk} R(B, A_j) dphi_k with B of order 0, A of order 1
template <class R>
void add_R_B_Aj_dphi(const DomainMetric& gm, const MapFieldT<R>& phi,
                     const BundleTensorT<R>& dphi, const BundleTensorT<R>& B,
                     const BundleTensorT<R>& A, double sign, BundleTensorT<R>& out) {
  const int m = phi.grid->dim(), n = phi.n();
  const long nn = phi.grid->nn();
  const bool flat = gm.is_flat();
  CurvatureEval<R> Rv(*phi.target);
  std::vector<R> tmp(n);
  for (long node = 0; node < nn; ++node) {
    Rv.at(phi.at(node));
    const R* dp = &dphi.v[node * m * n];
    const R* An = &A.v[node * m * n];
    const R* Bn = &B.v[node * n];
    R* On = &out.v[node * n];
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double w = flat ? (j == k ? 1.0 : 0.0) : gm.ginv_at(node, j, k);
        if (w == 0.0) continue;
        Rv.apply(Bn, An + j * n, dp + k * n, tmp.data());
        for (int al = 0; al < n; ++al) On[al] += R(sign * w) * tmp[al];
      }
  }
}

void warn_resolution(const DomainGrid& G, int k) {
  int minN = G.res(0);
  for (int a = 1; a < G.dim(); ++a) minN = std::min(minN, G.res(a));
  if (minN < 4 * k)
    std::fprintf(stderr,
                 "warning: resolution %d is marginal for the %d derivatives of a "
                 "k=%d tension field\n",
                 minN, 2 * k, k);
}

}  // namespace

template <class R>
FourthOrderFieldsT<R> fourth_order_fields(const DomainMetric& gm,
                                          const MapFieldT<R>& phi) {
  FourthOrderFieldsT<R> F;
  F.dphi = differential(phi);
  F.sff = second_fundamental_form(gm, phi, F.dphi);
  F.tau = tension_from_sff(gm, phi, F.sff);
  F.grad_tau = covariant_derivative(gm, phi, F.tau, F.dphi);
  F.lap_tau = codifferential(gm, phi, F.grad_tau, F.dphi);
  F.grad_lap_tau = covariant_derivative(gm, phi, F.lap_tau, F.dphi);
  F.lap2_tau = codifferential(gm, phi, F.grad_lap_tau, F.dphi);
  F.grad_lap2_tau = covariant_derivative(gm, phi, F.lap2_tau, F.dphi);
  F.lap3_tau = codifferential(gm, phi, F.grad_lap2_tau, F.dphi);
  return F;
}

template <class R>
BundleTensorT<R> curvature_two_form(const DomainMetric& gm, const MapFieldT<R>& phi,
                                    const BundleTensorT<R>& dphi,
                                    const BundleTensorT<R>& tau) {
  (void)gm;
  const int m = phi.grid->dim(), n = phi.n();
  const long nn = phi.grid->nn();
  BundleTensorT<R> W;
  W.order = 2;
  W.v.assign((std::size_t)nn * m * m * n, R(0));
  CurvatureEval<R> Rv(*phi.target);
  std::vector<R> tmp(n);
  for (long node = 0; node < nn; ++node) {
    Rv.at(phi.at(node));
    const R* dp = &dphi.v[node * m * n];
    const R* tn = &tau.v[node * n];
    R* Wn = &W.v[node * m * m * n];
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        Rv.apply(dp + i * n, dp + j * n, tn, tmp.data());
        for (int al = 0; al < n; ++al) {
          Wn[(i * m + j) * n + al] = tmp[al];
          Wn[(j * m + i) * n + al] = -tmp[al];
        }
      }
  }
  return W;
}

BundleTensor poly_tension(const DomainMetric& gm, const MapField& phi, int k) {
  if (k < 2) throw ConfigError("poly_tension: k must be at least 2");
  if (k > 5)
    throw ConfigError("poly_tension: k > 5 is not resolvable at supported resolutions");
  warn_resolution(*phi.grid, k);

  BundleTensor dphi = differential(phi);
  std::vector<BundleTensor> lap(k), grad(k - 1);
  lap[0] = tension(gm, phi);
  for (int p = 0; p + 1 < k; ++p) {
    grad[p] = covariant_derivative(gm, phi, lap[p], dphi);
    lap[p + 1] = codifferential(gm, phi, grad[p], dphi);
  }

  BundleTensor out = lap[k - 1];
  add_R_A_dphi_dphi(gm, phi, dphi, lap[k - 2], -1.0, out);
  if (k % 2 == 0) {
    const int s = k / 2;
    for (int l = 1; l <= s - 1; ++l) {
      add_R_Aj_B_dphi(gm, phi, dphi, grad[s + l - 2], lap[s - l - 1], -1.0, out);
      add_R_B_Aj_dphi(gm, phi, dphi, lap[s + l - 2], grad[s - l - 1], 1.0, out);
    }
  } else {
    const int s = (k - 1) / 2;
    for (int l = 1; l <= s - 1; ++l) {
      add_R_Aj_B_dphi(gm, phi, dphi, grad[s + l - 1], lap[s - l - 1], -1.0, out);
      add_R_B_Aj_dphi(gm, phi, dphi, lap[s + l - 1], grad[s - l - 1], 1.0, out);
    }
    add_R_Aj_B_dphi(gm, phi, dphi, grad[s - 1], lap[s - 1], -1.0, out);
  }
  return out;
}

template <class R>
BundleTensorT<R> tau4(const DomainMetric& gm, const MapFieldT<R>& phi,
                      const FourthOrderFieldsT<R>& F) {
  BundleTensorT<R> out = F.lap3_tau;
  add_R_A_dphi_dphi(gm, phi, F.dphi, F.lap2_tau, -1.0, out);
  add_R_B_Aj_dphi(gm, phi, F.dphi, F.tau, F.grad_lap_tau, 1.0, out);
  add_R_Aj_B_dphi(gm, phi, F.dphi, F.grad_tau, F.lap_tau, -1.0, out);
  return out;
}

template <class R>
BundleTensorT<R> tau4(const DomainMetric& gm, const MapFieldT<R>& phi) {
  return tau4(gm, phi, fourth_order_fields(gm, phi));
}

template <class R>
CurvatureQuantitiesT<R> curvature_quantities(const DomainMetric& gm,
                                             const MapFieldT<R>& phi,
                                             const FourthOrderFieldsT<R>& F) {
  const int m = phi.grid->dim(), n = phi.n();
  const long nn = phi.grid->nn();
  const bool flat = gm.is_flat();
  CurvatureQuantitiesT<R> Q;
  Q.omega0 = zero_tensor(phi, 0);
  Q.omega1 = zero_tensor(phi, 1);
  Q.xi1 = zero_tensor(phi, 0);

  BundleTensorT<R> W = curvature_two_form(gm, phi, F.dphi, F.tau);
  CurvatureEval<R> Rv(*phi.target);
  std::vector<R> tmp(n), Wup((std::size_t)m * m * n);

  for (long node = 0; node < nn; ++node) {
    Rv.at(phi.at(node));
    const R* dp = &F.dphi.v[node * m * n];
    const R* tn = &F.tau.v[node * n];
    const R* Wn = &W.v[node * m * m * n];

    // raise both indices of W
    if (flat) {
      std::copy(Wn, Wn + (std::size_t)m * m * n, Wup.data());
    } else {
      std::fill(Wup.begin(), Wup.end(), R(0));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          for (int kk = 0; kk < m; ++kk)
            for (int l = 0; l < m; ++l) {
              double w = gm.ginv_at(node, i, kk) * gm.ginv_at(node, j, l);
              if (w == 0.0) continue;
              for (int al = 0; al < n; ++al)
                Wup[(i * m + j) * n + al] += R(w) * Wn[(kk * m + l) * n + al];
            }
    }

    // Omega0 = 2 sum_{i<j} R(dphi_i, dphi_j) Wup^{ij} (both factors antisymmetric)
    R* O0 = &Q.omega0.v[node * n];
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        Rv.apply(dp + i * n, dp + j * n, &Wup[(i * m + j) * n], tmp.data());
        for (int al = 0; al < n; ++al) O0[al] += R(2) * tmp[al];
      }

    // Omega1(i) = g^{jk} R(W_{ij}, tau) dphi_k
    R* O1 = &Q.omega1.v[node * m * n];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;  // W_{ii} = 0
        for (int kk = 0; kk < m; ++kk) {
          double w = flat ? (j == kk ? 1.0 : 0.0) : gm.ginv_at(node, j, kk);
          if (w == 0.0) continue;
          Rv.apply(&Wn[(i * m + j) * n], tn, dp + kk * n, tmp.data());
          for (int al = 0; al < n; ++al) O1[i * n + al] += R(w) * tmp[al];
        }
      }
  }

  // xi1 = -g^{ik} g^{jl} (nabla_{dphi_l} R)(W_{ij}, tau) dphi_k; zero for
  // space forms (parallel curvature), evaluated from components otherwise.
  if (!Rv.sf) {
    std::vector<R> DR((std::size_t)n * n * n * n * n);
    std::vector<double> yd, DRd;
    if constexpr (!std::is_same_v<R, double>) {
      yd.resize(n);
      DRd.resize(DR.size());
    }
    const long n4 = (long)n * n * n * n;
    for (long node = 0; node < nn; ++node) {
      // curvature_grad only has a double evaluation; the gradient term is a
      // lower-order correction, so widening it costs nothing measurable.
      if constexpr (std::is_same_v<R, double>) {
        phi.target->curvature_grad(phi.at(node), DR.data());
      } else {
        for (int a = 0; a < n; ++a) yd[a] = (double)phi.at(node)[a];
        phi.target->curvature_grad(yd.data(), DRd.data());
        std::copy(DRd.begin(), DRd.end(), DR.begin());
      }
      const R* dp = &F.dphi.v[node * m * n];
      const R* tn = &F.tau.v[node * n];
      const R* Wn = &W.v[node * m * m * n];
      R* X1 = &Q.xi1.v[node * n];
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          for (int kk = 0; kk < m; ++kk)
            for (int l = 0; l < m; ++l) {
              double w;
              if (flat)
                w = (i == kk && j == l) ? 1.0 : 0.0;
              else
                w = gm.ginv_at(node, i, kk) * gm.ginv_at(node, j, l);
              if (w == 0.0) continue;
              // (nabla_w R)^a_{bgd} dphi_l^w dphi_k^b W_{ij}^g tau^d
              for (int a = 0; a < n; ++a) {
                R s = 0;
                for (int wdir = 0; wdir < n; ++wdir) {
                  R dw = dp[l * n + wdir];
                  if (dw == R(0)) continue;
                  const R* DRw = &DR[wdir * n4];
                  for (int b = 0; b < n; ++b)
                    for (int g = 0; g < n; ++g)
                      for (int d = 0; d < n; ++d)
                        s += dw * DRw[((a * n + b) * n + g) * n + d] *
                             dp[kk * n + b] * Wn[(i * m + j) * n + g] * tn[d];
                }
                X1[a] -= R(w) * s;
              }
            }
        }
    }
  }
  return Q;
}

template <class R>
CurvatureQuantitiesT<R> curvature_quantities(const DomainMetric& gm,
                                             const MapFieldT<R>& phi) {
  return curvature_quantities(gm, phi, fourth_order_fields(gm, phi));
}

template <class R>
BundleTensorT<R> tau4_hat(const DomainMetric& gm, const MapFieldT<R>& phi,
                          const FourthOrderFieldsT<R>& F,
                          const CurvatureQuantitiesT<R>& Q) {
  BundleTensorT<R> trR = zero_tensor(phi, 0);
  add_R_Aj_B_dphi(gm, phi, F.dphi, F.dphi, Q.omega0, 1.0, trR);
  BundleTensorT<R> dstar_o1 = codifferential(gm, phi, Q.omega1, F.dphi);
  BundleTensorT<R> lap_o0 = rough_laplacian(gm, phi, Q.omega0, F.dphi);

  BundleTensorT<R> out;
  out.order = 0;
  out.v.resize(Q.omega0.v.size());
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = R(-0.5) * (R(2) * Q.xi1.v[i] + R(2) * dstar_o1.v[i] + lap_o0.v[i] +
                          trR.v[i]);
  return out;
}

template <class R>
BundleTensorT<R> tau4_hat(const DomainMetric& gm, const MapFieldT<R>& phi) {
  FourthOrderFieldsT<R> F = fourth_order_fields(gm, phi);
  return tau4_hat(gm, phi, F, curvature_quantities(gm, phi, F));
}

template <class R>
BundleTensorT<R> tau4_es(const DomainMetric& gm, const MapFieldT<R>& phi,
                         const FourthOrderFieldsT<R>& F) {
  BundleTensorT<R> t4 = tau4(gm, phi, F);
  BundleTensorT<R> t4h = tau4_hat(gm, phi, F, curvature_quantities(gm, phi, F));
  for (std::size_t i = 0; i < t4.v.size(); ++i) t4.v[i] += t4h.v[i];
  return t4;
}

template <class R>
BundleTensorT<R> tau4_es(const DomainMetric& gm, const MapFieldT<R>& phi) {
  return tau4_es(gm, phi, fourth_order_fields(gm, phi));
}

namespace {

double integrate_checked(const DomainMetric& gm, const ScalarField& f,
                         const char* what) {
  for (std::size_t i = 0; i < f.v.size(); ++i)
    if (!std::isfinite(f.v[i]))
      throw NumericalError(std::string("non-finite integrand in ") + what +
                           " at node " + std::to_string((long)i));
  return integrate(gm, f);
}

}  // namespace

EnergyReport energy_report(const DomainMetric& gm, const MapField& phi,
                           const std::vector<int>& ks, bool es4, bool finiteness) {
  for (int k : ks)
    if (k < 1 || k > 5)
      throw ConfigError("energy_report: requested k outside {1,...,5}");
  EnergyReport rep;
  rep.ks = ks;
  rep.es4 = es4;
  rep.finiteness = finiteness;

  auto want = [&](int k) {
    for (int x : ks)
      if (x == k) return true;
    return false;
  };

  FourthOrderFields F = fourth_order_fields(gm, phi);
  ScalarField e = inner_field(gm, phi, F.dphi, F.dphi);
  rep.E = integrate_checked(gm, e, "E");
  if (want(2)) rep.E2 = integrate_checked(gm, inner_field(gm, phi, F.tau, F.tau), "E2");
  if (want(3))
    rep.E3 = integrate_checked(gm, inner_field(gm, phi, F.grad_tau, F.grad_tau), "E3");
  if (want(4) || es4)
    rep.E4 = integrate_checked(gm, inner_field(gm, phi, F.lap_tau, F.lap_tau), "E4");
  if (want(5))
    rep.E5 = integrate_checked(
        gm, inner_field(gm, phi, F.grad_lap_tau, F.grad_lap_tau), "E5");

  if (es4) {
    BundleTensor W = curvature_two_form(gm, phi, F.dphi, F.tau);
    ScalarField w2 = inner_field(gm, phi, W, W);
    rep.E4_hat = 0.5 * integrate_checked(gm, w2, "E4_hat");
    rep.E4_ES = rep.E4 + rep.E4_hat;
  }

  if (finiteness) {
    rep.F1 = rep.E;
    ScalarField s2 = inner_field(gm, phi, F.sff, F.sff);
    rep.F2 = integrate_checked(gm, s2, "F2");
    {
      BundleTensor d3 = covariant_derivative(gm, phi, F.sff, F.dphi);
      rep.F3 = integrate_checked(gm, inner_field(gm, phi, d3, d3), "F3");
      BundleTensor d4 = covariant_derivative(gm, phi, d3, F.dphi);
      rep.F4 = integrate_checked(gm, inner_field(gm, phi, d4, d4), "F4");
    }
    ScalarField f5, f6;
    f5.v.resize(e.v.size());
    f6.v.resize(e.v.size());
    for (std::size_t i = 0; i < e.v.size(); ++i) {
      f5.v[i] = e.v[i] * e.v[i] * s2.v[i];
      f6.v[i] = e.v[i] * e.v[i] * e.v[i];
    }
    rep.F5 = integrate_checked(gm, f5, "F5");
    rep.F6 = integrate_checked(gm, f6, "F6");
  }
  return rep;
}

#define POLYTENSION_INSTANTIATE_TENSION(R)                                         \
  template FourthOrderFieldsT<R> fourth_order_fields<R>(const DomainMetric&,       \
                                                        const MapFieldT<R>&);      \
  template BundleTensorT<R> curvature_two_form<R>(                                 \
      const DomainMetric&, const MapFieldT<R>&, const BundleTensorT<R>&,           \
      const BundleTensorT<R>&);                                                    \
  template BundleTensorT<R> tau4<R>(const DomainMetric&, const MapFieldT<R>&,      \
                                    const FourthOrderFieldsT<R>&);                 \
  template BundleTensorT<R> tau4<R>(const DomainMetric&, const MapFieldT<R>&);     \
  template CurvatureQuantitiesT<R> curvature_quantities<R>(                        \
      const DomainMetric&, const MapFieldT<R>&, const FourthOrderFieldsT<R>&);     \
  template CurvatureQuantitiesT<R> curvature_quantities<R>(const DomainMetric&,    \
                                                           const MapFieldT<R>&);   \
  template BundleTensorT<R> tau4_hat<R>(                                           \
      const DomainMetric&, const MapFieldT<R>&, const FourthOrderFieldsT<R>&,      \
      const CurvatureQuantitiesT<R>&);                                             \
  template BundleTensorT<R> tau4_hat<R>(const DomainMetric&, const MapFieldT<R>&); \
  template BundleTensorT<R> tau4_es<R>(const DomainMetric&, const MapFieldT<R>&,   \
                                       const FourthOrderFieldsT<R>&);              \
  template BundleTensorT<R> tau4_es<R>(const DomainMetric&, const MapFieldT<R>&);

POLYTENSION_INSTANTIATE_TENSION(double)
POLYTENSION_INSTANTIATE_TENSION(long double)
#undef POLYTENSION_INSTANTIATE_TENSION

}  // namespace polytension
