#include "polytension/stress.hpp"

#include <algorithm>
#include <cmath>

namespace polytension {

namespace {

// Scalar trace part of S4 shared by every diagonal entry:
// -1/2 |Lap tau|^2 - <tau, Lap^2 tau> - <dphi, grad Lap^2 tau>
// + <grad tau, grad Lap tau>.
template <class R>
ScalarFieldT<R> s4_trace_part(const DomainMetric& gm, const MapFieldT<R>& phi,
                              const FourthOrderFieldsT<R>& F) {
  ScalarFieldT<R> a = inner_field(gm, phi, F.lap_tau, F.lap_tau);
  ScalarFieldT<R> b = inner_field(gm, phi, F.tau, F.lap2_tau);
  ScalarFieldT<R> c = inner_field(gm, phi, F.dphi, F.grad_lap2_tau);
  ScalarFieldT<R> d = inner_field(gm, phi, F.grad_tau, F.grad_lap_tau);
  ScalarFieldT<R> out;
  out.v.resize(a.v.size());
  for (std::size_t i = 0; i < a.v.size(); ++i)
    out.v[i] = R(-0.5) * a.v[i] - b.v[i] - c.v[i] + d.v[i];
  return out;
}

}  // namespace

template <class R>
SymTensorFieldT<R> stress4(const DomainMetric& gm, const MapFieldT<R>& phi) {
  FourthOrderFieldsT<R> F = fourth_order_fields(gm, phi);
  return stress4(gm, phi, F);
}

template <class R>
SymTensorFieldT<R> stress4(const DomainMetric& gm, const MapFieldT<R>& phi,
                           const FourthOrderFieldsT<R>& F) {
  const DomainGrid& G = *phi.grid;
  const int m = G.dim();
  const int n = phi.n();
  const int ss = sym_size(m);
  const long nn = G.nn();
  ScalarFieldT<R> tp = s4_trace_part(gm, phi, F);

  SymTensorFieldT<R> S;
  S.m = m;
  S.v.assign(nn * ss, R(0));
  std::vector<R> h((std::size_t)n * n);
  for (long node = 0; node < nn; ++node) {
    phi.target->metric(phi.at(node), h.data());
    const R* gt = &F.grad_tau.v[node * m * n];
    const R* gl = &F.grad_lap_tau.v[node * m * n];
    const R* dp = &F.dphi.v[node * m * n];
    const R* gl2 = &F.grad_lap2_tau.v[node * m * n];
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        R s = R(gm.g_at(node, i, j)) * tp.v[node];
        s -= h_dot(n, h.data(), gt + i * n, gl + j * n);
        s -= h_dot(n, h.data(), gt + j * n, gl + i * n);
        s += h_dot(n, h.data(), dp + i * n, gl2 + j * n);
        s += h_dot(n, h.data(), dp + j * n, gl2 + i * n);
        S.v[node * ss + sym_index(m, i, j)] = s;
      }
  }
  return S;
}

template <class R>
SymTensorFieldT<R> stress4_hat(const DomainMetric& gm, const MapFieldT<R>& phi,
                               HatForm form) {
  FourthOrderFieldsT<R> F = fourth_order_fields(gm, phi);
  CurvatureQuantitiesT<R> Q = curvature_quantities(gm, phi, F);
  return stress4_hat(gm, phi, F, Q, form);
}

template <class R>
SymTensorFieldT<R> stress4_hat(const DomainMetric& gm, const MapFieldT<R>& phi,
                               const FourthOrderFieldsT<R>& F,
                               const CurvatureQuantitiesT<R>& Q, HatForm form) {
  const DomainGrid& G = *phi.grid;
  const int m = G.dim();
  const int n = phi.n();
  const int ss = sym_size(m);
  const long nn = G.nn();

  BundleTensorT<R> W = curvature_two_form(gm, phi, F.dphi, F.tau);
  BundleTensorT<R> gradO0 = covariant_derivative(gm, phi, Q.omega0, F.dphi);
  // <grad^k Omega0, dphi_k> and the two trace coefficients
  ScalarFieldT<R> cO0 = inner_field(gm, phi, gradO0, F.dphi);
  ScalarFieldT<R> Wsq = inner_field(gm, phi, W, W);               // |W|^2
  ScalarFieldT<R> O0tau = inner_field(gm, phi, Q.omega0, F.tau);  // <Omega0, tau>

  SymTensorFieldT<R> S;
  S.m = m;
  S.v.assign(nn * ss, R(0));
  std::vector<R> h((std::size_t)n * n);
  std::vector<R> Wup((std::size_t)m * m * n);  // g^{kl} W_{li} per node (curvature form)
  for (long node = 0; node < nn; ++node) {
    phi.target->metric(phi.at(node), h.data());
    const R* dp = &F.dphi.v[node * m * n];
    const R* gO = &gradO0.v[node * m * n];
    const R* Wn = &W.v[node * (long)m * m * n];

    if (form == HatForm::curvature) {
      if (gm.is_flat()) {
        std::copy(Wn, Wn + (std::size_t)m * m * n, Wup.data());
      } else {
        for (int k = 0; k < m; ++k)
          for (int i = 0; i < m; ++i)
            for (int a = 0; a < n; ++a) {
              R acc = 0;
              for (int l = 0; l < m; ++l)
                acc += R(gm.ginv_at(node, k, l)) * Wn[(l * m + i) * n + a];
              Wup[(k * m + i) * n + a] = acc;
            }
      }
    }

    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        R gij = R(gm.g_at(node, i, j));
        R s = 0;
        if (form == HatForm::curvature) {
          // -g^{kl} <W_{ki}, W_{lj}> - 1/4 |W|^2 g_ij
          R c = 0;
          for (int k = 0; k < m; ++k)
            c += h_dot(n, h.data(), &Wup[(k * m + i) * n], Wn + (k * m + j) * n);
          s = -c - R(0.25) * Wsq.v[node] * gij;
        } else {
          // -<Omega1(e_j), dphi(e_i)> + 1/4 <Omega0, tau> g_ij
          const R* O1 = &Q.omega1.v[node * m * n];
          s = -h_dot(n, h.data(), O1 + j * n, dp + i * n) +
              R(0.25) * O0tau.v[node] * gij;
        }
        s += R(0.5) * cO0.v[node] * gij;
        s -= R(0.5) * h_dot(n, h.data(), gO + i * n, dp + j * n);
        s -= R(0.5) * h_dot(n, h.data(), gO + j * n, dp + i * n);
        S.v[node * ss + sym_index(m, i, j)] = s;
      }
  }
  return S;
}

template <class R>
SymTensorFieldT<R> stress4_es(const DomainMetric& gm, const MapFieldT<R>& phi) {
  FourthOrderFieldsT<R> F = fourth_order_fields(gm, phi);
  CurvatureQuantitiesT<R> Q = curvature_quantities(gm, phi, F);
  return stress4_es(gm, phi, F, Q);
}

template <class R>
SymTensorFieldT<R> stress4_es(const DomainMetric& gm, const MapFieldT<R>& phi,
                              const FourthOrderFieldsT<R>& F,
                              const CurvatureQuantitiesT<R>& Q) {
  SymTensorFieldT<R> S = stress4(gm, phi, F);
  SymTensorFieldT<R> H = stress4_hat(gm, phi, F, Q, HatForm::curvature);
  for (std::size_t i = 0; i < S.v.size(); ++i) S.v[i] += H.v[i];
  return S;
}

template <class R>
VectorFieldMT<R> divergence(const DomainMetric& gm, const SymTensorFieldT<R>& T) {
  const DomainGrid& G = gm.grid();
  const int m = G.dim();
  const int ss = sym_size(m);
  const long nn = G.nn();
  if ((long)T.v.size() != nn * ss || T.m != m) throw Error("divergence: size mismatch");

  VectorFieldMT<R> out;
  out.m = m;
  out.v.assign(nn * m, R(0));
  for (int k = 0; k < m; ++k) {
    std::vector<R> dT = G.partial(T.v, k, ss);
    if (gm.is_flat()) {
      for (long node = 0; node < nn; ++node)
        for (int i = 0; i < m; ++i)
          out.v[node * m + i] += dT[node * ss + sym_index(m, i, k)];
    } else {
      for (long node = 0; node < nn; ++node)
        for (int i = 0; i < m; ++i) {
          R acc = 0;
          for (int j = 0; j < m; ++j) {
            R t = dT[node * ss + sym_index(m, i, j)];
            for (int l = 0; l < m; ++l) {
              t -= R(gm.gamma_at(node, l, k, i)) *
                   T.v[node * ss + sym_index(m, l, j)];
              t -= R(gm.gamma_at(node, l, k, j)) *
                   T.v[node * ss + sym_index(m, i, l)];
            }
            acc += R(gm.ginv_at(node, j, k)) * t;
          }
          out.v[node * m + i] += acc;
        }
    }
  }
  return out;
}

template <class R>
ConservationReport conservation_residual(const DomainMetric& gm,
                                         const MapFieldT<R>& phi, StressLaw law) {
  const DomainGrid& G = *phi.grid;
  const int m = G.dim();
  const int n = phi.n();
  const long nn = G.nn();

  FourthOrderFieldsT<R> F = fourth_order_fields(gm, phi);
  SymTensorFieldT<R> S;
  BundleTensorT<R> tau_law;
  if (law == StressLaw::fourth) {
    S = stress4(gm, phi, F);
    tau_law = tau4(gm, phi, F);
  } else {
    CurvatureQuantitiesT<R> Q = curvature_quantities(gm, phi, F);
    S = stress4_es(gm, phi, F, Q);
    tau_law = tau4(gm, phi, F);
    BundleTensorT<R> th = tau4_hat(gm, phi, F, Q);
    for (std::size_t i = 0; i < tau_law.v.size(); ++i) tau_law.v[i] += th.v[i];
  }
  VectorFieldMT<R> div = divergence(gm, S);

  // rhs_i = <tau_law, dphi_i>; residual_i = (div S)_i + rhs_i. The norms are
  // accumulated in R (the cancellation d + q is where the working precision
  // pays off), then reported in double.
  std::vector<R> h((std::size_t)n * n);
  ConservationReport rep;
  rep.law = (law == StressLaw::fourth) ? "fourth" : "es";
  std::vector<double> res_norm2(nn);
  R sup_div = 0, sup_rhs = 0, sup_res = 0;
  std::vector<R> r(m), d(m), q(m);
  for (long node = 0; node < nn; ++node) {
    phi.target->metric(phi.at(node), h.data());
    const R* dp = &F.dphi.v[node * m * n];
    const R* tl = &tau_law.v[node * n];
    for (int i = 0; i < m; ++i) {
      q[i] = h_dot(n, h.data(), tl, dp + i * n);
      d[i] = div.v[node * m + i];
      r[i] = d[i] + q[i];
    }
    R n_r = 0, n_d = 0, n_q = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        R gij = R(gm.ginv_at(node, i, j));
        n_r += gij * r[i] * r[j];
        n_d += gij * d[i] * d[j];
        n_q += gij * q[i] * q[j];
      }
    res_norm2[node] = (double)n_r;
    sup_res = std::max(sup_res, n_r);
    sup_div = std::max(sup_div, n_d);
    sup_rhs = std::max(sup_rhs, n_q);
  }
  rep.residual_max = std::sqrt((double)sup_res);
  rep.residual_l2 = std::sqrt(std::max(0.0, integrate(gm, res_norm2)));
  rep.scale = std::sqrt((double)std::max(sup_div, sup_rhs));
  rep.relative = rep.scale > 0.0 ? rep.residual_max / rep.scale : 0.0;
  return rep;
}

double trace_prefactor(int m) { return (double)m / 4.0 - 2.0; }

TraceReport trace_checks(const DomainMetric& gm, const MapField& phi) {
  const DomainGrid& G = *phi.grid;
  const int m = G.dim();
  const int ss = sym_size(m);
  const long nn = G.nn();

  FourthOrderFields F = fourth_order_fields(gm, phi);
  CurvatureQuantities Q = curvature_quantities(gm, phi, F);
  SymTensorField H = stress4_hat(gm, phi, F, Q, HatForm::curvature);

  BundleTensor W = curvature_two_form(gm, phi, F.dphi, F.tau);
  BundleTensor gradO0 = covariant_derivative(gm, phi, Q.omega0, F.dphi);
  ScalarField cO0 = inner_field(gm, phi, gradO0, F.dphi);
  ScalarField Wsq = inner_field(gm, phi, W, W);

  TraceReport rep;
  rep.prefactor = trace_prefactor(m);
  std::vector<double> trH(nn), closed(nn);
  for (long node = 0; node < nn; ++node) {
    double tr = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        tr += gm.ginv_at(node, i, j) * H.v[node * ss + sym_index(m, i, j)];
    trH[node] = tr;
    closed[node] = -(1.0 + (double)m / 4.0) * Wsq.v[node] +
                   ((double)m / 2.0 - 1.0) * cO0.v[node];
    rep.pointwise_residual =
        std::max(rep.pointwise_residual, std::abs(trH[node] - closed[node]));
    rep.pointwise_scale = std::max(rep.pointwise_scale, std::abs(closed[node]));
  }
  rep.integral_lhs = integrate(gm, trH);
  rep.integral_rhs = rep.prefactor * integrate(gm, Wsq.v);
  double denom = std::max({std::abs(rep.integral_lhs), std::abs(rep.integral_rhs),
                           1e-300});
  rep.relative = std::abs(rep.integral_lhs - rep.integral_rhs) / denom;
  return rep;
}

#define POLYTENSION_INSTANTIATE_STRESS(R)                                           \
  template SymTensorFieldT<R> stress4<R>(const DomainMetric&, const MapFieldT<R>&); \
  template SymTensorFieldT<R> stress4<R>(const DomainMetric&, const MapFieldT<R>&,  \
                                         const FourthOrderFieldsT<R>&);             \
  template SymTensorFieldT<R> stress4_hat<R>(const DomainMetric&,                   \
                                             const MapFieldT<R>&, HatForm);         \
  template SymTensorFieldT<R> stress4_hat<R>(                                       \
      const DomainMetric&, const MapFieldT<R>&, const FourthOrderFieldsT<R>&,       \
      const CurvatureQuantitiesT<R>&, HatForm);                                     \
  template SymTensorFieldT<R> stress4_es<R>(const DomainMetric&,                    \
                                            const MapFieldT<R>&);                   \
  template SymTensorFieldT<R> stress4_es<R>(                                        \
      const DomainMetric&, const MapFieldT<R>&, const FourthOrderFieldsT<R>&,       \
      const CurvatureQuantitiesT<R>&);                                              \
  template VectorFieldMT<R> divergence<R>(const DomainMetric&,                      \
                                          const SymTensorFieldT<R>&);               \
  template ConservationReport conservation_residual<R>(                             \
      const DomainMetric&, const MapFieldT<R>&, StressLaw);

POLYTENSION_INSTANTIATE_STRESS(double)
POLYTENSION_INSTANTIATE_STRESS(long double)
#undef POLYTENSION_INSTANTIATE_STRESS

}  // namespace polytension
