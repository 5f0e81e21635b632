#pragma once

#include <string>

#include "polytension/tension.hpp"

namespace polytension {

// Stress-energy tensor of the fourth-order energy, stored as a symmetric
// (0,2) domain tensor (component (i,j) evaluates the formula at X=e_i, Y=e_j):
//   S4(X,Y) = g(X,Y) [ -1/2 |Lap tau|^2 - <tau, Lap^2 tau>
//                      - <dphi, grad Lap^2 tau> + <grad tau, grad Lap tau> ]
//             - <grad_X tau, grad_Y Lap tau> - <grad_Y tau, grad_X Lap tau>
//             + <dphi(X), grad_Y Lap^2 tau> + <dphi(Y), grad_X Lap^2 tau>
// It satisfies div S4 = -<tau4, dphi> for every smooth map.
template <class R>
SymTensorFieldT<R> stress4(const DomainMetric& gm, const MapFieldT<R>& phi);
template <class R>
SymTensorFieldT<R> stress4(const DomainMetric& gm, const MapFieldT<R>& phi,
                           const FourthOrderFieldsT<R>& F);

// The curvature part of the extended stress tensor admits two algebraically
// equivalent assemblies; computing both and comparing is a deliberate
// redundancy (they differ in how the W = R(dphi,dphi)tau contraction and the
// |W|^2 trace coefficient are produced, and share only the grad Omega0 rows):
//   curvature: -g^{kl}<W_{ki}, W_{lj}> - 1/4 |W|^2 g_ij
//              - 1/2 <grad_i Omega0, dphi_j> - 1/2 <grad_j Omega0, dphi_i>
//              + 1/2 <grad^k Omega0, dphi_k> g_ij
//   omega:     -<Omega1(e_j), dphi(e_i)> + 1/4 <Omega0, tau> g_ij
//              + 1/2 <grad^k Omega0, dphi_k> g_ij
//              - 1/2 <grad_i Omega0, dphi_j> - 1/2 <grad_j Omega0, dphi_i>
enum class HatForm { curvature, omega };

template <class R>
SymTensorFieldT<R> stress4_hat(const DomainMetric& gm, const MapFieldT<R>& phi,
                               HatForm form);
template <class R>
SymTensorFieldT<R> stress4_hat(const DomainMetric& gm, const MapFieldT<R>& phi,
                               const FourthOrderFieldsT<R>& F,
                               const CurvatureQuantitiesT<R>& Q, HatForm form);

// S4_ES = S4 + S4_hat (curvature form); satisfies div S4_ES = -<tau4_es, dphi>.
template <class R>
SymTensorFieldT<R> stress4_es(const DomainMetric& gm, const MapFieldT<R>& phi);
template <class R>
SymTensorFieldT<R> stress4_es(const DomainMetric& gm, const MapFieldT<R>& phi,
                              const FourthOrderFieldsT<R>& F,
                              const CurvatureQuantitiesT<R>& Q);

// (div T)_i = g^{jk} ( d_k T_ij - Gamma^l_{ki} T_lj - Gamma^l_{kj} T_il ),
// outer differentiation of the assembled field (independent of any
// product-rule expansion used to prove conservation).
template <class R>
VectorFieldMT<R> divergence(const DomainMetric& gm, const SymTensorFieldT<R>& T);

enum class StressLaw { fourth, es };

// Residual of the conservation law div S = -<tau, dphi> as a covector field;
// norms are taken with the domain metric. scale = max(sup|div S|, sup|rhs|).
// The report is double regardless of the working scalar; passing a MapFieldX
// runs the entire chain in extended precision, which matters once the target
// residual sits below the double-precision roundoff floor of the cascade.
struct ConservationReport {
  std::string law;
  double residual_max = 0.0;
  double residual_l2 = 0.0;
  double scale = 0.0;
  double relative = 0.0;
};

template <class R>
ConservationReport conservation_residual(const DomainMetric& gm,
                                         const MapFieldT<R>& phi, StressLaw law);

// Trace identities for the curvature part:
//   pointwise: Tr S4_hat = -(1 + m/4) |W|^2 + (m/2 - 1) <grad^k Omega0, dphi_k>
//   integral:  int Tr S4_hat = (m/4 - 2) int |W|^2
// The integral prefactor vanishes identically at m = 8 (reported exactly).
struct TraceReport {
  double pointwise_residual = 0.0;  // sup |Tr S4_hat - closed form|
  double pointwise_scale = 0.0;     // sup of the closed form
  double integral_lhs = 0.0;        // int Tr S4_hat
  double integral_rhs = 0.0;        // prefactor * int |W|^2
  double prefactor = 0.0;           // m/4 - 2
  double relative = 0.0;            // |lhs - rhs| / max(|lhs|, |rhs|, tiny)
};

TraceReport trace_checks(const DomainMetric& gm, const MapField& phi);

// m/4 - 2 in exact double arithmetic (zero at m = 8).
double trace_prefactor(int m);

}  // namespace polytension
