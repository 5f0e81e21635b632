#pragma once

#include <vector>

#include "polytension/calculus.hpp"

namespace polytension {

// Fourth-order field stack shared by the tension, stress and identity code:
// tau with its iterated rough Laplacians and the intermediate connection
// derivatives, computed once per map and reused everywhere. Templated on the
// working scalar like the calculus layer; the aliases keep double-lane call
// sites unchanged.
template <class R>
struct FourthOrderFieldsT {
  BundleTensorT<R> dphi;           // order 1
  BundleTensorT<R> sff;            // order 2, nabla dphi
  BundleTensorT<R> tau;            // order 0
  BundleTensorT<R> grad_tau;       // order 1
  BundleTensorT<R> lap_tau;        // order 0
  BundleTensorT<R> grad_lap_tau;   // order 1
  BundleTensorT<R> lap2_tau;       // order 0
  BundleTensorT<R> grad_lap2_tau;  // order 1
  BundleTensorT<R> lap3_tau;       // order 0
};
using FourthOrderFields = FourthOrderFieldsT<double>;
using FourthOrderFieldsX = FourthOrderFieldsT<long double>;

template <class R>
FourthOrderFieldsT<R> fourth_order_fields(const DomainMetric& gm,
                                          const MapFieldT<R>& phi);

// W_{ij} = R^N(dphi_i, dphi_j) tau as an order-2 bundle tensor. Exactly
// antisymmetric: the diagonal is set to zero and W_{ji} = -W_{ij} by
// construction, so m = 1 domains give the zero tensor bitwise.
template <class R>
BundleTensorT<R> curvature_two_form(const DomainMetric& gm, const MapFieldT<R>& phi,
                                    const BundleTensorT<R>& dphi,
                                    const BundleTensorT<R>& tau);

// Polyharmonic tension field, k in [2,5]:
//   tau_{2s}   = Lap^{2s-1} tau - R(Lap^{2s-2} tau, dphi_j) dphi^j
//                - sum_{l=1}^{s-1} [ R(grad_j Lap^{s+l-2} tau, Lap^{s-l-1} tau)
//                                  - R(Lap^{s+l-2} tau, grad_j Lap^{s-l-1} tau) ] dphi^j
//   tau_{2s+1} = Lap^{2s} tau - R(Lap^{2s-1} tau, dphi_j) dphi^j
//                - sum_{l=1}^{s-1} [ R(grad_j Lap^{s+l-1} tau, Lap^{s-l-1} tau)
//                                  - R(Lap^{s+l-1} tau, grad_j Lap^{s-l-1} tau) ] dphi^j
//                - R(grad_j Lap^{s-1} tau, Lap^{s-1} tau) dphi^j
// with Lap^{-1} := 0 and dphi^j = g^{jk} dphi_k.
BundleTensor poly_tension(const DomainMetric& gm, const MapField& phi, int k);

// tau_4 = Lap^3 tau - R(Lap^2 tau, dphi_j) dphi^j + R(tau, grad_j Lap tau) dphi^j
//         - R(grad_j tau, Lap tau) dphi^j, assembled term by term in this order.
template <class R>
BundleTensorT<R> tau4(const DomainMetric& gm, const MapFieldT<R>& phi);
template <class R>
BundleTensorT<R> tau4(const DomainMetric& gm, const MapFieldT<R>& phi,
                      const FourthOrderFieldsT<R>& F);

// Curvature quantities entering the extended fourth-order system:
//   Omega0     = g^{ik} g^{jl} R(dphi_i, dphi_j) R(dphi_k, dphi_l) tau
//   Omega1(i)  = g^{jk} R(R(dphi_i, dphi_j) tau, tau) dphi_k
//   xi1        = -g^{ik} g^{jl} (nabla_{dphi_l} R)(R(dphi_i, dphi_j) tau, tau) dphi_k
// xi1 is identically zero for space forms (parallel curvature).
template <class R>
struct CurvatureQuantitiesT {
  BundleTensorT<R> omega0;  // order 0
  BundleTensorT<R> omega1;  // order 1
  BundleTensorT<R> xi1;     // order 0
};
using CurvatureQuantities = CurvatureQuantitiesT<double>;
using CurvatureQuantitiesX = CurvatureQuantitiesT<long double>;

template <class R>
CurvatureQuantitiesT<R> curvature_quantities(const DomainMetric& gm,
                                             const MapFieldT<R>& phi);
template <class R>
CurvatureQuantitiesT<R> curvature_quantities(const DomainMetric& gm,
                                             const MapFieldT<R>& phi,
                                             const FourthOrderFieldsT<R>& F);

// tau4_hat = -1/2 ( 2 xi1 + 2 d* Omega1 + Lap Omega0 + g^{ij} R(dphi_i, Omega0) dphi_j )
template <class R>
BundleTensorT<R> tau4_hat(const DomainMetric& gm, const MapFieldT<R>& phi);
template <class R>
BundleTensorT<R> tau4_hat(const DomainMetric& gm, const MapFieldT<R>& phi,
                          const FourthOrderFieldsT<R>& F,
                          const CurvatureQuantitiesT<R>& Q);

// tau4_es = tau4 + tau4_hat
template <class R>
BundleTensorT<R> tau4_es(const DomainMetric& gm, const MapFieldT<R>& phi);
template <class R>
BundleTensorT<R> tau4_es(const DomainMetric& gm, const MapFieldT<R>& phi,
                         const FourthOrderFieldsT<R>& F);

// Energy and finiteness integrals. Unrequested entries stay 0.
//   E  = int |dphi|^2            (Dirichlet; also F1)
//   E2 = int |tau|^2             E3 = int |grad tau|^2
//   E4 = int |Lap tau|^2         E5 = int |grad Lap tau|^2
//   E4_hat = 1/2 int |R(dphi_i, dphi_j) tau|^2,   E4_ES = E4 + E4_hat
//   F1..F6 = int |dphi|^2, |grad dphi|^2, |grad^2 dphi|^2, |grad^3 dphi|^2,
//            |dphi|^4 |grad dphi|^2, |dphi|^6
struct EnergyReport {
  double E = 0.0;
  double E2 = 0.0, E3 = 0.0, E4 = 0.0, E5 = 0.0;
  double E4_hat = 0.0, E4_ES = 0.0;
  double F1 = 0.0, F2 = 0.0, F3 = 0.0, F4 = 0.0, F5 = 0.0, F6 = 0.0;
  bool es4 = false;
  bool finiteness = false;
  std::vector<int> ks;
};

EnergyReport energy_report(const DomainMetric& gm, const MapField& phi,
                           const std::vector<int>& ks, bool es4, bool finiteness);

}  // namespace polytension
