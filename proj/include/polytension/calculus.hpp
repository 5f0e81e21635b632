#pragma once

#include <vector>

#include "polytension/grid.hpp"
#include "polytension/manifold.hpp"

namespace polytension {

// The pullback calculus is templated on the working scalar R. Double is the
// default working type throughout; the long double instantiation exists for
// identities that chain enough derivative stages that double rounding noise,
// amplified once per stage by the top resolved wavenumber, exceeds the
// discretization error being measured. Aliases keep double-lane call sites
// free of template syntax.

// A map phi: M -> N in chart components, one n-vector per node. Construction
// validates every node against the target's chart bound.
template <class R>
struct MapFieldT {
  const DomainGrid* grid = nullptr;
  const ChartTarget* target = nullptr;
  std::vector<R> y;  // nn * n, interleaved

  MapFieldT() = default;
  MapFieldT(const DomainGrid& g, const ChartTarget& t, std::vector<R> vals);

  int n() const { return target->n(); }
  const R* at(long node) const { return y.data() + node * target->n(); }
};
using MapField = MapFieldT<double>;
using MapFieldX = MapFieldT<long double>;

// Sections of phi*TN and their covariant-derivative tensors. order = number of
// domain (lower) indices: 0 is a plain section, 1 a bundle one-form, and so
// on. Layout: v[(node * m^order + I) * n + alpha] with I the row-major
// multi-index (first index slowest).
template <class R>
struct BundleTensorT {
  int order = 0;
  std::vector<R> v;
};
using BundleTensor = BundleTensorT<double>;
using BundleTensorX = BundleTensorT<long double>;

long bundle_len(const DomainGrid& g, const ChartTarget& t, int order);

template <class R>
BundleTensorT<R> zero_tensor(const MapFieldT<R>& phi, int order);

// dphi as a bundle one-form: (dphi)_a^alpha = d_a phi^alpha.
template <class R>
BundleTensorT<R> differential(const MapFieldT<R>& phi);

// Pullback covariant derivative, adding one leading domain index:
// (nabla T)_{a,I}^alpha = d_a T_I^alpha + Gamma^alpha_{bg}(phi) dphi_a^b T_I^g
//                         - sum_s Gamma^l_{a i_s}(x) T_{I, i_s -> l}^alpha.
template <class R>
BundleTensorT<R> covariant_derivative(const DomainMetric& gm, const MapFieldT<R>& phi,
                                      const BundleTensorT<R>& T,
                                      const BundleTensorT<R>& dphi);

// g^{ab} (nabla_a T)_{b,I}: contracts the new derivative index against the
// leading index of T. Needs order >= 1. The flat-metric path never
// materialises the full derivative tensor.
template <class R>
BundleTensorT<R> contracted_covariant_derivative(const DomainMetric& gm,
                                                 const MapFieldT<R>& phi,
                                                 const BundleTensorT<R>& T,
                                                 const BundleTensorT<R>& dphi);

// Second fundamental form nabla dphi (order 2, symmetric in its two indices).
template <class R>
BundleTensorT<R> second_fundamental_form(const DomainMetric& gm,
                                         const MapFieldT<R>& phi,
                                         const BundleTensorT<R>& dphi);

// Tension field tau(phi) = g^{ij} (nabla dphi)_{ij} (order 0).
template <class R>
BundleTensorT<R> tension(const DomainMetric& gm, const MapFieldT<R>& phi);
template <class R>
BundleTensorT<R> tension_from_sff(const DomainMetric& gm, const MapFieldT<R>& phi,
                                  const BundleTensorT<R>& sff);

// Codifferential on bundle one-forms: d* A = -g^{ab} (nabla_a A)_b, adjoint of
// nabla on sections; d*(dphi) = -tau(phi).
template <class R>
BundleTensorT<R> codifferential(const DomainMetric& gm, const MapFieldT<R>& phi,
                                const BundleTensorT<R>& A,
                                const BundleTensorT<R>& dphi);

// Rough Laplacian (positive spectrum): Delta T = -g^{ab}(nabla nabla T)_{ab,I}
// = d* d T on sections.
template <class R>
BundleTensorT<R> rough_laplacian(const DomainMetric& gm, const MapFieldT<R>& phi,
                                 const BundleTensorT<R>& T,
                                 const BundleTensorT<R>& dphi);

// Pointwise full contraction <T1,T2>: h(phi)-pairing on the target index,
// g^{-1}-pairing on every domain index pair. Orders must match.
template <class R>
ScalarFieldT<R> inner_field(const DomainMetric& gm, const MapFieldT<R>& phi,
                            const BundleTensorT<R>& T1, const BundleTensorT<R>& T2);

// max over nodes of the pointwise norm sqrt(<T,T>).
double sup_norm(const DomainMetric& gm, const MapField& phi, const BundleTensor& T);

// max over nodes of |T1 - T2| (pointwise norm of the difference).
double sup_diff(const DomainMetric& gm, const MapField& phi, const BundleTensor& T1,
                const BundleTensor& T2);

// L2 norm sqrt(integral <T,T>).
double l2_norm(const DomainMetric& gm, const MapField& phi, const BundleTensor& T);

// Curvature application at a point. For space forms uses
// R(X,Y)Z = c (<Y,Z> X - <X,Z> Y) with shared dot products, so R(X,X)Z
// vanishes exactly in floating point; otherwise contracts the supplied
// component array R^a_{bgd} (slots: X -> g, Y -> d, Z -> b).
template <class R>
void apply_curvature(int n, bool space_form, double c, const R* h, const R* Rcomp,
                     const R* X, const R* Y, const R* Z, R* out) {
  if (space_form) {
    R yz = 0, xz = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        yz += h[a * n + b] * Y[a] * Z[b];
        xz += h[a * n + b] * X[a] * Z[b];
      }
    for (int a = 0; a < n; ++a) out[a] = R(c) * (yz * X[a] - xz * Y[a]);
    return;
  }
  for (int a = 0; a < n; ++a) {
    R s = 0;
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d)
          s += Rcomp[((a * n + b) * n + g) * n + d] * Z[b] * X[g] * Y[d];
    out[a] = s;
  }
}

// h-inner product of two target vectors at a point.
template <class R>
R h_dot(int n, const R* h, const R* X, const R* Y) {
  R s = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s += h[a * n + b] * X[a] * Y[b];
  return s;
}

}  // namespace polytension
