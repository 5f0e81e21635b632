#include "polytension/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace polytension {

template <class R>
MapFieldT<R>::MapFieldT(const DomainGrid& g, const ChartTarget& t, std::vector<R> vals)
    : grid(&g), target(&t), y(std::move(vals)) {
  const int n = t.n();
  if ((long)y.size() != g.nn() * n) throw Error("MapField: value size mismatch");
  const double bound = t.chart_bound();
  for (long node = 0; node < g.nn(); ++node) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      double v = (double)y[node * n + a];
      if (!std::isfinite(v))
        throw NumericalError("map value not finite at node " + std::to_string(node));
      s += v * v;
    }
    if (std::sqrt(s) > bound) throw ChartExitError(t.name(), node, std::sqrt(s), bound);
  }
}

long bundle_len(const DomainGrid& g, const ChartTarget& t, int order) {
  long len = g.nn() * t.n();
  for (int i = 0; i < order; ++i) len *= g.dim();
  return len;
}

template <class R>
BundleTensorT<R> zero_tensor(const MapFieldT<R>& phi, int order) {
  BundleTensorT<R> T;
  T.order = order;
  T.v.assign(bundle_len(*phi.grid, *phi.target, order), R(0));
  return T;
}

template <class R>
BundleTensorT<R> differential(const MapFieldT<R>& phi) {
  const DomainGrid& G = *phi.grid;
  const int m = G.dim(), n = phi.n();
  const long nn = G.nn();
  BundleTensorT<R> d;
  d.order = 1;
  d.v.assign((std::size_t)nn * m * n, R(0));
  std::vector<R> tmp((std::size_t)nn * n);
  for (int a = 0; a < m; ++a) {
    G.partial(phi.y.data(), tmp.data(), a, n);
    for (long node = 0; node < nn; ++node)
      std::copy(&tmp[node * n], &tmp[node * n] + n, &d.v[(node * m + a) * n]);
  }
  return d;
}

namespace {

long ipow(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Target-connection contraction matrix at one node:
// M[a][alpha][gamma] = Gamma^alpha_{beta gamma}(phi) dphi_a^beta.
template <class R>
void connection_matrices(const ChartTarget& tgt, const R* y, int m, int n,
                         const R* dphi_node, R* Gbuf, R* M) {
  tgt.christoffels(y, Gbuf);
  for (int a = 0; a < m; ++a)
    for (int al = 0; al < n; ++al)
      for (int g = 0; g < n; ++g) {
        R s = 0;
        for (int b = 0; b < n; ++b) s += Gbuf[(al * n + b) * n + g] * dphi_node[a * n + b];
        M[(a * n + al) * n + g] = s;
      }
}

void decode_multi(long I, int k, int m, int* digits) {
  for (int s = k - 1; s >= 0; --s) { digits[s] = (int)(I % m); I /= m; }
}

}  // namespace

template <class R>
BundleTensorT<R> covariant_derivative(const DomainMetric& gm, const MapFieldT<R>& phi,
                                      const BundleTensorT<R>& T,
                                      const BundleTensorT<R>& dphi) {
  const DomainGrid& G = *phi.grid;
  const int m = G.dim(), n = phi.n(), k = T.order;
  const long nn = G.nn();
  const long mk = ipow(m, k);
  const long C = mk * n;  // components per node of T

  BundleTensorT<R> out;
  out.order = k + 1;
  out.v.assign((std::size_t)nn * m * C, R(0));

  // Plain partials, scattered into the leading-index slices.
  {
    std::vector<R> tmp((std::size_t)nn * C);
    for (int a = 0; a < m; ++a) {
      G.partial(T.v.data(), tmp.data(), a, (int)C);
      for (long node = 0; node < nn; ++node)
        std::copy(&tmp[node * C], &tmp[node * C] + C, &out.v[(node * m + a) * C]);
    }
  }

  // Connection corrections.
  std::vector<R> Gbuf((std::size_t)n * n * n), M((std::size_t)m * n * n);
  const bool flat = gm.is_flat();
  std::vector<long> digits(k > 0 ? k : 1);
  for (long node = 0; node < nn; ++node) {
    connection_matrices(*phi.target, phi.at(node), m, n, &dphi.v[node * m * n],
                        Gbuf.data(), M.data());
    const R* Tn = &T.v[node * C];
    R* On = &out.v[node * m * C];
    for (int a = 0; a < m; ++a) {
      const R* Ma = &M[(std::size_t)a * n * n];
      R* Oa = On + a * C;
      for (long I = 0; I < mk; ++I) {
        const R* TI = Tn + I * n;
        R* OI = Oa + I * n;
        for (int al = 0; al < n; ++al) {
          R s = 0;
          for (int g = 0; g < n; ++g) s += Ma[al * n + g] * TI[g];
          OI[al] += s;
        }
      }
    }
    if (!flat && k > 0) {
      // - Gamma^l_{a i_s} T_{I with i_s -> l}
      for (int a = 0; a < m; ++a) {
        R* Oa = On + a * C;
        for (long I = 0; I < mk; ++I) {
          long rem = I;
          for (int s = k - 1; s >= 0; --s) { digits[s] = rem % m; rem /= m; }
          for (int s = 0; s < k; ++s) {
            long base = I - digits[s] * ipow(m, k - 1 - s);
            for (int l = 0; l < m; ++l) {
              double gam = gm.gamma_at(node, l, a, (int)digits[s]);
              if (gam == 0.0) continue;
              long J = base + (long)l * ipow(m, k - 1 - s);
              for (int al = 0; al < n; ++al)
                Oa[I * n + al] -= R(gam) * Tn[J * n + al];
            }
          }
        }
      }
    }
  }
  return out;
}

template <class R>
BundleTensorT<R> contracted_covariant_derivative(const DomainMetric& gm,
                                                 const MapFieldT<R>& phi,
                                                 const BundleTensorT<R>& T,
                                                 const BundleTensorT<R>& dphi) {
  const DomainGrid& G = *phi.grid;
  const int m = G.dim(), n = phi.n(), k = T.order;
  if (k < 1) throw Error("contracted_covariant_derivative needs order >= 1");
  const long nn = G.nn();
  const long mk1 = ipow(m, k - 1);
  const long Cout = mk1 * n;

  BundleTensorT<R> out;
  out.order = k - 1;
  out.v.assign((std::size_t)nn * Cout, R(0));

  if (gm.is_flat()) {
    // sum_a [ d_a T_{a,I} + Gamma^N(phi) dphi_a T_{a,I} ], slice by slice.
    std::vector<R> slice((std::size_t)nn * Cout), dslice((std::size_t)nn * Cout);
    std::vector<R> Gbuf((std::size_t)n * n * n), M((std::size_t)m * n * n);
    for (int a = 0; a < m; ++a) {
      for (long node = 0; node < nn; ++node)
        std::copy(&T.v[(node * m + a) * Cout], &T.v[(node * m + a) * Cout] + Cout,
                  &slice[node * Cout]);
      G.partial(slice.data(), dslice.data(), a, (int)Cout);
      for (long node = 0; node < nn; ++node) {
        connection_matrices(*phi.target, phi.at(node), m, n, &dphi.v[node * m * n],
                            Gbuf.data(), M.data());
        const R* Ma = &M[(std::size_t)a * n * n];
        const R* Sn = &slice[node * Cout];
        const R* Dn = &dslice[node * Cout];
        R* On = &out.v[node * Cout];
        for (long I = 0; I < mk1; ++I)
          for (int al = 0; al < n; ++al) {
            R s = Dn[I * n + al];
            for (int g = 0; g < n; ++g) s += Ma[al * n + g] * Sn[I * n + g];
            On[I * n + al] += s;
          }
      }
    }
    return out;
  }

  // Curved metric: materialise the full derivative, then contract with g^{ab}.
  BundleTensorT<R> full = covariant_derivative(gm, phi, T, dphi);
  const long mk = ipow(m, k);
  for (long node = 0; node < nn; ++node) {
    const R* Fn = &full.v[node * m * mk * n];
    R* On = &out.v[node * Cout];
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        double w = gm.ginv_at(node, a, b);
        if (w == 0.0) continue;
        const R* Fab = Fn + (a * mk + b * mk1) * n;
        for (long I = 0; I < Cout; ++I) On[I] += R(w) * Fab[I];
      }
  }
  return out;
}

template <class R>
BundleTensorT<R> second_fundamental_form(const DomainMetric& gm,
                                         const MapFieldT<R>& phi,
                                         const BundleTensorT<R>& dphi) {
  return covariant_derivative(gm, phi, dphi, dphi);
}

template <class R>
BundleTensorT<R> tension_from_sff(const DomainMetric& gm, const MapFieldT<R>& phi,
                                  const BundleTensorT<R>& sff) {
  const DomainGrid& G = *phi.grid;
  const int m = G.dim(), n = phi.n();
  const long nn = G.nn();
  BundleTensorT<R> tau;
  tau.order = 0;
  tau.v.assign((std::size_t)nn * n, R(0));
  for (long node = 0; node < nn; ++node)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double w = gm.ginv_at(node, i, j);
        if (w == 0.0) continue;
        const R* S = &sff.v[(node * m * m + i * m + j) * n];
        for (int al = 0; al < n; ++al) tau.v[node * n + al] += R(w) * S[al];
      }
  return tau;
}

template <class R>
BundleTensorT<R> tension(const DomainMetric& gm, const MapFieldT<R>& phi) {
  BundleTensorT<R> dphi = differential(phi);
  BundleTensorT<R> sff = second_fundamental_form(gm, phi, dphi);
  return tension_from_sff(gm, phi, sff);
}

template <class R>
BundleTensorT<R> codifferential(const DomainMetric& gm, const MapFieldT<R>& phi,
                                const BundleTensorT<R>& A,
                                const BundleTensorT<R>& dphi) {
  BundleTensorT<R> out = contracted_covariant_derivative(gm, phi, A, dphi);
  for (R& x : out.v) x = -x;
  return out;
}

template <class R>
BundleTensorT<R> rough_laplacian(const DomainMetric& gm, const MapFieldT<R>& phi,
                                 const BundleTensorT<R>& T,
                                 const BundleTensorT<R>& dphi) {
  BundleTensorT<R> dT = covariant_derivative(gm, phi, T, dphi);
  BundleTensorT<R> out = contracted_covariant_derivative(gm, phi, dT, dphi);
  for (R& x : out.v) x = -x;
  return out;
}

template <class R>
ScalarFieldT<R> inner_field(const DomainMetric& gm, const MapFieldT<R>& phi,
                            const BundleTensorT<R>& T1, const BundleTensorT<R>& T2) {
  if (T1.order != T2.order) throw Error("inner_field: order mismatch");
  const DomainGrid& G = *phi.grid;
  const int m = G.dim(), n = phi.n(), k = T1.order;
  const long nn = G.nn();
  const long mk = ipow(m, k);
  ScalarFieldT<R> out;
  out.v.assign(nn, R(0));
  std::vector<R> h((std::size_t)n * n);
  const bool flat = gm.is_flat();
  int di[16], dl[16];
  for (long node = 0; node < nn; ++node) {
    phi.target->metric(phi.at(node), h.data());
    const R* A = &T1.v[node * mk * n];
    const R* B = &T2.v[node * mk * n];
    R acc = 0;
    if (flat) {
      for (long I = 0; I < mk; ++I) acc += h_dot(n, h.data(), A + I * n, B + I * n);
    } else {
      for (long I = 0; I < mk; ++I) {
        decode_multi(I, k, m, di);
        for (long L = 0; L < mk; ++L) {
          decode_multi(L, k, m, dl);
          double w = 1.0;
          for (int s = 0; s < k; ++s) w *= gm.ginv_at(node, di[s], dl[s]);
          if (w == 0.0) continue;
          acc += R(w) * h_dot(n, h.data(), A + I * n, B + L * n);
        }
      }
    }
    out.v[node] = acc;
  }
  return out;
}

double sup_norm(const DomainMetric& gm, const MapField& phi, const BundleTensor& T) {
  ScalarField f = inner_field(gm, phi, T, T);
  double mx = 0.0;
  for (double x : f.v) mx = std::max(mx, x);
  return std::sqrt(std::max(0.0, mx));
}

double sup_diff(const DomainMetric& gm, const MapField& phi, const BundleTensor& T1,
                const BundleTensor& T2) {
  if (T1.v.size() != T2.v.size()) throw Error("sup_diff: size mismatch");
  BundleTensor d;
  d.order = T1.order;
  d.v.resize(T1.v.size());
  for (std::size_t i = 0; i < d.v.size(); ++i) d.v[i] = T1.v[i] - T2.v[i];
  return sup_norm(gm, phi, d);
}

double l2_norm(const DomainMetric& gm, const MapField& phi, const BundleTensor& T) {
  ScalarField f = inner_field(gm, phi, T, T);
  return std::sqrt(std::max(0.0, integrate(gm, f)));
}

// Explicit instantiations: double is the default lane, long double the
// extended-precision lane for deep derivative cascades.
template struct MapFieldT<double>;
template struct MapFieldT<long double>;
#define POLYTENSION_INSTANTIATE_CALCULUS(R)                                         \
  template BundleTensorT<R> zero_tensor<R>(const MapFieldT<R>&, int);               \
  template BundleTensorT<R> differential<R>(const MapFieldT<R>&);                   \
  template BundleTensorT<R> covariant_derivative<R>(                                \
      const DomainMetric&, const MapFieldT<R>&, const BundleTensorT<R>&,            \
      const BundleTensorT<R>&);                                                     \
  template BundleTensorT<R> contracted_covariant_derivative<R>(                     \
      const DomainMetric&, const MapFieldT<R>&, const BundleTensorT<R>&,            \
      const BundleTensorT<R>&);                                                     \
  template BundleTensorT<R> second_fundamental_form<R>(                             \
      const DomainMetric&, const MapFieldT<R>&, const BundleTensorT<R>&);           \
  template BundleTensorT<R> tension_from_sff<R>(                                    \
      const DomainMetric&, const MapFieldT<R>&, const BundleTensorT<R>&);           \
  template BundleTensorT<R> tension<R>(const DomainMetric&, const MapFieldT<R>&);   \
  template BundleTensorT<R> codifferential<R>(                                      \
      const DomainMetric&, const MapFieldT<R>&, const BundleTensorT<R>&,            \
      const BundleTensorT<R>&);                                                     \
  template BundleTensorT<R> rough_laplacian<R>(                                     \
      const DomainMetric&, const MapFieldT<R>&, const BundleTensorT<R>&,            \
      const BundleTensorT<R>&);                                                     \
  template ScalarFieldT<R> inner_field<R>(const DomainMetric&, const MapFieldT<R>&, \
                                          const BundleTensorT<R>&,                  \
                                          const BundleTensorT<R>&);

POLYTENSION_INSTANTIATE_CALCULUS(double)
POLYTENSION_INSTANTIATE_CALCULUS(long double)
#undef POLYTENSION_INSTANTIATE_CALCULUS

}  // namespace polytension
