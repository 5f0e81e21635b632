#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "polytension/grid.hpp"

using namespace polytension;

namespace {

DomainGrid periodic1(int N, double L, DerivScheme s) {
  return DomainGrid(1, {L}, {N}, GridMode::periodic, s);
}

// sup norm of difference between a computed array and an oracle callback
template <class F>
double sup_err(const DomainGrid& G, const std::vector<double>& got, F oracle) {
  std::vector<double> x(G.dim());
  double mx = 0.0;
  for (long i = 0; i < G.nn(); ++i) {
    G.node_coords(i, x.data());
    mx = std::max(mx, std::abs(got[i] - oracle(x.data())));
  }
  return mx;
}

}  // namespace

TEST_CASE("spectral derivative is exact on resolved modes") {
  const double L = 2.0 * M_PI * 1.7;
  DomainGrid G = periodic1(32, L, DerivScheme::spectral);
  const double w1 = 2.0 * M_PI / L, w5 = 5.0 * w1;
  std::vector<double> f(G.nn());
  std::vector<double> x(1);
  for (long i = 0; i < G.nn(); ++i) {
    G.node_coords(i, x.data());
    f[i] = std::sin(w1 * x[0]) + 0.3 * std::cos(w5 * x[0]);
  }
  auto df = G.partial(f, 0, 1);
  double err = sup_err(G, df, [&](const double* p) {
    return w1 * std::cos(w1 * p[0]) - 0.3 * w5 * std::sin(w5 * p[0]);
  });
  CHECK(err < 1e-12);
}

TEST_CASE("spectral derivative exact in 2-d on a mixed mode") {
  DomainGrid G(2, {2.0 * M_PI, 2.0 * M_PI}, {24, 16}, GridMode::periodic,
               DerivScheme::spectral);
  std::vector<double> f(G.nn());
  std::vector<double> x(2);
  for (long i = 0; i < G.nn(); ++i) {
    G.node_coords(i, x.data());
    f[i] = std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]);
  }
  auto d0 = G.partial(f, 0, 1);
  auto d1 = G.partial(f, 1, 1);
  double e0 = sup_err(G, d0, [](const double* p) {
    return 3.0 * std::cos(3.0 * p[0]) * std::cos(2.0 * p[1]);
  });
  double e1 = sup_err(G, d1, [](const double* p) {
    return -2.0 * std::sin(3.0 * p[0]) * std::sin(2.0 * p[1]);
  });
  CHECK(e0 < 1e-12);
  CHECK(e1 < 1e-12);
}

TEST_CASE("finite difference schemes converge at their nominal order") {
  const double L = 2.0 * M_PI;
  for (auto scheme : {DerivScheme::fd2, DerivScheme::fd4, DerivScheme::fd6,
                      DerivScheme::fd8}) {
    double errs[2];
    int Ns[2] = {32, 64};
    for (int lev = 0; lev < 2; ++lev) {
      DomainGrid G = periodic1(Ns[lev], L, scheme);
      std::vector<double> f(G.nn());
      std::vector<double> x(1);
      for (long i = 0; i < G.nn(); ++i) {
        G.node_coords(i, x.data());
        f[i] = std::exp(std::sin(x[0]));
      }
      auto df = G.partial(f, 0, 1);
      errs[lev] = sup_err(G, df, [](const double* p) {
        return std::cos(p[0]) * std::exp(std::sin(p[0]));
      });
    }
    double order = std::log2(errs[0] / errs[1]);
    CHECK(order > fd_order(scheme) - 0.6);
    CHECK(order < fd_order(scheme) + 1.2);
  }
}

TEST_CASE("discrete integration by parts holds to near roundoff (periodic)") {
  const double L = 3.1;
  for (auto scheme : {DerivScheme::spectral, DerivScheme::fd6}) {
    DomainGrid G = periodic1(48, L, scheme);
    DomainMetric gm = DomainMetric::flat(G);
    std::vector<double> f(G.nn()), g(G.nn()), x(1);
    for (long i = 0; i < G.nn(); ++i) {
      G.node_coords(i, x.data());
      double t = 2.0 * M_PI * x[0] / L;
      f[i] = std::sin(t) + 0.4 * std::cos(3.0 * t);
      g[i] = std::cos(2.0 * t) - 0.7 * std::sin(5.0 * t);
    }
    auto df = G.partial(f, 0, 1);
    auto dg = G.partial(g, 0, 1);
    std::vector<double> lhs(G.nn()), mag(G.nn());
    for (long i = 0; i < G.nn(); ++i) {
      lhs[i] = df[i] * g[i] + f[i] * dg[i];
      mag[i] = std::abs(df[i] * g[i]);
    }
    double resid = std::abs(integrate(gm, lhs));
    double scale = integrate(gm, mag);
    CHECK(resid / scale < 1e-12);
  }
}

TEST_CASE("quadrature reproduces closed forms") {
  const double L = 2.4;
  DomainGrid G = periodic1(32, L, DerivScheme::spectral);
  DomainMetric gm = DomainMetric::flat(G);
  std::vector<double> f(G.nn()), x(1);
  for (long i = 0; i < G.nn(); ++i) {
    G.node_coords(i, x.data());
    double s = std::sin(2.0 * M_PI * x[0] / L);
    f[i] = s * s;
  }
  CHECK(std::abs(integrate(gm, f) - L / 2.0) < 1e-13 * L);
}

TEST_CASE("curved domain metric: volume factor and christoffels (conformal)") {
  DomainGrid G(2, {2.0 * M_PI, 2.0 * M_PI}, {32, 32}, GridMode::periodic,
               DerivScheme::spectral);
  const long nn = G.nn();
  auto u = [](const double* p) { return 0.1 * std::sin(p[0]) * std::cos(p[1]); };
  auto ux = [](const double* p) { return 0.1 * std::cos(p[0]) * std::cos(p[1]); };
  auto uy = [](const double* p) { return -0.1 * std::sin(p[0]) * std::sin(p[1]); };

  SymTensorField g;
  g.m = 2;
  g.v.assign(nn * 3, 0.0);
  std::vector<double> x(2);
  for (long i = 0; i < nn; ++i) {
    G.node_coords(i, x.data());
    double e = std::exp(2.0 * u(x.data()));
    g.v[i * 3 + sym_index(2, 0, 0)] = e;
    g.v[i * 3 + sym_index(2, 1, 1)] = e;
  }
  DomainMetric gm = DomainMetric::from_field(G, std::move(g));

  // sqrt(det g) = e^{2u} (algebraic identity, no derivatives)
  double verr = 0.0;
  for (long i = 0; i < nn; ++i) {
    G.node_coords(i, x.data());
    verr = std::max(verr, std::abs(gm.sqrtdet_at(i) - std::exp(2.0 * u(x.data()))));
  }
  CHECK(verr < 1e-13);

  // conformal metric: Gamma^k_{ij} = d_i u delta_jk + d_j u delta_ik - d_k u delta_ij
  double gerr = 0.0;
  for (long i = 0; i < nn; ++i) {
    G.node_coords(i, x.data());
    double du[2] = {ux(x.data()), uy(x.data())};
    for (int k = 0; k < 2; ++k)
      for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
          double expect = (k == b ? du[a] : 0.0) + (k == a ? du[b] : 0.0) -
                          (a == b ? du[k] : 0.0);
          gerr = std::max(gerr, std::abs(gm.gamma_at(i, k, a, b) - expect));
        }
  }
  CHECK(gerr < 1e-10);
}

TEST_CASE("compact-support grid: constant extension derivatives") {
  DomainGrid G(1, {10.0}, {64}, GridMode::compact_support, DerivScheme::fd6, 3.0);
  std::vector<double> c(G.nn(), 4.2);
  auto dc = G.partial(c, 0, 1);
  for (long i = 0; i < G.nn(); ++i) CHECK(dc[i] == 0.0);

  // smooth compactly supported bump, derivative accurate at order ~6
  auto bump = [](double r) {
    double u = r / 3.0;
    return (std::abs(u) < 1.0) ? std::exp(1.0 - 1.0 / (1.0 - u * u)) : 0.0;
  };
  auto dbump = [&](double r) {
    double u = r / 3.0;
    if (std::abs(u) >= 1.0) return 0.0;
    double q = 1.0 - u * u;
    return bump(r) * (-2.0 * u / (q * q)) / 3.0;
  };
  double errs[2];
  int Ns[2] = {512, 1024};
  for (int lev = 0; lev < 2; ++lev) {
    DomainGrid Gl(1, {10.0}, {Ns[lev]}, GridMode::compact_support, DerivScheme::fd6, 3.0);
    std::vector<double> f(Gl.nn()), x(1);
    for (long i = 0; i < Gl.nn(); ++i) {
      Gl.node_coords(i, x.data());
      f[i] = bump(x[0]);
    }
    auto df = Gl.partial(f, 0, 1);
    errs[lev] = sup_err(Gl, df, [&](const double* p) { return dbump(p[0]); });
  }
  double order = std::log2(errs[0] / errs[1]);
  CHECK(order > 5.0);
  CHECK(order < 7.5);
}

TEST_CASE("pairwise summation matches high-precision reference") {
  std::vector<double> a(100000);
  for (std::size_t i = 0; i < a.size(); ++i)
    a[i] = std::sin(0.001 * i) * 1e-3 + ((i % 7 == 0) ? 1e6 : -1e6 / 6.0);
  long double ref = 0.0;
  for (double v : a) ref += (long double)v;
  double got = pairwise_sum(a);
  CHECK(std::abs((double)(got - ref)) <= 1e-9 * std::max(1.0, (double)std::abs(ref)));
}

TEST_CASE("grid validation rejects bad configurations") {
  CHECK_THROWS_AS(DomainGrid(1, {1.0}, {4}, GridMode::periodic, DerivScheme::spectral),
                  ConfigError);
  CHECK_THROWS_AS(
      DomainGrid(1, {1.0}, {16}, GridMode::compact_support, DerivScheme::spectral, 0.3),
      ConfigError);
  // support ball + stencil margin must fit in the box
  CHECK_THROWS_AS(
      DomainGrid(1, {10.0}, {16}, GridMode::compact_support, DerivScheme::fd6, 4.9),
      ConfigError);
  CHECK_THROWS_AS(DomainGrid(0, {}, {}, GridMode::periodic, DerivScheme::spectral),
                  ConfigError);
}

TEST_CASE("sym_index covers the upper triangle consistently") {
  for (int m = 1; m <= 4; ++m) {
    std::vector<int> seen(sym_size(m), 0);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        int idx = sym_index(m, i, j);
        CHECK(idx >= 0);
        CHECK(idx < sym_size(m));
        CHECK(sym_index(m, j, i) == idx);
        seen[idx]++;
      }
    for (int c : seen) CHECK(c == 1);
  }
}

TEST_CASE("spectral mask: modes below the cutoff exact, above annihilated") {
  const int N = 32;
  const double L = 2.0 * M_PI;
  // cutoff 0.5 keeps modes q <= floor(0.5 * N/2) = 8
  DomainGrid G(1, {L}, {N}, GridMode::periodic, DerivScheme::spectral, 0.0, 0.5);
  CHECK(G.spectral_cutoff() == 0.5);
  std::vector<double> f(G.nn()), x(1);
  for (int q : {1, 5, 8}) {
    for (long i = 0; i < G.nn(); ++i) {
      G.node_coords(i, x.data());
      f[i] = std::sin(q * x[0]) + 0.5 * std::cos(q * x[0]);
    }
    auto df = G.partial(f, 0, 1);
    double err = sup_err(G, df, [&](const double* p) {
      return q * std::cos(q * p[0]) - 0.5 * q * std::sin(q * p[0]);
    });
    CHECK(err < 1e-11 * q);
  }
  for (int q : {9, 12, 15}) {
    for (long i = 0; i < G.nn(); ++i) {
      G.node_coords(i, x.data());
      f[i] = std::sin(q * x[0]) + 0.5 * std::cos(q * x[0]);
    }
    auto df = G.partial(f, 0, 1);
    double mx = 0.0;
    for (double v : df) mx = std::max(mx, std::abs(v));
    CHECK(mx < 1e-11 * q);
  }
}

TEST_CASE("spectral mask keeps the derivative antisymmetric (discrete IBP)") {
  const int N = 48;
  const double L = 2.7;
  DomainGrid G(1, {L}, {N}, GridMode::periodic, DerivScheme::spectral, 0.0, 0.7);
  DomainMetric gm = DomainMetric::flat(G);
  std::vector<double> f(G.nn()), g(G.nn()), x(1);
  for (long i = 0; i < G.nn(); ++i) {
    G.node_coords(i, x.data());
    double t = 2.0 * M_PI * x[0] / L;
    // broadband, including modes beyond the mask
    f[i] = std::sin(t) + 0.4 * std::cos(9.0 * t) + 0.2 * std::sin(20.0 * t);
    g[i] = std::cos(2.0 * t) - 0.7 * std::sin(15.0 * t) + 0.1 * std::cos(22.0 * t);
  }
  auto df = G.partial(f, 0, 1);
  auto dg = G.partial(g, 0, 1);
  std::vector<double> lhs(G.nn()), mag(G.nn());
  for (long i = 0; i < G.nn(); ++i) {
    lhs[i] = df[i] * g[i] + f[i] * dg[i];
    mag[i] = std::abs(df[i] * g[i]);
  }
  CHECK(std::abs(integrate(gm, lhs)) / integrate(gm, mag) < 1e-13);
  // masked derivative of a constant stays at summation-noise level
  std::vector<double> c(G.nn(), 3.25);
  auto dc = G.partial(c, 0, 1);
  for (double v : dc) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("extended-precision partial: exact on resolved modes at long double eps") {
  const int N = 64;
  const double L = 2.0 * M_PI;
  DomainGrid G(1, {L}, {N}, GridMode::periodic, DerivScheme::spectral);
  // modes must be exactly grid-periodic in long double, so the frequency is
  // built from the stored (double-rounded) length, not from 2 pi directly
  const long double w = 2.0L * std::acos(-1.0L) / (long double)G.length(0);
  std::vector<long double> f(G.nn()), x(1);
  for (long i = 0; i < G.nn(); ++i) {
    G.node_coords(i, x.data());
    f[i] = std::sin(7.0L * w * x[0]) + 0.3L * std::cos(13.0L * w * x[0]);
  }
  std::vector<long double> df = G.partial(f, 0, 1);
  long double mx = 0.0L;
  for (long i = 0; i < G.nn(); ++i) {
    G.node_coords(i, x.data());
    long double want = 7.0L * w * std::cos(7.0L * w * x[0]) -
                       3.9L * w * std::sin(13.0L * w * x[0]);
    mx = std::max(mx, std::abs(df[i] - want));
  }
  // long double roundoff is ~5e-20 per op; the N-term sums stay near 1e-17
  CHECK((double)mx < 1e-15);
  // and the double-lane result agrees with the widened one to double accuracy
  std::vector<double> fd(G.nn());
  for (long i = 0; i < G.nn(); ++i) fd[i] = (double)f[i];
  auto dfd = G.partial(fd, 0, 1);
  double diff = 0.0;
  for (long i = 0; i < G.nn(); ++i)
    diff = std::max(diff, std::abs(dfd[i] - (double)df[i]));
  CHECK(diff < 1e-12);
}

TEST_CASE("spectral cutoff validation") {
  CHECK_THROWS_AS(DomainGrid(1, {1.0}, {16}, GridMode::periodic,
                             DerivScheme::spectral, 0.0, 0.0),
                  ConfigError);
  CHECK_THROWS_AS(DomainGrid(1, {1.0}, {16}, GridMode::periodic,
                             DerivScheme::spectral, 0.0, 1.5),
                  ConfigError);
  // a mask makes no sense for finite differences
  CHECK_THROWS_AS(
      DomainGrid(1, {1.0}, {16}, GridMode::periodic, DerivScheme::fd6, 0.0, 0.8),
      ConfigError);
}
