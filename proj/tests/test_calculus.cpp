#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles/sphere_embedding.hpp"
#include "polytension/calculus.hpp"

using namespace polytension;

namespace {

// latitude circle at colatitude theta0 (from the north pole) on S^2(1),
// traversed at angular speed omega = 2 pi / L; chart radius cot(theta0/2)
MapField latitude_map(const DomainGrid& G, const SphereTarget& S, double theta0) {
  const double u0 = 1.0 / std::tan(0.5 * theta0);
  const double omega = 2.0 * M_PI / G.length(0);
  std::vector<double> y(G.nn() * 2);
  for (long i = 0; i < G.nn(); ++i) {
    double x = G.coord(0, (int)i);
    y[i * 2 + 0] = u0 * std::cos(omega * x);
    y[i * 2 + 1] = u0 * std::sin(omega * x);
  }
  return MapField(G, S, std::move(y));
}

// smooth 2-d test map into the sphere chart, all low trig modes
MapField trig_map(const DomainGrid& G, const ChartTarget& T) {
  std::vector<double> y(G.nn() * 2), x(2);
  for (long i = 0; i < G.nn(); ++i) {
    G.node_coords(i, x.data());
    y[i * 2 + 0] = 0.40 + 0.25 * std::sin(x[0]) * std::cos(x[1]);
    y[i * 2 + 1] = -0.10 + 0.20 * std::cos(x[0]) + 0.15 * std::sin(x[1]);
  }
  return MapField(G, T, std::move(y));
}

BundleTensor trig_section(const DomainGrid& G, int n) {
  BundleTensor V;
  V.order = 0;
  V.v.assign(G.nn() * n, 0.0);
  std::vector<double> x(2);
  for (long i = 0; i < G.nn(); ++i) {
    G.node_coords(i, x.data());
    V.v[i * n + 0] = 0.30 * std::sin(x[0]) + 0.50 * std::cos(x[1]);
    if (n > 1) V.v[i * n + 1] = 0.20 + 0.40 * std::sin(x[0] + x[1]);
  }
  return V;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("latitude circle: tension matches the ambient second-fundamental-form oracle") {
  DomainGrid G(1, {2.0 * M_PI}, {64}, GridMode::periodic, DerivScheme::spectral);
  DomainMetric gm = DomainMetric::flat(G);
  SphereTarget S(2, 1.0);
  oracle::SphereEmbedding E{2, 1.0};
  const double theta0 = 1.0, omega = 1.0;
  MapField phi = latitude_map(G, S, theta0);
  BundleTensor tau = tension(gm, phi);

  // ambient tau = phi'' projected tangentially, closed form for the latitude circle
  const double st = std::sin(theta0), ct = std::cos(theta0);
  double worst = 0.0;
  for (long i = 0; i < G.nn(); ++i) {
    double x = G.coord(0, (int)i);
    auto amb = E.push(phi.at(i), &tau.v[i * 2]);
    double ref[3] = {-omega * omega * st * ct * ct * std::cos(omega * x),
                     -omega * omega * st * ct * ct * std::sin(omega * x),
                     omega * omega * st * st * ct};
    for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(amb[c] - ref[c]));
  }
  CHECK(worst < 1e-12);

  // |tau| = (omega^2/2) |sin 2 theta0| pointwise
  ScalarField tt = inner_field(gm, phi, tau, tau);
  double mag = 0.5 * omega * omega * std::abs(std::sin(2.0 * theta0));
  for (long i = 0; i < G.nn(); ++i)
    CHECK(std::abs(std::sqrt(tt.v[i]) - mag) < 1e-12);
}

TEST_CASE("great circle is harmonic with unit-speed energy density") {
  DomainGrid G(1, {2.0 * M_PI}, {48}, GridMode::periodic, DerivScheme::spectral);
  DomainMetric gm = DomainMetric::flat(G);
  SphereTarget S(2, 1.0);
  MapField phi = latitude_map(G, S, M_PI / 2.0);
  BundleTensor dphi = differential(phi);
  BundleTensor tau = tension(gm, phi);
  CHECK(sup_norm(gm, phi, tau) < 1e-12);
  ScalarField e = inner_field(gm, phi, dphi, dphi);
  for (long i = 0; i < G.nn(); ++i) CHECK(std::abs(e.v[i] - 1.0) < 1e-13);
}

TEST_CASE("second covariant derivative commutator equals curvature term") {
  DomainGrid G(2, {2.0 * M_PI, 2.0 * M_PI}, {48, 48}, GridMode::periodic,
               DerivScheme::spectral);
  DomainMetric gm = DomainMetric::flat(G);
  SphereTarget S(2, 1.0);
  MapField phi = trig_map(G, S);
  BundleTensor dphi = differential(phi);
  BundleTensor V = trig_section(G, 2);
  BundleTensor dV = covariant_derivative(gm, phi, V, dphi);
  BundleTensor ddV = covariant_derivative(gm, phi, dV, dphi);

  const int m = 2, n = 2;
  double c = 0.0;
  REQUIRE(S.space_form(&c));
  std::vector<double> h(n * n), Rterm(n), comm(n);
  double worst = 0.0, scale = 0.0;
  for (long node = 0; node < G.nn(); ++node) {
    S.metric(phi.at(node), h.data());
    const double* dp = &dphi.v[node * m * n];
    const double* dd = &ddV.v[node * m * m * n];
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        apply_curvature(n, true, c, h.data(), (const double*)nullptr, dp + a * n,
                        dp + b * n, &V.v[node * n], Rterm.data());
        for (int al = 0; al < n; ++al) {
          comm[al] = dd[(a * m + b) * n + al] - dd[(b * m + a) * n + al];
          worst = std::max(worst, std::abs(comm[al] - Rterm[al]));
          scale = std::max(scale, std::abs(Rterm[al]));
        }
      }
  }
  CHECK(scale > 1e-3);  // the curvature term is genuinely present
  CHECK(worst < 1e-8 * std::max(1.0, scale));
}

TEST_CASE("pullback connection is metric compatible") {
  DomainGrid G(2, {2.0 * M_PI, 2.0 * M_PI}, {48, 48}, GridMode::periodic,
               DerivScheme::spectral);
  DomainMetric gm = DomainMetric::flat(G);
  SphereTarget S(2, 1.3);
  MapField phi = trig_map(G, S);
  BundleTensor dphi = differential(phi);
  BundleTensor V = trig_section(G, 2);
  BundleTensor W = trig_section(G, 2);
  for (std::size_t i = 0; i < W.v.size(); ++i) W.v[i] = 0.7 * W.v[i] + 0.05;
  BundleTensor dV = covariant_derivative(gm, phi, V, dphi);
  BundleTensor dW = covariant_derivative(gm, phi, W, dphi);

  ScalarField s = inner_field(gm, phi, V, W);
  const int m = 2, n = 2;
  std::vector<double> h(n * n);
  for (int a = 0; a < m; ++a) {
    auto ds = G.partial(s.v, a, 1);
    double worst = 0.0, scale = sup_abs(ds);
    for (long node = 0; node < G.nn(); ++node) {
      S.metric(phi.at(node), h.data());
      double rhs = h_dot(n, h.data(), &dV.v[(node * m + a) * n], &W.v[node * n]) +
                   h_dot(n, h.data(), &V.v[node * n], &dW.v[(node * m + a) * n]);
      worst = std::max(worst, std::abs(ds[node] - rhs));
    }
    CHECK(worst < 1e-9 * std::max(1.0, scale));
  }
}

TEST_CASE("codifferential is the exact negative adjoint of the connection") {
  DomainGrid G(2, {2.0 * M_PI, 2.0 * M_PI}, {48, 48}, GridMode::periodic,
               DerivScheme::spectral);
  DomainMetric gm = DomainMetric::flat(G);
  SphereTarget S(2, 1.0);
  MapField phi = trig_map(G, S);
  BundleTensor dphi = differential(phi);
  BundleTensor V = trig_section(G, 2);

  // A: a smooth bundle one-form (reuse dphi scaled plus the connection of V)
  BundleTensor A = covariant_derivative(gm, phi, V, dphi);
  for (std::size_t i = 0; i < A.v.size(); ++i) A.v[i] = 0.8 * A.v[i] + 0.3 * dphi.v[i];

  BundleTensor dV = covariant_derivative(gm, phi, V, dphi);
  BundleTensor dstarA = codifferential(gm, phi, A, dphi);
  double lhs = integrate(gm, inner_field(gm, phi, dV, A).v);
  double rhs = integrate(gm, inner_field(gm, phi, V, dstarA).v);
  double scale = l2_norm(gm, phi, dV) * l2_norm(gm, phi, A) + 1e-30;
  CHECK(std::abs(lhs - rhs) / scale < 1e-10);
}

TEST_CASE("codifferential of the differential is minus the tension") {
  DomainGrid G(2, {2.0 * M_PI, 2.0 * M_PI}, {32, 32}, GridMode::periodic,
               DerivScheme::spectral);
  DomainMetric gm = DomainMetric::flat(G);
  SphereTarget S(2, 1.0);
  MapField phi = trig_map(G, S);
  BundleTensor dphi = differential(phi);
  BundleTensor tau = tension(gm, phi);
  BundleTensor mdstar = codifferential(gm, phi, dphi, dphi);
  for (double& x : mdstar.v) x = -x;
  CHECK(sup_diff(gm, phi, tau, mdstar) < 1e-13 * std::max(1.0, sup_norm(gm, phi, tau)));
}

TEST_CASE("rough laplacian is positive and adjoint-consistent") {
  DomainGrid G(2, {2.0 * M_PI, 2.0 * M_PI}, {48, 48}, GridMode::periodic,
               DerivScheme::spectral);
  DomainMetric gm = DomainMetric::flat(G);
  SphereTarget S(2, 1.0);
  MapField phi = trig_map(G, S);
  BundleTensor dphi = differential(phi);
  BundleTensor V = trig_section(G, 2);
  BundleTensor dV = covariant_derivative(gm, phi, V, dphi);
  BundleTensor lapV = rough_laplacian(gm, phi, V, dphi);

  double lhs = integrate(gm, inner_field(gm, phi, lapV, V).v);
  double grad2 = integrate(gm, inner_field(gm, phi, dV, dV).v);
  CHECK(grad2 > 1e-6);
  CHECK(std::abs(lhs - grad2) / grad2 < 1e-10);
}

TEST_CASE("rough laplacian matches the ambient projection oracle on a 1-d map") {
  DomainGrid G(1, {2.0 * M_PI}, {64}, GridMode::periodic, DerivScheme::spectral);
  DomainMetric gm = DomainMetric::flat(G);
  SphereTarget S(2, 1.0);
  oracle::SphereEmbedding E{2, 1.0};
  MapField phi = latitude_map(G, S, 1.1);
  BundleTensor dphi = differential(phi);

  BundleTensor V;
  V.order = 0;
  V.v.assign(G.nn() * 2, 0.0);
  for (long i = 0; i < G.nn(); ++i) {
    double x = G.coord(0, (int)i);
    V.v[i * 2 + 0] = 0.3 + 0.2 * std::sin(x);
    V.v[i * 2 + 1] = 0.4 * std::cos(x);
  }
  BundleTensor lapV = rough_laplacian(gm, phi, V, dphi);

  // ambient route: Delta V = -P d/dx (P d/dx V_amb), all on the same grid
  std::vector<double> Vamb(G.nn() * 3);
  for (long i = 0; i < G.nn(); ++i) {
    auto a = E.push(phi.at(i), &V.v[i * 2]);
    for (int c = 0; c < 3; ++c) Vamb[i * 3 + c] = a[c];
  }
  auto dVamb = G.partial(Vamb, 0, 3);
  std::vector<double> W(G.nn() * 3);
  for (long i = 0; i < G.nn(); ++i) {
    auto x = E.emb(phi.at(i));
    auto p = E.project(x, {dVamb[i * 3], dVamb[i * 3 + 1], dVamb[i * 3 + 2]});
    for (int c = 0; c < 3; ++c) W[i * 3 + c] = p[c];
  }
  auto dW = G.partial(W, 0, 3);
  double worst = 0.0;
  for (long i = 0; i < G.nn(); ++i) {
    auto x = E.emb(phi.at(i));
    auto p = E.project(x, {dW[i * 3], dW[i * 3 + 1], dW[i * 3 + 2]});
    auto eng = E.push(phi.at(i), &lapV.v[i * 2]);
    for (int c = 0; c < 3; ++c)
      worst = std::max(worst, std::abs(eng[c] - (-p[c])));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("curved domain metric: conformal tension and energy density closed forms") {
  DomainGrid G(2, {2.0 * M_PI, 2.0 * M_PI}, {48, 48}, GridMode::periodic,
               DerivScheme::spectral);
  const long nn = G.nn();
  auto u = [](const double* p) { return 0.15 * std::sin(p[0]) * std::cos(p[1]); };

  SymTensorField gf;
  gf.m = 2;
  gf.v.assign(nn * 3, 0.0);
  std::vector<double> x(2);
  for (long i = 0; i < nn; ++i) {
    G.node_coords(i, x.data());
    double e = std::exp(2.0 * u(x.data()));
    gf.v[i * 3 + sym_index(2, 0, 0)] = e;
    gf.v[i * 3 + sym_index(2, 1, 1)] = e;
  }
  DomainMetric gm = DomainMetric::from_field(G, std::move(gf));

  EuclideanTarget T(2);
  std::vector<double> y(nn * 2);
  auto f1 = [](const double* p) { return std::sin(p[0]) + 0.3 * std::sin(p[0] + p[1]); };
  auto f2 = [](const double* p) { return std::cos(p[1]) - 0.2 * std::cos(2.0 * p[0]); };
  auto lap1 = [&](const double* p) {
    return -std::sin(p[0]) - 0.6 * std::sin(p[0] + p[1]);
  };
  auto lap2 = [&](const double* p) {
    return -std::cos(p[1]) + 0.8 * std::cos(2.0 * p[0]);
  };
  for (long i = 0; i < nn; ++i) {
    G.node_coords(i, x.data());
    y[i * 2 + 0] = f1(x.data());
    y[i * 2 + 1] = f2(x.data());
  }
  MapField phi(G, T, std::move(y));
  BundleTensor tau = tension(gm, phi);

  // in 2-d, tau(phi) = e^{-2u} Delta_flat phi for g = e^{2u} delta
  double worst = 0.0;
  for (long i = 0; i < nn; ++i) {
    G.node_coords(i, x.data());
    double w = std::exp(-2.0 * u(x.data()));
    worst = std::max(worst, std::abs(tau.v[i * 2 + 0] - w * lap1(x.data())));
    worst = std::max(worst, std::abs(tau.v[i * 2 + 1] - w * lap2(x.data())));
  }
  CHECK(worst < 1e-9);

  // |dphi|^2_g = e^{-2u} |dphi|^2_flat
  BundleTensor dphi = differential(phi);
  ScalarField e2 = inner_field(gm, phi, dphi, dphi);
  worst = 0.0;
  for (long i = 0; i < nn; ++i) {
    G.node_coords(i, x.data());
    double flat2 = 0.0;
    for (int k = 0; k < 4; ++k) flat2 += dphi.v[i * 4 + k] * dphi.v[i * 4 + k];
    worst = std::max(worst, std::abs(e2.v[i] - std::exp(-2.0 * u(x.data())) * flat2));
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("map validation: chart bound and finiteness") {
  DomainGrid G(1, {1.0}, {8}, GridMode::periodic, DerivScheme::fd2);
  SphereTarget S(2, 1.0);
  std::vector<double> ok(G.nn() * 2, 0.5);
  CHECK_NOTHROW(MapField(G, S, ok));

  std::vector<double> far(G.nn() * 2, 0.5);
  far[4] = 11.0;  // |y| > 10 rho
  CHECK_THROWS_AS(MapField(G, S, far), ChartExitError);

  std::vector<double> bad(G.nn() * 2, 0.5);
  bad[2] = std::nan("");
  CHECK_THROWS_AS(MapField(G, S, bad), NumericalError);

  std::vector<double> wrong(G.nn() * 2 + 1, 0.0);
  CHECK_THROWS_AS(MapField(G, S, wrong), Error);
}

TEST_CASE("bundle tensor bookkeeping") {
  DomainGrid G(2, {1.0, 1.0}, {8, 8}, GridMode::periodic, DerivScheme::fd4);
  SphereTarget S(2, 1.0);
  CHECK(bundle_len(G, S, 0) == 64 * 2);
  CHECK(bundle_len(G, S, 3) == 64 * 8 * 2);
  std::vector<double> y(G.nn() * 2, 0.1);
  MapField phi(G, S, std::move(y));
  BundleTensor z = zero_tensor(phi, 2);
  CHECK(z.order == 2);
  CHECK((long)z.v.size() == bundle_len(G, S, 2));
  CHECK(sup_abs(z.v) == 0.0);
}
