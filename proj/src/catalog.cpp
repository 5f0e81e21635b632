#include "polytension/catalog.hpp"

#include <cmath>
#include <string>

#include "polytension/random_fields.hpp"

namespace polytension {

namespace {

// chart representation of exp at the south pole: exp_0(v) = f(|v|/(2 rho)) v / 2
// with f(s) = tan(s)/s continued analytically through s = 0
void chart_exp0(double rho, const double* v, int nv, double* y) {
  double t = 0.0;
  for (int c = 0; c < nv; ++c) t += v[c] * v[c];
  double s = std::sqrt(t) / (2.0 * rho);
  double f;
  if (s < 1e-6) {
    double s2 = s * s;
    f = 1.0 + s2 / 3.0 + 2.0 * s2 * s2 / 15.0;
  } else {
    f = std::tan(s) / s;
  }
  for (int c = 0; c < nv; ++c) y[c] = 0.5 * f * v[c];
}

// Bump profile chi(u) = 1 - s(u) with s the degree-27 smoothstep
// (s'(u) proportional to u^13 (1-u)^13): thirteen derivatives vanish at both
// ends, so chi(|x|/r0) is a C^13 function of x that is exactly 1 at the
// origin and exactly 0 for |x| >= r0. Polynomial smoothness keeps every
// derivative the calculus chain takes (up to seven) grid-resolvable, unlike
// an exp(-1/u)-type profile whose high derivatives concentrate at the seam.
// Evaluated in extended precision on u <= 1/2 and reflected (s(u)+s(1-u)=1)
// to keep the alternating Horner sum from cancelling.
double bump_profile(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  // s(u) = 280816200 sum_j (-1)^j C(13,j) u^{14+j} / (14+j); 280816200 = 1/B(14,14)
  static const long double binom13[14] = {1,   13,   78,   286,  715,  1287, 1716,
                                          1716, 1287, 715,  286,  78,   13,   1};
  auto s_half = [](long double t) {
    long double acc = 0.0L;
    for (int j = 13; j >= 0; --j) {
      long double c = 280816200.0L * binom13[j] / (14 + j);
      acc = acc * t + (j % 2 ? -c : c);
    }
    long double t2 = t * t, t4 = t2 * t2, t8 = t4 * t4;
    return acc * t8 * t4 * t2;
  };
  long double s = u <= 0.5 ? s_half(u) : 1.0L - s_half(1.0L - u);
  return (double)(1.0L - s);
}

// C-infinity transition: 1 on u<=0, 0 on u>=1
double smooth_step_down(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  auto B = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  double b0 = B(1.0 - u), b1 = B(u);
  return b0 / (b0 + b1);
}

void require_axis(const DomainGrid& G, int axis, const char* who) {
  if (axis < 0 || axis >= G.dim())
    throw ConfigError(std::string(who) + ": axis out of range");
}

}  // namespace

MapField constant_map(const DomainGrid& G, const ChartTarget& T,
                      const std::vector<double>& y0) {
  const int n = T.n();
  if (!y0.empty() && (int)y0.size() != n)
    throw ConfigError("constant_map: y0 size does not match target dimension");
  std::vector<double> y((std::size_t)G.nn() * n, 0.0);
  if (!y0.empty())
    for (long node = 0; node < G.nn(); ++node)
      for (int c = 0; c < n; ++c) y[node * n + c] = y0[c];
  return MapField(G, T, std::move(y));
}

MapField sinusoid_map(const DomainGrid& G, const ChartTarget& T,
                      const std::vector<double>& amp, const std::vector<int>& modes,
                      const std::vector<double>& phase) {
  const int n = T.n();
  if ((int)amp.size() != n || (int)modes.size() != n)
    throw ConfigError("sinusoid_map: need one amplitude and mode per component");
  if (!phase.empty() && (int)phase.size() != n)
    throw ConfigError("sinusoid_map: phase size mismatch");
  std::vector<double> y((std::size_t)G.nn() * n);
  std::vector<double> x(G.dim());
  const double L = G.length(0);
  for (long node = 0; node < G.nn(); ++node) {
    G.node_coords(node, x.data());
    for (int c = 0; c < n; ++c) {
      double p = phase.empty() ? 0.0 : phase[c];
      y[node * n + c] = amp[c] * std::sin(2.0 * M_PI * modes[c] * x[0] / L + p);
    }
  }
  return MapField(G, T, std::move(y));
}

MapField great_circle_map(const DomainGrid& G, const SphereTarget& S, int wraps,
                          int axis) {
  return latitude_circle_map(G, S, M_PI / 2.0, wraps, axis);
}

MapField latitude_circle_map(const DomainGrid& G, const SphereTarget& S, double theta0,
                             int wraps, int axis) {
  require_axis(G, axis, "latitude_circle_map");
  if (!(theta0 > 0.0 && theta0 < M_PI))
    throw ConfigError("latitude_circle_map: colatitude must lie in (0, pi)");
  const double rho = S.radius();
  const double u0 = rho / std::tan(0.5 * theta0);
  const double omega = 2.0 * M_PI * wraps / G.length(axis);
  std::vector<double> y((std::size_t)G.nn() * 2);
  std::vector<double> x(G.dim());
  for (long node = 0; node < G.nn(); ++node) {
    G.node_coords(node, x.data());
    y[node * 2 + 0] = u0 * std::cos(omega * x[axis]);
    y[node * 2 + 1] = u0 * std::sin(omega * x[axis]);
  }
  return MapField(G, S, std::move(y));
}

template <class R>
MapFieldT<R> latitude_profile_map(const DomainGrid& G, const SphereTarget& S,
                                  double theta0, double amp, int wraps,
                                  int profile_wraps, int phase_axis,
                                  int profile_axis) {
  require_axis(G, phase_axis, "latitude_profile_map");
  require_axis(G, profile_axis, "latitude_profile_map");
  if (phase_axis == profile_axis)
    throw ConfigError("latitude_profile_map: phase and profile axes must differ");
  if (!(theta0 - std::abs(amp) > 0.0 && theta0 + std::abs(amp) < M_PI))
    throw ConfigError("latitude_profile_map: colatitude range must stay inside (0, pi)");
  const R pi = std::acos(R(-1));
  const R rho = R(S.radius());
  const R omega = R(2) * pi * wraps / R(G.length(phase_axis));
  const R nu = R(2) * pi * profile_wraps / R(G.length(profile_axis));
  std::vector<R> y((std::size_t)G.nn() * 2);
  std::vector<long double> x(G.dim());
  for (long node = 0; node < G.nn(); ++node) {
    G.node_coords(node, x.data());
    R f = R(theta0) + R(amp) * std::sin(nu * R(x[profile_axis]));
    R u = rho / std::tan(R(0.5) * f);
    y[node * 2 + 0] = u * std::cos(omega * R(x[phase_axis]));
    y[node * 2 + 1] = u * std::sin(omega * R(x[phase_axis]));
  }
  return MapFieldT<R>(G, S, std::move(y));
}

template MapField latitude_profile_map<double>(const DomainGrid&, const SphereTarget&,
                                               double, double, int, int, int, int);
template MapFieldX latitude_profile_map<long double>(const DomainGrid&,
                                                     const SphereTarget&, double,
                                                     double, int, int, int, int);

MapField bump_map(const DomainGrid& G, const SphereTarget& S, double amp, double r0,
                  const std::vector<double>& b) {
  if (G.mode() != GridMode::compact_support)
    throw ConfigError("bump_map: needs a compact_support grid");
  if (!(r0 > 0.0) || r0 > G.support_radius())
    throw ConfigError("bump_map: r0 must lie in (0, support_radius]");
  if ((int)b.size() != G.dim()) throw ConfigError("bump_map: need one b per axis");
  if (!(std::abs(amp) < M_PI * S.radius()))
    throw ConfigError("bump_map: |amp| must stay below pi * rho (injectivity radius)");
  std::vector<double> y((std::size_t)G.nn() * 2);
  std::vector<double> x(G.dim());
  for (long node = 0; node < G.nn(); ++node) {
    G.node_coords(node, x.data());
    double r2 = 0.0, th = 0.0;
    for (int a = 0; a < G.dim(); ++a) {
      r2 += x[a] * x[a];
      th += b[a] * x[a] / r0;
    }
    double chi = bump_profile(std::sqrt(r2) / r0);
    double v[2] = {amp * chi * std::cos(th), amp * chi * std::sin(th)};
    chart_exp0(S.radius(), v, 2, &y[node * 2]);
  }
  return MapField(G, S, std::move(y));
}

MapField geodesic_bump_map(const DomainGrid& G, const SphereTarget& S,
                           const std::vector<double>& a, double R1, double R2) {
  if (G.mode() != GridMode::compact_support)
    throw ConfigError("geodesic_bump_map: needs a compact_support grid");
  if (!(0.0 < R1 && R1 < R2) || R2 > G.support_radius())
    throw ConfigError("geodesic_bump_map: need 0 < R1 < R2 <= support_radius");
  if ((int)a.size() != G.dim())
    throw ConfigError("geodesic_bump_map: need one slope per axis");
  double anorm = 0.0;
  for (double c : a) anorm += c * c;
  anorm = std::sqrt(anorm);
  if (!(anorm * R2 < 0.9 * M_PI * S.radius()))
    throw ConfigError("geodesic_bump_map: |a| R2 too large for the chart");
  std::vector<double> y((std::size_t)G.nn() * 2);
  std::vector<double> x(G.dim());
  for (long node = 0; node < G.nn(); ++node) {
    G.node_coords(node, x.data());
    double r2 = 0.0, ax = 0.0;
    for (int i = 0; i < G.dim(); ++i) {
      r2 += x[i] * x[i];
      ax += a[i] * x[i];
    }
    double eta = smooth_step_down((std::sqrt(r2) - R1) / (R2 - R1));
    double v[2] = {eta * ax, 0.0};
    chart_exp0(S.radius(), v, 2, &y[node * 2]);
  }
  return MapField(G, S, std::move(y));
}

MapField random_fourier_map(const DomainGrid& G, const ChartTarget& T,
                            std::uint64_t seed, int kmax, double amp,
                            const std::vector<double>& center) {
  const int n = T.n();
  if (!center.empty() && (int)center.size() != n)
    throw ConfigError("random_fourier_map: center size mismatch");
  BundleTensor sec = random_section(G, n, seed, kmax, amp);
  if (!center.empty())
    for (long node = 0; node < G.nn(); ++node)
      for (int c = 0; c < n; ++c) sec.v[node * n + c] += center[c];
  return MapField(G, T, std::move(sec.v));
}

}  // namespace polytension
