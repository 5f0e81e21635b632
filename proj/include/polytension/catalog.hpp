#pragma once

#include <vector>

#include "polytension/calculus.hpp"

namespace polytension {

// Named map constructors. Every experiment input is one of these, so runs are
// reproducible from a handful of scalar parameters.
//
// Sphere chart conventions (stereographic projection from the north pole,
// chart origin = south pole, target radius rho):
//   - a point at colatitude theta (from the north pole) sits at chart radius
//     rho * cot(theta/2);
//   - the exponential map at the south pole is exp_0(v) = rho tan(|v|/(2 rho))
//     * v/|v|, smooth through v = 0.

// Constant map at chart point y0 (defaults to the origin).
MapField constant_map(const DomainGrid& G, const ChartTarget& T,
                      const std::vector<double>& y0 = {});

// Flat-target sinusoid along axis 0: y^c(x) = A_c sin(2 pi k_c x_0 / L_0 + p_c).
MapField sinusoid_map(const DomainGrid& G, const ChartTarget& T,
                      const std::vector<double>& amp, const std::vector<int>& modes,
                      const std::vector<double>& phase = {});

// Equator of S^2(rho) traversed `wraps` times along the given domain axis.
MapField great_circle_map(const DomainGrid& G, const SphereTarget& S, int wraps = 1,
                          int axis = 0);

// Latitude circle at colatitude theta0, `wraps` times around, along `axis`.
MapField latitude_circle_map(const DomainGrid& G, const SphereTarget& S, double theta0,
                             int wraps = 1, int axis = 0);

// Latitude-profile family on m >= 2 (azimuth along phase_axis, colatitude
// profile along profile_axis):
//   f(t) = theta0 + amp sin(2 pi profile_wraps t / L),
//   y(x) = rho cot(f(x_pa)/2) (cos(omega x_qa), sin(omega x_qa)),
// omega = 2 pi wraps / L. Requires 0 < theta0 - amp and theta0 + amp < pi.
// The instantiation picks the working scalar: the long double one evaluates
// the map natively at long double grid coordinates so the extended lane is
// not polluted by double-rounded inputs.
template <class R = double>
MapFieldT<R> latitude_profile_map(const DomainGrid& G, const SphereTarget& S,
                                  double theta0, double amp, int wraps = 1,
                                  int profile_wraps = 1, int phase_axis = 0,
                                  int profile_axis = 1);

// Compactly supported bump map exp_0(v(x)) with
//   v(x) = amp chi(|x|/r0) (cos(b.x/r0), sin(b.x/r0)),
// chi(u) = 1 - s(u), s the degree-27 smoothstep (thirteen vanishing
// derivatives at u = 0 and u = 1). The map is constant (south pole) outside
// the ball of radius r0 and C^13 everywhere, which keeps all derivatives the
// fourth-order calculus takes resolvable on desk-scale grids.
MapField bump_map(const DomainGrid& G, const SphereTarget& S, double amp, double r0,
                  const std::vector<double>& b);

// Great-circle composite exp_0(psi(x) e_1) with psi = eta(r) (a.x), where
// eta is a C-infinity cutoff equal to 1 on [0, R1] and 0 beyond R2. Inside
// r <= R1 the map is a geodesic precomposed with a linear function, hence
// exactly harmonic there; outside R2 it is constant.
MapField geodesic_bump_map(const DomainGrid& G, const SphereTarget& S,
                           const std::vector<double>& a, double R1, double R2);

// Seeded band-limited chart map y = center + (random section, amplitude amp,
// modes up to kmax per axis). Deterministic in (seed, kmax, amp, center).
MapField random_fourier_map(const DomainGrid& G, const ChartTarget& T,
                            std::uint64_t seed, int kmax, double amp,
                            const std::vector<double>& center = {});

}  // namespace polytension
