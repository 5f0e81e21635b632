// throwaway measurement driver for the verify module (not installed)
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "polytension/catalog.hpp"
#include "polytension/random_fields.hpp"
#include "polytension/tension.hpp"
#include "polytension/verify.hpp"

using namespace polytension;

static void cutoff_measurements() {
  std::printf("== cutoff ==\n");
  for (auto fam : {CutoffFamily::poly9, CutoffFamily::mollified}) {
    for (double R : {1.0, 2.0, 4.0, 8.0}) {
      CutoffProfile eta(R, fam);
      std::printf("%-9s R=%g bounds", cutoff_family_to_string(fam).c_str(), R);
      for (int l = 1; l <= 4; ++l) std::printf(" %.17g", eta.bound(l));
      std::printf("  eta(R/2)=%.17g eta(3R)=%.17g\n", eta(0.5 * R), eta(3.0 * R));
    }
  }
  // seam smoothness: compare one-sided FD of eta^(l) across r=R and r=2R
  CutoffProfile eta(1.0, CutoffFamily::poly9);
  for (double seam : {1.0, 2.0}) {
    for (int l = 0; l <= 4; ++l) {
      double h = 1e-3;
      double lo = eta.eval(seam - h, l), hi = eta.eval(seam + h, l);
      std::printf("seam r=%g l=%d jump=%.3g\n", seam, l, std::fabs(hi - lo));
    }
  }
}

static void map_variation_measurements() {
  std::printf("== map variation, flat target ==\n");
  {
    DomainGrid G(1, {2.0 * std::acos(-1.0)}, {64}, GridMode::periodic,
                 DerivScheme::spectral);
    EuclideanTarget T(2);
    MapField phi = random_fourier_map(G, T, 11, 3, 0.7);
    DomainMetric gm = DomainMetric::flat(G);
    BundleTensor V = random_section(G, 2, 12, 3, 1.0);
    for (auto k : {EnergyKind::dirichlet, EnergyKind::e2, EnergyKind::e3,
                   EnergyKind::e4, EnergyKind::e5, EnergyKind::e4es}) {
      auto r = map_variation_check(gm, phi, V, k);
      std::printf("flat %-9s rel=%.3g extrap=%.9g pair=%.9g t=%g shrinks=%d\n",
                  r.kind.c_str(), r.relative, r.extrapolated, r.pairing, r.t,
                  r.shrinks);
    }
  }
  std::printf("== map variation, sphere target m=2 ==\n");
  {
    DomainGrid G(2, {2.0 * std::acos(-1.0), 2.0 * std::acos(-1.0)}, {48, 48},
                 GridMode::periodic, DerivScheme::spectral);
    SphereTarget S(2, 1.0);
    MapField phi = latitude_profile_map(G, S, 1.1, 0.25, 1, 1);
    DomainMetric gm = DomainMetric::flat(G);
    for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
      BundleTensor V = random_section(G, 2, seed, 3, 1.0);
      for (auto k : {EnergyKind::e4, EnergyKind::e4es}) {
        auto r = map_variation_check(gm, phi, V, k);
        std::printf("S2 seed=%llu %-5s rel=%.3g extrap=%.9g pair=%.9g shrinks=%d\n",
                    (unsigned long long)seed, r.kind.c_str(), r.relative,
                    r.extrapolated, r.pairing, r.shrinks);
      }
    }
  }
}

static void metric_variation_measurements() {
  std::printf("== metric variation ==\n");
  DomainGrid G(2, {2.0 * std::acos(-1.0), 2.0 * std::acos(-1.0)}, {48, 48},
               GridMode::periodic, DerivScheme::spectral);
  SphereTarget S(2, 1.0);
  MapField phi = latitude_profile_map(G, S, 1.1, 0.25, 1, 1);
  DomainMetric gm = DomainMetric::flat(G);
  for (std::uint64_t seed : {31, 32, 33, 34, 35}) {
    SymTensorField om = random_sym_tensor(G, seed, 2, 0.2);
    for (auto which : {MetricEnergy::e4hat, MetricEnergy::e4es}) {
      auto r = metric_variation_check(gm, phi, om, which);
      std::printf("metric seed=%llu %-6s rel=%.3g extrap=%.9g pair=%.9g shrinks=%d\n",
                  (unsigned long long)seed, r.kind.c_str(), r.relative,
                  r.extrapolated, r.pairing, r.shrinks);
    }
    auto rt = tension_metric_variation_check(gm, phi, om);
    std::printf("tension seed=%llu rel=%.3g supfd=%.3g supclosed=%.9g shrinks=%d\n",
                (unsigned long long)seed, rt.relative, rt.extrapolated, rt.pairing,
                rt.shrinks);
  }
  // conformal flat: omega = g on a flat metric, curved-base path
  {
    SymTensorField om;
    om.m = 2;
    om.v.assign((std::size_t)G.nn() * sym_size(2), 0.0);
    for (long node = 0; node < G.nn(); ++node)
      for (int i = 0; i < 2; ++i) om.v[node * sym_size(2) + sym_index(2, i, i)] = 1.0;
    auto rt = tension_metric_variation_check(gm, phi, om);
    std::printf("tension conformal rel=%.3g supfd=%.3g supclosed=%.9g\n", rt.relative,
                rt.extrapolated, rt.pairing);
  }
}

static void pohozaev_measurements(int m, const std::vector<int>& Ns, StressLaw mode,
                                  CutoffFamily fam, double R = 1.6) {
  std::printf("== pohozaev m=%d mode=%s fam=%s R=%g ==\n", m,
              mode == StressLaw::fourth ? "fourth" : "es",
              cutoff_family_to_string(fam).c_str(), R);
  std::vector<double> prev_res;
  for (int N : Ns) {
    std::vector<double> L(m, 10.0);
    std::vector<int> res(m, N);
    DomainGrid G(m, L, res, GridMode::compact_support, DerivScheme::fd6, 4.0);
    SphereTarget S(2, 1.0);
    std::vector<double> b(m, 0.0);
    b[0] = 1.0;
    if (m > 1) b[1] = -0.5;
    MapField phi = bump_map(G, S, 0.4, 4.0, b);
    DomainMetric gm = DomainMetric::flat(G);
    CutoffProfile eta(R, fam);
    auto full = pohozaev_full(gm, phi, eta, mode);
    const auto& rep = full.report;
    std::printf("N=%3d res=%.6g max=%.6g rel=%.6g lhs=%.9g corr=%.9g\n", N,
                rep.residual, rep.max_term, rep.relative, rep.lhs, rep.correction);
    if (N == Ns.back()) {
      for (int r = 0; r < 4; ++r) std::printf("  H%d=%.9g", r + 1, rep.H[r]);
      std::printf("\n");
      for (int r = 0; r < 6; ++r) std::printf("  J%d=%.9g", r + 1, rep.J[r]);
      std::printf("\n");
      double hs = 0, js = 0;
      for (int r = 0; r < 4; ++r) hs += rep.H[r];
      for (int r = 0; r < 6; ++r) js += rep.J[r];
      std::printf("  sum(H)=%.9g sum(J)=%.9g H+J=%.9g rhs=%.9g\n", hs, js, hs + js,
                  rep.rhs);
      for (const auto& t : rep.terms)
        std::printf("    % .9g  %s\n", t.second, t.first.c_str());
    }
    double worst = 0.0;
    std::string wname;
    for (const auto& s : full.steps)
      if (s.relative > worst) { worst = s.relative; wname = s.name; }
    std::printf("     ledger worst %-24s rel=%.6g\n", wname.c_str(), worst);
    for (const auto& s : full.steps)
      std::printf("       %-26s lhs=%.9g rhs=%.9g rel=%.3g\n", s.name.c_str(), s.lhs,
                  s.rhs, s.relative);
    prev_res.push_back(rep.relative);
  }
  if (prev_res.size() >= 2) {
    for (std::size_t i = 1; i < prev_res.size(); ++i) {
      double rate = std::log(prev_res[i - 1] / prev_res[i]) /
                    std::log((double)Ns[i] / Ns[i - 1]);
      std::printf("  order %d->%d: %.3g\n", Ns[i - 1], Ns[i], rate);
    }
  }
}

static void pohozaev_param_sweep() {
  std::printf("== pohozaev N=96 R sweep (m=2 fourth poly17 amp=0.4 bs=0.5) ==\n");
  for (double R : {1.9, 2.0, 2.1, 2.2, 2.3}) {
    int N = 96, m = 2;
    std::vector<double> L(m, 10.0);
    std::vector<int> res(m, N);
    DomainGrid G(m, L, res, GridMode::compact_support, DerivScheme::fd6, 4.0);
    SphereTarget S(2, 1.0);
    std::vector<double> b = {1.0, -0.5};
    MapField phi = bump_map(G, S, 0.4, 4.0, b);
    DomainMetric gm = DomainMetric::flat(G);
    CutoffProfile eta(R, CutoffFamily::poly17);
    auto full = pohozaev_full(gm, phi, eta, StressLaw::fourth);
    double j3 = 0, j5 = 0, h2 = 0, h3 = 0;
    for (const auto& s : full.steps) {
      if (s.name == "ibp_J3") j3 = s.relative;
      if (s.name == "ibp_J5") j5 = s.relative;
      if (s.name == "ibp_H2") h2 = s.relative;
      if (s.name == "ibp_H3") h3 = s.relative;
    }
    std::printf("R=%.3f rel=%.3e J3=%.3e J5=%.3e H2=%.3e H3=%.3e\n", R,
                full.report.relative, j3, j5, h2, h3);
  }
}

static void pohozaev_special_cases() {
  std::printf("== pohozaev special cases ==\n");
  int m = 2;
  std::vector<double> L(m, 10.0);
  std::vector<int> res(m, 64);
  DomainGrid G(m, L, res, GridMode::compact_support, DerivScheme::fd6, 2.0);
  SphereTarget S(2, 1.0);
  DomainMetric gm = DomainMetric::flat(G);
  CutoffProfile eta(1.25);
  {
    MapField phi = constant_map(G, S);
    auto rep = pohozaev_report(gm, phi, eta, StressLaw::fourth);
    std::printf("constant map: lhs=%g rhs=%g corr=%g res=%g max=%g\n", rep.lhs,
                rep.rhs, rep.correction, rep.residual, rep.max_term);
  }
  {
    MapField phi = geodesic_bump_map(G, S, {0.6, 0.3}, 1.8, 2.4);
    auto rep = pohozaev_report(gm, phi, eta, StressLaw::fourth);
    std::printf("geodesic bump R=1.25 inside harmonic-zone? corr=%.6g max=%.6g rel(corr/max)=%.3g res rel=%.3g\n",
                rep.correction, rep.max_term,
                std::fabs(rep.correction) / rep.max_term, rep.relative);
  }
  {
    EuclideanTarget T(2);
    MapField phi = random_fourier_map(G, T, 41, 2, 0.5);
    auto full = pohozaev_full(gm, phi, eta, StressLaw::es);
    std::printf("flat target es: res=%g rel=%.3g\n", full.report.residual,
                full.report.relative);
    for (const auto& s : full.steps)
      if (s.name.find("curv") != std::string::npos ||
          s.name.find("hat") != std::string::npos)
        std::printf("  %-26s lhs=%g rhs=%g scale=%g\n", s.name.c_str(), s.lhs, s.rhs,
                    s.scale);
  }
}

int main(int argc, char** argv) {
  std::string what = argc > 1 ? argv[1] : "all";
  if (what == "cutoff" || what == "all") cutoff_measurements();
  if (what == "mapvar" || what == "all") map_variation_measurements();
  if (what == "metvar" || what == "all") metric_variation_measurements();
  if (what == "poho2" || what == "all") {
    pohozaev_measurements(2, {48, 64, 96}, StressLaw::fourth, CutoffFamily::poly17);
    pohozaev_measurements(2, {48, 64, 96}, StressLaw::es, CutoffFamily::poly17);
  }
  if (what == "poho2r")
    pohozaev_measurements(2, {48, 64, 96}, StressLaw::fourth, CutoffFamily::poly17,
                          2.0);
  if (what == "poho2p")
    pohozaev_measurements(2, {48, 64, 96}, StressLaw::fourth, CutoffFamily::poly9);
  if (what == "poho1")
    pohozaev_measurements(1, {64, 96, 128}, StressLaw::fourth, CutoffFamily::mollified);
  if (what == "poho3")
    pohozaev_measurements(3, {32, 48}, StressLaw::fourth, CutoffFamily::mollified);
  if (what == "sweep") pohozaev_param_sweep();
  if (what == "special" || what == "all") pohozaev_special_cases();
  return 0;
}
