// throwaway t-step sweep for the sphere map variation
#include <cmath>
#include <cstdio>

#include "polytension/catalog.hpp"
#include "polytension/random_fields.hpp"
#include "polytension/verify.hpp"

using namespace polytension;

int main() {
  const double L = 2.0 * std::acos(-1.0);
  for (int N : {32}) {
    DomainGrid G(2, {L, L}, {N, N}, GridMode::periodic, DerivScheme::spectral);
    SphereTarget S(2, 1.0);
    MapField phi = latitude_profile_map(G, S, 1.1, 0.25, 1, 1);
    DomainMetric gm = DomainMetric::flat(G);
    for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
      BundleTensor V = random_section(G, 2, seed, 3, 1.0);
      for (double t0 : {2e-4, 4e-4, 8e-4, 1.6e-3}) {
        auto r4 = map_variation_check(gm, phi, V, EnergyKind::e4, t0);
        auto re = map_variation_check(gm, phi, V, EnergyKind::e4es, t0);
        std::printf("N=%d seed=%llu t0=%.1e rel_e4=%.3g rel_e4es=%.3g\n", N,
                    (unsigned long long)seed, t0, r4.relative, re.relative);
      }
    }
  }
  return 0;
}
