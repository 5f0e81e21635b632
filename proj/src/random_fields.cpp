#include "polytension/random_fields.hpp"

#include <cmath>

namespace polytension {

namespace {

struct SplitMix64 {
  std::uint64_t s;
  explicit SplitMix64(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() {  // (0,1)
    return ((next() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }
  double normal() {
    double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
};

// One scalar component: sum over modes k in [-kmax,kmax]^m (half-space to
// avoid double counting) of a_k cos(2 pi k.x/L) + b_k sin(...).
void fill_component(const DomainGrid& G, SplitMix64& rng, int kmax, double* out) {
  const int m = G.dim();
  const long nn = G.nn();
  for (long i = 0; i < nn; ++i) out[i] = 0.0;

  int k[kMaxDim];
  for (int a = 0; a < m; ++a) k[a] = -kmax;
  std::vector<double> x(m);
  for (;;) {
    // keep only the closed half-space: first nonzero k positive; skip k = 0.
    int lead = 0;
    for (int a = 0; a < m; ++a) {
      if (k[a] != 0) { lead = k[a]; break; }
    }
    if (lead > 0) {
      double ak = rng.normal(), bk = rng.normal();
      for (long node = 0; node < nn; ++node) {
        G.node_coords(node, x.data());
        double th = 0.0;
        for (int a = 0; a < m; ++a) th += 2.0 * M_PI * k[a] * x[a] / G.length(a);
        out[node] += ak * std::cos(th) + bk * std::sin(th);
      }
    } else if (lead == 0) {
      rng.normal(); rng.normal();  // burn, keeps stream layout stable
    } else {
      rng.normal(); rng.normal();
    }
    int a = m - 1;
    while (a >= 0 && ++k[a] > kmax) { k[a] = -kmax; --a; }
    if (a < 0) break;
  }
}

void normalise(double* v, long len, double amplitude) {
  double mx = 0.0;
  for (long i = 0; i < len; ++i) mx = std::max(mx, std::abs(v[i]));
  if (mx == 0.0) return;
  double s = amplitude / mx;
  for (long i = 0; i < len; ++i) v[i] *= s;
}

}  // namespace

int max_band_limit(const DomainGrid& grid) {
  int nmin = grid.res(0);
  for (int a = 1; a < grid.dim(); ++a) nmin = std::min(nmin, grid.res(a));
  return nmin / 8;
}

ScalarField random_scalar(const DomainGrid& grid, std::uint64_t seed, int kmax,
                          double amplitude) {
  if (kmax < 1 || kmax > max_band_limit(grid))
    throw ConfigError("random field band limit " + std::to_string(kmax) +
                      " outside [1, N/8]");
  ScalarField f;
  f.v.assign(grid.nn(), 0.0);
  SplitMix64 rng(seed);
  fill_component(grid, rng, kmax, f.v.data());
  normalise(f.v.data(), grid.nn(), amplitude);
  return f;
}

BundleTensor random_section(const DomainGrid& grid, int n, std::uint64_t seed,
                            int kmax, double amplitude) {
  if (kmax < 1 || kmax > max_band_limit(grid))
    throw ConfigError("random field band limit " + std::to_string(kmax) +
                      " outside [1, N/8]");
  BundleTensor V;
  V.order = 0;
  V.v.assign((std::size_t)grid.nn() * n, 0.0);
  std::vector<double> comp(grid.nn());
  for (int c = 0; c < n; ++c) {
    SplitMix64 rng(seed * 1000003ull + (std::uint64_t)c);
    fill_component(grid, rng, kmax, comp.data());
    for (long node = 0; node < grid.nn(); ++node) V.v[node * n + c] = comp[node];
  }
  normalise(V.v.data(), (long)V.v.size(), amplitude);
  return V;
}

SymTensorField random_sym_tensor(const DomainGrid& grid, std::uint64_t seed,
                                 int kmax, double amplitude) {
  if (kmax < 1 || kmax > max_band_limit(grid))
    throw ConfigError("random field band limit " + std::to_string(kmax) +
                      " outside [1, N/8]");
  const int m = grid.dim();
  const int ss = sym_size(m);
  SymTensorField w;
  w.m = m;
  w.v.assign((std::size_t)grid.nn() * ss, 0.0);
  std::vector<double> comp(grid.nn());
  for (int c = 0; c < ss; ++c) {
    SplitMix64 rng(seed * 2000003ull + (std::uint64_t)c);
    fill_component(grid, rng, kmax, comp.data());
    for (long node = 0; node < grid.nn(); ++node) w.v[node * ss + c] = comp[node];
  }
  normalise(w.v.data(), (long)w.v.size(), amplitude);
  return w;
}

}  // namespace polytension
