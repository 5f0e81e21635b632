#pragma once

#include <cstdint>

#include "polytension/calculus.hpp"
#include "polytension/grid.hpp"

namespace polytension {

// Seeded, band-limited random fields: real Fourier series with per-axis mode
// numbers |k_a| <= kmax, coefficients drawn from a hand-rolled normal
// generator (splitmix64 + Box-Muller) so results are identical across
// platforms. Fields are normalised to unit sup norm and scaled by amplitude.
// kmax must leave the band well resolved: kmax <= min_a res_a / 8.

int max_band_limit(const DomainGrid& grid);

ScalarField random_scalar(const DomainGrid& grid, std::uint64_t seed, int kmax,
                          double amplitude);

// order-0 bundle tensor with n independent random components.
BundleTensor random_section(const DomainGrid& grid, int n, std::uint64_t seed,
                            int kmax, double amplitude);

// Symmetric 2-tensor with independent random components on the upper triangle.
SymTensorField random_sym_tensor(const DomainGrid& grid, std::uint64_t seed,
                                 int kmax, double amplitude);

}  // namespace polytension
