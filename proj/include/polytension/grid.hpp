#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "polytension/error.hpp"

namespace polytension {

// Structured grids on flat boxes. Two modes:
//  - periodic: coordinates live on [0, L_a), fields are L_a-periodic per axis.
//  - compact_support: coordinates live on [-L_a/2, L_a/2); fields are constant
//    outside a ball of radius r_supp around the origin, and derivatives close
//    the stencils with constant extension (clamped indices).
// Differentiation is either spectral (trig-interpolant derivative matrices,
// periodic only) or centered finite differences of order 2/4/6/8.

enum class GridMode { periodic, compact_support };

enum class DerivScheme { spectral, fd2, fd4, fd6, fd8 };

int fd_order(DerivScheme s);  // 0 for spectral
DerivScheme scheme_from_string(const std::string& s);
std::string scheme_to_string(DerivScheme s);

constexpr int kMaxDim = 8;

class DomainGrid {
 public:
  // spectral_cutoff in (0,1] applies a sharp Fourier mask to the spectral
  // derivative matrices: modes above floor(cutoff*N/2) are annihilated. This
  // de-aliases products of differentiated fields and caps the wavenumber that
  // amplifies rounding noise through repeated differentiation. 1.0 = off.
  DomainGrid(int dim, std::vector<double> lengths, std::vector<int> res,
             GridMode mode, DerivScheme scheme, double support_radius = 0.0,
             double spectral_cutoff = 1.0);

  int dim() const { return m_; }
  GridMode mode() const { return mode_; }
  DerivScheme scheme() const { return scheme_; }
  double length(int a) const { return lengths_[a]; }
  int res(int a) const { return res_[a]; }
  double spacing(int a) const { return lengths_[a] / res_[a]; }
  double support_radius() const { return r_supp_; }
  double spectral_cutoff() const { return cutoff_; }
  long nn() const { return nn_; }
  long stride(int a) const { return stride_[a]; }

  // Coordinate of node index i_a along axis a.
  double coord(int a, int ia) const {
    return mode_ == GridMode::periodic ? ia * spacing(a)
                                       : -0.5 * lengths_[a] + ia * spacing(a);
  }
  // Extended-precision coordinate (avoids rounding the spacing first); used
  // when sampling maps for the extended-precision pipeline.
  long double coordx(int a, int ia) const {
    long double l = lengths_[a];
    return mode_ == GridMode::periodic ? l * ia / res_[a]
                                       : -0.5L * l + l * ia / res_[a];
  }
  // Full coordinate vector of a flat node index.
  void node_coords(long node, double* x) const;
  void node_coords(long node, long double* x) const;
  long node_index(const int* idx) const;

  // d/dx_a applied to an interleaved array of ncomp components per node.
  // in and out have nn()*ncomp entries laid out [node*ncomp + c]; in == out is
  // not allowed. The long double overload runs the whole cascade in extended
  // precision (matrix entries included), for identities whose double-precision
  // rounding floor exceeds their discretization error.
  void partial(const double* in, double* out, int axis, int ncomp) const;
  void partial(const long double* in, long double* out, int axis, int ncomp) const;
  std::vector<double> partial(const std::vector<double>& in, int axis,
                              int ncomp) const;
  std::vector<long double> partial(const std::vector<long double>& in, int axis,
                                   int ncomp) const;

  // Cell volume (product of spacings).
  double cell_volume() const;

 private:
  int m_;
  std::vector<double> lengths_;
  std::vector<int> res_;
  GridMode mode_;
  DerivScheme scheme_;
  double r_supp_;
  double cutoff_;
  long nn_ = 1;
  std::vector<long> stride_;
  // Per-axis spectral derivative matrices (row-major N x N), built on demand,
  // one cache per scalar type.
  mutable std::vector<std::vector<double>> spectral_D_;
  mutable std::vector<std::vector<long double>> spectral_Dx_;
  template <class R>
  const std::vector<R>& spectral_matrix(int axis) const;
  template <class R>
  void partial_impl(const R* in, R* out, int axis, int ncomp) const;
};

// Deterministic pairwise (cascade) summation. Fixed association order, so the
// result is reproducible bit-for-bit regardless of thread count elsewhere.
double pairwise_sum(const double* a, long n);
double pairwise_sum(const std::vector<double>& a);

// Simple per-node containers. Components are interleaved: v[node*comps + c].
// Templated on the scalar so the extended-precision pipeline can reuse them;
// plain double aliases below are the default working types.
template <class R>
struct ScalarFieldT {
  std::vector<R> v;
};
using ScalarField = ScalarFieldT<double>;

// One value per node and domain axis: v[node*m + i].
template <class R>
struct VectorFieldMT {
  int m = 0;
  std::vector<R> v;
};
using VectorFieldM = VectorFieldMT<double>;

// Symmetric 2-tensor per node, upper triangle stored row-major:
// (0,0),(0,1),...,(0,m-1),(1,1),... Index helper sym_index(m,i,j).
template <class R>
struct SymTensorFieldT {
  int m = 0;
  std::vector<R> v;
};
using SymTensorField = SymTensorFieldT<double>;

inline int sym_size(int m) { return m * (m + 1) / 2; }
int sym_index(int m, int i, int j);

// Domain metric bundle: g_ij, g^{ij}, sqrt(det g), Christoffels
// Gamma^k_{ij} = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
// The flat factory allocates nothing; accessors short-circuit.
class DomainMetric {
 public:
  static DomainMetric flat(const DomainGrid& grid);
  static DomainMetric from_field(const DomainGrid& grid, SymTensorField g);

  const DomainGrid& grid() const { return *grid_; }
  bool is_flat() const { return flat_; }

  double g_at(long node, int i, int j) const {
    return flat_ ? (i == j ? 1.0 : 0.0) : g_.v[node * sym_size(m_) + sym_index(m_, i, j)];
  }
  double ginv_at(long node, int i, int j) const {
    return flat_ ? (i == j ? 1.0 : 0.0) : ginv_[(node * m_ + i) * m_ + j];
  }
  double sqrtdet_at(long node) const { return flat_ ? 1.0 : sqrtdet_[node]; }
  // Gamma^k_{ij}, symmetric in (i,j).
  double gamma_at(long node, int k, int i, int j) const {
    return flat_ ? 0.0 : gamma_[(node * m_ + k) * sym_size(m_) + sym_index(m_, i, j)];
  }

 private:
  const DomainGrid* grid_ = nullptr;
  int m_ = 0;
  bool flat_ = true;
  SymTensorField g_;
  std::vector<double> ginv_;
  std::vector<double> sqrtdet_;
  std::vector<double> gamma_;
};

// Quadrature: sum_nodes f * sqrt(det g) * prod_a h_a with pairwise summation.
double integrate(const DomainMetric& metric, const ScalarField& f);
double integrate(const DomainMetric& metric, const std::vector<double>& f);

// FNV-1a 64-bit over raw bytes; used to fingerprint fields in reports.
std::uint64_t fnv1a64(const void* data, std::size_t nbytes);
std::string hash_hex(const std::vector<double>& v);

}  // namespace polytension
