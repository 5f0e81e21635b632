#include "polytension/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace polytension {

int fd_order(DerivScheme s) {
  switch (s) {
    case DerivScheme::spectral: return 0;
    case DerivScheme::fd2: return 2;
    case DerivScheme::fd4: return 4;
    case DerivScheme::fd6: return 6;
    case DerivScheme::fd8: return 8;
  }
  return 0;
}

DerivScheme scheme_from_string(const std::string& s) {
  if (s == "spectral") return DerivScheme::spectral;
  if (s == "fd2") return DerivScheme::fd2;
  if (s == "fd4") return DerivScheme::fd4;
  if (s == "fd6") return DerivScheme::fd6;
  if (s == "fd8") return DerivScheme::fd8;
  throw ConfigError("unknown derivative scheme '" + s + "'");
}

std::string scheme_to_string(DerivScheme s) {
  switch (s) {
    case DerivScheme::spectral: return "spectral";
    case DerivScheme::fd2: return "fd2";
    case DerivScheme::fd4: return "fd4";
    case DerivScheme::fd6: return "fd6";
    case DerivScheme::fd8: return "fd8";
  }
  return "?";
}

DomainGrid::DomainGrid(int dim, std::vector<double> lengths, std::vector<int> res,
                       GridMode mode, DerivScheme scheme, double support_radius,
                       double spectral_cutoff)
    : m_(dim),
      lengths_(std::move(lengths)),
      res_(std::move(res)),
      mode_(mode),
      scheme_(scheme),
      r_supp_(support_radius),
      cutoff_(spectral_cutoff) {
  if (m_ < 1 || m_ > kMaxDim)
    throw ConfigError("grid dim " + std::to_string(m_) + " outside [1," +
                      std::to_string(kMaxDim) + "]");
  if ((int)lengths_.size() != m_ || (int)res_.size() != m_)
    throw ConfigError("grid lengths/res size mismatch with dim");
  for (int a = 0; a < m_; ++a) {
    if (!(lengths_[a] > 0.0)) throw ConfigError("grid length must be positive");
    if (res_[a] < 8) throw ConfigError("grid resolution must be >= 8 per axis");
  }
  if (scheme_ == DerivScheme::spectral && mode_ != GridMode::periodic)
    throw ConfigError("spectral derivatives require a periodic grid");
  if (!(cutoff_ > 0.0) || cutoff_ > 1.0)
    throw ConfigError("spectral_cutoff must lie in (0, 1]");
  if (cutoff_ < 1.0 && scheme_ != DerivScheme::spectral)
    throw ConfigError("spectral_cutoff below 1 requires the spectral scheme");
  if (mode_ == GridMode::compact_support) {
    if (!(r_supp_ > 0.0)) throw ConfigError("compact_support grid needs support_radius > 0");
    // The support ball plus the widest stencil margin must stay inside the box,
    // otherwise constant extension is not justified.
    int half = fd_order(scheme_) / 2;
    for (int a = 0; a < m_; ++a) {
      if (r_supp_ + half * spacing(a) >= 0.5 * lengths_[a])
        throw ConfigError("support_radius + stencil margin exceeds half box length on axis " +
                          std::to_string(a));
    }
  }
  nn_ = 1;
  for (int a = 0; a < m_; ++a) nn_ *= res_[a];
  stride_.assign(m_, 1);
  for (int a = m_ - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * res_[a + 1];
  spectral_D_.resize(m_);
  spectral_Dx_.resize(m_);
}

void DomainGrid::node_coords(long node, double* x) const {
  for (int a = 0; a < m_; ++a) {
    long ia = (node / stride_[a]) % res_[a];
    x[a] = coord(a, (int)ia);
  }
}

void DomainGrid::node_coords(long node, long double* x) const {
  for (int a = 0; a < m_; ++a) {
    long ia = (node / stride_[a]) % res_[a];
    x[a] = coordx(a, (int)ia);
  }
}

long DomainGrid::node_index(const int* idx) const {
  long node = 0;
  for (int a = 0; a < m_; ++a) node += idx[a] * stride_[a];
  return node;
}

double DomainGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < m_; ++a) v *= spacing(a);
  return v;
}

template <class R>
const std::vector<R>& DomainGrid::spectral_matrix(int axis) const {
  auto& D = [&]() -> std::vector<R>& {
    if constexpr (std::is_same_v<R, double>)
      return spectral_D_[axis];
    else
      return spectral_Dx_[axis];
  }();
  if (!D.empty()) return D;
  const int N = res_[axis];
  const R pi = std::acos(R(-1));
  const R scale = 2 * pi / R(lengths_[axis]);
  D.assign((std::size_t)N * N, R(0));
  // Trig-interpolant derivative matrix (cot form for even N, csc for odd N).
  // Antisymmetry is enforced exactly: compute the lower triangle, mirror it.
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < j; ++k) {
      int d = j - k;
      R sgn = (d % 2 == 0) ? R(1) : R(-1);
      R ang = pi * d / N;
      R entry = (N % 2 == 0) ? R(0.5) * sgn / std::tan(ang) : R(0.5) * sgn / std::sin(ang);
      entry *= scale;
      D[(std::size_t)j * N + k] = entry;
      D[(std::size_t)k * N + j] = -entry;
    }
  }

  const int mc = (int)std::floor(cutoff_ * N / 2.0);
  if (mc < N / 2) {
    // Sharp Fourier mask folded into D: D <- F D with the Dirichlet filter
    // kernel f(d) = (1 + 2 sum_{q<=mc} cos(2 pi q d / N)) / N. Row sums of F
    // are 1 and column sums of F D stay 0, so constants are preserved and the
    // discrete integration-by-parts identity survives the mask.
    std::vector<R> f(N);
    for (int d = 0; d < N; ++d) {
      R acc = 1;
      for (int q = 1; q <= mc; ++q) acc += 2 * std::cos(2 * pi * q * d / N);
      f[d] = acc / N;
    }
    std::vector<R> P((std::size_t)N * N, R(0));
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        R acc = 0;
        for (int l = 0; l < N; ++l) {
          int d = j - l; if (d < 0) d += N;
          acc += f[d] * D[(std::size_t)l * N + k];
        }
        P[(std::size_t)j * N + k] = acc;
      }
    // F and D are commuting circulants, so F D is antisymmetric in exact
    // arithmetic; re-enforce it exactly so the mask cannot perturb adjointness.
    for (int j = 0; j < N; ++j) {
      D[(std::size_t)j * N + j] = R(0);
      for (int k = 0; k < j; ++k) {
        R v = (P[(std::size_t)j * N + k] - P[(std::size_t)k * N + j]) / 2;
        D[(std::size_t)j * N + k] = v;
        D[(std::size_t)k * N + j] = -v;
      }
    }
  }
  return D;
}

namespace {

// Centered first-derivative stencil half-coefficient rationals;
// out = sum_p c[p-1]*(f[+p]-f[-p])/h. Evaluated in the working scalar type.
const int kFDNum[4][4] = {{1, 0, 0, 0}, {2, -1, 0, 0}, {3, -3, 1, 0}, {4, -1, 4, -1}};
const int kFDDen[4][4] = {{2, 1, 1, 1}, {3, 12, 1, 1}, {4, 20, 60, 1}, {5, 5, 105, 280}};

template <class R>
void stencil_for(DerivScheme s, R* c, int* half) {
  int row;
  switch (s) {
    case DerivScheme::fd2: row = 0; *half = 1; break;
    case DerivScheme::fd4: row = 1; *half = 2; break;
    case DerivScheme::fd6: row = 2; *half = 3; break;
    case DerivScheme::fd8: row = 3; *half = 4; break;
    default: throw Error("stencil_for called with spectral scheme");
  }
  for (int p = 0; p < *half; ++p) c[p] = R(kFDNum[row][p]) / R(kFDDen[row][p]);
}

}  // namespace

template <class R>
void DomainGrid::partial_impl(const R* in, R* out, int axis, int ncomp) const {
  if (axis < 0 || axis >= m_) throw Error("partial: bad axis");
  const int N = res_[axis];
  const long s = stride_[axis];
  const long nlines = nn_ / N;
  std::vector<R> buf(N), obuf(N);

  const R* D = nullptr;
  R cfd[4];
  int half = 0;
  R invh = R(res_[axis]) / R(lengths_[axis]);
  bool periodic = (mode_ == GridMode::periodic);
  if (scheme_ == DerivScheme::spectral)
    D = spectral_matrix<R>(axis).data();
  else
    stencil_for<R>(scheme_, cfd, &half);

  for (long line = 0; line < nlines; ++line) {
    // Base node of this line: insert i_axis = 0 into the flattened index.
    long outer = line / s;       // combined index of axes before `axis`
    long inner = line % s;       // combined index of axes after `axis`
    long base = outer * (s * N) + inner;
    for (int c = 0; c < ncomp; ++c) {
      const R* src = in + c;
      R* dst = out + c;
      for (int t = 0; t < N; ++t) buf[t] = src[(base + t * s) * ncomp];
      // Accumulate in extended precision: repeated differentiation amplifies
      // the summation residue of each stage by the top resolved wavenumber,
      // and eighth-order cascades cannot afford an eps*||D||_inf injection.
      if (D) {
        for (int j = 0; j < N; ++j) {
          const R* row = D + (std::size_t)j * N;
          long double acc = 0.0L;
          for (int k = 0; k < N; ++k) acc += (long double)row[k] * buf[k];
          obuf[j] = (R)acc;
        }
      } else if (periodic) {
        for (int t = 0; t < N; ++t) {
          long double acc = 0.0L;
          for (int p = 1; p <= half; ++p) {
            int ip = t + p; if (ip >= N) ip -= N;
            int im = t - p; if (im < 0) im += N;
            acc += (long double)cfd[p - 1] * (buf[ip] - buf[im]);
          }
          obuf[t] = (R)(acc * invh);
        }
      } else {
        // Constant extension: clamp indices at the box faces. Fields are
        // constant outside the support ball, so clamped rows see constants.
        for (int t = 0; t < N; ++t) {
          long double acc = 0.0L;
          for (int p = 1; p <= half; ++p) {
            int ip = t + p; if (ip >= N) ip = N - 1;
            int im = t - p; if (im < 0) im = 0;
            acc += (long double)cfd[p - 1] * (buf[ip] - buf[im]);
          }
          obuf[t] = (R)(acc * invh);
        }
      }
      for (int t = 0; t < N; ++t) dst[(base + t * s) * ncomp] = obuf[t];
    }
  }
}

void DomainGrid::partial(const double* in, double* out, int axis, int ncomp) const {
  partial_impl<double>(in, out, axis, ncomp);
}

void DomainGrid::partial(const long double* in, long double* out, int axis,
                         int ncomp) const {
  partial_impl<long double>(in, out, axis, ncomp);
}

std::vector<double> DomainGrid::partial(const std::vector<double>& in, int axis,
                                        int ncomp) const {
  if ((long)in.size() != nn_ * ncomp) throw Error("partial: size mismatch");
  std::vector<double> out(in.size());
  partial(in.data(), out.data(), axis, ncomp);
  return out;
}

std::vector<long double> DomainGrid::partial(const std::vector<long double>& in,
                                             int axis, int ncomp) const {
  if ((long)in.size() != nn_ * ncomp) throw Error("partial: size mismatch");
  std::vector<long double> out(in.size());
  partial(in.data(), out.data(), axis, ncomp);
  return out;
}

double pairwise_sum(const double* a, long n) {
  if (n <= 32) {
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += a[i];
    return s;
  }
  long half = n / 2;
  return pairwise_sum(a, half) + pairwise_sum(a + half, n - half);
}

double pairwise_sum(const std::vector<double>& a) {
  return pairwise_sum(a.data(), (long)a.size());
}

int sym_index(int m, int i, int j) {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle offsets: row i starts at i*m - i*(i-1)/2 - i... keep direct:
  return i * m - i * (i - 1) / 2 + (j - i);
}

namespace {

// Cholesky factorization of a small SPD matrix (row-major m x m). Returns false
// if the matrix is not positive definite.
bool cholesky(int m, const double* A, double* L) {
  for (int i = 0; i < m * m; ++i) L[i] = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = A[i * m + j];
      for (int k = 0; k < j; ++k) s -= L[i * m + k] * L[j * m + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        L[i * m + i] = std::sqrt(s);
      } else {
        L[i * m + j] = s / L[j * m + j];
      }
    }
  }
  return true;
}

// Inverse of SPD matrix via the Cholesky factor; also returns det.
bool spd_inverse(int m, const double* A, double* inv, double* det) {
  double L[kMaxDim * kMaxDim];
  if (!cholesky(m, A, L)) return false;
  double d = 1.0;
  for (int i = 0; i < m; ++i) d *= L[i * m + i];
  *det = d * d;
  // Solve A X = I column by column (forward then backward substitution).
  for (int col = 0; col < m; ++col) {
    double y[kMaxDim];
    for (int i = 0; i < m; ++i) {
      double s = (i == col) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= L[i * m + k] * y[k];
      y[i] = s / L[i * m + i];
    }
    for (int i = m - 1; i >= 0; --i) {
      double s = y[i];
      for (int k = i + 1; k < m; ++k) s -= L[k * m + i] * inv[k * m + col];
      inv[i * m + col] = s / L[i * m + i];
    }
  }
  return true;
}

}  // namespace

DomainMetric DomainMetric::flat(const DomainGrid& grid) {
  DomainMetric g;
  g.grid_ = &grid;
  g.m_ = grid.dim();
  g.flat_ = true;
  return g;
}

DomainMetric DomainMetric::from_field(const DomainGrid& grid, SymTensorField gf) {
  const int m = grid.dim();
  const long nn = grid.nn();
  const int ss = sym_size(m);
  if (gf.m != m || (long)gf.v.size() != nn * ss)
    throw ConfigError("metric field shape mismatch with grid");

  DomainMetric out;
  out.grid_ = &grid;
  out.m_ = m;
  out.flat_ = false;
  out.g_ = std::move(gf);
  out.ginv_.assign((std::size_t)nn * m * m, 0.0);
  out.sqrtdet_.assign(nn, 0.0);

  std::vector<double> A(m * m);
  for (long node = 0; node < nn; ++node) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        A[i * m + j] = out.g_.v[node * ss + sym_index(m, i, j)];
    double det = 0.0;
    if (!spd_inverse(m, A.data(), &out.ginv_[(std::size_t)node * m * m], &det))
      throw NumericalError("domain metric not positive definite at node " +
                           std::to_string(node));
    out.sqrtdet_[node] = std::sqrt(det);
  }

  // Gamma^k_{ij} = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
  std::vector<std::vector<double>> dg(m);  // dg[a] = d_a of all sym components
  for (int a = 0; a < m; ++a) dg[a] = grid.partial(out.g_.v, a, ss);
  out.gamma_.assign((std::size_t)nn * m * ss, 0.0);
  for (long node = 0; node < nn; ++node) {
    const double* gi = &out.ginv_[(std::size_t)node * m * m];
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          double s = 0.0;
          for (int l = 0; l < m; ++l) {
            double dgi_jl = dg[i][node * ss + sym_index(m, j, l)];
            double dgj_il = dg[j][node * ss + sym_index(m, i, l)];
            double dgl_ij = dg[l][node * ss + sym_index(m, i, j)];
            s += gi[k * m + l] * (dgi_jl + dgj_il - dgl_ij);
          }
          out.gamma_[(node * m + k) * ss + sym_index(m, i, j)] = 0.5 * s;
        }
  }
  return out;
}

double integrate(const DomainMetric& metric, const std::vector<double>& f) {
  const DomainGrid& G = metric.grid();
  if ((long)f.size() != G.nn()) throw Error("integrate: field size mismatch");
  const double cell = G.cell_volume();
  std::vector<double> w(f.size());
  for (long i = 0; i < G.nn(); ++i) w[i] = f[i] * metric.sqrtdet_at(i) * cell;
  return pairwise_sum(w);
}

double integrate(const DomainMetric& metric, const ScalarField& f) {
  return integrate(metric, f.v);
}

std::uint64_t fnv1a64(const void* data, std::size_t nbytes) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < nbytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::vector<double>& v) {
  std::uint64_t h = fnv1a64(v.data(), v.size() * sizeof(double));
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
  return std::string(buf);
}

}  // namespace polytension
