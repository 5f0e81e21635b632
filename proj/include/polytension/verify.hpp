#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "polytension/stress.hpp"

namespace polytension {

// Independent certification layer: finite-difference first variations (in the
// map and in the domain metric) against the closed-form tension/stress
// pairings, radial cutoff profiles with scale-invariant derivative bounds,
// and the cutoff-weighted integral identity harness with its per-step
// integration-by-parts ledger.

enum class CutoffFamily { poly9, poly17, mollified };
CutoffFamily cutoff_family_from_string(const std::string& s);
std::string cutoff_family_to_string(CutoffFamily f);

// Radial cutoff eta(r): 1 on [0, R], 0 on [2R, inf), transition s((r-R)/R) on
// the band. poly9 uses the degree-9 smoothstep (four vanishing derivatives at
// both seams, so eta is C^4 globally); poly17 the degree-17 smoothstep (eight
// vanishing derivatives: with eta'''' appearing as a quadrature weight, seam
// kinks enter only at the sixth derivative of the integrand, so the identity
// harness keeps its full discretization order); mollified the C-infinity
// bridge f(u)/(f(u)+f(1-u)) with f = exp(-1/u). Since the transition is a
// fixed shape in u = (r-R)/R, sup_r |eta^(l)| R^l depends only on the family;
// for R a power of two the measured bounds agree bitwise across R.
class CutoffProfile {
 public:
  explicit CutoffProfile(double R, CutoffFamily family = CutoffFamily::poly9);

  double R() const { return R_; }
  CutoffFamily family() const { return fam_; }

  // l-th derivative of eta at r, l in 0..4. Exactly zero off the open
  // transition band for l >= 1 (and exactly 1 resp. 0 on the plateaus).
  double eval(double r, int l) const;
  double operator()(double r) const { return eval(r, 0); }

  // measured sup_r |eta^(l)(r)| * R^l for l in 1..4, taken over a dense
  // sample of the transition band at construction.
  double bound(int l) const;

 private:
  double R_;
  CutoffFamily fam_;
  std::array<double, 5> c_{};
};

// Energies whose first variation is paired against the matching tension
// field: dirichlet = int |dphi|^2, e2 = int |tau|^2, e3 = int |grad tau|^2,
// e4 = int |Lap tau|^2, e5 = int |grad Lap tau|^2, e4es = e4 + Ehat.
enum class EnergyKind { dirichlet, e2, e3, e4, e5, e4es };
EnergyKind energy_kind_from_string(const std::string& s);
std::string energy_kind_to_string(EnergyKind k);

// Single normalization constant linking every first variation to its tension
// field: d/dt E(phi + tV) = kVariation * int <tau_kind, V>. Calibrated once
// on the flat-target quadratic case and frozen; a per-energy constant would
// mask sign errors, so the same value is asserted for all kinds.
inline constexpr double kVariation = -2.0;

// Result of one finite-difference variation check. d_t and d_half are the
// central differences at steps t and t/2, extrapolated the Richardson
// combination (4 d_half - d_t) / 3, pairing the closed-form side. For the
// pointwise tension check the three d-fields hold sup norms of the
// corresponding difference fields instead (see that op's comment).
struct VariationReport {
  std::string kind;
  double t = 0.0;           // base step actually used after any shrinking
  int shrinks = 0;          // times t was halved to stay admissible
  double d_t = 0.0;
  double d_half = 0.0;
  double extrapolated = 0.0;
  double pairing = 0.0;
  double relative = 0.0;    // |extrapolated - pairing| / max(|both|, tiny)
};

// First variation in the map along the order-0 section V (chart-linear
// update phi + tV): compares the extrapolated difference quotient of the
// requested energy against kVariation * int <tau_kind, V> dV. If phi + tV
// leaves the chart, t shrinks and the whole stencil is retried; persistent
// failure raises NumericalError. t0 = 0 picks 1e-3 * field scale.
VariationReport map_variation_check(const DomainMetric& gm, const MapField& phi,
                                    const BundleTensor& V, EnergyKind kind,
                                    double t0 = 0.0);

// Which energy the domain-metric variation differentiates and which stress
// tensor it is paired against: e4hat -> S4_hat, e4es -> S4_ES.
enum class MetricEnergy { e4hat, e4es };

// First variation in the domain metric g_t = g + t omega. Every evaluation
// rebuilds the metric bundle from the perturbed field (volume element,
// inverse, Christoffels), so the derivative sees the full metric dependence.
// Compared against int <S, omega> dV_g with both indices raised by the base
// metric. Steps where g_t loses positivity shrink t.
VariationReport metric_variation_check(const DomainMetric& gm, const MapField& phi,
                                       const SymTensorField& omega,
                                       MetricEnergy which, double t0 = 0.0);

// d tau / dt under g_t = g + t omega against the closed form
//   -omega^{ij} (nabla dphi)_{ij} - (div omega)^k dphi(e_k)
//   + 1/2 (grad Tr omega)^k dphi(e_k),
// all indices raised and the divergence taken with the base metric. Reported
// pointwise: d_t / d_half / extrapolated are sup |fd - closed| at the two
// steps and after extrapolation, pairing is sup |closed|, relative their
// ratio.
VariationReport tension_metric_variation_check(const DomainMetric& gm,
                                               const MapField& phi,
                                               const SymTensorField& omega,
                                               double t0 = 0.0);

// Radial identity harness on compact-support flat boxes. Pairing the field
// Y = x eta(r) against div S splits the weighted stress contraction into a
// trace part (H1..H4) and a radial part (J1..J6); repeated integration by
// parts reassembles them into
//   (4 - m/2) int eta |Lap tau|^2 = RHS(eta', eta'', eta''', eta'''')
// plus, in es mode, the curvature extras. Inputs need not be critical: the
// correction -int <tau_mode, dphi(Y)> (from div S = -<tau, dphi>) converts
// the critical-point identity into an all-maps identity, so
// residual = lhs - rhs - correction -> 0 at the discretization order.
// Radial weight factors x_i x_j / r are evaluated only where eta'(r) != 0
// (they vanish with it), which also guards r = 0 inside the plateau.
struct PohozaevReport {
  StressLaw mode = StressLaw::fourth;
  double R = 0.0;
  std::array<double, 4> H{};       // trace part, in the fixed split below
  std::array<double, 6> J{};       // radial part
  double es_trace_extra = 0.0;     // (m/4 - 2) int eta |W|^2        (es mode)
  double es_radial_extra = 0.0;    // 1/4 int eta' r |W|^2           (es mode)
  double lhs = 0.0;                // (4 - m/2) int eta |Lap tau|^2
  double rhs = 0.0;                // assembled right side (es extras included)
  double correction = 0.0;         // -int <tau_mode, dphi(Y)>
  double residual = 0.0;           // lhs - rhs - correction
  double max_term = 0.0;           // largest |value| among all pieces
  double relative = 0.0;           // |residual| / max_term
  bool prefactor_zero = false;     // m == 8: both lhs prefactors vanish
  std::vector<std::pair<std::string, double>> terms;  // every named integral
  std::string notes;               // conventions fixed by this implementation
};

PohozaevReport pohozaev_report(const DomainMetric& gm, const MapField& phi,
                               const CutoffProfile& eta, StressLaw mode);

// One manipulation of the derivation checked as stated: both sides evaluated
// as independent quadratures. scale is the largest |summand| entering either
// side, so relative stays meaningful when the sides cancel to zero.
struct IbpStep {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // |lhs - rhs|
  double scale = 0.0;
  double relative = 0.0;
};

// Per-step ledger for the same harness: the two stress-contraction
// decompositions, the H2/H3/H4 and J3/J4/J5/J6 integration-by-parts steps,
// and in es mode the three curvature-term manipulations plus the hat-stress
// decompositions. A failure localizes to a single step of the derivation.
std::vector<IbpStep> ibp_ledger(const DomainMetric& gm, const MapField& phi,
                                const CutoffProfile& eta, StressLaw mode);

// Report and ledger from one pass over the (expensive) derived fields.
struct PohozaevBundle {
  PohozaevReport report;
  std::vector<IbpStep> steps;
};
PohozaevBundle pohozaev_full(const DomainMetric& gm, const MapField& phi,
                             const CutoffProfile& eta, StressLaw mode);

}  // namespace polytension
