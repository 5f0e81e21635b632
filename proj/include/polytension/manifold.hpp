#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "polytension/error.hpp"

namespace polytension {

// Target manifolds are presented as a single chart: an open set of R^n with a
// smooth Riemannian metric h_{ab}(y). All engine calculus happens in chart
// components. Curvature sign convention:
//   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z,
// components R^a_{bgd} = d_g Gamma^a_{db} - d_d Gamma^a_{gb}
//                        + Gamma^a_{gm} Gamma^m_{db} - Gamma^a_{dm} Gamma^m_{gb},
// so that for the unit sphere R(X,Y)Z = <Y,Z>X - <X,Z>Y (sectional curvature +1).

constexpr int kMaxTargetN = 6;

class ChartTarget {
 public:
  virtual ~ChartTarget() = default;

  int n() const { return n_; }
  virtual std::string name() const = 0;

  // Largest admissible |y|; maps must stay strictly inside.
  virtual double chart_bound() const = 0;
  bool in_domain(const double* y) const;

  // Metric h_{ab}(y), full n x n row-major.
  virtual void metric(const double* y, double* h) const = 0;
  // Christoffels Gamma^a_{bg}(y), layout G[(a*n + b)*n + g], symmetric in (b,g).
  virtual void christoffels(const double* y, double* G) const = 0;

  // Extended-precision chart geometry for the long double pipeline. The
  // defaults round through the double evaluators; closed-form targets
  // override with native extended arithmetic.
  virtual void metric(const long double* y, long double* h) const;
  virtual void christoffels(const long double* y, long double* G) const;
  virtual void curvature(const long double* y, long double* R) const;

  // True if the target is a space form; writes the constant sectional
  // curvature to c. Space forms use the closed-form curvature
  // R(X,Y)Z = c (<Y,Z>X - <X,Z>Y) and have parallel curvature (nabla R = 0).
  virtual bool space_form(double* c) const { (void)c; return false; }

  // Curvature components R^a_{bgd}, layout R[((a*n + b)*n + g)*n + d],
  // antisymmetric in (g,d) by construction.
  virtual void curvature(const double* y, double* R) const;

  // Covariant derivative components (nabla_w R)^a_{bgd},
  // layout DR[(((w*n + a)*n + b)*n + g)*n + d]. Zero for space forms.
  virtual void curvature_grad(const double* y, double* DR) const;

 protected:
  explicit ChartTarget(int n);
  int n_;
};

// Flat R^n. Curvature terms vanish exactly (bitwise zero arrays).
class EuclideanTarget : public ChartTarget {
 public:
  explicit EuclideanTarget(int n);
  std::string name() const override { return "euclidean"; }
  double chart_bound() const override;
  void metric(const double* y, double* h) const override;
  void christoffels(const double* y, double* G) const override;
  void metric(const long double* y, long double* h) const override;
  void christoffels(const long double* y, long double* G) const override;
  bool space_form(double* c) const override { *c = 0.0; return true; }
};

// Round sphere of given radius in the stereographic chart (projection from the
// north pole; the chart origin is the south pole):
//   h_{ab}(y) = 4 rho^4 / (rho^2 + |y|^2)^2 delta_{ab},
//   Gamma^a_{bg} = -(2/(rho^2+|y|^2)) (delta^a_b y_g + delta^a_g y_b - delta_{bg} y^a),
// sectional curvature c = 1/rho^2. Chart bound |y| <= 10 rho.
class SphereTarget : public ChartTarget {
 public:
  SphereTarget(int n, double radius);
  std::string name() const override { return "sphere"; }
  double radius() const { return rho_; }
  double chart_bound() const override { return 10.0 * rho_; }
  void metric(const double* y, double* h) const override;
  void christoffels(const double* y, double* G) const override;
  void metric(const long double* y, long double* h) const override;
  void christoffels(const long double* y, long double* G) const override;
  bool space_form(double* c) const override { *c = 1.0 / (rho_ * rho_); return true; }

 private:
  double rho_;
};

// Hyperbolic space in the Poincare ball chart:
//   h_{ab}(y) = 4 rho^4 / (rho^2 - |y|^2)^2 delta_{ab}, |y| < rho,
// sectional curvature c = -1/rho^2. Chart bound 0.9 rho keeps a margin from
// the ideal boundary.
class HyperbolicTarget : public ChartTarget {
 public:
  HyperbolicTarget(int n, double radius);
  std::string name() const override { return "hyperbolic"; }
  double radius() const { return rho_; }
  double chart_bound() const override { return 0.9 * rho_; }
  void metric(const double* y, double* h) const override;
  void christoffels(const double* y, double* G) const override;
  void metric(const long double* y, long double* h) const override;
  void christoffels(const long double* y, long double* G) const override;
  bool space_form(double* c) const override { *c = -1.0 / (rho_ * rho_); return true; }

 private:
  double rho_;
};

// Arbitrary chart metric supplied as a callback. Christoffels and curvature
// come from centered differences of the metric: h, dh and d2h are differenced
// directly (step kMetricStep, errors O(step^2)) and Gamma, dGamma, R are
// assembled algebraically from them. nabla R differences the assembled R
// components with the larger step kCurvGradStep and adds the four
// Gamma-correction terms of a (1,3)-tensor. This keeps every level at O(1e-6)
// accuracy or better instead of losing a factor 1/step per nesting.
class GenericChartTarget : public ChartTarget {
 public:
  using MetricFn = std::function<void(const double* y, double* h)>;

  static constexpr double kMetricStep = 1e-4;
  static constexpr double kCurvGradStep = 1e-3;

  GenericChartTarget(int n, MetricFn fn, double bound, std::string label = "generic");
  std::string name() const override { return label_; }
  double chart_bound() const override { return bound_; }
  // Unhide the extended-precision defaults (rounding through double is the
  // honest accuracy statement for a differenced chart anyway).
  using ChartTarget::metric;
  using ChartTarget::christoffels;
  using ChartTarget::curvature;
  void metric(const double* y, double* h) const override;
  void christoffels(const double* y, double* G) const override;
  void curvature(const double* y, double* R) const override;
  void curvature_grad(const double* y, double* DR) const override;

 private:
  // Gamma and dGamma at y from differenced h, d2h.
  void gamma_and_grad(const double* y, double* G, double* dG) const;
  void curvature_raw(const double* y, double* R, double* G) const;

  MetricFn fn_;
  double bound_;
  std::string label_;
};

// Dense helpers shared by manifold and tests: inverse of a small SPD matrix.
// Throws NumericalError when not positive definite.
void spd_inverse_small(int n, const double* A, double* inv);

}  // namespace polytension
