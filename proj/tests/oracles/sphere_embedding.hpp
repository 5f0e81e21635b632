#pragma once

// Embedding-space oracle for the round sphere S^n(rho) in R^{n+1}, used by the
// tests only. Everything here is derived from the embedding picture (Gauss
// equation, tangent-space projection), independent of the chart-based engine:
// the engine computes in stereographic components, the oracle in ambient
// coordinates, and tests compare after pushing forward.
//
// Chart convention matched to the engine: stereographic projection from the
// north pole (0,...,0,rho), chart origin = south pole,
//   x' = 2 rho^2 y / (|y|^2 + rho^2),  x_{n+1} = rho (|y|^2 - rho^2) / (|y|^2 + rho^2).

#include <cmath>
#include <vector>

namespace oracle {

struct SphereEmbedding {
  int n;       // chart dimension, sphere lives in R^{n+1}
  double rho;  // radius

  // chart point -> ambient point (size n+1)
  std::vector<double> emb(const double* y) const {
    double t = 0.0;
    for (int a = 0; a < n; ++a) t += y[a] * y[a];
    double D = t + rho * rho;
    std::vector<double> x(n + 1);
    for (int i = 0; i < n; ++i) x[i] = 2.0 * rho * rho * y[i] / D;
    x[n] = rho * (t - rho * rho) / D;
    return x;
  }

  // ambient -> chart
  std::vector<double> chart(const double* x) const {
    std::vector<double> y(n);
    double denom = rho - x[n];
    for (int i = 0; i < n; ++i) y[i] = rho * x[i] / denom;
    return y;
  }

  // Jacobian J[i][a] = d emb_i / d y_a, size (n+1) x n, analytic.
  std::vector<double> jacobian(const double* y) const {
    double t = 0.0;
    for (int a = 0; a < n; ++a) t += y[a] * y[a];
    double D = t + rho * rho;
    std::vector<double> J((n + 1) * n);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a)
        J[i * n + a] =
            2.0 * rho * rho * ((i == a ? D : 0.0) - 2.0 * y[i] * y[a]) / (D * D);
    for (int a = 0; a < n; ++a)
      J[n * n + a] = 4.0 * rho * rho * rho * y[a] / (D * D);
    return J;
  }

  // push a chart tangent vector at y to the ambient tangent space
  std::vector<double> push(const double* y, const double* V) const {
    auto J = jacobian(y);
    std::vector<double> out(n + 1, 0.0);
    for (int i = 0; i <= n; ++i)
      for (int a = 0; a < n; ++a) out[i] += J[i * n + a] * V[a];
    return out;
  }

  // pullback metric h_ab = sum_i J_ia J_ib
  std::vector<double> metric(const double* y) const {
    auto J = jacobian(y);
    std::vector<double> h(n * n, 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int i = 0; i <= n; ++i) h[a * n + b] += J[i * n + a] * J[i * n + b];
    return h;
  }

  // Gauss-equation curvature in ambient coordinates:
  // R(X,Y)Z = (1/rho^2) (<Y,Z> X - <X,Z> Y) for embedded tangent vectors.
  std::vector<double> gauss_R(const std::vector<double>& X,
                              const std::vector<double>& Y,
                              const std::vector<double>& Z) const {
    double yz = 0.0, xz = 0.0;
    for (int i = 0; i <= n; ++i) { yz += Y[i] * Z[i]; xz += X[i] * Z[i]; }
    std::vector<double> out(n + 1);
    for (int i = 0; i <= n; ++i)
      out[i] = (yz * X[i] - xz * Y[i]) / (rho * rho);
    return out;
  }

  // Project an ambient vector onto the tangent space at ambient point x.
  std::vector<double> project(const std::vector<double>& x,
                              const std::vector<double>& v) const {
    double dot = 0.0;
    for (int i = 0; i <= n; ++i) dot += x[i] * v[i];
    std::vector<double> out(n + 1);
    for (int i = 0; i <= n; ++i) out[i] = v[i] - dot * x[i] / (rho * rho);
    return out;
  }
};

}  // namespace oracle
