#pragma once

// Problem description and result types shared by the SDMM and elliptic
// solvers.

#include <utility>

#include "uvot/core.hpp"

namespace uvot {

// Discrete generalized Beckmann problem between mu and nu:
//   inf (1/p)|sigma|_{X^d,p}^p + (lambda/q)|delta|_{X,q}^q
//   s.t. div(sigma) = mu - nu + delta.
// Supported: (p,q) = (1,1), (1,2) via SDMM, (2,2) via the elliptic system,
// and the balanced variant (p = 1, delta forced to zero).
struct TransportProblem {
  FieldV mu, nu;
  double lambda = 1.0;
  int p = 1, q = 1;
  VdNorm vd_norm = VdNorm::Frobenius;
  bool balanced = false;

  void validate() const {
    if (!mu.grid.same_shape(nu.grid) || mu.n != nu.n)
      throw std::invalid_argument("TransportProblem: mu and nu must share grid and n");
    if (!(lambda > 0.0)) throw std::invalid_argument("TransportProblem: lambda must be positive");
    if ((p != 1 && p != 2) || (q != 1 && q != 2))
      throw std::invalid_argument("TransportProblem: p, q must be in {1,2}");
    if (p == 2 && q == 1)
      throw std::invalid_argument("TransportProblem: (p,q) = (2,1) is not supported");
    if (balanced && p != 1)
      throw std::invalid_argument("TransportProblem: balanced mode requires p = 1");
    if (q == 1 && lambda < 1e-150)
      throw std::invalid_argument("TransportProblem: lambda too small for q = 1 (1/lambda^2 overflows)");
    if (balanced) {
      const std::vector<double> mm = total_mass(mu), mn = total_mass(nu);
      for (int k = 0; k < mu.n; ++k) {
        const double scale = std::max({std::abs(mm[k]), std::abs(mn[k]), 1e-300});
        if (std::abs(mm[k] - mn[k]) > 1e-8 * scale)
          throw std::invalid_argument("TransportProblem: balanced mode requires equal componentwise mass");
      }
    }
  }
};

struct SolverConfig {
  double tau = 0.9;
  double eps = 1e-4;
  int max_iter = 20000;
  int check_every = 10;

  void validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("SolverConfig: tau must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("SolverConfig: eps must be positive");
    if (max_iter < 1 || check_every < 1)
      throw std::invalid_argument("SolverConfig: max_iter and check_every must be positive");
  }
};

struct SolverResult {
  FieldV phi;     // optimal dual potential
  FieldVd sigma;  // recovered flux
  FieldV delta;   // recovered mass imbalance (zero field in balanced mode)
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  double gap = 0.0;       // last duality-gap estimate
  double residual = 0.0;  // last constraint residual
  bool gap_is_absolute = false;  // set on degenerate zero-cost instances
  double div_residual = 0.0;     // |div(sigma) - (mu - nu + delta)|_X, recorded
  std::vector<std::pair<int, double>> gap_history;
  std::vector<std::pair<int, double>> residual_history;
};

// Rescaling rule for lambda when the domain is scaled by L and the measures
// by M: lambda * L for q = 1, lambda * L * M for q = 2.
inline double scale_lambda(double lambda, double length_factor, double mass_factor, int q) {
  if (!(length_factor > 0.0) || !(mass_factor > 0.0))
    throw std::invalid_argument("scale_lambda: factors must be positive");
  return (q == 2) ? lambda * length_factor * mass_factor : lambda * length_factor;
}

}  // namespace uvot
