#pragma once

// Direct solver for the (p,q) = (2,2) case. The dual problem
//   max <phi, nu-mu>_X - |phi|^2_{X,2}/(2 lambda) - |grad phi|^2_{X^d,2}/2
// is smooth and strictly concave; its optimality condition is the shifted
// Poisson equation (-div grad + 1/lambda) phi = nu - mu, solved spectrally
// and decoupled over the components of V.

#include "uvot/calculus.hpp"
#include "uvot/problem.hpp"

namespace uvot {

inline SolverResult solve_h1(const TransportProblem& pb) {
  pb.validate();
  if (pb.p != 2 || pb.q != 2)
    throw std::invalid_argument("solve_h1: expects (p,q) = (2,2)");

  FieldV rhs(pb.mu.grid, pb.mu.n);
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs.data[k] = pb.nu.data[k] - pb.mu.data[k];

  PoissonPlan plan(pb.mu.grid, 1.0 / pb.lambda);
  SolverResult res;
  res.phi = poisson_solve(plan, rhs);
  res.sigma = grad(res.phi);
  res.delta = res.phi;
  for (double& v : res.delta.data) v /= pb.lambda;

  const double quad_v = xnorm2(res.phi);
  const double quad_vd = xnorm2(res.sigma);
  res.cost = xinner(res.phi, rhs) - quad_v * quad_v / (2.0 * pb.lambda) - 0.5 * quad_vd * quad_vd;

  // Elliptic residual, relative to the data.
  FieldV lap = laplacian(res.phi);
  FieldV er(pb.mu.grid, pb.mu.n);
  for (std::size_t k = 0; k < er.size(); ++k)
    er.data[k] = -lap.data[k] + res.phi.data[k] / pb.lambda - rhs.data[k];
  const double rhs_norm = xnorm2(rhs);
  res.residual = (rhs_norm > 0.0) ? xnorm2(er) / rhs_norm : xnorm2(er);

  // div(sigma) - (mu - nu + delta) for the reported primal pair.
  FieldV dv = div(res.sigma);
  for (std::size_t k = 0; k < dv.size(); ++k)
    dv.data[k] -= pb.mu.data[k] - pb.nu.data[k] + res.delta.data[k];
  res.div_residual = xnorm2(dv);

  res.iterations = 1;
  res.converged = true;
  res.gap = 0.0;
  return res;
}

}  // namespace uvot
