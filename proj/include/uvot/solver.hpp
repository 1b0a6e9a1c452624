#pragma once

// SDMM solver for the discrete dual problems
//   q = 1:  max <phi, nu-mu>_X   s.t. |grad phi|_site <= 1, |phi|_site <= lambda
//   q = 2:  max <phi, nu-mu>_X - |phi|^2_{X,2}/(2 lambda)  s.t. |grad phi|_site <= 1
// written as min sum_i f_i(L_i phi) and solved by alternating the
// least-squares phi update (a shifted Poisson solve) with per-block proximal
// steps and multiplier updates. The (2,2) case is routed to the direct
// elliptic solver.

#include "uvot/elliptic.hpp"
#include "uvot/prox.hpp"

namespace uvot {

namespace detail {

struct SdmmOps {
  // Splitting for q = 1: L1 = Id, L2 = grad, L3 = Id/lambda.
  // For q = 2 and balanced mode the third block is absent.
  bool has_block3 = false;
  double lambda = 1.0;
  int q = 1;
  bool balanced = false;
};

inline double data_term(const FieldV& y1, const FieldV& diff, double lambda, int q,
                        bool balanced) {
  // f1(y1); diff = nu - mu.
  double v = -xinner(y1, diff);
  if (q == 2 && !balanced) {
    const double n2 = xnorm2(y1);
    v += n2 * n2 / (2.0 * lambda);
  }
  return v;
}

}  // namespace detail

// Recovers the primal candidate of Remark-4.3 type from the running
// multiplier block z2: sigma = z2/tau, delta = div(z2)/tau + nu - mu, so
// that div(sigma) = mu - nu + delta holds identically.
inline void recover_primal(const FieldVd& z2, double tau, const FieldV& mu, const FieldV& nu,
                           FieldVd& sigma, FieldV& delta) {
  sigma = z2;
  for (double& v : sigma.data) v /= tau;
  delta = div(sigma);
  for (std::size_t k = 0; k < delta.size(); ++k) delta.data[k] += nu.data[k] - mu.data[k];
}

inline SolverResult solve(const TransportProblem& problem, const SolverConfig& config = {}) {
  problem.validate();
  config.validate();
  if (problem.p == 2 && problem.q == 2) return solve_h1(problem);

  const Grid2& g = problem.mu.grid;
  const int n = problem.mu.n;
  const double tau = config.tau;
  const double lambda = problem.lambda;
  const bool balanced = problem.balanced;
  const int q = balanced ? 1 : problem.q;
  const bool block3 = (q == 1 && !balanced);

  // Balanced mode: make the componentwise masses exactly equal so that the
  // divergence constraint is consistent.
  FieldV nu = problem.nu;
  if (balanced) {
    const std::vector<double> mm = total_mass(problem.mu), mn = total_mass(nu);
    for (int k = 0; k < n; ++k) {
      const double corr = (mn[k] - mm[k]) / (g.weight() * g.sites());
      for (int s = 0; s < g.sites(); ++s) nu.site(s)[k] -= corr;
    }
  }
  const FieldV& mu = problem.mu;

  FieldV diff(g, n);  // nu - mu
  for (std::size_t k = 0; k < diff.size(); ++k) diff.data[k] = nu.data[k] - mu.data[k];

  const double shift = block3 ? 1.0 + 1.0 / (lambda * lambda) : 1.0;
  PoissonPlan plan(g, shift);

  FieldV phi(g, n), y1(g, n), z1(g, n), y3, z3, rhs(g, n);
  FieldVd y2(g, n), z2(g, n);
  if (block3) {
    y3 = FieldV(g, n);
    z3 = FieldV(g, n);
  }

  SolverResult res;
  res.sigma = FieldVd(g, n);
  res.delta = FieldV(g, n);

  int iter = 0;
  for (iter = 1; iter <= config.max_iter; ++iter) {
    // phi = (sum L_i^T L_i)^{-1} sum L_i^T (y_i - z_i); with L2 = grad the
    // normal operator is (-div grad + shift I).
    FieldVd w2(g, n);
    for (std::size_t k = 0; k < w2.size(); ++k) w2.data[k] = y2.data[k] - z2.data[k];
    FieldV dw = div(w2);
    for (std::size_t k = 0; k < rhs.size(); ++k) {
      double v = (y1.data[k] - z1.data[k]) - dw.data[k];
      if (block3) v += (y3.data[k] - z3.data[k]) / lambda;
      rhs.data[k] = v;
    }
    phi = poisson_solve(plan, rhs);
    FieldVd gphi = grad(phi);

    // Block 1: data term.
    for (std::size_t k = 0; k < y1.size(); ++k) z1.data[k] += phi.data[k];  // z1 <- L1 phi + z1
    y1 = balanced || q == 1 ? prox_linear(z1, tau, mu, nu) : prox_quadratic(z1, tau, lambda, mu, nu);
    for (std::size_t k = 0; k < z1.size(); ++k) z1.data[k] -= y1.data[k];

    // Block 2: gradient-ball indicator.
    for (std::size_t k = 0; k < y2.size(); ++k) z2.data[k] += gphi.data[k];
    y2 = z2;
    project_ball_vd_inplace(y2, 1.0, problem.vd_norm);
    for (std::size_t k = 0; k < z2.size(); ++k) z2.data[k] -= y2.data[k];

    // Block 3 (q = 1): sup-norm bound |phi| <= lambda through L3 = Id/lambda.
    if (block3) {
      for (std::size_t k = 0; k < y3.size(); ++k) z3.data[k] += phi.data[k] / lambda;
      y3 = z3;
      project_ball_v_inplace(y3, 1.0);
      for (std::size_t k = 0; k < z3.size(); ++k) z3.data[k] -= y3.data[k];
    }

    if (iter == 1 || iter % config.check_every == 0) {
      for (double v : phi.data)
        if (!std::isfinite(v))
          throw std::runtime_error("solve: NaN/Inf detected at iteration " + std::to_string(iter));

      recover_primal(z2, tau, mu, nu, res.sigma, res.delta);
      const double f1 = detail::data_term(y1, diff, lambda, q, balanced);
      double primal = xnorm1(res.sigma, problem.vd_norm);
      if (!balanced) {
        if (q == 1)
          primal += lambda * xnorm1(res.delta);
        else {
          const double d2 = xnorm2(res.delta);
          primal += 0.5 * lambda * d2 * d2;
        }
      }
      double gap;
      if (std::abs(f1) < 1e-14) {
        gap = std::abs(primal + f1);
        res.gap_is_absolute = true;
      } else {
        gap = std::abs(primal + f1) / std::abs(f1);
        res.gap_is_absolute = false;
      }

      // Relative error on the constraints L_i phi = y_i.
      FieldV e1 = phi;
      for (std::size_t k = 0; k < e1.size(); ++k) e1.data[k] -= y1.data[k];
      FieldVd e2 = gphi;
      for (std::size_t k = 0; k < e2.size(); ++k) e2.data[k] -= y2.data[k];
      double num = xnorm2(e1) + xnorm2(e2);
      double den_l = xnorm2(phi) + xnorm2(gphi);
      double den_y = xnorm2(y1) + xnorm2(y2);
      if (block3) {
        FieldV e3 = phi;
        for (std::size_t k = 0; k < e3.size(); ++k) e3.data[k] = phi.data[k] / lambda - y3.data[k];
        num += xnorm2(e3);
        den_l += xnorm2(phi) / lambda;
        den_y += xnorm2(y3);
      }
      const double den = std::max(den_l, den_y);
      const double r = (den > 0.0) ? num / den : 0.0;

      res.gap = gap;
      res.residual = r;
      res.gap_history.emplace_back(iter, gap);
      res.residual_history.emplace_back(iter, r);
      if (std::max(gap, r) <= config.eps) {
        res.converged = true;
        break;
      }
    }
  }
  res.iterations = std::min(iter, config.max_iter);

  res.phi = phi;
  recover_primal(z2, tau, mu, nu, res.sigma, res.delta);
  if (balanced) res.delta.fill(0.0);

  // Dual objective at the final potential.
  res.cost = xinner(phi, diff);
  if (q == 2 && !balanced) {
    const double n2 = xnorm2(phi);
    res.cost -= n2 * n2 / (2.0 * lambda);
  }

  FieldV dv = div(res.sigma);
  for (std::size_t k = 0; k < dv.size(); ++k)
    dv.data[k] -= mu.data[k] - nu.data[k] + res.delta.data[k];
  res.div_residual = xnorm2(dv);
  return res;
}

}  // namespace uvot
