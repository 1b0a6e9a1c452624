#pragma once

// Closed-form proximal steps used by the SDMM iteration: the affine data
// term, its quadratic variant, and pointwise ball projections in V and V^d
// (Frobenius scaling or operator-norm singular value clamping).

#include "uvot/core.hpp"

namespace uvot {

// prox of tau * f1 with f1(u) = -<u, nu - mu>_X : u + tau (nu - mu).
inline FieldV prox_linear(const FieldV& u, double tau, const FieldV& mu, const FieldV& nu) {
  assert(u.size() == mu.size() && u.size() == nu.size());
  FieldV out = u;
  for (std::size_t k = 0; k < out.size(); ++k) out.data[k] += tau * (nu.data[k] - mu.data[k]);
  return out;
}

// prox of tau * f1 with the additional quadratic term |u|^2/(2 lambda):
// (u + tau (nu - mu)) / (1 + tau/lambda).
inline FieldV prox_quadratic(const FieldV& u, double tau, double lambda, const FieldV& mu,
                             const FieldV& nu) {
  assert(u.size() == mu.size() && u.size() == nu.size());
  const double scale = 1.0 / (1.0 + tau / lambda);
  FieldV out = u;
  for (std::size_t k = 0; k < out.size(); ++k)
    out.data[k] = scale * (out.data[k] + tau * (nu.data[k] - mu.data[k]));
  return out;
}

// Per-site projection onto the |.|_V ball of given radius.
inline void project_ball_v_inplace(FieldV& u, double radius) {
  assert(radius > 0.0);
  for (int s = 0; s < u.grid.sites(); ++s) {
    double* p = u.site(s);
    const double nrm = norm_v(p, u.n);
    if (nrm > radius) {
      const double f = radius / nrm;
      for (int k = 0; k < u.n; ++k) p[k] *= f;
    }
  }
}

inline FieldV project_ball_v(const FieldV& u, double radius) {
  FieldV out = u;
  project_ball_v_inplace(out, radius);
  return out;
}

namespace detail {

// Orthogonal projection of the d x n block (d = 2) onto the operator-norm
// ball: clamp singular values at `radius`. Works through the 2x2 Gram matrix
// M M^T; the block is modified in place.
inline void clamp_singular_values(double* m, int n, double radius) {
  double gxx = 0.0, gxy = 0.0, gyy = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = m[k * kDim + 0], b = m[k * kDim + 1];
    gxx += a * a;
    gxy += a * b;
    gyy += b * b;
  }
  const double tr = gxx + gyy;
  const double diff = gxx - gyy;
  const double disc = std::sqrt(std::max(0.0, diff * diff + 4.0 * gxy * gxy));
  const double s1 = std::sqrt(std::max(0.0, 0.5 * (tr + disc)));
  if (s1 <= radius) return;
  const double s2 = std::sqrt(std::max(0.0, 0.5 * (tr - disc)));

  // Nearly isotropic block: both singular values clamp by the same factor.
  if (disc <= 1e-14 * std::max(tr, 1e-300)) {
    const double f = radius / s1;
    for (int k = 0; k < n * kDim; ++k) m[k] *= f;
    return;
  }

  const double f1 = radius / s1;
  const double f2 = (s2 > radius) ? radius / s2 : 1.0;

  // Left singular vectors = eigenvectors of the Gram matrix.
  double u1x, u1y;
  if (std::abs(gxy) > 0.0) {
    const double l1 = 0.5 * (tr + disc);
    u1x = gxy;
    u1y = l1 - gxx;
  } else if (gxx >= gyy) {
    u1x = 1.0;
    u1y = 0.0;
  } else {
    u1x = 0.0;
    u1y = 1.0;
  }
  const double un = std::sqrt(u1x * u1x + u1y * u1y);
  u1x /= un;
  u1y /= un;
  // P = f1 u1 u1^T + f2 u2 u2^T with u2 orthogonal to u1.
  const double pxx = f1 * u1x * u1x + f2 * u1y * u1y;
  const double pxy = (f1 - f2) * u1x * u1y;
  const double pyy = f1 * u1y * u1y + f2 * u1x * u1x;
  for (int k = 0; k < n; ++k) {
    const double a = m[k * kDim + 0], b = m[k * kDim + 1];
    m[k * kDim + 0] = pxx * a + pxy * b;
    m[k * kDim + 1] = pxy * a + pyy * b;
  }
}

}  // namespace detail

// Per-site projection of a V^d field onto the ball of given radius, either
// rescaling by the Frobenius norm or clamping singular values (operator).
inline void project_ball_vd_inplace(FieldVd& w, double radius, VdNorm which) {
  assert(radius > 0.0);
  const int nd = w.n * kDim;
  if (which == VdNorm::Frobenius) {
    for (int s = 0; s < w.grid.sites(); ++s) {
      double* p = w.site(s);
      double sq = 0.0;
      for (int k = 0; k < nd; ++k) sq += p[k] * p[k];
      if (sq > radius * radius) {
        const double f = radius / std::sqrt(sq);
        for (int k = 0; k < nd; ++k) p[k] *= f;
      }
    }
  } else {
    for (int s = 0; s < w.grid.sites(); ++s) detail::clamp_singular_values(w.site(s), w.n, radius);
  }
}

inline FieldVd project_ball_vd(const FieldVd& w, double radius, VdNorm which) {
  FieldVd out = w;
  project_ball_vd_inplace(out, radius, which);
  return out;
}

}  // namespace uvot
