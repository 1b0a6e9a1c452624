#pragma once

// Discrete differential operators on the uniform grid and the spectral
// solver for the shifted Neumann Laplacian.
//
// The gradient is the forward difference with the zero-padding convention on
// the last row/column; the divergence is its exact negative adjoint under
// the hx*hy-weighted inner products. The composition div(grad(.)) is then
// the standard 5-point Neumann Laplacian, diagonalized per axis by the
// type-II discrete cosine transform.

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

#include "uvot/core.hpp"

namespace uvot {

// (grad u)_{i,j} = ((u_{i+1,j}-u_{i,j})/hx, (u_{i,j+1}-u_{i,j})/hy), with
// zero differences past the last row/column.
inline FieldVd grad(const FieldV& u) {
  FieldVd w(u.grid, u.n);
  const int nx = u.grid.nx, ny = u.grid.ny, n = u.n;
  const double ihx = 1.0 / u.grid.hx, ihy = 1.0 / u.grid.hy;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int s = j * nx + i;
      const double* us = u.site(s);
      const double* ux = (i + 1 < nx) ? u.site(s + 1) : us;
      const double* uy = (j + 1 < ny) ? u.site(s + nx) : us;
      double* ws = w.site(s);
      for (int k = 0; k < n; ++k) {
        ws[k * kDim + 0] = (ux[k] - us[k]) * ihx;
        ws[k * kDim + 1] = (uy[k] - us[k]) * ihy;
      }
    }
  }
  return w;
}

// Negative adjoint of grad: <div w, u>_X = -<w, grad u>_{X^d} exactly.
// Backward differences; the stored values at i = nx-1 (x-axis) and j = ny-1
// (y-axis) do not enter grad's range and are treated as zero.
inline FieldV div(const FieldVd& w) {
  FieldV u(w.grid, w.n);
  const int nx = w.grid.nx, ny = w.grid.ny, n = w.n;
  const double ihx = 1.0 / w.grid.hx, ihy = 1.0 / w.grid.hy;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int s = j * nx + i;
      double* us = u.site(s);
      const double* ws = w.site(s);
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        const double wx = (i + 1 < nx) ? ws[k * kDim + 0] : 0.0;
        const double wy = (j + 1 < ny) ? ws[k * kDim + 1] : 0.0;
        acc += wx * ihx;
        acc += wy * ihy;
        if (i > 0) acc -= w.site(s - 1)[k * kDim + 0] * ihx;
        if (j > 0) acc -= w.site(s - nx)[k * kDim + 1] * ihy;
        us[k] = acc;
      }
    }
  }
  return u;
}

// div(grad(u)): symmetric, negative semi-definite, kernel = constants.
inline FieldV laplacian(const FieldV& u) { return div(grad(u)); }

namespace detail {
// FFTW planning is not thread-safe; execution through the new-array API is.
inline std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

// Reusable spectral factorization of (-div grad + c I) on a grid.
//
// Eigenvalues of the one-dimensional operator are (4/h^2) sin^2(pi k / 2N)
// in the DCT-II basis; the 2D spectrum is the sum over axes. For c = 0 the
// operator is singular on constants and the right-hand side must have zero
// mean per component; the zero mode of the solution is pinned to zero.
class PoissonPlan {
 public:
  PoissonPlan(const Grid2& grid, double shift) : grid_(grid), c_(shift) {
    if (shift < 0.0) throw std::invalid_argument("PoissonPlan: shift must be >= 0");
    const int nx = grid.nx, ny = grid.ny;
    eig_.resize(std::size_t(nx) * ny);
    for (int j = 0; j < ny; ++j) {
      const double sy = (ny > 1) ? std::sin(0.5 * M_PI * j / ny) : 0.0;
      const double ly = 4.0 / (grid.hy * grid.hy) * sy * sy;
      for (int i = 0; i < nx; ++i) {
        const double sx = (nx > 1) ? std::sin(0.5 * M_PI * i / nx) : 0.0;
        const double lx = 4.0 / (grid.hx * grid.hx) * sx * sx;
        eig_[std::size_t(j) * nx + i] = lx + ly;
      }
    }
    buf_ = fftw_alloc_real(std::size_t(nx) * ny);
    if (!buf_) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(detail::fftw_mutex());
    // FFTW is row-major with the first dimension slowest: (ny, nx) matches
    // the site layout s = j*nx + i.
    fwd_ = fftw_plan_r2r_2d(ny, nx, buf_, buf_, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
    inv_ = fftw_plan_r2r_2d(ny, nx, buf_, buf_, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
    if (!fwd_ || !inv_) throw std::runtime_error("PoissonPlan: FFTW planning failed");
  }

  ~PoissonPlan() {
    std::lock_guard<std::mutex> lock(detail::fftw_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (inv_) fftw_destroy_plan(inv_);
    if (buf_) fftw_free(buf_);
  }

  PoissonPlan(const PoissonPlan&) = delete;
  PoissonPlan& operator=(const PoissonPlan&) = delete;

  const Grid2& grid() const { return grid_; }
  double shift() const { return c_; }
  const std::vector<double>& eigenvalues() const { return eig_; }

  // Solves (-div grad + c I) phi = rhs for one scalar component already
  // gathered in `plane` (length nx*ny); result overwrites `plane`.
  void solve_plane(double* plane) const {
    const int ng = grid_.sites();
    const double scale = 1.0 / (4.0 * grid_.nx * grid_.ny);
    for (int s = 0; s < ng; ++s) buf_[s] = plane[s];
    fftw_execute_r2r(fwd_, buf_, buf_);
    if (c_ == 0.0) {
      buf_[0] = 0.0;  // pin the constant mode (zero-mean representative)
      for (int s = 1; s < ng; ++s) buf_[s] /= eig_[s];
    } else {
      for (int s = 0; s < ng; ++s) buf_[s] /= (eig_[s] + c_);
    }
    fftw_execute_r2r(inv_, buf_, buf_);
    for (int s = 0; s < ng; ++s) plane[s] = buf_[s] * scale;
  }

 private:
  Grid2 grid_;
  double c_ = 0.0;
  std::vector<double> eig_;
  double* buf_ = nullptr;
  fftw_plan fwd_ = nullptr, inv_ = nullptr;
};

// Componentwise solve of (-div grad + c I) phi = rhs. With c = 0 the rhs
// must have zero mean per component; the returned solution then has zero
// mean as well.
inline FieldV poisson_solve(const PoissonPlan& plan, const FieldV& rhs) {
  if (!plan.grid().same_shape(rhs.grid))
    throw std::invalid_argument("poisson_solve: grid mismatch");
  const int ng = rhs.grid.sites(), n = rhs.n;
  if (plan.shift() == 0.0) {
    const std::vector<double> mass = total_mass(rhs);
    double abs_sum = 0.0;
    for (double v : rhs.data) abs_sum += std::abs(v);
    abs_sum *= rhs.grid.weight();
    for (int k = 0; k < n; ++k) {
      if (std::abs(mass[k]) > 1e-10 * std::max(1.0, abs_sum))
        throw std::invalid_argument(
            "poisson_solve: c = 0 requires zero-mean rhs, component " + std::to_string(k) +
            " has mass " + std::to_string(mass[k]));
    }
  }
  FieldV phi(rhs.grid, n);
  std::vector<double> plane(ng);
  for (int k = 0; k < n; ++k) {
    for (int s = 0; s < ng; ++s) plane[s] = rhs.site(s)[k];
    plan.solve_plane(plane.data());
    for (int s = 0; s < ng; ++s) phi.site(s)[k] = plane[s];
  }
  return phi;
}

}  // namespace uvot
