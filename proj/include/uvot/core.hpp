#pragma once

// Value space V, cones, grids and grid-valued fields for the unbalanced
// vector-valued L1 transport solver.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvot {

enum class Cone { None, NonNegOrthant, Lorentz3 };
enum class VdNorm { Frobenius, Operator };

// Absolute tolerance for cone membership tests.
inline constexpr double kConeTol = 1e-9;

// Spatial dimension of the transport domain is fixed to 2.
inline constexpr int kDim = 2;

// The value space V: dimension n, optional cone, and the norm used on V^d.
struct VectorModel {
  int n = 1;
  Cone cone = Cone::None;
  VdNorm vd_norm = VdNorm::Frobenius;

  VectorModel() = default;
  VectorModel(int n_, Cone cone_ = Cone::None, VdNorm vd_norm_ = VdNorm::Frobenius)
      : n(n_), cone(cone_), vd_norm(vd_norm_) {
    if (n < 1) throw std::invalid_argument("VectorModel: n must be positive");
    if (cone == Cone::Lorentz3 && n != 3)
      throw std::invalid_argument("VectorModel: Lorentz3 cone requires n = 3");
  }
};

// Uniform Cartesian grid on [ax, ax+(nx-1)hx] x [ay, ay+(ny-1)hy].
// The quadrature weight is hx*hy at every site. 1D problems are carried as
// ny = 1 grids with hy acting as a nominal transverse weight.
struct Grid2 {
  int nx = 2, ny = 2;
  double hx = 1.0, hy = 1.0;
  double ax = 0.0, ay = 0.0;

  Grid2() = default;
  Grid2(int nx_, int ny_, double hx_, double hy_, double ax_ = 0.0, double ay_ = 0.0)
      : nx(nx_), ny(ny_), hx(hx_), hy(hy_), ax(ax_), ay(ay_) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("Grid2: need at least one point per axis");
    if (!(hx > 0.0) || !(hy > 0.0)) throw std::invalid_argument("Grid2: mesh sizes must be positive");
  }

  // Grid covering [ax,bx] x [ay,by] with nx, ny points (nx, ny >= 2).
  static Grid2 from_extent(double ax, double bx, int nx, double ay, double by, int ny) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("Grid2::from_extent: nx, ny >= 2 required");
    if (!(bx > ax) || !(by > ay)) throw std::invalid_argument("Grid2::from_extent: empty extent");
    return Grid2(nx, ny, (bx - ax) / (nx - 1), (by - ay) / (ny - 1), ax, ay);
  }

  int sites() const { return nx * ny; }
  double weight() const { return hx * hy; }
  double x(int i) const { return ax + i * hx; }
  double y(int j) const { return ay + j * hy; }
  int site(int i, int j) const { return j * nx + i; }

  bool same_shape(const Grid2& o) const {
    return nx == o.nx && ny == o.ny && hx == o.hx && hy == o.hy && ax == o.ax && ay == o.ay;
  }
};

inline void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::runtime_error(std::string(what) + ": non-finite entry");
}

// Grid function valued in V. Site-major layout: data[site*n + k], with the
// site index s = j*nx + i (x varies fastest).
struct FieldV {
  Grid2 grid;
  int n = 1;
  std::vector<double> data;

  FieldV() = default;
  FieldV(const Grid2& g, int n_) : grid(g), n(n_), data(std::size_t(g.sites()) * n_, 0.0) {
    if (n < 1) throw std::invalid_argument("FieldV: n must be positive");
  }

  double* site(int s) { return data.data() + std::size_t(s) * n; }
  const double* site(int s) const { return data.data() + std::size_t(s) * n; }
  double& at(int i, int j, int k) { return data[std::size_t(grid.site(i, j)) * n + k]; }
  double at(int i, int j, int k) const { return data[std::size_t(grid.site(i, j)) * n + k]; }

  std::size_t size() const { return data.size(); }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// Grid function valued in V^d (d = 2). Per-site block of n*d entries,
// component-major inside the block: data[site*n*d + k*d + axis].
struct FieldVd {
  Grid2 grid;
  int n = 1;
  std::vector<double> data;

  FieldVd() = default;
  FieldVd(const Grid2& g, int n_) : grid(g), n(n_), data(std::size_t(g.sites()) * n_ * kDim, 0.0) {
    if (n < 1) throw std::invalid_argument("FieldVd: n must be positive");
  }

  double* site(int s) { return data.data() + std::size_t(s) * n * kDim; }
  const double* site(int s) const { return data.data() + std::size_t(s) * n * kDim; }
  double& at(int i, int j, int k, int axis) {
    return data[std::size_t(grid.site(i, j)) * n * kDim + std::size_t(k) * kDim + axis];
  }
  double at(int i, int j, int k, int axis) const {
    return data[std::size_t(grid.site(i, j)) * n * kDim + std::size_t(k) * kDim + axis];
  }

  std::size_t size() const { return data.size(); }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// Two-component signed signal on a grid (axis 1 = receiver/space, axis 2 =
// time/space). Scalar per-site components vx, vz share the layout of FieldV
// with n = 1.
struct SignedSignal2 {
  Grid2 grid;
  std::vector<double> vx, vz;

  SignedSignal2() = default;
  explicit SignedSignal2(const Grid2& g)
      : grid(g), vx(std::size_t(g.sites()), 0.0), vz(std::size_t(g.sites()), 0.0) {}
};

// ---------------------------------------------------------------------------
// Pointwise norms on V and V^d.

inline double inner_v(const double* u, const double* v, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += u[k] * v[k];
  return s;
}

inline double norm_v(const double* u, int n) { return std::sqrt(inner_v(u, u, n)); }

// Largest singular value of the d x n block (d = 2), from the eigenvalues of
// the 2x2 Gram matrix M M^T.
inline double operator_norm_vd(const double* m, int n) {
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
  return std::sqrt(std::max(0.0, 0.5 * (tr + disc)));
}

inline double frobenius_norm_vd(const double* m, int n) {
  double s = 0.0;
  for (int k = 0; k < n * kDim; ++k) s += m[k] * m[k];
  return std::sqrt(s);
}

inline double norm_vd(const double* m, int n, VdNorm which) {
  return which == VdNorm::Frobenius ? frobenius_norm_vd(m, n) : operator_norm_vd(m, n);
}

// Nuclear norm (sum of singular values), the dual of the operator norm.
// Used for the flux cost when the gradient constraint is the operator norm.
inline double nuclear_norm_vd(const double* m, int n) {
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
  const double s2 = std::sqrt(std::max(0.0, 0.5 * (tr - disc)));
  return s1 + s2;
}

// Norm of the flux term in the primal objective: dual to the norm used for
// the gradient constraint.
inline double flux_norm_vd(const double* m, int n, VdNorm gradient_norm) {
  return gradient_norm == VdNorm::Frobenius ? frobenius_norm_vd(m, n) : nuclear_norm_vd(m, n);
}

// ---------------------------------------------------------------------------
// Cones.

inline bool in_cone(const double* u, int n, Cone cone, double tol = kConeTol) {
  switch (cone) {
    case Cone::None:
      return true;
    case Cone::NonNegOrthant: {
      for (int k = 0; k < n; ++k)
        if (u[k] < -tol) return false;
      return true;
    }
    case Cone::Lorentz3: {
      assert(n == 3);
      return std::sqrt(u[0] * u[0] + u[1] * u[1]) <= u[2] + tol;
    }
  }
  return false;
}

inline bool in_cone(const FieldV& f, Cone cone, double tol = kConeTol) {
  for (int s = 0; s < f.grid.sites(); ++s)
    if (!in_cone(f.site(s), f.n, cone, tol)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Lifts of signed 2-component signals into cone-valued fields (n = 3).

// Pauli lift in Lorentz coordinates: (vx, vz) -> (vx, vz, sqrt(vx^2+vz^2)).
// Injective on its image; the first two components recover the signal.
inline FieldV lift_pauli(const SignedSignal2& s) {
  FieldV out(s.grid, 3);
  for (int p = 0; p < s.grid.sites(); ++p) {
    const double x = s.vx[p], z = s.vz[p];
    double* o = out.site(p);
    o[0] = x;
    o[1] = z;
    o[2] = std::sqrt(x * x + z * z);
  }
  return out;
}

// Inverse of lift_pauli: drops the cone coordinate.
inline SignedSignal2 unlift_pauli(const FieldV& f) {
  if (f.n != 3) throw std::invalid_argument("unlift_pauli: expected n = 3");
  SignedSignal2 s(f.grid);
  for (int p = 0; p < f.grid.sites(); ++p) {
    s.vx[p] = f.site(p)[0];
    s.vz[p] = f.site(p)[1];
  }
  return s;
}

// Tensor lift v -> v^T v in symmetric-matrix coordinates (vx^2, vx vz, vz^2).
// Positive semi-definite by construction, invariant under v -> -v.
inline FieldV lift_tensor(const SignedSignal2& s) {
  FieldV out(s.grid, 3);
  for (int p = 0; p < s.grid.sites(); ++p) {
    const double x = s.vx[p], z = s.vz[p];
    double* o = out.site(p);
    o[0] = x * x;
    o[1] = x * z;
    o[2] = z * z;
  }
  return out;
}

// Coordinates of a symmetric 2x2 matrix [[a,b],[b,c]] on the Lorentz cone:
// ((a-c)/2, b, (a+c)/2). The isometry constant is normalized to 1.
inline void sym2_to_lorentz(const double* abc, double* out) {
  out[0] = 0.5 * (abc[0] - abc[2]);
  out[1] = abc[1];
  out[2] = 0.5 * (abc[0] + abc[2]);
}

// ---------------------------------------------------------------------------
// Weighted (quadrature) norms and inner products on grid fields.

inline double xinner(const FieldV& u, const FieldV& v) {
  assert(u.size() == v.size());
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u.data[k] * v.data[k];
  return u.grid.weight() * s;
}

inline double xnorm2(const FieldV& u) { return std::sqrt(std::max(0.0, xinner(u, u))); }

inline double xnorm2(const FieldVd& w) {
  double s = 0.0;
  for (double v : w.data) s += v * v;
  return std::sqrt(w.grid.weight() * s);
}

// |u|_{X,p}^p = hx hy sum_site |u_site|_V^p ; returns |u|_{X,p}.
inline double xnorm_p(const FieldV& u, double p) {
  double s = 0.0;
  for (int site = 0; site < u.grid.sites(); ++site) s += std::pow(norm_v(u.site(site), u.n), p);
  return std::pow(u.grid.weight() * s, 1.0 / p);
}

inline double xnorm1(const FieldV& u) {
  double s = 0.0;
  for (int site = 0; site < u.grid.sites(); ++site) s += norm_v(u.site(site), u.n);
  return u.grid.weight() * s;
}

inline double xnorm1(const FieldVd& w, VdNorm gradient_norm = VdNorm::Frobenius) {
  double s = 0.0;
  for (int site = 0; site < w.grid.sites(); ++site)
    s += flux_norm_vd(w.site(site), w.n, gradient_norm);
  return w.grid.weight() * s;
}

inline double xnorm_inf(const FieldV& u) {
  double m = 0.0;
  for (int site = 0; site < u.grid.sites(); ++site) m = std::max(m, norm_v(u.site(site), u.n));
  return m;
}

// Componentwise total mass: hx hy sum_site u_site (one value per component).
inline std::vector<double> total_mass(const FieldV& u) {
  std::vector<double> m(u.n, 0.0);
  for (int site = 0; site < u.grid.sites(); ++site) {
    const double* p = u.site(site);
    for (int k = 0; k < u.n; ++k) m[k] += p[k];
  }
  for (int k = 0; k < u.n; ++k) m[k] *= u.grid.weight();
  return m;
}

}  // namespace uvot
