#pragma once

// Closed-form reference costs for transport between two Dirac masses, used
// to validate the grid solvers, plus the rasterizer that turns an instance
// into a grid problem.

#include <algorithm>
#include <array>

#include "uvot/problem.hpp"

namespace uvot {

enum class TwoDeltaVariant { Q1Vector, Q1Scalar, Q2Scalar1D };

struct TwoDeltaInstance {
  std::array<double, 2> x1{0.0, 0.0}, x2{1.0, 0.0};
  std::vector<double> M1, M2;  // V-vectors; scalar variants use size 1
  double lambda = 1.0;
  TwoDeltaVariant variant = TwoDeltaVariant::Q1Scalar;

  double distance() const {
    const double dx = x2[0] - x1[0], dy = x2[1] - x1[1];
    return std::sqrt(dx * dx + dy * dy);
  }
};

struct OracleValue {
  double cost = 0.0;
  std::string branch;
  double a = 0.0, b = 0.0;  // potential heights, q = 2 variant only
};

// Scalar unbalanced q = 1 cost between m1 dirac(x1) and m2 dirac(x2).
// Three-branch formula with gamma = lambda/dist; coincident points return
// the zero-distance limit lambda*|m1-m2|.
inline OracleValue oracle_q1_scalar(double m1, double m2, double dist, double lambda) {
  OracleValue out;
  if (dist == 0.0) {
    out.cost = lambda * std::abs(m1 - m2);
    out.branch = "coincident";
    return out;
  }
  const double gamma = lambda / dist;
  const bool opposite = (m1 > 0 && m2 < 0) || (m1 < 0 && m2 > 0);
  if (gamma <= 0.5 || opposite) {
    out.cost = lambda * (std::abs(m1) + std::abs(m2));
    out.branch = "no_transport";
  } else if ((m2 >= m1 && m1 >= 0) || (0 >= m1 && m1 >= m2)) {
    out.cost = lambda * (std::abs(m2) - std::abs(m1)) + dist * std::abs(m1);
    out.branch = "transport_m1";
  } else {
    out.cost = lambda * (std::abs(m1) - std::abs(m2)) + dist * std::abs(m2);
    out.branch = "transport_m2";
  }
  return out;
}

inline OracleValue oracle_q1_scalar(const TwoDeltaInstance& inst) {
  if (inst.M1.size() != 1 || inst.M2.size() != 1)
    throw std::invalid_argument("oracle_q1_scalar: expects n = 1 masses");
  return oracle_q1_scalar(inst.M1[0], inst.M2[0], inst.distance(), inst.lambda);
}

// Vector-valued unbalanced q = 1 cost. The minimum lies at a vertex of the
// weighted Fermat-Torricelli problem min_C gamma|C-M1| + gamma|C-M2| + |C|
// or in the interior; branch conditions come from vertex optimality
// (0 in the subdifferential):
//   C = 0  iff  <M1,M2>/(|M1||M2|) <= 1/(2 gamma^2) - 1,
//   C = Mi iff  <Mi,Mj-Mi>/(|Mi||Mj-Mi|) >= 1/(2 gamma),
// otherwise the interior closed form applies. Degenerate masses are handled
// first. The scalar formula is recovered exactly for n = 1.
inline OracleValue oracle_q1_vector(const std::vector<double>& M1, const std::vector<double>& M2,
                                    double dist, double lambda) {
  if (M1.size() != M2.size() || M1.empty())
    throw std::invalid_argument("oracle_q1_vector: dimension mismatch");
  const int n = int(M1.size());
  const double n1 = norm_v(M1.data(), n);
  const double n2 = norm_v(M2.data(), n);
  OracleValue out;
  std::vector<double> d(n);
  for (int k = 0; k < n; ++k) d[k] = M1[k] - M2[k];
  const double nd = norm_v(d.data(), n);

  if (dist == 0.0) {
    out.cost = lambda * nd;
    out.branch = "coincident";
    return out;
  }
  if (n2 == 0.0) {
    out.cost = lambda * n1;
    out.branch = "degenerate_m2_zero";
    return out;
  }
  if (n1 == 0.0) {
    out.cost = lambda * n2;
    out.branch = "degenerate_m1_zero";
    return out;
  }
  if (nd == 0.0) {
    out.cost = std::min(2.0 * lambda, dist) * n1;
    out.branch = "degenerate_equal";
    return out;
  }

  const double gamma = lambda / dist;
  const double ip = inner_v(M1.data(), M2.data(), n);
  if (ip / (n1 * n2) <= 0.5 / (gamma * gamma) - 1.0) {
    out.cost = lambda * (n1 + n2);
    out.branch = "no_transport";
    return out;
  }
  // <Mi, Mj - Mi> = ip - |Mi|^2.
  if ((ip - n1 * n1) / (n1 * nd) >= 0.5 / gamma) {
    out.cost = dist * n1 + lambda * nd;
    out.branch = "vertex_m1";
    return out;
  }
  if ((ip - n2 * n2) / (n2 * nd) >= 0.5 / gamma) {
    out.cost = dist * n2 + lambda * nd;
    out.branch = "vertex_m2";
    return out;
  }
  const double cross = std::max(0.0, n1 * n1 * n2 * n2 - ip * ip);
  const double inner = (gamma * gamma - 0.5) * nd * nd + 0.5 * (n1 * n1 + n2 * n2) +
                       std::sqrt(4.0 * gamma * gamma - 1.0) * std::sqrt(cross);
  out.cost = dist * std::sqrt(std::max(0.0, inner));
  out.branch = "interior";
  return out;
}

inline OracleValue oracle_q1_vector(const TwoDeltaInstance& inst) {
  return oracle_q1_vector(inst.M1, inst.M2, inst.distance(), inst.lambda);
}

// One-dimensional q = 2 oracle for nonnegative masses. The optimal potential
// is a difference of hat functions of heights a at x1 and b at x2; returns
// (a, b) and the dual objective value. Assumes m1 >= m2 after an internal
// swap; (a, b) are reported in the caller's order.
inline OracleValue oracle_q2_scalar_1d(double m1, double m2, double dist, double lambda) {
  if (m1 < 0.0 || m2 < 0.0)
    throw std::invalid_argument("oracle_q2_scalar_1d: masses must be nonnegative");
  const bool swapped = m1 < m2;
  if (swapped) std::swap(m1, m2);

  OracleValue out;
  double a, b;
  const double dm = m1 - m2;
  const double root = std::sqrt(m1) + std::sqrt(m2);
  if (root > 0.0 && lambda <= dist * dist / (root * root)) {
    a = std::sqrt(lambda * m1);
    b = std::sqrt(lambda * m2);
    out.branch = "separate_hats";
    out.cost = a * m1 + b * m2 - (a * a * a + b * b * b) / (3.0 * lambda);
  } else if (dm > 0.0 && lambda >= dist * dist / dm) {
    a = std::sqrt(lambda * dm);
    b = dist - a;
    out.branch = "dominated";
    out.cost = a * m1 + b * m2 - (a * a * a) / (3.0 * lambda);
  } else {
    a = 0.5 * dist + 0.5 * lambda * dm / dist;
    b = 0.5 * dist - 0.5 * lambda * dm / dist;
    out.branch = "touching_hats";
    out.cost = a * m1 + b * m2 - (a * a * a + b * b * b) / (3.0 * lambda);
  }
  if (m1 == 0.0 && m2 == 0.0) {
    a = b = 0.0;
    out.cost = 0.0;
    out.branch = "zero";
  }
  out.a = swapped ? b : a;
  out.b = swapped ? a : b;
  return out;
}

inline OracleValue oracle_q2_scalar_1d(const TwoDeltaInstance& inst) {
  if (inst.M1.size() != 1 || inst.M2.size() != 1)
    throw std::invalid_argument("oracle_q2_scalar_1d: expects n = 1 masses");
  return oracle_q2_scalar_1d(inst.M1[0], inst.M2[0], inst.distance(), inst.lambda);
}

// Deposits the two point masses on the nearest grid nodes, scaled by
// 1/(hx hy) so the h-weighted total mass equals M exactly.
inline TransportProblem rasterize_two_delta(const TwoDeltaInstance& inst, const Grid2& grid) {
  const int n = int(inst.M1.size());
  if (int(inst.M2.size()) != n || n < 1)
    throw std::invalid_argument("rasterize_two_delta: mass dimension mismatch");

  auto nearest = [&grid](const std::array<double, 2>& x) {
    const double fx = (x[0] - grid.ax) / grid.hx;
    const double fy = (x[1] - grid.ay) / grid.hy;
    if (fx < -1e-9 || fx > grid.nx - 1 + 1e-9 || fy < -1e-9 || fy > grid.ny - 1 + 1e-9)
      throw std::invalid_argument("rasterize_two_delta: point outside the grid domain");
    const int i = std::clamp(int(std::lround(fx)), 0, grid.nx - 1);
    const int j = std::clamp(int(std::lround(fy)), 0, grid.ny - 1);
    return grid.site(i, j);
  };

  TransportProblem pb;
  pb.mu = FieldV(grid, n);
  pb.nu = FieldV(grid, n);
  const double scale = 1.0 / grid.weight();
  const int s1 = nearest(inst.x1), s2 = nearest(inst.x2);
  for (int k = 0; k < n; ++k) {
    pb.mu.site(s1)[k] += inst.M1[k] * scale;
    pb.nu.site(s2)[k] += inst.M2[k] * scale;
  }
  pb.lambda = inst.lambda;
  pb.p = 1;
  pb.q = (inst.variant == TwoDeltaVariant::Q2Scalar1D) ? 2 : 1;
  return pb;
}

}  // namespace uvot
