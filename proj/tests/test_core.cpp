#include <catch2/catch_amalgamated.hpp>

#include "support/reference.hpp"
#include "uvot/core.hpp"

using namespace uvot;
using refsupport::rng;
using refsupport::urand;

TEST_CASE("VectorModel invariants") {
  CHECK_NOTHROW(VectorModel(3, Cone::Lorentz3));
  CHECK_THROWS(VectorModel(2, Cone::Lorentz3));
  CHECK_THROWS(VectorModel(0));
}

TEST_CASE("Grid2 construction and quadrature") {
  Grid2 g = Grid2::from_extent(0.0, 1.0, 11, -1.0, 1.0, 21);
  CHECK(g.hx == Catch::Approx(0.1));
  CHECK(g.hy == Catch::Approx(0.1));
  CHECK(g.weight() == Catch::Approx(0.01));
  CHECK(g.x(10) == Catch::Approx(1.0));
  CHECK_THROWS(Grid2::from_extent(0.0, 1.0, 1, 0.0, 1.0, 4));
  CHECK_NOTHROW(Grid2(64, 1, 0.5, 1.0));  // 1D problems ride on N x 1 grids
  CHECK_THROWS(Grid2(4, 4, 0.0, 1.0));
}

TEST_CASE("norms on V and V^d") {
  // Rank-one block: Frobenius and operator norms coincide.
  const double v[2] = {0.6, 0.8}, w[2] = {0.28, 0.96};
  double m[4];
  for (int k = 0; k < 2; ++k)
    for (int a = 0; a < 2; ++a) m[k * 2 + a] = v[k] * w[a];
  CHECK(frobenius_norm_vd(m, 2) == Catch::Approx(1.0));
  CHECK(operator_norm_vd(m, 2) == Catch::Approx(1.0));

  // n = 1 block (3,4): rank one again.
  const double m1[2] = {3.0, 4.0};
  CHECK(frobenius_norm_vd(m1, 1) == Catch::Approx(5.0));
  CHECK(operator_norm_vd(m1, 1) == Catch::Approx(5.0));

  // 2x2 identity: Frobenius sqrt(2), operator 1.
  const double id[4] = {1.0, 0.0, 0.0, 1.0};
  CHECK(frobenius_norm_vd(id, 2) == Catch::Approx(std::sqrt(2.0)));
  CHECK(operator_norm_vd(id, 2) == Catch::Approx(1.0));

  // Norm ordering on random blocks: op <= F <= sqrt(2) op.
  rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    std::vector<double> blk(std::size_t(n) * 2);
    for (double& x : blk) x = urand(-2.0, 2.0);
    const double fo = frobenius_norm_vd(blk.data(), n);
    const double op = operator_norm_vd(blk.data(), n);
    CHECK(op <= fo * (1.0 + 1e-12));
    CHECK(fo <= std::sqrt(2.0) * op * (1.0 + 1e-12));
    CHECK(nuclear_norm_vd(blk.data(), n) >= fo * (1.0 - 1e-12));
  }
}

TEST_CASE("pauli lift") {
  Grid2 g(3, 1, 1.0, 1.0);
  SignedSignal2 s(g);
  s.vx = {0.0, 1.0, 3.0};
  s.vz = {0.0, 0.0, 4.0};
  FieldV lifted = lift_pauli(s);
  CHECK(lifted.site(0)[0] == 0.0);
  CHECK(lifted.site(0)[1] == 0.0);
  CHECK(lifted.site(0)[2] == 0.0);
  CHECK(lifted.site(1)[0] == 1.0);
  CHECK(lifted.site(1)[2] == Catch::Approx(1.0));
  CHECK(lifted.site(2)[0] == 3.0);
  CHECK(lifted.site(2)[1] == 4.0);
  CHECK(lifted.site(2)[2] == Catch::Approx(5.0));
  CHECK(in_cone(lifted, Cone::Lorentz3));

  // Exact round trip: the signal components are stored unchanged.
  SignedSignal2 back = unlift_pauli(lifted);
  CHECK(back.vx == s.vx);
  CHECK(back.vz == s.vz);
}

TEST_CASE("tensor lift") {
  Grid2 g(2, 1, 1.0, 1.0);
  SignedSignal2 s(g);
  s.vx = {0.0, 1.0};
  s.vz = {0.0, 0.0};
  FieldV lifted = lift_tensor(s);
  CHECK(lifted.site(1)[0] == 1.0);
  CHECK(lifted.site(1)[1] == 0.0);
  CHECK(lifted.site(1)[2] == 0.0);

  rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    SignedSignal2 a(g), b(g);
    for (int k = 0; k < g.sites(); ++k) {
      a.vx[k] = urand(-3.0, 3.0);
      a.vz[k] = urand(-3.0, 3.0);
      b.vx[k] = -a.vx[k];
      b.vz[k] = -a.vz[k];
    }
    FieldV la = lift_tensor(a), lb = lift_tensor(b);
    CHECK(la.data == lb.data);  // sign invariance
    // PSD by construction: check through the Lorentz coordinates.
    for (int k = 0; k < g.sites(); ++k) {
      double lor[3];
      sym2_to_lorentz(la.site(k), lor);
      CHECK(in_cone(lor, 3, Cone::Lorentz3));
    }
  }
}

TEST_CASE("cone membership") {
  const double axis[3] = {0.0, 0.0, 1.0};
  const double boundary[3] = {1.0, 0.0, 1.0};
  const double outside[3] = {1.0, 0.0, 0.5};
  CHECK(in_cone(axis, 3, Cone::Lorentz3));
  CHECK(in_cone(boundary, 3, Cone::Lorentz3));
  CHECK_FALSE(in_cone(outside, 3, Cone::Lorentz3));
  const double nn[3] = {0.0, 1e-12, 2.0};
  const double neg[3] = {0.0, -1e-3, 2.0};
  CHECK(in_cone(nn, 3, Cone::NonNegOrthant));
  CHECK_FALSE(in_cone(neg, 3, Cone::NonNegOrthant));
}

TEST_CASE("cone closure and self-duality") {
  rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<double> u = refsupport::random_lorentz(2.0);
    const std::vector<double> v = refsupport::random_lorentz(2.0, trial % 3 == 0);
    CHECK(inner_v(u.data(), v.data(), 3) >= -1e-12);  // self-dual sample check
    std::vector<double> sum(3);
    for (int k = 0; k < 3; ++k) sum[k] = u[k] + v[k];
    CHECK(in_cone(sum.data(), 3, Cone::Lorentz3));
    const double cscale = urand(0.0, 5.0);
    std::vector<double> su(3);
    for (int k = 0; k < 3; ++k) su[k] = cscale * u[k];
    CHECK(in_cone(su.data(), 3, Cone::Lorentz3));
  }
  // Orthant: products of nonnegative vectors are nonnegative.
  for (int trial = 0; trial < 1000; ++trial) {
    double u[4], v[4];
    for (int k = 0; k < 4; ++k) {
      u[k] = urand(0.0, 3.0);
      v[k] = urand(0.0, 3.0);
    }
    CHECK(inner_v(u, v, 4) >= 0.0);
  }
}

TEST_CASE("weighted field norms") {
  Grid2 g(4, 3, 0.5, 0.25);
  FieldV u(g, 2);
  u.fill(1.0);
  // |u|_V = sqrt(2) per site, 12 sites, weight 0.125.
  CHECK(xnorm1(u) == Catch::Approx(12 * 0.125 * std::sqrt(2.0)));
  CHECK(xnorm2(u) == Catch::Approx(std::sqrt(12 * 0.125 * 2.0)));
  CHECK(xnorm_inf(u) == Catch::Approx(std::sqrt(2.0)));
  const std::vector<double> mass = total_mass(u);
  CHECK(mass[0] == Catch::Approx(12 * 0.125));
  CHECK(mass[1] == Catch::Approx(12 * 0.125));
}
