#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>

#include "support/reference.hpp"
#include "uvot/elliptic.hpp"

using namespace uvot;
using refsupport::rng;

namespace {

// Dense reference for the (2,2) case: solve the optimality system with LU
// and evaluate the dual objective directly.
double dense_h1_cost(const TransportProblem& pb) {
  const Grid2& g = pb.mu.grid;
  const int ng = g.sites();
  Eigen::MatrixXd A = refsupport::dense_neg_laplacian(g);
  A.diagonal().array() += 1.0 / pb.lambda;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  double cost = 0.0;
  for (int k = 0; k < pb.mu.n; ++k) {
    Eigen::VectorXd rhs(ng);
    for (int s = 0; s < ng; ++s) rhs(s) = pb.nu.site(s)[k] - pb.mu.site(s)[k];
    Eigen::VectorXd phi = lu.solve(rhs);
    FieldV phif(g, 1);
    for (int s = 0; s < ng; ++s) phif.data[std::size_t(s)] = phi(s);
    const double quad_v = xnorm2(phif);
    const double quad_vd = xnorm2(grad(phif));
    double pairing = 0.0;
    for (int s = 0; s < ng; ++s) pairing += phi(s) * rhs(s);
    pairing *= g.weight();
    cost += pairing - quad_v * quad_v / (2.0 * pb.lambda) - 0.5 * quad_vd * quad_vd;
  }
  return cost;
}

}  // namespace

TEST_CASE("solve_h1 basics") {
  Grid2 g(8, 8, 1.0 / 7, 1.0 / 7);
  rng(61);
  TransportProblem pb;
  pb.mu = refsupport::random_field(g, 2, 0.0, 1.0);
  pb.nu = pb.mu;
  pb.lambda = 0.4;
  pb.p = pb.q = 2;
  SolverResult res = solve_h1(pb);
  CHECK(res.cost == Catch::Approx(0.0).margin(1e-14));
  CHECK(xnorm2(res.phi) == Catch::Approx(0.0).margin(1e-14));

  pb.lambda = -1.0;
  CHECK_THROWS(solve_h1(pb));
}

TEST_CASE("solve_h1 matches the dense quadratic oracle") {
  rng(62);
  for (int trial = 0; trial < 5; ++trial) {
    Grid2 g(8, 8, 1.0 / 7, 1.0 / 7);
    TransportProblem pb;
    pb.mu = refsupport::random_field(g, 3, 0.0, 1.0);
    pb.nu = refsupport::random_field(g, 3, 0.0, 1.0);
    pb.lambda = 0.1 + 0.3 * trial;
    pb.p = pb.q = 2;
    SolverResult res = solve_h1(pb);
    const double expect = dense_h1_cost(pb);
    CHECK(res.cost == Catch::Approx(expect).epsilon(1e-9));
    CHECK(res.residual <= 1e-10);
  }
}

TEST_CASE("solve_h1 strong duality: dual cost equals the primal value") {
  Grid2 g(12, 9, 0.09, 0.12);
  rng(63);
  TransportProblem pb;
  pb.mu = refsupport::random_field(g, 2, 0.0, 1.0);
  pb.nu = refsupport::random_field(g, 2, 0.0, 1.0);
  pb.lambda = 0.7;
  pb.p = pb.q = 2;
  SolverResult res = solve_h1(pb);
  // Primal value at (sigma, delta) = (grad phi, phi/lambda):
  // |sigma|^2/2 + (lambda/2)|delta|^2.
  const double s2 = xnorm2(res.sigma);
  const double d2 = xnorm2(res.delta);
  const double primal = 0.5 * s2 * s2 + 0.5 * pb.lambda * d2 * d2;
  CHECK(res.cost == Catch::Approx(primal).epsilon(1e-9));
  // The reported pair satisfies the divergence constraint to solver accuracy.
  CHECK(res.div_residual <= 1e-9 * std::max(1.0, xnorm2(res.delta)));
}

TEST_CASE("solve_h1 decouples over components") {
  Grid2 g(10, 10, 0.1, 0.1);
  rng(64);
  TransportProblem pb;
  pb.mu = refsupport::random_field(g, 3, 0.0, 1.0);
  pb.nu = refsupport::random_field(g, 3, 0.0, 1.0);
  pb.lambda = 0.5;
  pb.p = pb.q = 2;
  SolverResult joint = solve_h1(pb);

  // Permuting the V-components permutes phi identically (bit for bit).
  const int perm[3] = {2, 0, 1};
  TransportProblem pp = pb;
  for (int s = 0; s < g.sites(); ++s)
    for (int k = 0; k < 3; ++k) {
      pp.mu.site(s)[k] = pb.mu.site(s)[perm[k]];
      pp.nu.site(s)[k] = pb.nu.site(s)[perm[k]];
    }
  SolverResult permuted = solve_h1(pp);
  for (int s = 0; s < g.sites(); ++s)
    for (int k = 0; k < 3; ++k)
      CHECK(permuted.phi.site(s)[k] == joint.phi.site(s)[perm[k]]);

  // Solving each component separately reproduces the joint solve bit for bit.
  for (int k = 0; k < 3; ++k) {
    TransportProblem single = pb;
    single.mu = FieldV(g, 1);
    single.nu = FieldV(g, 1);
    for (int s = 0; s < g.sites(); ++s) {
      single.mu.site(s)[0] = pb.mu.site(s)[k];
      single.nu.site(s)[0] = pb.nu.site(s)[k];
    }
    SolverResult one = solve_h1(single);
    for (int s = 0; s < g.sites(); ++s) CHECK(one.phi.site(s)[0] == joint.phi.site(s)[k]);
  }
}

TEST_CASE("solve() routes (2,2) to the elliptic path") {
  Grid2 g(8, 8, 1.0 / 7, 1.0 / 7);
  rng(65);
  TransportProblem pb;
  pb.mu = refsupport::random_field(g, 1, 0.0, 1.0);
  pb.nu = refsupport::random_field(g, 1, 0.0, 1.0);
  pb.lambda = 0.3;
  pb.p = pb.q = 2;
  SolverResult via_solve = solve(pb);
  SolverResult direct = solve_h1(pb);
  CHECK(via_solve.cost == direct.cost);
  CHECK(via_solve.phi.data == direct.phi.data);
}
