#include <catch2/catch_amalgamated.hpp>

#include "support/reference.hpp"
#include "uvot/oracles.hpp"

using namespace uvot;
using refsupport::rng;
using refsupport::urand;

TEST_CASE("scalar q=1 oracle: pinned examples") {
  // Degenerate: m2 = 0.
  CHECK(oracle_q1_scalar(2.0, 0.0, 1.0, 3.0).cost == Catch::Approx(6.0));
  // Opposite signs: always creation/destruction.
  CHECK(oracle_q1_scalar(1.0, -1.0, 0.3, 0.8).cost == Catch::Approx(1.6));
  // gamma <= 1/2 branch: lambda (|m1|+|m2|).
  CHECK(oracle_q1_scalar(1.0, 1.0, 1.0, 0.4).cost == Catch::Approx(0.8));
  // Transport branch: m1=1, m2=2, dist=1, lambda=10 -> 10*(2-1) + 1*1 = 11.
  CHECK(oracle_q1_scalar(1.0, 2.0, 1.0, 10.0).cost == Catch::Approx(11.0));
  // Equal masses, transport wins: min(2*10, 1) * 1 = 1.
  CHECK(oracle_q1_scalar(1.0, 1.0, 1.0, 10.0).cost == Catch::Approx(1.0));
  // Coincident points: pure imbalance.
  CHECK(oracle_q1_scalar(3.0, 1.0, 0.0, 2.0).cost == Catch::Approx(4.0));
}

TEST_CASE("vector q=1 oracle: pinned examples") {
  const std::vector<double> M{0.3, -0.4, 1.2};
  const double nM = norm_v(M.data(), 3);
  CHECK(oracle_q1_vector(M, {0, 0, 0}, 1.0, 2.5).cost == Catch::Approx(2.5 * nM));
  CHECK(oracle_q1_vector({0, 0, 0}, M, 1.0, 2.5).cost == Catch::Approx(2.5 * nM));
  // M1 = M2: min(2 lambda, dist) |M|.
  CHECK(oracle_q1_vector(M, M, 1.0, 10.0).cost == Catch::Approx(nM));
  CHECK(oracle_q1_vector(M, M, 1.0, 0.2).cost == Catch::Approx(0.4 * nM));
  // Opposite directions: transport never occurs, any lambda.
  std::vector<double> Mneg(M);
  for (double& v : Mneg) v = -v;
  for (double lambda : {0.1, 1.0, 100.0, 1e6})
    CHECK(oracle_q1_vector(M, Mneg, 1.0, lambda).cost == Catch::Approx(2.0 * lambda * nM));
}

namespace {
std::vector<double> random_mass(int n, bool conic) {
  if (conic) return refsupport::random_lorentz(1.5, refsupport::urand(0.0, 1.0) < 0.3);
  std::vector<double> m(static_cast<std::size_t>(n), 0.0);
  for (double& v : m) v = urand(-1.5, 1.5);
  return m;
}
}  // namespace

TEST_CASE("vector q=1 oracle matches the brute-force Fermat-Torricelli value") {
  rng(101);
  int interior_hits = 0, vertex_hits = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const bool conic = trial % 2 == 0;
    std::vector<double> M1 = random_mass(3, conic);
    std::vector<double> M2 = random_mass(3, conic);
    if (trial % 11 == 0) M2 = M1;                       // degenerate equal masses
    if (trial % 13 == 0)                                 // collinear pairs
      for (std::size_t k = 0; k < M2.size(); ++k) M2[k] = 1.7 * M1[k];
    const double dist = urand(0.2, 2.0);
    const double lambda = urand(0.1, 3.0) * dist;

    const OracleValue closed = oracle_q1_vector(M1, M2, dist, lambda);
    const double brute = refsupport::two_delta_bruteforce(M1, M2, dist, lambda);
    INFO("trial " << trial << " branch " << closed.branch);
    CHECK(closed.cost == Catch::Approx(brute).epsilon(1e-6).margin(1e-9));
    if (closed.branch == "interior") ++interior_hits;
    if (closed.branch == "vertex_m1" || closed.branch == "vertex_m2") ++vertex_hits;
  }
  // The sweep must actually exercise the nontrivial branches.
  CHECK(interior_hits > 10);
  CHECK(vertex_hits > 10);
}

TEST_CASE("vector q=1 oracle: symmetry, scalar consistency, lambda monotonicity") {
  rng(102);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> M1 = random_mass(3, trial % 2 == 0);
    std::vector<double> M2 = random_mass(3, trial % 2 == 0);
    const double dist = urand(0.1, 2.0);
    const double lambda = urand(0.05, 2.5) * dist;
    const double ab = oracle_q1_vector(M1, M2, dist, lambda).cost;
    const double ba = oracle_q1_vector(M2, M1, dist, lambda).cost;
    CHECK(ab == Catch::Approx(ba).epsilon(1e-12).margin(1e-12));
  }

  for (int trial = 0; trial < 200; ++trial) {
    const double m1 = urand(0.0, 2.0), m2 = urand(0.0, 2.0);
    const double dist = urand(0.1, 2.0);
    const double lambda = urand(0.05, 2.5) * dist;
    const double vec = oracle_q1_vector({m1}, {m2}, dist, lambda).cost;
    const double scal = oracle_q1_scalar(m1, m2, dist, lambda).cost;
    CHECK(vec == Catch::Approx(scal).epsilon(1e-12).margin(1e-12));
  }

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> M1 = random_mass(3, true);
    std::vector<double> M2 = random_mass(3, true);
    const double dist = urand(0.2, 2.0);
    double prev = -1.0;
    for (double f : {0.05, 0.2, 0.5, 0.8, 1.2, 3.0, 10.0}) {
      const double cost = oracle_q1_vector(M1, M2, dist, f * dist).cost;
      CHECK(cost >= prev - 1e-12);
      prev = cost;
    }
  }
}

TEST_CASE("vector q=1 oracle: continuity across branch boundaries") {
  rng(103);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 120; ++trial) {
    std::vector<double> M1 = random_mass(3, trial % 2 == 0);
    std::vector<double> M2 = random_mass(3, trial % 2 == 1);
    const double n1 = norm_v(M1.data(), 3), n2 = norm_v(M2.data(), 3);
    if (n1 < 1e-6 || n2 < 1e-6) continue;
    std::vector<double> d(3);
    for (int k = 0; k < 3; ++k) d[std::size_t(k)] = M1[std::size_t(k)] - M2[std::size_t(k)];
    const double nd = norm_v(d.data(), 3);
    if (nd < 1e-6) continue;
    const double dist = urand(0.3, 1.5);
    const double ip = inner_v(M1.data(), M2.data(), 3);

    std::vector<double> boundary_gammas;
    const double c0 = ip / (n1 * n2);
    if (c0 > -1.0 + 1e-9) boundary_gammas.push_back(std::sqrt(0.5 / (1.0 + c0)));
    const double c1 = (ip - n1 * n1) / (n1 * nd);
    if (c1 > 1e-9) boundary_gammas.push_back(0.5 / c1);
    const double c2 = (ip - n2 * n2) / (n2 * nd);
    if (c2 > 1e-9) boundary_gammas.push_back(0.5 / c2);

    for (double gb : boundary_gammas) {
      if (!(gb > 1e-3 && gb < 1e3)) continue;
      const double lo = oracle_q1_vector(M1, M2, dist, gb * (1.0 - 1e-7) * dist).cost;
      const double hi = oracle_q1_vector(M1, M2, dist, gb * (1.0 + 1e-7) * dist).cost;
      const double scale = std::max({std::abs(lo), std::abs(hi), 1e-12});
      INFO("gamma boundary " << gb);
      CHECK(std::abs(hi - lo) / scale <= 1e-5);
      ++checked;
    }
  }
  CHECK(checked >= 60);
}

TEST_CASE("q=2 1D oracle: pinned example and numeric maximization") {
  const OracleValue ex = oracle_q2_scalar_1d(4.0, 1.0, 10.0, 1.0);
  CHECK(ex.a == Catch::Approx(2.0));
  CHECK(ex.b == Catch::Approx(1.0));
  CHECK(ex.cost == Catch::Approx(6.0));
  CHECK(ex.branch == "separate_hats");

  // Swap symmetry: masses exchanged swap (a, b) and keep the cost.
  const OracleValue sw = oracle_q2_scalar_1d(1.0, 4.0, 10.0, 1.0);
  CHECK(sw.a == Catch::Approx(1.0));
  CHECK(sw.b == Catch::Approx(2.0));
  CHECK(sw.cost == Catch::Approx(6.0));

  rng(104);
  for (int trial = 0; trial < 120; ++trial) {
    const double m1 = urand(0.0, 4.0);
    const double m2 = urand(0.0, m1);
    const double dist = urand(0.3, 5.0);
    const double lambda = urand(0.01, 4.0) * dist * dist / std::max(m1, 0.1);
    const OracleValue got = oracle_q2_scalar_1d(m1, m2, dist, lambda);
    const double ref = refsupport::q2_two_delta_numeric(m1, m2, dist, lambda);
    INFO("m1=" << m1 << " m2=" << m2 << " dist=" << dist << " lambda=" << lambda << " branch "
               << got.branch);
    CHECK(got.cost == Catch::Approx(ref).epsilon(1e-8).margin(1e-8));
  }

  // Monotone nondecreasing in lambda.
  double prev = -1.0;
  for (double lambda : {0.01, 0.1, 0.5, 2.0, 11.0, 11.2, 50.0}) {
    const double c = oracle_q2_scalar_1d(4.0, 1.0, 10.0, lambda).cost;
    CHECK(c >= prev - 1e-12);
    prev = c;
  }
}

TEST_CASE("rasterize_two_delta") {
  Grid2 g(33, 17, 1.0 / 32, 1.0 / 16);
  TwoDeltaInstance inst;
  inst.x1 = {g.x(8), g.y(8)};
  inst.x2 = {0.71, 0.33};  // off-node, snaps to the nearest one
  inst.M1 = {1.0, -2.0, 3.0};
  inst.M2 = {0.5, 0.5, 0.5};
  inst.lambda = 0.7;
  inst.variant = TwoDeltaVariant::Q1Vector;
  TransportProblem pb = rasterize_two_delta(inst, g);
  pb.validate();

  const std::vector<double> mm = total_mass(pb.mu);
  const std::vector<double> mn = total_mass(pb.nu);
  for (int k = 0; k < 3; ++k) {
    CHECK(mm[std::size_t(k)] == Catch::Approx(inst.M1[std::size_t(k)]));
    CHECK(mn[std::size_t(k)] == Catch::Approx(inst.M2[std::size_t(k)]));
  }
  int mu_sites = 0;
  for (int s = 0; s < g.sites(); ++s)
    if (norm_v(pb.mu.site(s), 3) > 0.0) ++mu_sites;
  CHECK(mu_sites == 1);

  TwoDeltaInstance outside = inst;
  outside.x2 = {2.0, 0.2};
  CHECK_THROWS(rasterize_two_delta(outside, g));
}
