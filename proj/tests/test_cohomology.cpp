#include "common.hpp"

using namespace ddvol;
using namespace ddvol::test;

TEST_CASE("relative cocycle dimensions") {
  CHECK(relative_cocycles<Cyc>(build_cover(square_torus())).dim() == 2);
  CHECK(relative_cocycles<Cyc>(build_cover(pillow(4, 2))).dim() == 5);
  CHECK(kernel(face_relations<Cyc>(double_triangle())).c == 2);
}

TEST_CASE("eigenspace dimensions on the named examples") {
  auto torus = build_cover(square_torus());
  auto pc = build_cover(pillow(4, 2));
  auto eq = build_cover(equilateral_torus(3));
  CHECK(eigen_cochains<Cyc>(torus).dim() == 2);
  CHECK(eigen_cochains<Cyc>(pc).dim() == 2);
  CHECK(eigen_cochains<Cyc>(eq).dim() == 1);
  CHECK(eigenspace_V<Cyc>(pc).dim() == 2);
  CHECK(eigenspace_V<cd>(eq).dim() == 1);
}

TEST_CASE("dim V formula, exact and float, on random instances") {
  for (const auto& s : random_instances(31)) {
    auto c = build_cover(s);
    CAPTURE(s.d, s.g, s.kappa);
    int expect = expected_dim_V(c);
    CHECK(eigen_cochains<Cyc>(c).dim() == expect);
    CHECK(eigen_cochains<cd>(c).dim() == expect);
    CHECK(eigenspace_V<Cyc>(c).dim() == expect);
  }
}

TEST_CASE("appendix cut-edge relation") {
  auto c = build_cover(pillow(4, 2));
  auto rpt = appendix_dim_check(c, eigen_cochains<Cyc>(c));
  CHECK(rpt.cut_edges == rpt.expected_cut_edges);
  CHECK(rpt.relation_holds);
  CHECK(rpt.nontrivial);
  auto t = build_cover(square_torus());
  CHECK(error_of([&] { appendix_dim_check(t, eigen_cochains<Cyc>(t)); }) == ErrorCode::PreconditionFailed);
  for (const auto& s : random_instances(32)) {
    if (s.d == 1) continue;
    auto rc = build_cover(s);
    auto r = appendix_dim_check(rc, eigen_cochains<Cyc>(rc));
    CHECK(r.relation_holds);
    CHECK(r.cut_edges == r.expected_cut_edges);
  }
}

TEST_CASE("symplectic basis: intersection form and area") {
  for (const auto& s : random_instances(33)) {
    auto c = build_cover(s);
    auto hb = symplectic_basis(c);
    CHECK(hb.g_hat == c.g_hat());
    CHECK(static_cast<int>(hb.cycles.size()) == 2 * c.g_hat());
    // Riemann bilinear relation: the self-pairing of the period cochain is the area
    if (c.g_hat() > 0) CHECK(area_pairing(hb, period_cochain(c)) == Catch::Approx(c.area).epsilon(1e-9));
    Inertia sig = full_signature(c, hb);
    CHECK(sig.pos == c.g_hat());
    CHECK(sig.neg == c.g_hat());
    CHECK(sig.zero == 0);
  }
}

TEST_CASE("pillowcase signature and deck action") {
  auto c = build_cover(pillow(4, 2));
  auto hb = symplectic_basis(c);
  Inertia sig = full_signature(c, hb);
  CHECK(sig.pos == 1);
  CHECK(sig.neg == 1);
  // T acts as -1 on the homology of the torus
  auto mult = eigen_multiplicities<Cyc>(c, hb);
  CHECK(mult == std::vector<int>{0, 2});
}

TEST_CASE("deck action has order d and the zeta^k multiplicity is N - r") {
  for (const auto& s : random_instances(34)) {
    auto c = build_cover(s);
    auto hb = symplectic_basis(c);
    IntMat A = deck_action(c, hb, c.d);
    for (size_t i = 0; i < A.size(); ++i)
      for (size_t j = 0; j < A.size(); ++j) CHECK(A[i][j] == (i == j ? 1 : 0));
    auto mult = eigen_multiplicities<Cyc>(c, hb);
    int total = 0;
    for (int x : mult) total += x;
    CHECK(total == 2 * c.g_hat());
    auto V = eigen_cochains<Cyc>(c);
    auto p = project_p(c, hb, V);
    CHECK(mult[c.k % c.d] == V.dim() - p.r);
  }
}

TEST_CASE("r counts base vertices with d | k and eta is dual to the paths") {
  for (const auto& s : random_instances(35, 2)) {
    auto c = build_cover(s);
    auto hb = symplectic_basis(c);
    auto V = eigen_cochains<Cyc>(c);
    auto p = project_p(c, hb, V);
    if (s.d == 1) {
      CHECK(p.r == s.n() - 1);
      continue;
    }
    int r = 0;
    for (int k : s.kappa) r += mod(k, s.d) == 0;
    CHECK(p.r == r);
    CHECK(static_cast<int>(hb.s_hat.size()) == r);
    Mat<Cyc> eta = kernel_basis<Cyc>(c, hb);
    for (const auto& x : V_residual(c, eta).v) CHECK(x.is_zero());
    if (!hb.cycles.empty())
      for (const auto& x : chain_periods(hb.cycles, eta).v) CHECK(x.is_zero());
    Mat<Cyc> at = chain_periods(relative_paths(c, hb, 1), eta);
    for (int i = 0; i < at.r; ++i)
      for (int j = 0; j < at.c; ++j) CHECK(at(i, j) == Cyc(i == j ? 1 : 0));
  }
}
