#include "common.hpp"

using namespace ddvol;
using namespace ddvol::test;

TEST_CASE("d = 1 cover is the surface itself") {
  auto s = square_torus();
  auto c = build_cover(s);
  CHECK(c.map.n == s.map.n);
  for (int e = 0; e < c.map.n; ++e) CHECK(c.T[e] == e);
  CHECK(c.g_hat() == 1);
}

TEST_CASE("pillowcase double cover is a torus with four regular points") {
  auto c = build_cover(pillow(4, 2));
  CHECK(c.g_hat() == 1);
  CHECK(c.map.num_vertices() == 4);
  CHECK(c.kappa_hat == std::vector<int>{0, 0, 0, 0});
  CHECK(c.area == Catch::Approx(4.0));
}

TEST_CASE("Riemann-Hurwitz examples") {
  CHECK(riemann_hurwitz_genus(0, 2, {-1, -1, -1, -1}) == 1);
  CHECK(riemann_hurwitz_genus(1, 1, {0}) == 1);
  CHECK(riemann_hurwitz_genus(0, 3, {-2, -2, -2}) == 1);
  CHECK(riemann_hurwitz_genus(0, 4, {-2, -2, -2, -2}) == 1);
  CHECK(error_of([] { riemann_hurwitz_genus(0, 2, {-1, -1, -1}); }) == ErrorCode::NonIntegral);
}

TEST_CASE("cover order profile") {
  auto p = cover_orders(2, {-1, -1, -1, -1});
  CHECK(p.kappa_hat == std::vector<int>{0, 0, 0, 0});
  for (const auto& e : p.entries) CHECK((e.d_i == 2 && e.n_i == 1));
  auto q = cover_orders(3, {-2, -2, -2});
  CHECK(q.kappa_hat == std::vector<int>{0, 0, 0});
  // k divisible by d: n_i = d preimages with unchanged order
  auto r = cover_orders(4, {4, -2, -2, -2, -2});
  CHECK(r.entries[0].n_i == 4);
  CHECK(r.entries[0].k_hat == 1);
  CHECK(r.entries[1].n_i == 2);
  CHECK(r.entries[1].k_hat == 0);
  CHECK(error_of([] { cover_orders(3, {-3}); }) == ErrorCode::BadOrders);
}

TEST_CASE("equilateral d = 3 sphere covers the torus") {
  auto s = equilateral_torus(3);
  CHECK(s.g == 0);
  CHECK(s.kappa == std::vector<int>{-2, -2, -2});
  auto c = build_cover(s);
  CHECK(c.g_hat() == 1);
  CHECK(c.map.num_vertices() == 3);
  CHECK(expected_dim_V(c) == 1);
}

TEST_CASE("non-primitive d = 4 surface has no connected cover") {
  CHECK(error_of([] { build_cover(d4_not_primitive()); }) == ErrorCode::NotPrimitive);
}

TEST_CASE("random covers: area, equivariance, free action, quotient") {
  for (const auto& s : random_instances(21, 2)) {
    auto c = build_cover(s);
    CAPTURE(s.d, s.g, s.kappa);
    CHECK(c.area == Catch::Approx(s.d * s.area).epsilon(1e-10));
    CHECK(check_automorphism(c.map, c.T, s.d).order == s.d);
    cd zeta = zeta_cd(c.d, c.k);
    double scale = max_edge(c);
    for (int e = 0; e < c.map.n; ++e) CHECK(std::abs(c.z[c.T[e]] - zeta * c.z[e]) <= 1e-9 * scale);
    CHECK(c.g_hat() == riemann_hurwitz_genus(s.g, s.d, s.kappa));
    std::vector<int> a = c.kappa_hat, b = cover_orders(s.d, s.kappa).kappa_hat;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    for (int v = 0; v < c.map.num_vertices(); ++v) CHECK(c.fiber[c.Tv[v]] == c.fiber[v]);
    auto q = quotient_surface(c);
    CHECK(q.area == Catch::Approx(s.area).epsilon(1e-10));
    auto qk = q.kappa, sk = s.kappa;
    std::sort(qk.begin(), qk.end());
    std::sort(sk.begin(), sk.end());
    CHECK(qk == sk);
    auto t = cover_as_surface(c);
    CHECK(t.g == c.g_hat());
  }
}

TEST_CASE("cover is independent of the dart labeling") {
  std::mt19937_64 rng(9);
  for (const auto& s : random_instances(22)) {
    auto t = shuffle_darts(s, rng);
    auto a = build_cover(s), b = build_cover(t);
    CHECK(a.g_hat() == b.g_hat());
    CHECK(a.map.num_vertices() == b.map.num_vertices());
    CHECK(a.area == Catch::Approx(b.area).epsilon(1e-12));
  }
}
