#include "common.hpp"

using namespace ddvol;
using namespace ddvol::test;

namespace {

Mat<Cyc> scaled_basis(const Mat<Cyc>& B, long f) {
  Mat<Cyc> out = B;
  for (auto& x : out.v) x = x * Cyc(f);
  return out;
}

}  // namespace

TEST_CASE("pillowcase density and ratio") {
  auto c = build_cover(pillow(4, 2));
  auto hb = symplectic_basis(c);
  auto V = lattice_basis<Cyc>(c);
  auto mv = masur_veech_ratio(c, hb);
  CHECK(mv.consistent);
  CHECK(mv.class_ok);
  CHECK(mv.lambda == QSqrt3(Q(4), 0));
  CHECK(mv.ell == 16);
  VolumeDensity v = theta_density(c, hb, V.basis);
  REQUIRE(v.exact);
  CHECK(*v.exact == QSqrt3(Q(4), 0));
  CHECK(v.value == Catch::Approx(4.0));
}

TEST_CASE("translation surfaces have lambda 2^-2g") {
  auto mv = masur_veech_ratio(build_cover(square_torus()), symplectic_basis(build_cover(square_torus())));
  CHECK(mv.lambda == QSqrt3(Q(1, 4), 0));
  std::mt19937_64 rng(41);
  auto s = random_surface(1, 2, rng);
  auto c = build_cover(s);
  auto m2 = masur_veech_ratio(c, symplectic_basis(c));
  CHECK(m2.lambda == QSqrt3(Q(1, 16), 0));
  CHECK(m2.consistent);
}

TEST_CASE("equilateral d = 3 ratio is rational") {
  auto c = build_cover(equilateral_torus(3));
  auto mv = masur_veech_ratio(c, symplectic_basis(c));
  CHECK(mv.r == 0);
  CHECK(mv.lambda.s == 0);
  CHECK(mv.class_ok);
  CHECK(mv.consistent);
}

TEST_CASE("density transforms by |det|^2 under a change of basis") {
  for (const auto& s : random_instances(42)) {
    auto c = build_cover(s);
    auto hb = symplectic_basis(c);
    auto V = eigen_cochains<Cyc>(c);
    CAPTURE(s.d, s.g, s.kappa);
    VolumeDensity a = theta_density(c, hb, V.basis);
    VolumeDensity b = theta_density(c, hb, scaled_basis(V.basis, 2));
    REQUIRE(a.exact);
    REQUIRE(b.exact);
    Q f = 1;
    for (int j = 0; j < 2 * V.dim(); ++j) f *= 2;
    CHECK(*b.exact == QSqrt3(a.exact->q * f, a.exact->s));
    CHECK(a.value > 0.0);
    // elementary column operation: determinant 1
    if (V.dim() >= 2) {
      Mat<Cyc> B = V.basis;
      for (int i = 0; i < B.r; ++i) B(i, 0) = B(i, 0) + B(i, 1) * Cyc::zeta(s.d, 1);
      CHECK(*theta_density(c, hb, B).exact == *a.exact);
    }
  }
}

TEST_CASE("density does not depend on the relative paths") {
  std::mt19937_64 rng(43);
  for (const auto& s : random_instances(44)) {
    auto c = build_cover(s);
    auto hb = symplectic_basis(c);
    auto V = eigen_cochains<Cyc>(c);
    VolumeDensity a = theta_density(c, hb, V.basis);
    std::vector<Chain> rel = relative_paths(c, hb, 1);
    for (size_t i = 0; i < rel.size(); ++i) {
      int from = c.d == 1 ? static_cast<int>(i) : hb.s_hat[i];
      int to = c.d == 1 ? c.map.num_vertices() - 1 : hb.target[i];
      rel[i] = random_vertex_path(c.map, from, to, rng);
    }
    CHECK(*theta_density(c, hb, V.basis, 1, &rel).exact == *a.exact);
  }
}

TEST_CASE("normalized density is independent of the primitive root") {
  for (const auto& s : random_instances(45, 2)) {
    if (s.d != 3 && s.d != 4 && s.d != 6) continue;
    auto c = build_cover(s);
    auto hb = symplectic_basis(c);
    auto z = zeta_independence_check(c, hb, eigen_cochains<Cyc>(c), primitive_indices(s.d));
    CHECK(z.equal);
  }
}

TEST_CASE("ratio classification and consistency across classes") {
  for (const auto& s : random_instances(46)) {
    auto c = build_cover(s);
    auto mv = masur_veech_ratio(c, symplectic_basis(c));
    CAPTURE(s.d, s.g, s.kappa, mv.lambda.str(), mv.classification);
    CHECK(mv.class_ok);
    CHECK(mv.consistent);
    if (s.d == 1 || s.d == 2 || s.d == 4) CHECK(mv.lambda.s == 0);
    if (s.d == 3 || s.d == 6) CHECK(mv.lambda.s == mv.r % 2);
  }
}

TEST_CASE("det theta lies in i^K R for d = 2 and 4") {
  auto c = build_cover(pillow(4, 2));
  auto rep = det_theta_check(c, symplectic_basis(c), eigen_cochains<Cyc>(c));
  CHECK(rep.anti_hermitian);
  CHECK(rep.in_iK_reals);
  for (const auto& s : random_instances(47)) {
    if (s.d != 2 && s.d != 4) continue;
    auto rc = build_cover(s);
    auto r = det_theta_check(rc, symplectic_basis(rc), eigen_cochains<Cyc>(rc));
    CHECK(r.in_iK_reals);
  }
}

TEST_CASE("area pairing") {
  auto t = build_cover(square_torus());
  CHECK(area_pairing(symplectic_basis(t), period_cochain(t)) == Catch::Approx(1.0));
  auto c = build_cover(pillow(4, 2));
  auto hb = symplectic_basis(c);
  Mat<cd> v = period_cochain(c);
  CHECK(area_pairing(hb, v) == Catch::Approx(4.0));
  for (auto& x : v.v) x *= std::polar(1.0, 0.9);
  CHECK(area_pairing(hb, v) == Catch::Approx(4.0));
}

TEST_CASE("float and exact densities agree") {
  for (const auto& s : random_instances(48)) {
    auto c = build_cover(s);
    auto hb = symplectic_basis(c);
    auto V = eigen_cochains<Cyc>(c);
    VolumeDensity a = theta_density(c, hb, V.basis);
    VolumeDensity b = theta_density(c, hb, to_complex(V.basis));
    CHECK(b.value == Catch::Approx(a.exact->to_double()).epsilon(1e-6));
  }
}

TEST_CASE("projectivized mass") {
  CHECK(projectivized_mass(12.0, 3, 2) == Catch::Approx(4.0));
  CHECK(projectivized_mass(1.0, 1, 3, 0.5) == Catch::Approx(0.125));
}
