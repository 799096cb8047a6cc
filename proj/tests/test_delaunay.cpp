#include "common.hpp"

using namespace ddvol;
using namespace ddvol::test;

namespace {

// Unit-area torus triangulated with the long diagonal (-3,-1).
DDiffSurface skewed_torus() {
  TilePool p;
  p.add_triangle(std::array<cd, 3>{cd(1, 0), cd(2, 1), cd(-3, -1)});
  p.add_triangle(std::array<cd, 3>{cd(-1, 0), cd(-2, -1), cd(3, 1)});
  auto a = assemble(p, {{0, 3}, {1, 4}, {2, 5}}, 1);
  REQUIRE(a);
  return surface_from(*a, 1);
}

}  // namespace

TEST_CASE("flips bring the skewed torus to a Delaunay triangulation") {
  auto c = build_cover(skewed_torus());
  CHECK_FALSE(is_delaunay(c));
  auto r = delaunay_flip(c);
  CHECK(r.certified);
  CHECK_FALSE(r.flips.empty());
  CHECK(is_delaunay(r.cover));
  CHECK(r.cover.area == Catch::Approx(1.0));
  CHECK(max_edge(r.cover) <= std::sqrt(2.0) + 1e-12);
}

TEST_CASE("already Delaunay tori need no flips") {
  for (auto s : {square_torus(), equilateral_torus(1)}) {
    auto r = delaunay_flip(build_cover(s));
    CHECK(r.certified);
    CHECK(r.flips.empty());
  }
}

TEST_CASE("flip limit is reported") {
  DelaunayConfig cfg;
  cfg.max_flips = 1;
  auto c = build_cover(linear_image(square_torus(), 1.0, 7.0, 0.0, 1.0));
  CHECK(error_of([&] { delaunay_flip(c, cfg); }) == ErrorCode::FlipLimitExceeded);
}

TEST_CASE("pillowcase invariant Delaunay") {
  auto c = build_cover(linear_image(pillow(4, 2), 1.0, 3.0, 0.0, 1.0));
  auto r = invariant_delaunay(c);
  CHECK(r.certified);
  CHECK(is_delaunay(r.cover));
  CHECK(is_T_invariant(r.cover, 1e-9));
  CHECK(r.cover.area == Catch::Approx(c.area));
}

TEST_CASE("long edge threshold scales with the area") {
  auto c = build_cover(rectangular_torus(5.0));
  auto dr = delaunay_flip(c);
  DelaunayConfig cfg;
  auto le = long_edges(dr.cover, cfg);
  for (int e : le) CHECK(std::abs(dr.cover.z[e]) > cfg.alpha * std::sqrt(5.0));
  auto big = scaled_cover(dr.cover, 3.0);
  CHECK(long_edges(big, cfg) == le);
}

TEST_CASE("1 x 5 torus has one long cylinder") {
  auto c = build_cover(rectangular_torus(5.0));
  auto dr = delaunay_flip(c);
  auto cyls = detect_cylinders(dr.cover);
  REQUIRE(cyls.size() == 1);
  CHECK(cyls[0].ell == Catch::Approx(1.0));
  CHECK(cyls[0].h == Catch::Approx(5.0));
  const auto& o = dr.cover;
  int vertical = -1, other = -1;
  for (int x : o.map.edges) {
    if (std::abs(o.z[x].real()) < 1e-12 && std::abs(std::abs(o.z[x].imag()) - 5.0) < 1e-12) vertical = x;
    if (std::abs(o.z[x]) < 1.5) other = x;
  }
  REQUIRE(vertical >= 0);
  auto rep = verify_crossing_bounds(o, vertical, cyls[0]);
  CHECK(rep.all());
  CHECK(rep.x == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(other >= 0);
  CHECK(error_of([&] { verify_crossing_bounds(o, other, cyls[0]); }) == ErrorCode::PreconditionFailed);
}

TEST_CASE("random surfaces: invariant Delaunay and disjoint cylinders") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 60; ++i) {
    auto s = random_sample(rng);
    auto c = build_cover(s);
    CAPTURE(i, s.d, s.g, s.kappa);
    auto r = invariant_delaunay(c);
    CHECK(r.certified);
    CHECK(is_delaunay(r.cover));
    CHECK(is_T_invariant(r.cover, 1e-9));
    CHECK(r.cover.area == Catch::Approx(c.area).epsilon(1e-9));
    auto cyls = detect_cylinders(r.cover);
    for (size_t a = 0; a < cyls.size(); ++a)
      for (size_t b = a + 1; b < cyls.size(); ++b) {
        std::vector<int> common;
        std::vector<int> fa = cyls[a].faces, fb = cyls[b].faces;
        std::sort(fa.begin(), fa.end());
        std::sort(fb.begin(), fb.end());
        std::set_intersection(fa.begin(), fa.end(), fb.begin(), fb.end(), std::back_inserter(common));
        CHECK(common.empty());
      }
    auto ct = crossing_tally(r.cover, cyls, DelaunayConfig{});
    CHECK(ct.ok);
  }
}
