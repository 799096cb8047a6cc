#include "common.hpp"

using namespace ddvol;
using namespace ddvol::test;

TEST_CASE("square torus geometry") {
  auto s = square_torus();
  CHECK(s.d == 1);
  CHECK(s.kappa == std::vector<int>{0});
  CHECK(s.g == 1);
  REQUIRE(s.area_q);
  CHECK(*s.area_q == Q(1));
  CHECK(primitivity(s).surjective);
}

TEST_CASE("pillowcase geometry") {
  auto s = pillow(4, 2);
  CHECK(s.g == 0);
  CHECK(s.kappa == std::vector<int>{-1, -1, -1, -1});
  REQUIRE(s.area_q);
  CHECK(*s.area_q == Q(2));
  auto h = primitivity(s);
  CHECK(h.surjective);
  CHECK(h.image_generator == 1);
}

TEST_CASE("regular polygon pillows have the angle-sum orders") {
  // two regular m-gons: every vertex has angle 2 (m-2) pi / m, so k = d ((m-2)/m - 1)
  for (auto [m, d] : std::vector<std::pair<int, int>>{{3, 3}, {3, 6}, {6, 3}, {6, 6}, {4, 4}}) {
    auto s = pillow(m, d);
    for (int k : s.kappa) CHECK(k * m == d * (m - 2) - d * m);
  }
}

TEST_CASE("collinear sides are degenerate") {
  auto s = square_torus();
  std::vector<cd> side(s.map.n);
  const auto& f = s.map.faces[0];
  side[f[0]] = {1, 0};
  side[f[1]] = {1, 0};
  side[f[2]] = {-2, 0};
  for (int x : f) side[s.map.s0[x]] = -side[x];
  CHECK(error_of([&] { build_surface(s.map, 1, side, s.rot); }) == ErrorCode::DegenerateTriangle);
}

TEST_CASE("corrupted rot is a gluing mismatch at a named edge") {
  auto s = pillow(4, 2);
  std::vector<int> rot = s.rot;
  int e = 0;
  while (rot[e] == 0) ++e;
  rot[e] = 0;
  rot[s.map.s0[e]] = 0;
  std::string msg = message_of([&] { build_surface(s.map, 2, s.side, rot, s.side_q); });
  CHECK(msg.find("GluingMismatch") == 0);
  CHECK(msg.find("edge " + std::to_string(s.map.edge_of[e])) != std::string::npos);
}

TEST_CASE("d = 4 with every rot even is not primitive") {
  auto s = d4_not_primitive();
  auto h = primitivity(s);
  CHECK_FALSE(h.surjective);
  CHECK(h.image_generator == 2);
  CHECK(s.kappa == std::vector<int>{-2, -2, -2, -2});
}

TEST_CASE("random surfaces: order sum, vertex holonomy, scaling") {
  std::mt19937_64 rng(11);
  for (const auto& s : random_instances(5, 2)) {
    long sum = 0;
    for (int k : s.kappa) sum += k;
    CHECK(sum == static_cast<long>(s.d) * (2 * s.g - 2));
    auto h = primitivity(s);
    CHECK(h.surjective);
    for (int v = 0; v < s.n(); ++v) CHECK(h.vertex_values[v] == mod(s.kappa[v], s.d));
    double t = std::uniform_real_distribution<double>(0.3, 3.0)(rng);
    auto big = scaled(s, cd(t, 0.0));
    CHECK(big.area == Catch::Approx(t * t * s.area).epsilon(1e-12));
    CHECK(big.kappa == s.kappa);
  }
}

TEST_CASE("rotating all sides keeps the orders") {
  for (const auto& s : random_instances(6)) {
    auto r = scaled(s, std::polar(1.0, 0.7));
    CHECK(r.kappa == s.kappa);
  }
}
