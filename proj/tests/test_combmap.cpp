#include "common.hpp"

using namespace ddvol;
using namespace ddvol::test;

TEST_CASE("square torus map counts") {
  auto s = square_torus();
  CHECK(s.map.num_vertices() == 1);
  CHECK(s.map.num_edges() == 3);
  CHECK(s.map.num_faces() == 2);
  CHECK(s.map.euler() == 0);
  CHECK(s.map.genus() == 1);
}

TEST_CASE("double triangle sphere") {
  auto m = double_triangle();
  CHECK(m.num_vertices() == 3);
  CHECK(m.num_edges() == 3);
  CHECK(m.euler() == 2);
  CHECK(m.genus() == 0);
}

TEST_CASE("invalid permutations are rejected") {
  CHECK(error_of([] { build_map(2, {0, 1}, {1, 0}); }) == ErrorCode::InvalidMap);
  CHECK(error_of([] { build_map(3, {1, 2, 0}, {0, 1, 2}); }) == ErrorCode::InvalidMap);
  CHECK(error_of([] { build_map(2, {1, 0}, {0, 0}); }) == ErrorCode::InvalidMap);
  CHECK(message_of([] { build_map(2, {0, 1}, {1, 0}); }).find("fixes dart 0") != std::string::npos);
}

TEST_CASE("sigma2 walks faces counterclockwise") {
  auto s = square_torus();
  for (const auto& f : s.map.faces) {
    CHECK(s.map.s2[f[0]] == f[1]);
    CHECK(s.map.s2[f[1]] == f[2]);
    CHECK(f[0] < f[1]);
    CHECK(f[0] < f[2]);
    CHECK(cross(s.side[f[0]], s.side[f[1]]) > 0.0);
  }
}

TEST_CASE("dual graphs and their simple cycles") {
  auto torus = square_torus();
  DualGraph g = dual_graph(torus.map);
  CHECK(g.nodes == 2);
  CHECK(g.links.size() == 3);
  CHECK(simple_cycles(g).cycles.size() == 3);

  DualGraph theta = dual_graph(double_triangle());
  CHECK(simple_cycles(theta).cycles.size() == 3);

  DualGraph loop;
  loop.nodes = 1;
  loop.links = {{0, 0}};
  loop.link_edge = {-1};
  CHECK(simple_cycles(loop).cycles.size() == 1);

  auto c = build_cover(pillow(4, 2));
  CHECK(dual_graph(c.map).nodes == c.map.num_faces());
}

TEST_CASE("simple cycle enumeration on K4 matches the hand count") {
  // K4 has 7 simple cycles: 4 triangles and 3 squares
  DualGraph k4;
  k4.nodes = 4;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) k4.links.emplace_back(a, b), k4.link_edge.push_back(-1);
  auto cl = simple_cycles(k4);
  CHECK(cl.cycles.size() == 7);
  CHECK_FALSE(cl.truncated);
  CHECK(simple_cycles(k4, 3).truncated);
}

TEST_CASE("automorphism checks") {
  auto s = square_torus();
  std::vector<int> id(s.map.n);
  std::iota(id.begin(), id.end(), 0);
  CHECK(check_automorphism(s.map, id, 1).order == 1);
  CHECK(error_of([&] { check_automorphism(s.map, id, 2); }) == ErrorCode::WrongOrder);
  auto c = build_cover(pillow(4, 2));
  CHECK(check_automorphism(c.map, c.T, 2).order == 2);
  for (int e = 0; e < c.map.n; ++e) CHECK(c.T[e] != e);
  std::vector<int> swap = id;
  std::swap(swap[0], swap[1]);
  CHECK(error_of([&] { check_automorphism(s.map, swap, 2); }) == ErrorCode::NotAutomorphism);
}

TEST_CASE("relabeling preserves the combinatorics of random maps") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 20; ++it) {
    auto s = random_surface(it % 2 ? 2 : 4, it % 3, rng);
    std::vector<int> p(s.map.n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    auto m = relabel(s.map, p);
    CHECK(m.num_vertices() == s.map.num_vertices());
    CHECK(m.num_edges() == s.map.num_edges());
    CHECK(m.num_faces() == s.map.num_faces());
    CHECK(m.genus() == s.map.genus());
    for (int e = 0; e < m.n; ++e) CHECK(m.s2[p[e]] == p[s.map.s2[e]]);
  }
}
