#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ddvol/combmap.hpp"
#include "ddvol/field.hpp"

namespace ddvol {

struct GeomConfig {
  double eps_geom_rel = 1e-9;  // epsilon_geom = eps_geom_rel * sqrt(area)
  double eps_angle = 1e-7;     // tolerance on d*Theta/(2 pi) being an integer
};

inline int mod(long a, int d) { return static_cast<int>(((a % d) + d) % d); }

// Interior angle at the tail of dart e inside its face, from the face's own side vectors.
template <class Side>
double corner_angle(const CombinatorialMap& m, const Side& side, int e) {
  int c = m.s2[m.s2[e]];
  cd u = side[e], w = -side[c];
  return std::atan2(cross(u, w), dot(u, w));
}

// Sum of corner angles at every vertex.
template <class Side>
std::vector<double> vertex_angles(const CombinatorialMap& m, const Side& side) {
  std::vector<double> th(m.num_vertices(), 0.0);
  for (int e = 0; e < m.n; ++e) th[m.vert[e]] += corner_angle(m, side, e);
  return th;
}

struct DDiffSurface {
  CombinatorialMap map;
  int d = 1;
  std::vector<cd> side;                   // per dart, in the chart of its face
  std::optional<std::vector<QC>> side_q;  // exact sides when rational and d in {1,2,4}
  std::vector<int> rot;                   // per dart, rot(sigma0 e) = -rot(e) mod d
  std::vector<int> kappa;                 // per vertex
  int g = 0;
  double area = 0.0;
  std::optional<Q> area_q;
  double eps_geom = 0.0;

  int n() const { return map.num_vertices(); }
};

inline double face_area(const std::vector<cd>& side, const std::array<int, 3>& f) {
  return 0.5 * cross(side[f[0]], side[f[1]]);
}

inline std::vector<int> cone_orders_raw(const CombinatorialMap& m, const std::vector<cd>& side, int d,
                                        const GeomConfig& cfg) {
  std::vector<double> th = vertex_angles(m, side);
  std::vector<int> kappa(th.size());
  for (size_t v = 0; v < th.size(); ++v) {
    double x = d * th[v] / (2.0 * kPi) - d;
    double k = std::round(x);
    if (std::abs(x - k) > cfg.eps_angle)
      fail(ErrorCode::NonIntegralOrder, "vertex " + std::to_string(v) + " has d*Theta/(2pi) - d = " +
                                            std::to_string(x));
    kappa[v] = static_cast<int>(k);
  }
  return kappa;
}

inline std::vector<int> cone_orders(const DDiffSurface& s, const GeomConfig& cfg = {}) {
  return cone_orders_raw(s.map, s.side, s.d, cfg);
}

inline double area(const DDiffSurface& s) { return s.area; }

inline DDiffSurface build_surface(const CombinatorialMap& map, int d, const std::vector<cd>& side,
                                  const std::vector<int>& rot_in, std::optional<std::vector<QC>> side_q = std::nullopt,
                                  const GeomConfig& cfg = {}) {
  if (d < 1) fail(ErrorCode::BadOrders, "d must be positive");
  if (static_cast<int>(side.size()) != map.n || static_cast<int>(rot_in.size()) != map.n)
    fail(ErrorCode::GluingMismatch, "side/rot arrays do not match the dart count");
  DDiffSurface s;
  s.map = map;
  s.d = d;
  s.side = side;
  s.rot.resize(map.n);
  for (int e = 0; e < map.n; ++e) s.rot[e] = mod(rot_in[e], d);
  for (int e = 0; e < map.n; ++e)
    if (mod(s.rot[e] + s.rot[map.s0[e]], d) != 0)
      fail(ErrorCode::GluingMismatch, "rot of edge " + std::to_string(map.edge_of[e]) + " is not antisymmetric");
  if (side_q && (d == 1 || d == 2 || d == 4) && static_cast<int>(side_q->size()) == map.n) {
    s.side_q = std::move(side_q);
    for (int e = 0; e < map.n; ++e) s.side[e] = (*s.side_q)[e].to_cd();
  }

  double total = 0.0;
  for (const auto& f : map.faces) total += face_area(s.side, f);
  if (!(total > 0.0)) fail(ErrorCode::DegenerateTriangle, "total area is not positive");
  s.eps_geom = cfg.eps_geom_rel * std::sqrt(total);

  for (int fi = 0; fi < map.num_faces(); ++fi) {
    const auto& f = map.faces[fi];
    std::string where = "face " + std::to_string(fi);
    if (s.side_q) {
      const auto& q = *s.side_q;
      if (!(q[f[0]] + q[f[1]] + q[f[2]]).is_zero()) fail(ErrorCode::DegenerateTriangle, where + " does not close");
      if (sgn(cross(q[f[0]], q[f[1]])) <= 0) fail(ErrorCode::DegenerateTriangle, where + " has non-positive area");
    } else {
      cd sum = s.side[f[0]] + s.side[f[1]] + s.side[f[2]];
      if (std::abs(sum) > s.eps_geom) fail(ErrorCode::DegenerateTriangle, where + " does not close");
      double longest = std::max({std::abs(s.side[f[0]]), std::abs(s.side[f[1]]), std::abs(s.side[f[2]])});
      if (face_area(s.side, f) <= s.eps_geom * longest)
        fail(ErrorCode::DegenerateTriangle, where + " has non-positive area");
    }
  }

  for (int e = 0; e < map.n; ++e) {
    int f = map.s0[e];
    if (e > f) continue;
    std::string where = "edge " + std::to_string(map.edge_of[e]) + " (darts " + std::to_string(e) + "," +
                        std::to_string(f) + ")";
    if (s.side_q) {
      QC rhs = -(quarter_turn(s.rot[e] * (4 / d)) * (*s.side_q)[e]);
      if (!((*s.side_q)[f] == rhs)) fail(ErrorCode::GluingMismatch, where);
    } else {
      cd rhs = -zeta_cd(d, s.rot[e]) * s.side[e];
      if (std::abs(s.side[f] - rhs) > s.eps_geom) fail(ErrorCode::GluingMismatch, where);
    }
  }

  s.area = total;
  if (s.side_q) {
    Q a(0);
    for (const auto& f : map.faces) a += cross((*s.side_q)[f[0]], (*s.side_q)[f[1]]);
    s.area_q = a / 2;
  }
  s.kappa = cone_orders_raw(map, s.side, d, cfg);
  s.g = map.genus();
  long sum = 0;
  for (size_t v = 0; v < s.kappa.size(); ++v) {
    if (s.kappa[v] <= -d)
      fail(ErrorCode::BadOrders, "vertex " + std::to_string(v) + " has order " + std::to_string(s.kappa[v]));
    sum += s.kappa[v];
  }
  if (sum != static_cast<long>(d) * (2 * s.g - 2))
    fail(ErrorCode::BadOrders, "sum of orders " + std::to_string(sum) + " differs from d(2g-2)");
  return s;
}

// Monodromy in Z/d: loops in the dual graph accumulate rot of the dart through which each face is entered.
struct HolonomyMorphism {
  std::vector<int> loop_values;    // one per non-tree edge of a dual spanning tree
  std::vector<int> vertex_values;  // loop around each vertex
  int image_generator = 0;         // image = image_generator * Z/d
  bool surjective = false;
};

// Sheet offset of each face along a dual spanning tree rooted at face 0, and the tree flag per edge.
inline std::pair<std::vector<int>, std::vector<char>> dual_tree_potential(const CombinatorialMap& m,
                                                                           const std::vector<int>& rot, int d) {
  std::vector<int> pot(m.num_faces(), -1);
  std::vector<char> tree(m.num_edges(), 0);
  pot[0] = 0;
  std::vector<int> queue{0};
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int f = queue[qi];
    for (int x : m.faces[f]) {
      int y = m.s0[x];
      int g = m.face[y];
      if (pot[g] >= 0) continue;
      pot[g] = mod(pot[f] + rot[y], d);
      tree[m.edge_of[x]] = 1;
      queue.push_back(g);
    }
  }
  return {pot, tree};
}

inline HolonomyMorphism primitivity(const DDiffSurface& s) {
  const auto& m = s.map;
  HolonomyMorphism h;
  auto [pot, tree] = dual_tree_potential(m, s.rot, s.d);
  int gen = s.d;
  for (int ei = 0; ei < m.num_edges(); ++ei) {
    if (tree[ei]) continue;
    int x = m.edges[ei], y = m.s0[x];
    int v = mod(pot[m.face[x]] + s.rot[y] - pot[m.face[y]], s.d);
    h.loop_values.push_back(v);
    gen = std::gcd(gen, v);
  }
  for (const auto& out : m.vertices) {
    long t = 0;
    for (int f : out) t += s.rot[f];
    h.vertex_values.push_back(mod(t, s.d));
  }
  h.image_generator = gen;
  h.surjective = gen == 1;
  return h;
}

}  // namespace ddvol
