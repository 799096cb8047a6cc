#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "ddvol/surface.hpp"

namespace ddvol {

struct ProfileEntry {
  int k = 0;      // base order
  int d_i = 1;    // order of k in Z/d
  int n_i = 1;    // fiber cardinality d/d_i
  int k_hat = 0;  // order of each preimage
};

struct CoverProfile {
  std::vector<ProfileEntry> entries;  // per base vertex
  std::vector<int> kappa_hat;         // n_i copies of k_hat_i, in base vertex order
};

inline CoverProfile cover_orders(int d, const std::vector<int>& kappa) {
  CoverProfile p;
  for (int k : kappa) {
    if (k <= -d) fail(ErrorCode::BadOrders, "order " + std::to_string(k) + " <= -d");
    ProfileEntry e;
    e.k = k;
    e.n_i = std::gcd(std::abs(k), d);
    e.d_i = d / e.n_i;
    e.k_hat = (d + k) / e.n_i - 1;
    p.entries.push_back(e);
    for (int j = 0; j < e.n_i; ++j) p.kappa_hat.push_back(e.k_hat);
  }
  return p;
}

inline int riemann_hurwitz_genus(int g, int d, const std::vector<int>& kappa) {
  long twice = 2L * d * (g - 1) + static_cast<long>(kappa.size()) * d;
  long ksum = 0;
  for (int k : kappa) {
    int di = d / std::gcd(std::abs(k), d);
    twice -= d / di;
    ksum += k;
  }
  if (ksum != static_cast<long>(d) * (2 * g - 2))
    fail(ErrorCode::NonIntegral, "orders do not sum to d(2g-2)");
  if (twice % 2 != 0 || twice + 2 < 0) fail(ErrorCode::NonIntegral, "Riemann-Hurwitz genus is not a non-negative integer");
  return static_cast<int>(twice / 2 + 1);
}

// Translation surface with a deck automorphism T of order d, z(T e) = zeta^k z(e) with zeta = e^{2 pi i/d}.
struct TranslationCover {
  CombinatorialMap map;
  std::vector<int> T;
  int d = 1, k = 1;
  std::vector<cd> z;
  std::optional<std::vector<QC>> zq;
  std::vector<int> fiber;       // cover vertex -> base vertex
  std::vector<int> base_kappa;  // per base vertex
  int base_g = 0;
  std::vector<int> kappa_hat;   // per cover vertex
  std::vector<int> Tv;          // T on vertices
  double area = 0.0;
  double eps_geom = 0.0;

  int g_hat() const { return map.genus(); }
  int n_base() const { return static_cast<int>(base_kappa.size()); }
};

inline std::vector<int> vertex_action(const CombinatorialMap& m, const std::vector<int>& T) {
  std::vector<int> tv(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) tv[v] = m.vert[T[m.vertices[v][0]]];
  return tv;
}

inline double cover_area(const CombinatorialMap& m, const std::vector<cd>& z) {
  double a = 0.0;
  for (const auto& f : m.faces) a += face_area(z, f);
  return a;
}

// Fills derived vertex data; fiber is given per dart as a base vertex label.
inline void finish_cover(TranslationCover& c, const std::vector<int>& dart_fiber, const GeomConfig& cfg) {
  c.fiber.assign(c.map.num_vertices(), -1);
  for (int e = 0; e < c.map.n; ++e) c.fiber[c.map.vert[e]] = dart_fiber[e];
  c.Tv = vertex_action(c.map, c.T);
  c.area = cover_area(c.map, c.z);
  c.eps_geom = cfg.eps_geom_rel * std::sqrt(c.area);
  c.kappa_hat = cone_orders_raw(c.map, c.z, 1, cfg);
}

inline TranslationCover build_cover(const DDiffSurface& s, int zeta_index = 1, const GeomConfig& cfg = {}) {
  int d = s.d;
  if (std::gcd(mod(zeta_index, d), d) != 1 && d > 1)
    fail(ErrorCode::NotPrimitive, "zeta index " + std::to_string(zeta_index) + " is not prime to d");
  HolonomyMorphism h = primitivity(s);
  if (!h.surjective)
    fail(ErrorCode::NotPrimitive, "holonomy image is " + std::to_string(h.image_generator) + "Z/" + std::to_string(d));
  int k = d == 1 ? 1 : mod(zeta_index, d);
  int kinv = 1;
  for (int t = 1; t < d; ++t)
    if (mod(static_cast<long>(k) * t, d) == 1) kinv = t;
  const auto& m = s.map;
  int n = m.n, N = n * d;
  std::vector<int> shift(n);
  for (int e = 0; e < n; ++e) shift[e] = mod(-static_cast<long>(kinv) * s.rot[e], d);

  std::vector<int> s0(N), s2(N), T(N);
  for (int j = 0; j < d; ++j)
    for (int e = 0; e < n; ++e) {
      int x = e + n * j;
      s0[x] = m.s0[e] + n * mod(j + shift[e], d);
      s2[x] = m.s2[e] + n * j;
      T[x] = e + n * mod(j + 1, d);
    }

  int F = m.num_faces();
  std::vector<int> parent(F * d);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int x = 0; x < N; ++x) {
    int a = m.face[x % n] + F * (x / n), b = m.face[s0[x] % n] + F * (s0[x] / n);
    parent[find(a)] = find(b);
  }
  for (int f = 0; f < F * d; ++f)
    if (find(f) != find(0)) fail(ErrorCode::DisconnectedCover, "cover faces split into several components");

  std::vector<int> s2inv = invert(s2), s1(N);
  for (int x = 0; x < N; ++x) s1[x] = s0[s2inv[x]];

  TranslationCover c;
  c.map = build_map(N, s0, s1);
  c.T = T;
  c.d = d;
  c.k = k;
  c.base_kappa = s.kappa;
  c.base_g = s.g;
  c.z.resize(N);
  for (int j = 0; j < d; ++j) {
    cd zj = zeta_cd(d, static_cast<long>(k) * j);
    for (int e = 0; e < n; ++e) c.z[e + n * j] = zj * s.side[e];
  }
  if (s.side_q) {
    std::vector<QC> zq(N);
    for (int j = 0; j < d; ++j) {
      QC zj = quarter_turn(static_cast<int>((4 / d) * mod(static_cast<long>(k) * j, d)));
      for (int e = 0; e < n; ++e) zq[e + n * j] = zj * (*s.side_q)[e];
    }
    for (int x = 0; x < N; ++x) c.z[x] = zq[x].to_cd();
    c.zq = std::move(zq);
  }
  check_automorphism(c.map, c.T, d);
  std::vector<int> dart_fiber(N);
  for (int x = 0; x < N; ++x) dart_fiber[x] = m.vert[x % n];
  finish_cover(c, dart_fiber, cfg);
  int expect = riemann_hurwitz_genus(s.g, d, s.kappa);
  if (c.g_hat() != expect)
    fail(ErrorCode::DimensionMismatch, "cover genus " + std::to_string(c.g_hat()) + " differs from Riemann-Hurwitz " +
                                           std::to_string(expect));
  return c;
}

// The cover itself as a d=1 surface (all rot zero).
inline DDiffSurface cover_as_surface(const TranslationCover& c, const GeomConfig& cfg = {}) {
  return build_surface(c.map, 1, c.z, std::vector<int>(c.map.n, 0), c.zq, cfg);
}

// Base surface recovered from the cover: one dart per T-orbit, taken from a chosen face per face orbit.
inline DDiffSurface quotient_surface(const TranslationCover& c, const GeomConfig& cfg = {}) {
  const auto& m = c.map;
  int d = c.d;
  std::vector<int> face_rep(m.num_faces(), -1);  // representative face of each face orbit
  std::vector<int> rep_faces;
  for (int f = 0; f < m.num_faces(); ++f) {
    if (face_rep[f] >= 0) continue;
    int x = m.faces[f][0];
    for (int j = 0; j < d; ++j) {
      face_rep[m.face[x]] = f;
      x = c.T[x];
    }
    rep_faces.push_back(f);
  }
  std::vector<int> id(m.n, -1), power(m.n, 0);  // dart -> base dart, and j with dart = T^j(rep dart)
  int nb = 0;
  std::vector<int> rep_darts;
  for (int f : rep_faces)
    for (int x : m.faces[f]) {
      int y = x;
      for (int j = 0; j < d; ++j) {
        id[y] = nb;
        power[y] = j;
        y = c.T[y];
      }
      rep_darts.push_back(x);
      ++nb;
    }
  std::vector<int> s0(nb), rot(nb);
  std::vector<std::array<int, 3>> tris;
  std::vector<cd> side(nb);
  std::optional<std::vector<QC>> side_q;
  if (c.zq) side_q.emplace(nb);
  for (int b = 0; b < nb; ++b) {
    int x = rep_darts[b];
    int y = m.s0[x];
    s0[b] = id[y];
    // rep(s0 b) = T^{-power(y)} y, so side(s0 b) = zeta^{-k power(y)} z(y) = -zeta_d^{-k power(y)} side(b)
    rot[b] = mod(-static_cast<long>(c.k) * power[y], d);
    side[b] = c.z[x];
    if (side_q) (*side_q)[b] = (*c.zq)[x];
  }
  for (int f : rep_faces) tris.push_back({id[m.faces[f][0]], id[m.faces[f][1]], id[m.faces[f][2]]});
  CombinatorialMap bm = build_map_from_faces(nb, tris, s0);
  return build_surface(bm, d, side, rot, side_q, cfg);
}

}  // namespace ddvol
