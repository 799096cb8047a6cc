#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "ddvol/cohomology.hpp"
#include "ddvol/cover.hpp"

namespace ddvol {

// Triangles with darts 3t, 3t+1, 3t+2 (counterclockwise), internal translation gluings and free darts.
struct TilePool {
  std::vector<std::array<cd, 3>> tri;
  std::vector<std::array<QC, 3>> triq;
  bool exact = false;
  std::vector<std::pair<int, int>> internal;
  std::vector<int> free;

  int add_triangle(const std::array<cd, 3>& s) {
    tri.push_back(s);
    return static_cast<int>(tri.size()) - 1;
  }
  int add_triangle(const std::array<QC, 3>& s) {
    triq.push_back(s);
    tri.push_back({s[0].to_cd(), s[1].to_cd(), s[2].to_cd()});
    return static_cast<int>(tri.size()) - 1;
  }
  cd side(int dart) const { return tri[dart / 3][dart % 3]; }
};

// Rotation r with w = -zeta_d^r u, if any.
inline std::optional<int> gluing_rot(cd u, cd w, int d, double tol = 1e-9) {
  cd ratio = -w / u;
  if (std::abs(std::abs(ratio) - 1.0) > tol) return std::nullopt;
  double t = std::arg(ratio) * d / (2.0 * kPi);
  double r = std::round(t);
  if (std::abs(t - r) > tol * d) return std::nullopt;
  return mod(static_cast<long>(r), d);
}

// Unit square split by a diagonal; returns its four boundary darts (bottom, right, top, left).
inline std::array<int, 4> add_square(TilePool& p, bool other_diagonal, QC origin_scale = {Q(1), Q(0)}) {
  QC one = origin_scale, up = QC(Q(0), Q(1)) * origin_scale;
  QC b = one, r = up, t = -one, l = -up;
  if (!other_diagonal) {
    // diagonal from lower left to upper right
    int t0 = p.add_triangle(std::array<QC, 3>{b, r, -(b + r)});
    int t1 = p.add_triangle(std::array<QC, 3>{b + r, t, l});
    p.internal.emplace_back(3 * t0 + 2, 3 * t1);
    return {3 * t0, 3 * t0 + 1, 3 * t1 + 1, 3 * t1 + 2};
  }
  int t0 = p.add_triangle(std::array<QC, 3>{b, r + t, l});
  int t1 = p.add_triangle(std::array<QC, 3>{r, t, -(r + t)});
  p.internal.emplace_back(3 * t0 + 1, 3 * t1 + 2);
  return {3 * t0, 3 * t1, 3 * t1 + 1, 3 * t0 + 2};
}

inline cd omega_cd() { return zeta_cd(3, 1); }

inline int add_equilateral(TilePool& p, bool up) {
  cd w = omega_cd();
  std::array<cd, 3> s{cd(1.0), w, w * w};
  if (!up)
    for (auto& x : s) x = -x;
  return p.add_triangle(s);
}

struct Assembly {
  int n = 0;
  std::vector<int> s0;
  std::vector<std::array<int, 3>> tris;
  std::vector<cd> side;
  std::optional<std::vector<QC>> side_q;
  std::vector<int> rot;
};

// Pairs the free darts at random among admissible partners; nullopt if stuck.
template <class Rng>
std::optional<std::vector<std::pair<int, int>>> random_pairing(const TilePool& p, int d, Rng& rng) {
  std::vector<int> rest = p.free;
  if (rest.size() % 2) return std::nullopt;
  std::shuffle(rest.begin(), rest.end(), rng);
  std::vector<std::pair<int, int>> out;
  while (!rest.empty()) {
    int a = rest.back();
    rest.pop_back();
    std::vector<size_t> ok;
    for (size_t i = 0; i < rest.size(); ++i)
      if (gluing_rot(p.side(a), p.side(rest[i]), d)) ok.push_back(i);
    if (ok.empty()) return std::nullopt;
    size_t pick = ok[std::uniform_int_distribution<size_t>(0, ok.size() - 1)(rng)];
    out.emplace_back(a, rest[pick]);
    rest.erase(rest.begin() + static_cast<long>(pick));
  }
  return out;
}

inline std::optional<Assembly> assemble(const TilePool& p, const std::vector<std::pair<int, int>>& pairs, int d) {
  Assembly a;
  a.n = 3 * static_cast<int>(p.tri.size());
  a.s0.assign(a.n, -1);
  a.rot.assign(a.n, 0);
  a.side.resize(a.n);
  for (int e = 0; e < a.n; ++e) a.side[e] = p.side(e);
  if (p.exact) {
    a.side_q.emplace(a.n);
    for (int e = 0; e < a.n; ++e) (*a.side_q)[e] = p.triq[e / 3][e % 3];
  }
  auto glue = [&](int x, int y) {
    auto r = gluing_rot(a.side[x], a.side[y], d);
    if (!r || a.s0[x] >= 0 || a.s0[y] >= 0) return false;
    a.s0[x] = y;
    a.s0[y] = x;
    a.rot[x] = *r;
    a.rot[y] = mod(-*r, d);
    return true;
  };
  for (auto [x, y] : p.internal)
    if (!glue(x, y)) return std::nullopt;
  for (auto [x, y] : pairs)
    if (!glue(x, y)) return std::nullopt;
  for (int e = 0; e < a.n; ++e)
    if (a.s0[e] < 0) return std::nullopt;
  for (int t = 0; t < static_cast<int>(p.tri.size()); ++t) a.tris.push_back({3 * t, 3 * t + 1, 3 * t + 2});
  return a;
}

inline DDiffSurface surface_from(const Assembly& a, int d, const GeomConfig& cfg = {}) {
  CombinatorialMap m = build_map_from_faces(a.n, a.tris, a.s0);
  return build_surface(m, d, a.side, a.rot, a.side_q, cfg);
}

// Relabels darts by a random permutation.
template <class Rng>
DDiffSurface shuffle_darts(const DDiffSurface& s, Rng& rng) {
  std::vector<int> p(s.map.n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  CombinatorialMap m = relabel(s.map, p);
  std::vector<cd> side(s.map.n);
  std::vector<int> rot(s.map.n);
  std::optional<std::vector<QC>> sq;
  if (s.side_q) sq.emplace(s.map.n);
  for (int e = 0; e < s.map.n; ++e) {
    side[p[e]] = s.side[e];
    rot[p[e]] = s.rot[e];
    if (sq) (*sq)[p[e]] = (*s.side_q)[e];
  }
  return build_surface(m, s.d, side, rot, sq);
}

enum class TileKind { Square, Triangle };

inline TileKind tile_kind_for(int d) {
  if (d == 3 || d == 6) return TileKind::Triangle;
  return TileKind::Square;
}

struct GenSpec {
  int d = 1;
  int g = 1;
  int tiles = 0;      // squares or triangles; 0 picks a size from g
  int tower = 0;      // rows of a tall cylinder added to the pool
  TileKind kind = TileKind::Square;
  int max_tries = 4000;
};

// Random tiled surface with the requested d and genus, primitive holonomy.
template <class Rng>
DDiffSurface random_tiled(const GenSpec& spec, Rng& rng) {
  int d = spec.d;
  if (d == 1 && spec.g == 0) fail(ErrorCode::PreconditionFailed, "no flat sphere with d=1");
  for (int attempt = 0; attempt < spec.max_tries; ++attempt) {
    TilePool p;
    p.exact = spec.kind == TileKind::Square;
    int count = spec.tiles;
    if (count == 0) {
      int lo = spec.kind == TileKind::Square ? 1 + spec.g : 2 + 2 * spec.g;
      count = lo + std::uniform_int_distribution<int>(0, spec.kind == TileKind::Square ? 2 : 3)(rng);
    }
    if (spec.kind == TileKind::Square) {
      for (int i = 0; i < count; ++i) {
        auto sides = add_square(p, std::bernoulli_distribution(0.5)(rng));
        p.free.insert(p.free.end(), sides.begin(), sides.end());
      }
      if (spec.tower > 0) {
        // stacked unit squares, each closed horizontally into an annulus
        std::array<int, 4> prev{};
        for (int row = 0; row < spec.tower; ++row) {
          auto sq = add_square(p, std::bernoulli_distribution(0.5)(rng));
          p.internal.emplace_back(sq[1], sq[3]);
          if (row == 0) p.free.push_back(sq[0]);
          else p.internal.emplace_back(prev[2], sq[0]);
          prev = sq;
        }
        p.free.push_back(prev[2]);
      }
    } else {
      if (count % 2) ++count;
      for (int i = 0; i < count; ++i) {
        int t = add_equilateral(p, i % 2 == 0);
        for (int j = 0; j < 3; ++j) p.free.push_back(3 * t + j);
      }
      if (spec.tower > 0) {
        // rows of an up and a down triangle forming a parallelogram with sides 1 and e^{i pi/3}
        int prev_top = -1;
        for (int row = 0; row < spec.tower; ++row) {
          int u = add_equilateral(p, true);   // sides 1, w, w^2
          int v = add_equilateral(p, false);  // sides -1, -w, -w^2
          // up triangle's w side is shared with the down triangle's -w side
          p.internal.emplace_back(3 * u + 1, 3 * v + 1);
          // left and right of the parallelogram: up's w^2 side and down's -w^2 side
          p.internal.emplace_back(3 * u + 2, 3 * v + 2);
          if (row == 0) p.free.push_back(3 * u);
          else p.internal.emplace_back(prev_top, 3 * u);
          prev_top = 3 * v;
        }
        p.free.push_back(prev_top);
      }
    }
    auto pairs = random_pairing(p, d, rng);
    if (!pairs) continue;
    auto a = assemble(p, *pairs, d);
    if (!a) continue;
    try {
      DDiffSurface s = surface_from(*a, d);
      if (s.g != spec.g) continue;
      if (!primitivity(s).surjective) continue;
      return shuffle_darts(s, rng);
    } catch (const Error&) {
      continue;
    }
  }
  fail(ErrorCode::PreconditionFailed, "generator gave up for d=" + std::to_string(d) + " g=" + std::to_string(spec.g));
}

template <class Rng>
DDiffSurface random_surface(int d, int g, Rng& rng, int tower = 0) {
  GenSpec spec;
  spec.d = d;
  spec.g = g;
  spec.kind = tile_kind_for(d);
  if (d == 1 && std::bernoulli_distribution(0.5)(rng)) spec.kind = TileKind::Triangle;
  spec.tower = tower;
  return random_tiled(spec, rng);
}

// Two copies of a regular m-gon with a horizontal side, glued along the boundary.
inline DDiffSurface pillow(int m, int d) {
  TilePool p;
  std::vector<cd> v(m);
  for (int j = 0; j < m; ++j) v[j] = j == 0 ? cd(0.0) : v[j - 1] + std::polar(1.0, 2.0 * kPi * (j - 1) / m);
  bool exact = m == 4;
  p.exact = exact;
  std::vector<QC> vq;
  if (exact) vq = {QC(Q(0), Q(0)), QC(Q(1), Q(0)), QC(Q(1), Q(1)), QC(Q(0), Q(1))};
  // front fan from vertex 0; back is the mirror image traversed counterclockwise
  std::vector<int> front_side(m, -1), back_side(m, -1);
  int prev_diag_front = -1, prev_diag_back = -1;
  for (int t = 0; t + 2 < m; ++t) {
    int a = 0, b = t + 1, c = t + 2;
    int tf, tb;
    if (exact) {
      tf = p.add_triangle(std::array<QC, 3>{vq[b] - vq[a], vq[c] - vq[b], vq[a] - vq[c]});
      auto cj = [](const QC& x) { return x.conj(); };
      tb = p.add_triangle(std::array<QC, 3>{cj(vq[a] - vq[c]), cj(vq[c] - vq[b]), cj(vq[b] - vq[a])});
      for (auto& x : p.triq.back()) x = -x;
      for (auto& x : p.tri.back()) x = -x;
    } else {
      tf = p.add_triangle(std::array<cd, 3>{v[b] - v[a], v[c] - v[b], v[a] - v[c]});
      tb = p.add_triangle(std::array<cd, 3>{-std::conj(v[a] - v[c]), -std::conj(v[c] - v[b]), -std::conj(v[b] - v[a])});
    }
    // front darts: 0: a->b, 1: b->c, 2: c->a ; back darts mirror them in reverse order
    if (t == 0) front_side[0] = 3 * tf, back_side[0] = 3 * tb + 2;
    else p.internal.emplace_back(prev_diag_front, 3 * tf), p.internal.emplace_back(prev_diag_back, 3 * tb + 2);
    front_side[b] = 3 * tf + 1;
    back_side[b] = 3 * tb + 1;
    if (t + 3 == m) front_side[c] = 3 * tf + 2, back_side[c] = 3 * tb;
    prev_diag_front = 3 * tf + 2;
    prev_diag_back = 3 * tb;
  }
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < m; ++j) pairs.emplace_back(front_side[j], back_side[j]);
  auto a = assemble(p, pairs, d);
  if (!a) fail(ErrorCode::GluingMismatch, "pillow gluing incompatible with d=" + std::to_string(d));
  return surface_from(*a, d);
}

inline DDiffSurface square_torus() {
  TilePool p;
  p.exact = true;
  auto s = add_square(p, false);
  auto a = assemble(p, {{s[0], s[2]}, {s[1], s[3]}}, 1);
  return surface_from(*a, 1);
}

// Up and down equilateral triangles: a translation torus when d=1; for d=3 a sphere with three cone points of order -2.
inline DDiffSurface equilateral_torus(int d = 1) {
  TilePool p;
  int u = add_equilateral(p, true), v = add_equilateral(p, false);
  std::vector<std::pair<int, int>> pairs;
  if (d == 1) pairs = {{3 * u, 3 * v}, {3 * u + 1, 3 * v + 1}, {3 * u + 2, 3 * v + 2}};
  else pairs = {{3 * u, 3 * v}, {3 * u + 1, 3 * v + 2}, {3 * u + 2, 3 * v + 1}};
  auto a = assemble(p, pairs, d);
  if (!a) fail(ErrorCode::GluingMismatch, "equilateral torus gluing");
  return surface_from(*a, d);
}

// 1 x t flat torus: horizontal circumference 1, vertical side t.
inline DDiffSurface rectangular_torus(double t) {
  TilePool p;
  int t0 = p.add_triangle(std::array<cd, 3>{cd(1, 0), cd(0, t), cd(-1, -t)});
  int t1 = p.add_triangle(std::array<cd, 3>{cd(1, t), cd(-1, 0), cd(0, -t)});
  p.internal.emplace_back(3 * t0 + 2, 3 * t1);
  auto a = assemble(p, {{3 * t0, 3 * t1 + 1}, {3 * t0 + 1, 3 * t1 + 2}}, 1);
  return surface_from(*a, 1);
}

// The surface with every side multiplied by c (d=1,2 allow any real-linear map; here complex scaling).
inline DDiffSurface scaled(const DDiffSurface& s, cd c) {
  std::vector<cd> side(s.side.size());
  for (size_t i = 0; i < side.size(); ++i) side[i] = c * s.side[i];
  return build_surface(s.map, s.d, side, s.rot);
}

// Real-linear map x + iy -> (a x + b y) + i (c x + e y); commutes with the gluings only for d in {1,2}.
inline DDiffSurface linear_image(const DDiffSurface& s, double a, double b, double c, double e) {
  if (s.d > 2) fail(ErrorCode::PreconditionFailed, "real-linear action needs d <= 2");
  std::vector<cd> side(s.side.size());
  for (size_t i = 0; i < side.size(); ++i) {
    double x = s.side[i].real(), y = s.side[i].imag();
    side[i] = cd(a * x + b * y, c * x + e * y);
  }
  return build_surface(s.map, s.d, side, s.rot);
}

inline DDiffSurface with_area(const DDiffSurface& s, double target) {
  double f = std::sqrt(target / s.area);
  DDiffSurface out = scaled(s, cd(f, 0.0));
  while (out.area > target) {
    f = std::nextafter(f, 0.0);
    out = scaled(s, cd(f, 0.0));
  }
  return out;
}

// Base sides read from the sheet-0 darts of a cover cochain.
inline DDiffSurface surface_from_cover_periods(const DDiffSurface& base, const TranslationCover& c,
                                               const std::vector<cd>& z) {
  std::vector<cd> side(base.map.n);
  for (int e = 0; e < base.map.n; ++e) side[e] = z[e];
  (void)c;
  return build_surface(base.map, base.d, side, base.rot);
}

inline double min_corner_sine(const CombinatorialMap& m, const std::vector<cd>& z) {
  double worst = 1.0;
  for (const auto& f : m.faces)
    for (int i = 0; i < 3; ++i) {
      cd u = z[f[i]], w = -z[f[(i + 2) % 3]];
      worst = std::min(worst, cross(u, w) / (std::abs(u) * std::abs(w)));
    }
  return worst;
}

// Random walk inside the eigenspace, keeping every cover triangle non-degenerate.
template <class Rng>
DDiffSurface perturb(const DDiffSurface& s, Rng& rng, int steps = 8, double step = 0.15, double min_sine = 0.05) {
  TranslationCover c = build_cover(s);
  Subspace<cd> V = eigen_cochains<cd>(c);
  const auto& m = c.map;
  std::vector<cd> z = c.z;
  std::normal_distribution<double> nd(0.0, 1.0);
  double scale = std::sqrt(c.area / std::max(1, m.num_faces()));
  for (int it = 0; it < steps; ++it) {
    std::vector<cd> coef(V.dim());
    for (auto& x : coef) x = cd(nd(rng), nd(rng));
    std::vector<cd> dz(m.n, 0.0);
    double norm = 0.0;
    for (int ei = 0; ei < m.num_edges(); ++ei) {
      cd val = 0.0;
      for (int j = 0; j < V.dim(); ++j) val += V.basis(ei, j) * coef[j];
      dz[m.edges[ei]] = val;
      dz[m.s0[m.edges[ei]]] = -val;
      norm = std::max(norm, std::abs(val));
    }
    if (norm == 0.0) break;
    double t = step * scale / norm;
    for (int tries = 0; tries < 6; ++tries, t *= 0.5) {
      std::vector<cd> z2(m.n);
      for (int e = 0; e < m.n; ++e) z2[e] = z[e] + t * dz[e];
      if (min_corner_sine(m, z2) >= min_sine) {
        z = std::move(z2);
        break;
      }
    }
  }
  return surface_from_cover_periods(s, c, z);
}

}  // namespace ddvol
