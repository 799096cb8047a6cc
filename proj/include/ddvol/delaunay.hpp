#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ddvol/cover.hpp"

namespace ddvol {

struct DelaunayConfig {
  double alpha = 2.0 * std::sqrt(2.0 / kPi);
  double tie_tol = 1e-9;  // angle slack below which co-circular edges are left alone
  int max_flips = 0;      // 0 picks 100 * darts + 1000
};

// Mutable triangulation used during flipping: darts keep their identity, faces are sigma2-cycles.
struct FlipState {
  int n = 0;
  std::vector<int> s0, s2, vlabel;
  std::vector<cd> z;
  std::optional<std::vector<QC>> zq;
};

inline FlipState flip_state(const TranslationCover& c) {
  FlipState st;
  st.n = c.map.n;
  st.s0 = c.map.s0;
  st.s2 = c.map.s2;
  st.vlabel = c.map.vert;
  st.z = c.z;
  st.zq = c.zq;
  return st;
}

inline double angle_between(cd u, cd w) { return std::atan2(cross(u, w), dot(u, w)); }

// Sum of the two corner angles opposite the edge of e, minus pi.
inline double flip_violation(const FlipState& st, int e) {
  int b = st.s2[e], c = st.s2[b];
  int f = st.s0[e], b2 = st.s2[f], c2 = st.s2[b2];
  double at_r = angle_between(st.z[c], -st.z[b]);
  double at_s = angle_between(st.z[c2], -st.z[b2]);
  return at_r + at_s - kPi;
}

// Sign of the incircle determinant: > 0 iff the far vertex lies strictly inside the circumcircle.
inline int incircle_sign(const FlipState& st, int e) {
  const auto& q = *st.zq;
  int b = st.s2[e];
  int f = st.s0[e], b2 = st.s2[f];
  QC P(Q(0), Q(0)), Qp = q[e], R = q[e] + q[b], S = q[b2];
  auto row = [&](const QC& a) {
    QC t = a - S;
    return std::array<Q, 3>{t.re, t.im, t.re * t.re + t.im * t.im};
  };
  auto A = row(P), B = row(Qp), C = row(R);
  Q det = A[0] * (B[1] * C[2] - B[2] * C[1]) - A[1] * (B[0] * C[2] - B[2] * C[0]) + A[2] * (B[0] * C[1] - B[1] * C[0]);
  return sgn(det);
}

inline bool needs_flip(const FlipState& st, int e, const DelaunayConfig& cfg) {
  if (st.zq) return incircle_sign(st, e) > 0;
  return flip_violation(st, e) > cfg.tie_tol;
}

inline void flip_edge(FlipState& st, int e) {
  int b = st.s2[e], c = st.s2[b];
  int f = st.s0[e], b2 = st.s2[f], c2 = st.s2[b2];
  st.z[e] = -(st.z[c] + st.z[b2]);
  st.z[f] = -st.z[e];
  if (st.zq) {
    auto& q = *st.zq;
    q[e] = -(q[c] + q[b2]);
    q[f] = -q[e];
  }
  st.s2[c] = b2;
  st.s2[b2] = e;
  st.s2[e] = c;
  st.s2[c2] = b;
  st.s2[b] = f;
  st.s2[f] = c2;
  st.vlabel[e] = st.vlabel[c2];
  st.vlabel[f] = st.vlabel[c];
}

struct DelaunayResult {
  TranslationCover cover;
  std::vector<int> flips;  // flipped darts in order
  double max_violation = 0.0;
  bool certified = false;
};

inline CombinatorialMap map_of(const FlipState& st) {
  std::vector<int> s2inv = invert(st.s2), s1(st.n);
  for (int x = 0; x < st.n; ++x) s1[x] = st.s0[s2inv[x]];
  return build_map(st.n, st.s0, s1);
}

// Largest remaining violation (or -inf when empty), and whether any edge still needs a flip.
inline std::pair<double, bool> delaunay_certificate(const FlipState& st, const DelaunayConfig& cfg) {
  double worst = -kPi;
  bool bad = false;
  for (int e = 0; e < st.n; ++e) {
    if (e > st.s0[e]) continue;
    worst = std::max(worst, flip_violation(st, e));
    if (needs_flip(st, e, cfg)) bad = true;
  }
  return {worst, bad};
}

inline TranslationCover rebuild_cover(const TranslationCover& c, const FlipState& st) {
  TranslationCover out;
  out.map = map_of(st);
  out.T = c.T;
  out.d = c.d;
  out.k = c.k;
  out.z = st.z;
  out.zq = st.zq;
  if (out.zq)
    for (int x = 0; x < st.n; ++x) out.z[x] = (*out.zq)[x].to_cd();
  out.base_kappa = c.base_kappa;
  out.base_g = c.base_g;
  std::vector<int> dart_fiber(st.n);
  for (int x = 0; x < st.n; ++x) dart_fiber[x] = c.fiber[st.vlabel[x]];
  GeomConfig g;
  finish_cover(out, dart_fiber, g);
  out.eps_geom = c.eps_geom;
  return out;
}

// Flips whole T-orbits of edges (single edges when invariant is false) until the empty-circumdisk condition holds.
inline DelaunayResult run_delaunay(const TranslationCover& c, bool invariant, const DelaunayConfig& cfg = {}) {
  FlipState st = flip_state(c);
  int limit = cfg.max_flips > 0 ? cfg.max_flips : 100 * st.n + 1000;
  DelaunayResult res;
  for (;;) {
    int best = -1;
    double bv = 0.0;
    for (int e = 0; e < st.n; ++e) {
      if (e > st.s0[e]) continue;
      if (!needs_flip(st, e, cfg)) continue;
      double v = flip_violation(st, e);
      if (best < 0 || v > bv) best = e, bv = v;
    }
    if (best < 0) break;
    if (static_cast<int>(res.flips.size()) >= limit)
      fail(ErrorCode::FlipLimitExceeded, "more than " + std::to_string(limit) + " flips");
    if (invariant) {
      int x = best;
      for (int j = 0; j < c.d; ++j) {
        flip_edge(st, x);
        res.flips.push_back(x);
        x = c.T[x];
      }
    } else {
      flip_edge(st, best);
      res.flips.push_back(best);
    }
  }
  auto [worst, bad] = delaunay_certificate(st, cfg);
  res.max_violation = worst;
  res.certified = !bad;
  res.cover = rebuild_cover(c, st);
  if (invariant && c.d > 1) check_automorphism(res.cover.map, res.cover.T, c.d);
  return res;
}

// Plain flip algorithm; on a cover with d > 1 the result need not be T-invariant.
inline DelaunayResult delaunay_flip(const TranslationCover& c, const DelaunayConfig& cfg = {}) {
  return run_delaunay(c, false, cfg);
}

inline DelaunayResult invariant_delaunay(const TranslationCover& c, const DelaunayConfig& cfg = {}) {
  return run_delaunay(c, true, cfg);
}

// Empty-circumdisk check on a finished triangulation.
inline bool is_delaunay(const TranslationCover& c, const DelaunayConfig& cfg = {}) {
  return !delaunay_certificate(flip_state(c), cfg).second;
}

inline bool is_T_invariant(const TranslationCover& c, double tol) {
  for (int x = 0; x < c.map.n; ++x) {
    if (c.map.s2[c.T[x]] != c.T[c.map.s2[x]]) return false;
    if (std::abs(c.z[c.T[x]] - zeta_cd(c.d, c.k) * c.z[x]) > tol) return false;
  }
  return true;
}

// Canonical darts of edges longer than alpha * sqrt(area).
inline std::vector<int> long_edges(const TranslationCover& c, const DelaunayConfig& cfg = {}) {
  std::vector<int> out;
  double thr = cfg.alpha * std::sqrt(c.area);
  for (int e : c.map.edges)
    if (std::abs(c.z[e]) > thr) out.push_back(e);
  return out;
}

struct Cylinder {
  cd direction;
  double ell = 0.0;
  double h = 0.0;
  cd period;                 // z of the core curve, oriented with direction
  std::vector<int> faces;    // dual cycle nodes in order
  std::vector<int> crossing; // exit dart of each face (the dual cycle links)
  double chain_area = 0.0;
  double low = 0.0, high = 0.0;  // strip bounds in the frame where the core is horizontal
  std::vector<int> edges;        // sorted indices of the crossed edges
};

// Develops the face chain and extracts the strip; nullopt when the chain is not an annulus with positive height.
inline std::optional<Cylinder> develop_chain(const TranslationCover& c, const std::vector<int>& exits) {
  const auto& m = c.map;
  cd tail = 0.0;
  cd head = c.z[exits[0]];
  std::vector<cd> pts_right{tail}, pts_left{head};
  std::vector<int> faces;
  for (size_t i = 1; i <= exits.size(); ++i) {
    int prev = exits[i - 1];
    int entry = m.s0[prev];  // runs head -> tail of prev, inside the next face
    int f = m.face[entry];
    faces.push_back(f);
    int nxt = i < exits.size() ? exits[i] : exits[0];
    if (i == exits.size() && m.face[nxt] != f) return std::nullopt;
    // entry goes from head to tail; the third vertex is at tail + z(s2 entry)
    int b = m.s2[entry];
    cd third = tail + c.z[b];
    if (nxt == b) {
      // exit runs tail -> third
      head = third;
      pts_left.push_back(head);
    } else if (nxt == m.s2[b]) {
      // exit runs third -> head
      tail = third;
      pts_right.push_back(tail);
    } else {
      return std::nullopt;
    }
  }
  // after the loop, (tail, head) is the translate of the first exit
  cd per = tail - 0.0;
  if (std::abs((head - tail) - c.z[exits[0]]) > 1e-6 * std::abs(c.z[exits[0]])) return std::nullopt;
  double ell = std::abs(per);
  if (!(ell > 0.0)) return std::nullopt;
  cd u = per / ell;
  double low = -1e300, high = 1e300;
  for (cd p : pts_right) low = std::max(low, (p * std::conj(u)).imag());
  for (cd p : pts_left) high = std::min(high, (p * std::conj(u)).imag());
  // tails lie on the right of the travel direction, which is below the core
  Cylinder cyl;
  cyl.h = high - low;
  if (!(cyl.h > 0.0)) return std::nullopt;
  cyl.ell = ell;
  cyl.period = per;
  cyl.direction = u;
  cyl.low = low;
  cyl.high = high;
  // faces[i] is entered through exits[i-1]; rotate so faces[0] holds exits[0]
  std::rotate(faces.begin(), faces.end() - 1, faces.end());
  cyl.faces = faces;
  cyl.crossing = exits;
  for (int f : faces) cyl.chain_area += face_area(c.z, m.faces[f]);
  for (int x : exits) cyl.edges.push_back(m.edge_of[x]);
  std::sort(cyl.edges.begin(), cyl.edges.end());
  return cyl;
}

inline void canonicalize_direction(Cylinder& cyl) {
  if (cyl.direction.real() < 0 || (cyl.direction.real() == 0 && cyl.direction.imag() < 0)) {
    cyl.direction = -cyl.direction;
    cyl.period = -cyl.period;
    std::tie(cyl.low, cyl.high) = std::make_pair(-cyl.high, -cyl.low);
  }
}

// Long cylinders of a Delaunay triangulation, found by walking across long edges.
inline std::vector<Cylinder> detect_cylinders(const TranslationCover& c, const DelaunayConfig& cfg = {}) {
  const auto& m = c.map;
  double thr = cfg.alpha * std::sqrt(c.area);
  std::vector<char> is_long(m.num_edges(), 0);
  for (int e : long_edges(c, cfg)) is_long[m.edge_of[e]] = 1;
  std::vector<Cylinder> out;
  std::set<std::vector<int>> seen;
  for (int start : m.edges) {
    if (!is_long[m.edge_of[start]]) continue;
    bool covered = false;
    for (const auto& cyl : out)
      if (std::binary_search(cyl.edges.begin(), cyl.edges.end(), m.edge_of[start])) covered = true;
    if (covered) continue;
    // DFS over exits; each face offers the long sides other than the entry
    std::vector<int> path{start};
    std::vector<char> used_face(m.num_faces(), 0);
    std::optional<Cylinder> found;
    auto dfs = [&](auto&& self, int exit) -> void {
      if (found) return;
      int entry = m.s0[exit];
      int f = m.face[entry];
      for (int y : {m.s2[entry], m.s2[m.s2[entry]]}) {
        if (!is_long[m.edge_of[y]]) continue;
        if (y == start) {
          auto cyl = develop_chain(c, path);
          if (cyl && cyl->h > thr) found = cyl;
          if (found) return;
          continue;
        }
        if (used_face[f] || static_cast<int>(path.size()) > m.num_faces()) continue;
        used_face[f] = 1;
        path.push_back(y);
        self(self, y);
        path.pop_back();
        used_face[f] = 0;
        if (found) return;
      }
    };
    used_face[m.face[start]] = 1;
    dfs(dfs, start);
    if (!found) continue;
    canonicalize_direction(*found);
    if (seen.insert(found->edges).second) out.push_back(*found);
  }
  return out;
}

struct CrossingReport {
  double len = 0.0, x = 0.0, y = 0.0;
  bool lower = false, upper = false, diag = false, excess = false;
  bool x_ok = false, y_ok = false;
  bool all() const { return lower && upper && diag && excess && x_ok && y_ok; }
};

// Checks h <= |e| <= sqrt(h^2 + l^2) <= sqrt(2) h, |e| < h + sqrt(A)/alpha^3, |x| <= l, |y| < 2/l (area <= 1).
inline CrossingReport verify_crossing_bounds(const TranslationCover& c, int dart, const Cylinder& cyl,
                                             const DelaunayConfig& cfg = {}, double rel_tol = 1e-9) {
  int e = c.map.edge_of[dart];
  if (!std::binary_search(cyl.edges.begin(), cyl.edges.end(), e))
    fail(ErrorCode::PreconditionFailed, "edge " + std::to_string(e) + " does not cross the cylinder");
  CrossingReport r;
  cd z = c.z[dart];
  r.len = std::abs(z);
  cd w = z * std::conj(cyl.period);
  r.x = w.real() / cyl.ell;
  r.y = w.imag() / cyl.ell;
  double h = cyl.h, l = cyl.ell, A = c.area;
  double tol = rel_tol * std::max(1.0, r.len);
  double diag = std::sqrt(h * h + l * l);
  r.lower = h <= r.len + tol;
  r.upper = r.len <= diag + tol;
  r.diag = diag <= std::sqrt(2.0) * h + tol;
  r.excess = r.len < h + std::sqrt(A) / std::pow(cfg.alpha, 3) + tol;
  r.x_ok = std::abs(r.x) <= l + tol;
  r.y_ok = A > 1.0 + 1e-12 || std::abs(r.y) < 2.0 / l + tol;
  return r;
}

}  // namespace ddvol
