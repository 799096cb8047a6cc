#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

#include "ddvol/cohomology.hpp"
#include "ddvol/delaunay.hpp"

namespace ddvol {

// W_o: solutions of the face and deck relations on the cover triangulation.
template <class F>
Subspace<F> chart_space(const TranslationCover& o, const LinConfig& cfg = {}) {
  return eigenspace_V<F>(o, cfg);
}

// Per-dart values of a cochain given per edge.
inline std::vector<cd> dart_values(const CombinatorialMap& m, const std::vector<cd>& per_edge) {
  std::vector<cd> z(m.n);
  for (int e = 0; e < m.n; ++e) z[e] = per_edge[m.edge_of[e]] * static_cast<double>(m.orientation(e));
  return z;
}

struct MembershipReport {
  bool member = false;
  std::vector<int> bad_faces;   // faces with non-positive area
  std::vector<int> kappa;       // orders of the quotient surface, sorted
  bool kappa_match = false;
  bool component_resolved = false;  // connected-component identity is not decided
  std::string reason;
};

// z in W_o given per dart; checks positivity of every face and the order profile of the quotient.
inline MembershipReport membership_U(const std::vector<cd>& z, const TranslationCover& o, std::vector<int> kappa) {
  MembershipReport r;
  const auto& m = o.map;
  for (int f = 0; f < m.num_faces(); ++f)
    if (!(face_area(z, m.faces[f]) > 0.0)) r.bad_faces.push_back(f);
  if (!r.bad_faces.empty()) {
    r.reason = "face " + std::to_string(r.bad_faces[0]) + " has non-positive area";
    return r;
  }
  TranslationCover c = o;
  c.z = z;
  c.zq.reset();
  c.area = cover_area(m, z);
  c.eps_geom = GeomConfig{}.eps_geom_rel * std::sqrt(c.area);
  try {
    DDiffSurface q = quotient_surface(c);
    r.kappa = q.kappa;
  } catch (const Error& e) {
    r.reason = e.what();
    return r;
  }
  std::sort(r.kappa.begin(), r.kappa.end());
  std::sort(kappa.begin(), kappa.end());
  r.kappa_match = r.kappa == kappa;
  r.member = r.kappa_match;
  if (!r.kappa_match) r.reason = "order profile differs";
  return r;
}

// A closed path in the dual graph: faces[i] is left through exits[i] into faces[i+1].
struct DualCycle {
  std::vector<int> faces;
  std::vector<int> exits;
  std::vector<int> edges;  // sorted
  Chain core;              // chain homologous to the core curve
};

// Right-hand boundary walk: a closed dart chain whose period is z(gamma).
inline Chain core_chain(const CombinatorialMap& m, const std::vector<int>& exits) {
  Chain ch(m.num_edges(), 0);
  for (size_t i = 0; i < exits.size(); ++i) {
    int entry = m.s0[exits[i]];
    int nxt = exits[(i + 1) % exits.size()];
    int b = m.s2[entry];
    if (nxt != b) add_dart(m, ch, b);
  }
  return ch;
}

inline DualCycle make_dual_cycle(const CombinatorialMap& m, const std::vector<int>& exits) {
  DualCycle c;
  c.exits = exits;
  for (int x : exits) {
    c.faces.push_back(m.face[x]);
    c.edges.push_back(m.edge_of[x]);
  }
  std::sort(c.edges.begin(), c.edges.end());
  c.core = core_chain(m, exits);
  return c;
}

// Exit darts for a simple cycle of the dual graph; nodes[i] --links[i]--> nodes[i+1].
inline std::vector<int> cycle_exits(const CombinatorialMap& m, const SimpleCycle& sc) {
  std::vector<int> exits;
  size_t L = sc.links.size();
  for (size_t i = 0; i < L; ++i) {
    int x = m.edges[sc.links[i]];
    int f = sc.nodes[i];
    if (m.face[x] != f) x = m.s0[x];
    exits.push_back(x);
  }
  return exits;
}

inline DualCycle image_cycle(const TranslationCover& c, const DualCycle& g, int power) {
  std::vector<int> ex = g.exits;
  for (auto& x : ex)
    for (int j = 0; j < power; ++j) x = c.T[x];
  return make_dual_cycle(c.map, ex);
}

struct AdmissibleFamily {
  int k = 0;
  std::vector<std::vector<DualCycle>> gamma;  // gamma[i][j] = T^j gamma[i][0]
  std::vector<int> crossing;                  // e_1..e_k, canonical darts
  std::vector<int> completion;                // e_{k+1}..e_N, canonical darts
  std::vector<char> in_E;                     // edge -> crossed by some gamma_ij
  bool complete = false;
};

inline bool faces_disjoint(const DualCycle& a, const DualCycle& b) {
  for (int f : a.faces)
    if (std::find(b.faces.begin(), b.faces.end(), f) != b.faces.end()) return false;
  return true;
}

// Orbit under T of a simple cycle, with gamma_0 the member crossing the smallest edge; nullopt if not free/disjoint.
inline std::optional<std::vector<DualCycle>> cycle_orbit(const TranslationCover& c, const DualCycle& g) {
  std::vector<DualCycle> orb;
  for (int j = 0; j < c.d; ++j) orb.push_back(image_cycle(c, g, j));
  for (int a = 0; a < c.d; ++a)
    for (int b = a + 1; b < c.d; ++b)
      if (!faces_disjoint(orb[a], orb[b])) return std::nullopt;
  int best = 0;
  for (int j = 1; j < c.d; ++j)
    if (orb[j].edges.front() < orb[best].edges.front()) best = j;
  std::vector<DualCycle> out;
  for (int j = 0; j < c.d; ++j) out.push_back(orb[(best + j) % c.d]);
  return out;
}

// Greedy completion of e_1..e_k by edges outside E_gamma so that the coordinate map has full rank.
template <class F>
void complete_family(const TranslationCover& o, const Subspace<F>& W, AdmissibleFamily& fam) {
  const auto& m = o.map;
  fam.in_E.assign(m.num_edges(), 0);
  fam.crossing.clear();
  fam.completion.clear();
  for (const auto& orb : fam.gamma) {
    for (const auto& g : orb)
      for (int e : g.edges) fam.in_E[e] = 1;
    fam.crossing.push_back(m.edges[orb[0].edges.front()]);
  }
  std::vector<int> chosen;
  for (int x : fam.crossing) chosen.push_back(m.edge_of[x]);
  int N = W.dim();
  Mat<F> rows = W.basis.rows(chosen);
  int rk = rank(rows);
  if (rk != static_cast<int>(chosen.size())) {
    fam.complete = false;
    return;
  }
  for (int e = 0; e < m.num_edges() && rk < N; ++e) {
    if (fam.in_E[e]) continue;
    std::vector<int> trial = chosen;
    trial.push_back(e);
    int r2 = rank(W.basis.rows(trial));
    if (r2 > rk) {
      chosen = std::move(trial);
      rk = r2;
      fam.completion.push_back(m.edges[e]);
    }
  }
  fam.complete = rk == N;
}

struct FamilyList {
  std::vector<AdmissibleFamily> families;
  bool truncated = false;
};

// All admissible families with at most max_k orbits, the empty family first.
template <class F>
FamilyList admissible_families(const TranslationCover& o, const Subspace<F>& W, int max_k,
                               size_t max_cycles = 100000, size_t max_families = 100000) {
  FamilyList out;
  CycleList cl = simple_cycles(dual_graph(o.map), max_cycles);
  out.truncated = cl.truncated;
  std::vector<std::vector<DualCycle>> orbits;
  std::set<std::vector<int>> seen;
  for (const auto& sc : cl.cycles) {
    DualCycle g = make_dual_cycle(o.map, cycle_exits(o.map, sc));
    if (seen.count(g.edges)) continue;
    auto orb = cycle_orbit(o, g);
    for (int j = 0; j < o.d; ++j) seen.insert(image_cycle(o, g, j).edges);
    if (orb) orbits.push_back(std::move(*orb));
  }
  std::vector<int> pick;
  auto disjoint_from_picked = [&](int i) {
    for (int p : pick)
      for (const auto& a : orbits[p])
        for (const auto& b : orbits[i])
          if (!faces_disjoint(a, b)) return false;
    return true;
  };
  auto emit = [&]() {
    AdmissibleFamily fam;
    fam.k = static_cast<int>(pick.size());
    for (int p : pick) fam.gamma.push_back(orbits[p]);
    complete_family(o, W, fam);
    out.families.push_back(std::move(fam));
  };
  auto rec = [&](auto&& self, int from) -> void {
    if (out.families.size() >= max_families) {
      out.truncated = true;
      return;
    }
    emit();
    if (static_cast<int>(pick.size()) >= max_k) return;
    for (int i = from; i < static_cast<int>(orbits.size()); ++i) {
      if (!disjoint_from_picked(i)) continue;
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

template <class F>
F chain_value(const CombinatorialMap& m, const Mat<F>& B, int col, const Chain& ch) {
  F s(0);
  for (int e = 0; e < m.num_edges(); ++e)
    if (ch[e]) s += B(e, col) * F(static_cast<long>(ch[e]));
  return s;
}

template <class F>
struct GammaCoefficients {
  // coef[i][j] = coefficients of z(gamma_ij) in the coordinates z(e_1..e_N)
  std::vector<std::vector<std::vector<F>>> coef;
  bool independent = true;
};

template <class F>
Mat<F> phi_matrix(const CombinatorialMap& m, const Subspace<F>& W, const AdmissibleFamily& fam) {
  std::vector<int> rows;
  for (int x : fam.crossing) rows.push_back(m.edge_of[x]);
  for (int x : fam.completion) rows.push_back(m.edge_of[x]);
  return W.basis.rows(rows);
}

// z(gamma_ij) expressed in the coordinates; the first k coefficients must vanish.
template <class F>
GammaCoefficients<F> gamma_period_independence(const TranslationCover& o, const Subspace<F>& W,
                                               const AdmissibleFamily& fam, double tol = 1e-9) {
  GammaCoefficients<F> out;
  if (!fam.complete) fail(ErrorCode::RankDeficiency, "family has no completion");
  Mat<F> P = phi_matrix(o.map, W, fam);
  Mat<F> Pinv = inverse(P);
  int N = W.dim();
  for (const auto& orb : fam.gamma) {
    out.coef.emplace_back();
    for (const auto& g : orb) {
      Mat<F> row(1, N);
      for (int j = 0; j < N; ++j) row(0, j) = chain_value(o.map, W.basis, j, g.core);
      Mat<F> c = row * Pinv;
      std::vector<F> v(c.v.begin(), c.v.end());
      double scale = 0.0;
      for (const auto& x : v) scale = std::max(scale, std::abs(to_complex(x)));
      for (int i = 0; i < fam.k; ++i) {
        if constexpr (std::is_same_v<F, Cyc>) {
          if (!v[i].is_zero()) out.independent = false;
        } else {
          if (std::abs(v[i]) > tol * std::max(1.0, scale)) out.independent = false;
        }
      }
      out.coef.back().push_back(std::move(v));
    }
  }
  return out;
}

struct U1Report {
  bool in_U = false;
  double area = 0.0;
  bool area_ok = false;
  bool short_ok = false;
  int worst_edge = -1;
  double worst_len = 0.0;
  std::vector<double> ell, x, y;
  std::vector<char> x_ok, y_ok;
  bool member = false;
};

// Membership in U^1_o(gamma, alpha) for z given per dart.
inline U1Report in_U1(const std::vector<cd>& z, const TranslationCover& o, const AdmissibleFamily& fam,
                      const DelaunayConfig& cfg = {}) {
  const auto& m = o.map;
  U1Report r;
  r.in_U = true;
  for (const auto& f : m.faces)
    if (!(face_area(z, f) > 0.0)) r.in_U = false;
  r.area = cover_area(m, z);
  r.area_ok = r.area <= 1.0;
  double cap = std::sqrt(2.0) * cfg.alpha;
  r.short_ok = true;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!fam.in_E.empty() && fam.in_E[e]) continue;
    double len = std::abs(z[m.edges[e]]);
    if (len > r.worst_len) r.worst_len = len, r.worst_edge = e;
    if (len > cap) r.short_ok = false;
  }
  bool all_xy = true;
  for (int i = 0; i < fam.k; ++i) {
    cd zg = 0.0;
    const Chain& ch = fam.gamma[i][0].core;
    for (int e = 0; e < m.num_edges(); ++e)
      if (ch[e]) zg += static_cast<double>(ch[e]) * z[m.edges[e]];
    double ell = std::abs(zg);
    if (!(ell > 0.0)) fail(ErrorCode::DegenerateCycle, "z(gamma_" + std::to_string(i + 1) + "0) = 0");
    cd w = z[fam.crossing[i]] * std::conj(zg);
    double x = w.real() / ell, y = w.imag() / ell;
    r.ell.push_back(ell);
    r.x.push_back(x);
    r.y.push_back(y);
    r.x_ok.push_back(std::abs(x) <= ell);
    r.y_ok.push_back(std::abs(y) < 2.0 / ell);
    if (!r.x_ok.back() || !r.y_ok.back()) all_xy = false;
  }
  r.member = r.in_U && r.area_ok && r.short_ok && all_xy;
  return r;
}

struct BoundingVolume {
  double value = 0.0;
  std::optional<mpz_class> exact;  // 8^k 16^(N-k) when alpha takes its default value
};

inline BoundingVolume bounding_volume(int k, int N, const DelaunayConfig& cfg = {}) {
  BoundingVolume b;
  double disc = 2.0 * kPi * cfg.alpha * cfg.alpha;
  b.value = std::pow(8.0, k) * std::pow(disc, N - k);
  if (cfg.alpha == DelaunayConfig{}.alpha) {
    mpz_class v = 1;
    v <<= static_cast<unsigned long>(4 * N - k);
    b.exact = v;
    b.value = v.get_d();
  }
  return b;
}

struct Witness {
  double scale = 1.0;  // factor applied to the periods so that the area is at most 1
  DelaunayResult delaunay;
  std::vector<Cylinder> cylinders;
  AdmissibleFamily family;
  U1Report report;
  double roundtrip_error = 0.0;
  bool ok = false;
};

inline TranslationCover scaled_cover(const TranslationCover& c, double s) {
  TranslationCover out = c;
  for (auto& x : out.z) x *= s;
  out.zq.reset();
  out.area = cover_area(out.map, out.z);
  out.eps_geom = GeomConfig{}.eps_geom_rel * std::sqrt(out.area);
  return out;
}

// Scale bringing the area to at most 1; the margin absorbs rounding when the area is recomputed from new diagonals.
inline double normalizing_scale(double area) {
  if (area <= 1.0 - 1e-12) return 1.0;
  return std::sqrt((1.0 - 1e-12) / area);
}

// Invariant Delaunay triangulation plus long-cylinder family, asserted to lie in U^1.
inline Witness cover_witness(const TranslationCover& c_in, const DelaunayConfig& cfg = {}) {
  Witness w;
  w.scale = normalizing_scale(c_in.area);
  TranslationCover c = w.scale == 1.0 ? c_in : scaled_cover(c_in, w.scale);
  w.delaunay = invariant_delaunay(c, cfg);
  const TranslationCover& o = w.delaunay.cover;
  w.cylinders = detect_cylinders(o, cfg);
  // group into T-orbits
  std::vector<char> used(w.cylinders.size(), 0);
  AdmissibleFamily& fam = w.family;
  for (size_t a = 0; a < w.cylinders.size(); ++a) {
    if (used[a]) continue;
    DualCycle g = make_dual_cycle(o.map, w.cylinders[a].crossing);
    auto orb = cycle_orbit(o, g);
    if (!orb) fail(ErrorCode::WitnessFailed, "deck map does not act freely on the long cylinders");
    for (const auto& member : *orb)
      for (size_t b = 0; b < w.cylinders.size(); ++b)
        if (w.cylinders[b].edges == member.edges) used[b] = 1;
    fam.gamma.push_back(std::move(*orb));
  }
  std::sort(fam.gamma.begin(), fam.gamma.end(),
            [](const auto& x, const auto& y) { return x[0].edges.front() < y[0].edges.front(); });
  fam.k = static_cast<int>(fam.gamma.size());
  for (size_t i = 0; i < fam.gamma.size(); ++i)
    for (size_t j = i + 1; j < fam.gamma.size(); ++j)
      for (const auto& a : fam.gamma[i])
        for (const auto& b : fam.gamma[j])
          if (!faces_disjoint(a, b)) fail(ErrorCode::WitnessFailed, "long cylinders overlap");
  Subspace<cd> W = eigen_cochains<cd>(o);
  complete_family(o, W, fam);
  if (!fam.complete) fail(ErrorCode::WitnessFailed, "crossing edges cannot be completed to coordinates");
  // coordinates of the sample and reconstruction from them
  Mat<cd> P = phi_matrix(o.map, W, fam);
  Mat<cd> phi(W.dim(), 1);
  std::vector<int> coords;
  for (int x : fam.crossing) coords.push_back(x);
  for (int x : fam.completion) coords.push_back(x);
  for (size_t i = 0; i < coords.size(); ++i) phi(static_cast<int>(i), 0) = o.z[coords[i]];
  Mat<cd> rec = W.basis * solve(P, phi);
  for (int e = 0; e < o.map.num_edges(); ++e)
    w.roundtrip_error = std::max(w.roundtrip_error, std::abs(rec(e, 0) - o.z[o.map.edges[e]]));
  w.report = in_U1(o.z, o, fam, cfg);
  w.ok = w.report.member;
  if (!w.ok) {
    std::string why = !w.report.in_U ? "a face is degenerate"
                      : !w.report.area_ok ? "area exceeds 1"
                      : !w.report.short_ok ? "edge " + std::to_string(w.report.worst_edge) + " outside E_gamma has length " +
                                                 std::to_string(w.report.worst_len)
                                           : "crossing coordinates out of range";
    fail(ErrorCode::WitnessFailed, why);
  }
  return w;
}

// Counter-based generator: the value at (block, counter) depends only on the seed.
struct SplitMix64 {
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  uint64_t seed, block, counter = 0;
  SplitMix64(uint64_t s, uint64_t b) : seed(s), block(b) {}
  uint64_t next() { return mix(mix(seed ^ mix(block)) + 0x632be59bd9b4e019ULL * ++counter); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

inline int thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* s = std::getenv("DDVOL_THREADS")) {
    int v = std::atoi(s);
    if (v >= 1) return std::min<int>(v, static_cast<int>(hw));
  }
  return static_cast<int>(hw);
}

struct MCEstimate {
  uint64_t seed = 0;
  long samples = 0, accepted = 0;
  double bound = 0.0;
  double estimate = 0.0, stderr_ = 0.0;
  double projectivized = 0.0;  // estimate / d
};

// Rejection sampling of U^1_o(gamma, alpha) inside the box |x_i| <= l_i, |y_i| <= 2/l_i, |w| <= sqrt(2) alpha.
inline MCEstimate mc_estimate(const TranslationCover& o, const AdmissibleFamily& fam, long n_samples, uint64_t seed,
                              const DelaunayConfig& cfg = {}, int threads = 0) {
  const auto& m = o.map;
  Subspace<cd> W = eigen_cochains<cd>(o);
  int N = W.dim(), k = fam.k;
  if (!fam.complete) fail(ErrorCode::RankDeficiency, "family has no completion");
  Mat<cd> P = phi_matrix(m, W, fam);
  Mat<cd> M = W.basis * inverse(P);  // edge values from coordinates
  // z(gamma_i0) as a linear form in the coordinates
  std::vector<std::vector<cd>> gam(k, std::vector<cd>(N, 0.0));
  for (int i = 0; i < k; ++i)
    for (int e = 0; e < m.num_edges(); ++e)
      if (fam.gamma[i][0].core[e])
        for (int j = 0; j < N; ++j) gam[i][j] += static_cast<double>(fam.gamma[i][0].core[e]) * M(e, j);
  std::vector<int> target = o.kappa_hat;
  std::sort(target.begin(), target.end());
  double radius = std::sqrt(2.0) * cfg.alpha;
  BoundingVolume bv = bounding_volume(k, N, cfg);
  const long block = 4096;
  long nblocks = (n_samples + block - 1) / block;
  int nt = threads > 0 ? threads : thread_cap();
  nt = static_cast<int>(std::max<long>(1, std::min<long>(nt, nblocks)));
  std::vector<long> acc(static_cast<size_t>(nblocks), 0);
  auto work = [&](int t) {
    std::vector<cd> w(N), zE(m.num_edges()), z(m.n);
    for (long b = t; b < nblocks; b += nt) {
      SplitMix64 rng(seed, static_cast<uint64_t>(b));
      long count = std::min(block, n_samples - b * block);
      long a = 0;
      for (long s = 0; s < count; ++s) {
        for (int j = k; j < N; ++j) {
          // uniform in the disc of the given radius
          double rr = radius * std::sqrt(rng.uniform()), th = 2.0 * kPi * rng.uniform();
          w[j] = std::polar(rr, th);
        }
        bool ok = true;
        for (int i = 0; i < k; ++i) {
          cd zg = 0.0;
          for (int j = k; j < N; ++j) zg += gam[i][j] * w[j];
          double ell = std::abs(zg);
          double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
          if (!(ell > 0.0)) {
            ok = false;
            continue;
          }
          w[i] = cd(x * ell, y * 2.0 / ell) * (zg / ell);
          if (!(std::abs(y * 2.0 / ell) < 2.0 / ell)) ok = false;
        }
        if (!ok) continue;
        for (int e = 0; e < m.num_edges(); ++e) {
          cd v = 0.0;
          for (int j = 0; j < N; ++j) v += M(e, j) * w[j];
          zE[e] = v;
        }
        z = dart_values(m, zE);
        double area = 0.0;
        for (const auto& f : m.faces) {
          double fa = face_area(z, f);
          if (!(fa > 0.0)) ok = false;
          area += fa;
        }
        if (!ok || area > 1.0) continue;
        for (int e = 0; e < m.num_edges() && ok; ++e)
          if (!fam.in_E[e] && std::abs(zE[e]) > radius) ok = false;
        if (!ok) continue;
        std::vector<int> kap;
        try {
          kap = cone_orders_raw(m, z, 1, GeomConfig{});
        } catch (const Error&) {
          continue;
        }
        std::sort(kap.begin(), kap.end());
        if (kap == target) ++a;
      }
      acc[static_cast<size_t>(b)] = a;
    }
  };
  if (nt == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  MCEstimate r;
  r.seed = seed;
  r.samples = n_samples;
  for (long a : acc) r.accepted += a;
  r.bound = bv.value;
  double p = n_samples ? static_cast<double>(r.accepted) / n_samples : 0.0;
  r.estimate = r.bound * p;
  r.stderr_ = n_samples ? r.bound * std::sqrt(p * (1.0 - p) / n_samples) : 0.0;
  r.projectivized = r.estimate / o.d;
  return r;
}

}  // namespace ddvol
