#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "ddvol/cover.hpp"
#include "ddvol/linalg.hpp"

namespace ddvol {

template <class F>
F zeta_pow(int d, long j);
template <>
inline Cyc zeta_pow<Cyc>(int d, long j) {
  return Cyc::zeta(d, j);
}
template <>
inline cd zeta_pow<cd>(int d, long j) {
  return zeta_cd(d, j);
}

using Chain = std::vector<long long>;  // integer coefficient per edge, canonical orientation

// Column space of `basis` inside the edge cochains of a cover.
template <class F>
struct Subspace {
  Mat<F> basis;  // E x dim
  int dim() const { return basis.c; }
  int ambient() const { return basis.r; }
};

template <class F>
F cochain_value(const CombinatorialMap& m, const Mat<F>& B, int col, int dart) {
  const F& x = B(m.edge_of[dart], col);
  return m.orientation(dart) > 0 ? x : -x;
}

template <class F>
Mat<F> face_relations(const CombinatorialMap& m) {
  Mat<F> A(m.num_faces(), m.num_edges());
  for (int f = 0; f < m.num_faces(); ++f)
    for (int x : m.faces[f]) A(f, m.edge_of[x]) += F(m.orientation(x));
  return A;
}

template <class F>
Subspace<F> relative_cocycles(const TranslationCover& c, const LinConfig& cfg = {}) {
  Subspace<F> s{kernel(face_relations<F>(c.map), cfg)};
  int expect = 2 * c.g_hat() + c.map.num_vertices() - 1;
  if (s.dim() != expect)
    fail(ErrorCode::DimensionMismatch, "dim V1 = " + std::to_string(s.dim()) + ", expected " + std::to_string(expect));
  return s;
}

inline int expected_dim_V(const TranslationCover& c) {
  int n = c.n_base();
  return c.d == 1 ? 2 * c.base_g + n - 1 : 2 * c.base_g + n - 2;
}

// V = V1 intersected with ker(T* - zeta), from the stacked face and deck relations; power p uses T^p and zeta^p.
template <class F>
Subspace<F> eigenspace_V(const TranslationCover& c, const LinConfig& cfg = {}) {
  const auto& m = c.map;
  Mat<F> A1 = face_relations<F>(m);
  Mat<F> A2(m.num_edges(), m.num_edges());
  F z = zeta_pow<F>(c.d, c.k);
  for (int ei = 0; ei < m.num_edges(); ++ei) {
    int x = m.edges[ei], y = c.T[x];
    A2(ei, m.edge_of[y]) += F(m.orientation(y));
    A2(ei, ei) -= z;
  }
  Subspace<F> s{kernel(vstack(A1, A2), cfg)};
  if (s.dim() != expected_dim_V(c))
    fail(ErrorCode::DimensionMismatch, "dim V = " + std::to_string(s.dim()) + ", expected " +
                                           std::to_string(expected_dim_V(c)));
  return s;
}

// Edge cochains v with v(T x) = zeta v(x) are determined by one value per T-orbit of edges.
struct OrbitReduction {
  std::vector<int> orbit;  // edge -> orbit index
  std::vector<int> power;  // edge -> j with canonical dart = +/- T^j(rep dart)
  std::vector<int> sign;   // edge -> orientation sign relative to T^j(rep dart)
  std::vector<int> reps;   // orbit -> canonical dart of the representative edge
  std::vector<int> face_reps;
};

inline OrbitReduction orbit_reduction(const TranslationCover& c) {
  const auto& m = c.map;
  OrbitReduction r;
  r.orbit.assign(m.num_edges(), -1);
  r.power.assign(m.num_edges(), 0);
  r.sign.assign(m.num_edges(), 1);
  for (int ei = 0; ei < m.num_edges(); ++ei) {
    if (r.orbit[ei] >= 0) continue;
    int id = static_cast<int>(r.reps.size());
    int x = m.edges[ei];
    r.reps.push_back(x);
    int y = x;
    for (int j = 0; j < c.d; ++j) {
      int e = m.edge_of[y];
      if (r.orbit[e] >= 0) fail(ErrorCode::NotFree, "deck transformation fixes edge " + std::to_string(e));
      r.orbit[e] = id;
      r.power[e] = j;
      r.sign[e] = m.orientation(y);
      y = c.T[y];
    }
  }
  std::vector<char> seen(m.num_faces(), 0);
  for (int f = 0; f < m.num_faces(); ++f) {
    if (seen[f]) continue;
    r.face_reps.push_back(f);
    int x = m.faces[f][0];
    for (int j = 0; j < c.d; ++j) {
      seen[m.face[x]] = 1;
      x = c.T[x];
    }
  }
  return r;
}

// Coefficient of the orbit unknown in v(dart) for the eigenvalue zeta^k.
template <class F>
std::pair<int, F> reduced_coefficient(const TranslationCover& c, const OrbitReduction& r, int dart) {
  int e = c.map.edge_of[dart];
  int s = r.sign[e] * c.map.orientation(dart);
  F z = zeta_pow<F>(c.d, static_cast<long>(c.k) * r.power[e]);
  return {r.orbit[e], s > 0 ? z : -z};
}

template <class F>
Mat<F> reduced_face_relations(const TranslationCover& c, const OrbitReduction& r) {
  Mat<F> A(static_cast<int>(r.face_reps.size()), static_cast<int>(r.reps.size()));
  for (size_t i = 0; i < r.face_reps.size(); ++i)
    for (int x : c.map.faces[r.face_reps[i]]) {
      auto [o, coef] = reduced_coefficient<F>(c, r, x);
      A(static_cast<int>(i), o) += coef;
    }
  return A;
}

template <class F>
Mat<F> lift_reduced(const TranslationCover& c, const OrbitReduction& r, const Mat<F>& U) {
  const auto& m = c.map;
  Mat<F> B(m.num_edges(), U.c);
  for (int ei = 0; ei < m.num_edges(); ++ei) {
    auto [o, coef] = reduced_coefficient<F>(c, r, m.edges[ei]);
    for (int j = 0; j < U.c; ++j) B(ei, j) = coef * U(o, j);
  }
  return B;
}

// V computed from one unknown per edge orbit and one relation per face orbit.
template <class F>
Subspace<F> eigen_cochains(const TranslationCover& c, const LinConfig& cfg = {}) {
  OrbitReduction r = orbit_reduction(c);
  Mat<F> U = kernel(reduced_face_relations<F>(c, r), cfg);
  Subspace<F> s{lift_reduced(c, r, U)};
  if (s.dim() != expected_dim_V(c))
    fail(ErrorCode::DimensionMismatch, "dim V = " + std::to_string(s.dim()) + ", expected " +
                                           std::to_string(expected_dim_V(c)));
  return s;
}

// Residuals of the defining relations of V; all zero iff each column lies in V.
template <class F>
Mat<F> V_residual(const TranslationCover& c, const Mat<F>& B, int power = 1) {
  const auto& m = c.map;
  Mat<F> A1 = face_relations<F>(m);
  Mat<F> R1 = A1 * B;
  Mat<F> R2(m.num_edges(), B.c);
  F z = zeta_pow<F>(c.d, static_cast<long>(c.k) * power);
  std::vector<int> Tp = perm_power(c.T, power);
  for (int ei = 0; ei < m.num_edges(); ++ei)
    for (int j = 0; j < B.c; ++j) R2(ei, j) = cochain_value(m, B, j, Tp[m.edges[ei]]) - z * B(ei, j);
  return vstack(R1, R2);
}

// ---------- homology ----------

inline void add_dart(const CombinatorialMap& m, Chain& ch, int dart, long long coef = 1) {
  ch[m.edge_of[dart]] += coef * m.orientation(dart);
}

inline Chain chain_image(const CombinatorialMap& m, const std::vector<int>& perm, const Chain& ch) {
  Chain out(m.num_edges(), 0);
  for (int ei = 0; ei < m.num_edges(); ++ei)
    if (ch[ei]) add_dart(m, out, perm[m.edges[ei]], ch[ei]);
  return out;
}

// Shortest dart path between two vertices (BFS, darts scanned in increasing order).
inline Chain vertex_path(const CombinatorialMap& m, int from, int to) {
  std::vector<int> via(m.num_vertices(), -2);
  via[from] = -1;
  std::vector<int> queue{from};
  for (size_t qi = 0; qi < queue.size() && via[to] == -2; ++qi) {
    int u = queue[qi];
    std::vector<int> out = m.vertices[u];
    std::sort(out.begin(), out.end());
    for (int e : out) {
      int v = m.head(e);
      if (via[v] != -2) continue;
      via[v] = e;
      queue.push_back(v);
    }
  }
  Chain ch(m.num_edges(), 0);
  for (int v = to; v != from; v = m.tail(via[v])) add_dart(m, ch, via[v]);
  return ch;
}

struct HomologyBasis {
  int g_hat = 0;
  std::vector<Chain> cycles;  // a_1..a_g, b_1..b_g
  std::vector<Chain> rel;     // c_1..c_r
  std::vector<int> s_hat;     // start vertex of each c_i
  std::vector<int> target;    // end vertex of each c_i
  std::vector<int> base_vertex;
  // Tree-cotree data: loops gamma_f and Kronecker dual cocycles phi_f with phi_f(gamma_g) = delta.
  std::vector<Chain> loops;
  std::vector<Chain> duals;
};

using IntMat = std::vector<std::vector<long long>>;

inline long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in symplectic reduction");
  return r;
}
inline long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in symplectic reduction");
  return r;
}

// Rows of S give a symplectic basis: S G S^T = J with ordering (a_1..a_g, b_1..b_g).
inline IntMat symplectic_reduce(IntMat G) {
  int n = static_cast<int>(G.size());
  IntMat B(n, std::vector<long long>(n, 0));
  for (int i = 0; i < n; ++i) B[i][i] = 1;
  auto row_add = [&](int dst, int src, long long q) {  // basis_dst += q basis_src
    if (q == 0) return;
    for (int j = 0; j < n; ++j) B[dst][j] = checked_add(B[dst][j], checked_mul(q, B[src][j]));
    for (int j = 0; j < n; ++j) G[dst][j] = checked_add(G[dst][j], checked_mul(q, G[src][j]));
    for (int j = 0; j < n; ++j) G[j][dst] = checked_add(G[j][dst], checked_mul(q, G[j][src]));
  };
  auto swap_basis = [&](int a, int b) {
    if (a == b) return;
    std::swap(B[a], B[b]);
    std::swap(G[a], G[b]);
    for (int j = 0; j < n; ++j) std::swap(G[j][a], G[j][b]);
  };
  auto negate = [&](int a) {
    for (auto& x : B[a]) x = -x;
    for (auto& x : G[a]) x = -x;
    for (int j = 0; j < n; ++j) G[j][a] = -G[j][a];
  };
  for (int t = 0; t < n; t += 2) {
    for (;;) {
      int best = -1;
      for (int j = t + 1; j < n; ++j)
        if (G[t][j] != 0 && (best < 0 || std::llabs(G[t][j]) < std::llabs(G[t][best]))) best = j;
      if (best < 0) fail(ErrorCode::DegenerateRestriction, "intersection form is degenerate");
      swap_basis(t + 1, best);
      bool clean = true;
      for (int m2 = t + 2; m2 < n; ++m2) {
        long long q = G[t][m2] / G[t][t + 1];
        row_add(m2, t + 1, -q);
        if (G[t][m2] != 0) clean = false;
      }
      if (clean) break;
    }
    if (G[t][t + 1] == -1) negate(t + 1);
    if (G[t][t + 1] != 1) fail(ErrorCode::DegenerateRestriction, "intersection form is not unimodular");
    for (int m2 = t + 2; m2 < n; ++m2) row_add(m2, t, -G[m2][t + 1]);
  }
  IntMat S;
  for (int t = 0; t < n; t += 2) S.push_back(B[t]);
  for (int t = 0; t < n; t += 2) S.push_back(B[t + 1]);
  return S;
}

// Integral of eta wedge mu over the surface for closed edge cochains, face by face.
template <class F, class VecA, class VecB>
F wedge_integral(const CombinatorialMap& m, const VecA& eta, const VecB& mu) {
  F total(0);
  for (const auto& f : m.faces) {
    int a = f[0], b = f[1];
    F ea = m.orientation(a) > 0 ? F(eta[m.edge_of[a]]) : -F(eta[m.edge_of[a]]);
    F eb = m.orientation(b) > 0 ? F(eta[m.edge_of[b]]) : -F(eta[m.edge_of[b]]);
    F ma = m.orientation(a) > 0 ? F(mu[m.edge_of[a]]) : -F(mu[m.edge_of[a]]);
    F mb = m.orientation(b) > 0 ? F(mu[m.edge_of[b]]) : -F(mu[m.edge_of[b]]);
    total += ea * mb - eb * ma;
  }
  return total;
}

inline long long pair_chain(const Chain& cochain, const Chain& chain) {
  long long s = 0;
  for (size_t i = 0; i < chain.size(); ++i) s += cochain[i] * chain[i];
  return s;
}

inline HomologyBasis symplectic_basis(const TranslationCover& c) {
  const auto& m = c.map;
  int E = m.num_edges();
  HomologyBasis hb;
  hb.g_hat = c.g_hat();

  // primal spanning tree
  std::vector<int> parent(m.num_vertices(), -2);
  std::vector<char> in_tree(E, 0);
  parent[0] = -1;
  std::vector<int> queue{0};
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int u = queue[qi];
    std::vector<int> out = m.vertices[u];
    std::sort(out.begin(), out.end());
    for (int e : out) {
      int v = m.head(e);
      if (parent[v] != -2) continue;
      parent[v] = e;
      in_tree[m.edge_of[e]] = 1;
      queue.push_back(v);
    }
  }
  auto root_path = [&](int v) {
    Chain ch(E, 0);
    for (; parent[v] >= 0; v = m.tail(parent[v])) add_dart(m, ch, parent[v]);
    return ch;
  };
  // dual spanning tree avoiding primal tree edges; fparent = dart of the child face through which it is entered
  std::vector<int> fparent(m.num_faces(), -2);
  std::vector<char> in_cotree(E, 0);
  fparent[0] = -1;
  queue = {0};
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int f = queue[qi];
    for (int x : m.faces[f]) {
      if (in_tree[m.edge_of[x]]) continue;
      int y = m.s0[x];
      int g = m.face[y];
      if (fparent[g] != -2) continue;
      fparent[g] = y;
      in_cotree[m.edge_of[x]] = 1;
      queue.push_back(g);
    }
  }
  // crossings from face f up to the root: entering the parent face through s0(fparent)
  auto up_chain = [&](int f) {
    Chain ch(E, 0);
    for (; fparent[f] >= 0; f = m.face[m.s0[fparent[f]]]) add_dart(m, ch, m.s0[fparent[f]]);
    return ch;
  };
  for (int ei = 0; ei < E; ++ei) {
    if (in_tree[ei] || in_cotree[ei]) continue;
    int x = m.edges[ei], y = m.s0[x];
    Chain loop = root_path(m.tail(x));
    add_dart(m, loop, x);
    Chain back = root_path(m.head(x));
    for (int i = 0; i < E; ++i) loop[i] -= back[i];
    Chain phi(E, 0);
    add_dart(m, phi, y);
    Chain uy = up_chain(m.face[y]), ux = up_chain(m.face[x]);
    for (int i = 0; i < E; ++i) phi[i] += uy[i] - ux[i];
    if (pair_chain(phi, loop) < 0)
      for (auto& v : loop) v = -v;
    hb.loops.push_back(std::move(loop));
    hb.duals.push_back(std::move(phi));
  }
  int L = static_cast<int>(hb.loops.size());
  if (L != 2 * hb.g_hat) fail(ErrorCode::DimensionMismatch, "tree-cotree leftover count differs from 2g");

  if (L > 0) {
    // cup product Gram of the dual cocycles; its inverse gives intersection numbers of the loops
    Mat<Cyc> G(L, L);
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) G(i, j) = wedge_integral<Cyc>(m, hb.duals[i], hb.duals[j]) * Cyc(Q(1, 2));
    Mat<Cyc> Ginv = inverse(G);
    IntMat I(L, std::vector<long long>(L, 0));
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) {
        const Cyc& x = Ginv(i, j);
        if (!x.is_rational() || x.a().get_den() != 1)
          fail(ErrorCode::DegenerateRestriction, "non-integral intersection number");
        I[i][j] = -x.a().get_num().get_si();
      }
    IntMat S = symplectic_reduce(I);
    for (int i = 0; i < L; ++i) {
      Chain ch(E, 0);
      for (int j = 0; j < L; ++j)
        if (S[i][j])
          for (int t = 0; t < E; ++t) ch[t] = checked_add(ch[t], checked_mul(S[i][j], hb.loops[j][t]));
      hb.cycles.push_back(std::move(ch));
    }
  }

  if (c.d == 1) {
    int n = m.num_vertices();
    for (int i = 0; i + 1 < n; ++i) {
      hb.rel.push_back(vertex_path(m, i, n - 1));
      hb.s_hat.push_back(i);
      hb.target.push_back(n - 1);
      hb.base_vertex.push_back(c.fiber[i]);
    }
  } else {
    for (int b = 0; b < c.n_base(); ++b) {
      if (c.base_kappa[b] % c.d != 0) continue;
      int s = -1;
      for (int v = 0; v < m.num_vertices(); ++v)
        if (c.fiber[v] == b) {
          s = v;
          break;
        }
      hb.rel.push_back(vertex_path(m, s, c.Tv[s]));
      hb.s_hat.push_back(s);
      hb.target.push_back(c.Tv[s]);
      hb.base_vertex.push_back(b);
    }
  }
  return hb;
}

// Relative paths from s_hat_i to T^p(s_hat_i), for the root zeta^p.
inline std::vector<Chain> relative_paths(const TranslationCover& c, const HomologyBasis& hb, int p) {
  std::vector<Chain> out;
  if (c.d == 1) return hb.rel;
  std::vector<int> Tp = perm_power(c.Tv, mod(p, c.d));
  for (int s : hb.s_hat) out.push_back(vertex_path(c.map, s, Tp[s]));
  return out;
}

template <class F>
Mat<F> chain_matrix(const std::vector<Chain>& chains, int E) {
  Mat<F> M(static_cast<int>(chains.size()), E);
  for (size_t i = 0; i < chains.size(); ++i)
    for (int j = 0; j < E; ++j)
      if (chains[i][j]) M(static_cast<int>(i), j) = F(static_cast<long>(chains[i][j]));
  return M;
}

template <class F>
Mat<F> J_matrix(int g) {
  Mat<F> J(2 * g, 2 * g);
  for (int i = 0; i < g; ++i) {
    J(i, g + i) = F(1);
    J(g + i, i) = F(-1);
  }
  return J;
}

// Anti-Hermitian matrix Pi^T J conj(Pi) of the pairing sum_j eta(a_j) conj(mu(b_j)) - eta(b_j) conj(mu(a_j)).
template <class F>
Mat<F> period_pairing(const Mat<F>& Pi, int g) {
  return Pi.transpose() * J_matrix<F>(g) * conj(Pi);
}

// Hermitian matrix (i/2) Pi^T J conj(Pi) of the intersection form on the given cochains.
inline Mat<cd> intersection_form(const HomologyBasis& hb, const Mat<cd>& B) {
  Mat<cd> Pi = chain_matrix<cd>(hb.cycles, B.r) * B;
  Mat<cd> M = period_pairing(Pi, hb.g_hat);
  for (auto& x : M.v) x *= cd(0.0, 0.5);
  return M;
}

struct Inertia {
  int pos = 0, neg = 0, zero = 0;
};

// Inertia of a Hermitian matrix over Q(zeta) by congruence elimination.
inline Inertia hermitian_inertia(Mat<Cyc> H) {
  Inertia in;
  int n = H.r;
  std::vector<int> alive(n);
  std::iota(alive.begin(), alive.end(), 0);
  while (!alive.empty()) {
    int piv = -1;
    for (int i : alive)
      if (!H(i, i).is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) {
      int a = -1, b = -1;
      for (int i : alive)
        for (int j : alive)
          if (a < 0 && !H(i, j).is_zero()) a = i, b = j;
      if (a < 0) {
        in.zero += static_cast<int>(alive.size());
        break;
      }
      // row/column a += conj(H_ab) * row/column b makes the diagonal 2|H_ab|^2
      Cyc t = H(a, b).conj();
      Cyc tc = t.conj();
      for (int j : alive) H(a, j) += tc * H(b, j);
      for (int i : alive) H(i, a) += H(i, b) * t;
      piv = a;
    }
    auto [re, im] = H(piv, piv).split();
    if (sgn(im) != 0) throw std::logic_error("hermitian_inertia: non-real diagonal");
    if (sgn(re) > 0) ++in.pos; else ++in.neg;
    Cyc inv = H(piv, piv).inverse();
    alive.erase(std::find(alive.begin(), alive.end(), piv));
    for (int i : alive) {
      if (H(i, piv).is_zero()) continue;
      Cyc f = H(i, piv) * inv;
      for (int j : alive)
        if (!H(piv, j).is_zero()) H(i, j) -= f * H(piv, j);
    }
  }
  return in;
}

inline Inertia hermitian_inertia(const Mat<cd>& H, double eps = 1e-8) {
  Eigen::MatrixXcd h = to_eigen(H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Inertia in;
  double top = es.eigenvalues().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double x = es.eigenvalues()(i);
    if (std::abs(x) <= eps * top) ++in.zero;
    else if (x > 0) ++in.pos;
    else ++in.neg;
  }
  return in;
}

// Signature of the intersection form on all of H^1 (exact, integer periods of the dual cocycles).
inline Inertia full_signature(const TranslationCover& c, const HomologyBasis& hb) {
  int E = c.map.num_edges();
  int L = static_cast<int>(hb.duals.size());
  Mat<Cyc> D(E, L);
  for (int j = 0; j < L; ++j)
    for (int i = 0; i < E; ++i)
      if (hb.duals[j][i]) D(i, j) = Cyc(static_cast<long>(hb.duals[j][i]));
  Mat<Cyc> Pi = chain_matrix<Cyc>(hb.cycles, E) * D;
  Mat<Cyc> M = period_pairing(Pi, hb.g_hat);
  Cyc iota = Cyc::iota(c.d == 3 || c.d == 6 ? CycKind::Eisen : CycKind::Gauss);
  for (auto& x : M.v) x = x * iota;
  return hermitian_inertia(M);
}

// Matrix of T* on H^1 in the basis dual to the tree-cotree loops: entry (e, f) = phi_f(T gamma_e).
inline IntMat deck_action(const TranslationCover& c, const HomologyBasis& hb, int power = 1) {
  int L = static_cast<int>(hb.loops.size());
  std::vector<int> Tp = perm_power(c.T, power);
  IntMat M(L, std::vector<long long>(L, 0));
  for (int e = 0; e < L; ++e) {
    Chain tg = chain_image(c.map, Tp, hb.loops[e]);
    for (int f = 0; f < L; ++f) M[e][f] = pair_chain(hb.duals[f], tg);
  }
  return M;
}

template <class F>
std::vector<int> eigen_multiplicities(const TranslationCover& c, const HomologyBasis& hb, const LinConfig& cfg = {}) {
  IntMat A = deck_action(c, hb);
  int L = static_cast<int>(A.size());
  std::vector<int> mult;
  for (int j = 0; j < c.d; ++j) {
    Mat<F> M(L, L);
    F lam = zeta_pow<F>(c.d, j);
    for (int e = 0; e < L; ++e)
      for (int f = 0; f < L; ++f) M(e, f) = F(static_cast<long>(A[e][f])) - (e == f ? lam : F(0));
    if constexpr (std::is_same_v<F, cd>) {
      // rounding in zeta^j would otherwise count as rank when A - zeta^j vanishes
      double top = 1.0;
      for (const auto& row : A)
        for (long long x : row) top = std::max(top, static_cast<double>(std::llabs(x)));
      for (auto& x : M.v)
        if (std::abs(x) <= cfg.eps_lin * top) x = 0.0;
    }
    mult.push_back(L - (L ? rank(M, cfg) : 0));
  }
  return mult;
}

template <class F>
struct Projection {
  Mat<F> Pi;      // absolute periods of the V basis (2g x N)
  int dim_H = 0;  // rank of Pi
  int r = 0;      // dim ker p restricted to V
  Mat<F> ker;     // coefficients (N x r) of a basis of ker p in V
};

template <class F>
Projection<F> project_p(const TranslationCover& c, const HomologyBasis& hb, const Subspace<F>& V,
                        const LinConfig& cfg = {}) {
  Projection<F> p;
  p.Pi = chain_matrix<F>(hb.cycles, c.map.num_edges()) * V.basis;
  p.ker = p.Pi.r ? kernel(p.Pi, cfg) : Mat<F>::identity(V.dim());
  p.r = p.ker.c;
  p.dim_H = V.dim() - p.r;
  return p;
}

// Basis eta_1..eta_r of ker p in V normalized by eta_j(c_i) = delta_ij.
template <class F>
Mat<F> kernel_basis(const TranslationCover& c, const HomologyBasis& hb) {
  const auto& m = c.map;
  int E = m.num_edges();
  int r = static_cast<int>(hb.s_hat.size());
  Mat<F> eta(E, r);
  for (int i = 0; i < r; ++i) {
    std::vector<F> val(m.num_vertices(), F(0));
    F scale(1);
    if (c.d == 1) {
      val[hb.s_hat[i]] = F(-1);
    } else {
      int v = hb.s_hat[i];
      F z = zeta_pow<F>(c.d, c.k);
      F cur(1);
      for (int j = 0; j < c.d; ++j) {
        val[v] = cur;
        cur = cur * z;
        v = c.Tv[v];
      }
      scale = F(1) / (z - F(1));
    }
    for (int ei = 0; ei < E; ++ei) {
      int x = m.edges[ei];
      eta(ei, i) = (val[m.head(x)] - val[m.tail(x)]) * scale;
    }
  }
  return eta;
}

template <class F>
Mat<F> chain_periods(const std::vector<Chain>& chains, const Mat<F>& B) {
  return chain_matrix<F>(chains, B.r) * B;
}

struct AppendixReport {
  std::vector<int> shifts;  // r_i per cut edge
  int cut_edges = 0;
  int expected_cut_edges = 0;
  bool relation_holds = false;
  bool nontrivial = false;
};

// Cut the cover along a fundamental domain built from a maximal tree of face orbits.
template <class F>
AppendixReport appendix_dim_check(const TranslationCover& c, const Subspace<F>& V) {
  if (c.d < 2) fail(ErrorCode::PreconditionFailed, "appendix check needs d >= 2");
  const auto& m = c.map;
  int F_ = m.num_faces();
  std::vector<int> face_orbit(F_, -1), power(F_, 0);
  int orbits = 0;
  for (int f = 0; f < F_; ++f) {
    if (face_orbit[f] >= 0) continue;
    int x = m.faces[f][0];
    for (int j = 0; j < c.d; ++j) {
      face_orbit[m.face[x]] = orbits;
      power[m.face[x]] = j;
      x = c.T[x];
    }
    ++orbits;
  }
  // representative faces chosen along a spanning tree of the orbit graph
  std::vector<int> rep(orbits, -1);
  std::vector<char> is_rep(F_, 0);
  std::vector<char> tree_edge(m.num_edges(), 0);
  rep[face_orbit[0]] = 0;
  is_rep[0] = 1;
  std::vector<int> queue{0};
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int f = queue[qi];
    for (int x : m.faces[f]) {
      int g = m.face[m.s0[x]];
      if (rep[face_orbit[g]] >= 0) continue;
      rep[face_orbit[g]] = g;
      is_rep[g] = 1;
      tree_edge[m.edge_of[x]] = 1;
      queue.push_back(g);
    }
  }
  AppendixReport rpt;
  rpt.expected_cut_edges = 2 * c.base_g + c.n_base() - 1;
  std::vector<std::pair<int, int>> cut;  // (dart in the domain, shift r)
  std::vector<char> done(m.num_edges(), 0);
  for (int f = 0; f < F_; ++f) {
    if (!is_rep[f]) continue;
    for (int x : m.faces[f]) {
      int ei = m.edge_of[x];
      if (tree_edge[ei] || done[ei]) continue;
      int y = m.s0[x];
      // the other side of the cut inside the domain is T^r(y)
      int gy = m.face[y];
      int target = rep[face_orbit[gy]];
      int r = mod(power[target] - power[gy], c.d);
      int yy = y;
      for (int j = 0; j < r; ++j) yy = c.T[yy];
      done[ei] = 1;
      done[m.edge_of[yy]] = 1;
      cut.emplace_back(x, r);
    }
  }
  rpt.cut_edges = static_cast<int>(cut.size());
  for (auto& [x, r] : cut) {
    rpt.shifts.push_back(r);
    if (mod(static_cast<long>(c.k) * r, c.d) != 0) rpt.nontrivial = true;
  }
  rpt.relation_holds = true;
  for (int j = 0; j < V.dim(); ++j) {
    F sum(0);
    for (auto& [x, r] : cut)
      sum += (F(1) - zeta_pow<F>(c.d, static_cast<long>(c.k) * r)) * cochain_value(m, V.basis, j, x);
    if (!exact_zero(sum) && std::abs(to_complex(sum)) > 1e-9) rpt.relation_holds = false;
  }
  return rpt;
}

}  // namespace ddvol
