#pragma once

#include <array>
#include <numeric>
#include <string>
#include <vector>

#include "ddvol/error.hpp"

namespace ddvol {

// Triangulated surface as a pair of permutations of darts 0..n-1.
// sigma0 pairs the two darts of an edge, sigma1 rotates counterclockwise around the tail vertex,
// sigma2 = sigma1^{-1} sigma0 walks counterclockwise around a face.
struct CombinatorialMap {
  int n = 0;
  std::vector<int> s0, s1, s2;
  std::vector<int> vert;  // tail vertex of each dart
  std::vector<int> face;  // face containing each dart
  std::vector<std::vector<int>> vertices;  // outgoing darts, counterclockwise, starting at the smallest
  std::vector<std::array<int, 3>> faces;   // (a, s2 a, s2^2 a) with a the smallest dart
  std::vector<int> edges;                  // canonical dart (the smaller one) of each edge
  std::vector<int> edge_of;                // dart -> edge index

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  int euler() const { return num_vertices() - num_edges() + num_faces(); }
  int genus() const { return (2 - euler()) / 2; }
  int tail(int e) const { return vert[e]; }
  int head(int e) const { return vert[s0[e]]; }
  // +1 if e is the canonical dart of its edge, -1 otherwise.
  int orientation(int e) const { return edges[edge_of[e]] == e ? 1 : -1; }
};

inline bool is_permutation(const std::vector<int>& p) {
  std::vector<char> seen(p.size(), 0);
  for (int x : p) {
    if (x < 0 || x >= static_cast<int>(p.size()) || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

inline std::vector<int> invert(const std::vector<int>& p) {
  std::vector<int> q(p.size());
  for (size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
  return q;
}

inline CombinatorialMap build_map(int n, std::vector<int> sigma0, std::vector<int> sigma1) {
  if (n <= 0 || static_cast<int>(sigma0.size()) != n || static_cast<int>(sigma1.size()) != n)
    fail(ErrorCode::InvalidMap, "sigma0 and sigma1 must be permutations of 0.." + std::to_string(n - 1));
  if (!is_permutation(sigma0)) fail(ErrorCode::InvalidMap, "sigma0 is not a permutation");
  if (!is_permutation(sigma1)) fail(ErrorCode::InvalidMap, "sigma1 is not a permutation");
  for (int e = 0; e < n; ++e) {
    if (sigma0[e] == e) fail(ErrorCode::InvalidMap, "sigma0 fixes dart " + std::to_string(e));
    if (sigma0[sigma0[e]] != e) fail(ErrorCode::InvalidMap, "sigma0 is not an involution at dart " + std::to_string(e));
  }
  CombinatorialMap m;
  m.n = n;
  m.s0 = std::move(sigma0);
  m.s1 = std::move(sigma1);
  std::vector<int> s1inv = invert(m.s1);
  m.s2.resize(n);
  for (int e = 0; e < n; ++e) m.s2[e] = s1inv[m.s0[e]];

  m.vert.assign(n, -1);
  for (int e = 0; e < n; ++e) {
    if (m.vert[e] >= 0) continue;
    int id = m.num_vertices();
    m.vertices.emplace_back();
    for (int x = e; m.vert[x] < 0; x = m.s1[x]) {
      m.vert[x] = id;
      m.vertices.back().push_back(x);
    }
  }
  m.face.assign(n, -1);
  for (int e = 0; e < n; ++e) {
    if (m.face[e] >= 0) continue;
    int a = e, b = m.s2[a], c = m.s2[b];
    if (m.s2[c] != a || a == b)
      fail(ErrorCode::InvalidMap, "face through dart " + std::to_string(e) + " is not a triangle");
    int id = m.num_faces();
    m.faces.push_back({a, b, c});
    m.face[a] = m.face[b] = m.face[c] = id;
  }
  m.edge_of.assign(n, -1);
  for (int e = 0; e < n; ++e)
    if (e < m.s0[e]) {
      m.edge_of[e] = m.edge_of[m.s0[e]] = m.num_edges();
      m.edges.push_back(e);
    }

  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int e = stack.back();
    stack.pop_back();
    for (int f : {m.s0[e], m.s1[e]})
      if (!seen[f]) {
        seen[f] = 1;
        ++count;
        stack.push_back(f);
      }
  }
  if (count != n) fail(ErrorCode::InvalidMap, "map is disconnected");
  if (m.euler() % 2 != 0) fail(ErrorCode::InvalidMap, "odd Euler characteristic");
  return m;
}

// Map from faces listed as dart triples (counterclockwise) and the edge pairing.
inline CombinatorialMap build_map_from_faces(int n, const std::vector<std::array<int, 3>>& tris,
                                             const std::vector<int>& sigma0) {
  std::vector<int> s2(n, -1);
  for (const auto& t : tris)
    for (int i = 0; i < 3; ++i) {
      if (t[i] < 0 || t[i] >= n || s2[t[i]] >= 0) fail(ErrorCode::InvalidMap, "bad face list");
      s2[t[i]] = t[(i + 1) % 3];
    }
  for (int e = 0; e < n; ++e)
    if (s2[e] < 0) fail(ErrorCode::InvalidMap, "dart " + std::to_string(e) + " in no face");
  std::vector<int> s2inv = invert(s2), s1(n);
  for (int e = 0; e < n; ++e) s1[e] = sigma0[s2inv[e]];
  return build_map(n, sigma0, s1);
}

// Conjugates the map by the relabeling e -> p[e].
inline CombinatorialMap relabel(const CombinatorialMap& m, const std::vector<int>& p) {
  std::vector<int> s0(m.n), s1(m.n);
  for (int e = 0; e < m.n; ++e) {
    s0[p[e]] = p[m.s0[e]];
    s1[p[e]] = p[m.s1[e]];
  }
  return build_map(m.n, s0, s1);
}

struct DualGraph {
  int nodes = 0;
  std::vector<std::pair<int, int>> links;
  std::vector<int> link_edge;  // canonical dart of the primal edge, or -1 for abstract graphs
};

inline DualGraph dual_graph(const CombinatorialMap& m) {
  DualGraph g;
  g.nodes = m.num_faces();
  for (int e : m.edges) {
    g.links.emplace_back(m.face[e], m.face[m.s0[e]]);
    g.link_edge.push_back(e);
  }
  return g;
}

struct SimpleCycle {
  std::vector<int> nodes;  // nodes[i] --links[i]--> nodes[i+1], cyclically
  std::vector<int> links;
};

struct CycleList {
  std::vector<SimpleCycle> cycles;
  bool truncated = false;
};

inline CycleList simple_cycles(const DualGraph& g, size_t max_count = 1000000) {
  CycleList out;
  std::vector<std::vector<std::pair<int, int>>> adj(g.nodes);
  for (size_t l = 0; l < g.links.size(); ++l) {
    auto [a, b] = g.links[l];
    adj[a].emplace_back(static_cast<int>(l), b);
    if (a != b) adj[b].emplace_back(static_cast<int>(l), a);
  }
  auto emit = [&](SimpleCycle c) {
    if (out.cycles.size() >= max_count) {
      out.truncated = true;
      return false;
    }
    out.cycles.push_back(std::move(c));
    return true;
  };
  std::vector<char> on_path(g.nodes, 0);
  std::vector<int> path_nodes, path_links;
  bool stop = false;
  for (int s = 0; s < g.nodes && !stop; ++s) {
    for (auto [l, o] : adj[s])
      if (o == s && !emit({{s}, {l}})) stop = true;
    auto dfs = [&](auto&& self, int u) -> void {
      for (auto [l, o] : adj[u]) {
        if (stop) return;
        if (o == s && u != s) {
          if (l != path_links.front() && path_links.front() < l) {
            SimpleCycle c{path_nodes, path_links};
            c.links.push_back(l);
            if (!emit(std::move(c))) stop = true;
          }
        } else if (o > s && !on_path[o]) {
          on_path[o] = 1;
          path_nodes.push_back(o);
          path_links.push_back(l);
          self(self, o);
          path_nodes.pop_back();
          path_links.pop_back();
          on_path[o] = 0;
        }
      }
    };
    if (stop) break;
    path_nodes = {s};
    path_links.clear();
    on_path[s] = 1;
    dfs(dfs, s);
    on_path[s] = 0;
  }
  return out;
}

struct MapAutomorphism {
  std::vector<int> perm;
  int order = 1;
};

inline std::vector<int> perm_power(const std::vector<int>& p, int k) {
  std::vector<int> r(p.size());
  std::iota(r.begin(), r.end(), 0);
  for (int t = 0; t < k; ++t)
    for (auto& x : r) x = p[x];
  return r;
}

inline MapAutomorphism check_automorphism(const CombinatorialMap& m, const std::vector<int>& perm, int d) {
  if (static_cast<int>(perm.size()) != m.n || !is_permutation(perm))
    fail(ErrorCode::NotAutomorphism, "not a permutation of the darts");
  for (int e = 0; e < m.n; ++e) {
    if (perm[m.s0[e]] != m.s0[perm[e]])
      fail(ErrorCode::NotAutomorphism, "does not commute with sigma0 at dart " + std::to_string(e));
    if (perm[m.s1[e]] != m.s1[perm[e]])
      fail(ErrorCode::NotAutomorphism, "does not commute with sigma1 at dart " + std::to_string(e));
  }
  int order = 1;
  std::vector<int> q = perm;
  auto is_id = [](const std::vector<int>& x) {
    for (size_t i = 0; i < x.size(); ++i)
      if (x[i] != static_cast<int>(i)) return false;
    return true;
  };
  while (!is_id(q)) {
    for (auto& x : q) x = perm[x];
    ++order;
    if (order > m.n) fail(ErrorCode::WrongOrder, "order exceeds dart count");
  }
  if (order != d)
    fail(ErrorCode::WrongOrder, "order is " + std::to_string(order) + ", expected " + std::to_string(d));
  q = perm;
  for (int j = 1; j < d; ++j) {
    for (int e = 0; e < m.n; ++e) {
      if (q[e] == e) fail(ErrorCode::NotFree, "power " + std::to_string(j) + " fixes dart " + std::to_string(e));
    }
    for (int f = 0; f < m.num_faces(); ++f)
      if (m.face[q[m.faces[f][0]]] == f)
        fail(ErrorCode::NotFree, "power " + std::to_string(j) + " fixes face " + std::to_string(f));
    for (auto& x : q) x = perm[x];
  }
  return {perm, order};
}

}  // namespace ddvol
