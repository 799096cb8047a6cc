#pragma once

#include <catch_amalgamated.hpp>

#include <functional>
#include <random>

#include "ddvol/charts.hpp"
#include "ddvol/cohomology.hpp"
#include "ddvol/delaunay.hpp"
#include "ddvol/generate.hpp"
#include "ddvol/io.hpp"
#include "ddvol/suite.hpp"
#include "ddvol/volume.hpp"

namespace ddvol::test {

inline std::optional<ErrorCode> error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

// Faces (0,1,2) and (3,4,5) glued along their boundaries.
inline CombinatorialMap double_triangle() { return build_map_from_faces(6, {{{0, 1, 2}}, {{3, 4, 5}}}, {5, 4, 3, 2, 1, 0}); }

// Two unit squares glued as a pillowcase but read with d = 4: every rot is 2, so the holonomy image is 2Z/4.
inline DDiffSurface d4_not_primitive() { return pillow(4, 4); }

inline const std::vector<int>& exact_ds() {
  static const std::vector<int> ds{1, 2, 3, 4, 6};
  return ds;
}

// Random instances over every feasible (d, g) with d in {1,2,3,4,6}, g in {0,1,2}.
inline std::vector<DDiffSurface> random_instances(uint64_t seed, int per_class = 1) {
  std::mt19937_64 rng(seed);
  std::vector<DDiffSurface> out;
  for (int d : exact_ds())
    for (int g = 0; g <= 2; ++g) {
      if (d == 1 && g == 0) continue;
      for (int i = 0; i < per_class; ++i) out.push_back(random_surface(d, g, rng));
    }
  return out;
}

inline double max_edge(const TranslationCover& c) {
  double m = 0.0;
  for (int x : c.map.edges) m = std::max(m, std::abs(c.z[x]));
  return m;
}

}  // namespace ddvol::test
