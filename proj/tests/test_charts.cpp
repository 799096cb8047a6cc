#include "common.hpp"

using namespace ddvol;
using namespace ddvol::test;

namespace {

std::vector<cd> edge_values(const TranslationCover& o) {
  std::vector<cd> v;
  for (int x : o.map.edges) v.push_back(o.z[x]);
  return v;
}

}  // namespace

TEST_CASE("chart space has dimension N") {
  for (const auto& s : random_instances(61)) {
    auto c = build_cover(s);
    CHECK(chart_space<Cyc>(c).dim() == expected_dim_V(c));
  }
}

TEST_CASE("membership in U") {
  auto c = build_cover(pillow(4, 2));
  auto genuine = membership_U(c.z, c, c.base_kappa);
  CHECK(genuine.member);
  CHECK(genuine.kappa_match);
  CHECK_FALSE(genuine.component_resolved);

  std::vector<cd> neg = c.z;
  for (int x : c.map.faces[0]) neg[x] = std::conj(neg[x]);
  auto bad = membership_U(neg, c, c.base_kappa);
  CHECK_FALSE(bad.member);
  CHECK_FALSE(bad.bad_faces.empty());

  auto W = chart_space<cd>(c);
  std::vector<cd> z = edge_values(c);
  for (size_t e = 0; e < z.size(); ++e) z[e] += 0.01 * W.basis(static_cast<int>(e), 0);
  CHECK(membership_U(dart_values(c.map, z), c, c.base_kappa).member);
  CHECK_FALSE(membership_U(c.z, c, {0, 0, 0, 0}).member);
}

TEST_CASE("admissible families on the square torus") {
  auto c = build_cover(square_torus());
  auto W = chart_space<Cyc>(c);
  auto fl = admissible_families(c, W, 2);
  CHECK_FALSE(fl.truncated);
  CHECK(fl.families.size() == 4);
  for (const auto& f : fl.families) {
    CHECK(f.complete);
    CHECK(static_cast<int>(f.crossing.size() + f.completion.size()) == W.dim());
    auto gi = gamma_period_independence(c, W, f);
    CHECK(gi.independent);
    auto gf = gamma_period_independence(c, chart_space<cd>(c), f);
    CHECK(gf.independent == gi.independent);
  }
}

TEST_CASE("bounding volume") {
  CHECK(*bounding_volume(0, 1).exact == 16);
  CHECK(*bounding_volume(0, 2).exact == 256);
  for (int k = 0; k < 3; ++k) CHECK(bounding_volume(k + 1, 3).value * 2.0 == bounding_volume(k, 3).value);
  DelaunayConfig cfg;
  cfg.alpha = 1.0;
  CHECK_FALSE(bounding_volume(0, 1, cfg).exact);
  CHECK(bounding_volume(0, 1, cfg).value == Catch::Approx(2.0 * kPi));
}

TEST_CASE("in_U1 conditions") {
  auto c = build_cover(square_torus());
  AdmissibleFamily empty;
  auto r = in_U1(c.z, c, empty);
  CHECK(r.member);
  CHECK(r.area == Catch::Approx(1.0));
  auto big = scaled_cover(c, 1.1);
  auto r2 = in_U1(big.z, big, empty);
  CHECK_FALSE(r2.area_ok);
  CHECK_FALSE(r2.member);
}

TEST_CASE("witness on the equilateral torus has no long cylinder") {
  auto w = cover_witness(build_cover(with_area(equilateral_torus(1), 1.0)));
  CHECK(w.ok);
  CHECK(w.family.k == 0);
  CHECK(w.roundtrip_error < 1e-9);
}

TEST_CASE("witness on a stretched pillowcase has one cylinder orbit") {
  auto s = with_area(linear_image(pillow(4, 2), 1.0, 0.0, 0.0, 16.0), 0.5);
  auto w = cover_witness(build_cover(s));
  CHECK(w.ok);
  CHECK(w.family.k == 1);
  CHECK(w.family.complete);
  CHECK(w.report.member);
}

TEST_CASE("Monte Carlo is deterministic, stable and below the bound") {
  auto s = with_area(linear_image(pillow(4, 2), 1.0, 0.0, 0.0, 16.0), 0.5);
  auto w = cover_witness(build_cover(s));
  const auto& o = w.delaunay.cover;
  auto a = mc_estimate(o, w.family, 20000, 7, {}, 1);
  auto b = mc_estimate(o, w.family, 20000, 7, {}, 3);
  CHECK(a.accepted == b.accepted);
  CHECK(a.estimate == b.estimate);
  auto c = mc_estimate(o, w.family, 20000, 8, {}, 1);
  CHECK(std::abs(a.estimate - c.estimate) <= 3.0 * std::sqrt(a.stderr_ * a.stderr_ + c.stderr_ * c.stderr_) + 1e-12);
  CHECK(a.estimate <= a.bound);
  CHECK(a.bound == bounding_volume(1, expected_dim_V(o)).value);
  CHECK(a.projectivized == Catch::Approx(a.estimate / 2.0));
}

TEST_CASE("SplitMix64 is keyed on seed and block") {
  SplitMix64 a(1, 0), b(1, 0), c(1, 1), d(2, 0);
  uint64_t x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
  CHECK(x != d.next());
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("random witnesses lie in U^1") {
  std::mt19937_64 rng(63);
  for (int i = 0; i < 40; ++i) {
    auto s = random_sample(rng);
    CAPTURE(i, s.d, s.g, s.kappa);
    auto w = cover_witness(build_cover(s));
    CHECK(w.ok);
    CHECK(w.roundtrip_error < 1e-8);
  }
}
