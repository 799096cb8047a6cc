#include "common.hpp"

#include <filesystem>

using namespace ddvol;
using namespace ddvol::test;

TEST_CASE("exact round trip is byte identical") {
  for (auto s : {square_torus(), pillow(4, 2)}) {
    std::string a = write_surface(s);
    auto t = surface_from_file(parse_surface_file(a));
    REQUIRE(t.side_q);
    CHECK(write_surface(t) == a);
    CHECK(t.kappa == s.kappa);
  }
}

TEST_CASE("float round trip is byte identical") {
  std::mt19937_64 rng(71);
  for (const auto& s : random_instances(72)) {
    auto p = perturb(s, rng, 2, 0.05);
    std::string a = write_surface(p);
    auto t = surface_from_file(parse_surface_file(a));
    CHECK_FALSE(t.side_q);
    CHECK(write_surface(t) == a);
  }
}

TEST_CASE("parse errors are addressed") {
  std::string good = write_surface(square_torus(), false);
  json doc = json::parse(good);
  doc.erase("rot");
  CHECK(message_of([&] { parse_surface_file(doc.dump()); }).find("\"rot\"") != std::string::npos);
  doc = json::parse(good);
  doc["sides"][3][0] = "x";
  std::string msg = message_of([&] { surface_from_file(parse_surface_file(doc.dump())); });
  CHECK(msg.find("ParseError") == 0);
  CHECK(msg.find("sides[3][0]") != std::string::npos);
  CHECK(error_of([] { parse_surface_file("{"); }) == ErrorCode::ParseError);
  doc = json::parse(good);
  doc["rot"].push_back(0);
  CHECK(error_of([&] { surface_from_file(parse_surface_file(doc.dump())); }) == ErrorCode::ParseError);
  CHECK(error_of([] { read_text("/nonexistent/ddvol.json"); }) == ErrorCode::IoError);
}

TEST_CASE("corrupted rot names the edge") {
  auto s = pillow(4, 2);
  auto f = to_file(s, false);
  int e = 0;
  while (f.rot[e] == 0) ++e;
  f.rot[e] = 0;
  std::string msg = message_of([&] { surface_from_file(f); });
  CHECK(msg.find("GluingMismatch") == 0);
  CHECK(msg.find("edge " + std::to_string(e)) != std::string::npos);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("data fixtures load") {
  namespace fs = std::filesystem;
  int count = 0;
  for (const auto& ent : fs::directory_iterator(DDVOL_DATA_DIR)) {
    if (ent.path().extension() != ".json") continue;
    ++count;
    std::string name = ent.path().stem().string();
    auto file = parse_surface_file(read_text(ent.path().string()));
    if (name == "d4_not_primitive") {
      auto s = surface_from_file(file);
      CHECK_FALSE(primitivity(s).surjective);
      continue;
    }
    auto s = surface_from_file(file);
    if (file.kappa_expected) CHECK(*file.kappa_expected == s.kappa);
  }
  CHECK(count >= 5);
}

TEST_CASE("suite is deterministic for a fixed seed") {
  SuiteConfig cfg;
  cfg.random_per_class = 0;
  cfg.samples = 4;
  cfg.perturbations = 3;
  cfg.mc_runs = 1;
  cfg.mc_samples = 512;
  auto a = suite_csv(run_suite(cfg));
  auto b = suite_csv(run_suite(cfg));
  CHECK(a == b);
}
