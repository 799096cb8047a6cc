#pragma once

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "ddvol/surface.hpp"

namespace ddvol {

using json = nlohmann::json;

struct SurfaceFile {
  int d = 1;
  std::vector<int> sigma0, sigma1;
  std::vector<std::array<std::string, 2>> sides;  // per dart
  std::vector<int> rot;                           // per undirected edge, for its smaller dart
  std::optional<std::vector<int>> kappa_expected;
};

inline std::string json_scalar_string(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  }
  fail(ErrorCode::ParseError, where + ": expected a number or a numeric string");
}

inline std::vector<int> int_array(const json& doc, const std::string& key) {
  if (!doc.contains(key)) fail(ErrorCode::ParseError, "missing field \"" + key + "\"");
  const json& a = doc.at(key);
  if (!a.is_array()) fail(ErrorCode::ParseError, "field \"" + key + "\" must be an array");
  std::vector<int> out;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number_integer())
      fail(ErrorCode::ParseError, key + "[" + std::to_string(i) + "] must be an integer");
    out.push_back(a[i].get<int>());
  }
  return out;
}

inline SurfaceFile parse_surface_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::ParseError, "top level must be an object");
  SurfaceFile f;
  if (!doc.contains("d") || !doc["d"].is_number_integer()) fail(ErrorCode::ParseError, "field \"d\" must be an integer");
  f.d = doc["d"].get<int>();
  if (f.d < 1) fail(ErrorCode::ParseError, "field \"d\" must be positive");
  f.sigma0 = int_array(doc, "sigma0");
  f.sigma1 = int_array(doc, "sigma1");
  f.rot = int_array(doc, "rot");
  if (!doc.contains("sides") || !doc["sides"].is_array()) fail(ErrorCode::ParseError, "field \"sides\" must be an array");
  const json& s = doc["sides"];
  for (size_t i = 0; i < s.size(); ++i) {
    std::string where = "sides[" + std::to_string(i) + "]";
    if (!s[i].is_array() || s[i].size() != 2) fail(ErrorCode::ParseError, where + " must be a pair [re, im]");
    f.sides.push_back({json_scalar_string(s[i][0], where + "[0]"), json_scalar_string(s[i][1], where + "[1]")});
  }
  if (doc.contains("kappa_expected")) f.kappa_expected = int_array(doc, "kappa_expected");
  return f;
}

inline bool is_exact_literal(const std::string& s) { return s.find_first_of(".eE") == std::string::npos; }

inline DDiffSurface surface_from_file(const SurfaceFile& f, const GeomConfig& cfg = {}) {
  int n = static_cast<int>(f.sigma0.size());
  if (static_cast<int>(f.sides.size()) != n)
    fail(ErrorCode::ParseError, "sides has " + std::to_string(f.sides.size()) + " entries, expected " + std::to_string(n));
  CombinatorialMap m = build_map(n, f.sigma0, f.sigma1);
  if (static_cast<int>(f.rot.size()) != m.num_edges())
    fail(ErrorCode::ParseError, "rot has " + std::to_string(f.rot.size()) + " entries, expected one per edge (" +
                                    std::to_string(m.num_edges()) + ")");
  std::vector<int> rot(n);
  for (int e = 0; e < m.num_edges(); ++e) {
    rot[m.edges[e]] = mod(f.rot[e], f.d);
    rot[m.s0[m.edges[e]]] = mod(-static_cast<long>(f.rot[e]), f.d);
  }
  std::vector<cd> side(n);
  std::optional<std::vector<QC>> side_q;
  bool exact = f.d == 1 || f.d == 2 || f.d == 4;
  std::vector<QC> q(n);
  for (int e = 0; e < n; ++e) {
    double re = 0.0, im = 0.0;
    for (int c = 0; c < 2; ++c) {
      const std::string& str = f.sides[e][c];
      auto r = parse_rational(str);
      if (!r) fail(ErrorCode::ParseError, "sides[" + std::to_string(e) + "][" + std::to_string(c) + "] = \"" + str + "\"");
      (c == 0 ? q[e].re : q[e].im) = *r;
      double x = r->get_d();
      if (!is_exact_literal(str)) {
        exact = false;
        // mpq to double truncates; parse the literal so the shortest representation reads back unchanged
        std::from_chars(str.data(), str.data() + str.size(), x);
      }
      (c == 0 ? re : im) = x;
    }
    side[e] = cd(re, im);
  }
  if (exact) side_q = std::move(q);
  return build_surface(m, f.d, side, rot, side_q, cfg);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string float_literal(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

template <class T>
std::string join(const std::vector<T>& v, const std::string& sep = ", ") {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
  return os.str();
}

inline SurfaceFile to_file(const DDiffSurface& s, bool with_kappa = true) {
  SurfaceFile f;
  f.d = s.d;
  f.sigma0 = s.map.s0;
  f.sigma1 = s.map.s1;
  for (int e = 0; e < s.map.n; ++e) {
    if (s.side_q)
      f.sides.push_back({rational_string((*s.side_q)[e].re), rational_string((*s.side_q)[e].im)});
    else
      f.sides.push_back({float_literal(s.side[e].real()), float_literal(s.side[e].imag())});
  }
  for (int e : s.map.edges) f.rot.push_back(s.rot[e]);
  if (with_kappa) f.kappa_expected = s.kappa;
  return f;
}

// Canonical layout: one key per line, fixed key order, sides one pair per line.
inline std::string write_surface_file(const SurfaceFile& f) {
  std::ostringstream os;
  auto quoted = [](const std::string& s) { return json(s).dump(); };
  os << "{\n";
  os << "  \"d\": " << f.d << ",\n";
  os << "  \"sigma0\": [" << join(f.sigma0) << "],\n";
  os << "  \"sigma1\": [" << join(f.sigma1) << "],\n";
  os << "  \"sides\": [\n";
  for (size_t i = 0; i < f.sides.size(); ++i)
    os << "    [" << quoted(f.sides[i][0]) << ", " << quoted(f.sides[i][1]) << "]"
       << (i + 1 < f.sides.size() ? "," : "") << "\n";
  os << "  ],\n";
  os << "  \"rot\": [" << join(f.rot) << "]";
  if (f.kappa_expected) os << ",\n  \"kappa_expected\": [" << join(*f.kappa_expected) << "]";
  os << "\n}\n";
  return os.str();
}

inline std::string write_surface(const DDiffSurface& s, bool with_kappa = true) {
  return write_surface_file(to_file(s, with_kappa));
}

inline DDiffSurface read_surface(const std::string& path, const GeomConfig& cfg = {}) {
  return surface_from_file(parse_surface_file(read_text(path)), cfg);
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

}  // namespace ddvol
