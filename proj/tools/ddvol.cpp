#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "ddvol/charts.hpp"
#include "ddvol/cohomology.hpp"
#include "ddvol/delaunay.hpp"
#include "ddvol/generate.hpp"
#include "ddvol/io.hpp"
#include "ddvol/suite.hpp"
#include "ddvol/volume.hpp"

using namespace ddvol;

namespace {

struct Globals {
  double alpha = DelaunayConfig{}.alpha;
  double tie_tol = DelaunayConfig{}.tie_tol;
  long max_flips = 0;
  double eps_geom_rel = GeomConfig{}.eps_geom_rel;
  double eps_angle = GeomConfig{}.eps_angle;
  double eps_lin = LinConfig{}.eps_lin;
  int zeta = 1;

  DelaunayConfig dcfg() const {
    DelaunayConfig c;
    c.alpha = alpha;
    c.tie_tol = tie_tol;
    c.max_flips = max_flips;
    return c;
  }
  GeomConfig gcfg() const { return {eps_geom_rel, eps_angle}; }
  LinConfig lcfg() const { return {eps_lin}; }
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Report: '#' header, "key = value [tag]" lines, a closing summary line.
class Report {
 public:
  Report(std::string command, const Globals& g) : command_(std::move(command)), g_(g) {}

  void input(const std::string& path, const std::string& digest) { input_ = path + " sha256=" + digest; }
  void seed(uint64_t s) { seed_ = std::to_string(s); }
  void exact(const std::string& key, const std::string& v) { line(key, v, "exact"); }
  void flt(const std::string& key, double v) { line(key, num(v), "float"); }
  void value(const std::string& key, const std::string& v, bool is_exact) { line(key, v, is_exact ? "exact" : "float"); }
  void text(const std::string& key, const std::string& v) { body_ << key << " = " << v << "\n"; }
  void raw(const std::string& s) { body_ << s; }
  void section(const std::string& name) { body_ << "[" << name << "]\n"; }
  void assertion(const std::string& what, bool ok) {
    body_ << "assert " << what << ": " << (ok ? "pass" : "FAIL") << "\n";
    if (!ok) {
      theorem_failed_ = true;
      failures_.push_back(what);
    }
  }
  void error(const Error& e) {
    body_ << "error " << e.what() << "\n";
    if (is_theorem_failure(e.code())) {
      theorem_failed_ = true;
      failures_.push_back(error_name(e.code()));
    } else {
      input_error_ = true;
      failures_.push_back(error_name(e.code()));
    }
  }
  void note_skipped(const Error& e) { body_ << "skipped " << e.what() << "\n"; }

  int emit() const {
    std::ostringstream os;
    os << "# ddvol " << command_ << "\n";
    if (!input_.empty()) os << "# input " << input_ << "\n";
    if (!seed_.empty()) os << "# seed " << seed_ << "\n";
    os << "# config alpha=" << float_literal(g_.alpha) << " tie_tol=" << float_literal(g_.tie_tol)
       << " max_flips=" << g_.max_flips << " eps_geom_rel=" << float_literal(g_.eps_geom_rel)
       << " eps_angle=" << float_literal(g_.eps_angle) << " eps_lin=" << float_literal(g_.eps_lin)
       << " zeta_index=" << g_.zeta << "\n";
    os << body_.str();
    int code = theorem_failed_ ? 1 : input_error_ ? 2 : 0;
    os << "# summary " << (code == 0 ? "pass" : "fail");
    if (!failures_.empty()) os << " (" << join(failures_) << ")";
    os << "\n";
    std::cout << os.str();
    return code;
  }

 private:
  void line(const std::string& key, const std::string& v, const char* tag) {
    body_ << key << " = " << v << " [" << tag << "]\n";
  }
  std::string command_, input_, seed_;
  const Globals& g_;
  std::ostringstream body_;
  bool theorem_failed_ = false, input_error_ = false;
  std::vector<std::string> failures_;
};

DDiffSurface load(const std::string& path, const Globals& g, Report& rep) {
  std::string text = read_text(path);
  rep.input(path, sha256_hex(text));
  SurfaceFile f = parse_surface_file(text);
  DDiffSurface s = surface_from_file(f, g.gcfg());
  if (f.kappa_expected) {
    std::vector<int> a = *f.kappa_expected, b = s.kappa;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b)
      fail(ErrorCode::BadOrders, "kappa_expected (" + join(*f.kappa_expected) + ") differs from cone orders (" +
                                     join(s.kappa) + ")");
  }
  return s;
}

void report_surface(Report& rep, const DDiffSurface& s) {
  rep.exact("d", std::to_string(s.d));
  rep.exact("darts", std::to_string(s.map.n));
  rep.exact("vertices", std::to_string(s.n()));
  rep.exact("edges", std::to_string(s.map.num_edges()));
  rep.exact("faces", std::to_string(s.map.num_faces()));
  rep.exact("g", std::to_string(s.g));
  rep.exact("kappa", join(s.kappa, " "));
  if (s.area_q) rep.exact("area", rational_string(*s.area_q));
  else rep.flt("area", s.area);
  HolonomyMorphism h = primitivity(s);
  rep.exact("holonomy image", std::to_string(h.image_generator) + "Z/" + std::to_string(s.d));
  rep.text("primitive", h.surjective ? "yes" : "no");
}

void report_cover(Report& rep, const TranslationCover& c) {
  rep.exact("g_hat", std::to_string(c.g_hat()));
  rep.exact("n_hat", std::to_string(c.map.num_vertices()));
  std::vector<int> kh = c.kappa_hat;
  rep.exact("kappa_hat", join(kh, " "));
  rep.exact("k", std::to_string(c.k));
  CoverProfile prof = cover_orders(c.d, c.base_kappa);
  rep.raw("profile: base_vertex k d_i n_i k_hat\n");
  for (size_t i = 0; i < prof.entries.size(); ++i) {
    const auto& e = prof.entries[i];
    rep.raw("  " + std::to_string(i) + " " + std::to_string(e.k) + " " + std::to_string(e.d_i) + " " +
            std::to_string(e.n_i) + " " + std::to_string(e.k_hat) + "\n");
  }
  int rh = riemann_hurwitz_genus(c.base_g, c.d, c.base_kappa);
  std::vector<int> a = c.kappa_hat, b = prof.kappa_hat;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  rep.assertion("Riemann-Hurwitz genus and cone profile", c.g_hat() == rh && a == b);
  rep.flt("cover area", c.area);
}

template <class F>
void report_dims(Report& rep, const TranslationCover& c, const HomologyBasis& hb, const Globals& g) {
  bool ex = std::is_same_v<F, Cyc>;
  Subspace<F> V = eigen_cochains<F>(c, g.lcfg());
  Projection<F> p = project_p(c, hb, V, g.lcfg());
  rep.value("dim V", std::to_string(V.dim()), ex);
  rep.value("dim H_zeta", std::to_string(p.dim_H), ex);
  rep.value("r", std::to_string(p.r), ex);
  Inertia sig = full_signature(c, hb);
  rep.exact("signature", "(" + std::to_string(sig.pos) + "," + std::to_string(sig.neg) + ")");
  std::vector<int> mult = eigen_multiplicities<F>(c, hb, g.lcfg());
  rep.assertion("dim V = expected", V.dim() == expected_dim_V(c));
  rep.assertion("dim H_zeta equals the zeta^k eigenvalue multiplicity",
                c.d == 1 ? p.dim_H == 2 * c.g_hat() : p.dim_H == mult[c.k % c.d]);
  rep.assertion("signature (g_hat, g_hat)", sig.pos == c.g_hat() && sig.neg == c.g_hat() && sig.zero == 0);
  if (c.d >= 2) {
    AppendixReport ar = appendix_dim_check(c, V);
    rep.exact("fundamental domain cut edges", std::to_string(ar.cut_edges) + " expected " +
                                                  std::to_string(ar.expected_cut_edges));
    rep.assertion("fundamental domain relation", ar.relation_holds);
  }
}

template <class F>
void report_volform(Report& rep, const TranslationCover& c, const HomologyBasis& hb, const Globals& g) {
  bool ex = std::is_same_v<F, Cyc>;
  Subspace<F> V = eigen_cochains<F>(c, g.lcfg());
  VolumeDensity vd = theta_density(c, hb, V.basis);
  rep.exact("N", std::to_string(vd.N));
  rep.exact("r", std::to_string(vd.r));
  rep.exact("K", std::to_string(vd.K));
  rep.value("det S", vd.det_S, ex);
  if (vd.exact) rep.exact("density", vd.exact->str());
  rep.flt("density", vd.value);
  if (c.d >= 3) {
    ZetaIndependence z = zeta_independence_check(c, hb, V, primitive_indices(c.d));
    for (size_t i = 0; i < z.indices.size(); ++i)
      rep.value("density zeta^" + std::to_string(z.indices[i]),
                z.densities[i].exact ? z.densities[i].exact->str() : num(z.densities[i].value), ex);
    rep.assertion("density independent of the primitive root", z.equal);
  }
}

void report_ratio(Report& rep, const TranslationCover& c, const HomologyBasis& hb) {
  MasurVeechReport mv = masur_veech_ratio(c, hb);
  rep.raw("d,g,kappa,N,r,K,det_theta,ell,lambda,classification\n");
  rep.raw(std::to_string(mv.d) + "," + std::to_string(mv.g) + "," + join(mv.kappa, " ") + "," + std::to_string(mv.N) +
          "," + std::to_string(mv.r) + "," + std::to_string(mv.K) + "," + csv_escape(mv.det_theta) + "," +
          mv.ell.get_str() + "," + mv.lambda.str() + "," + mv.classification + "\n");
  rep.exact("lambda", mv.lambda.str());
  rep.exact("lambda (lattice density)", mv.lambda_direct.str());
  rep.exact("orientation sign", std::to_string(mv.sign));
  rep.assertion("both lambda computations agree", mv.consistent);
  rep.assertion("classification " + mv.classification, mv.class_ok);
}

void report_delaunay(Report& rep, const DelaunayResult& dr, const Globals& g) {
  rep.exact("flips", std::to_string(dr.flips.size()));
  rep.flt("max violation", dr.max_violation);
  rep.assertion("Delaunay certificate", dr.certified);
  if (dr.cover.d > 1) rep.assertion("T-invariant", is_T_invariant(dr.cover, 1e-9 * std::max(1.0, dr.cover.area)));
  rep.exact("long edges", std::to_string(long_edges(dr.cover, g.dcfg()).size()));
}

std::string cylinders_csv(const std::vector<Cylinder>& cyls) {
  std::ostringstream os;
  os << "direction,ell,h,h_ell,dual_cycle_length\n";
  for (const auto& c : cyls)
    os << num(std::arg(c.direction)) << "," << num(c.ell) << "," << num(c.h) << "," << num(c.h * c.ell) << ","
       << c.faces.size() << "\n";
  return os.str();
}

void report_cylinders(Report& rep, const TranslationCover& o, const std::vector<Cylinder>& cyls, const Globals& g) {
  rep.raw(cylinders_csv(cyls));
  CrossingTally ct = crossing_tally(o, cyls, g.dcfg());
  rep.exact("long cylinders", std::to_string(cyls.size()));
  rep.exact("long edges", std::to_string(ct.long_edges));
  rep.exact("long edges crossing no long cylinder", std::to_string(ct.gap));
  rep.assertion("crossing bounds", ct.ok);
}

void report_witness(Report& rep, const Witness& w) {
  rep.flt("scale", w.scale);
  rep.exact("flips", std::to_string(w.delaunay.flips.size()));
  rep.exact("k", std::to_string(w.family.k));
  const auto& o = w.delaunay.cover;
  rep.text("o.sigma0", join(o.map.s0, " "));
  rep.text("o.sigma1", join(o.map.s1, " "));
  for (int i = 0; i < w.family.k; ++i) {
    std::vector<int> cyc;
    for (const auto& gj : w.family.gamma[i]) cyc.push_back(static_cast<int>(gj.faces.size()));
    rep.text("gamma_" + std::to_string(i + 1) + " faces", join(w.family.gamma[i][0].faces, " "));
    rep.exact("e_" + std::to_string(i + 1), std::to_string(w.family.crossing[i]));
    rep.flt("ell_" + std::to_string(i + 1), w.report.ell[i]);
    rep.flt("x_" + std::to_string(i + 1), w.report.x[i]);
    rep.flt("y_" + std::to_string(i + 1), w.report.y[i]);
  }
  rep.text("completion", join(w.family.completion, " "));
  rep.flt("area", w.report.area);
  rep.flt("longest edge outside E_gamma", w.report.worst_len);
  rep.flt("roundtrip error", w.roundtrip_error);
  rep.assertion("member of U^1", w.ok);
}

int guarded(const std::string& command, const Globals& g, const std::function<void(Report&)>& body) {
  Report rep(command, g);
  try {
    body(rep);
  } catch (const Error& e) {
    rep.error(e);
  } catch (const std::exception& e) {
    rep.error(Error(ErrorCode::DimensionMismatch, std::string("internal: ") + e.what()));
  }
  return rep.emit();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ddvol: cyclic covers, period charts and volume forms of flat surfaces"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--alpha", g.alpha, "long cylinder constant");
  app.add_option("--tie-tol", g.tie_tol, "co-circularity tolerance (radians)");
  app.add_option("--max-flips", g.max_flips, "flip cap, 0 for automatic");
  app.add_option("--eps-geom", g.eps_geom_rel, "geometric tolerance relative to sqrt(area)");
  app.add_option("--eps-angle", g.eps_angle, "cone angle tolerance");
  app.add_option("--eps-lin", g.eps_lin, "rank tolerance in float mode");
  app.add_option("--zeta", g.zeta, "index k of the root zeta_d^k");

  std::string file;
  bool exact = false, ratio = false;
  long samples = 100000;
  uint64_t seed = 1;
  std::string out, csv;
  std::vector<std::string> stages;
  int code = 0;

  auto* check = app.add_subcommand("check", "validate a surface file");
  check->add_option("file", file)->required();
  check->callback([&] {
    code = guarded("check", g, [&](Report& rep) { report_surface(rep, load(file, g, rep)); });
  });

  auto* cover = app.add_subcommand("cover", "canonical cyclic cover");
  cover->add_option("file", file)->required();
  cover->add_option("-o,--out", out, "write the cover as a d=1 surface file");
  cover->callback([&] {
    code = guarded("cover", g, [&](Report& rep) {
      DDiffSurface s = load(file, g, rep);
      TranslationCover c = build_cover(s, g.zeta, g.gcfg());
      report_cover(rep, c);
      if (!out.empty()) std::ofstream(out) << write_surface(cover_as_surface(c, g.gcfg()));
    });
  });

  auto* dim = app.add_subcommand("dim", "dimensions and signature");
  dim->add_option("file", file)->required();
  dim->add_flag("--exact", exact, "cyclotomic arithmetic (d in 1,2,3,4,6)");
  dim->callback([&] {
    code = guarded("dim", g, [&](Report& rep) {
      TranslationCover c = build_cover(load(file, g, rep), g.zeta, g.gcfg());
      HomologyBasis hb = symplectic_basis(c);
      if (exact) {
        if (!exact_supported(c.d)) fail(ErrorCode::UnsupportedD, "exact mode needs d in {1,2,3,4,6}");
        report_dims<Cyc>(rep, c, hb, g);
      } else {
        report_dims<cd>(rep, c, hb, g);
      }
    });
  });

  auto* volform = app.add_subcommand("volform", "canonical volume form density");
  volform->add_option("file", file)->required();
  volform->add_flag("--exact", exact, "cyclotomic arithmetic (d in 1,2,3,4,6)");
  volform->add_flag("--ratio", ratio, "Masur-Veech ratio as a CSV row");
  volform->callback([&] {
    code = guarded("volform", g, [&](Report& rep) {
      TranslationCover c = build_cover(load(file, g, rep), g.zeta, g.gcfg());
      HomologyBasis hb = symplectic_basis(c);
      if (exact || ratio) {
        if (!exact_supported(c.d)) fail(ErrorCode::UnsupportedD, "exact mode needs d in {1,2,3,4,6}");
      }
      if (exact) report_volform<Cyc>(rep, c, hb, g);
      else report_volform<cd>(rep, c, hb, g);
      if (ratio) report_ratio(rep, c, hb);
    });
  });

  auto* del = app.add_subcommand("delaunay", "invariant Delaunay triangulation");
  del->add_option("file", file)->required();
  del->add_option("-o,--out", out, "write the triangulated base surface");
  del->callback([&] {
    code = guarded("delaunay", g, [&](Report& rep) {
      TranslationCover c = build_cover(load(file, g, rep), g.zeta, g.gcfg());
      DelaunayResult dr = invariant_delaunay(c, g.dcfg());
      report_delaunay(rep, dr, g);
      if (!out.empty()) std::ofstream(out) << write_surface(quotient_surface(dr.cover, g.gcfg()));
    });
  });

  auto* cyl = app.add_subcommand("cylinders", "long cylinders of the Delaunay triangulation");
  cyl->add_option("file", file)->required();
  cyl->callback([&] {
    code = guarded("cylinders", g, [&](Report& rep) {
      TranslationCover c = build_cover(load(file, g, rep), g.zeta, g.gcfg());
      DelaunayResult dr = invariant_delaunay(c, g.dcfg());
      report_cylinders(rep, dr.cover, detect_cylinders(dr.cover, g.dcfg()), g);
    });
  });

  auto* wit = app.add_subcommand("witness", "chart containing the surface");
  wit->add_option("file", file)->required();
  wit->callback([&] {
    code = guarded("witness", g, [&](Report& rep) {
      TranslationCover c = build_cover(load(file, g, rep), g.zeta, g.gcfg());
      report_witness(rep, cover_witness(c, g.dcfg()));
    });
  });

  auto* mc = app.add_subcommand("mc", "Monte Carlo volume of the witness chart");
  mc->add_option("file", file)->required();
  mc->add_option("--samples", samples, "number of samples");
  mc->add_option("--seed", seed, "random seed");
  mc->callback([&] {
    code = guarded("mc", g, [&](Report& rep) {
      rep.seed(seed);
      TranslationCover c = build_cover(load(file, g, rep), g.zeta, g.gcfg());
      Witness w = cover_witness(c, g.dcfg());
      MCEstimate e = mc_estimate(w.delaunay.cover, w.family, samples, seed, g.dcfg());
      rep.exact("k", std::to_string(w.family.k));
      rep.exact("samples", std::to_string(e.samples));
      rep.exact("accepted", std::to_string(e.accepted));
      rep.flt("estimate", e.estimate);
      rep.flt("stderr", e.stderr_);
      BoundingVolume bv = bounding_volume(w.family.k, expected_dim_V(w.delaunay.cover), g.dcfg());
      if (bv.exact) rep.exact("bound", bv.exact->get_str());
      else rep.flt("bound", bv.value);
      rep.flt("projectivized", e.projectivized);
      rep.assertion("estimate <= bound", e.estimate <= bv.value);
    });
  });

  std::string dir;
  int suite_samples = SuiteConfig{}.samples;
  auto* suite = app.add_subcommand("suite", "acceptance battery over a directory plus generated instances");
  suite->add_option("dir", dir)->required();
  suite->add_option("--seed", seed, "random seed");
  suite->add_option("--samples", suite_samples, "random area-1 samples");
  suite->add_option("--csv", csv, "CSV output path (default: stdout after the summary)");
  suite->callback([&] {
    code = guarded("suite", g, [&](Report& rep) {
      rep.seed(seed);
      SuiteConfig cfg;
      cfg.seed = seed;
      cfg.samples = suite_samples;
      cfg.dcfg = g.dcfg();
      std::error_code ec;
      if (!std::filesystem::is_directory(dir, ec)) fail(ErrorCode::IoError, "not a directory: " + dir);
      for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".json") cfg.files.push_back(entry.path().string());
      std::sort(cfg.files.begin(), cfg.files.end());
      rep.input(dir, sha256_hex(join(cfg.files, "\n")));
      SuiteReport sr = run_suite(cfg);
      for (const auto& c : sr.criteria)
        rep.assertion("criterion " + std::to_string(c.id) + " " + c.name + " [" + c.detail + "]", c.pass());
      if (csv.empty()) rep.raw(suite_csv(sr));
      else std::ofstream(csv) << suite_csv(sr);
    });
  });

  auto* pipe = app.add_subcommand("pipeline", "cover, dims, volform, delaunay, cylinders, witness");
  pipe->add_option("file", file)->required();
  pipe->add_flag("--exact", exact, "exact arithmetic where supported");
  pipe->add_option("--stages", stages, "subset of cover,dims,volform,delaunay,cylinders,witness")->delimiter(',');
  pipe->callback([&] {
    code = guarded("pipeline", g, [&](Report& rep) {
      auto on = [&](const std::string& s) {
        return stages.empty() || std::find(stages.begin(), stages.end(), s) != stages.end();
      };
      TranslationCover c = build_cover(load(file, g, rep), g.zeta, g.gcfg());
      auto stage = [&](const std::string& name, const std::function<void()>& f) {
        if (!on(name)) return;
        rep.section(name);
        try {
          f();
        } catch (const Error& e) {
          if (e.code() == ErrorCode::UnsupportedD) rep.note_skipped(e);
          else rep.error(e);
        }
      };
      std::optional<HomologyBasis> hb;
      auto basis = [&]() -> const HomologyBasis& {
        if (!hb) hb = symplectic_basis(c);
        return *hb;
      };
      stage("cover", [&] { report_cover(rep, c); });
      stage("dims", [&] {
        if (exact && exact_supported(c.d)) report_dims<Cyc>(rep, c, basis(), g);
        else report_dims<cd>(rep, c, basis(), g);
      });
      stage("volform", [&] {
        if (exact) {
          if (!exact_supported(c.d)) fail(ErrorCode::UnsupportedD, "exact mode needs d in {1,2,3,4,6}");
          report_volform<Cyc>(rep, c, basis(), g);
          report_ratio(rep, c, basis());
        } else {
          report_volform<cd>(rep, c, basis(), g);
        }
      });
      std::optional<DelaunayResult> dr;
      stage("delaunay", [&] {
        dr = invariant_delaunay(c, g.dcfg());
        report_delaunay(rep, *dr, g);
      });
      stage("cylinders", [&] {
        if (!dr) dr = invariant_delaunay(c, g.dcfg());
        report_cylinders(rep, dr->cover, detect_cylinders(dr->cover, g.dcfg()), g);
      });
      stage("witness", [&] { report_witness(rep, cover_witness(c, g.dcfg())); });
    });
  });

  std::string kind;
  std::vector<double> params;
  auto* gen = app.add_subcommand("generate", "write a fixture surface");
  gen->add_option("kind", kind, "torus | pillowcase | equilateral | pillow | rect | random")->required();
  gen->add_option("params", params, "pillow: m d; rect: t; equilateral: d; random: d g [tower]");
  gen->add_option("--seed", seed, "random seed");
  gen->callback([&] {
    try {
      auto p = [&](size_t i, double def) { return i < params.size() ? params[i] : def; };
      DDiffSurface s;
      if (kind == "torus") s = square_torus();
      else if (kind == "pillowcase") s = pillow(4, 2);
      else if (kind == "equilateral") s = equilateral_torus(static_cast<int>(p(0, 1)));
      else if (kind == "pillow") s = pillow(static_cast<int>(p(0, 4)), static_cast<int>(p(1, 2)));
      else if (kind == "rect") s = rectangular_torus(p(0, 3.0));
      else if (kind == "random") {
        std::mt19937_64 rng(seed);
        s = random_surface(static_cast<int>(p(0, 2)), static_cast<int>(p(1, 1)), rng, static_cast<int>(p(2, 0)));
      } else fail(ErrorCode::ParseError, "unknown kind " + kind);
      std::cout << write_surface(s);
    } catch (const Error& e) {
      std::cerr << e.what() << "\n";
      code = is_theorem_failure(e.code()) ? 1 : 2;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return code;
}
