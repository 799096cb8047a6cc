#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddvol/cohomology.hpp"

namespace ddvol {

struct VolumeDensity {
  double value = 0.0;
  std::optional<QSqrt3> exact;
  std::string det_S;  // determinant of the Gram-type matrix, exact string when available
  int N = 0, r = 0, K = 0;
  int zeta_index = 1;
};

inline int inverse_mod(int k, int d) {
  for (int t = 0; t < d; ++t)
    if (mod(static_cast<long>(k) * t, d) == 1 % d) return t;
  fail(ErrorCode::NotPrimitive, "index " + std::to_string(k) + " is not invertible mod " + std::to_string(d));
}

// Density of the canonical volume form against the Lebesgue measure of the coordinates of the columns of B.
// power p selects the root zeta^p with deck generator T^p; rel overrides the relative paths.
template <class F>
VolumeDensity theta_density(const TranslationCover& c, const HomologyBasis& hb, const Mat<F>& B, int power = 1,
                            const std::vector<Chain>* rel = nullptr) {
  std::vector<Chain> paths = rel ? *rel : relative_paths(c, hb, power);
  int N = B.c, r = static_cast<int>(paths.size()), K = N - r;
  Mat<F> Pi = chain_periods(hb.cycles, B);
  Mat<F> C = chain_periods(paths, B);
  Mat<F> S = Pi.r ? period_pairing(Pi, hb.g_hat) : Mat<F>(N, N);
  if (r) S = S + C.transpose() * conj(C);
  F det_s = det(S);
  VolumeDensity out;
  out.N = N;
  out.r = r;
  out.K = K;
  out.zeta_index = mod(static_cast<long>(c.k) * power, c.d);
  if constexpr (std::is_same_v<F, Cyc>) {
    out.det_S = det_s.str();
    if (det_s.is_zero()) fail(ErrorCode::RankDeficiency, "volume density vanishes on the declared basis");
    auto a = abs_real_or_imaginary(det_s);
    if (!a) fail(ErrorCode::RankDeficiency, "determinant is neither real nor imaginary: " + det_s.str());
    Q denom = Q(1);
    for (int i = 0; i < K; ++i) denom *= 2;
    if (c.d > 1) {
      Q w = one_minus_zeta_sq(c.d, out.zeta_index);
      for (int i = 0; i < r; ++i) denom *= w;
    }
    out.exact = *a / denom;
    out.value = out.exact->to_double();
  } else {
    double a = std::abs(det_s);
    std::ostringstream os;
    os.precision(17);
    os << det_s.real() << (std::signbit(det_s.imag()) ? "-" : "+") << std::abs(det_s.imag()) << "*i";
    out.det_S = os.str();
    double scale = 1.0;
    for (int j = 0; j < N; ++j) {
      double col = 0.0;
      for (int i = 0; i < S.r; ++i) col += std::norm(S(i, j));
      scale *= std::sqrt(col);
    }
    if (!(a > 1e-12 * scale)) fail(ErrorCode::RankDeficiency, "volume density vanishes on the declared basis");
    double w = c.d > 1 ? std::norm(cd(1.0) - zeta_cd(c.d, out.zeta_index)) : 1.0;
    out.value = a / std::pow(2.0, K) / std::pow(w, r);
  }
  return out;
}

struct ZetaIndependence {
  std::vector<int> indices;
  std::vector<VolumeDensity> densities;
  bool equal = true;
};

// Compares the normalized densities for every listed primitive root zeta_d^k on a fixed basis of V.
template <class F>
ZetaIndependence zeta_independence_check(const TranslationCover& c, const HomologyBasis& hb, const Subspace<F>& V,
                                         const std::vector<int>& indices, double rel_tol = 1e-6) {
  ZetaIndependence z;
  int kinv = inverse_mod(c.k, c.d);
  for (int k : indices) {
    int p = mod(static_cast<long>(k) * kinv, c.d);
    if (std::gcd(p, c.d) != 1 && c.d > 1) fail(ErrorCode::NotPrimitive, "index not prime to d");
    z.indices.push_back(k);
    z.densities.push_back(theta_density(c, hb, V.basis, p));
  }
  for (size_t i = 1; i < z.densities.size(); ++i) {
    const auto& a = z.densities[0];
    const auto& b = z.densities[i];
    if (a.exact && b.exact) {
      if (!(*a.exact == *b.exact)) z.equal = false;
    } else if (std::abs(a.value - b.value) > rel_tol * std::abs(a.value)) {
      z.equal = false;
    }
  }
  return z;
}

inline std::vector<int> primitive_indices(int d) {
  std::vector<int> out;
  for (int k = 1; k <= d; ++k)
    if (std::gcd(k, d) == 1) out.push_back(k % d == 0 ? (d == 1 ? 1 : k) : k);
  return out;
}

// ---- lattice over Z[i] or Z[omega] ----

inline Q round_half(const Q& x) {
  mpz_class f;
  Q y = x + Q(1, 2);
  mpz_fdiv_q(f.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
  return Q(f);
}

inline bool in_ring(const Cyc& x) { return x.a().get_den() == 1 && x.b().get_den() == 1; }

// Nearest ring element in the (1, w) coordinates.
inline Cyc ring_round(const Cyc& x) {
  if (x.kind() == CycKind::Rational) return Cyc(round_half(x.a()));
  return Cyc(round_half(x.a()), round_half(x.b()), x.kind());
}

// Basis over the ring of {x in R^n : A x = 0} by unimodular column reduction (A has ring entries).
inline Mat<Cyc> ring_kernel(Mat<Cyc> A) {
  int n = A.c;
  Mat<Cyc> U = Mat<Cyc>::identity(n);
  int p = 0;
  auto col_sub = [&](int dst, int src, const Cyc& q) {
    for (int i = 0; i < A.r; ++i)
      if (!A(i, src).is_zero()) A(i, dst) -= q * A(i, src);
    for (int i = 0; i < n; ++i)
      if (!U(i, src).is_zero()) U(i, dst) -= q * U(i, src);
  };
  auto col_swap = [&](int a, int b) {
    if (a == b) return;
    for (int i = 0; i < A.r; ++i) std::swap(A(i, a), A(i, b));
    for (int i = 0; i < n; ++i) std::swap(U(i, a), U(i, b));
  };
  for (int i = 0; i < A.r && p < n; ++i) {
    for (;;) {
      int best = -1;
      Q bn;
      for (int j = p; j < n; ++j) {
        if (A(i, j).is_zero()) continue;
        Q nj = A(i, j).kind() == CycKind::Rational ? A(i, j).a() * A(i, j).a() : A(i, j).norm();
        if (best < 0 || nj < bn) best = j, bn = nj;
      }
      if (best < 0) break;
      col_swap(p, best);
      bool clean = true;
      for (int j = p + 1; j < n; ++j) {
        if (A(i, j).is_zero()) continue;
        Cyc q = ring_round(A(i, j) / A(i, p));
        if (!q.is_zero()) col_sub(j, p, q);
        if (!A(i, j).is_zero()) clean = false;
      }
      if (clean) {
        ++p;
        break;
      }
    }
  }
  std::vector<int> rest;
  for (int j = p; j < n; ++j) rest.push_back(j);
  return U.cols(rest);
}

template <class F>
Subspace<F> lattice_basis(const TranslationCover& c) {
  OrbitReduction r = orbit_reduction(c);
  Mat<F> A = reduced_face_relations<F>(c, r);
  for (const auto& x : A.v)
    if (!in_ring(x)) fail(ErrorCode::NonIntegral, "face relation coefficient outside the ring");
  Mat<F> U = ring_kernel(A);
  return {lift_reduced(c, r, U)};
}

struct MasurVeechReport {
  int d = 1, g = 0, N = 0, r = 0, K = 0;
  std::vector<int> kappa;
  std::string det_theta;
  mpz_class ell;
  QSqrt3 lambda;         // |d vol / d vol*|
  int sign = 1;          // sign of the oriented ratio under the (-2i)^K convention
  QSqrt3 lambda_direct;  // density on a lattice basis times the lattice covolume
  bool consistent = false;
  bool class_ok = false;
  std::string classification;
};

inline QSqrt3 ring_covolume_power(int d, int N) {
  if (d == 3 || d == 6) return QSqrt3(Q(1, 1) / Q(mpz_class(1) << N), N);
  return QSqrt3(Q(1), 0);
}

inline MasurVeechReport masur_veech_ratio(const TranslationCover& c, const HomologyBasis& hb) {
  if (!exact_supported(c.d)) fail(ErrorCode::UnsupportedD, "lattice normalization needs d in {1,2,3,4,6}");
  MasurVeechReport rep;
  rep.d = c.d;
  rep.g = c.base_g;
  rep.kappa = c.base_kappa;
  Subspace<Cyc> L = lattice_basis<Cyc>(c);
  int N = L.dim();
  if (N != expected_dim_V(c)) fail(ErrorCode::DimensionMismatch, "lattice rank differs from dim V");
  for (const auto& x : V_residual(c, L.basis).v)
    if (!x.is_zero()) fail(ErrorCode::DimensionMismatch, "lattice vector outside V");
  rep.N = N;
  VolumeDensity dens = theta_density(c, hb, L.basis);
  rep.r = dens.r;
  rep.K = dens.K;
  int K = dens.K, r = dens.r;
  QSqrt3 cov = ring_covolume_power(c.d, N);
  rep.lambda_direct = *dens.exact * cov;

  // q-coordinates: K absolute periods selected greedily, then the relative periods
  Mat<Cyc> Pi = chain_periods(hb.cycles, L.basis);
  std::vector<int> sel = Pi.r ? independent_rows(Pi) : std::vector<int>{};
  if (static_cast<int>(sel.size()) != K) fail(ErrorCode::RankDeficiency, "absolute periods have rank != K");
  std::vector<Chain> qchains;
  for (int i : sel) qchains.push_back(hb.cycles[i]);
  for (const auto& ch : relative_paths(c, hb, 1)) qchains.push_back(ch);
  Mat<Cyc> Qm = chain_periods(qchains, L.basis);  // q(Lambda basis), N x N
  Cyc dq = det(Qm);
  if (dq.is_zero()) fail(ErrorCode::RankDeficiency, "q-coordinates do not form a basis");
  Q ell = dq.kind() == CycKind::Rational ? dq.a() * dq.a() : dq.norm();
  if (ell.get_den() != 1) fail(ErrorCode::NonIntegral, "lattice index is not an integer");
  rep.ell = ell.get_num();

  // theta_ij on the basis dual to the first K q-coordinates
  Mat<Cyc> Rw = L.basis * inverse(Qm);
  std::vector<int> firstK(K);
  std::iota(firstK.begin(), firstK.end(), 0);
  Mat<Cyc> X = chain_periods(hb.cycles, Rw.cols(firstK));
  Mat<Cyc> m = K ? period_pairing(X, hb.g_hat) : Mat<Cyc>(0, 0);
  Mat<Cyc> theta = m;
  for (auto& x : theta.v) x = x * Cyc(Q(1, 4));
  Cyc dt = K ? det(theta) : Cyc(1);
  rep.det_theta = dt.str();

  // (-2i)^K det(theta) is real up to the sqrt(3) factor
  CycKind kind = kind_for(c.d);
  Cyc pre(1);
  Cyc m2i = Cyc(Q(0), Q(-2), CycKind::Gauss);
  if (kind == CycKind::Eisen) m2i = Cyc(-2) * Cyc::iota(kind);  // -2 sqrt(-3) = -2i sqrt(3)
  for (int i = 0; i < K; ++i) pre = pre * m2i;
  Cyc val = pre * dt;
  auto [re, im] = val.split();
  if (sgn(im) != 0) fail(ErrorCode::NonIntegral, "(-2i)^K det(theta) is not real: " + val.str());
  // for Eisen, pre carried sqrt(3)^K in excess
  QSqrt3 signed_part(re, 0);
  if (kind == CycKind::Eisen) {
    Q p3(1);
    for (int i = 0; i < (K + 1) / 2; ++i) p3 *= 3;
    signed_part = QSqrt3(re / p3, K % 2);
  }
  rep.sign = sgn(re) < 0 ? -1 : 1;
  Q denom(1);
  if (c.d > 1) {
    Q w = one_minus_zeta_sq(c.d, c.k);
    for (int i = 0; i < r; ++i) denom *= w;
  }
  rep.lambda = (signed_part.abs() * QSqrt3(Q(rep.ell), 0) * cov) / denom;
  rep.consistent = rep.lambda == rep.lambda_direct;

  if (c.d == 1) {
    Q target = Q(1) / Q(mpz_class(1) << (2 * rep.g));
    rep.class_ok = rep.lambda.s == 0 && rep.lambda.q == target;
    rep.classification = "|lambda| = 2^-" + std::to_string(2 * rep.g);
  } else if (c.d == 2 || c.d == 4) {
    rep.class_ok = rep.lambda.s == 0;
    rep.classification = "rational";
  } else {
    rep.class_ok = rep.lambda.s == r % 2;
    rep.classification = r % 2 ? "sqrt(3)*rational" : "rational";
  }
  return rep;
}

struct DetThetaReport {
  bool anti_hermitian = false;
  bool in_iK_reals = false;
  std::string det;
};

inline DetThetaReport det_theta_check(const TranslationCover& c, const HomologyBasis& hb, const Subspace<Cyc>& V) {
  DetThetaReport rep;
  Projection<Cyc> p = project_p(c, hb, V);
  std::vector<int> sel = p.Pi.r ? independent_rows(p.Pi) : std::vector<int>{};
  int K = static_cast<int>(sel.size());
  std::vector<Chain> qchains;
  for (int i : sel) qchains.push_back(hb.cycles[i]);
  for (const auto& ch : relative_paths(c, hb, 1)) qchains.push_back(ch);
  Mat<Cyc> Qm = chain_periods(qchains, V.basis);
  Mat<Cyc> Rw = V.basis * inverse(Qm);
  std::vector<int> firstK(K);
  std::iota(firstK.begin(), firstK.end(), 0);
  Mat<Cyc> X = chain_periods(hb.cycles, Rw.cols(firstK));
  Mat<Cyc> theta = K ? period_pairing(X, hb.g_hat) : Mat<Cyc>(0, 0);
  for (auto& x : theta.v) x = x * Cyc(Q(1, 4));
  rep.anti_hermitian = true;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      if (theta(j, i) != -theta(i, j).conj()) rep.anti_hermitian = false;
  Cyc dt = K ? det(theta) : Cyc(1);
  rep.det = dt.str();
  auto [re, im] = dt.split();
  rep.in_iK_reals = K % 2 == 0 ? sgn(im) == 0 : sgn(re) == 0;
  return rep;
}

// Value of the intersection form on v with itself; equals the area for the period cochain.
inline double area_pairing(const HomologyBasis& hb, const Mat<cd>& v) {
  Mat<cd> H = intersection_form(hb, v);
  return H(0, 0).real();
}

inline Mat<cd> period_cochain(const TranslationCover& c) {
  Mat<cd> v(c.map.num_edges(), 1);
  for (int ei = 0; ei < c.map.num_edges(); ++ei) v(ei, 0) = c.z[c.map.edges[ei]];
  return v;
}

// Mass of the cone over a region with area cap t, from the mass mu1 at cap 1, including the 1/d factor.
inline double projectivized_mass(double mu_cap1, int d, int N, double t = 1.0) {
  return std::pow(t, N) * mu_cap1 / d;
}

}  // namespace ddvol
