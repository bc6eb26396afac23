#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <grassmann/numerics.hpp>
#include <grassmann/transforms.hpp>

#include <cmath>
#include <complex>
#include <vector>

using namespace grassmann;

namespace {

KElement circle_k(double theta) {
  Mat a(1, 1), d(1, 1);
  a(0, 0) = std::exp(cplx(0.0, theta));
  d(0, 0) = std::exp(cplx(0.0, -theta));
  return KElement(a, d);
}

CyclicBoundaryFn one_point(const Geometry& geom, const SpectralParam& lam,
                           cplx a = cplx(1.0, 0.0)) {
  CyclicBoundaryFn f;
  f.lam = lam;
  f.terms.push_back({a, group_identity(geom)});
  return f;
}

/* Kernel value e^{(i lam - rho)(H)} tau_l^{-1}(kappa) at (H, kappa). */
cplx kernel_value(const SpectralParam& lam, const std::vector<double>& rr,
                  const std::pair<std::vector<double>, KElement>& bp) {
  cplx ex(0.0, 0.0);
  for (std::size_t j = 0; j < bp.first.size(); ++j)
    ex += (cplx(0.0, 1.0) * lam.lambda[j] - rr[j]) * bp.first[j];
  return std::exp(ex) / tau(bp.second, lam.l);
}

/* Least-squares v = A + B/R over the top half of the grid; returns A. */
double tail_fit(const std::vector<double>& R, const std::vector<double>& v) {
  std::size_t n = R.size(), h = n / 2;
  double s1 = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = h; i < n; ++i) {
    double x = 1.0 / R[i], y = v[i];
    s1 += 1.0;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (sy * sxx - sx * sxy) / (s1 * sxx - sx * sx);
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (double R = lo; R <= hi + 1e-9; R += step) g.push_back(R);
  return g;
}

BallAverageSpec torus_spec() {
  BallAverageSpec sp;
  sp.scheme = AverageScheme::torus;
  sp.abs_tol = 1e-11;
  sp.rel_tol = 1e-7;
  return sp;
}

}  // namespace

TEST_CASE("cyclic data: kernel evaluation, reproducing norm, unit lengths") {
  Geometry g10(1, 0), g21(2, 1);
  CHECK(two_sqrt_n(g10) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(two_sqrt_n(g21) == doctest::Approx(2.0 * std::sqrt(5.0)).epsilon(1e-15));

  Rng rng(13);
  CyclicBoundaryFn f;
  f.lam = SpectralParam({1.9}, -1);
  f.terms.push_back({cplx(0.7, 0.2), random_group_element(g10, rng, 0.5)});
  f.terms.push_back({cplx(-0.3, 0.5), random_group_element(g10, rng, 0.5)});

  std::vector<double> rr = rho(g10);
  for (double th : {0.3, 2.1, 4.4}) {
    KElement k = circle_k(th);
    cplx manual(0.0, 0.0);
    for (const CyclicTerm& term : f.terms)
      manual += term.a * kernel_value(f.lam, rr, boundary_pair(term.g, k));
    CHECK(std::abs(f_eval(f, k) - manual) < 1e-13);
  }

  // ||f_e||^2 = phi(e) = 1, and the reproducing identity against direct
  // circle quadrature for two-point data.
  CyclicBoundaryFn fe = one_point(g10, SpectralParam({1.9}, -1));
  CHECK(cyclic_norm2(fe) == doctest::Approx(1.0).epsilon(1e-12));

  int N = 1024;
  KahanSum s;
  for (int j = 0; j < N; ++j) s.add(std::norm(f_eval(f, circle_k(2.0 * M_PI * j / N))));
  CHECK(cyclic_norm2(f) == doctest::Approx(s.value() / N).epsilon(1e-9));

  // rank 2: reproducing identity against the Monte-Carlo K-average.
  Rng rng2(29);
  CyclicBoundaryFn f2;
  f2.lam = SpectralParam({2.6, 1.2}, 1);
  f2.terms.push_back({cplx(1.0, 0.0), group_identity(g21)});
  f2.terms.push_back({cplx(0.5, -0.4), random_group_element(g21, rng2, 0.3)});
  double n2 = cyclic_norm2(f2);
  KahanSum mc;
  int M = 20000;
  std::vector<KElement> ks = haar_k_sample(g21, 77, M);
  for (const KElement& k : ks) mc.add(std::norm(f_eval(f2, k)));
  double est = mc.value() / M;
  CHECK(std::fabs(n2 - est) / n2 < 0.05);
}

TEST_CASE("poisson transform reproduces the spherical function on point data") {
  Geometry g11(1, 1), g20(2, 0);

  SpectralParam lam({1.7}, 2);
  CyclicBoundaryFn fe = one_point(g11, lam);
  Rng rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    GroupElement g = random_group_element(g11, rng, 0.6);
    cplx expected = phi(g11, lam, cartan_radial(g)).value / tau_pi0(g, lam.l);
    CHECK(std::abs(poisson(fe, g) - expected) < 1e-10 * std::abs(expected));
  }

  SpectralParam lam2({2.3, 0.9}, -1);
  CyclicBoundaryFn fe2 = one_point(g20, lam2);
  for (int trial = 0; trial < 3; ++trial) {
    GroupElement g = random_group_element(g20, rng, 0.5);
    cplx expected = phi(g20, lam2, cartan_radial(g)).value / tau_pi0(g, lam2.l);
    CHECK(std::abs(poisson(fe2, g) - expected) < 1e-10 * std::abs(expected));
  }
}

TEST_CASE("poisson transform matches direct circle quadrature at rank one") {
  Geometry g10(1, 0);
  Rng rng(11);
  CyclicBoundaryFn f;
  f.lam = SpectralParam({1.1}, 2);
  f.terms.push_back({cplx(0.7, 0.2), random_group_element(g10, rng, 0.5)});
  f.terms.push_back({cplx(-0.3, 0.5), random_group_element(g10, rng, 0.5)});

  std::vector<double> rr = rho(g10);
  for (double t : {0.4, 0.8, 1.5}) {
    GroupElement a = make_a(g10, {t});
    int N = 512;
    KahanSum sr, si;
    for (int j = 0; j < N; ++j) {
      KElement k = circle_k(2.0 * M_PI * j / N);
      auto bp = boundary_pair(a, k);
      cplx ex = std::exp(cplx(-rr[0], -f.lam.lambda[0].real()) * bp.first[0]);
      cplx val = ex * tau(bp.second, f.lam.l) * f_eval(f, k);
      sr.add(val.real());
      si.add(val.imag());
    }
    cplx direct(sr.value() / N, si.value() / N);
    CHECK(std::abs(poisson(f, a) - direct) < 1e-9);
  }

  // Linearity in the terms.
  CyclicBoundaryFn f1;
  f1.lam = f.lam;
  f1.terms.push_back(f.terms[0]);
  CyclicBoundaryFn f2;
  f2.lam = f.lam;
  f2.terms.push_back(f.terms[1]);
  GroupElement g = random_group_element(g10, rng, 0.7);
  cplx whole = poisson(f, g);
  CHECK(std::abs(whole - poisson(f1, g) - poisson(f2, g)) < 1e-13 * std::abs(whole));
}

TEST_CASE("weyl translation intertwines the poisson transform") {
  Geometry g10(1, 0), g21(2, 1);
  Rng rng(23);

  CyclicBoundaryFn f;
  f.lam = SpectralParam({1.4}, 1);
  f.terms.push_back({cplx(0.9, -0.1), random_group_element(g10, rng, 0.5)});
  f.terms.push_back({cplx(0.2, 0.6), random_group_element(g10, rng, 0.5)});

  // Identity element changes nothing.
  CyclicBoundaryFn fid = weyl_translate(f, weyl_identity(1));
  CHECK(fid.lam.lambda[0] == f.lam.lambda[0]);
  for (double th : {0.7, 3.9})
    CHECK(std::abs(f_eval(fid, circle_k(th)) - f_eval(f, circle_k(th))) < 1e-15);

  // P_{lam} f = P_{s lam} (translated f) pointwise.
  std::vector<WeylElement> w1 = weyl_group(1);
  for (const WeylElement& s : w1) {
    CyclicBoundaryFn fs = weyl_translate(f, s);
    for (int trial = 0; trial < 2; ++trial) {
      GroupElement g = random_group_element(g10, rng, 0.6);
      cplx lhs = poisson(f, g), rhs = poisson(fs, g);
      CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(lhs)));
    }
  }

  Rng rng2(31);
  CyclicBoundaryFn h;
  h.lam = SpectralParam({2.2, 0.8}, -2);
  h.terms.push_back({cplx(1.0, 0.3), random_group_element(g21, rng2, 0.3)});
  GroupElement g2 = random_group_element(g21, rng2, 0.4);
  cplx base = poisson(h, g2);
  for (const WeylElement& s : weyl_group(2)) {
    cplx rhs = poisson(weyl_translate(h, s), g2);
    CHECK(std::abs(base - rhs) < 1e-9 * std::abs(base));

    // Involution back to the original parameter.
    CyclicBoundaryFn back = weyl_translate(weyl_translate(h, s), weyl_inverse(s));
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(back.lam.lambda[j] - h.lam.lambda[j]) < 1e-15);
  }
}

TEST_CASE("comparison operator: definition, covariance, classical rank one") {
  Geometry g11(1, 1), g10(1, 0);
  Rng rng(41);

  // Independent assembly of the defining Weyl sum at a generic element.
  CyclicBoundaryFn f;
  f.lam = SpectralParam({1.6}, 1);
  f.terms.push_back({cplx(0.8, 0.2), random_group_element(g11, rng, 0.4)});
  f.terms.push_back({cplx(-0.1, 0.5), random_group_element(g11, rng, 0.4)});
  std::vector<double> rr = rho(g11);
  for (int trial = 0; trial < 3; ++trial) {
    GroupElement g = random_group_element(g11, rng, 0.6);
    CartanFactors cf = cartan(g);
    cplx manual(0.0, 0.0);
    for (const WeylElement& s : weyl_group(1)) {
      std::vector<cplx> sl = weyl_act(s, f.lam.lambda);
      SpectralParam slam(sl, f.lam.l);
      cplx ex(0.0, 0.0);
      for (int j = 0; j < g11.r; ++j)
        ex += (cplx(0.0, 1.0) * sl[j] - rr[j]) * cf.H.t[j];
      manual += hc_c(slam, g11.b) * std::exp(ex) *
                f_eval(weyl_translate(f, s), cf.k1);
    }
    manual /= tau(cf.k2, f.lam.l);
    cplx sv = s_operator(f, g);
    CHECK(std::abs(sv - manual) < 1e-12 * std::max(1.0, std::abs(sv)));
  }

  // Right K-rotation leaves the modulus unchanged.
  GroupElement g = random_group_element(g11, rng, 0.5);
  double mod = std::abs(s_operator(f, g));
  for (const KElement& kp : haar_k_sample(g11, 55, 3)) {
    GroupElement gk = group_mul(g, k_embed(g11, kp));
    CHECK(std::abs(s_operator(f, gk)) == doctest::Approx(mod).epsilon(1e-12));
  }

  // Classical combination c(lambda) e^{(i lambda - 1)t} + c(-lambda) e^{(-i lambda - 1)t}.
  SpectralParam cl({0.9}, 0);
  CyclicBoundaryFn fe = one_point(g10, cl);
  for (double t : {0.8, 1.6, 3.0}) {
    cplx expected =
        hc_c(cl, 0) * std::exp(cplx(-1.0, cl.lambda[0].real()) * t) +
        hc_c(SpectralParam({-0.9}, 0), 0) *
            std::exp(cplx(-1.0, -cl.lambda[0].real()) * t);
    cplx sv = s_operator(fe, make_a(g10, {t}));
    CHECK(std::abs(sv - expected) < 1e-13);
  }
}

TEST_CASE("comparison operator converges to the poisson transform deep in the chamber") {
  Geometry g11(1, 1), g10(1, 0);

  CyclicBoundaryFn fe = one_point(g11, SpectralParam({1.7}, 1));
  double prev = 1e300;
  std::vector<double> errs;
  for (double t : {3.0, 4.0, 6.0, 8.0}) {
    GroupElement a = make_a(g11, {t});
    cplx pv = poisson(fe, a), sv = s_operator(fe, a);
    double err = std::abs(pv - sv) / std::abs(pv);
    errs.push_back(err);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(errs[1] < 1e-3);   // PROBE
  CHECK(errs.back() < 1e-6);  // PROBE

  Rng rng(7);
  CyclicBoundaryFn f2;
  f2.lam = SpectralParam({0.9}, -1);
  f2.terms.push_back({cplx(0.8, 0.1), group_identity(g10)});
  f2.terms.push_back({cplx(0.4, -0.3), random_group_element(g10, rng, 0.4)});
  prev = 1e300;
  for (double t : {4.0, 6.0, 8.0}) {
    GroupElement a = make_a(g10, {t});
    cplx pv = poisson(f2, a), sv = s_operator(f2, a);
    double err = std::abs(pv - sv) / std::abs(pv);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-6);  // PROBE
}

TEST_CASE("ball averages match closed-form volumes and reduce across schemes") {
  Geometry g10(1, 0), g21(2, 1);
  BallAverageSpec sp = torus_spec();

  // Unit integrand: R * average = vol B(R) = 2 sqrt2 (cosh(2 t_max) - 1).
  auto unit = [](const GroupElement&) { return cplx(1.0, 0.0); };
  for (double R : {6.0, 20.0}) {
    double tmax = R / (2.0 * std::sqrt(2.0));
    double vol = 2.0 * std::sqrt(2.0) * (std::cosh(2.0 * tmax) - 1.0);
    CHECK(ball_average(g10, unit, R, sp) * R ==
          doctest::Approx(vol).epsilon(1e-8));
  }

  // Rank 2: volume against an independent nested quadrature of the density.
  {
    BallAverageSpec rad;
    rad.scheme = AverageScheme::radial;
    rad.abs_tol = 1e-11;
    rad.rel_tol = 1e-9;
    double R = 9.0;
    double tmax = R / two_sqrt_n(g21);
    auto outer = [&](double t1) -> cplx {
      double cap = std::sqrt(std::max(0.0, tmax * tmax - t1 * t1));
      double hi = std::min(t1, cap);
      if (hi <= 0.0) return cplx(0.0, 0.0);
      auto inner = [&](double t2) -> cplx {
        ChamberPoint p;
        p.t = {t1, t2};
        return cplx(weyl_density(g21, p).Delta, 0.0);
      };
      return quad_adaptive(inner, 0.0, hi, 1e-13, 1e-11, 40000).value;
    };
    double vol = two_sqrt_n(g21) * two_sqrt_n(g21) *
                 quad_adaptive(outer, 0.0, tmax, 1e-13, 1e-10, 200000).value.real();
    CHECK(ball_average(g21, unit, R, rad) * R * R ==
          doctest::Approx(vol).epsilon(1e-6));
  }

  // Left tau-covariant integrand: the K-average is trivial, so every scheme
  // returns the same chamber integral.
  CyclicBoundaryFn fe = one_point(g10, SpectralParam({1.3}, 1));
  auto F = [&](const GroupElement& g) { return poisson(fe, g); };
  double R = 10.0;
  BallAverageSpec rad = sp;
  rad.scheme = AverageScheme::radial;
  BallAverageSpec mc = sp;
  mc.scheme = AverageScheme::haar_mc;
  mc.mc_samples = 16;
  double v_torus = ball_average(g10, F, R, sp);
  double v_rad = ball_average(g10, F, R, rad);
  double v_mc = ball_average(g10, F, R, mc);
  CHECK(v_rad == doctest::Approx(v_torus).epsilon(1e-8));
  CHECK(v_mc == doctest::Approx(v_torus).epsilon(1e-8));

  // Finite sup over a monotone grid, with a plateau on the top half.
  std::vector<double> values;
  for (double Rg = 5.0; Rg <= 40.0 + 1e-9; Rg += 5.0)
    values.push_back(ball_average(g10, F, Rg, sp));
  double hi = 0.0, lo = 1e300;
  for (std::size_t i = values.size() / 2; i < values.size(); ++i) {
    hi = std::max(hi, values[i]);
    lo = std::min(lo, values[i]);
  }
  for (double v : values) CHECK(std::isfinite(v));
  CHECK(hi / lo < 1.5);
}

TEST_CASE("norm limits: homogeneity, operator cross-check, parameter independence") {
  Geometry g10(1, 0);
  // One-point data at the identity: the K-characters factor out of both
  // transforms, so the radial scheme is exact here.
  BallAverageSpec sp = torus_spec();
  sp.scheme = AverageScheme::radial;
  std::vector<double> grid60 = linear_grid(5.0, 60.0, 5.0);

  // Exact quadratic homogeneity in the coefficient.
  CyclicBoundaryFn f1 = one_point(g10, SpectralParam({1.3}, 0));
  CyclicBoundaryFn f2 = one_point(g10, SpectralParam({1.3}, 0), cplx(2.0, 0.0));
  LimitReport r1 = norm_limit(g10, f1, grid60, sp);
  LimitReport r2 = norm_limit(g10, f2, grid60, sp);
  CHECK(r2.limit == doctest::Approx(4.0 * r1.limit).epsilon(1e-6));
  CHECK(r2.ratio == doctest::Approx(r1.ratio).epsilon(1e-6));
  CHECK(r1.limit > 0.0);
  CHECK(std::isfinite(r1.limit_uncertainty));

  // The comparison operator has the same norm limit.
  std::vector<double> vs;
  for (double R : grid60)
    vs.push_back(ball_average(
        g10, [&](const GroupElement& g) { return s_operator(f1, g); }, R, sp));
  double s_lim = tail_fit(grid60, vs);
  CHECK(std::fabs(s_lim - r1.limit) / r1.limit < 0.02);

  // Independence of the spectral parameter and the weight, plus the
  // two-sided growth bound, over a deeper grid.
  std::vector<double> grid90 = linear_grid(5.0, 90.0, 5.0);
  struct Pair {
    double lam;
    int l;
  };
  std::vector<Pair> pairs = {{0.7, 0}, {1.3, 0}, {2.9, 0}, {1.3, -2}, {1.3, 3}};
  double rmax = 0.0, rmin = 1e300, up = 0.0, lo = 1e300;
  for (const Pair& pr : pairs) {
    CyclicBoundaryFn fe = one_point(g10, SpectralParam({pr.lam}, pr.l));
    LimitReport rep = norm_limit(g10, fe, grid90, sp);
    rmax = std::max(rmax, rep.ratio);
    rmin = std::min(rmin, rep.ratio);
    double c = std::abs(hc_c(fe.lam, g10.b));
    double sup = 0.0;
    for (double v : rep.values) sup = std::max(sup, v);
    up = std::max(up, std::sqrt(sup) / c);
    lo = std::min(lo, std::sqrt(rep.limit) / c);
  }
  CHECK((rmax - rmin) / rmin < 0.02);
  CHECK(up / lo < 10.0);
}

TEST_CASE("asymptotic residual decays at the inverse-radius rate") {
  Geometry g10(1, 0);
  BallAverageSpec sp = torus_spec();
  BallAverageSpec rad = sp;
  rad.scheme = AverageScheme::radial;

  CyclicBoundaryFn fe = one_point(g10, SpectralParam({1.3}, 0));
  std::vector<double> grid = {10.0, 20.0, 40.0, 60.0};
  std::vector<double> rs = asymptotic_residual(g10, fe, grid, rad);
  for (std::size_t i = 1; i < rs.size(); ++i) CHECK(rs[i] < rs[i - 1]);
  // Converged numerator: the residual is C/R, so doubling halves it.
  CHECK(rs[1] / rs[0] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(rs[3] / rs[0] < 0.2);

  // Small against the norm-limit scale at the largest radius.
  LimitReport rep = norm_limit(g10, fe, linear_grid(5.0, 60.0, 5.0), rad);
  CHECK(rs[3] < 0.01 * rep.limit);

  // Off-origin data keeps decaying.
  Rng rng(7);
  CyclicBoundaryFn f2;
  f2.lam = SpectralParam({0.9}, -1);
  f2.terms.push_back({cplx(0.8, 0.1), group_identity(g10)});
  f2.terms.push_back({cplx(0.4, -0.3), random_group_element(g10, rng, 0.4)});
  std::vector<double> grid2 = {10.0, 20.0, 40.0};
  std::vector<double> rs2 = asymptotic_residual(g10, f2, grid2, sp);
  CHECK(rs2[1] < rs2[0]);
  CHECK(rs2[2] < rs2[1]);

  // Triangle bound |a+b|^2 <= 2|a|^2 + 2|b|^2 under the same averages.
  CyclicBoundaryFn fa;
  fa.lam = f2.lam;
  fa.terms.push_back(f2.terms[0]);
  CyclicBoundaryFn fb;
  fb.lam = f2.lam;
  fb.terms.push_back(f2.terms[1]);
  std::vector<double> ra = asymptotic_residual(g10, fa, grid2, sp);
  std::vector<double> rb = asymptotic_residual(g10, fb, grid2, sp);
  for (std::size_t i = 0; i < grid2.size(); ++i)
    CHECK(rs2[i] <= 2.0 * ra[i] + 2.0 * rb[i] + 1e-12);
}

TEST_CASE("reduced spherical transform agrees with the full group integral") {
  Geometry g10(1, 0);
  RadialProfile p = make_radial_bump(g10, {1.0}, 0.6);
  SpectralParam lam({0.9}, 1);

  cplx reduced = spherical_transform(g10, p, lam);

  // Direct K x A+ x K quadrature of F against the conjugated Poisson kernel
  // at the identity coset: trapezoid in both circle angles (exact for the
  // finite Fourier content), composite Simpson in t over the bump support.
  std::vector<double> rr = rho(g10);
  int NK = 32, NT = 201;
  double tlo = 0.4, thi = 1.6;
  double hT = (thi - tlo) / (NT - 1.0);
  KahanSum sr, si;
  for (int i1 = 0; i1 < NK; ++i1) {
    KElement k1 = circle_k(2.0 * M_PI * i1 / NK);
    for (int i2 = 0; i2 < NK; ++i2) {
      KElement k2 = circle_k(2.0 * M_PI * i2 / NK);
      for (int it = 0; it < NT; ++it) {
        double t = tlo + hT * it;
        double wt = (it == 0 || it == NT - 1) ? 1.0 : (it % 2 == 1 ? 4.0 : 2.0);
        GroupElement g = group_mul(k_embed(g10, k1),
                                   group_mul(make_a(g10, {t}), k_embed(g10, k2)));
        ChamberPoint cp;
        cp.t = {t};
        cplx F = p.f(cp.t) / tau_pi0(g, lam.l);
        auto bp = boundary_pair(g, k_identity(g10));
        cplx kc = std::exp(cplx(-rr[0], -lam.lambda[0].real()) * bp.first[0]) *
                  tau(bp.second, -lam.l);
        cplx val = F * kc * weyl_density(g10, cp).Delta * wt;
        sr.add(val.real());
        si.add(val.imag());
      }
    }
  }
  cplx direct(sr.value(), si.value());
  direct *= two_sqrt_n(g10) * hT / 3.0 / (NK * (double)NK);
  CHECK(std::abs(direct - reduced) < 1e-6 * std::abs(reduced));

  // Smooth in lambda near the origin.
  cplx a = spherical_transform(g10, p, SpectralParam({0.1}, 0));
  cplx b = spherical_transform(g10, p, SpectralParam({0.12}, 0));
  CHECK(std::isfinite(std::abs(a)));
  CHECK(std::abs(a - b) < 0.05 * std::max(std::abs(a), 1e-12));

  // Plancherel lower consistency on the continuous window.
  RadialProfile p0 = make_radial_bump(g10, {1.0}, 0.6);
  double n2 = profile_norm2(g10, p0);
  auto integrand = [&](double x) -> cplx {
    SpectralParam q({x}, 0);
    cplx fh = spherical_transform(g10, p0, q);
    return cplx(std::norm(fh) / std::norm(hc_c(q, 0)), 0.0);
  };
  double lhs =
      0.5 * quad_adaptive(integrand, 0.02, 45.0, 1e-12, 1e-6, 200000).value.real();
  CHECK(lhs <= 1.05 * n2);
  CHECK(lhs > 0.5 * n2);  // PROBE
}

TEST_CASE("restriction ratios stay bounded across frequency, support, weight") {
  Geometry g10(1, 0), g11(1, 1);

  RadialProfile p = make_radial_bump(g10, {1.0}, 0.6);
  double mx = 0.0;
  for (int i = 0; i < 16; ++i) {
    double lam = 0.2 * std::pow(150.0, i / 15.0);
    double r = restriction_ratio(g10, p, SpectralParam({lam}, 0), p.R_supp);
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
    mx = std::max(mx, r);
  }
  CHECK(mx < 1.0);  // PROBE

  RadialProfile p2 = make_radial_bump(g10, {2.0}, 1.2);
  double mx2 = 0.0;
  for (double lam : {0.3, 0.9, 2.7, 8.1, 24.0})
    mx2 = std::max(mx2,
                   restriction_ratio(g10, p2, SpectralParam({lam}, 0), p2.R_supp));
  CHECK(mx2 < 4.0 * mx);  // PROBE

  RadialProfile pb = make_radial_bump(g11, {1.0}, 0.6);
  for (int l = -3; l <= 3; ++l) {
    double r = restriction_ratio(g11, pb, SpectralParam({2.3}, l), pb.R_supp);
    CHECK(std::isfinite(r));
    CHECK(r < 1.0);  // PROBE
  }
}

TEST_CASE("boundary inversion: equivariance and the classical real profile") {
  Geometry g10(1, 0);
  BallAverageSpec sp = torus_spec();
  sp.rel_tol = 1e-6;

  // f_R(k m) = tau_l(m)^{-1} f_R(k) for m in the circle centralizer {+-I}.
  {
    CyclicBoundaryFn fe = one_point(g10, SpectralParam({1.3}, 3));
    Mat mm(1, 1);
    mm(0, 0) = -1.0;
    KElement m(mm, mm);
    cplx at_e = inversion_value(g10, fe, k_identity(g10), 8.0, sp);
    cplx at_m = inversion_value(g10, fe, m, 8.0, sp);
    CHECK(std::abs(at_m + at_e) < 1e-9 * std::abs(at_e));
  }

  // l = 0: the samples are real, lambda-even, and match the closed-loop
  // chamber integral (2 sqrt2 / R) int phi^2 Delta dt.
  SpectralParam lam({1.3}, 0);
  CyclicBoundaryFn fe = one_point(g10, lam);
  for (double R : {10.0, 30.0}) {
    cplx v = inversion_value(g10, fe, k_identity(g10), R, sp);
    CHECK(std::fabs(v.imag()) < 1e-8 * std::abs(v));
    CHECK(v.real() > 0.0);

    cplx v_neg = inversion_value(g10, one_point(g10, SpectralParam({-1.3}, 0)),
                                 k_identity(g10), R, sp);
    CHECK(std::abs(v - v_neg) < 1e-10 * std::abs(v));

    double tmax = R / (2.0 * std::sqrt(2.0));
    auto f = [&](double t) -> cplx {
      ChamberPoint cp;
      cp.t = {t};
      cplx ph = phi(g10, lam, cp).value;
      return ph * ph * weyl_density(g10, cp).Delta;
    };
    cplx oracle = 2.0 * std::sqrt(2.0) / R *
                  quad_adaptive(f, 0.0, tmax, 1e-13, 1e-10, 100000).value;
    CHECK(std::abs(v - oracle) < 1e-6 * std::abs(oracle));
  }
}
