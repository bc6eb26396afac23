#include "grassmann/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace grassmann {

namespace {

const cplx kI(0.0, 1.0);

void check_cyclic(const CyclicBoundaryFn& f, const char* who) {
  if (f.terms.empty())
    throw std::invalid_argument(std::string(who) + ": empty cyclic data");
  const Geometry& geom = f.terms[0].g.geom;
  if (f.lam.rank() != geom.r)
    throw std::invalid_argument(std::string(who) + ": rank mismatch");
  for (const CyclicTerm& t : f.terms)
    if (t.g.geom.n != geom.n)
      throw std::invalid_argument(std::string(who) + ": mixed geometries");
}

void check_real_regular(const SpectralParam& lam, const char* who) {
  for (const cplx& z : lam.lambda)
    if (std::abs(z.imag()) > 1e-12)
      throw std::invalid_argument(std::string(who) + ": lambda must be real");
  if (!lam.regular())
    throw std::domain_error(std::string(who) + ": lambda must be regular");
}

/* e^{(i lambda - rho) H(g^{-1}k)} tau_l^{-1}(kappa(g^{-1}k)) */
cplx boundary_kernel(const SpectralParam& lam, const GroupElement& g,
                     const KElement& k, const std::vector<double>& rr) {
  auto [H, kap] = boundary_pair(g, k);
  cplx expo(0.0, 0.0);
  for (std::size_t j = 0; j < H.size(); ++j)
    expo += (kI * lam.lambda[j] - rr[j]) * H[j];
  return std::exp(expo) * std::conj(tau(kap, lam.l));
}

/* Least-squares fit v(R) = A + B/R on the top half of the grid; the
 * uncertainty combines the fit residual with the shift seen when the fit
 * window is halved again. */
void fit_limit(const std::vector<double>& R, const std::vector<double>& v,
               double& limit, double& unc) {
  auto fit = [&](std::size_t start) -> std::pair<double, double> {
    double n = 0, sx = 0, sxx = 0, sv = 0, sxv = 0;
    for (std::size_t i = start; i < R.size(); ++i) {
      double x = 1.0 / R[i];
      n += 1;
      sx += x;
      sxx += x * x;
      sv += v[i];
      sxv += x * v[i];
    }
    double det = n * sxx - sx * sx;
    if (!(std::abs(det) > 0.0)) return {v.back(), 0.0};
    double B = (n * sxv - sx * sv) / det;
    double A = (sv - B * sx) / n;
    double ss = 0;
    for (std::size_t i = start; i < R.size(); ++i)
      ss += std::pow(v[i] - A - B / R[i], 2);
    return {A, std::sqrt(ss / n)};
  };
  std::size_t m = R.size();
  if (m < 3) {
    limit = v.back();
    unc = m >= 2 ? std::abs(v[m - 1] - v[m - 2]) : 0.0;
    return;
  }
  auto [a1, rms1] = fit(m / 2);
  auto [a2, rms2] = fit(m - std::max<std::size_t>(2, (m - m / 2) / 2));
  limit = a1;
  unc = rms1 + std::abs(a1 - a2);
  (void)rms2;
}

}  // namespace

double two_sqrt_n(const Geometry& geom) { return 2.0 * std::sqrt(double(geom.n)); }

cplx f_eval(const CyclicBoundaryFn& f, const KElement& k) {
  check_cyclic(f, "f_eval");
  std::vector<double> rr = rho(f.terms[0].g.geom);
  KahanSumC sum;
  for (const CyclicTerm& t : f.terms)
    sum.add(t.a * boundary_kernel(f.lam, t.g, k, rr));
  return sum.value();
}

cplx phi_translated(const SpectralParam& lam, const GroupElement& g0,
                    const GroupElement& g) {
  GroupElement h = group_mul(group_inverse(g0), g);
  ChamberPoint a = cartan_radial(h);
  return phi(g.geom, lam, a).value * std::conj(tau_pi0(h, lam.l));
}

cplx poisson(const CyclicBoundaryFn& f, const GroupElement& g) {
  check_cyclic(f, "poisson");
  check_real_regular(f.lam, "poisson");
  KahanSumC sum;
  for (const CyclicTerm& t : f.terms)
    sum.add(t.a * phi_translated(f.lam, t.g, g));
  return sum.value();
}

CyclicBoundaryFn weyl_translate(const CyclicBoundaryFn& f, const WeylElement& s) {
  CyclicBoundaryFn out = f;
  out.lam = SpectralParam(weyl_act(s, f.lam.lambda), f.lam.l);
  return out;
}

namespace {

struct WeylTerm {
  CyclicBoundaryFn sf;
  cplx c;
};

std::vector<WeylTerm> weyl_expansion(const Geometry& geom,
                                     const CyclicBoundaryFn& f) {
  std::vector<WeylTerm> out;
  for (const WeylElement& s : weyl_group(geom.r))
    out.push_back({weyl_translate(f, s), hc_c(SpectralParam(weyl_act(s, f.lam.lambda), f.lam.l), geom.b)});
  return out;
}

cplx s_operator_core(const Geometry& geom, const std::vector<WeylTerm>& ws,
                     const std::vector<double>& rr, const KElement& k1,
                     const std::vector<double>& t) {
  KahanSumC sum;
  for (const WeylTerm& w : ws) {
    cplx expo(0.0, 0.0);
    for (int j = 0; j < geom.r; ++j) expo += (kI * w.sf.lam.lambda[j] - rr[j]) * t[j];
    sum.add(w.c * std::exp(expo) * f_eval(w.sf, k1));
  }
  return sum.value();
}

}  // namespace

cplx s_operator(const CyclicBoundaryFn& f, const GroupElement& g) {
  check_cyclic(f, "s_operator");
  check_real_regular(f.lam, "s_operator");
  const Geometry& geom = g.geom;
  CartanFactors cf = cartan(g);
  cplx v = s_operator_core(geom, weyl_expansion(geom, f), rho(geom), cf.k1, cf.H.t);
  return std::conj(tau(cf.k2, f.lam.l)) * v;
}

cplx chamber_k_integral(
    const Geometry& geom,
    const std::function<cplx(const KElement&, const ChamberPoint&)>& fiber,
    double R, const BallAverageSpec& spec) {
  if (!(R > 0.0)) throw std::invalid_argument("chamber_k_integral: R must be positive");
  if (spec.scheme == AverageScheme::torus && (geom.r != 1 || geom.b != 0))
    throw std::invalid_argument("chamber_k_integral: torus scheme needs r=1, b=0");

  const double tn = two_sqrt_n(geom);
  const double rt = R / tn;
  std::vector<KElement> ks;
  if (spec.scheme == AverageScheme::haar_mc)
    ks = haar_k_sample(geom, spec.seed, spec.mc_samples);
  const KElement kid = k_identity(geom);

  auto integrand = [&](const std::vector<double>& tv) -> cplx {
    ChamberPoint t(tv);
    cplx avg(0.0, 0.0);
    switch (spec.scheme) {
      case AverageScheme::radial:
        avg = fiber(kid, t);
        break;
      case AverageScheme::torus: {
        /* Boundary-kernel fibers concentrate on theta windows of width
         * e^{-2 t}, far below any fixed trapezoid resolution at deep t, so
         * the circle average must itself be adaptive. Tolerances are scaled
         * by the density so the inner error stays below the outer target
         * after the Delta(t) weight. */
        double delta = weyl_density(geom, t).Delta;
        double inner_abs =
            std::max(spec.abs_tol / (4.0 * std::max(1.0, rt) * std::max(1.0, delta)),
                     1e-18);
        auto th_fiber = [&](double theta) -> cplx {
          Mat a(1, 1), d(1, 1);
          a(0, 0) = std::polar(1.0, theta);
          d(0, 0) = std::polar(1.0, -theta);
          return fiber(KElement(a, d), t);
        };
        /* Pre-split so that theta = 0 and pi (the kernel peaks of
         * identity-centred data) are panel endpoints, where the algebraic
         * peak tails force refinement; theta_nodes sets the seed panel
         * count for peaks elsewhere. */
        int panels = std::max(2, spec.theta_nodes / 16);
        KahanSumC acc;
        for (int p = 0; p < panels; ++p) {
          double a0 = 2.0 * M_PI * p / panels;
          double a1 = 2.0 * M_PI * (p + 1) / panels;
          QuadResult qp =
              quad_adaptive(th_fiber, a0, a1, inner_abs / panels,
                            0.1 * spec.rel_tol, spec.max_evals / panels);
          acc.add(qp.value);
        }
        avg = acc.value() / (2.0 * M_PI);
        break;
      }
      case AverageScheme::haar_mc: {
        KahanSumC s;
        for (const KElement& k : ks) s.add(fiber(k, t));
        avg = s.value() / static_cast<double>(ks.size());
        break;
      }
    }
    return avg * weyl_density(geom, t).Delta;
  };

  QuadSpec qs;
  qs.dimension = geom.r;
  qs.radius = rt;
  qs.abs_tol = spec.abs_tol;
  qs.rel_tol = spec.rel_tol;
  qs.max_evals = spec.max_evals;
  QuadResult qr = quad_chamber(integrand, qs);
  return std::pow(tn / R, geom.r) * qr.value;
}

double ball_average(const Geometry& geom,
                    const std::function<cplx(const GroupElement&)>& F, double R,
                    const BallAverageSpec& spec) {
  auto fiber = [&](const KElement& k1, const ChamberPoint& t) -> cplx {
    GroupElement g = group_mul(k_embed(geom, k1), make_a(geom, t.t));
    return cplx(std::norm(F(g)), 0.0);
  };
  return chamber_k_integral(geom, fiber, R, spec).real();
}

double cyclic_norm2(const CyclicBoundaryFn& f) {
  check_cyclic(f, "cyclic_norm2");
  KahanSumC sum;
  for (const CyclicTerm& ti : f.terms)
    for (const CyclicTerm& tj : f.terms)
      sum.add(ti.a * std::conj(tj.a) * phi_translated(f.lam, ti.g, tj.g));
  return std::max(0.0, sum.value().real());
}

LimitReport norm_limit(const Geometry& geom, const CyclicBoundaryFn& f,
                       const std::vector<double>& R_grid,
                       const BallAverageSpec& spec) {
  check_cyclic(f, "norm_limit");
  check_real_regular(f.lam, "norm_limit");
  if (R_grid.size() < 2)
    throw std::invalid_argument("norm_limit: need at least two radii");

  LimitReport rep;
  rep.R_grid = R_grid;
  rep.values.assign(R_grid.size(), 0.0);
  auto F = [&](const GroupElement& g) { return poisson(f, g); };
  parallel_for(R_grid.size(), [&](std::size_t i) {
    rep.values[i] = ball_average(geom, F, R_grid[i], spec);
  });
  fit_limit(rep.R_grid, rep.values, rep.limit, rep.limit_uncertainty);

  rep.norm_f2 = cyclic_norm2(f);
  double c2 = std::norm(hc_c(f.lam, geom.b));
  rep.reference = c2 * rep.norm_f2;
  rep.ratio = rep.reference > 0.0 ? rep.limit / rep.reference : 0.0;
  rep.kappa_killing =
      std::pow(M_PI, 0.5 * geom.r) / std::tgamma(0.5 * geom.r + 1.0);
  rep.gamma_paper =
      std::pow(2.0, -0.5 * geom.r) / std::tgamma(0.5 * geom.r + 1.0);
  return rep;
}

std::vector<double> asymptotic_residual(const Geometry& geom,
                                        const CyclicBoundaryFn& f,
                                        const std::vector<double>& R_grid,
                                        const BallAverageSpec& spec) {
  check_cyclic(f, "asymptotic_residual");
  check_real_regular(f.lam, "asymptotic_residual");
  /* The ball average walks explicit k a_t factors, so feed those to the Weyl
   * sum directly; re-deriving them from the product loses phase digits like
   * cond(g)^2 eps at deep t. */
  std::vector<WeylTerm> ws = weyl_expansion(geom, f);
  std::vector<double> rr = rho(geom);
  std::vector<double> out(R_grid.size(), 0.0);
  parallel_for(R_grid.size(), [&](std::size_t i) {
    auto fiber = [&](const KElement& k1, const ChamberPoint& t) -> cplx {
      GroupElement g = group_mul(k_embed(geom, k1), make_a(geom, t.t));
      cplx d = poisson(f, g) - s_operator_core(geom, ws, rr, k1, t.t);
      return cplx(std::norm(d), 0.0);
    };
    out[i] = chamber_k_integral(geom, fiber, R_grid[i], spec).real();
  });
  return out;
}

RadialProfile make_radial_bump(const Geometry& geom,
                               const std::vector<double>& center, double width,
                               cplx amplitude) {
  if (static_cast<int>(center.size()) != geom.r)
    throw std::invalid_argument("make_radial_bump: center of wrong rank");
  if (!(width > 0.0))
    throw std::invalid_argument("make_radial_bump: width must be positive");
  double cn = 0.0;
  for (double x : center) cn += x * x;
  RadialProfile p;
  p.R_supp = two_sqrt_n(geom) * (std::sqrt(cn) + width);
  std::vector<double> c = center;
  p.f = [c, width, amplitude](const std::vector<double>& t) -> cplx {
    double s2 = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j)
      s2 += (t[j] - c[j]) * (t[j] - c[j]);
    s2 /= width * width;
    if (s2 >= 1.0) return cplx(0.0, 0.0);
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - s2));
  };
  return p;
}

namespace {

/* Natural cubic spline table for complex samples on a strictly increasing
 * grid. */
struct Spline {
  std::vector<double> x;
  std::vector<cplx> y, m;  // m: second derivatives

  void build() {
    std::size_t n = x.size();
    m.assign(n, cplx(0.0, 0.0));
    if (n < 3) return;
    std::vector<cplx> rhs(n, cplx(0.0, 0.0)), diag(n, cplx(1.0, 0.0)),
        sub(n, cplx(0.0, 0.0)), sup(n, cplx(0.0, 0.0));
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      sub[i] = h0 / 6.0;
      diag[i] = (h0 + h1) / 3.0;
      sup[i] = h1 / 6.0;
      rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      cplx w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
      if (i == 1) break;
    }
  }

  cplx eval(double t) const {
    if (x.empty() || t < x.front() || t > x.back()) return cplx(0.0, 0.0);
    std::size_t i =
        std::upper_bound(x.begin(), x.end(), t) - x.begin();
    if (i == 0) i = 1;
    if (i >= x.size()) i = x.size() - 1;
    double h = x[i] - x[i - 1];
    double a = (x[i] - t) / h, b = (t - x[i - 1]) / h;
    return a * y[i - 1] + b * y[i] +
           ((a * a * a - a) * m[i - 1] + (b * b * b - b) * m[i]) * h * h / 6.0;
  }
};

}  // namespace

RadialProfile load_radial_profile(const Geometry& geom, const std::string& path) {
  if (geom.r != 1)
    throw std::invalid_argument("load_radial_profile: CSV profiles are rank-1");
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_radial_profile: cannot open " + path);
  std::vector<std::pair<double, cplx>> rows;
  std::string line;
  while (std::getline(in, line)) {
    for (char& ch : line)
      if (ch == ',' || ch == ';') ch = ' ';
    std::istringstream ss(line);
    double t, re, im = 0.0;
    if (!(ss >> t >> re)) continue;  // header or blank
    ss >> im;
    rows.emplace_back(t, cplx(re, im));
  }
  if (rows.size() < 3)
    throw std::invalid_argument("load_radial_profile: need at least 3 rows");
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto sp = std::make_shared<Spline>();
  for (const auto& [t, v] : rows) {
    if (!sp->x.empty() && t <= sp->x.back() + 1e-14)
      throw std::invalid_argument("load_radial_profile: duplicate abscissa");
    sp->x.push_back(t);
    sp->y.push_back(v);
  }
  sp->build();

  RadialProfile p;
  p.R_supp = two_sqrt_n(geom) * sp->x.back();
  p.f = [sp](const std::vector<double>& t) { return sp->eval(t[0]); };
  return p;
}

namespace {

cplx chamber_profile_integral(const Geometry& geom, const RadialProfile& p,
                              const std::function<cplx(const std::vector<double>&)>& w,
                              double abs_tol, double rel_tol, int max_evals) {
  QuadSpec qs;
  qs.dimension = geom.r;
  qs.radius = p.R_supp / two_sqrt_n(geom);
  qs.abs_tol = abs_tol;
  qs.rel_tol = rel_tol;
  qs.max_evals = max_evals;
  QuadResult qr = quad_chamber(
      [&](const std::vector<double>& tv) -> cplx {
        return w(tv) * weyl_density(geom, ChamberPoint(std::vector<double>(tv))).Delta;
      },
      qs);
  return std::pow(two_sqrt_n(geom), geom.r) * qr.value;
}

}  // namespace

cplx spherical_transform(const Geometry& geom, const RadialProfile& p,
                         const SpectralParam& lam, double abs_tol,
                         double rel_tol, int max_evals) {
  if (lam.rank() != geom.r)
    throw std::invalid_argument("spherical_transform: rank mismatch");
  for (const cplx& z : lam.lambda)
    if (std::abs(z.imag()) > 1e-12)
      throw std::invalid_argument("spherical_transform: lambda must be real");
  return chamber_profile_integral(
      geom, p,
      [&](const std::vector<double>& tv) -> cplx {
        return p.f(tv) *
               std::conj(phi(geom, lam, ChamberPoint(std::vector<double>(tv))).value);
      },
      abs_tol, rel_tol, max_evals);
}

double profile_norm2(const Geometry& geom, const RadialProfile& p) {
  return chamber_profile_integral(
             geom, p,
             [&](const std::vector<double>& tv) -> cplx {
               return cplx(std::norm(p.f(tv)), 0.0);
             },
             1e-12, 1e-9, 2000000)
      .real();
}

double restriction_ratio(const Geometry& geom, const RadialProfile& p,
                         const SpectralParam& lam, double R_supp) {
  if (!(R_supp > 0.0))
    throw std::invalid_argument("restriction_ratio: R_supp must be positive");
  cplx fh = spherical_transform(geom, p, lam);
  double n2 = profile_norm2(geom, p);
  double c = std::abs(hc_c(lam, geom.b));
  return std::abs(fh) /
         (c * std::pow(R_supp, 0.5 * geom.r) * std::sqrt(std::max(n2, 1e-300)));
}

cplx inversion_value(const Geometry& geom, const CyclicBoundaryFn& f,
                     const KElement& k, double R, const BallAverageSpec& spec) {
  check_cyclic(f, "inversion_value");
  check_real_regular(f.lam, "inversion_value");
  std::vector<double> rr = rho(geom);
  auto fiber = [&](const KElement& k1, const ChamberPoint& t) -> cplx {
    GroupElement g = group_mul(k_embed(geom, k1), make_a(geom, t.t));
    return boundary_kernel(f.lam, g, k, rr) * poisson(f, g);
  };
  return chamber_k_integral(geom, fiber, R, spec);
}

LimitReport boundary_inversion(const Geometry& geom, const CyclicBoundaryFn& f,
                               const KElement& k,
                               const std::vector<double>& R_grid,
                               const BallAverageSpec& spec, double calibration) {
  if (R_grid.size() < 2)
    throw std::invalid_argument("boundary_inversion: need at least two radii");
  LimitReport rep;
  rep.R_grid = R_grid;
  rep.values.assign(R_grid.size(), 0.0);
  std::vector<double> imag(R_grid.size(), 0.0);
  parallel_for(R_grid.size(), [&](std::size_t i) {
    cplx v = inversion_value(geom, f, k, R_grid[i], spec);
    rep.values[i] = v.real();
    imag[i] = std::abs(v.imag());
  });
  fit_limit(rep.R_grid, rep.values, rep.limit, rep.limit_uncertainty);
  rep.limit_uncertainty += *std::max_element(imag.begin(), imag.end());
  rep.norm_f2 = cyclic_norm2(f);
  rep.reference = std::norm(hc_c(f.lam, geom.b)) * calibration;
  rep.ratio = rep.reference != 0.0 ? rep.limit / rep.reference : 0.0;
  rep.kappa_killing =
      std::pow(M_PI, 0.5 * geom.r) / std::tgamma(0.5 * geom.r + 1.0);
  rep.gamma_paper =
      std::pow(2.0, -0.5 * geom.r) / std::tgamma(0.5 * geom.r + 1.0);
  return rep;
}

}  // namespace grassmann
