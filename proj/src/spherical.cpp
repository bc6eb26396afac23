#include "grassmann/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace grassmann {

namespace {

const cplx kI(0.0, 1.0);

struct HypParams {
  cplx a1, a2, c;
};

/* Series parameters of phi^{(b,-l)}_mu as F(a1,a2;c;-sinh^2 t). */
HypParams hyp_params(cplx mu, const JacobiOrder& ord) {
  cplx imu = kI * mu;
  double s = ord.b - ord.l + 1.0;
  return {0.5 * (imu + s), 0.5 * (-imu + s), cplx(ord.b + 1.0, 0.0)};
}

/* G(x, y) = phi^{(b,-l)}_{sqrt y}(t) with x = cosh 2t. Even in sqrt y, so the
 * branch of the square root is immaterial. For x below 1 (finite-difference
 * stencils dipping past the wall) the series argument (1-x)/2 is small and
 * positive, so the hypergeometric series continues G analytically. */
struct GSurface {
  JacobiOrder ord;

  cplx value(double x, cplx y) const {
    cplx mu = std::sqrt(y);
    if (x < 1.0 + 1e-12) {
      double z = 0.5 * (1.0 - x);
      if (std::abs(z) < 1e-300) return cplx(1.0, 0.0);
      HypParams p = hyp_params(mu, ord);
      return gauss_2f1(p.a1, p.a2, p.c, z);
    }
    double t = 0.5 * std::acosh(x);
    return jacobi_phi(mu, t, ord);
  }

  /* dG/dx; the two branches agree on the overlap 1 < x < 1 + 1e-4. */
  cplx deriv(double x, cplx y) const {
    cplx mu = std::sqrt(y);
    if (x < 1.0 + 1e-4) {
      HypParams p = hyp_params(mu, ord);
      double z = 0.5 * (1.0 - x);
      return -0.5 * (p.a1 * p.a2 / p.c) *
             gauss_2f1(p.a1 + 1.0, p.a2 + 1.0, p.c + 1.0, z);
    }
    double t = 0.5 * std::acosh(x);
    return jacobi_phi_dt(mu, t, ord) / (2.0 * std::sinh(2.0 * t));
  }

  /* Confluent column divided difference G[x; ybar +- gap/2] from a 5-point
   * derivative stencil plus the (gap^2/24) G_yyy Taylor correction. */
  cplx col_dd(double x, cplx ybar, double gap) const {
    double h = 7.4e-4 * (1.0 + std::abs(ybar));
    cplx gp2 = value(x, ybar + 2.0 * h), gp1 = value(x, ybar + h);
    cplx gm1 = value(x, ybar - h), gm2 = value(x, ybar - 2.0 * h);
    cplx gy = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * h);
    cplx gyyy = (gp2 - 2.0 * gp1 + 2.0 * gm1 - gm2) / (2.0 * h * h * h);
    return gy + (gap * gap / 24.0) * gyyy;
  }

  /* Confluent row divided difference G[xbar +- gap/2; y]; the x-derivative is
   * analytic, so only G_xxx needs a second difference. */
  cplx row_dd(double xbar, cplx y, double gap) const {
    double h = 1e-3 * (1.0 + std::abs(xbar));
    cplx g0 = deriv(xbar, y);
    cplx gxxx = (deriv(xbar + h, y) - 2.0 * g0 + deriv(xbar - h, y)) / (h * h);
    return g0 + (gap * gap / 24.0) * gxxx;
  }

  /* Doubly confluent mixed divided difference: y-stencil of dG/dx. */
  cplx mixed_dd(double xbar, cplx ybar, double ygap) const {
    double h = 7.4e-4 * (1.0 + std::abs(ybar));
    cplx dp2 = deriv(xbar, ybar + 2.0 * h), dp1 = deriv(xbar, ybar + h);
    cplx dm1 = deriv(xbar, ybar - h), dm2 = deriv(xbar, ybar - 2.0 * h);
    cplx dxy = (-dp2 + 8.0 * dp1 - 8.0 * dm1 + dm2) / (12.0 * h);
    cplx dxy3 = (dp2 - 2.0 * dp1 + 2.0 * dm1 - dm2) / (2.0 * h * h * h);
    return dxy + (ygap * ygap / 24.0) * dxy3;
  }
};

double u_factor(const Geometry& geom, const std::vector<double>& t) {
  double u = std::pow(2.0, geom.r);
  for (double x : t) u *= std::cosh(x);
  return u;
}

void check_real_regular(const SpectralParam& lam, const char* who) {
  for (const cplx& z : lam.lambda)
    if (std::abs(z.imag()) > 1e-12)
      throw std::invalid_argument(std::string(who) + ": lambda must be real");
  if (!lam.regular())
    throw std::domain_error(std::string(who) + ": lambda must be regular");
}

void check_ranks(const Geometry& geom, const SpectralParam& lam,
                 const ChamberPoint& t, const char* who) {
  if (lam.rank() != geom.r || t.rank() != geom.r)
    throw std::invalid_argument(std::string(who) + ": rank mismatch");
}

}  // namespace

SphericalEval phi(const Geometry& geom, const SpectralParam& lam,
                  const ChamberPoint& t) {
  check_ranks(geom, lam, t, "phi");
  if (!t.closed(1e-9))
    throw std::invalid_argument("phi: t must lie in the closed chamber");
  const JacobiOrder ord{geom.b, lam.l};

  if (geom.r == 1) {
    double tt = std::max(t.t[0], 0.0);
    cplx v = jacobi_phi(lam.lambda[0], tt, ord);
    double u = std::cosh(tt);
    return SphericalEval{std::pow(u, -lam.l) * v, SphericalMethod::determinant,
                         1.0};
  }
  if (geom.r != 2)
    throw std::invalid_argument("phi: ranks above 2 are not supported");

  const double t1 = std::max(t.t[0], 0.0), t2 = std::max(t.t[1], 0.0);
  const double x1 = std::cosh(2.0 * t1), x2 = std::cosh(2.0 * t2);
  const cplx y1 = lam.lambda[0] * lam.lambda[0];
  const cplx y2 = lam.lambda[1] * lam.lambda[1];
  const double gx = x1 - x2;
  const cplx gy = y1 - y2;
  const double xbar = 0.5 * (x1 + x2);
  const cplx ybar = 0.5 * (y1 + y2);
  const bool conf_x = std::abs(gx) < 1e-4 * (1.0 + std::abs(xbar));
  const bool conf_y = std::abs(gy) < 1e-4 * (1.0 + std::abs(ybar));

  GSurface G{ord};
  /* det ratio identity: det / ((x1-x2)(y1-y2)) = A*Dm - B*C with
   * A = G(x1,y1), B = G[x1; y1,y2], C = G[x1,x2; y1], Dm = G[x1,x2; y1,y2]. */
  cplx A = G.value(x1, y1), B, C, Dm;
  if (!conf_x && !conf_y) {
    cplx g12 = G.value(x1, y2), g21 = G.value(x2, y1), g22 = G.value(x2, y2);
    B = (A - g12) / gy;
    C = (A - g21) / gx;
    Dm = (B - (g21 - g22) / gy) / gx;
  } else if (conf_y && !conf_x) {
    B = G.col_dd(x1, ybar, std::abs(gy));
    C = (A - G.value(x2, y1)) / gx;
    Dm = (B - G.col_dd(x2, ybar, std::abs(gy))) / gx;
  } else if (conf_x && !conf_y) {
    B = (A - G.value(x1, y2)) / gy;
    C = G.row_dd(xbar, y1, gx);
    Dm = (C - G.row_dd(xbar, y2, gx)) / gy;
  } else {
    B = G.col_dd(x1, ybar, std::abs(gy));
    C = G.row_dd(xbar, y1, gx);
    Dm = G.mixed_dd(xbar, ybar, std::abs(gy));
  }

  const double cconst =
      -16.0 * (geom.b + 1.0) * std::pow(4.0, static_cast<double>(lam.l));
  const cplx val = 0.5 * cconst * (A * Dm - B * C);
  const double u = u_factor(geom, {t1, t2});
  double denom = std::abs(A * Dm - B * C);
  double cond = denom > 0.0
                    ? (std::abs(A * Dm) + std::abs(B * C)) / denom
                    : std::numeric_limits<double>::infinity();
  return SphericalEval{std::pow(u, -static_cast<double>(lam.l)) * val,
                       conf_x || conf_y ? SphericalMethod::confluent
                                        : SphericalMethod::determinant,
                       cond};
}

IntegralEval phi_defining_integral(const Geometry& geom, const SpectralParam& lam,
                                   const ChamberPoint& t, std::uint64_t seed,
                                   long samples, double target_rel_error) {
  check_ranks(geom, lam, t, "phi_defining_integral");
  if (samples < 8)
    throw std::invalid_argument("phi_defining_integral: too few samples");
  GroupElement g = make_a(geom, t.t);
  std::vector<double> rr = rho(geom);

  auto integrand = [&](const KElement& k) -> cplx {
    auto [H, kap] = boundary_pair(g, k);
    cplx expo(0.0, 0.0);
    for (int j = 0; j < geom.r; ++j)
      expo -= (kI * lam.lambda[j] + rr[j]) * H[j];
    return std::exp(expo) * tau(k_mul(k_adjoint(k), kap), lam.l);
  };

  IntegralEval out;
  if (geom.r == 1 && geom.b == 0) {
    long nodes = samples;
    KahanSumC full, half;
    for (long i = 0; i < nodes; ++i) {
      double th = 2.0 * M_PI * static_cast<double>(i) / nodes;
      Mat a(1, 1), d(1, 1);
      a(0, 0) = std::polar(1.0, th);
      d(0, 0) = std::polar(1.0, -th);
      cplx v = integrand(KElement(a, d));
      full.add(v);
      if (i % 2 == 0) half.add(v);
    }
    out.value = full.value() / static_cast<double>(nodes);
    out.error_estimate =
        std::abs(out.value - half.value() / static_cast<double>((nodes + 1) / 2));
    out.evals = nodes;
  } else {
    Rng rng(seed);
    KahanSumC sum;
    KahanSum sq;
    for (long i = 0; i < samples; ++i) {
      cplx v = integrand(haar_k_next(geom, rng));
      sum.add(v);
      sq.add(std::norm(v));
    }
    cplx mean = sum.value() / static_cast<double>(samples);
    double var = std::max(0.0, sq.value() / samples - std::norm(mean));
    out.value = mean;
    out.error_estimate = std::sqrt(var / static_cast<double>(samples));
    out.evals = samples;
  }
  if (target_rel_error > 0.0 &&
      out.error_estimate > target_rel_error * std::abs(out.value))
    throw std::runtime_error(
        "phi_defining_integral: sampling budget exhausted before target error");
  return out;
}

cplx phi_series(const Geometry& geom, const SpectralParam& lam,
                const ChamberPoint& t) {
  check_ranks(geom, lam, t, "phi_series");
  check_real_regular(lam, "phi_series");
  if (!t.open() || std::sinh(t.t.back()) <= 1.0)
    throw std::domain_error("phi_series: t must satisfy sinh(t_r) > 1 inside the chamber");
  const JacobiOrder ord{geom.b, lam.l};
  WeylDensity wd = weyl_density(geom, t);
  KahanSumC sum;
  for (const WeylElement& s : weyl_group(geom.r)) {
    std::vector<cplx> sl = weyl_act(s, lam.lambda);
    cplx term = hc_c(SpectralParam(sl, lam.l), geom.b);
    for (int j = 0; j < geom.r; ++j) term *= jacobi_psi(sl[j], t.t[j], ord);
    sum.add(term);
  }
  return std::pow(wd.u, -static_cast<double>(lam.l)) * sum.value() / wd.omega;
}

cplx phi_asym(const Geometry& geom, const SpectralParam& lam,
              const ChamberPoint& t) {
  check_ranks(geom, lam, t, "phi_asym");
  check_real_regular(lam, "phi_asym");
  std::vector<double> rl = rho_l(geom, lam.l);
  KahanSumC sum;
  for (const WeylElement& s : weyl_group(geom.r)) {
    std::vector<cplx> sl = weyl_act(s, lam.lambda);
    cplx expo(0.0, 0.0);
    for (int j = 0; j < geom.r; ++j) expo += (kI * sl[j] - rl[j]) * t.t[j];
    sum.add(hc_c(SpectralParam(sl, lam.l), geom.b) * std::exp(expo));
  }
  return std::pow(u_factor(geom, t.t), -static_cast<double>(lam.l)) * sum.value();
}

double radial_residual(const Geometry& geom, const SpectralParam& lam,
                       const ChamberPoint& t, double h) {
  check_ranks(geom, lam, t, "radial_residual");
  if (!(h > 1e-8) || h > 0.05)
    throw std::invalid_argument("radial_residual: step h out of range");
  if (!t.open(2.0 * h))
    throw std::invalid_argument(
        "radial_residual: t must sit at least 2h inside the open chamber");

  auto Gfun = [&](const std::vector<double>& tv) -> cplx {
    return std::pow(u_factor(geom, tv), static_cast<double>(lam.l)) *
           phi(geom, lam, ChamberPoint(tv)).value;
  };

  const int r = geom.r;
  cplx g0 = Gfun(t.t);
  std::vector<cplx> d1(r), d2(r);
  for (int j = 0; j < r; ++j) {
    std::vector<double> tv = t.t;
    auto at = [&](double dt) {
      tv[j] = t.t[j] + dt;
      return Gfun(tv);
    };
    cplx p2 = at(2.0 * h), p1 = at(h), m1 = at(-h), m2 = at(-2.0 * h);
    d1[j] = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    d2[j] = (-p2 + 16.0 * p1 - 30.0 * g0 + 16.0 * m1 - m2) / (12.0 * h * h);
  }

  KahanSumC op;
  for (int j = 0; j < r; ++j) {
    double c1 = (2.0 * geom.b + 1.0) / std::tanh(t.t[j]) +
                (1.0 - 2.0 * lam.l) * std::tanh(t.t[j]);
    op.add(d2[j] + c1 * d1[j]);
  }
  for (int j = 0; j < r; ++j)
    for (int k = j + 1; k < r; ++k) {
      double denom = std::cosh(2.0 * t.t[j]) - std::cosh(2.0 * t.t[k]);
      op.add(4.0 *
             (std::sinh(2.0 * t.t[j]) * d1[j] - std::sinh(2.0 * t.t[k]) * d1[k]) /
             denom);
    }

  cplx eig(0.0, 0.0);
  for (const cplx& z : lam.lambda) eig += z * z;
  for (double x : rho_l(geom, lam.l)) eig += x * x;
  return std::abs(op.value() + eig * g0) / std::abs(g0);
}

KeyLemmaReport key_lemma_sweep(const Geometry& geom, int l,
                               const std::vector<std::vector<double>>& lambda_grid,
                               const std::vector<std::vector<double>>& t_grid,
                               bool cor_variant, int d_max) {
  const int r = geom.r;
  for (const auto& lv : lambda_grid)
    if (static_cast<int>(lv.size()) != r)
      throw std::invalid_argument("key_lemma_sweep: lambda entry of wrong rank");
  for (const auto& tv : t_grid)
    if (static_cast<int>(tv.size()) != r ||
        !ChamberPoint(std::vector<double>(tv)).closed(1e-12))
      throw std::invalid_argument("key_lemma_sweep: t entry not in the closed chamber");
  if (lambda_grid.empty() || t_grid.empty())
    throw std::invalid_argument("key_lemma_sweep: empty grid");

  const std::size_t nl = lambda_grid.size(), nt = t_grid.size();
  const std::vector<double> rl = rho_l(geom, l);
  const std::vector<double> rr = rho(geom);
  std::vector<double> base(nl * nt, 0.0);
  std::vector<double> lam2(nl, 0.0), lnorm(nl, 0.0);

  parallel_for(nl, [&](std::size_t i) {
    const std::vector<double>& lv = lambda_grid[i];
    SpectralParam sp(lv, l);
    double s2 = 0.0;
    for (double x : lv) s2 += x * x;
    lam2[i] = s2;
    lnorm[i] = std::sqrt(s2);
    double api = std::abs(pi_short(sp, geom.b));
    for (std::size_t k = 0; k < nt; ++k) {
      const std::vector<double>& tv = t_grid[k];
      double aphi = std::abs(phi(geom, sp, ChamberPoint(std::vector<double>(tv))).value);
      double expo = 0.0, ul = 1.0;
      if (cor_variant) {
        for (int j = 0; j < r; ++j) expo += rr[j] * tv[j];
      } else {
        for (int j = 0; j < r; ++j) expo += rl[j] * tv[j];
        ul = std::pow(u_factor(geom, tv), static_cast<double>(l));
      }
      base[i * nt + k] = api * ul * aphi * std::exp(expo);
    }
  });

  double nmax = *std::max_element(lnorm.begin(), lnorm.end());
  double cut = 0.8 * nmax;
  int fitted = d_max;
  for (int d = 0; d <= d_max; ++d) {
    double bmax = 0.0, imax = 0.0;
    for (std::size_t i = 0; i < nl; ++i) {
      double row = 0.0;
      for (std::size_t k = 0; k < nt; ++k)
        row = std::max(row, base[i * nt + k] / std::pow(1.0 + lam2[i], d));
      if (lnorm[i] >= cut)
        bmax = std::max(bmax, row);
      else
        imax = std::max(imax, row);
    }
    if (imax == 0.0) imax = bmax;
    if (bmax <= 1.02 * imax) {
      fitted = d;
      break;
    }
  }

  KeyLemmaReport rep;
  rep.lambda_points = nl;
  rep.t_points = nt;
  rep.lambda_max = nmax;
  rep.cor_variant = cor_variant;
  rep.fitted_d = fitted;
  for (const auto& tv : t_grid)
    for (double x : tv) rep.t_max = std::max(rep.t_max, x);
  for (std::size_t i = 0; i < nl; ++i)
    for (std::size_t k = 0; k < nt; ++k) {
      double v = base[i * nt + k] / std::pow(1.0 + lam2[i], fitted);
      if (v > rep.max_ratio) {
        rep.max_ratio = v;
        rep.witness_lambda = lambda_grid[i];
        rep.witness_t = t_grid[k];
      }
    }
  return rep;
}

}  // namespace grassmann
