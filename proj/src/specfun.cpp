#include "grassmann/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grassmann {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kLn2 = 0.693147180559945309417232121458176568;
const cplx kI(0.0, 1.0);

bool near_nonpos_int(cplx z, double tol) {
  if (std::abs(z.imag()) > tol) return false;
  double zr = z.real();
  if (zr > tol) return false;
  return std::abs(zr - std::round(zr)) <= tol;
}

/* Returns N >= 0 when z is within tol of -N for an integer N >= 0, else -1. */
long nonpos_int_of(cplx z, double tol = 1e-12) {
  if (!near_nonpos_int(z, tol)) return -1;
  return std::lround(-std::round(z.real()));
}

/* log sin(pi z), stable for large |Im z|: for Im z <= 0,
 * sin(pi z) = e^{i pi z}(1 - e^{-2 i pi z})/(2i) with |e^{-2 i pi z}| <= 1. */
cplx lnsin_pi(cplx z) {
  if (z.imag() > 0.0) return std::conj(lnsin_pi(std::conj(z)));
  cplx ipz = kI * (kPi * z);
  return ipz + std::log(1.0 - std::exp(-2.0 * ipz)) - cplx(kLn2, kPi / 2.0);
}

/* Lanczos coefficients, g = 607/128, 15 terms (Godfrey's set; relative
 * accuracy ~1e-15 on the right half-plane). */
const double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};
constexpr double kLanczosG = 607.0 / 128.0;

}  // namespace

/* ln_gamma
 *
 * Natural logarithm of Gamma(z) for complex z by the Lanczos sum on
 * Re z >= 1/2 and the reflection formula
 *     lnGamma(z) = ln(pi) - lnsin(pi z) - lnGamma(1 - z)
 * on the left half-plane. The imaginary part may carry a 2*pi*k offset
 * relative to the principal branch; every consumer exponentiates or
 * forms Gamma ratios, for which the offset is immaterial.
 */
cplx ln_gamma(cplx z) {
  if (near_nonpos_int(z, 1e-13))
    throw std::domain_error("ln_gamma: pole at a non-positive integer");
  if (z.real() < 0.5)
    return std::log(kPi) - lnsin_pi(z) - ln_gamma(1.0 - z);
  cplx acc = kLanczos[0];
  for (int k = 1; k < 15; ++k) acc += kLanczos[k] / (z - 1.0 + static_cast<double>(k));
  cplx w = z + (kLanczosG - 0.5);
  return 0.5 * std::log(2.0 * kPi) + (z - 0.5) * std::log(w) - w + std::log(acc);
}

/* digamma
 *
 * Real digamma function: reflection for x < 1/2, upward recurrence to
 * x >= 8, then the asymptotic Bernoulli series. Accuracy ~1e-14.
 */
double digamma(double x) {
  if (x <= 0.0 && std::abs(x - std::round(x)) < 1e-12)
    throw std::domain_error("digamma: pole at a non-positive integer");
  double result = 0.0;
  if (x < 0.5) {
    result = -kPi / std::tan(kPi * x);
    x = 1.0 - x;
  }
  while (x < 8.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  double r = 1.0 / (x * x);
  result += std::log(x) - 0.5 / x -
            r * (1.0 / 12.0 -
                 r * (1.0 / 120.0 -
                      r * (1.0 / 252.0 -
                           r * (1.0 / 240.0 -
                                r * (1.0 / 132.0 -
                                     r * (691.0 / 32760.0 - r / 12.0))))));
  return result;
}

namespace {

/* Power series sum_{k>=0} (a)_k (b)_k / ((c)_k k!) w^k for real w in [0,1):
 * relative stop at 1e-17 on two consecutive terms plus a geometric tail
 * correction. Throws on term-budget exhaustion. Accumulated in extended
 * precision: with large imaginary parameters the terms peak many e-folds
 * above the sum, and the extra mantissa bits absorb that cancellation. */
cplx f21_series(cplx a, cplx b, cplx c, double w, int max_terms) {
  using cld = std::complex<long double>;
  struct KahanLD {
    long double s = 0.0L, c2 = 0.0L;
    void add(long double x) {
      long double y = x - c2;
      long double t = s + y;
      c2 = (t - s) - y;
      s = t;
    }
  };
  cld A(a.real(), a.imag()), B(b.real(), b.imag()), C(c.real(), c.imag());
  long double W = w;
  KahanLD sre, sim;
  cld term(1.0L, 0.0L);
  sre.add(term.real());
  sim.add(term.imag());
  int small_streak = 0;
  for (int k = 0; k < max_terms; ++k) {
    long double dk = k;
    cld ratio = (A + dk) * (B + dk) / ((C + dk) * (dk + 1.0L));
    term *= ratio * W;
    sre.add(term.real());
    sim.add(term.imag());
    double mag = static_cast<double>(std::abs(term));
    if (!(mag < 1e280))
      throw std::runtime_error("hypergeometric series: term overflow");
    double smag = std::hypot(static_cast<double>(sre.s), static_cast<double>(sim.s));
    if (mag < 1e-17 * smag) {
      if (++small_streak >= 2) {
        cld next = term * (A + dk + 1.0L) * (B + dk + 1.0L) /
                   ((C + dk + 1.0L) * (dk + 2.0L)) * W;
        if (w < 1.0) {
          next /= (1.0L - W);
          sre.add(next.real());
          sim.add(next.imag());
        }
        return cplx(static_cast<double>(sre.s), static_cast<double>(sim.s));
      }
    } else {
      small_streak = 0;
    }
  }
  throw std::runtime_error("hypergeometric series: no convergence within budget");
}

/* Terminating case: p = -N exactly; plain Horner-free accumulation, valid
 * for every real x. */
cplx f21_terminating(long N, cplx q, cplx c, double x) {
  KahanSumC sum;
  cplx term(1.0, 0.0);
  sum.add(term);
  for (long k = 0; k < N; ++k) {
    double dk = static_cast<double>(k);
    term *= (dk - static_cast<double>(N)) * (q + dk) / ((c + dk) * (dk + 1.0)) * x;
    sum.add(term);
  }
  return sum.value();
}

}  // namespace

cplx gauss_2f1(cplx a, cplx b, cplx c, double x) {
  if (!(x < 0.75))
    throw std::invalid_argument("gauss_2f1: argument must lie left of 3/4");
  long Na = nonpos_int_of(a), Nb = nonpos_int_of(b);
  long Nc = nonpos_int_of(c);
  if (Na >= 0 || Nb >= 0) {
    long N;
    cplx q;
    if (Na >= 0 && (Nb < 0 || Na <= Nb)) {
      N = Na;
      q = b;
    } else {
      N = Nb;
      q = a;
    }
    if (Nc >= 0 && Nc < N)
      throw std::domain_error("gauss_2f1: c at a non-positive integer");
    return f21_terminating(N, q, c, x);
  }
  if (Nc >= 0) throw std::domain_error("gauss_2f1: c at a non-positive integer");
  if (x == 0.0) return cplx(1.0, 0.0);
  if (x > 0.0) return f21_series(a, b, c, x, 10000);
  double w = x / (x - 1.0);
  cplx pref = std::exp(-a * std::log1p(-x));
  return pref * f21_series(a, c - b, c, w, 10000);
}

namespace {

struct JacParams {
  cplx a1, a2, c;
};

JacParams jac_params(cplx mu, const JacobiOrder& ord) {
  cplx imu = kI * mu;
  double s = static_cast<double>(ord.b - ord.l + 1);
  return JacParams{0.5 * (imu + s), 0.5 * (-imu + s),
                   cplx(static_cast<double>(ord.b + 1), 0.0)};
}

/* Canonical sign: phi and its t-derivative are even in mu; fold to the
 * half-plane so the symmetry holds bit for bit. */
cplx fold_mu(cplx mu) {
  if (mu.real() < 0.0 || (mu.real() == 0.0 && mu.imag() < 0.0)) return -mu;
  return mu;
}

/* Relative cancellation loss (in e-folds) of the Pfaff-mapped series for
 * phi at (mu, t); the series is trustworthy while this stays under ~12. */
double pfaff_loss(cplx mu, double t) {
  return std::abs(mu.real()) * std::log(std::cosh(t));
}

bool pfaff_ok(cplx mu, double t) {
  double ch = std::cosh(t);
  return pfaff_loss(mu, t) <= 12.0 && 39.0 * ch * ch <= 40000.0;
}

/* phi via the Pfaff map w = tanh^2 t:
 * F(a1,a2;c;-sinh^2 t) = cosh^{-2 a1} t * F(a1, c-a2; c; tanh^2 t). */
cplx phi_pfaff(cplx mu, double t, const JacobiOrder& ord) {
  JacParams p = jac_params(mu, ord);
  double th = std::tanh(t);
  double lc = std::log(std::cosh(t));
  cplx pref = std::exp(-2.0 * p.a1 * lc);
  return pref * f21_series(p.a1, p.c - p.a2, p.c, th * th, 50000);
}

/* d/dt of phi via the same map applied to the contiguous derivative
 * dF/dx = (a1 a2 / c) F(a1+1, a2+1; c+1; x), dx/dt = -sinh 2t. */
cplx phi_dt_pfaff(cplx mu, double t, const JacobiOrder& ord) {
  JacParams p = jac_params(mu, ord);
  double th = std::tanh(t);
  double lc = std::log(std::cosh(t));
  cplx pref = std::exp(-2.0 * (p.a1 + 1.0) * lc);
  cplx fprime = (p.a1 * p.a2 / p.c) * pref *
                f21_series(p.a1 + 1.0, p.c - p.a2, p.c + 1.0, th * th, 50000);
  return fprime * (-std::sinh(2.0 * t));
}

void check_psi_param(cplx mu) {
  cplx w = kI * mu;
  double nearest = std::round(w.real());
  if (nearest >= 1.0 && std::abs(w - cplx(nearest, 0.0)) < 1e-6)
    throw std::domain_error("jacobi_psi: i*mu at a positive integer");
}

/* psi and psi' for all t > 0 through the Pfaff map w = sech^2 t:
 * F(A,B;C;-sinh^{-2} t) = tanh^{2A} t * F(A, C-B; C; sech^2 t),
 * with A = (-i mu + b - l + 1)/2, B = (-i mu - b - l + 1)/2, C = 1 - i mu. */
void psi_pair(cplx mu, double t, const JacobiOrder& ord, bool want_dt,
              cplx* val, cplx* dval) {
  check_psi_param(mu);
  cplx imu = kI * mu;
  double b = static_cast<double>(ord.b), l = static_cast<double>(ord.l);
  cplx A = 0.5 * (-imu + b - l + 1.0);
  cplx B = 0.5 * (-imu - b - l + 1.0);
  cplx C = 1.0 - imu;
  cplx gam = imu - (b + 1.0 - l);
  double sh = std::sinh(t), ch = std::cosh(t);
  double w = 1.0 / (ch * ch);
  double lth = std::log(std::tanh(t));
  cplx lead = std::exp(gam * std::log(2.0 * sh));
  cplx F = std::exp(2.0 * A * lth) * f21_series(A, C - B, C, w, 50000);
  *val = lead * F;
  if (!want_dt) return;
  cplx Fp = (A * B / C) * std::exp(2.0 * (A + 1.0) * lth) *
            f21_series(A + 1.0, C - B, C + 1.0, w, 50000);
  double coth = ch / sh, csch2 = 1.0 / (sh * sh);
  *dval = lead * (gam * coth * F + Fp * 2.0 * coth * csch2);
}

cplx jacobi_c_impl(cplx mu, const JacobiOrder& ord) {
  cplx w = kI * mu;
  double nearest = std::round(w.real());
  if (std::abs(w - cplx(nearest, 0.0)) < 1e-6)
    throw std::domain_error("jacobi_c: i*mu within the integer guard band");
  double b = static_cast<double>(ord.b), l = static_cast<double>(ord.l);
  cplx lg = (b + 1.0 - l - w) * kLn2 + ln_gamma(cplx(b + 1.0, 0.0)) + ln_gamma(w) -
            ln_gamma(0.5 * (b + 1.0 - l + w)) - ln_gamma(0.5 * (b + 1.0 + l + w));
  return std::exp(lg);
}

/* mu ~ 0, large t: the c-parameter degenerates (c = a+b) and the two
 * solutions psi_{+-mu} coalesce; evaluate the logarithmic expansion of
 * F(a,b;a+b;z) around z = 1 with z = tanh^2 t, 1-z = sech^2 t:
 *   F = Gamma(a+b)/(Gamma(a)Gamma(b)) *
 *       sum_s ((a)_s (b)_s/(s!)^2)(2 psi(s+1)-psi(a+s)-psi(b+s)-ln(1-z))(1-z)^s.
 * The mu-dependence is dropped; the relative error is O(mu^2 t^2). */
cplx phi_log_case(double t, const JacobiOrder& ord) {
  double a = 0.5 * (ord.b - ord.l + 1);
  double bb = 0.5 * (ord.b + ord.l + 1);
  double ch = std::cosh(t);
  double omz = 1.0 / (ch * ch);
  double lomz = -2.0 * std::log(ch);
  double lead0 = std::exp((ord.l - ord.b - 1) * std::log(ch));
  long m1 = nonpos_int_of(cplx(a, 0.0)), m2 = nonpos_int_of(cplx(bb, 0.0));
  if (m1 >= 0 || m2 >= 0) {
    /* F degenerates to a polynomial; the log expansion does not apply */
    double w = 1.0 - omz;
    cplx cc(static_cast<double>(ord.b + 1), 0.0);
    cplx F = (m1 >= 0 && (m2 < 0 || m1 <= m2))
                 ? f21_terminating(m1, cplx(bb, 0.0), cc, w)
                 : f21_terminating(m2, cplx(a, 0.0), cc, w);
    return lead0 * F;
  }
  double pref = std::tgamma(static_cast<double>(ord.b + 1)) /
                (std::tgamma(a) * std::tgamma(bb));
  KahanSum sum;
  double coef = 1.0, zp = 1.0;
  for (int s = 0; s < 400; ++s) {
    double ds = static_cast<double>(s);
    double bracket =
        2.0 * digamma(ds + 1.0) - digamma(a + ds) - digamma(bb + ds) - lomz;
    double term = coef * zp * bracket;
    sum.add(term);
    if (std::abs(term) < 1e-17 * std::abs(sum.value()) && s > 2) break;
    coef *= (a + ds) * (bb + ds) / ((ds + 1.0) * (ds + 1.0));
    zp *= omz;
  }
  return cplx(pref * sum.value() * lead0, 0.0);
}

}  // namespace

cplx jacobi_phi(cplx mu, double t, const JacobiOrder& ord) {
  if (!(t >= 0.0)) throw std::invalid_argument("jacobi_phi: t must be >= 0");
  if (t == 0.0) return cplx(1.0, 0.0);
  mu = fold_mu(mu);
  JacParams p = jac_params(mu, ord);
  long N1 = nonpos_int_of(p.a1), N2 = nonpos_int_of(p.a2);
  if (N1 >= 0 || N2 >= 0) {
    double sh = std::sinh(t);
    if (N2 >= 0 && (N1 < 0 || N2 <= N1))
      return f21_terminating(N2, p.a1, p.c, -sh * sh);
    return f21_terminating(N1, p.a2, p.c, -sh * sh);
  }
  if (pfaff_ok(mu, t)) return phi_pfaff(mu, t, ord);
  if (std::abs(mu) >= 1e-5) {
    cplx psi_p, psi_m;
    psi_pair(mu, t, ord, false, &psi_p, nullptr);
    psi_pair(-mu, t, ord, false, &psi_m, nullptr);
    return jacobi_c_impl(mu, ord) * psi_p + jacobi_c_impl(-mu, ord) * psi_m;
  }
  return phi_log_case(t, ord);
}

cplx jacobi_phi_dt(cplx mu, double t, const JacobiOrder& ord) {
  if (!(t >= 0.0)) throw std::invalid_argument("jacobi_phi_dt: t must be >= 0");
  if (t == 0.0) return cplx(0.0, 0.0);
  mu = fold_mu(mu);
  JacParams p = jac_params(mu, ord);
  long N1 = nonpos_int_of(p.a1), N2 = nonpos_int_of(p.a2);
  if (N1 >= 0 || N2 >= 0) {
    long N = (N2 >= 0 && (N1 < 0 || N2 <= N1)) ? N2 : N1;
    cplx q = (N2 >= 0 && (N1 < 0 || N2 <= N1)) ? p.a1 : p.a2;
    if (N == 0) return cplx(0.0, 0.0);
    double sh = std::sinh(t);
    cplx fprime = (-static_cast<double>(N)) * q / p.c *
                  f21_terminating(N - 1, q + 1.0, p.c + 1.0, -sh * sh);
    return fprime * (-std::sinh(2.0 * t));
  }
  if (pfaff_ok(mu, t)) return phi_dt_pfaff(mu, t, ord);
  if (std::abs(mu) >= 1e-5) {
    cplx vp, dp, vm, dm;
    psi_pair(mu, t, ord, true, &vp, &dp);
    psi_pair(-mu, t, ord, true, &vm, &dm);
    return jacobi_c_impl(mu, ord) * dp + jacobi_c_impl(-mu, ord) * dm;
  }
  const double h = 1e-4;
  cplx m2 = jacobi_phi(mu, t - 2 * h, ord), m1 = jacobi_phi(mu, t - h, ord);
  cplx p1 = jacobi_phi(mu, t + h, ord), p2 = jacobi_phi(mu, t + 2 * h, ord);
  return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
}

cplx jacobi_psi(cplx mu, double t, const JacobiOrder& ord) {
  if (!(std::sinh(t) > 1.0))
    throw std::domain_error("jacobi_psi: requires sinh t > 1");
  cplx val;
  psi_pair(mu, t, ord, false, &val, nullptr);
  return val;
}

cplx jacobi_c(cplx mu, const JacobiOrder& ord) { return jacobi_c_impl(mu, ord); }

std::vector<cplx> jacobi_ode_march(cplx mu, const JacobiOrder& ord,
                                   const std::vector<double>& ts) {
  const double t0 = 1.0;
  for (double t : ts)
    if (!(t >= t0))
      throw std::invalid_argument("jacobi_ode_march: targets must be >= 1");
  if (pfaff_loss(mu, t0) > 12.0)
    throw std::invalid_argument("jacobi_ode_march: |Re mu| too large for series initial data");

  mu = fold_mu(mu);
  double b = static_cast<double>(ord.b), l = static_cast<double>(ord.l);
  cplx Q = mu * mu + (b + 1.0 - l) * (b + 1.0 - l);
  auto P = [b, l](double t) {
    return (2.0 * b + 1.0) / std::tanh(t) + (1.0 - 2.0 * l) * std::tanh(t);
  };
  auto rhs = [&](double t, cplx y, cplx v, cplx* dy, cplx* dv) {
    *dy = v;
    *dv = -P(t) * v - Q * y;
  };

  /* One pass of classical RK4 at step h, visiting every target exactly. */
  auto march = [&](double h, std::vector<cplx>* out) {
    std::vector<std::size_t> order(ts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&ts](std::size_t i, std::size_t j) { return ts[i] < ts[j]; });
    cplx y = phi_pfaff(mu, t0, ord);
    cplx v = phi_dt_pfaff(mu, t0, ord);
    double t = t0;
    out->assign(ts.size(), cplx(0.0));
    for (std::size_t idx : order) {
      double target = ts[idx];
      while (t < target - 1e-15) {
        double step = std::min(h, target - t);
        cplx k1y, k1v, k2y, k2v, k3y, k3v, k4y, k4v;
        rhs(t, y, v, &k1y, &k1v);
        rhs(t + 0.5 * step, y + 0.5 * step * k1y, v + 0.5 * step * k1v, &k2y, &k2v);
        rhs(t + 0.5 * step, y + 0.5 * step * k2y, v + 0.5 * step * k2v, &k3y, &k3v);
        rhs(t + step, y + step * k3y, v + step * k3v, &k4y, &k4v);
        y += step / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t += step;
      }
      (*out)[idx] = y;
    }
  };

  double h = std::min(5e-4, 0.02 / (std::abs(mu) + b + 2.0));
  std::vector<cplx> coarse, fine;
  march(h, &coarse);
  march(0.5 * h, &fine);
  std::vector<cplx> out(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    out[i] = (16.0 * fine[i] - coarse[i]) / 15.0;
  return out;
}

bool SpectralParam::regular(double tol) const {
  const std::size_t r = lambda.size();
  for (std::size_t i = 0; i < r; ++i) {
    if (std::abs(lambda[i]) <= tol) return false;
    for (std::size_t j = i + 1; j < r; ++j) {
      if (std::abs(lambda[i] - lambda[j]) <= tol) return false;
      if (std::abs(lambda[i] + lambda[j]) <= tol) return false;
    }
  }
  return true;
}

namespace {

/* 1/Gamma(z), zero at the poles (needed where a denominator Gamma makes a
 * factor vanish rather than blow up). */
cplx inv_gamma(cplx z) {
  if (near_nonpos_int(z, 1e-13)) return cplx(0.0, 0.0);
  return std::exp(-ln_gamma(z));
}

double c0_const(int r, int b) {
  double c0 = std::pow(std::tgamma(static_cast<double>(b + 1)), r) *
              std::pow(2.0, static_cast<double>(r * (r + b)));
  for (int j = 1; j <= r - 1; ++j)
    c0 *= std::pow(static_cast<double>(b + j), static_cast<double>(r - j)) *
          std::tgamma(static_cast<double>(j + 1));
  return c0;
}

double sign_rr1(int r) { return ((r * (r - 1) / 2) % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

cplx hc_c(const SpectralParam& lam, int b) {
  const int r = lam.rank();
  if (r < 1) throw std::invalid_argument("hc_c: empty spectral parameter");
  if (!lam.regular(1e-12))
    throw std::domain_error("hc_c: spectral parameter on a Weyl wall");
  const double l = static_cast<double>(lam.l);
  cplx denom(1.0, 0.0);
  for (int k = 0; k < r; ++k)
    for (int j = k + 1; j < r; ++j)
      denom *= lam.lambda[k] * lam.lambda[k] - lam.lambda[j] * lam.lambda[j];
  cplx prod(1.0, 0.0);
  for (int j = 0; j < r; ++j) {
    cplx il = kI * lam.lambda[j];
    prod *= std::exp(-il * kLn2 + ln_gamma(il)) *
            inv_gamma(0.5 * (b + 1.0 + il + l)) * inv_gamma(0.5 * (b + 1.0 + il - l));
  }
  double pref = sign_rr1(r) * std::pow(2.0, static_cast<double>(r * (r - 1))) *
                c0_const(r, b);
  return pref / denom * prod;
}

cplx pi_short(const SpectralParam& lam, int b) {
  const int r = lam.rank();
  cplx out = std::pow(4.0 * (b + 2.0 * r), -static_cast<double>(r * r));
  for (int j = 0; j < r; ++j) out *= lam.lambda[j];
  for (int k = 0; k < r; ++k)
    for (int j = k + 1; j < r; ++j)
      out *= lam.lambda[k] * lam.lambda[k] - lam.lambda[j] * lam.lambda[j];
  return out;
}

cplx pi_l(const std::vector<cplx>& z, int l, int b) {
  const int r = static_cast<int>(z.size());
  cplx out = std::pow(4.0 * (b + 2.0 * r), -static_cast<double>(r * r));
  if (eps_l(l, b) == 1)
    for (int j = 0; j < r; ++j) out *= z[j];
  for (int k = 0; k < r; ++k)
    for (int j = k + 1; j < r; ++j) out *= z[k] * z[k] - z[j] * z[j];
  return out;
}

int eps_l(int l, int b) {
  int m = b + 1 - l;
  return (m <= -2 && m % 2 == 0) ? -1 : 1;
}

cplx b_fn(const SpectralParam& lam, int b) {
  const int r = lam.rank();
  if (r < 1) throw std::invalid_argument("b_fn: empty spectral parameter");
  for (const cplx& z : lam.lambda)
    if (std::abs(z.imag()) > 1e-12)
      throw std::invalid_argument("b_fn: lambda must be real");
  const double l = static_cast<double>(lam.l);
  double pref = std::pow(4.0 * (b + 2.0 * r), -static_cast<double>(r * r)) *
                std::pow(2.0, static_cast<double>(r * (r - 1))) * c0_const(r, b);
  cplx out(pref, 0.0);
  if (eps_l(lam.l, b) == 1) {
    for (int j = 0; j < r; ++j) {
      cplx il = kI * lam.lambda[j];
      out *= std::exp(-il * kLn2 + ln_gamma(1.0 + il)) *
             inv_gamma(0.5 * (b + 1.0 + l + il)) * inv_gamma(0.5 * (b + 1.0 - l + il));
    }
  } else {
    /* b+1-l = -2p: Gamma(i lam)/Gamma(-p + i lam/2) rewritten pole-free as
     * Gamma(1+i lam) prod_{m=1..p} (i lam/2 - m) / (2 Gamma(1 + i lam/2)). */
    const long p = (lam.l - b - 1) / 2;
    for (int j = 0; j < r; ++j) {
      cplx il = kI * lam.lambda[j];
      cplx poly(1.0, 0.0);
      for (long m = 1; m <= p; ++m) poly *= 0.5 * il - static_cast<double>(m);
      out *= std::exp(-il * kLn2 + ln_gamma(1.0 + il) - ln_gamma(1.0 + 0.5 * il)) *
             poly * 0.5 * inv_gamma(0.5 * (b + 1.0 + l + il));
    }
  }
  return out;
}

}  // namespace grassmann
