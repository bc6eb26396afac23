/* Scalar special functions: log-gamma, Gauss 2F1, Jacobi functions of order
 * (b,-l), connection coefficients, and the rank-r c/pi/b functions. Each
 * evaluation path is pinned against an independent oracle: classical
 * identities, brute-force series, finite-difference ODE residuals, and the
 * connection formula tying the three Jacobi solutions together. */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <grassmann/numerics.hpp>
#include <grassmann/specfun.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace grassmann;

namespace {

const double pi_v = std::numbers::pi;
const cplx I(0.0, 1.0);

cplx cgamma(cplx z) { return std::exp(ln_gamma(z)); }

/* Pfaff-mapped brute-force series: F(a,b;c;x) = (1-x)^{-a} sum (a)_k (c-b)_k
 * / ((c)_k k!) w^k with w = x/(x-1), 500 terms, no acceleration. */
cplx series_oracle_2f1(cplx a, cplx b, cplx c, double x) {
  double w = x / (x - 1.0);
  cplx term(1.0, 0.0);
  KahanSumC sum;
  sum.add(term);
  for (int k = 0; k < 500; ++k) {
    term *= (a + double(k)) * (c - b + double(k)) / ((c + double(k)) * double(k + 1)) * w;
    sum.add(term);
  }
  return std::pow(cplx(1.0 - x, 0.0), -a) * sum.value();
}

/* Scalar radial operator applied to y at t by central differences:
 * y'' + ((2b+1) coth t + (1-2l) tanh t) y' + (mu^2 + (b+1-l)^2) y. */
cplx ode_residual(const std::function<cplx(double)>& y, cplx mu, const JacobiOrder& ord,
                  double t, double h = 1e-3) {
  cplx d2 = fd_second_c(y, t, h);
  cplx d1 = (y(t + h) - y(t - h)) / (2.0 * h);
  double p = (2.0 * ord.b + 1.0) / std::tanh(t) + (1.0 - 2.0 * ord.l) * std::tanh(t);
  cplx q = mu * mu + cplx(double(ord.b + 1 - ord.l), 0.0) * double(ord.b + 1 - ord.l);
  return d2 + p * d1 + q * y(t);
}

}  // namespace

TEST_CASE("ln_gamma classical values") {
  CHECK(std::abs(ln_gamma(cplx(1.0, 0.0))) < 1e-14);
  CHECK(std::abs(ln_gamma(cplx(0.5, 0.0)) - cplx(std::log(std::sqrt(pi_v)), 0.0)) < 1e-14);
  CHECK(std::abs(cgamma(cplx(5.0, 0.0)) - cplx(24.0, 0.0)) < 1e-12);
}

TEST_CASE("ln_gamma duplication identity on a grid") {
  std::vector<cplx> zs = {cplx(0.3, 0.0), cplx(1.7, 0.0),  cplx(2.5, 1.3),
                          cplx(-0.4, 2.0), cplx(5.5, -3.0), cplx(0.9, -0.2)};
  for (cplx z : zs) {
    cplx lhs = cgamma(2.0 * z);
    cplx rhs = std::pow(cplx(2.0, 0.0), 2.0 * z - 1.0) / std::sqrt(pi_v) * cgamma(z) *
               cgamma(z + 0.5);
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-12);
  }
}

TEST_CASE("ln_gamma pole error") {
  CHECK_THROWS_AS(ln_gamma(cplx(0.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(ln_gamma(cplx(-3.0, 0.0)), std::domain_error);
}

TEST_CASE("digamma value and poles") {
  CHECK(std::abs(digamma(1.0) + 0.5772156649015329) < 1e-12);
  /* recurrence psi(x+1) = psi(x) + 1/x */
  CHECK(std::abs(digamma(4.7) - digamma(3.7) - 1.0 / 3.7) < 1e-12);
  CHECK_THROWS_AS(digamma(0.0), std::domain_error);
  CHECK_THROWS_AS(digamma(-2.0), std::domain_error);
}

TEST_CASE("gauss_2f1 closed forms") {
  CHECK(std::abs(gauss_2f1(cplx(1.3, 0.4), cplx(-2.0, 1.0), cplx(0.7, 0.0), 0.0) -
                 cplx(1.0, 0.0)) < 1e-15);
  for (double x : {-0.5, -2.0, -7.0}) {
    cplx v = gauss_2f1(cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(2.0, 0.0), x);
    CHECK(std::abs(v - cplx(1.0 / (1.0 - x), 0.0)) < 1e-13);
  }
  cplx ln2 = gauss_2f1(cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0), -1.0);
  CHECK(std::abs(ln2 - cplx(std::log(2.0), 0.0)) < 1e-13);
}

TEST_CASE("gauss_2f1 matches the brute-force series oracle") {
  std::vector<cplx> as = {cplx(0.5, 0.0), cplx(-2.5, 1.0), cplx(3.0, -4.0)};
  std::vector<cplx> bs = {cplx(1.5, 0.0), cplx(0.3, 2.0)};
  std::vector<cplx> cs = {cplx(1.0, 0.0), cplx(2.5, -1.0), cplx(0.4, 0.0)};
  for (double x : {-0.3, -1.0, -3.0})
    for (cplx a : as)
      for (cplx b : bs)
        for (cplx c : cs) {
          cplx got = gauss_2f1(a, b, c, x);
          cplx want = series_oracle_2f1(a, b, c, x);
          CHECK(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)));
        }
}

TEST_CASE("gauss_2f1 domain errors") {
  CHECK_THROWS_AS(gauss_2f1(cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(-2.0, 0.0), -0.5),
                  std::domain_error);
  CHECK_THROWS_AS(gauss_2f1(cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), 0.8),
                  std::invalid_argument);
  /* terminating numerator reaches the value before the c-pole */
  cplx v = gauss_2f1(cplx(-1.0, 0.0), cplx(1.0, 0.0), cplx(-2.0, 0.0), -0.5);
  CHECK(std::abs(v - cplx(1.0 - 0.5 / 2.0 * (-1.0) * (-1.0), 0.0)) < 1e-13);
}

TEST_CASE("jacobi_phi normalization and symmetry") {
  JacobiOrder ord{1, 2};
  CHECK(std::abs(jacobi_phi(cplx(1.7, 0.0), 0.0, ord) - cplx(1.0, 0.0)) < 1e-14);
  for (double t : {0.4, 1.1, 3.0})
    for (double mu : {0.3, 2.9}) {
      cplx p = jacobi_phi(cplx(mu, 0.0), t, ord);
      cplx m = jacobi_phi(cplx(-mu, 0.0), t, ord);
      CHECK(std::abs(p - m) < 1e-12 * (1.0 + std::abs(p)));
    }
}

TEST_CASE("jacobi_phi terminating case is constant") {
  /* b=0, l=0, mu=i: first series parameter (i*mu+1)/2 = 0, so F = 1 */
  JacobiOrder ord{0, 0};
  for (double t : {0.0, 0.7, 2.5, 6.0})
    CHECK(std::abs(jacobi_phi(I, t, ord) - cplx(1.0, 0.0)) < 1e-13);
}

TEST_CASE("jacobi_psi large-t normalization") {
  /* psi = (2 sinh t)^(i*mu-b-1+l) F(...; -sinh^-2 t) with F -> 1, so
   * log|psi| - Re(i*mu-b-1+l) t -> 0; checked at t = 8 and t = 12 */
  struct Case {
    double mu;
    JacobiOrder ord;
  };
  for (const Case& c : {Case{1.3, {1, 2}}, Case{0.7, {0, -3}}, Case{2.1, {2, 0}}}) {
    double zre = double(c.ord.l - c.ord.b - 1);
    auto drift = [&](double t) {
      return std::abs(std::log(std::abs(jacobi_psi(cplx(c.mu, 0.0), t, c.ord))) - zre * t);
    };
    double d8 = drift(8.0), d12 = drift(12.0);
    CHECK(d8 < 1e-5);
    CHECK(d12 < 1e-8);
    CHECK(d12 < d8);
  }
}

TEST_CASE("jacobi_psi domain guards") {
  JacobiOrder ord{1, 0};
  CHECK_THROWS_AS(jacobi_psi(cplx(1.0, 0.0), 0.5, ord), std::domain_error);
  /* i*mu = 2 on the positive integers */
  CHECK_THROWS_AS(jacobi_psi(cplx(0.0, -2.0), 2.0, ord), std::domain_error);
}

TEST_CASE("connection formula at t=2 for random real mu") {
  Rng rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    double mu = 0.3 + 4.7 * rng.uniform();
    int b = int(rng.raw() % 3);
    int l = int(rng.raw() % 9) - 4;
    JacobiOrder ord{b, l};
    cplx cm = jacobi_c(cplx(mu, 0.0), ord);
    cplx cp = jacobi_c(cplx(-mu, 0.0), ord);
    cplx lhs = jacobi_phi(cplx(mu, 0.0), 2.0, ord);
    cplx rhs = cm * jacobi_psi(cplx(mu, 0.0), 2.0, ord) +
               cp * jacobi_psi(cplx(-mu, 0.0), 2.0, ord);
    CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("connection formula uniform sweep") {
  double worst = 0.0;
  for (double mu : {0.3, 1.0, 3.0, 10.0, 20.0})
    for (double t : {1.2, 2.0, 4.0, 10.0})
      for (int b : {0, 1, 2})
        for (int l : {-4, -1, 0, 2, 4}) {
          JacobiOrder ord{b, l};
          cplx phi = jacobi_phi(cplx(mu, 0.0), t, ord);
          cplx tp = jacobi_c(cplx(mu, 0.0), ord) * jacobi_psi(cplx(mu, 0.0), t, ord);
          cplx tm = jacobi_c(cplx(-mu, 0.0), ord) * jacobi_psi(cplx(-mu, 0.0), t, ord);
          double scale = std::max({std::abs(phi), std::abs(tp), std::abs(tm)});
          worst = std::max(worst, std::abs(phi - tp - tm) / scale);
        }
  CHECK(worst < 1e-8);
}

TEST_CASE("jacobi_psi satisfies the radial ODE") {
  for (double t : {1.5, 2.5, 4.0}) {
    cplx mu(1.9, 0.0);
    JacobiOrder ord{1, -2};
    auto y = [&](double s) { return jacobi_psi(mu, s, ord); };
    double scale = std::abs(jacobi_psi(mu, t, ord)) * std::abs(mu * mu);
    CHECK(std::abs(ode_residual(y, mu, ord, t)) < 1e-6 * std::max(1.0, scale));
  }
}

TEST_CASE("jacobi_phi satisfies the radial ODE") {
  for (double t : {0.8, 1.7, 3.2}) {
    cplx mu(2.3, 0.0);
    JacobiOrder ord{2, 3};
    auto y = [&](double s) { return jacobi_phi(mu, s, ord); };
    double scale = std::abs(jacobi_phi(mu, t, ord)) * std::abs(mu * mu);
    CHECK(std::abs(ode_residual(y, mu, ord, t)) < 1e-6 * std::max(1.0, scale));
  }
}

TEST_CASE("jacobi_ode_march cross-validates the series evaluation") {
  cplx mu(1.1, 0.0);
  JacobiOrder ord{1, 1};
  std::vector<double> ts = {1.0, 1.5, 2.5, 4.0, 6.0};
  std::vector<cplx> marched = jacobi_ode_march(mu, ord, ts);
  REQUIRE(marched.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    cplx direct = jacobi_phi(mu, ts[i], ord);
    CHECK(std::abs(marched[i] - direct) < 1e-5 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("jacobi_phi_dt matches finite differences") {
  cplx mu(0.9, 0.0);
  JacobiOrder ord{1, -1};
  for (double t : {0.6, 1.4, 2.8}) {
    cplx fd = (jacobi_phi(mu, t + 1e-4, ord) - jacobi_phi(mu, t - 1e-4, ord)) / 2e-4;
    CHECK(std::abs(jacobi_phi_dt(mu, t, ord) - fd) < 1e-7);
  }
}

TEST_CASE("jacobi_c conjugation symmetry for real mu") {
  for (double mu : {0.4, 1.3, 7.0})
    for (int b : {0, 2})
      for (int l : {-3, 0, 2}) {
        JacobiOrder ord{b, l};
        cplx plus = jacobi_c(cplx(mu, 0.0), ord);
        cplx minus = jacobi_c(cplx(-mu, 0.0), ord);
        CHECK(std::abs(minus - std::conj(plus)) < 1e-12 * (1.0 + std::abs(plus)));
      }
}

TEST_CASE("jacobi_c pole error") {
  /* i*mu = 1: Gamma(i*mu) pole meets the positive-integer guard */
  CHECK_THROWS_AS(jacobi_c(-I, JacobiOrder{0, 0}), std::domain_error);
}

TEST_CASE("rank-1 bridge between hc_c and jacobi_c") {
  for (double lam : {0.5, 1.3, 2.9, 8.0})
    for (int b : {0, 1, 2})
      for (int l : {-2, 0, 3}) {
        cplx full = hc_c(SpectralParam({lam}, l), b);
        cplx bridge = std::pow(2.0, l) * jacobi_c(cplx(lam, 0.0), JacobiOrder{b, l});
        CHECK(std::abs(full - bridge) < 1e-12 * std::abs(full));
      }
}

TEST_CASE("hc_c rank-1 closed form") {
  for (double lam : {0.7, 1.3, 4.2})
    for (int b : {0, 1, 2})
      for (int l : {-2, 0, 3}) {
        double c0 = std::tgamma(b + 1.0) * std::pow(2.0, 1 + b);
        cplx il = I * lam;
        cplx direct = c0 * std::pow(cplx(2.0, 0.0), -il) * cgamma(il) /
                      (cgamma((cplx(b + 1.0, 0.0) + il + double(l)) / 2.0) *
                       cgamma((cplx(b + 1.0, 0.0) + il - double(l)) / 2.0));
        cplx got = hc_c(SpectralParam({lam}, l), b);
        CHECK(std::abs(got - direct) < 1e-12 * std::abs(direct));
      }
}

TEST_CASE("hc_c modulus is Weyl invariant at rank 2") {
  double l1 = 2.3, l2 = 0.9;
  int b = 1, l = 2;
  double base = std::abs(hc_c(SpectralParam({l1, l2}, l), b));
  for (int swap = 0; swap < 2; ++swap)
    for (double s1 : {1.0, -1.0})
      for (double s2 : {1.0, -1.0}) {
        std::vector<double> lam = swap ? std::vector<double>{s2 * l2, s1 * l1}
                                       : std::vector<double>{s1 * l1, s2 * l2};
        double v = std::abs(hc_c(SpectralParam(lam, l), b));
        CHECK(std::abs(v / base - 1.0) < 1e-10);
      }
}

TEST_CASE("hc_c wall error") {
  CHECK_THROWS_AS(hc_c(SpectralParam({2.0, 2.0}, 0), 1), std::domain_error);
  CHECK_THROWS_AS(hc_c(SpectralParam({1.5, -1.5}, 0), 0), std::domain_error);
}

TEST_CASE("SpectralParam regularity predicate") {
  CHECK(SpectralParam({1.0, 2.0}, 0).regular());
  CHECK(SpectralParam({1.3}, 2).regular());
  CHECK_FALSE(SpectralParam({0.0}, 0).regular());
  CHECK_FALSE(SpectralParam({2.0, 2.0}, 0).regular());
  CHECK_FALSE(SpectralParam({0.5, -0.5}, 0).regular());
}

TEST_CASE("pi_short literal values") {
  /* r=1: lambda / (4(b+2)) */
  CHECK(std::abs(pi_short(SpectralParam({3.0}, 0), 1) - cplx(3.0 / 12.0, 0.0)) < 1e-15);
  /* r=2, b=0: (4(b+4))^-4 l1 l2 (l1^2-l2^2) */
  cplx got = pi_short(SpectralParam({2.0, 1.0}, 0), 0);
  double want = std::pow(16.0, -4.0) * 2.0 * 1.0 * (4.0 - 1.0);
  CHECK(std::abs(got - cplx(want, 0.0)) < 1e-18);
}

TEST_CASE("eps_l branch") {
  CHECK(eps_l(5, 2) == -1);  /* b+1-l = -2 */
  CHECK(eps_l(3, 2) == 1);   /* b+1-l = 0, not a negative even integer */
  CHECK(eps_l(0, 0) == 1);
  CHECK(eps_l(4, 1) == -1);  /* b+1-l = -2 */
  CHECK(eps_l(-3, 0) == 1);
}

TEST_CASE("pi_l drops the linear factor exactly when eps_l is -1") {
  /* eps=+1: pi_l(i lambda) = i^r * pi_short-type polynomial; r=1 check */
  cplx a = pi_l({I * 3.0}, 0, 1);
  CHECK(std::abs(a - I * pi_short(SpectralParam({3.0}, 0), 1)) < 1e-15);
  /* eps=-1: no dependence on the linear factor */
  cplx u = pi_l({I * 3.0}, 5, 2);
  cplx v = pi_l({I * 7.0}, 5, 2);
  CHECK(std::abs(u - v) < 1e-15);
}

TEST_CASE("b_fn equals pi_l times hc_c off the walls") {
  {
    SpectralParam lam({1.3}, 2);
    int b = 1;
    cplx direct = pi_l({I * 1.3}, 2, b) * hc_c(lam, b);
    cplx got = b_fn(lam, b);
    CHECK(std::abs(got - direct) < 1e-10 * std::abs(direct));
  }
  {
    SpectralParam lam({2.7, 1.1}, -2);
    int b = 1;
    cplx direct = pi_l({I * 2.7, I * 1.1}, -2, b) * hc_c(lam, b);
    cplx got = b_fn(lam, b);
    CHECK(std::abs(got - direct) < 1e-10 * std::abs(direct));
  }
}

TEST_CASE("b_fn is finite on the walls") {
  /* hc_c poles cancel against pi_l zeros in the factored form */
  cplx wall = b_fn(SpectralParam({2.0, 2.0}, 1), 1);
  CHECK(std::isfinite(wall.real()));
  CHECK(std::isfinite(wall.imag()));
  cplx near = b_fn(SpectralParam({2.0 + 1e-7, 2.0 - 1e-7}, 1), 1);
  CHECK(std::abs(near - wall) < 1e-4 * (1.0 + std::abs(wall)));
}

TEST_CASE("lemma 3.1 window: b_fn against the polynomial envelope") {
  /* |b_fn|^{-1} / prod (1+lambda_j^2)^{(b-eps/2)/2} bounded above and below;
   * the constants are fitted and only the window width is asserted */
  for (int b : {0, 1})
    for (int l : {0, 2}) {
      double ex = (b - eps_l(l, b) / 2.0) / 2.0;
      double lo = 1e300, hi = 0.0;
      for (double lam : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0}) {
        double q = 1.0 / std::abs(b_fn(SpectralParam({lam}, l), b)) /
                   std::pow(1.0 + lam * lam, ex);
        CHECK(std::isfinite(q));
        CHECK(q > 0.0);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
      }
      CHECK(hi / lo < 1e3);
    }
}
