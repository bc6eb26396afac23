#ifndef GRASSMANN_SPECFUN_HPP
#define GRASSMANN_SPECFUN_HPP

#include <vector>

#include "grassmann/numerics.hpp"

namespace grassmann {

/* Spectral parameter: lambda in C^r (real in most uses) paired with the
 * bundle weight l. */
struct SpectralParam {
  std::vector<cplx> lambda;
  int l = 0;

  SpectralParam() = default;
  SpectralParam(std::vector<cplx> lam, int l_) : lambda(std::move(lam)), l(l_) {}
  SpectralParam(const std::vector<double>& lam, int l_) : l(l_) {
    lambda.assign(lam.begin(), lam.end());
  }
  SpectralParam(std::initializer_list<double> lam, int l_) : l(l_) {
    lambda.assign(lam.begin(), lam.end());
  }
  int rank() const { return static_cast<int>(lambda.size()); }
  /* Regularity: lambda_i != 0 and lambda_i != +-lambda_j for i < j. */
  bool regular(double tol = 1e-12) const;
};

/* Jacobi order (alpha, beta) = (b, -l). */
struct JacobiOrder {
  int b = 0;
  int l = 0;
};

/* Principal-branch log-gamma for complex argument (imaginary part may carry
 * a 2*pi*k offset; every consumer exponentiates or takes ratios).
 * Throws std::domain_error at the poles z = 0, -1, -2, ... */
cplx ln_gamma(cplx z);

/* Real digamma; poles at non-positive integers raise std::domain_error. */
double digamma(double x);

/* Gauss hypergeometric F(a,b;c;x) for real x < 3/4 (the primary contract is
 * x <= 0; small positive x is supported for finite-difference stencils).
 * x < 0 is handled by the Pfaff map w = x/(x-1) in [0,1).
 * Throws std::domain_error when c is a non-positive integer (unless the
 * series terminates first), std::invalid_argument for x >= 3/4, and
 * std::runtime_error if the series fails to converge. */
cplx gauss_2f1(cplx a, cplx b, cplx c, double x);

/* Jacobi function phi_mu of order (b,-l):
 * F((i*mu+b-l+1)/2, (-i*mu+b-l+1)/2; b+1; -sinh^2 t), normalized to 1 at 0.
 * Even in mu, entire in mu^2; t >= 0. */
cplx jacobi_phi(cplx mu, double t, const JacobiOrder& ord);

/* d/dt of jacobi_phi. */
cplx jacobi_phi_dt(cplx mu, double t, const JacobiOrder& ord);

/* Second Jacobi solution psi_mu(t) =
 * (2 sinh t)^(i*mu-b-1+l) F((-i*mu+b-l+1)/2, (-i*mu-b-l+1)/2; 1-i*mu; -sinh^-2 t),
 * recessive/dominant basis at infinity. Domain sinh t > 1; i*mu must stay a
 * guard band 1e-6 away from the positive integers. */
cplx jacobi_psi(cplx mu, double t, const JacobiOrder& ord);

/* Connection coefficient
 * c_l(mu) = 2^(b+1-l-i*mu) Gamma(b+1) Gamma(i*mu) /
 *           (Gamma((b+1-l+i*mu)/2) Gamma((b+1+l+i*mu)/2));
 * phi_mu = c_l(mu) psi_mu + c_l(-mu) psi_{-mu}.
 * Throws std::domain_error when i*mu is within 1e-6 of an integer. */
cplx jacobi_c(cplx mu, const JacobiOrder& ord);

/* Reference values of phi_mu by Runge-Kutta integration of its radial ODE
 *   y'' + ((2b+1) coth t + (1-2l) tanh t) y' + (mu^2 + (b+1-l)^2) y = 0
 * from t0 = 1 (series initial data). Returns phi at each requested t >= 1,
 * independent of the series/connection evaluation paths. */
std::vector<cplx> jacobi_ode_march(cplx mu, const JacobiOrder& ord,
                                   const std::vector<double>& ts);

/* Rank-r c-function: with c0 = (b!)^r 2^(r(r+b)) prod_{j<r} (b+j)^(r-j) j!,
 * c(lambda,l) = (-1)^(r(r-1)/2) 2^(r(r-1)) c0 / prod_{k<j}(lk^2-lj^2)
 *               * prod_j 2^(-i lj) Gamma(i lj) /
 *                 (Gamma((b+1+i lj+l)/2) Gamma((b+1+i lj-l)/2)).
 * Throws std::domain_error off the regular set (Weyl walls). */
cplx hc_c(const SpectralParam& lam, int b);

/* Product of short positive roots:
 * pi(lambda) = (4(b+2r))^(-r^2) prod_j lambda_j prod_{k<j}(lk^2 - lj^2). */
cplx pi_short(const SpectralParam& lam, int b);

/* pi_l(z): same polynomial in z, with prod z_j dropped when eps_l = -1. */
cplx pi_l(const std::vector<cplx>& z, int l, int b);

/* Sign flag: -1 iff b+1-l is a negative even integer, else +1. */
int eps_l(int l, int b);

/* b(lambda, l) = pi_l(i lambda) c(lambda, l), evaluated in a pole-free
 * factored form; lambda must be real (within 1e-12). */
cplx b_fn(const SpectralParam& lam, int b);

}  // namespace grassmann

#endif
