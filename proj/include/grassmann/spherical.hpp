#ifndef GRASSMANN_SPHERICAL_HPP
#define GRASSMANN_SPHERICAL_HPP

#include <cstdint>
#include <vector>

#include "grassmann/geometry.hpp"
#include "grassmann/specfun.hpp"

namespace grassmann {

enum class SphericalMethod { determinant, confluent, defining_integral, series };

/* One radial evaluation of the spherical function; condition_estimate tracks
 * the cancellation incurred by the determinant ratio (1 means none). */
struct SphericalEval {
  cplx value{0.0, 0.0};
  SphericalMethod method = SphericalMethod::determinant;
  double condition_estimate = 1.0;
};

struct IntegralEval {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  long evals = 0;
};

/* Sweep summary for the polynomial-growth bound: smallest degree d for which
 * max_{lambda,t} |pi(lambda) u^l phi| e^{rho_l(H)} / (1+|lambda|^2)^d stops
 * growing along the lambda-grid boundary; max_ratio is the attained maximum
 * (the fitted constant) and witness_* its location. */
struct KeyLemmaReport {
  std::size_t lambda_points = 0;
  std::size_t t_points = 0;
  double lambda_max = 0.0;
  double t_max = 0.0;
  int fitted_d = 0;
  double max_ratio = 0.0;
  std::vector<double> witness_lambda;
  std::vector<double> witness_t;
  bool cor_variant = false;
};

/* Radial spherical function phi_{lambda,l}(a_t) by the determinant formula
 *   u^l(a_t) phi = c det(phi^{(b,-l)}_{lambda_j}(t_i)) / (omega prod(l_k^2 - l_j^2)),
 *   c = (-1)^{r(r-1)/2} 2^{2r(r-1)} 2^{rl} prod_{j<r} (b+j)^{r-j} j!,
 * reduced at r=2 to divided differences in x = cosh 2t and y = lambda^2 so
 * that walls in either variable (gap below 1e-4 relative) switch to finite-
 * difference confluent stencils instead of a 0/0 ratio. Ranks 1 and 2. */
SphericalEval phi(const Geometry& geom, const SpectralParam& lam,
                  const ChamberPoint& t);

/* Oracle for phi by direct quadrature of the boundary integral
 *   phi(g) = int_K e^{-(i lambda + rho) H(g^{-1}k)} tau_l(k^{-1} kappa(g^{-1}k)) dk
 * at g = a_t. Exact trapezoid over the circle subgroup at r=1, b=0;
 * Haar Monte-Carlo otherwise (error_estimate is the standard error).
 * If target_rel_error > 0 and the estimate misses it, throws
 * std::runtime_error (sampling budget exhausted). */
IntegralEval phi_defining_integral(const Geometry& geom, const SpectralParam& lam,
                                   const ChamberPoint& t, std::uint64_t seed,
                                   long samples, double target_rel_error = 0.0);

/* Large-t series: u^{-l} sum_{s in W} hc_c(s lambda, l) prod_j psi_{(s
 * lambda)_j}(t_j) / omega(a_t). Requires lambda real regular and
 * sinh(t_r) > 1 (away from the walls). */
cplx phi_series(const Geometry& geom, const SpectralParam& lam,
                const ChamberPoint& t);

/* Leading asymptotic term u^{-l} sum_s hc_c(s lambda, l) e^{(i s lambda -
 * rho_l)(t)}; lambda real regular. */
cplx phi_asym(const Geometry& geom, const SpectralParam& lam,
              const ChamberPoint& t);

/* Relative residual of the radial eigen-equation applied to G = u^l phi:
 *   4(b+2r) L_l G = -(|lambda|^2 + |rho_l|^2) G,
 *   4(b+2r) L_l = sum_j [d^2_j + ((2b+1) coth t_j + (1-2l) tanh t_j) d_j]
 *               + 4 sum_{j<k} [sinh 2t_j d_j - sinh 2t_k d_k] / (cosh 2t_j - cosh 2t_k),
 * with 5-point central differences of step h. t must sit at least 2h inside
 * the open chamber. */
double radial_residual(const Geometry& geom, const SpectralParam& lam,
                       const ChamberPoint& t, double h = 1e-3);

/* Grid sweep of the growth bound; lambda_grid entries are r-vectors (real),
 * t_grid entries closed-chamber points. cor_variant drops the u^l factor and
 * uses plain rho instead of rho_l. */
KeyLemmaReport key_lemma_sweep(const Geometry& geom, int l,
                               const std::vector<std::vector<double>>& lambda_grid,
                               const std::vector<std::vector<double>>& t_grid,
                               bool cor_variant = false, int d_max = 4);

}  // namespace grassmann

#endif
