#ifndef GRASSMANN_TRANSFORMS_HPP
#define GRASSMANN_TRANSFORMS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "grassmann/geometry.hpp"
#include "grassmann/specfun.hpp"
#include "grassmann/spherical.hpp"

namespace grassmann {

/* Finite combination of boundary kernels
 *   f(k) = sum_j a_j e^{(i lambda - rho) H(g_j^{-1} k)} tau_l^{-1}(kappa(g_j^{-1} k)),
 * the dense cyclic family on which the Poisson transform evaluates in closed
 * form. */
struct CyclicTerm {
  cplx a;
  GroupElement g;
};

struct CyclicBoundaryFn {
  std::vector<CyclicTerm> terms;
  SpectralParam lam;
};

/* Pointwise value of the cyclic boundary function at k. */
cplx f_eval(const CyclicBoundaryFn& f, const KElement& k);

/* Killing length of the unit chamber vector: |B(t)| = 2 sqrt(n) |t|_2. */
double two_sqrt_n(const Geometry& geom);

/* phi_{lambda,l}(g0^{-1} g), evaluated radially at A+(g0^{-1} g) and
 * corrected by the polar phase character: phi(h) = Phi(A+(h)) / tau_l(pi0(h)).
 * Stable at any translation depth. */
cplx phi_translated(const SpectralParam& lam, const GroupElement& g0,
                    const GroupElement& g);

/* Poisson transform on cyclic data: P f(g) = sum_j a_j phi_translated(g_j, g). */
cplx poisson(const CyclicBoundaryFn& f, const GroupElement& g);

/* Weyl rotation of the spectral parameter; intertwines the Poisson transform:
 * P_{lambda,l} f = P_{s lambda,l} weyl_translate(f, s). */
CyclicBoundaryFn weyl_translate(const CyclicBoundaryFn& f, const WeylElement& s);

/* Comparison operator
 *   S f(g) = tau_l^{-1}(k2) sum_{s in W} hc_c(s lambda, l)
 *            e^{(i s lambda - rho)(A+(g))} (weyl_translate(f, s))(k1)
 * with (k1, A+, k2) = cartan(g). */
cplx s_operator(const CyclicBoundaryFn& f, const GroupElement& g);

/* K-handling declaration for ball integrals: radial assumes the fiber value
 * is k1-independent (bi-covariant integrands), torus is the exact circle
 * average at r=1, b=0, haar_mc draws one fixed Haar sample per integral
 * (common random numbers across t, so adaptive quadrature sees a smooth
 * integrand). */
enum class AverageScheme { radial, torus, haar_mc };

struct BallAverageSpec {
  AverageScheme scheme = AverageScheme::radial;
  int theta_nodes = 64;
  int mc_samples = 128;
  std::uint64_t seed = 20260813;
  double abs_tol = 1e-10;
  double rel_tol = 1e-7;
  int max_evals = 400000;
};

/* (1/R^r) int over {k1 exp(H) k2 : |H| <= R} of the k2-independent fiber
 * value, in K A+ K coordinates:
 *   (1/R^r) (2 sqrt n)^r int_{|t| <= R/(2 sqrt n)} avg_{k1} fiber(k1, t)
 *           Delta(t) dt,
 * where |H| is the Killing distance and dt Lebesgue in the t chart. */
cplx chamber_k_integral(
    const Geometry& geom,
    const std::function<cplx(const KElement&, const ChamberPoint&)>& fiber,
    double R, const BallAverageSpec& spec);

/* (1/R^r) int_{B(R)} |F(g)|^2 dg for right-covariant F (|F(g k)| = |F(g)|). */
double ball_average(const Geometry& geom,
                    const std::function<cplx(const GroupElement&)>& F, double R,
                    const BallAverageSpec& spec);

struct LimitReport {
  std::vector<double> R_grid;
  std::vector<double> values;
  double limit = 0.0;
  double limit_uncertainty = 0.0;
  double norm_f2 = 0.0;     // ||f||^2 on the boundary
  double reference = 0.0;   // |c(lambda,l)|^2 ||f||^2 (times calibration)
  double ratio = 0.0;       // limit / reference
  double kappa_killing = 0.0;  // pi^{r/2}/Gamma(r/2+1), Killing-measure candidate
  double gamma_paper = 0.0;    // 2^{-r/2}/Gamma(r/2+1)
};

/* ||f||^2_{L^2(K)} through the reproducing identity
 * <f_{g_i}, f_{g_j}> = phi_{lambda,l}(g_i^{-1} g_j). */
double cyclic_norm2(const CyclicBoundaryFn& f);

/* Tabulates (1/R^r) int_{B(R)} |P f|^2 over R_grid, extrapolates the limit by
 * a v + c/R fit on the top half, and reports limit / (|c(lambda,l)|^2 ||f||^2)
 * together with both candidate normalization constants. */
LimitReport norm_limit(const Geometry& geom, const CyclicBoundaryFn& f,
                       const std::vector<double>& R_grid,
                       const BallAverageSpec& spec);

/* (1/R^r) int_{B(R)} |P f - S f|^2 per grid entry. */
std::vector<double> asymptotic_residual(const Geometry& geom,
                                        const CyclicBoundaryFn& f,
                                        const std::vector<double>& R_grid,
                                        const BallAverageSpec& spec);

/* tau-radial profile f(A+) with compact support in the Killing ball of
 * radius R_supp; f takes the chamber coordinates t_1..t_r. */
struct RadialProfile {
  std::function<cplx(const std::vector<double>&)> f;
  double R_supp = 1.0;
};

/* Smooth compactly supported bump exp(-1/(1-s^2)), s = |t - center| / width. */
RadialProfile make_radial_bump(const Geometry& geom,
                               const std::vector<double>& center, double width,
                               cplx amplitude = cplx(1.0, 0.0));

/* Rank-1 profile from CSV rows t,re,im via a natural cubic spline;
 * zero outside the tabulated range. */
RadialProfile load_radial_profile(const Geometry& geom, const std::string& path);

/* Reduced spherical transform of the tau-radial function F = f(A+) tau_l^{-1}(pi0):
 * fhat(lambda) = int_{a+} f(H) conj(phi_{lambda,l}(e^H)) Delta(e^H) dH. */
cplx spherical_transform(const Geometry& geom, const RadialProfile& p,
                         const SpectralParam& lam, double abs_tol = 1e-10,
                         double rel_tol = 1e-8, int max_evals = 400000);

/* ||F||^2 = int |f|^2 Delta dH over the chamber. */
double profile_norm2(const Geometry& geom, const RadialProfile& p);

/* |fhat(lambda)| / (|c(lambda,l)| R_supp^{r/2} ||F||). */
double restriction_ratio(const Geometry& geom, const RadialProfile& p,
                         const SpectralParam& lam, double R_supp);

/* One boundary-inversion sample
 *   f_R(k) = (1/R^r) int_{B(R)} e^{(i lambda - rho) H(g^{-1}k)}
 *            tau_{-l}(kappa(g^{-1}k)) P f(g) dg
 * (the k2 integral collapses on tau-covariant data). */
cplx inversion_value(const Geometry& geom, const CyclicBoundaryFn& f,
                     const KElement& k, double R, const BallAverageSpec& spec);

/* f_R(k) across R_grid with the same 1/R extrapolation; reference is
 * |c(lambda,l)|^2 times the supplied calibration constant (the measured
 * volume normalization from a reference run), so ratio estimates f(k). */
LimitReport boundary_inversion(const Geometry& geom, const CyclicBoundaryFn& f,
                               const KElement& k,
                               const std::vector<double>& R_grid,
                               const BallAverageSpec& spec,
                               double calibration = 1.0);

}  // namespace grassmann

#endif
