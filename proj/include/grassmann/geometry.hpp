#ifndef GRASSMANN_GEOMETRY_HPP
#define GRASSMANN_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "grassmann/numerics.hpp"

namespace grassmann {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/* Parameters of G = SU(r, r+b) acting on C^n, n = 2r+b, preserving the
 * Hermitian form J = diag(I_r, -I_{r+b}). */
struct Geometry {
  int r = 1;
  int b = 0;
  int n = 2;
  double killing_scale = 4.0;  // trace-form multiplier 2(2r+b)

  Geometry(int r_, int b_);
  Mat J() const;
};

/* Group element: n x n complex matrix with m* J m = J and det m = 1, both
 * enforced at construction with a tolerance that scales like the square of
 * the matrix norm (the residuals of exactly J-unitary matrices grow that
 * way in floating point). */
struct GroupElement {
  Mat m;
  Geometry geom;

  GroupElement(const Geometry& g, Mat mat);
};

/* k = diag(A, D) in K = S(U(r) x U(r+b)); blocks unitary, det A det D = 1. */
struct KElement {
  Mat A;
  Mat D;

  KElement(Mat A_, Mat D_);
};

/* Coordinates t of a point of the flat, ordered t_1 >= ... >= t_r >= 0 in
 * closed-chamber contexts. */
struct ChamberPoint {
  std::vector<double> t;

  ChamberPoint() = default;
  explicit ChamberPoint(std::vector<double> t_) : t(std::move(t_)) {}
  int rank() const { return static_cast<int>(t.size()); }
  bool closed(double tol = 0.0) const;
  bool open(double tol = 0.0) const;
};

struct IwasawaFactors {
  KElement k;
  std::vector<double> H;
  GroupElement n_part;
};

struct CartanFactors {
  KElement k1;
  ChamberPoint H;
  KElement k2;
};

/* Signed permutation (eps, sigma): lambda_i -> eps_i lambda_{sigma(i)}. */
struct WeylElement {
  std::vector<int> signs;
  std::vector<int> perm;
};

struct WeylDensity {
  double Delta;  // K A+ K integration density
  double omega;  // interlocking Vandermonde factor in cosh 2t
  double u;      // 2^r prod cosh t_j
};

/* --- constructors and elementary maps --- */

GroupElement make_a(const Geometry& geom, const std::vector<double>& t);
GroupElement group_identity(const Geometry& geom);
GroupElement group_mul(const GroupElement& x, const GroupElement& y);
GroupElement group_inverse(const GroupElement& x);  // J x* J, exact
GroupElement k_embed(const Geometry& geom, const KElement& k);
GroupElement random_group_element(const Geometry& geom, Rng& rng,
                                  double scale = 0.7);

KElement k_identity(const Geometry& geom);
KElement k_mul(const KElement& x, const KElement& y);
KElement k_adjoint(const KElement& x);
KElement haar_k_next(const Geometry& geom, Rng& rng);
std::vector<KElement> haar_k_sample(const Geometry& geom, std::uint64_t seed,
                                    int count);

/* --- root data --- */

std::vector<double> rho(const Geometry& geom);          // rho_j = b+1+2(r-j)
std::vector<double> rho_l(const Geometry& geom, int l);  // rho_j - l

/* --- decompositions --- */

/* g = k exp(H) n, computed in the weight basis of the flat where the
 * factorization is the unitary x positive-upper-triangular one. */
IwasawaFactors iwasawa(const GroupElement& g);

/* g = k1 exp(H_T) k2 with H_T in the closed chamber. */
CartanFactors cartan(const GroupElement& g);

/* Radial part A+(g) only: log of the top r singular values. */
ChamberPoint cartan_radial(const GroupElement& g);

/* Unitary polar factor of g (block-diagonal for group input; off-block
 * leakage above 1e-8 raises std::domain_error). */
KElement polar_k(const GroupElement& g);

/* --- characters, densities, distances --- */

cplx tau(const KElement& k, int l);  // (det D)^l, unit modulus

/* Phase character of the polar unitary factor, evaluated through the
 * lower-right block determinant: tau_l(pi_0(g)) = (det D_g / |det D_g|)^l.
 * Stable at any translation depth. */
cplx tau_pi0(const GroupElement& g, int l);

/* (H(g^{-1}k), kappa(g^{-1}k)) through the Iwasawa decomposition. */
std::pair<std::vector<double>, KElement> boundary_pair(const GroupElement& g,
                                                       const KElement& k);

WeylDensity weyl_density(const Geometry& geom, const ChamberPoint& t);
double tau_min(const Geometry& geom, const ChamberPoint& t);
double distance(const GroupElement& g);  // 2 sqrt((2r+b) sum t_j^2)

/* tau_l(pi_0(g a_{R t})) along the R grid; t must be in the open chamber.
 * Converges to tau_l of the Iwasawa k-factor of g as R grows. */
std::vector<cplx> lemma_a_limit(const GroupElement& g, const ChamberPoint& t,
                                const std::vector<double>& R_grid, int l);

/* --- Weyl group of signed permutations --- */

std::vector<WeylElement> weyl_group(int r);
WeylElement weyl_identity(int r);
WeylElement weyl_compose(const WeylElement& s1, const WeylElement& s2);
WeylElement weyl_inverse(const WeylElement& s);
std::vector<cplx> weyl_act(const WeylElement& s, const std::vector<cplx>& lam);
bool weyl_is_identity(const WeylElement& s);

}  // namespace grassmann

#endif
